//! From a warping perturbation `V` to the one-dimensional data: the
//! compactly supported potential `Q_f`, the transversal momenta `z_k` and
//! the boundary values of `f = e^{-x} + V`.
//!
//! `V` is piecewise polynomial, so every derivative of `Q_f` is exact
//! (Taylor jets, no finite differences).

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::quad::GaussLegendre;

/// Which one-sided limit to take at a breakpoint.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Piecewise polynomial on `[b_0, b_L]`, zero outside. Coefficients of each
/// piece are in powers of `(x - b_l)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PiecewisePoly {
    pub breakpoints: Vec<f64>,
    pub coefficients: Vec<Vec<f64>>,
}

impl PiecewisePoly {
    pub fn new(breakpoints: Vec<f64>, coefficients: Vec<Vec<f64>>) -> Result<Self> {
        if breakpoints.len() < 2 {
            return Err(Error::Validation("need at least two breakpoints".into()));
        }
        if breakpoints.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Validation("breakpoints must be strictly increasing".into()));
        }
        if coefficients.len() != breakpoints.len() - 1 {
            return Err(Error::Validation(format!(
                "{} intervals but {} coefficient lists",
                breakpoints.len() - 1,
                coefficients.len()
            )));
        }
        if breakpoints.iter().chain(coefficients.iter().flatten()).any(|v| !v.is_finite()) {
            return Err(Error::Validation("non-finite breakpoint or coefficient".into()));
        }
        Ok(PiecewisePoly { breakpoints, coefficients })
    }

    pub fn constant(a: f64, c: f64) -> Self {
        PiecewisePoly { breakpoints: vec![0.0, a], coefficients: vec![vec![c]] }
    }

    pub fn zero(a: f64) -> Self {
        Self::constant(a, 0.0)
    }

    /// Single piece on `[0, a]` from coefficients in powers of `x`.
    pub fn from_global(a: f64, coeffs: Vec<f64>) -> Self {
        PiecewisePoly { breakpoints: vec![0.0, a], coefficients: vec![coeffs] }
    }

    pub fn support_end(&self) -> f64 {
        *self.breakpoints.last().unwrap()
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.iter().flatten().all(|&c| c == 0.0)
    }

    fn piece(&self, x: f64, side: Side) -> Option<usize> {
        let b = &self.breakpoints;
        let last = b.len() - 1;
        if x < b[0] || x > b[last] || (x == b[0] && side == Side::Left) || (x == b[last] && side == Side::Right) {
            return None;
        }
        // index of the interval [b_l, b_{l+1}] that owns x from the requested side
        let mut l = b.partition_point(|&bp| bp <= x).saturating_sub(1);
        if side == Side::Left && l > 0 && x == b[l] {
            l -= 1;
        }
        Some(l.min(last - 1))
    }

    /// Taylor jet of the given order at `x`.
    pub fn jet(&self, x: f64, order: usize, side: Side) -> Jet {
        let mut out = vec![0.0; order + 1];
        if let Some(l) = self.piece(x, side) {
            let d = x - self.breakpoints[l];
            let c = &self.coefficients[l];
            // coefficient of h^k in sum_i c_i (d + h)^i
            for (k, o) in out.iter_mut().enumerate() {
                let mut s = 0.0;
                let mut binom = 1.0;
                for i in k..c.len() {
                    if i > k {
                        binom *= i as f64 / (i - k) as f64;
                    }
                    s += c[i] * binom * d.powi((i - k) as i32);
                }
                *o = s;
            }
        }
        Jet(out)
    }

    pub fn eval(&self, x: f64, side: Side) -> f64 {
        self.jet(x, 0, side).0[0]
    }

    /// Same function with an extra breakpoint; used to build distinct
    /// descriptions of one potential.
    pub fn split_at(&self, x: f64) -> Result<Self> {
        let l = self
            .piece(x, Side::Right)
            .filter(|&l| x > self.breakpoints[l])
            .ok_or_else(|| Error::Validation(format!("cannot split at {x}")))?;
        let degree = self.coefficients[l].len().saturating_sub(1);
        let right = self.jet(x, degree, Side::Right).0;
        let mut breakpoints = self.breakpoints.clone();
        breakpoints.insert(l + 1, x);
        let mut coefficients = self.coefficients.clone();
        coefficients.insert(l + 1, right);
        Ok(PiecewisePoly { breakpoints, coefficients })
    }
}

/// Geometric input: dimension, energy and the perturbation `V` on `[0, a]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WarpSpec {
    pub n: u32,
    pub lambda: f64,
    pub p: u32,
    #[serde(flatten)]
    pub v: PiecewisePoly,
}

impl WarpSpec {
    pub fn a(&self) -> f64 {
        self.v.support_end()
    }

    /// `V = c x (a - x)^{p+1}` on `[0, a]`: `C^p` at `a` with a jump in
    /// `V^{(p+1)}`.
    pub fn bump(n: u32, lambda: f64, a: f64, p: u32, c: f64) -> Self {
        let e = p as usize + 1;
        // (a - x)^e expanded in powers of x, then shifted by one for the x factor
        let mut coeffs = vec![0.0; e + 2];
        let mut binom = 1.0;
        for j in 0..=e {
            if j > 0 {
                binom *= (e - j + 1) as f64 / j as f64;
            }
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            coeffs[j + 1] = c * binom * sign * a.powi((e - j) as i32);
        }
        WarpSpec { n, lambda, p, v: PiecewisePoly::from_global(a, coeffs) }
    }

    /// `V = 0` on `[0, a]`. Degenerate: no jump, no beta family.
    pub fn unperturbed(n: u32, lambda: f64, a: f64) -> Self {
        WarpSpec { n, lambda, p: 1, v: PiecewisePoly::zero(a) }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 3 {
            return Err(Error::Validation(format!("n must be at least 3, got {}", self.n)));
        }
        if !(self.lambda > 0.0) || !self.lambda.is_finite() {
            return Err(Error::Validation(format!("lambda must be positive, got {}", self.lambda)));
        }
        if self.p < 1 {
            return Err(Error::Validation("p must be at least 1".into()));
        }
        let v = PiecewisePoly::new(self.v.breakpoints.clone(), self.v.coefficients.clone())?;
        if v.breakpoints[0] != 0.0 {
            return Err(Error::Validation("first breakpoint must be 0".into()));
        }
        if v.is_zero() {
            return Ok(());
        }
        let p = self.p as usize;
        let scale = v.coefficients.iter().flatten().fold(0.0f64, |m, c| m.max(c.abs())).max(1.0);
        let tol = 1e-10 * scale;
        for &b in &v.breakpoints[1..v.breakpoints.len() - 1] {
            let l = v.jet(b, p + 1, Side::Left);
            let r = v.jet(b, p + 1, Side::Right);
            for k in 0..=p + 1 {
                if (l.deriv_value(k) - r.deriv_value(k)).abs() > tol * (1.0 + factorial(k)) {
                    return Err(Error::Validation(format!(
                        "V is not C^{} at interior breakpoint {b}: derivative {k} jumps",
                        p + 1
                    )));
                }
            }
        }
        let a = self.a();
        let at_a = v.jet(a, p + 1, Side::Left);
        for k in 0..=p {
            if at_a.deriv_value(k).abs() > tol * (1.0 + factorial(k)) {
                return Err(Error::Validation(format!("V is not C^{p} at a: derivative {k} = {}", at_a.deriv_value(k))));
            }
        }
        if at_a.deriv_value(p + 1).abs() <= tol {
            return Err(Error::Validation(format!("V^({}) has no jump at a", p + 1)));
        }
        let samples = 4000;
        let mut min = f64::INFINITY;
        for i in 0..=samples {
            let x = a * i as f64 / samples as f64;
            let side = if i == samples { Side::Left } else { Side::Right };
            min = min.min(1.0 + x.exp() * v.eval(x, side));
        }
        if !(min > 1e-6) {
            return Err(Error::Model(format!("f = e^(-x) + V is not positive: min e^x f = {min}")));
        }
        Ok(())
    }
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|j| j as f64).product()
}

/// Where `Q_f` comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Profile {
    Warp(WarpSpec),
    /// `Q_f` given directly; used for closed-form checks (with `lambda = 0`
    /// this is the free half-line plus a compact potential).
    Direct { q: PiecewisePoly, lambda: f64, p: u32 },
}

/// Analytic access to `Q_f` on `[0, a]`, zero beyond.
#[derive(Clone, Debug)]
pub struct Potential {
    pub profile: Profile,
    gl: GaussLegendre,
}

impl Potential {
    pub fn from_warp(spec: WarpSpec) -> Result<Self> {
        spec.validate()?;
        Ok(Potential { profile: Profile::Warp(spec), gl: GaussLegendre::new(24) })
    }

    /// Directly prescribed `Q_f`; `lambda = 0` is allowed here.
    pub fn direct(q: PiecewisePoly, lambda: f64, p: u32) -> Result<Self> {
        let q = PiecewisePoly::new(q.breakpoints, q.coefficients)?;
        if !(lambda >= 0.0) {
            return Err(Error::Validation(format!("lambda must be nonnegative, got {lambda}")));
        }
        if p < 1 {
            return Err(Error::Validation("p must be at least 1".into()));
        }
        Ok(Potential { profile: Profile::Direct { q, lambda, p }, gl: GaussLegendre::new(24) })
    }

    pub fn constant_well(a: f64, c: f64, lambda: f64) -> Self {
        Self::direct(PiecewisePoly::constant(a, c), lambda, 1).expect("valid constant well")
    }

    pub fn a(&self) -> f64 {
        match &self.profile {
            Profile::Warp(w) => w.a(),
            Profile::Direct { q, .. } => q.support_end(),
        }
    }

    pub fn lambda(&self) -> f64 {
        match &self.profile {
            Profile::Warp(w) => w.lambda,
            Profile::Direct { lambda, .. } => *lambda,
        }
    }

    pub fn p(&self) -> u32 {
        match &self.profile {
            Profile::Warp(w) => w.p,
            Profile::Direct { p, .. } => *p,
        }
    }

    pub fn breakpoints(&self) -> &[f64] {
        match &self.profile {
            Profile::Warp(w) => &w.v.breakpoints,
            Profile::Direct { q, .. } => &q.breakpoints,
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.profile {
            Profile::Warp(w) => w.v.is_zero(),
            Profile::Direct { q, .. } => q.is_zero(),
        }
    }

    /// Jet of `Q_f` at `x`.
    pub fn q_jet(&self, x: f64, order: usize, side: Side) -> Jet {
        match &self.profile {
            Profile::Direct { q, .. } => q.jet(x, order, side),
            Profile::Warp(w) => {
                let v = w.v.jet(x, order + 2, side);
                if v.0.iter().all(|&c| c == 0.0) {
                    return Jet::constant(0.0, order);
                }
                let e = Jet((0..=order + 2).map(|k| (-x).exp() * (-1f64).powi(k as i32) / factorial(k)).collect());
                let f = &e + &v;
                let f1 = f.derivative();
                let f2 = f1.derivative();
                let f = f.truncate(order);
                let f1 = f1.truncate(order);
                let v = v.truncate(order);
                let e = e.truncate(order);
                let k = w.n as f64 / 2.0 - 1.0;
                let r1 = f1.div(&f);
                let q = &f2.div(&f).scale(k) + &r1.square().scale(k * (k - 1.0));
                let warp = &v * &(&e.scale(2.0) + &v);
                let mut q = &q - &warp.scale(w.lambda);
                q.0[0] -= k * k;
                q
            }
        }
    }

    /// `Q_f(x)`; the left limit at `a`, zero for `x > a`.
    pub fn q(&self, x: f64) -> f64 {
        let a = self.a();
        if x > a || x < 0.0 {
            return 0.0;
        }
        let side = if x == a { Side::Left } else { Side::Right };
        self.q_jet(x, 0, side).0[0]
    }

    /// `d^k Q_f / dx^k (a^-)`.
    pub fn q_deriv_left_of_a(&self, k: usize) -> f64 {
        self.q_jet(self.a(), k, Side::Left).deriv_value(k)
    }

    /// `d^{p-1} Q_f (a^-)`, minus the jump of that derivative at `a`.
    pub fn jump_value(&self) -> f64 {
        self.q_deriv_left_of_a(self.p() as usize - 1)
    }

    /// `int_x^a Q_f`, Gauss-Legendre on each smooth piece.
    pub fn integral_from(&self, x: f64) -> f64 {
        let a = self.a();
        if x >= a {
            return 0.0;
        }
        let x = x.max(0.0);
        let mut s = 0.0;
        let b = self.breakpoints();
        for w in b.windows(2) {
            let lo = w[0].max(x);
            let hi = w[1];
            if hi <= lo {
                continue;
            }
            let mid_side = |t: f64| if t >= hi { Side::Left } else { Side::Right };
            s += self.gl.integrate(lo, hi, |t| self.q_jet(t, 0, mid_side(t)).0[0]);
        }
        s
    }

    /// `f(0)`, `f'(0)` for the warped profile; free values otherwise.
    pub fn f0(&self) -> (f64, f64) {
        match &self.profile {
            Profile::Warp(w) => {
                let j = w.v.jet(0.0, 1, Side::Right);
                (1.0 + j.0[0], -1.0 + j.0[1])
            }
            Profile::Direct { .. } => (1.0, -1.0),
        }
    }

    /// Stable digest of the profile, used to key kernel caches.
    pub fn fingerprint(&self) -> [u8; 32] {
        let json = serde_json::to_vec(&self.profile).expect("profile serializes");
        Sha256::digest(&json).into()
    }
}

/// Samples of `Q_f` on a uniform grid of `[0, a]` plus jump metadata.
#[derive(Clone, Debug)]
pub struct PotentialTable {
    pub grid: Vec<f64>,
    pub qf_values: Vec<f64>,
    pub jump_order: u32,
    pub jump_value: f64,
    pub f0: f64,
    pub f0_prime: f64,
    /// `V = 0`: no jump, the beta family is absent.
    pub degenerate: bool,
    pub potential: Potential,
}

/// Samples `Q_f` at `intervals + 1` uniform nodes of `[0, a]`.
pub fn build_potential(spec: &WarpSpec, intervals: usize) -> Result<PotentialTable> {
    if intervals < 64 {
        return Err(Error::Validation(format!("grid_size must be at least 64, got {intervals}")));
    }
    tabulate(Potential::from_warp(spec.clone())?, intervals)
}

pub fn tabulate(potential: Potential, intervals: usize) -> Result<PotentialTable> {
    let a = potential.a();
    let grid: Vec<f64> = (0..=intervals).map(|i| if i == intervals { a } else { a * i as f64 / intervals as f64 }).collect();
    let qf_values = grid.iter().map(|&x| potential.q(x)).collect();
    let (f0, f0_prime) = potential.f0();
    Ok(PotentialTable {
        grid,
        qf_values,
        jump_order: potential.p(),
        jump_value: potential.jump_value(),
        f0,
        f0_prime,
        degenerate: potential.is_zero(),
        potential,
    })
}

/// Transversal eigenvalues and the shifted momenta `z_k = sqrt(mu_k^2 + (n-2)^2/4)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TransversalSpectrum {
    pub mu_sq: Vec<f64>,
    pub z: Vec<f64>,
}

pub fn shifted_momenta(mu_sq: &[f64], n: u32) -> Result<TransversalSpectrum> {
    if let Some(bad) = mu_sq.iter().find(|&&m| !(m >= 0.0)) {
        return Err(Error::Validation(format!("negative eigenvalue {bad}")));
    }
    if mu_sq.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Validation("eigenvalues must be sorted".into()));
    }
    let shift = (n as f64 - 2.0).powi(2) / 4.0;
    Ok(TransversalSpectrum { mu_sq: mu_sq.to_vec(), z: mu_sq.iter().map(|m| (m + shift).sqrt()).collect() })
}

fn binomial(n: i64, k: i64) -> u64 {
    if n < 0 || k < 0 || k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

/// Laplacian eigenvalues `k(k+n-2)` of the round `S^{n-1}` and their
/// multiplicities, for `k = 0..=kmax`.
pub fn sphere_spectrum(n: u32, kmax: u32) -> Vec<(f64, u64)> {
    let n = n as i64;
    (0..=kmax as i64)
        .map(|k| {
            let mult = binomial(k + n - 1, n - 1) - binomial(k + n - 3, n - 1);
            ((k * (k + n - 2)) as f64, mult)
        })
        .collect()
}
