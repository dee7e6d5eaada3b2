//! Gelfand-Levitan-Marchenko data and inversion.
//!
//! Forward: `S(k) = psi~(0, ik) / psi~(0, -ik)`, bound states at the positive
//! zeros `alpha` of `psi` with norming constants `int psi~(x, alpha)^2 dx`,
//! and
//!
//! ```text
//! F(x) = sum_k e^{-alpha_k x} / m_k + (1/2 pi) int_R [1 - S(k)] e^{ikx} dk.
//! ```
//!
//! Inverse: for each `x`, solve `K(x,y) + F(x+y) + int_x^X K(x,t) F(t+y) dt = 0`
//! and read the full potential from `q(x) = -2 d/dx K(x,x)`; then
//! `Q_f = q + lambda e^{-2x}`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::contour::{cauchy_derivative, Rect};
use crate::error::{Error, Result};
use crate::jost::{normalization, Jost};
use crate::kernel::solve_kernel;
use crate::model::Potential;
use crate::poles::{locate_zeros, SearchOptions};
use crate::quad::FilonLaplace;

type C = Complex64;

/// GLM systems with a larger estimated 1-norm condition number are refused.
pub const MAX_CONDITION: f64 = 1e10;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct BoundState {
    pub alpha: f64,
    pub norming: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScatteringData {
    /// Uniform nonnegative frequencies `0, dk, ..., k_max`.
    pub k_grid: Vec<f64>,
    pub s_values: Vec<C>,
    /// `S(-k)`, evaluated independently.
    pub s_negative: Vec<C>,
    pub bound_states: Vec<BoundState>,
    /// Large-`k` model subtracted from `1 - S` and added back in closed form.
    pub tail: Tail,
    /// Estimated contribution of `k > k_max` after the tail subtraction.
    pub tail_estimate: f64,
    /// `psi~(0, 0)` is close to zero, so `S(0)` is a limit.
    pub s0_flag: bool,
}

/// `psi~(0, ik) / psi~(0, -ik)` on the given frequencies.
pub fn s_function(jost: &Jost, k_grid: &[f64]) -> Result<Vec<C>> {
    k_grid
        .par_iter()
        .map(|&k| {
            let num = jost.classical(C::new(0.0, k)).0;
            let den = jost.classical(C::new(0.0, -k)).0;
            if den.norm() < 1e-14 * num.norm().max(1e-300) || den.norm() == 0.0 {
                return Err(Error::Data(format!("psi~(0, -ik) vanishes at k = {k}")));
            }
            Ok(num / den)
        })
        .collect()
}

/// `int_0^inf psi~(x, alpha)^2 dx = psi~'(0, alpha) d/dz psi~(0, alpha) / (2 alpha)`.
pub fn norming_constant(jost: &Jost, alpha: f64) -> f64 {
    let z = C::new(alpha, 0.0);
    let psi = |w: C| jost.psi(w);
    let r = (0.25 * alpha).min(0.05);
    let dpsi = cauchy_derivative(&psi, z, r, 1, 32);
    let n = normalization(z, jost.lambda);
    (jost.psi_prime(z) * dpsi / (2.0 * alpha * n * n)).re
}

/// Zeros of `psi(0, .)` on the positive real axis up to `z_max`.
pub fn bound_states(jost: &Jost, z_max: f64, opts: &SearchOptions) -> Result<Vec<BoundState>> {
    let f = |z: C| jost.psi(z);
    let found = locate_zeros(&Rect::new(0.0137, z_max, -0.25, 0.25)?, &f, opts)?;
    let mut out = Vec::new();
    for z in found.zeros {
        if z.z.im.abs() > 1e-8 || z.multiplicity != 1 {
            return Err(Error::Data(format!("non-real or multiple zero {} in the right half-plane", z.z)));
        }
        let norming = norming_constant(jost, z.z.re);
        if !(norming > 0.0) {
            return Err(Error::Data(format!("norming constant {norming} at alpha = {} is not positive", z.z.re)));
        }
        out.push(BoundState { alpha: z.z.re, norming });
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ForwardOptions {
    pub k_max: f64,
    pub dk: f64,
    /// Largest accepted tail estimate.
    pub tail_tol: f64,
    /// Bound states are searched on `(0, bound_search]`.
    pub bound_search: f64,
}

impl ForwardOptions {
    pub fn for_support(a: f64) -> Self {
        ForwardOptions { k_max: 200.0 / a, dk: 0.025, tail_tol: 1e-3, bound_search: 6.0 }
    }
}

pub fn scattering_data(jost: &Jost, opts: &ForwardOptions) -> Result<ScatteringData> {
    let n = (opts.k_max / opts.dk).round() as usize;
    let n = n + n % 2;
    let dk = opts.k_max / n as f64;
    let k_grid: Vec<f64> = (0..=n).map(|i| i as f64 * dk).collect();
    let s_values = s_function(jost, &k_grid)?;
    let neg: Vec<f64> = k_grid.iter().map(|k| -k).collect();
    let s_negative = s_function(jost, &neg)?;
    let bound_states = bound_states(jost, opts.bound_search, &SearchOptions::default())?;

    // fit Im(1 - S) ~ 2c/k on the upper half of the band
    let lo = n / 2;
    let fit: Vec<f64> = (lo..=n).map(|i| 0.5 * k_grid[i] * (1.0 - s_values[i]).im).collect();
    let tail_c = fit.iter().sum::<f64>() / fit.len() as f64;
    let mut tail = Tail { c: tail_c, a: jost.a, sin_amp: 0.0, cos_amp: 0.0 };
    if jost.a > 0.0 {
        // least squares for the support-edge terms on the same band
        let (mut ss, mut sr, mut cc, mut cr) = (0.0, 0.0, 0.0, 0.0);
        for i in lo..=n {
            let k = k_grid[i];
            let r = 1.0 - s_values[i] - tail.eval(k);
            let sb = 2.0 * (2.0 * k * jost.a).sin() / (k * k + 1.0);
            let cb = 2.0 * (2.0 * k * jost.a).cos() / (k * k + 1.0);
            ss += sb * sb;
            sr += sb * r.im;
            cc += cb * cb;
            cr += cb * r.re;
        }
        tail.sin_amp = if ss > 0.0 { sr / ss } else { 0.0 };
        tail.cos_amp = if cc > 0.0 { cr / cc } else { 0.0 };
    }
    let d = (lo..=n)
        .map(|i| {
            let k = k_grid[i];
            (1.0 - s_values[i] - tail.eval(k)).norm() * k * k
        })
        .fold(0.0, f64::max);
    let tail_estimate = d / (std::f64::consts::PI * opts.k_max);
    if tail_estimate > opts.tail_tol {
        return Err(Error::Resolution(format!(
            "frequency tail estimate {tail_estimate:.3e} exceeds {:.1e}; raise k_max above {}",
            opts.tail_tol, opts.k_max
        )));
    }
    let c0 = jost.classical(C::new(0.0, 0.0)).0;
    let s0_flag = c0.norm() < 1e-8;
    Ok(ScatteringData { k_grid, s_values, s_negative, bound_states, tail, tail_estimate, s0_flag })
}

/// Large-`k` model of `1 - S`:
///
/// ```text
/// (2ic k + 2c^2)/(k^2+1) + (2i s sin 2ka + 2 c' cos 2ka)/(k^2+1)
/// ```
///
/// The first part matches `2ic/k + 2c^2/k^2`, the second the oscillating
/// `1/k^2` term produced by a discontinuity of `Q_f` at `a`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Tail {
    pub c: f64,
    pub a: f64,
    pub sin_amp: f64,
    pub cos_amp: f64,
}

impl Tail {
    pub fn eval(&self, k: f64) -> C {
        let d = k * k + 1.0;
        let (s, c) = (2.0 * k * self.a).sin_cos();
        C::new(2.0 * self.c * self.c + 2.0 * self.cos_amp * c, 2.0 * self.c * k + 2.0 * self.sin_amp * s) / d
    }

    /// `(1/2 pi) int_R tail(k) e^{ikx} dk` for `x > 0`.
    pub fn transform(&self, x: f64) -> f64 {
        let near = (-(x - 2.0 * self.a).abs()).exp();
        let far = (-(x + 2.0 * self.a)).exp();
        (self.c * self.c - self.c) * (-x).exp() + 0.5 * self.sin_amp * (far - near) + 0.5 * self.cos_amp * (far + near)
    }
}

impl ScatteringData {
    fn dk(&self) -> f64 {
        self.k_grid[1] - self.k_grid[0]
    }

    fn filon(&self, values: &[C]) -> (FilonLaplace, FilonLaplace) {
        let re: Vec<f64> = values.iter().map(|v| v.re).collect();
        let im: Vec<f64> = values.iter().map(|v| v.im).collect();
        (FilonLaplace::new(&re, self.dk()), FilonLaplace::new(&im, self.dk()))
    }

    /// `1 - S(k) - tail(k)` for `k >= 0`.
    fn residual(&self) -> Vec<C> {
        self.k_grid.iter().zip(&self.s_values).map(|(&k, s)| 1.0 - s - self.tail.eval(k)).collect()
    }

    /// `F(x)` on the given points.
    pub fn assemble_f(&self, xs: &[f64]) -> Vec<f64> {
        let (lr, li) = self.filon(&self.residual());
        xs.par_iter()
            .map(|&x| {
                let w = C::new(0.0, -x);
                let integral = lr.eval(w) + C::i() * li.eval(w);
                let fs = integral.re / std::f64::consts::PI + self.tail.transform(x);
                let fb: f64 = self.bound_states.iter().map(|b| (-b.alpha * x).exp() / b.norming).sum();
                fs + fb
            })
            .collect()
    }

    /// Imaginary part of `(1/2 pi) int_{-K}^{K} [1 - S(k)] e^{ikx} dk` with
    /// `S(-k)` taken from its own evaluation; zero for real potentials.
    pub fn f_imaginary(&self, xs: &[f64]) -> Vec<f64> {
        let pos = self.residual();
        let neg: Vec<C> =
            self.k_grid.iter().zip(&self.s_negative).map(|(&k, s)| 1.0 - s - self.tail.eval(-k)).collect();
        let (pr, pi) = self.filon(&pos);
        let (nr, ni) = self.filon(&neg);
        xs.iter()
            .map(|&x| {
                let wp = C::new(0.0, -x);
                let wn = C::new(0.0, x);
                let total = pr.eval(wp) + C::i() * pi.eval(wp) + nr.eval(wn) + C::i() * ni.eval(wn);
                total.im / (2.0 * std::f64::consts::PI)
            })
            .collect()
    }
}

/// `F` sampled at `j h`, `j = 0..=2m`; the GLM window is `[x, m h]`.
#[derive(Clone, Debug, Serialize)]
pub struct UniformF {
    pub h: f64,
    pub values: Vec<f64>,
}

impl UniformF {
    pub fn sample(data: &ScatteringData, h: f64, x_max: f64) -> Self {
        let m = (x_max / h).ceil() as usize;
        let xs: Vec<f64> = (0..=2 * m).map(|j| j as f64 * h).collect();
        UniformF { h, values: data.assemble_f(&xs) }
    }

    pub fn window(&self) -> usize {
        (self.values.len() - 1) / 2
    }
}

#[derive(Clone, Debug)]
pub struct GlmRow {
    pub x: f64,
    /// `K(x, x + j h)`.
    pub k_row: Vec<f64>,
    pub condition: f64,
}

/// Hager's estimate of `||A^{-1}||_1` for symmetric `A`.
fn inverse_norm1(solve: impl Fn(&DVector<f64>) -> DVector<f64>, n: usize) -> f64 {
    let mut x = DVector::from_element(n, 1.0 / n as f64);
    let mut est = 0.0;
    for _ in 0..5 {
        let y = solve(&x);
        est = y.iter().map(|v| v.abs()).sum();
        let xi = y.map(|v| if v >= 0.0 { 1.0 } else { -1.0 });
        let z = solve(&xi);
        let (j, zmax) = z.iter().enumerate().fold((0, 0.0f64), |b, (i, v)| if v.abs() > b.1 { (i, v.abs()) } else { b });
        if zmax <= z.dot(&x) {
            break;
        }
        x = DVector::zeros(n);
        x[j] = 1.0;
    }
    est
}

/// Trapezoid Nystrom solve of the GLM equation at `x = i0 h`.
pub fn solve_glm(f: &UniformF, i0: usize) -> Result<GlmRow> {
    let m = f.window();
    if i0 >= m {
        return Err(Error::Validation(format!("x index {i0} outside the window of {m} steps")));
    }
    let n = m - i0 + 1;
    let h = f.h;
    let sw: Vec<f64> = (0..n).map(|j| if j == 0 || j == n - 1 { (0.5 * h).sqrt() } else { h.sqrt() }).collect();
    let fv = |k: usize| f.values[2 * i0 + k];
    let a = DMatrix::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 } + sw[i] * fv(i + j) * sw[j]);
    let b = DVector::from_fn(n, |i, _| -sw[i] * fv(i));
    let anorm = (0..n).map(|j| a.column(j).iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max);
    let (u, condition) = match a.clone().cholesky() {
        Some(ch) => {
            let cond = anorm * inverse_norm1(|v| ch.solve(v), n);
            (ch.solve(&b), cond)
        }
        None => {
            let lu = a.lu();
            let solve = |v: &DVector<f64>| lu.solve(v).unwrap_or_else(|| DVector::from_element(n, f64::INFINITY));
            let cond = anorm * inverse_norm1(solve, n);
            (solve(&b), cond)
        }
    };
    if !(condition <= MAX_CONDITION) {
        return Err(Error::Resolution(format!("GLM system at x = {} has condition {condition:.3e}", i0 as f64 * h)));
    }
    let k_row = (0..n).map(|j| u[j] / sw[j]).collect();
    Ok(GlmRow { x: i0 as f64 * h, k_row, condition })
}

#[derive(Clone, Debug, Serialize)]
pub struct Recovered {
    /// Midpoints `(i + 1/2) h`.
    pub x: Vec<f64>,
    pub q: Vec<f64>,
    /// `q + lambda e^{-2x}`.
    pub qf: Vec<f64>,
    pub max_condition: f64,
}

/// `-2 d/dx` of diagonal samples spaced `h`, at the midpoints.
pub fn diagonal_to_potential(diag: &[f64], h: f64) -> Vec<f64> {
    diag.windows(2).map(|w| -2.0 * (w[1] - w[0]) / h).collect()
}

/// Recover the potential on `[0, x_end]`.
pub fn recover_q(f: &UniformF, x_end: f64, lambda: f64) -> Result<Recovered> {
    let steps = (x_end / f.h).round() as usize;
    let rows: Result<Vec<GlmRow>> = (0..=steps).into_par_iter().map(|i| solve_glm(f, i)).collect();
    let rows = rows?;
    let diag: Vec<f64> = rows.iter().map(|r| r.k_row[0]).collect();
    let q = diagonal_to_potential(&diag, f.h);
    let x: Vec<f64> = (0..steps).map(|i| (i as f64 + 0.5) * f.h).collect();
    let qf = x.iter().zip(&q).map(|(&x, &q)| q + lambda * (-2.0 * x).exp()).collect();
    let max_condition = rows.iter().map(|r| r.condition).fold(0.0, f64::max);
    Ok(Recovered { x, q, qf, max_condition })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct RoundtripOptions {
    pub kernel_n: usize,
    pub forward: ForwardOptions,
    /// GLM step.
    pub h: f64,
}

impl RoundtripOptions {
    pub fn for_support(a: f64) -> Self {
        RoundtripOptions { kernel_n: crate::kernel::DEFAULT_N, forward: ForwardOptions::for_support(a), h: 0.02 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RoundtripReport {
    pub x: Vec<f64>,
    pub qf_true: Vec<f64>,
    pub qf_recovered: Vec<f64>,
    pub l2_error: f64,
    pub linf_error: f64,
    /// L2 error over the L2 norm of the true `Q_f`.
    pub relative_l2: f64,
    pub k_max: f64,
    pub dk: f64,
    pub h: f64,
    pub x_max: f64,
    pub tail: Tail,
    pub tail_estimate: f64,
    pub bound_states: Vec<BoundState>,
    pub max_condition: f64,
}

/// `4a + 5 / min(alpha, 1)`.
pub fn glm_window(a: f64, bound: &[BoundState]) -> f64 {
    let alpha = bound.iter().map(|b| b.alpha).fold(1.0, f64::min);
    4.0 * a + 5.0 / alpha
}

/// `Q_f` to forward data and back, compared on `[0, 1.25 a]`.
pub fn roundtrip(potential: &Potential, opts: &RoundtripOptions) -> Result<RoundtripReport> {
    let sol = solve_kernel(potential, opts.kernel_n, crate::kernel::DEFAULT_TOL)?;
    let jost = Jost::new(&sol);
    let data = scattering_data(&jost, &opts.forward)?;
    let a = potential.a();
    let x_max = glm_window(a, &data.bound_states);
    let f = UniformF::sample(&data, opts.h, x_max);
    let rec = recover_q(&f, 1.25 * a, potential.lambda())?;
    let qf_true: Vec<f64> = rec.x.iter().map(|&x| potential.q(x)).collect();
    let (mut e2, mut n2, mut einf) = (0.0, 0.0, 0.0f64);
    for (t, r) in qf_true.iter().zip(&rec.qf) {
        e2 += (t - r).powi(2) * opts.h;
        n2 += t * t * opts.h;
        einf = einf.max((t - r).abs());
    }
    Ok(RoundtripReport {
        x: rec.x,
        qf_true,
        qf_recovered: rec.qf,
        l2_error: e2.sqrt(),
        linf_error: einf,
        relative_l2: if n2 > 0.0 { (e2 / n2).sqrt() } else { f64::NAN },
        k_max: opts.forward.k_max,
        dk: data.dk(),
        h: opts.h,
        x_max,
        tail: data.tail,
        tail_estimate: data.tail_estimate,
        bound_states: data.bound_states,
        max_condition: rec.max_condition,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_f_gives_zero_kernel() {
        let f = UniformF { h: 0.05, values: vec![0.0; 81] };
        let row = solve_glm(&f, 3).unwrap();
        assert!(row.k_row.iter().all(|&v| v == 0.0));
        let rec = recover_q(&f, 1.0, 0.0).unwrap();
        assert!(rec.q.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn single_bound_state_f() {
        let data = ScatteringData {
            k_grid: (0..=200).map(|i| i as f64 * 0.05).collect(),
            s_values: vec![C::new(1.0, 0.0); 201],
            s_negative: vec![C::new(1.0, 0.0); 201],
            bound_states: vec![BoundState { alpha: 1.0, norming: 2.0 }],
            tail: Tail { c: 0.0, a: 0.0, sin_amp: 0.0, cos_amp: 0.0 },
            tail_estimate: 0.0,
            s0_flag: false,
        };
        let xs = [0.0, 0.5, 2.0];
        for (x, v) in xs.iter().zip(data.assemble_f(&xs)) {
            assert!((v - 0.5 * (-x).exp()).abs() < 1e-15);
        }
    }

    #[test]
    fn glm_exponential_kernel() {
        // F(x) = c e^{-x}: K(x,y) = -c e^{-x-y} / (1 + c e^{-2x}/2)
        let c = 0.4;
        let h = 0.01;
        let f = UniformF { h, values: (0..=4000).map(|j| c * (-(j as f64) * h).exp()).collect() };
        let row = solve_glm(&f, 50).unwrap();
        let x = 0.5;
        let exact = |y: f64| -c * (-x - y).exp() / (1.0 + 0.5 * c * (-2.0 * x).exp());
        for j in [0usize, 10, 100] {
            let y = x + j as f64 * h;
            assert!((row.k_row[j] - exact(y)).abs() < 1e-5, "{} vs {}", row.k_row[j], exact(y));
        }
    }
}
