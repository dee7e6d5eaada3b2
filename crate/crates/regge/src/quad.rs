//! Quadrature helpers: Gauss-Legendre rules, fourth-order cumulative
//! integration on uniform grids, and Filon-Simpson Laplace transforms.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

type C = Complex64;

/// Gauss-Legendre nodes and weights on [-1, 1] (Golub-Welsch).
#[derive(Clone, Debug)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        let mut jac = DMatrix::<f64>::zeros(n, n);
        for k in 1..n {
            let b = k as f64 / ((4 * k * k - 1) as f64).sqrt();
            jac[(k, k - 1)] = b;
            jac[(k - 1, k)] = b;
        }
        let eig = SymmetricEigen::new(jac);
        let mut pairs: Vec<(f64, f64)> = (0..n)
            .map(|i| (eig.eigenvalues[i], 2.0 * eig.eigenvectors[(0, i)].powi(2)))
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        GaussLegendre {
            nodes: pairs.iter().map(|p| p.0).collect(),
            weights: pairs.iter().map(|p| p.1).collect(),
        }
    }

    pub fn integrate(&self, lo: f64, hi: f64, f: impl Fn(f64) -> f64) -> f64 {
        let c = 0.5 * (hi + lo);
        let r = 0.5 * (hi - lo);
        r * self.nodes.iter().zip(&self.weights).map(|(x, w)| w * f(c + r * x)).sum::<f64>()
    }
}

/// `out[j] = int_0^{x_j} f` on a uniform grid, fourth order throughout:
/// Simpson to even nodes, a 3/8 panel to close odd ones, and the
/// three-point rule `h(5f0 + 8f1 - f2)/12` for the first cell.
pub fn cumulative(f: &[f64], h: f64, out: &mut [f64]) {
    let n = f.len();
    if n == 0 {
        return;
    }
    out[0] = 0.0;
    if n == 1 {
        return;
    }
    if n == 2 {
        out[1] = 0.5 * h * (f[0] + f[1]);
        return;
    }
    out[1] = h * (5.0 * f[0] + 8.0 * f[1] - f[2]) / 12.0;
    let mut even = 0.0;
    for j in 2..n {
        if j % 2 == 0 {
            even += h / 3.0 * (f[j - 2] + 4.0 * f[j - 1] + f[j]);
            out[j] = even;
        } else {
            let base = if j >= 3 { out[j - 3] } else { 0.0 };
            out[j] = base + 3.0 * h / 8.0 * (f[j - 3] + 3.0 * f[j - 2] + 3.0 * f[j - 1] + f[j]);
        }
    }
}

/// Same as [`cumulative`] but integrating from the last node backwards:
/// `out[j] = int_{x_j}^{x_{n-1}} f`.
pub fn cumulative_from_end(f: &[f64], h: f64, out: &mut [f64]) {
    let n = f.len();
    let rev: Vec<f64> = f.iter().rev().copied().collect();
    let mut tmp = vec![0.0; n];
    cumulative(&rev, h, &mut tmp);
    for j in 0..n {
        out[j] = tmp[n - 1 - j];
    }
}

/// Composite Simpson over an even number of intervals.
pub fn simpson(f: &[f64], h: f64) -> f64 {
    let mut out = vec![0.0; f.len()];
    cumulative(f, h, &mut out);
    out.last().copied().unwrap_or(0.0)
}

/// Moments `mu_j(w) = int_{-1}^{1} theta^j e^{-w theta} d theta`, j = 0, 1, 2.
pub fn filon_moments(w: C) -> [C; 3] {
    if w.norm() < 1.0 {
        let mut mu = [C::new(0.0, 0.0); 3];
        for (j, m) in mu.iter_mut().enumerate() {
            let mut term = C::new(1.0, 0.0);
            for n in 0..30 {
                if (j + n) % 2 == 0 {
                    *m += term * (2.0 / (j + n + 1) as f64);
                }
                term *= -w / (n + 1) as f64;
            }
        }
        mu
    } else {
        let ep = w.exp();
        let em = (-w).exp();
        let m0 = (ep - em) / w;
        let m1 = (-ep - em) / w + m0 / w;
        let m2 = (ep - em) / w + m1 * 2.0 / w;
        [m0, m1, m2]
    }
}

/// A uniformly sampled real function on `[0, n h]`, `n` even, prepared for
/// `int g(s) e^{-w s} ds` with the exponential integrated exactly against
/// the piecewise quadratic interpolant. Reduces to Simpson as `w -> 0`.
#[derive(Clone, Debug)]
pub struct FilonLaplace {
    h: f64,
    c0: Vec<f64>,
    c1: Vec<f64>,
    c2: Vec<f64>,
}

impl FilonLaplace {
    pub fn new(values: &[f64], h: f64) -> Self {
        assert!(values.len() >= 3 && values.len() % 2 == 1, "need an even number of intervals");
        let panels = (values.len() - 1) / 2;
        let mut c0 = Vec::with_capacity(panels);
        let mut c1 = Vec::with_capacity(panels);
        let mut c2 = Vec::with_capacity(panels);
        for k in 0..panels {
            let (gm, g0, gp) = (values[2 * k], values[2 * k + 1], values[2 * k + 2]);
            c0.push(g0);
            c1.push(0.5 * (gp - gm));
            c2.push(0.5 * (gp - 2.0 * g0 + gm));
        }
        FilonLaplace { h, c0, c1, c2 }
    }

    pub fn len(&self) -> f64 {
        2.0 * self.h * self.c0.len() as f64
    }

    pub fn is_empty(&self) -> bool {
        self.c0.is_empty()
    }

    /// `int_0^{len} g(s) e^{-w s} ds`.
    pub fn eval(&self, w: C) -> C {
        let mu = filon_moments(w * self.h);
        let r = (-2.0 * self.h * w).exp();
        let horner = |c: &[f64]| c.iter().rev().fold(C::new(0.0, 0.0), |acc, &x| acc * r + x);
        let s = horner(&self.c0) * mu[0] + horner(&self.c1) * mu[1] + horner(&self.c2) * mu[2];
        s * (-self.h * w).exp() * self.h
    }
}
