//! Modified Jost function `psi(0, z)`, its `x`-derivative and the
//! Weyl-Titchmarsh ratio `m(z) = psi'(0, z) / psi(0, z)`.
//!
//! With `J_z(sqrt(lambda) e^{-s}) = sum_m a_m(z) e^{-(z+2m) s}` the kernel
//! integrals become Laplace transforms of the traces `K(0, s)` and
//! `d_x K(0, s)` on `[0, 2a]`:
//!
//! ```text
//! psi(0, z)  = sum_m a_m [1 + L_K(z + 2m)]
//! psi'(0, z) = sum_m a_m [-(z + 2m) - K(0, 0) + L_Kx(z + 2m)]
//! ```
//!
//! The transforms use Filon-Simpson on the kernel grid trace. With
//! `lambda = 0` the Bessel factor is replaced by `e^{-zs}` (free half-line).

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::kernel::KernelSolution;
use crate::quad::FilonLaplace;
use crate::special::{bessel_j, bessel_j_dt, recip_gamma, series_turnover, BesselTerms, SERIES_MAX_TERMS};

type C = Complex64;

/// Relative threshold below which `psi` is reported as a zero.
pub const POLE_THRESHOLD: f64 = 1e-12;
const TERM_TOL: f64 = 1e-17;

/// `J_z(sqrt(lambda) e^{-x})`, the unperturbed Jost solution.
pub fn psi_unperturbed(x: f64, z: C, lambda: f64) -> crate::error::Result<C> {
    bessel_j(z, lambda.sqrt() * (-x).exp())
}

/// `lambda^{z/2} / (2^z Gamma(z+1))`.
pub fn normalization(z: C, lambda: f64) -> C {
    if lambda == 0.0 {
        return C::new(1.0, 0.0);
    }
    ((0.5 * lambda.sqrt()).ln() * z).exp() * recip_gamma(z + 1.0)
}

#[derive(Clone, Copy, Debug)]
pub struct JostEvaluation {
    pub z: C,
    pub psi0: C,
    pub psi0_prime: C,
    /// `None` when `|psi| < POLE_THRESHOLD * scale`.
    pub m: Option<C>,
    /// Sum of term magnitudes in the `psi` series.
    pub scale: f64,
}

/// Values together with the magnitude of the summed terms, used to judge
/// cancellation.
#[derive(Clone, Copy, Debug)]
pub struct Scaled {
    pub psi: C,
    pub psi_prime: C,
    pub psi_scale: f64,
    pub prime_scale: f64,
}

#[derive(Clone, Debug)]
pub struct Jost {
    pub lambda: f64,
    pub a: f64,
    k00: f64,
    lk: Option<FilonLaplace>,
    lkx: Option<FilonLaplace>,
}

impl Jost {
    pub fn new(sol: &KernelSolution) -> Self {
        let h = sol.trace_step();
        let tr = sol.trace();
        let trx = sol.trace_dx();
        let zero = tr.iter().chain(&trx).all(|&v| v == 0.0);
        Jost {
            lambda: sol.lambda,
            a: sol.a(),
            k00: tr[0],
            lk: (!zero).then(|| FilonLaplace::new(&tr, h)),
            lkx: (!zero).then(|| FilonLaplace::new(&trx, h)),
        }
    }

    /// `Q_f = 0`: `psi(0, z) = J_z(sqrt(lambda))`.
    pub fn unperturbed(lambda: f64) -> Self {
        Jost { lambda, a: 0.0, k00: 0.0, lk: None, lkx: None }
    }

    fn laplace(&self, w: C) -> (C, C) {
        match (&self.lk, &self.lkx) {
            (Some(a), Some(b)) => (a.eval(w), b.eval(w)),
            _ => (C::new(0.0, 0.0), C::new(0.0, 0.0)),
        }
    }

    pub fn scaled(&self, z: C) -> Scaled {
        let one = C::new(1.0, 0.0);
        if self.lambda == 0.0 {
            let (lk, lkx) = self.laplace(z);
            return Scaled {
                psi: one + lk,
                psi_prime: -z - self.k00 + lkx,
                psi_scale: 1.0 + lk.norm(),
                prime_scale: z.norm() + self.k00.abs() + lkx.norm(),
            };
        }
        let t = self.lambda.sqrt();
        let turn = series_turnover(z, t);
        let mut psi = C::new(0.0, 0.0);
        let mut prime = C::new(0.0, 0.0);
        let (mut ps, mut qs) = (0.0f64, 0.0f64);
        let (mut pmax, mut qmax) = (0.0f64, 0.0f64);
        for (m, am) in BesselTerms::new(z, t).enumerate().take(SERIES_MAX_TERMS) {
            let w = z + 2.0 * m as f64;
            let (lk, lkx) = self.laplace(w);
            let tp = am * (one + lk);
            let tq = am * (-w - self.k00 + lkx);
            psi += tp;
            prime += tq;
            let (np, nq) = (am.norm() * (1.0 + lk.norm()), am.norm() * (w.norm() + self.k00.abs() + lkx.norm()));
            ps += np;
            qs += nq;
            pmax = pmax.max(np);
            qmax = qmax.max(nq);
            if m >= turn && np <= TERM_TOL * pmax && nq <= TERM_TOL * qmax {
                break;
            }
        }
        Scaled { psi, psi_prime: prime, psi_scale: ps, prime_scale: qs }
    }

    pub fn psi(&self, z: C) -> C {
        self.scaled(z).psi
    }

    pub fn psi_prime(&self, z: C) -> C {
        self.scaled(z).psi_prime
    }

    pub fn eval(&self, z: C) -> JostEvaluation {
        let s = self.scaled(z);
        let m = if s.psi.norm() < POLE_THRESHOLD * s.psi_scale { None } else { Some(s.psi_prime / s.psi) };
        JostEvaluation { z, psi0: s.psi, psi0_prime: s.psi_prime, m, scale: s.psi_scale }
    }

    /// `m(z)`, `None` at a zero of `psi`.
    pub fn weyl_m(&self, z: C) -> Option<C> {
        self.eval(z).m
    }

    /// Classical Jost function `Gamma(z+1) 2^z lambda^{-z/2} psi(0, z)` and
    /// its `x`-derivative. Built from the Pochhammer form of the Bessel
    /// series, so it stays finite on the imaginary axis; `z` must avoid the
    /// negative integers.
    pub fn classical(&self, z: C) -> (C, C) {
        let one = C::new(1.0, 0.0);
        if self.lambda == 0.0 {
            let s = self.scaled(z);
            return (s.psi, s.psi_prime);
        }
        let x = 0.25 * self.lambda;
        let mut c = one;
        let mut psi = C::new(0.0, 0.0);
        let mut prime = C::new(0.0, 0.0);
        let mut pmax = 0.0f64;
        for m in 0..SERIES_MAX_TERMS {
            if m > 0 {
                c *= -x / (m as f64 * (z + m as f64));
            }
            let w = z + 2.0 * m as f64;
            let (lk, lkx) = self.laplace(w);
            let tp = c * (one + lk);
            psi += tp;
            prime += c * (-w - self.k00 + lkx);
            pmax = pmax.max(tp.norm());
            if m as f64 > x + 2.0 && tp.norm() <= TERM_TOL * pmax && (c * w).norm() <= TERM_TOL * pmax {
                break;
            }
        }
        (psi, prime)
    }

    /// Relative residuals of the Wronskian identity
    /// `psi(z) psi'(-z) - psi'(z) psi(-z) = 2 sin(pi z) / pi` (`2z` when
    /// `lambda = 0`) and of the reflection identity
    /// `m(z) = m(-z) - 2 sin(pi z) / (pi psi(z) psi(-z))`.
    pub fn identity_checks(&self, z: C) -> (f64, f64) {
        let p = self.scaled(z);
        let q = self.scaled(-z);
        let target = if self.lambda == 0.0 { 2.0 * z } else { 2.0 * (PI * z).sin() / PI };
        let a = p.psi * q.psi_prime;
        let b = p.psi_prime * q.psi;
        let wscale = p.psi_scale * q.prime_scale + p.prime_scale * q.psi_scale + target.norm();
        let wres = (a - b - target).norm() / wscale;

        let mz = p.psi_prime / p.psi;
        let mmz = q.psi_prime / q.psi;
        let corr = target / (p.psi * q.psi);
        let rscale = mz.norm() + mmz.norm() + corr.norm();
        let rres = (mz - mmz + corr).norm() / rscale;
        (wres, rres)
    }
}

/// `-sqrt(lambda) J'_z(sqrt(lambda))`, the unperturbed `psi'(0, z)`.
pub fn psi_prime_unperturbed(z: C, lambda: f64) -> crate::error::Result<C> {
    let t = lambda.sqrt();
    Ok(-t * bessel_j_dt(z, t)?)
}
