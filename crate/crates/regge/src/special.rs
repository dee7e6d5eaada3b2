//! Complex gamma function and Bessel functions `J_z(t)` of complex order.
//!
//! The argument `t = sqrt(lambda) e^{-x}` never exceeds `sqrt(lambda)`, so
//! everything here is power series in `t`. Branch: `(t/2)^z = exp(z ln(t/2))`
//! with the real logarithm.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};

type C = Complex64;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Relative cutoff for series terms.
pub const SERIES_TOL: f64 = 1e-16;
/// Hard cap on series length.
pub const SERIES_MAX_TERMS: usize = 200;
/// Default exclusion radius around the negative integers.
pub const DEFAULT_DELTA: f64 = 0.25;

/// `ln sin(pi z)`, stable for large `|Im z|`. Some branch of the logarithm.
pub fn ln_sin_pi(z: C) -> C {
    let i = C::i();
    if (z.im * PI).abs() < 20.0 {
        // reduce by the nearest integer so sin is accurate next to its zeros
        let n = z.re.round();
        let s = ((z - n) * PI).sin();
        let s = if n.rem_euclid(2.0) == 0.0 { s } else { -s };
        s.ln()
    } else if z.im > 0.0 {
        let w = z * PI;
        -i * w + (i * 0.5).ln() + (C::new(1.0, 0.0) - (i * w * 2.0).exp()).ln()
    } else {
        let w = z * PI;
        i * w - (i * 2.0).ln() + (C::new(1.0, 0.0) - (-i * w * 2.0).exp()).ln()
    }
}

fn nonpositive_integer(z: C) -> Option<i64> {
    if z.im == 0.0 && z.re <= 0.0 && z.re.fract() == 0.0 {
        Some(z.re as i64)
    } else {
        None
    }
}

/// A branch of `ln Gamma(z)`; only `exp` of it is meaningful.
pub fn ln_gamma(z: C) -> C {
    if z.re < 0.5 {
        C::new(PI.ln(), 0.0) - ln_sin_pi(z) - ln_gamma(C::new(1.0, 0.0) - z)
    } else {
        let z = z - 1.0;
        let mut x = C::new(LANCZOS[0], 0.0);
        for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
            x += c / (z + i as f64);
        }
        let t = z + LANCZOS_G + 0.5;
        0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + x.ln()
    }
}

pub fn gamma(z: C) -> Result<C> {
    if let Some(n) = nonpositive_integer(z) {
        return Err(Error::GammaPole(n));
    }
    Ok(ln_gamma(z).exp())
}

/// `1/Gamma(z)`, entire.
pub fn recip_gamma(z: C) -> C {
    if nonpositive_integer(z).is_some() {
        return C::new(0.0, 0.0);
    }
    if z.re >= 0.5 {
        (-ln_gamma(z)).exp()
    } else {
        // sin(pi z) Gamma(1-z) / pi
        (ln_sin_pi(z) + ln_gamma(C::new(1.0, 0.0) - z) - PI.ln()).exp()
    }
}

/// Terms `(-1)^m (t/2)^{z+2m} / (m! Gamma(z+m+1))` of the series for `J_z(t)`.
///
/// While `Re(z+m) < 1/2` each term is formed from `1/Gamma` directly, so
/// orders near the negative integers never divide by a small Pochhammer
/// factor. Past that the ratio recurrence takes over.
#[derive(Clone, Debug)]
pub struct BesselTerms {
    z: C,
    ln_half: f64,
    q: f64,
    m: usize,
    prev: C,
}

impl BesselTerms {
    pub fn new(z: C, t: f64) -> Self {
        let half = 0.5 * t;
        BesselTerms { z, ln_half: half.ln(), q: -half * half, m: 0, prev: C::new(0.0, 0.0) }
    }

    fn direct(&self, m: usize) -> C {
        let mf = m as f64;
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        let lfact = ln_factorial(m);
        let e = (self.z + 2.0 * mf) * self.ln_half - lfact;
        sign * e.exp() * recip_gamma(self.z + mf + 1.0)
    }
}

impl Iterator for BesselTerms {
    type Item = C;
    fn next(&mut self) -> Option<C> {
        let m = self.m;
        let term = if m == 0 || (self.z + m as f64).re < 0.5 {
            self.direct(m)
        } else {
            self.prev * self.q / (m as f64 * (self.z + m as f64))
        };
        self.prev = term;
        self.m += 1;
        Some(term)
    }
}

pub(crate) fn ln_factorial(m: usize) -> f64 {
    (1..=m).map(|k| (k as f64).ln()).sum()
}

/// Index past which the Bessel terms decrease monotonically in modulus.
pub(crate) fn series_turnover(z: C, t: f64) -> usize {
    let q = 0.25 * t * t;
    let mut m = 1usize;
    // |ratio| = q / (m |z+m|) < 1/2 and Re(z+m) past the direct region.
    while (z + m as f64).re < 0.5 || q / (m as f64 * (z + m as f64).norm()) > 0.5 {
        m += 1;
    }
    m
}

/// `J_z(t)` by its power series.
pub fn bessel_j(z: C, t: f64) -> Result<C> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("bessel argument must be positive, got {t}")));
    }
    let turn = series_turnover(z, t);
    let mut sum = C::new(0.0, 0.0);
    for (m, term) in BesselTerms::new(z, t).enumerate() {
        sum += term;
        if m >= turn && term.norm() <= SERIES_TOL * sum.norm() {
            return Ok(sum);
        }
        if m + 1 >= SERIES_MAX_TERMS {
            break;
        }
    }
    Err(Error::Numeric(format!("J series for z = {z} did not converge in {SERIES_MAX_TERMS} terms")))
}

/// `dJ_z/dt = (z/t) J_z(t) - J_{z+1}(t)`.
pub fn bessel_j_dt(z: C, t: f64) -> Result<C> {
    Ok(z / t * bessel_j(z, t)? - bessel_j(z + 1.0, t)?)
}

/// Distance check against the negative integers.
pub fn in_u_delta(z: C, delta: f64) -> bool {
    let n = z.re.round();
    n > -0.5 || (z - C::new(n, 0.0)).norm() > delta
}

fn check_u_delta(z: C, delta: f64) -> Result<()> {
    if in_u_delta(z, delta) {
        Ok(())
    } else {
        Err(Error::Domain(format!("z = {z} is within {delta} of a negative integer")))
    }
}

/// `sum_m c_m(z) x^m` with `c_m = (-1)^m / (m! (z+1)_m)`, the factor that
/// multiplies `(t/2)^z / Gamma(z+1)` in `J_z(t)`; `x = t^2/4`.
fn pochhammer_series(z: C, x: f64, weight: impl Fn(usize) -> f64) -> Result<C> {
    let mut c = C::new(1.0, 0.0);
    let mut sum = c * weight(0);
    for m in 1..SERIES_MAX_TERMS {
        c *= -x / (m as f64 * (z + m as f64));
        let term = c * weight(m);
        sum += term;
        if term.norm() <= SERIES_TOL * sum.norm().max(f64::MIN_POSITIVE) && m as f64 > x {
            return Ok(sum);
        }
        if c.norm() == 0.0 {
            return Ok(sum);
        }
    }
    Err(Error::Numeric(format!("normalized series for z = {z} did not converge")))
}

/// `J_z(t) Gamma(z+1) (2/t)^z`, which is `1 + O(1/|z|)`.
pub fn normalized_ratio(z: C, t: f64, delta: f64) -> Result<C> {
    check_u_delta(z, delta)?;
    pochhammer_series(z, 0.25 * t * t, |_| 1.0)
}

/// `d^p/ds^p R(s, z)` where `R(s, z) = normalized_ratio(z, sqrt(lambda) e^{-s}) - 1`.
pub fn remainder_r(s: f64, z: C, deriv_order: u32, lambda: f64, delta: f64) -> Result<C> {
    check_u_delta(z, delta)?;
    let x = 0.25 * lambda * (-2.0 * s).exp();
    let p = deriv_order as i32;
    pochhammer_series(z, x, |m| if m == 0 { 0.0 } else { (-2.0 * m as f64).powi(p) })
}
