//! Weyl-Titchmarsh function rebuilt from Regge poles:
//!
//! ```text
//! m(z) = m(0) + z m'(0) + sum_i a_i (z/z_i)^2 / (z - z_i)
//! ```
//!
//! and, when `psi(0, 0) = 0`, with `g(mu) = mu m(mu)`,
//!
//! ```text
//! m(z) = res_0/z + g'(0) + z g''(0)/2 + sum_i a_i (z/z_i)^2 / (z - z_i).
//! ```

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

use crate::contour::{cauchy_derivative, Rect};
use crate::error::{Error, Result};
use crate::jost::Jost;
use crate::model::TransversalSpectrum;
use crate::poles::{locate_poles, ReggePole, SearchOptions};

type C = Complex64;

const CAUCHY_POINTS: usize = 32;
/// `|psi(0,0)|` below this times the series scale switches to the
/// zero-pole variant.
pub const ZERO_POLE_TOL: f64 = 1e-10;
/// Reconstruction refuses points closer than this to a stored pole.
pub const POLE_PROXIMITY: f64 = 1e-6;

#[derive(Clone, Debug, Serialize)]
pub struct WeylModel {
    pub poles: Vec<ReggePole>,
    /// Poles found between `truncation_radius` and `1.5 truncation_radius`;
    /// only used for the error budget.
    pub omitted: Vec<ReggePole>,
    pub m0: C,
    pub m0_prime: C,
    pub zero_pole_mode: bool,
    /// `(g'(0), g''(0)/2, res_0)`, set in zero-pole mode.
    pub g: Option<(C, C, C)>,
    pub truncation_radius: f64,
}

fn nearest_gap(z: C, poles: &[ReggePole]) -> f64 {
    poles.iter().map(|p| (p.location - z).norm()).filter(|&d| d > 0.0).fold(f64::INFINITY, f64::min)
}

/// Locate the poles in `|z| <= 1.5 radius` and evaluate the affine data at
/// the origin directly.
pub fn build_model(jost: &Jost, radius: f64, opts: &SearchOptions) -> Result<WeylModel> {
    if !(radius > 0.0) {
        return Err(Error::Validation("truncation radius must be positive".into()));
    }
    let outer = 1.5 * radius;
    let found = locate_poles(&Rect::new(-outer, outer, -outer, outer)?, jost, opts)?;
    let s0 = jost.scaled(C::new(0.0, 0.0));
    let zero_pole_mode = s0.psi.norm() < ZERO_POLE_TOL * s0.psi_scale;
    let (mut poles, mut omitted) = (Vec::new(), Vec::new());
    for p in found.poles {
        let r = p.location.norm();
        if zero_pole_mode && r < 1e-6 {
            continue;
        }
        if r <= radius {
            poles.push(p);
        } else if r <= outer {
            omitted.push(p);
        }
    }
    let all: Vec<ReggePole> = poles.iter().chain(&omitted).cloned().collect();
    let rc = (0.5 * nearest_gap(C::new(0.0, 0.0), &all)).min(0.1);
    let m = |z: C| jost.psi_prime(z) / jost.psi(z);
    let (m0, m0_prime, g) = if zero_pole_mode {
        let gf = |z: C| z * jost.psi_prime(z) / jost.psi(z);
        let origin = C::new(0.0, 0.0);
        let res0 = cauchy_derivative(&gf, origin, rc, 0, CAUCHY_POINTS);
        let g1 = cauchy_derivative(&gf, origin, rc, 1, CAUCHY_POINTS);
        let g2 = cauchy_derivative(&gf, origin, rc, 2, CAUCHY_POINTS) * 0.5;
        (g1, g2, Some((g1, g2, res0)))
    } else {
        (m(C::new(0.0, 0.0)), cauchy_derivative(&m, C::new(0.0, 0.0), rc, 1, CAUCHY_POINTS), None)
    };
    Ok(WeylModel { poles, omitted, m0, m0_prime, zero_pole_mode, g, truncation_radius: radius })
}

impl WeylModel {
    /// Model with the given poles kept up to `radius`.
    pub fn truncated(&self, radius: f64) -> WeylModel {
        let mut out = self.clone();
        let all: Vec<ReggePole> = self.poles.iter().chain(&self.omitted).cloned().collect();
        out.poles = all.iter().filter(|p| p.location.norm() <= radius).cloned().collect();
        out.omitted = all.into_iter().filter(|p| p.location.norm() > radius).collect();
        out.truncation_radius = radius;
        out
    }

    fn check_proximity(&self, z: C) -> Result<()> {
        for p in &self.poles {
            let d = (z - p.location).norm();
            if d < POLE_PROXIMITY {
                return Err(Error::PoleProximity(d));
            }
        }
        if self.zero_pole_mode && z.norm() < POLE_PROXIMITY {
            return Err(Error::PoleProximity(z.norm()));
        }
        Ok(())
    }

    /// Pole term `res_{z_i}(h_z m)`; Laurent blocks for multiple poles.
    fn term(z: C, p: &ReggePole) -> C {
        let zi = p.location;
        if p.laurent.len() <= 1 {
            return p.residue * (z / zi).powi(2) / (z - zi);
        }
        // h_z(mu) = (z/mu)^2/(z - mu); res of h_z * sum_j c_j (mu - zi)^{-j}
        // is sum_j c_j h_z^{(j-1)}(zi)/(j-1)!, derivatives by the series of
        // h_z about zi.
        let mut out = C::new(0.0, 0.0);
        let order = p.laurent.len();
        let coeffs = h_taylor(z, zi, order);
        for (j, c) in p.laurent.iter().enumerate() {
            out += c * coeffs[j];
        }
        out
    }

    pub fn reconstruct_m(&self, z: C) -> Result<C> {
        self.check_proximity(z)?;
        let sum: C = self.poles.iter().map(|p| Self::term(z, p)).sum();
        Ok(match self.g {
            Some((g1, g2, res0)) => res0 / z + g1 + z * g2 + sum,
            None => self.m0 + z * self.m0_prime + sum,
        })
    }

    /// Heuristic error of the truncated sum at `z`: the largest omitted
    /// term times the number of omitted poles.
    pub fn error_budget(&self, z: C) -> f64 {
        let terms: Vec<f64> = self.omitted.iter().map(|p| Self::term(z, p).norm()).collect();
        terms.iter().copied().fold(0.0, f64::max) * terms.len() as f64
    }
}

/// Taylor coefficients of `h_z(mu) = z^2 / (mu^2 (z - mu))` about `zi`,
/// orders `0..n`, by dividing the series of `z^2` by that of
/// `mu^2 (z - mu)`.
fn h_taylor(z: C, zi: C, n: usize) -> Vec<C> {
    // mu^2 (z - mu) about zi with mu = zi + e
    let d = z - zi;
    let den = [zi * zi * d, 2.0 * zi * d - zi * zi, d - 2.0 * zi, C::new(-1.0, 0.0)];
    let mut out = vec![C::new(0.0, 0.0); n];
    for k in 0..n {
        let mut s = if k == 0 { z * z } else { C::new(0.0, 0.0) };
        for j in 1..=k.min(3) {
            s -= den[j] * out[k - j];
        }
        out[k] = s / den[0];
    }
    out
}

/// `M(-z^2) = -z + sum_i sum_j c_{ij} / (z - z_i)^j`.
#[derive(Clone, Debug, Serialize)]
pub struct SyntheticForm {
    pub terms: Vec<(C, Vec<C>)>,
    /// True when a non-simple pole forced Laurent blocks.
    pub laurent_fallback: bool,
}

impl SyntheticForm {
    pub fn eval(&self, z: C) -> C {
        let mut out = -z;
        for (zi, cs) in &self.terms {
            let w = z - zi;
            let mut wp = w;
            for c in cs {
                out += c / wp;
                wp *= w;
            }
        }
        out
    }
}

pub fn synthetic_expansion(model: &WeylModel) -> SyntheticForm {
    let mut terms: Vec<(C, Vec<C>)> = model.poles.iter().map(|p| (p.location, p.laurent.clone())).collect();
    if let Some((_, _, res0)) = model.g {
        terms.insert(0, (C::new(0.0, 0.0), vec![res0]));
    }
    let laurent_fallback = model.poles.iter().any(|p| p.multiplicity > 1);
    SyntheticForm { terms, laurent_fallback }
}

#[derive(Clone, Debug, Serialize)]
pub struct DtnEntry {
    pub mu_sq: f64,
    pub z: f64,
    pub direct: Option<f64>,
    pub reconstructed: Option<f64>,
    /// `z_k` sits on a Regge pole: `lambda` is in the spectrum.
    pub collision: bool,
}

/// `Lambda(lambda, z_k) = -[m(z_k) - (n/2 - 1) f'(0)/f(0)]` for each distinct
/// transversal eigenvalue.
pub fn dtn_multipliers(
    jost: &Jost,
    model: Option<&WeylModel>,
    spectrum: &TransversalSpectrum,
    f0: f64,
    f0_prime: f64,
    n: u32,
) -> Result<Vec<DtnEntry>> {
    if f0 <= 0.0 {
        return Err(Error::Validation("f(0) must be positive".into()));
    }
    let shift = (0.5 * n as f64 - 1.0) * f0_prime / f0;
    let mut out = Vec::new();
    let mut last = f64::NAN;
    for (&mu_sq, &z) in spectrum.mu_sq.iter().zip(&spectrum.z) {
        if mu_sq == last {
            continue;
        }
        last = mu_sq;
        let zc = C::new(z, 0.0);
        let direct = jost.weyl_m(zc).map(|m| -(m.re - shift));
        let reconstructed = match model {
            Some(md) => match md.reconstruct_m(zc) {
                Ok(m) => Some(-(m.re - shift)),
                Err(Error::PoleProximity(_)) => None,
                Err(e) => return Err(e),
            },
            None => None,
        };
        out.push(DtnEntry { mu_sq, z, direct, reconstructed, collision: direct.is_none() });
    }
    Ok(out)
}

/// `(1/2 pi i) oint_{|mu| = r} h_z(mu) m(mu) d mu` by the trapezoid rule.
/// By the residue theorem it equals `reconstruct_m(z) - m(z)` for the model
/// truncated at `r`.
pub fn contour_remainder(jost: &Jost, z: C, r: f64, points: usize) -> C {
    // collected first so the summation order does not depend on scheduling
    let terms: Vec<C> = (0..points)
        .into_par_iter()
        .map(|k| {
            let e = C::from_polar(1.0, 2.0 * PI * k as f64 / points as f64);
            let mu = r * e;
            let h = (z / mu).powi(2) / (z - mu);
            h * jost.psi_prime(mu) / jost.psi(mu) * mu
        })
        .collect();
    terms.iter().sum::<C>() / points as f64
}

/// Radius in `[r_lo, r_hi]` maximising `min |psi|` relative to the series
/// scale on the circle, sampled on `trials` candidates.
pub fn best_circle(jost: &Jost, r_lo: f64, r_hi: f64, trials: usize, points: usize) -> f64 {
    let score = |r: f64| {
        (0..points)
            .map(|k| {
                let s = jost.scaled(C::from_polar(r, 2.0 * PI * k as f64 / points as f64));
                s.psi.norm() / s.psi_scale
            })
            .fold(f64::INFINITY, f64::min)
    };
    (0..trials)
        .into_par_iter()
        .map(|i| {
            let r = r_lo + (r_hi - r_lo) * (i as f64 + 0.5) / trials as f64;
            (r, score(r))
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold((r_lo, -1.0), |best, c| if c.1 > best.1 { c } else { best })
        .0
}
