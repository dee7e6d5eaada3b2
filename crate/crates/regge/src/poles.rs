//! Regge poles: zeros of `psi(0, .)`, located by quadtree subdivision with
//! argument-principle counts and polished by Newton steps.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::contour::{cauchy_derivative, count_zeros, laurent_coefficient, Rect};
use crate::error::{Error, Result};
use crate::jost::Jost;

type C = Complex64;

const CAUCHY_POINTS: usize = 32;
/// Offsets tried, in order, when a split line or the search region runs
/// through a zero.
const JITTER: [f64; 7] = [0.0, 0.0137, -0.0213, 0.0371, -0.0459, 0.0623, -0.0817];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Alpha,
    Beta,
    Unclassified,
}

impl Family {
    pub fn as_str(&self) -> &'static str {
        match self {
            Family::Alpha => "alpha",
            Family::Beta => "beta",
            Family::Unclassified => "unclassified",
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReggePole {
    pub location: C,
    pub multiplicity: u32,
    pub family: Family,
    /// Residue of `m` at the pole.
    pub residue: C,
    /// Laurent coefficients `c_{-1}, c_{-2}, ...` of `m`, one per order.
    pub laurent: Vec<C>,
    pub winding_certificate: i64,
}

#[derive(Clone, Copy, Debug)]
pub struct SearchOptions {
    /// Newton stops once the step is below this.
    pub tol: f64,
    pub max_cells: usize,
    /// Cells smaller than this holding several zeros are reported as a
    /// multiple zero.
    pub min_cell: f64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { tol: 1e-10, max_cells: 20_000, min_cell: 1e-6 }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Zero {
    pub z: C,
    pub multiplicity: u32,
    pub winding: i64,
    /// Rectangle in which the zero was isolated.
    pub cell: Rect,
}

#[derive(Clone, Debug, Default)]
pub struct ZeroSearch {
    pub zeros: Vec<Zero>,
    /// Cells left unresolved when the budget ran out.
    pub uncovered: Vec<(Rect, i64)>,
    pub cells: usize,
    /// Region actually searched, after jitter.
    pub region: Option<Rect>,
}

enum Outcome {
    Empty,
    Found(Zero),
    Split(Vec<(Rect, i64)>),
}

fn jitter_region<F: Fn(C) -> C>(region: &Rect, f: &F) -> Result<(Rect, i64)> {
    let mut last = None;
    for &d in &JITTER {
        let r = Rect { re0: region.re0 - d, re1: region.re1 + 0.7 * d, im0: region.im0 - 0.9 * d, im1: region.im1 + 1.1 * d };
        match count_zeros(&r, f) {
            Ok(n) => return Ok((r, n)),
            Err(e @ Error::BoundaryTooClose { .. }) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.unwrap())
}

fn split<F: Fn(C) -> C>(cell: &Rect, count: i64, f: &F) -> Result<Vec<(Rect, i64)>> {
    let mut last = None;
    for (k, &d) in JITTER.iter().enumerate() {
        let quarters = cell.quarter(0.5 + d, 0.5 - JITTER[(k + 3) % JITTER.len()]);
        let counts: Result<Vec<i64>> = quarters.iter().map(|q| count_zeros(q, f)).collect();
        match counts {
            Ok(c) if c.iter().sum::<i64>() == count && c.iter().all(|&n| n >= 0) => {
                return Ok(quarters.iter().copied().zip(c).filter(|&(_, n)| n > 0).collect());
            }
            Ok(c) => last = Some(Error::Precision(format!("children count {c:?} but parent {count}"))),
            Err(e @ Error::BoundaryTooClose { .. }) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.unwrap())
}

/// Newton iteration for a zero of multiplicity `mult`, derivative from a
/// Cauchy circle of radius `r`. `None` when it fails to settle.
pub fn newton<F: Fn(C) -> C>(f: &F, start: C, mult: u32, r: f64, tol: f64) -> Option<C> {
    let mut z = start;
    let mut last_step = f64::INFINITY;
    for _ in 0..60 {
        let fz = f(z);
        if fz.norm() == 0.0 {
            return Some(z);
        }
        let d = cauchy_derivative(f, z, r, 1, CAUCHY_POINTS);
        let step = mult as f64 * fz / d;
        if !step.is_finite() {
            return None;
        }
        z -= step;
        let s = step.norm();
        if s < tol {
            return Some(z);
        }
        // roundoff floor: the step stopped shrinking but is already tiny
        if s < 1e3 * tol && s >= 0.5 * last_step {
            return Some(z);
        }
        last_step = s;
    }
    (last_step < 1e3 * tol).then_some(z)
}

fn process<F: Fn(C) -> C>(cell: Rect, count: i64, f: &F, opts: &SearchOptions) -> Result<Outcome> {
    if count == 0 {
        return Ok(Outcome::Empty);
    }
    if count < 0 {
        return Err(Error::Precision(format!("negative winding {count} for an analytic function")));
    }
    let size = cell.width().max(cell.height());
    let r = (0.25 * size).clamp(1e-4, 0.1);
    if count == 1 || size < opts.min_cell {
        let mult = count as u32;
        if let Some(z) = newton(f, cell.center(), mult, r, opts.tol) {
            if cell.contains(z, 1e-9 * size.max(1.0)) {
                return Ok(Outcome::Found(Zero { z, multiplicity: mult, winding: count, cell }));
            }
        }
        if size < opts.min_cell {
            let z = cell.center();
            return Ok(Outcome::Found(Zero { z, multiplicity: mult, winding: count, cell }));
        }
    }
    Ok(Outcome::Split(split(&cell, count, f)?))
}

/// All zeros of `f` in `region`, sorted by `(re, im)`.
pub fn locate_zeros<F: Fn(C) -> C + Sync>(region: &Rect, f: &F, opts: &SearchOptions) -> Result<ZeroSearch> {
    let (region, total) = jitter_region(region, f)?;
    let mut out = ZeroSearch { region: Some(region), cells: 1, ..Default::default() };
    let mut level = vec![(region, total)];
    while !level.is_empty() {
        if out.cells >= opts.max_cells {
            out.uncovered.append(&mut level);
            break;
        }
        let results: Vec<Result<Outcome>> = level.par_iter().map(|&(c, n)| process(c, n, f, opts)).collect();
        let mut next = Vec::new();
        for r in results {
            match r? {
                Outcome::Empty => {}
                Outcome::Found(z) => out.zeros.push(z),
                Outcome::Split(children) => {
                    out.cells += 4;
                    next.extend(children);
                }
            }
        }
        level = next;
    }
    out.zeros.sort_by(|a, b| a.z.re.total_cmp(&b.z.re).then(a.z.im.total_cmp(&b.z.im)));
    out.zeros.dedup_by(|a, b| {
        if (a.z - b.z).norm() < 1e-8 {
            b.multiplicity = b.multiplicity.max(a.multiplicity);
            true
        } else {
            false
        }
    });
    Ok(out)
}

/// Residue and Laurent coefficients of `m = psi'/psi` at a zero of `psi`.
/// Simple zeros use `psi'(z)/(d psi/dz)(z)`; higher ones contour integrals.
pub fn residue_at(jost: &Jost, z0: C, multiplicity: u32, radius: f64) -> (C, Vec<C>) {
    let psi = |z: C| jost.psi(z);
    if multiplicity <= 1 {
        let d = cauchy_derivative(&psi, z0, radius, 1, CAUCHY_POINTS);
        let res = jost.psi_prime(z0) / d;
        return (res, vec![res]);
    }
    let m = |z: C| {
        let s = jost.scaled(z);
        s.psi_prime / s.psi
    };
    let laurent: Vec<C> =
        (0..multiplicity as i32).map(|j| laurent_coefficient(&m, z0, radius, j, 4 * CAUCHY_POINTS)).collect();
    (laurent[0], laurent)
}

/// `psi'(z_k)` recovered from the Wronskian at a zero `z_k`:
/// `-2 sin(pi z_k) / (pi psi(-z_k))`.
pub fn wronskian_bootstrap(jost: &Jost, zk: C) -> C {
    let w = if jost.lambda == 0.0 { 2.0 * zk } else { 2.0 * (PI * zk).sin() / PI };
    -w / jost.psi(-zk)
}

/// At an integer zero `n` (then `-n` is a zero too) the Wronskian gives
/// `psi_z(n) psi'(-n) + psi'(n) psi_z(-n) = 2 (-1)^n`. Returns the left side.
pub fn integer_pole_identity(jost: &Jost, n: i64, radius: f64) -> C {
    let psi = |z: C| jost.psi(z);
    let zn = C::new(n as f64, 0.0);
    let dp = cauchy_derivative(&psi, zn, radius, 1, CAUCHY_POINTS);
    let dm = cauchy_derivative(&psi, -zn, radius, 1, CAUCHY_POINTS);
    dp * jost.psi_prime(-zn) + jost.psi_prime(zn) * dm
}

pub fn classify(zs: &[C]) -> Vec<Family> {
    zs.iter()
        .map(|&z| {
            let k = z.re.round();
            if z.im.abs() < 1e-6 {
                if k <= -1.0 && (z.re - k).abs() < 0.5 {
                    Family::Alpha
                } else {
                    Family::Unclassified
                }
            } else if zs.iter().any(|&w| (w - z.conj()).norm() < 1e-6 * z.norm().max(1.0)) {
                Family::Beta
            } else {
                Family::Unclassified
            }
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct PoleSearch {
    pub poles: Vec<ReggePole>,
    pub uncovered: Vec<(Rect, i64)>,
    pub cells: usize,
    pub region: Rect,
}

pub fn locate_poles(region: &Rect, jost: &Jost, opts: &SearchOptions) -> Result<PoleSearch> {
    let f = |z: C| jost.psi(z);
    let found = locate_zeros(region, &f, opts)?;
    let zs: Vec<C> = found.zeros.iter().map(|z| z.z).collect();
    let families = classify(&zs);
    let poles = found
        .zeros
        .par_iter()
        .zip(families.par_iter())
        .enumerate()
        .map(|(i, (z, &family))| {
            let gap = zs
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, w)| (w - z.z).norm())
                .fold(f64::INFINITY, f64::min);
            let radius = (0.5 * gap).min(0.1);
            let (residue, laurent) = residue_at(jost, z.z, z.multiplicity, radius);
            ReggePole {
                location: z.z,
                multiplicity: z.multiplicity,
                family,
                residue,
                laurent,
                winding_certificate: z.winding,
            }
        })
        .collect();
    Ok(PoleSearch { poles, uncovered: found.uncovered, cells: found.cells, region: found.region.unwrap() })
}

/// Predicted `beta_j` (`j > 0` upper, `j < 0` lower half-plane).
pub fn predict_beta(j: i64, a: f64, p: u32, big_a: f64) -> Result<C> {
    if big_a == 0.0 || !big_a.is_finite() {
        return Err(Error::Model("A = 0: the jump at the support edge vanishes".into()));
    }
    if j == 0 {
        return Err(Error::Validation("beta index must be nonzero".into()));
    }
    let s = if j > 0 { 1.0 } else { -1.0 };
    let jj = j.unsigned_abs() as f64;
    let fact: f64 = (1..p).map(|i| i as f64).product();
    let im = s * PI / (2.0 * a) * (2.0 * jj + 0.5 * (p as f64 - 1.0) + s * (big_a.signum() + 1.0));
    Ok(C::new(beta_real_trend(jj, a, p, big_a.abs() * fact), im))
}

/// `-((p+1)/2a) log(j pi / a) + (1/2a) log(|A| (p-1)!)`, the second
/// argument being `|A| (p-1)!`.
pub fn beta_real_trend(j: f64, a: f64, p: u32, a_fact: f64) -> f64 {
    -((p as f64 + 1.0) / (2.0 * a)) * (j * PI / a).ln() + a_fact.ln() / (2.0 * a)
}

pub fn predict_alpha(k: u32) -> f64 {
    -(k as f64)
}

/// Default search rectangle `[-R, 1] x [-R, R]`, with `R` past the
/// predicted `beta_pairs`-th pair and kept off the integers.
pub fn default_region(a: f64, p: u32, big_a: f64, beta_pairs: u32) -> Result<Rect> {
    let b = predict_beta(beta_pairs as i64, a, p, big_a)?;
    let r = (b.im + PI / (2.0 * a)).max(-b.re + 1.0).floor() + 0.5;
    Rect::new(-r, 1.0, -r, r)
}

#[derive(Clone, Debug, Serialize)]
pub struct AlphaRow {
    pub k: u32,
    pub location: f64,
    /// `|alpha_k + k|`.
    pub deviation: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct BetaRow {
    /// Index of the nearest predicted `Im beta_j`; 0 when below `j = 1`.
    pub j: i64,
    pub location: C,
    pub predicted: Option<C>,
    /// `Re beta - [-((p+1)/2a) log(j pi/a) + (1/2a) log(|A|(p-1)!)]`.
    pub re_residual: Option<f64>,
    /// `Im` gap to the next located beta above.
    pub im_gap: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AsymptoticsReport {
    pub a: f64,
    pub p: u32,
    pub big_a: f64,
    pub alpha: Vec<AlphaRow>,
    /// Upper half-plane betas sorted by `Im`.
    pub beta: Vec<BetaRow>,
    /// Every beta has its conjugate among the located poles.
    pub conjugate_closed: bool,
    /// Relative deviation of the last three gaps from `pi/a`.
    pub last_gap_deviation: Vec<f64>,
    /// `|r_{j+1}| <= 1.2 |r_j|` for consecutive residuals.
    pub residual_nonincreasing: bool,
    pub unclassified: usize,
}

pub fn asymptotics_report(poles: &[ReggePole], a: f64, p: u32, big_a: f64) -> Result<AsymptoticsReport> {
    let mut alpha: Vec<AlphaRow> = poles
        .iter()
        .filter(|q| q.family == Family::Alpha)
        .map(|q| {
            let k = -q.location.re.round();
            AlphaRow { k: k as u32, location: q.location.re, deviation: (q.location.re + k).abs() }
        })
        .collect();
    alpha.sort_by_key(|r| r.k);
    let betas: Vec<&ReggePole> = poles.iter().filter(|q| q.family == Family::Beta).collect();
    let conjugate_closed = betas.iter().all(|b| {
        let target = b.location.conj();
        betas.iter().any(|c| (c.location - target).norm() <= 1e-8 * target.norm().max(1.0))
    });
    let mut upper: Vec<C> = betas.iter().map(|b| b.location).filter(|z| z.im > 0.0).collect();
    upper.sort_by(|x, y| x.im.total_cmp(&y.im));
    let offset = 0.5 * (p as f64 - 1.0) + big_a.signum() + 1.0;
    let fact: f64 = (1..p).map(|i| i as f64).product();
    let mut beta = Vec::new();
    for (i, &z) in upper.iter().enumerate() {
        let j = ((2.0 * a * z.im / PI - offset) / 2.0).round() as i64;
        let (predicted, re_residual) = if j >= 1 {
            let pr = predict_beta(j, a, p, big_a)?;
            (Some(pr), Some(z.re - beta_real_trend(j as f64, a, p, big_a.abs() * fact)))
        } else {
            (None, None)
        };
        let im_gap = upper.get(i + 1).map(|w| w.im - z.im);
        beta.push(BetaRow { j: j.max(0), location: z, predicted, re_residual, im_gap });
    }
    let gaps: Vec<f64> = beta.iter().filter_map(|b| b.im_gap).collect();
    let last_gap_deviation =
        gaps.iter().skip(gaps.len().saturating_sub(3)).map(|g| (g - PI / a).abs() / (PI / a)).collect();
    let res: Vec<f64> = beta.iter().filter_map(|b| b.re_residual).collect();
    let residual_nonincreasing = res.windows(2).all(|w| w[1].abs() <= 1.2 * w[0].abs());
    let unclassified = poles.iter().filter(|q| q.family == Family::Unclassified).count();
    Ok(AsymptoticsReport {
        a,
        p,
        big_a,
        alpha,
        beta,
        conjugate_closed,
        last_gap_deviation,
        residual_nonincreasing,
        unclassified,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeros_of_sine() {
        let f = |z: C| (PI * z).sin();
        let r = Rect::new(-5.5, 0.7, -1.0, 1.0).unwrap();
        let s = locate_zeros(&r, &f, &SearchOptions::default()).unwrap();
        assert_eq!(s.zeros.len(), 6);
        for (k, z) in s.zeros.iter().enumerate() {
            assert!((z.z - C::new(k as f64 - 5.0, 0.0)).norm() < 1e-10);
            assert_eq!(z.multiplicity, 1);
        }
    }

    #[test]
    fn double_zero_detected() {
        let f = |z: C| (z - C::new(0.2, 0.1)).powi(2) * (z + 1.3);
        let r = Rect::new(-2.0, 2.0, -2.0, 2.0).unwrap();
        let s = locate_zeros(&r, &f, &SearchOptions::default()).unwrap();
        let total: u32 = s.zeros.iter().map(|z| z.multiplicity).sum();
        assert_eq!(total, 3);
        assert!(s.zeros.iter().any(|z| z.multiplicity == 2 && (z.z - C::new(0.2, 0.1)).norm() < 1e-6));
    }

    #[test]
    fn predictor_example() {
        let b = predict_beta(10, 1.0, 1, 2.0).unwrap();
        assert!((b.re + 3.1007).abs() < 1e-4 && (b.im - 34.5575).abs() < 1e-4, "{b}");
        let flipped = predict_beta(10, 1.0, 1, -2.0).unwrap();
        assert!((b.im - flipped.im - PI).abs() < 1e-12);
        assert!(predict_beta(3, 1.0, 1, 0.0).is_err());
        assert_eq!(predict_alpha(7), -7.0);
    }

    #[test]
    fn classification_rules() {
        let zs = [C::new(-3.02, 0.0), C::new(-2.0, 5.0), C::new(-2.0, -5.0), C::new(-1.0, 2.0), C::new(0.4, 0.0)];
        let f = classify(&zs);
        assert_eq!(f, vec![Family::Alpha, Family::Beta, Family::Beta, Family::Unclassified, Family::Unclassified]);
    }
}
