use num_complex::Complex64 as C;
use proptest::prelude::*;
use std::f64::consts::PI;
use std::sync::OnceLock;

use regge::contour::{count_zeros, Rect};
use regge::error::Error;
use regge::jost::Jost;
use regge::kernel::solve_kernel;
use regge::model::{Potential, WarpSpec};
use regge::poles::{
    classify, integer_pole_identity, locate_poles, locate_zeros, predict_alpha, predict_beta, residue_at,
    wronskian_bootstrap, Family, SearchOptions,
};

fn jost_of(pot: &Potential, n: usize) -> Jost {
    Jost::new(&solve_kernel(pot, n, 1e-11).unwrap())
}

fn bump() -> &'static Jost {
    static J: OnceLock<Jost> = OnceLock::new();
    J.get_or_init(|| jost_of(&Potential::from_warp(WarpSpec::bump(3, 1.0, 1.0, 1, 0.15)).unwrap(), 512))
}

#[test]
fn no_zeros_deep_right() {
    let j = Jost::unperturbed(1.0);
    assert_eq!(count_zeros(&Rect::new(1.0, 20.0, -5.0, 5.0).unwrap(), &|z| j.psi(z)).unwrap(), 0);
}

#[test]
fn one_pole_per_negative_integer() {
    let j = Jost::unperturbed(1.0);
    for k in 5..=10 {
        let k = k as f64;
        let r = Rect::new(-k - 0.25, -k + 0.25, -0.25, 0.25).unwrap();
        assert_eq!(count_zeros(&r, &|z| j.psi(z)).unwrap(), 1);
    }
    let found = locate_poles(&Rect::new(-10.5, -0.5, -1.0, 1.0).unwrap(), &j, &SearchOptions::default()).unwrap();
    let a7 = found.poles.iter().find(|p| (p.location.re + 7.0).abs() < 0.5).unwrap();
    assert!((a7.location.re - predict_alpha(7)).abs() < 0.1);
    for p in &found.poles {
        assert_eq!(p.multiplicity, 1);
        assert_eq!(p.family, Family::Alpha);
        assert!(p.location.im == 0.0 || p.location.im.abs() < 1e-12);
        assert!(p.residue.im.abs() <= 1e-10 * p.residue.norm().max(1e-300) + 1e-300);
    }
}

/// Roots of `cosh(a mu) + (z/mu) sinh(a mu)`, `mu^2 = z^2 + c`: grid scan of
/// `|g|` for local minima, then Newton on the closed form.
fn well_roots(a: f64, c: f64, r: &Rect) -> Vec<C> {
    let g = |z: C| {
        let mu = (z * z + c).sqrt();
        if mu.norm() < 1e-12 {
            return C::new(1.0, 0.0) + z * a;
        }
        (a * mu).cosh() + z / mu * (a * mu).sinh()
    };
    let h = 0.02;
    let nx = ((r.re1 - r.re0) / h) as usize;
    let ny = ((r.im1 - r.im0) / h) as usize;
    let at = |i: usize, k: usize| C::new(r.re0 + i as f64 * h, r.im0 + k as f64 * h);
    let mut roots: Vec<C> = Vec::new();
    for i in 1..nx {
        for k in 1..ny {
            let v = g(at(i, k)).norm();
            let is_min = [(0, 1), (2, 1), (1, 0), (1, 2), (0, 0), (2, 2), (0, 2), (2, 0)]
                .iter()
                .all(|&(di, dk)| g(at(i + di - 1, k + dk - 1)).norm() >= v);
            if !is_min {
                continue;
            }
            let mut z = at(i, k);
            for _ in 0..50 {
                let d = (g(z + 1e-6) - g(z - 1e-6)) / 2e-6;
                let step = g(z) / d;
                z -= step;
                if step.norm() < 1e-14 {
                    break;
                }
            }
            if g(z).norm() < 1e-10 && !roots.iter().any(|w| (w - z).norm() < 1e-6) {
                roots.push(z);
            }
        }
    }
    roots
}

#[test]
fn constant_well_poles_match_closed_form() {
    let (a, c) = (1.0, 1.0);
    let j = jost_of(&Potential::constant_well(a, c, 0.0), 512);
    let region = Rect::new(-6.3, 0.9, -6.1, 6.2).unwrap();
    let found = locate_poles(&region, &j, &SearchOptions::default()).unwrap();
    let inner = Rect::new(-6.2, 0.8, -6.0, 6.1).unwrap();
    let oracle = well_roots(a, c, &region);
    let located: Vec<C> = found.poles.iter().map(|p| p.location).filter(|z| inner.contains(*z, 0.0)).collect();
    let expected: Vec<C> = oracle.into_iter().filter(|z| inner.contains(*z, 0.0)).collect();
    assert!(!expected.is_empty());
    assert_eq!(located.len(), expected.len(), "{located:?} vs {expected:?}");
    for z in &located {
        let d = expected.iter().map(|w| (w - z).norm()).fold(f64::INFINITY, f64::min);
        assert!(d < 1e-6, "{z}: {d:e}");
    }
}

#[test]
fn integer_pole_identity_on_tuned_well() {
    // constant well deep enough that psi(0, 1) = 0, found by bisection in c
    let psi1 = |c: f64, n: usize| jost_of(&Potential::constant_well(1.0, c, 1.0), n).psi(C::new(1.0, 0.0)).re;
    let (mut lo, mut hi) = (-12.0, -1.0);
    assert!(psi1(lo, 256).signum() != psi1(hi, 256).signum());
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if psi1(mid, 512).signum() == psi1(lo, 512).signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let j = jost_of(&Potential::constant_well(1.0, 0.5 * (lo + hi), 1.0), 512);
    let one = C::new(1.0, 0.0);
    assert!(j.psi(one).norm() < 1e-12);
    assert!(j.psi(-one).norm() < 1e-12);
    let lhs = integer_pole_identity(&j, 1, 0.1);
    assert!((lhs + 2.0).norm() < 1e-8, "{lhs}");
    // the residue of m there is psi'(1) / psi_z(1)
    let (res, _) = residue_at(&j, one, 1, 0.1);
    let dpsi = (j.psi(one + 1e-5) - j.psi(one - 1e-5)) / 2e-5;
    assert!((res - j.psi_prime(one) / dpsi).norm() < 1e-6 * res.norm());
}

#[test]
fn wronskian_bootstrap_at_beta() {
    let j = bump();
    let found = locate_poles(&Rect::new(-3.5, -2.0, 1.2, 2.6).unwrap(), j, &SearchOptions::default()).unwrap();
    assert_eq!(found.poles.len(), 1);
    let zk = found.poles[0].location;
    let direct = j.psi_prime(zk);
    assert!((wronskian_bootstrap(j, zk) - direct).norm() < 1e-8 * direct.norm());
}

#[test]
fn located_zeros_are_small_in_their_cells() {
    let j = bump();
    let f = |z: C| j.psi(z);
    let s = locate_zeros(&Rect::new(-8.5, 1.0, -6.0, 6.0).unwrap(), &f, &SearchOptions::default()).unwrap();
    assert!(!s.zeros.is_empty());
    for z in &s.zeros {
        let cell = z.cell;
        let mut max = 0.0f64;
        for k in 0..=20 {
            let t = k as f64 / 20.0;
            for w in [
                C::new(cell.re0 + t * cell.width(), cell.im0),
                C::new(cell.re0 + t * cell.width(), cell.im1),
                C::new(cell.re0, cell.im0 + t * cell.height()),
                C::new(cell.re1, cell.im0 + t * cell.height()),
            ] {
                max = max.max(f(w).norm());
            }
        }
        assert!(f(z.z).norm() < 1e-8 * max, "{}", z.z);
    }
}

#[test]
fn beta_conjugate_closure() {
    let j = bump();
    let found = locate_poles(&Rect::new(-8.5, 1.0, -13.5, 13.5).unwrap(), j, &SearchOptions::default()).unwrap();
    let betas: Vec<C> = found.poles.iter().filter(|p| p.family == Family::Beta).map(|p| p.location).collect();
    assert!(betas.len() >= 6);
    for b in &betas {
        assert!(betas.iter().any(|c| (c - b.conj()).norm() < 1e-8));
    }
    assert!(found.poles.iter().all(|p| p.family != Family::Unclassified));
}

#[test]
fn predictor_examples() {
    let b = predict_beta(10, 1.0, 1, 2.0).unwrap();
    assert!((b - C::new(-3.1007, 34.5575)).norm() < 1e-4);
    let flipped = predict_beta(10, 1.0, 1, -2.0).unwrap();
    assert!(((b.im - flipped.im).abs() - PI).abs() < 1e-12);
    assert!(matches!(predict_beta(3, 1.0, 1, 0.0), Err(Error::Model(_))));
    assert_eq!(predict_alpha(7), -7.0);
    assert_eq!(classify(&[C::new(-3.01, 0.0)]), vec![Family::Alpha]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn subdivision_invariance(re0 in -10.0..0.0f64, w in 0.5..6.0f64, im0 in -8.0..6.0f64, ht in 0.5..6.0f64,
                              fx in 0.2..0.8f64, fy in 0.2..0.8f64) {
        let j = bump();
        let f = |z: C| j.psi(z);
        let r = Rect::new(re0, re0 + w, im0, im0 + ht).unwrap();
        let total = count_zeros(&r, &f);
        let parts: Result<Vec<i64>, _> = r.quarter(fx, fy).iter().map(|q| count_zeros(q, &f)).collect();
        // contours passing through a zero are refused, not miscounted
        if let (Ok(t), Ok(p)) = (total, parts) {
            prop_assert_eq!(t, p.iter().sum::<i64>());
        }
    }
}
