use num_complex::Complex64 as C;
use std::sync::OnceLock;

use regge::error::Error;
use regge::jost::Jost;
use regge::kernel::solve_kernel;
use regge::model::{shifted_momenta, Potential, WarpSpec};
use regge::poles::{Family, SearchOptions};
use regge::wt::{best_circle, build_model, contour_remainder, dtn_multipliers, synthetic_expansion, WeylModel};

fn unperturbed() -> &'static (Jost, WeylModel) {
    static M: OnceLock<(Jost, WeylModel)> = OnceLock::new();
    M.get_or_init(|| {
        let j = Jost::unperturbed(1.0);
        let m = build_model(&j, 30.0, &SearchOptions::default()).unwrap();
        (j, m)
    })
}

fn bump() -> &'static (Jost, WeylModel) {
    static M: OnceLock<(Jost, WeylModel)> = OnceLock::new();
    M.get_or_init(|| {
        let pot = Potential::from_warp(WarpSpec::bump(3, 1.0, 1.0, 1, 0.15)).unwrap();
        let j = Jost::new(&solve_kernel(&pot, 512, 1e-10).unwrap());
        let m = build_model(&j, 12.0, &SearchOptions::default()).unwrap();
        (j, m)
    })
}

fn rel_err(j: &Jost, m: &WeylModel, z: C) -> f64 {
    let d = j.weyl_m(z).unwrap();
    (m.reconstruct_m(z).unwrap() - d).norm() / d.norm()
}

#[test]
fn origin_is_exact() {
    let (_, m) = unperturbed();
    assert_eq!(m.reconstruct_m(C::new(0.0, 0.0)).unwrap(), m.m0);
}

#[test]
fn truncation_improves_at_two() {
    let (j, m) = unperturbed();
    let z = C::new(2.0, 0.0);
    // strictly while the error is above rounding
    let coarse: Vec<f64> = [2.5, 4.5, 6.5].iter().map(|&r| rel_err(j, &m.truncated(r), z)).collect();
    assert!(coarse[0] > coarse[1] && coarse[1] > coarse[2], "{coarse:?}");
    // at radii 10 to 20 it sits at rounding level: nonincreasing within 10%
    let errs: Vec<f64> = [10.0, 15.0, 20.0].iter().map(|&r| rel_err(j, &m.truncated(r), z)).collect();
    for w in errs.windows(2) {
        assert!(w[1] <= 1.1 * w[0] + 1e-14, "{errs:?}");
    }
    assert!(errs[2] < 1e-12);
}

#[test]
fn synthetic_form_on_real_axis() {
    let (j, m) = unperturbed();
    let m20 = m.truncated(20.0);
    let syn = synthetic_expansion(&m20);
    assert!(!syn.laurent_fallback);
    for k in 0..10 {
        let z = C::new(3.0 + 5.0 * k as f64 / 9.0, 0.0);
        let d = j.weyl_m(z).unwrap();
        let budget = m20.error_budget(z) + 1e-12 * d.norm();
        assert!((syn.eval(z) - d).norm() <= budget, "z = {z}");
    }
}

#[test]
fn conjugate_symmetry() {
    let (_, m) = bump();
    for p in m.poles.iter().filter(|p| p.family == Family::Beta) {
        let q = m.poles.iter().find(|q| (q.location - p.location.conj()).norm() < 1e-8).unwrap();
        assert!((q.residue - p.residue.conj()).norm() < 1e-8 * p.residue.norm());
    }
    for z in [C::new(0.7, 1.3), C::new(-2.2, 0.4), C::new(3.0, -2.0)] {
        let a = m.reconstruct_m(z.conj()).unwrap();
        let b = m.reconstruct_m(z).unwrap().conj();
        assert!((a - b).norm() < 1e-10 * a.norm());
    }
}

#[test]
fn residue_theorem_on_circles() {
    // (1/2 pi i) oint h_z m over |mu| = r equals reconstruct - m for the
    // model truncated at r, and shrinks as r crosses more poles
    let (j, m) = bump();
    let z = C::new(0.8, 0.6);
    let mut last = f64::INFINITY;
    for n in 1..=3 {
        let lo = std::f64::consts::PI * n as f64;
        let r = best_circle(j, lo, lo + 2.0, 16, 256);
        let c = contour_remainder(j, z, r, 2048);
        let t = m.truncated(r);
        let gap = t.reconstruct_m(z).unwrap() - j.weyl_m(z).unwrap();
        assert!((c - gap).norm() < 1e-8 * gap.norm().max(1e-3), "r = {r}: {c} vs {gap}");
        assert!(c.norm() < last, "r = {r}");
        last = c.norm();
    }
}

#[test]
fn zero_pole_mode() {
    // tune a constant well so that psi(0, 0) = 0
    let psi0 = |c: f64| {
        let j = Jost::new(&solve_kernel(&Potential::constant_well(1.0, c, 1.0), 256, 1e-12).unwrap());
        j.psi(C::new(0.0, 0.0)).re
    };
    let (mut lo, mut hi) = (-6.0, -0.5);
    assert!(psi0(lo).signum() != psi0(hi).signum());
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if psi0(mid).signum() == psi0(lo).signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let j = Jost::new(&solve_kernel(&Potential::constant_well(1.0, 0.5 * (lo + hi), 1.0), 256, 1e-12).unwrap());
    let m = build_model(&j, 6.0, &SearchOptions::default()).unwrap();
    assert!(m.zero_pole_mode);
    assert!(m.g.is_some());
    assert!(matches!(m.reconstruct_m(C::new(0.0, 0.0)), Err(Error::PoleProximity(_))));
    let z = C::new(0.5, 0.9);
    let r = best_circle(&j, 3.5, 5.5, 16, 256);
    let c = contour_remainder(&j, z, r, 2048);
    let gap = m.truncated(r).reconstruct_m(z).unwrap() - j.weyl_m(z).unwrap();
    assert!((c - gap).norm() < 1e-7 * gap.norm().max(1e-3), "{c} vs {gap}");
}

#[test]
fn dtn_unperturbed_first_mode() {
    let (j, m) = unperturbed();
    let sp = shifted_momenta(&[0.0, 2.0, 2.0, 6.0], 3).unwrap();
    // f = e^{-x}: f(0) = 1, f'(0) = -1
    let out = dtn_multipliers(j, Some(m), &sp, 1.0, -1.0, 3).unwrap();
    assert_eq!(out.len(), 3);
    // m(1/2) = -J'_{1/2}(1)/J_{1/2}(1) = 1/2 - cot 1
    let m_half = 0.5 - 1.0 / 1f64.tan();
    let want = -m_half - 0.5;
    assert!((out[0].direct.unwrap() - want).abs() < 1e-13);
    for e in &out {
        assert!((e.direct.unwrap() - e.reconstructed.unwrap()).abs() < 1e-10);
        assert!(!e.collision);
    }
}

#[test]
fn proximity_is_refused() {
    let (_, m) = unperturbed();
    let p = m.poles[0].location;
    assert!(matches!(m.reconstruct_m(p + 1e-8), Err(Error::PoleProximity(_))));
}
