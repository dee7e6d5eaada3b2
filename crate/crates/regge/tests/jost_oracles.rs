use num_complex::Complex64 as C;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::sync::OnceLock;

use regge::jost::{psi_unperturbed, Jost};
use regge::kernel::solve_kernel;
use regge::model::{Potential, WarpSpec};
use regge::special::{bessel_j, bessel_j_dt};

/// `lambda = 0`, `Q_f = c` on `[0, a]`: match `psi = e^{-zx}` at `x = a`.
fn well_oracle(z: C, a: f64, c: f64) -> (C, C) {
    let mu = (z * z + c).sqrt();
    let e = (-a * z).exp();
    let (ch, sh) = ((a * mu).cosh(), (a * mu).sinh());
    (e * (ch + z / mu * sh), e * (-mu * sh - z * ch))
}

fn well(a: f64, c: f64) -> Jost {
    Jost::new(&solve_kernel(&Potential::constant_well(a, c, 0.0), 512, 1e-12).unwrap())
}

fn bump(c: f64) -> Jost {
    Jost::new(&solve_kernel(&Potential::from_warp(WarpSpec::bump(3, 1.0, 1.0, 1, c)).unwrap(), 512, 1e-10).unwrap())
}

#[test]
fn constant_well_closed_form() {
    let j = well(1.0, 1.0);
    assert!((j.psi(C::new(1.0, 0.0)).re - 1.3046).abs() < 1e-4);
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..20 {
        let z = C::new(rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0));
        let (p, d) = well_oracle(z, 1.0, 1.0);
        assert!((j.psi(z) - p).norm() < 1e-6 * p.norm().max(1.0), "z = {z}");
        assert!((j.psi_prime(z) - d).norm() < 1e-6 * d.norm().max(1.0), "z = {z}");
    }
}

#[test]
fn unperturbed_is_bessel() {
    let j = bump(0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..20 {
        let z = C::new(rng.gen_range(-6.0..6.0), rng.gen_range(-6.0..6.0));
        let b = bessel_j(z, 1.0).unwrap();
        assert!((j.psi(z) - b).norm() <= 1e-13 * b.norm().max(1.0));
        let d = -bessel_j_dt(z, 1.0).unwrap();
        assert!((j.psi_prime(z) - d).norm() <= 1e-12 * d.norm().max(1.0));
        assert_eq!(psi_unperturbed(0.0, z, 1.0).unwrap(), b);
    }
    let z = C::new(0.5, 0.0);
    assert!((psi_unperturbed(0.0, z, 1.0).unwrap().re - 0.6713967).abs() < 1e-7);
    assert!(psi_unperturbed(30.0, C::new(1.0, 2.0), 1.0).unwrap().norm() < 1e-12);
}

#[test]
fn wronskian_values() {
    let j = bump(0.3);
    let w = |z: C| j.psi(z) * j.psi_prime(-z) - j.psi_prime(z) * j.psi(-z);
    let target = 2.0 * (0.3 * PI).sin() / PI;
    assert!((target - 0.51504).abs() < 1e-5);
    assert!((w(C::new(0.3, 0.0)) - target).norm() < 1e-8);
    assert!(w(C::new(2.0, 0.0)).norm() < 1e-8);
    assert!(w(C::new(-3.0, 0.0)).norm() < 1e-8);
}

#[test]
fn identities_on_random_potentials() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..3 {
        let c = rng.gen_range(-0.3..0.5);
        let spec = WarpSpec::bump(rng.gen_range(3..6), rng.gen_range(0.5..2.0), rng.gen_range(0.6..1.4), rng.gen_range(1..3), c);
        let j = Jost::new(&solve_kernel(&Potential::from_warp(spec).unwrap(), 512, 1e-10).unwrap());
        let (w, r) = j.identity_checks(C::new(0.5, 0.5));
        assert!(w < 1e-7 && r < 1e-7, "{w:e} {r:e}");
    }
}

#[test]
fn cauchy_mean_value() {
    let j = bump(0.3);
    for z0 in [C::new(0.3, 0.2), C::new(-2.6, 1.5), C::new(4.0, -3.0)] {
        let n = 64;
        let mean: C = (0..n).map(|k| j.psi(z0 + C::from_polar(0.5, 2.0 * PI * k as f64 / n as f64))).sum::<C>() / n as f64;
        assert!((mean - j.psi(z0)).norm() < 1e-8 * j.psi(z0).norm().max(1.0));
    }
}

#[test]
fn finite_order_growth() {
    let j = bump(0.3);
    let radii = [10.0, 15.0, 20.0, 30.0, 40.0, 50.0, 60.0];
    for k in 0..16 {
        let th = -PI + (k as f64 + 0.5) * 2.0 * PI / 16.0;
        let pts: Vec<(f64, f64)> = radii.iter().map(|&r| (r, j.psi(C::from_polar(r, th)).norm().ln())).collect();
        let a = nalgebra::DMatrix::from_fn(pts.len(), 3, |i, c| [1.0, pts[i].0, pts[i].0 * pts[i].0.ln()][c]);
        let b = nalgebra::DVector::from_iterator(pts.len(), pts.iter().map(|p| p.1));
        let c2 = a.svd(true, true).solve(&b, 1e-14).unwrap()[2];
        assert!(c2 <= 1.1, "direction {th}: c2 = {c2}");
    }
}

#[test]
fn weyl_function_asymptotics() {
    let j = bump(0.0);
    let dev: Vec<f64> = [10.0, 20.0, 40.0].iter().map(|&x| (j.weyl_m(C::new(x, 0.0)).unwrap() / -x - 1.0).norm()).collect();
    assert!(dev[0] > dev[1] && dev[1] > dev[2] && dev[2] < 1e-3, "{dev:?}");
    for k in 0..9 {
        let z = C::from_polar(30.0, -PI / 2.0 + PI * k as f64 / 8.0);
        assert!(j.weyl_m(z).unwrap().norm() < 2.0 * z.norm());
    }
    // first alpha pole of J_z(1)
    assert!(j.eval(C::new(-0.7745645128, 0.0)).psi0.norm() < 1e-9);
}

proptest! {
    #[test]
    fn conjugation(re in -10.0..10.0f64, im in -10.0..10.0f64) {
        static J: OnceLock<Jost> = OnceLock::new();
        let j = J.get_or_init(|| bump(0.3));
        let z = C::new(re, im);
        let a = j.psi(z.conj());
        let b = j.psi(z).conj();
        prop_assert!((a - b).norm() <= 1e-12 * a.norm().max(1.0));
    }
}
