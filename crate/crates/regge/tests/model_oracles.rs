use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use regge::error::Error;
use regge::model::{build_potential, shifted_momenta, sphere_spectrum, PiecewisePoly, Potential, WarpSpec};

/// `Q_f` for `V = c x (a - x)^e` from hand-differentiated closed forms:
/// `(f^k)''/f^k = k f''/f + k(k-1) (f'/f)^2`, `k = n/2 - 1`.
fn qf_oracle(x: f64, n: u32, lambda: f64, a: f64, e: i32, c: f64) -> f64 {
    if x > a {
        return 0.0;
    }
    let ef = e as f64;
    let y = a - x;
    let v = c * x * y.powi(e);
    let v1 = c * (y.powi(e) - ef * x * y.powi(e - 1));
    let v2 = c * (-2.0 * ef * y.powi(e - 1) + ef * (ef - 1.0) * x * y.powi(e - 2));
    let ex = (-x).exp();
    let (f, f1, f2) = (ex + v, -ex + v1, ex + v2);
    let k = n as f64 / 2.0 - 1.0;
    k * f2 / f + k * (k - 1.0) * (f1 / f).powi(2) - k * k - lambda * (f - ex) * (f + ex)
}

#[test]
fn bump_matches_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for &(n, p, c, a, lambda) in &[(3, 1, 0.3, 1.0, 1.0), (4, 1, -0.2, 1.5, 2.0), (5, 2, 0.15, 0.8, 0.5), (3, 3, 0.4, 1.0, 1.0)] {
        let spec = WarpSpec::bump(n, lambda, a, p, c);
        let table = build_potential(&spec, 128).unwrap();
        for _ in 0..10 {
            let i = rng.gen_range(0..=128);
            let x = table.grid[i];
            let want = qf_oracle(x, n, lambda, a, p as i32 + 1, c);
            assert!((table.qf_values[i] - want).abs() < 1e-12, "n={n} p={p} x={x}: {} vs {want}", table.qf_values[i]);
        }
    }
}

#[test]
fn unperturbed_is_exactly_zero() {
    for n in 3..7 {
        let t = build_potential(&WarpSpec::unperturbed(n, 1.3, 2.0), 200).unwrap();
        assert!(t.qf_values.iter().all(|&q| q.abs() < 1e-15));
        assert!(t.degenerate);
        assert_eq!(t.jump_value, 0.0);
    }
}

#[test]
fn support_and_grid_doubling() {
    let spec = WarpSpec::bump(3, 1.0, 1.0, 1, 0.3);
    let coarse = build_potential(&spec, 64).unwrap();
    let fine = build_potential(&spec, 128).unwrap();
    for i in 0..=64 {
        assert!((coarse.qf_values[i] - fine.qf_values[2 * i]).abs() <= 1e-12);
    }
    for x in [1.0000001, 1.5, 7.0] {
        assert_eq!(coarse.potential.q(x), 0.0);
    }
}

#[test]
fn rejections() {
    assert!(build_potential(&WarpSpec::bump(3, 1.0, 1.0, 1, 0.3), 32).is_err());
    let e = Potential::from_warp(WarpSpec::bump(3, 1.0, 1.0, 1, -20.0)).unwrap_err();
    assert!(matches!(e, Error::Model(_)));
    // C^1 but not C^2 at the interior breakpoint 0.5
    let v = PiecewisePoly::new(vec![0.0, 0.5, 1.0], vec![vec![0.0, 0.0, 0.0], vec![0.0, 0.0, 1.0, -2.0]]).unwrap();
    let e = Potential::from_warp(WarpSpec { n: 3, lambda: 1.0, p: 1, v }).unwrap_err();
    assert!(matches!(e, Error::Validation(_)));
}

#[test]
fn shifted_momenta_examples() {
    assert_eq!(shifted_momenta(&[0.0], 3).unwrap().z, vec![0.5]);
    assert_eq!(shifted_momenta(&[0.0], 4).unwrap().z, vec![1.0]);
    assert_eq!(shifted_momenta(&[0.0, 2.0], 3).unwrap().z, vec![0.5, 1.5]);
    assert!(matches!(shifted_momenta(&[-1.0], 3), Err(Error::Validation(_))));
}

/// Exponent vectors of degree-`k` monomials in `n` variables.
fn monomials(n: usize, k: usize) -> Vec<Vec<usize>> {
    if n == 1 {
        return vec![vec![k]];
    }
    (0..=k)
        .flat_map(|first| {
            monomials(n - 1, k - first).into_iter().map(move |mut rest| {
                rest.insert(0, first);
                rest
            })
        })
        .collect()
}

/// Dimension of the degree-`k` harmonic polynomials: kernel of the
/// Euclidean Laplacian from degree `k` to degree `k - 2`.
fn harmonic_dimension(n: usize, k: usize) -> usize {
    let src = monomials(n, k);
    if k < 2 {
        return src.len();
    }
    let dst = monomials(n, k - 2);
    let mut m = nalgebra::DMatrix::<f64>::zeros(dst.len(), src.len());
    for (j, al) in src.iter().enumerate() {
        for i in 0..n {
            if al[i] >= 2 {
                let mut b = al.clone();
                b[i] -= 2;
                let row = dst.iter().position(|d| *d == b).unwrap();
                m[(row, j)] += (al[i] * (al[i] - 1)) as f64;
            }
        }
    }
    src.len() - m.rank(1e-9)
}

/// `Delta u` for the degree-zero extension `u = P(x / |x|)` at a unit
/// point, by central differences; equals the sphere Laplacian of `P`.
fn sphere_laplacian(p: &dyn Fn(&[f64]) -> f64, x: &[f64]) -> f64 {
    let u = |y: &[f64]| {
        let r = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        let w: Vec<f64> = y.iter().map(|v| v / r).collect();
        p(&w)
    };
    let h = 1e-3;
    let mut s = 0.0;
    for i in 0..x.len() {
        let mut a = x.to_vec();
        let mut b = x.to_vec();
        a[i] += h;
        b[i] -= h;
        s += (u(&a) - 2.0 * u(x) + u(&b)) / (h * h);
    }
    s
}

#[test]
fn sphere_spectrum_against_harmonics() {
    for n in 3..=5u32 {
        let spec = sphere_spectrum(n, 4);
        for (k, &(mu, mult)) in spec.iter().enumerate() {
            assert_eq!(mult as usize, harmonic_dimension(n as usize, k), "n={n} k={k}");
            assert_eq!(mu, (k * (k + n as usize - 2)) as f64);
        }
    }
    assert_eq!(sphere_spectrum(3, 1), vec![(0.0, 1), (2.0, 3)]);
    assert_eq!(sphere_spectrum(4, 2)[2], (8.0, 9));

    // the eigenvalue itself from degree-1 and degree-2 harmonics
    let x3 = [0.48, -0.6, 0.64];
    let lap = sphere_laplacian(&|w| w[0], &x3);
    assert!((lap + 2.0 * x3[0]).abs() < 1e-5);
    let x4 = [0.5, 0.5, -0.5, 0.5];
    let lap = sphere_laplacian(&|w| w[0] * w[1], &x4);
    assert!((lap + 8.0 * 0.25).abs() < 1e-5);
}

proptest! {
    #[test]
    fn split_breakpoint_keeps_qf(c in -0.3..0.4f64, cut in 0.05..0.95f64, n in 3u32..6) {
        let spec = WarpSpec::bump(n, 1.0, 1.0, 1, c);
        let split = WarpSpec { v: spec.v.split_at(cut).unwrap(), ..spec.clone() };
        let (t1, t2) = (build_potential(&spec, 64).unwrap(), build_potential(&split, 64).unwrap());
        for (a, b) in t1.qf_values.iter().zip(&t2.qf_values) {
            prop_assert!((a - b).abs() < 1e-12);
        }
        prop_assert!((t1.jump_value - t2.jump_value).abs() < 1e-12);
    }
}
