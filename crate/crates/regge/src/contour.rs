//! Argument principle on rectangles and Cauchy-integral derivatives.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};

type C = Complex64;

/// Axis-aligned rectangle `[re0, re1] x [im0, im1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect {
    pub re0: f64,
    pub re1: f64,
    pub im0: f64,
    pub im1: f64,
}

impl Rect {
    pub fn new(re0: f64, re1: f64, im0: f64, im1: f64) -> Result<Self> {
        if !(re1 > re0 && im1 > im0) || ![re0, re1, im0, im1].iter().all(|v| v.is_finite()) {
            return Err(Error::Validation(format!("bad rectangle [{re0}, {re1}] x [{im0}, {im1}]")));
        }
        Ok(Rect { re0, re1, im0, im1 })
    }

    pub fn center(&self) -> C {
        C::new(0.5 * (self.re0 + self.re1), 0.5 * (self.im0 + self.im1))
    }

    pub fn width(&self) -> f64 {
        self.re1 - self.re0
    }

    pub fn height(&self) -> f64 {
        self.im1 - self.im0
    }

    pub fn diameter(&self) -> f64 {
        self.width().hypot(self.height())
    }

    pub fn contains(&self, z: C, slack: f64) -> bool {
        z.re >= self.re0 - slack && z.re <= self.re1 + slack && z.im >= self.im0 - slack && z.im <= self.im1 + slack
    }

    /// Counterclockwise corners.
    pub fn corners(&self) -> [C; 4] {
        [
            C::new(self.re0, self.im0),
            C::new(self.re1, self.im0),
            C::new(self.re1, self.im1),
            C::new(self.re0, self.im1),
        ]
    }

    /// Split at fractional positions `(fx, fy)` of the sides.
    pub fn quarter(&self, fx: f64, fy: f64) -> [Rect; 4] {
        let xm = self.re0 + fx * self.width();
        let ym = self.im0 + fy * self.height();
        [
            Rect { re0: self.re0, re1: xm, im0: self.im0, im1: ym },
            Rect { re0: xm, re1: self.re1, im0: self.im0, im1: ym },
            Rect { re0: self.re0, re1: xm, im0: ym, im1: self.im1 },
            Rect { re0: xm, re1: self.re1, im0: ym, im1: self.im1 },
        ]
    }
}

/// Largest phase increment accepted between neighbouring boundary samples.
const MAX_DARG: f64 = PI / 4.0;
/// Initial boundary sample spacing.
const BASE_STEP: f64 = 0.1;

fn edge_phase<F: Fn(C) -> C>(f: &F, za: C, fa: C, zb: C, fb: C, min_len: f64) -> Result<f64> {
    if fa == C::new(0.0, 0.0) || !fa.is_finite() {
        return Err(Error::BoundaryTooClose { re: za.re, im: za.im });
    }
    let d = (fb / fa).arg();
    let ratio = fb.norm() / fa.norm();
    if d.abs() <= MAX_DARG && (0.25..=4.0).contains(&ratio) {
        return Ok(d);
    }
    if (zb - za).norm() < min_len {
        return Err(Error::BoundaryTooClose { re: za.re, im: za.im });
    }
    let zm = 0.5 * (za + zb);
    let fm = f(zm);
    if fm == C::new(0.0, 0.0) || !fm.is_finite() {
        return Err(Error::BoundaryTooClose { re: zm.re, im: zm.im });
    }
    Ok(edge_phase(f, za, fa, zm, fm, min_len)? + edge_phase(f, zm, fm, zb, fb, min_len)?)
}

/// Total change of `arg f` around the rectangle, tracked adaptively.
pub fn boundary_phase<F: Fn(C) -> C>(f: &F, rect: &Rect) -> Result<f64> {
    let corners = rect.corners();
    let min_len = 1e-11 * rect.diameter().max(1.0);
    let mut total = 0.0;
    for k in 0..4 {
        let (za, zb) = (corners[k], corners[(k + 1) % 4]);
        let len = (zb - za).norm();
        let pieces = ((len / BASE_STEP).ceil() as usize).max(4);
        let mut z_prev = za;
        let mut f_prev = f(za);
        for s in 1..=pieces {
            let z = za + (zb - za) * (s as f64 / pieces as f64);
            let fz = f(z);
            total += edge_phase(f, z_prev, f_prev, z, fz, min_len)?;
            z_prev = z;
            f_prev = fz;
        }
    }
    Ok(total)
}

/// Number of zeros of an analytic `f` inside `rect`, counted with
/// multiplicity. Refuses when the boundary passes too close to a zero.
pub fn count_zeros<F: Fn(C) -> C>(rect: &Rect, f: &F) -> Result<i64> {
    let w = boundary_phase(f, rect)? / (2.0 * PI);
    let n = w.round();
    if (w - n).abs() > 0.25 {
        return Err(Error::Precision(format!("winding {w} is not close to an integer")));
    }
    Ok(n as i64)
}

/// `f^{(k)}(z0)` by the trapezoid rule on a circle of radius `r`.
pub fn cauchy_derivative<F: Fn(C) -> C>(f: &F, z0: C, r: f64, k: u32, points: usize) -> C {
    let mut s = C::new(0.0, 0.0);
    for j in 0..points {
        let e = C::from_polar(1.0, 2.0 * PI * j as f64 / points as f64);
        s += f(z0 + r * e) * e.powi(-(k as i32));
    }
    let fact: f64 = (1..=k).map(|i| i as f64).product();
    s * fact / (points as f64 * r.powi(k as i32))
}

/// `(1/2 pi i) oint g(mu) (mu - z0)^{j} d mu` over a circle, i.e. the
/// Laurent coefficient of order `-(j+1)`.
pub fn laurent_coefficient<F: Fn(C) -> C>(g: &F, z0: C, r: f64, j: i32, points: usize) -> C {
    let mut s = C::new(0.0, 0.0);
    for k in 0..points {
        let e = C::from_polar(1.0, 2.0 * PI * k as f64 / points as f64);
        // d mu = i r e d theta; 1/(2 pi i) * i r * (2 pi / points) = r / points
        s += g(z0 + r * e) * (r * e).powi(j) * e;
    }
    s * r / points as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sine_and_polynomial_counts() {
        let sin = |z: C| (PI * z).sin();
        assert_eq!(count_zeros(&Rect::new(-5.5, -0.5, -1.0, 1.0).unwrap(), &sin).unwrap(), 5);
        let p = |z: C| z * z + 1.0;
        assert_eq!(count_zeros(&Rect::new(-2.0, 2.0, -2.0, 2.0).unwrap(), &p).unwrap(), 2);
        let cube = |z: C| (z - 0.3).powi(3);
        assert_eq!(count_zeros(&Rect::new(-1.0, 1.0, -1.0, 1.0).unwrap(), &cube).unwrap(), 3);
    }

    #[test]
    fn boundary_zero_is_refused() {
        let sin = |z: C| (PI * z).sin();
        let r = Rect::new(-2.0, 0.0, -1.0, 1.0).unwrap();
        assert!(matches!(count_zeros(&r, &sin), Err(Error::BoundaryTooClose { .. })));
    }

    #[test]
    fn cauchy_derivative_of_exp() {
        let f = |z: C| z.exp();
        let z0 = C::new(0.3, -0.2);
        for k in 0..4 {
            let d = cauchy_derivative(&f, z0, 0.1, k, 32);
            assert!((d - z0.exp()).norm() < 1e-10, "k = {k}");
        }
    }

    #[test]
    fn laurent_of_simple_pole() {
        let g = |z: C| 3.0 / (z - 1.0) + z * z;
        let c = laurent_coefficient(&g, C::new(1.0, 0.0), 0.2, 0, 32);
        assert!((c - 3.0).norm() < 1e-12);
    }
}
