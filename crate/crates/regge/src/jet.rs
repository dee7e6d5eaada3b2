//! Truncated Taylor series. `c[k] = f^{(k)}(x0) / k!`.

use std::ops::{Add, Mul, Neg, Sub};

#[derive(Clone, Debug, PartialEq)]
pub struct Jet(pub Vec<f64>);

impl Jet {
    pub fn constant(v: f64, order: usize) -> Jet {
        let mut c = vec![0.0; order + 1];
        c[0] = v;
        Jet(c)
    }

    pub fn order(&self) -> usize {
        self.0.len() - 1
    }

    /// k-th derivative value.
    pub fn deriv_value(&self, k: usize) -> f64 {
        self.0.get(k).copied().unwrap_or(0.0) * factorial(k)
    }

    /// Jet of the derivative; one order shorter.
    pub fn derivative(&self) -> Jet {
        if self.0.len() <= 1 {
            return Jet(vec![0.0]);
        }
        Jet(self.0.iter().enumerate().skip(1).map(|(k, c)| k as f64 * c).collect())
    }

    pub fn truncate(&self, order: usize) -> Jet {
        Jet(self.0.iter().take(order + 1).copied().collect())
    }

    pub fn scale(&self, s: f64) -> Jet {
        Jet(self.0.iter().map(|c| c * s).collect())
    }

    pub fn recip(&self) -> Jet {
        let n = self.0.len();
        let a = &self.0;
        let mut r = vec![0.0; n];
        r[0] = 1.0 / a[0];
        for k in 1..n {
            let s: f64 = (1..=k).map(|j| a[j] * r[k - j]).sum();
            r[k] = -s / a[0];
        }
        Jet(r)
    }

    pub fn div(&self, other: &Jet) -> Jet {
        self * &other.recip()
    }

    pub fn square(&self) -> Jet {
        self * self
    }
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|j| j as f64).product()
}

fn zip_len(a: &Jet, b: &Jet) -> usize {
    a.0.len().min(b.0.len())
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, o: &Jet) -> Jet {
        Jet((0..zip_len(self, o)).map(|k| self.0[k] + o.0[k]).collect())
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, o: &Jet) -> Jet {
        Jet((0..zip_len(self, o)).map(|k| self.0[k] - o.0[k]).collect())
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, o: &Jet) -> Jet {
        let n = zip_len(self, o);
        Jet((0..n).map(|k| (0..=k).map(|j| self.0[j] * o.0[k - j]).sum()).collect())
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exp_jet(x0: f64, order: usize) -> Jet {
        Jet((0..=order).map(|k| x0.exp() / factorial(k)).collect())
    }

    #[test]
    fn quotient_of_exponentials() {
        // e^{2x} / e^{x} = e^{x}
        let e2 = Jet((0..=5).map(|k| 2f64.powi(k as i32) / factorial(k)).collect());
        let e1 = exp_jet(0.0, 5);
        let q = e2.div(&e1);
        for k in 0..=5 {
            assert!((q.0[k] - e1.0[k]).abs() < 1e-14);
        }
    }

    #[test]
    fn derivative_shifts() {
        // x^3 at x0 = 2: 8 + 12 h + 6 h^2 + h^3
        let j = Jet(vec![8.0, 12.0, 6.0, 1.0]);
        assert_eq!(j.deriv_value(3), 6.0);
        assert_eq!(j.derivative().0, vec![12.0, 12.0, 3.0]);
    }
}
