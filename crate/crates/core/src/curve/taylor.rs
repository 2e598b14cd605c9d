//! Truncated Taylor series in one variable.
//!
//! Curves are evaluated as Taylor polynomials in the parameter so that the
//! geometry of a normal-shifted curve (which needs one more derivative of the
//! base curve than it produces) can be composed to any depth without finite
//! differences.

use std::ops::{Add, Mul, Neg, Sub};

/// Coefficients `c[n] = f^(n)(t0) / n!` for `n = 0..=order`.
#[derive(Debug, Clone, PartialEq)]
pub struct Taylor(pub Vec<f64>);

impl Taylor {
    pub fn constant(value: f64, order: usize) -> Self {
        let mut c = vec![0.0; order + 1];
        c[0] = value;
        Taylor(c)
    }

    pub fn order(&self) -> usize {
        self.0.len() - 1
    }

    pub fn value(&self) -> f64 {
        self.0[0]
    }

    /// The n-th derivative at the expansion point.
    pub fn derivative_value(&self, n: usize) -> f64 {
        let fact: f64 = (1..=n).map(|k| k as f64).product();
        self.0[n] * fact
    }

    /// Series of the derivative; loses one order.
    pub fn derivative(&self) -> Self {
        let n = self.order();
        assert!(n >= 1, "cannot differentiate an order-0 series");
        Taylor((0..n).map(|k| (k + 1) as f64 * self.0[k + 1]).collect())
    }

    pub fn truncate(&self, order: usize) -> Self {
        Taylor(self.0[..=order].to_vec())
    }

    /// Series of `cos(k t)` around `t0`.
    pub fn cos_mode(k: f64, t0: f64, order: usize) -> Self {
        Self::trig_mode(k, t0, order, 0.0)
    }

    /// Series of `sin(k t)` around `t0`.
    pub fn sin_mode(k: f64, t0: f64, order: usize) -> Self {
        Self::trig_mode(k, t0, order, -std::f64::consts::FRAC_PI_2)
    }

    fn trig_mode(k: f64, t0: f64, order: usize, phase: f64) -> Self {
        let mut c = Vec::with_capacity(order + 1);
        let mut scale = 1.0;
        for n in 0..=order {
            if n > 0 {
                scale *= k / n as f64;
            }
            c.push(scale * (k * t0 + phase + n as f64 * std::f64::consts::FRAC_PI_2).cos());
        }
        Taylor(c)
    }

    pub fn scale(&self, s: f64) -> Self {
        Taylor(self.0.iter().map(|c| c * s).collect())
    }

    pub fn recip(&self) -> Self {
        let n = self.order();
        let b0 = self.0[0];
        let mut c = vec![0.0; n + 1];
        c[0] = 1.0 / b0;
        for m in 1..=n {
            let s: f64 = (1..=m).map(|k| self.0[k] * c[m - k]).sum();
            c[m] = -s / b0;
        }
        Taylor(c)
    }

    pub fn sqrt(&self) -> Self {
        let n = self.order();
        let s0 = self.0[0].sqrt();
        let mut s = vec![0.0; n + 1];
        s[0] = s0;
        for m in 1..=n {
            let acc: f64 = (1..m).map(|k| s[k] * s[m - k]).sum();
            s[m] = (self.0[m] - acc) / (2.0 * s0);
        }
        Taylor(s)
    }
}

impl Add for &Taylor {
    type Output = Taylor;
    fn add(self, rhs: &Taylor) -> Taylor {
        Taylor(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &Taylor {
    type Output = Taylor;
    fn sub(self, rhs: &Taylor) -> Taylor {
        Taylor(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &Taylor {
    type Output = Taylor;
    fn neg(self) -> Taylor {
        self.scale(-1.0)
    }
}

impl Mul for &Taylor {
    type Output = Taylor;
    fn mul(self, rhs: &Taylor) -> Taylor {
        let n = self.order().min(rhs.order());
        Taylor(
            (0..=n)
                .map(|m| (0..=m).map(|k| self.0[k] * rhs.0[m - k]).sum())
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trig_modes_match_closed_form_derivatives() {
        let t0 = 0.7;
        let c = Taylor::cos_mode(3.0, t0, 4);
        assert!((c.derivative_value(0) - (3.0 * t0).cos()).abs() < 1e-15);
        assert!((c.derivative_value(1) + 3.0 * (3.0 * t0).sin()).abs() < 1e-13);
        assert!((c.derivative_value(2) + 9.0 * (3.0 * t0).cos()).abs() < 1e-12);
        let s = Taylor::sin_mode(2.0, t0, 3);
        assert!((s.derivative_value(1) - 2.0 * (2.0 * t0).cos()).abs() < 1e-13);
        assert!((s.derivative_value(3) + 8.0 * (2.0 * t0).cos()).abs() < 1e-12);
    }

    #[test]
    fn sqrt_and_recip_invert_products() {
        let x = Taylor(vec![2.0, 0.3, -0.1, 0.05]);
        let r = x.sqrt();
        let back = &r * &r;
        for (a, b) in back.0.iter().zip(&x.0) {
            assert!((a - b).abs() < 1e-14);
        }
        let one = &x * &x.recip();
        assert!((one.0[0] - 1.0).abs() < 1e-15);
        for c in &one.0[1..] {
            assert!(c.abs() < 1e-15);
        }
    }
}
