//! Complex polynomials in ascending coefficient order.

use crate::linalg::{C64, ZERO};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Poly {
    coeffs: Vec<C64>,
}

impl Poly {
    /// Builds a polynomial, trimming trailing zero coefficients.
    pub fn new(mut coeffs: Vec<C64>) -> Self {
        while coeffs.len() > 1 && coeffs.last() == Some(&ZERO) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(ZERO);
        }
        Poly { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Poly::new(coeffs.iter().map(|&c| C64::new(c, 0.0)).collect())
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> C64 {
        *self.coeffs.last().unwrap()
    }

    pub fn eval(&self, x: C64) -> C64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, &c| acc * x + c)
    }

    /// Value and first derivative in one Horner pass.
    pub fn eval_d(&self, x: C64) -> (C64, C64) {
        let mut p = ZERO;
        let mut dp = ZERO;
        for &c in self.coeffs.iter().rev() {
            dp = dp * x + p;
            p = p * x + c;
        }
        (p, dp)
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::new(vec![ZERO]);
        }
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    /// Taylor coefficients of p around `x`: p(x + h) = Σ t_k h^k.
    pub fn taylor_at(&self, x: C64) -> Vec<C64> {
        let mut t = self.coeffs.clone();
        let n = t.len();
        for i in 0..n {
            for j in (i..n - 1).rev() {
                let v = t[j + 1];
                t[j] += v * x;
            }
        }
        t
    }

    /// p(x + h) − p(x) without cancellation when `h` is small.
    pub fn difference(&self, x: C64, h: C64) -> C64 {
        let t = self.taylor_at(x);
        t.iter().skip(1).rev().fold(ZERO, |acc, &c| acc * h + c) * h
    }

    /// Sum of coefficient moduli.
    pub fn l1_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).sum()
    }

    /// All complex roots by the Aberth–Ehrlich iteration.
    pub fn roots(&self) -> Vec<C64> {
        let d = self.degree();
        if d == 0 {
            return Vec::new();
        }
        let lead = self.leading();
        let monic = Poly::new(self.coeffs.iter().map(|c| c / lead).collect());
        let bound = 1.0
            + monic.coeffs[..d]
                .iter()
                .map(|c| c.norm())
                .fold(0.0_f64, f64::max);
        let mut z: Vec<C64> = (0..d)
            .map(|k| C64::from_polar(0.5 * bound, 0.4 + std::f64::consts::TAU * k as f64 / d as f64))
            .collect();
        for _ in 0..500 {
            let mut max_step = 0.0_f64;
            for i in 0..d {
                let (p, dp) = monic.eval_d(z[i]);
                if p == ZERO {
                    continue;
                }
                let ratio = p / dp;
                let s: C64 = (0..d)
                    .filter(|&j| j != i)
                    .map(|j| C64::new(1.0, 0.0) / (z[i] - z[j]))
                    .sum();
                let step = ratio / (C64::new(1.0, 0.0) - ratio * s);
                if step.is_finite() {
                    z[i] -= step;
                    max_step = max_step.max(step.norm());
                }
            }
            if max_step < 1e-15 * bound {
                break;
            }
        }
        z
    }
}
