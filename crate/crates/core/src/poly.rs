//! Dense complex polynomials in the monomial basis.
//!
//! The coefficient vector length is the degree tag: a `Poly` with `k + 1`
//! coefficients is treated as a degree-`k` polynomial even when its top
//! coefficient vanishes. This matters for reversal, where the degree fixes the
//! reflection.

use std::ops::{Add, Index, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Poly {
    coeffs: Vec<Complex64>,
}

impl Poly {
    /// Builds a polynomial from `c₀, c₁, …`. An empty vector becomes the zero constant.
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        if coeffs.is_empty() {
            return Self::zero();
        }
        Poly { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn zero() -> Self {
        Poly {
            coeffs: vec![Complex64::new(0.0, 0.0)],
        }
    }

    pub fn one() -> Self {
        Poly {
            coeffs: vec![Complex64::new(1.0, 0.0)],
        }
    }

    /// The monomial `z^n`.
    pub fn monomial(n: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n + 1];
        coeffs[n] = Complex64::new(1.0, 0.0);
        Poly { coeffs }
    }

    /// `∏ (z − r)` for the given roots.
    pub fn from_roots(roots: &[Complex64]) -> Self {
        roots.iter().fold(Poly::one(), |acc, &r| {
            acc.mul_poly(&Poly::new(vec![-r, Complex64::new(1.0, 0.0)]))
        })
    }

    /// Tagged degree (`coeffs.len() − 1`).
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn leading(&self) -> Complex64 {
        self.coeffs[self.degree()]
    }

    /// Drops exactly-zero top coefficients (keeps at least the constant term).
    pub fn trimmed(&self) -> Poly {
        let mut c = self.coeffs.clone();
        while c.len() > 1 && c[c.len() - 1] == Complex64::new(0.0, 0.0) {
            c.pop();
        }
        Poly { coeffs: c }
    }

    /// Re-tags the polynomial at degree `n`, zero-padding as needed.
    pub fn padded(&self, n: usize) -> Result<Poly> {
        let trimmed = self.trimmed();
        if trimmed.degree() > n && trimmed.leading() != Complex64::new(0.0, 0.0) {
            return Err(Error::DegreeExceeded {
                needed: trimmed.degree(),
                available: n,
            });
        }
        let mut c = trimmed.coeffs;
        c.resize(n + 1, Complex64::new(0.0, 0.0));
        Ok(Poly { coeffs: c })
    }

    /// Horner evaluation.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Value and first derivative at `z` in one Horner pass.
    pub fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let zero = Complex64::new(0.0, 0.0);
        let mut p = zero;
        let mut dp = zero;
        for &c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    /// `d/dz`; the result carries degree `deg − 1` (the zero constant for constants).
    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() == 1 {
            return Poly::zero();
        }
        Poly {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(j, &c)| c * j as f64)
                .collect(),
        }
    }

    /// `zⁿ · conj(p(1/z̄))` at tag `n`: coefficient `c_j ↦ conj(c_{n−j})`.
    pub fn reversed(&self, n: usize) -> Result<Poly> {
        let p = self.padded(n)?;
        Ok(Poly {
            coeffs: p.coeffs.iter().rev().map(|c| c.conj()).collect(),
        })
    }

    /// Reversal at the polynomial's own tagged degree.
    pub fn star(&self) -> Poly {
        Poly {
            coeffs: self.coeffs.iter().rev().map(|c| c.conj()).collect(),
        }
    }

    /// Multiplication by `z^k`.
    pub fn shift(&self, k: usize) -> Poly {
        let mut c = vec![Complex64::new(0.0, 0.0); k];
        c.extend_from_slice(&self.coeffs);
        Poly { coeffs: c }
    }

    pub fn scale(&self, s: Complex64) -> Poly {
        Poly {
            coeffs: self.coeffs.iter().map(|&c| c * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Poly {
        Poly {
            coeffs: self.coeffs.iter().map(|&c| c * s).collect(),
        }
    }

    pub fn mul_poly(&self, other: &Poly) -> Poly {
        let mut c = vec![Complex64::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Poly { coeffs: c }
    }

    /// Largest coefficientwise modulus of `self − other` (degree tags may differ).
    pub fn max_abs_diff(&self, other: &Poly) -> f64 {
        let n = self.coeffs.len().max(other.coeffs.len());
        (0..n)
            .map(|j| (self[j] - other[j]).norm())
            .fold(0.0, f64::max)
    }

    /// Largest coefficient modulus.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// Out-of-range indices read as zero.
impl Index<usize> for Poly {
    type Output = Complex64;

    fn index(&self, j: usize) -> &Complex64 {
        const ZERO: Complex64 = Complex64::new(0.0, 0.0);
        self.coeffs.get(j).unwrap_or(&ZERO)
    }
}

fn zip_with(a: &Poly, b: &Poly, f: impl Fn(Complex64, Complex64) -> Complex64) -> Poly {
    let n = a.coeffs.len().max(b.coeffs.len());
    Poly {
        coeffs: (0..n).map(|j| f(a[j], b[j])).collect(),
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        zip_with(self, rhs, |a, b| a + b)
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        zip_with(self, rhs, |a, b| a - b)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale_real(-1.0)
    }
}

impl Mul<Complex64> for &Poly {
    type Output = Poly;
    fn mul(self, rhs: Complex64) -> Poly {
        self.scale(rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(Poly::from_real(&[3.0]).derivative(), Poly::zero());
        let d = Poly::monomial(5).derivative();
        assert_eq!(d, Poly::from_real(&[0.0, 0.0, 0.0, 0.0, 5.0]));
        // (1+z)^2 = 1 + 2z + z^2
        let d = Poly::from_real(&[1.0, 2.0, 1.0]).derivative();
        assert_eq!(d, Poly::from_real(&[2.0, 2.0]));
    }

    #[test]
    fn reversal_examples() {
        assert_eq!(Poly::monomial(4).reversed(4).unwrap(), Poly::from_real(&[1.0, 0.0, 0.0, 0.0, 0.0]));
        let p = Poly::new(vec![c(1.0, 0.0), c(0.0, 2.0)]);
        assert_eq!(p.reversed(1).unwrap(), Poly::new(vec![c(0.0, -2.0), c(1.0, 0.0)]));
        // reversal at a larger tag multiplies by a power of z
        assert_eq!(Poly::one().reversed(2).unwrap(), Poly::monomial(2));
    }

    #[test]
    fn reversal_rejects_degree_overflow() {
        let p = Poly::monomial(3);
        assert!(matches!(p.reversed(2), Err(Error::DegreeExceeded { .. })));
    }

    #[test]
    fn eval_and_derivative_agree_with_horner() {
        let p = Poly::new(vec![c(1.0, -1.0), c(0.5, 2.0), c(-3.0, 0.25)]);
        let z = c(0.3, -0.7);
        let (v, d) = p.eval_with_derivative(z);
        assert!((v - p.eval(z)).norm() < 1e-15);
        assert!((d - p.derivative().eval(z)).norm() < 1e-15);
    }

    #[test]
    fn from_roots_vanishes_at_roots() {
        let roots = [c(0.5, 0.0), c(-0.2, 0.3), c(0.0, -0.9)];
        let p = Poly::from_roots(&roots);
        assert_eq!(p.degree(), 3);
        for r in roots {
            assert!(p.eval(r).norm() < 1e-15);
        }
    }
}
