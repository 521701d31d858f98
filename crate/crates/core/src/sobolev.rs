//! The monic minimizer of `‖p‖² + (λ/n²)‖p′‖²` over degree-`n` polynomials.

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{norm_sq, MomentTable};
use crate::opuc::OpucBasis;
use crate::poly::Poly;

/// Gram matrices beyond this condition number are reported as singular.
pub const MAX_GRAM_CONDITION: f64 = 1e13;

fn check(mt: &MomentTable, lambda: f64, n: usize) -> Result<()> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidParameter(format!("lambda must be positive, got {lambda}")));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("Sobolev degree must be >= 1".into()));
    }
    if n > mt.k_max() {
        return Err(Error::DegreeExceeded {
            needed: n,
            available: mt.k_max(),
        });
    }
    Ok(())
}

/// `G_{jk} = γ_{k−j} (1 + λ jk / n²)` for `0 ≤ j, k ≤ n`.
pub fn sobolev_gram(mt: &MomentTable, lambda: f64, n: usize) -> Result<DMatrix<Complex64>> {
    check(mt, lambda, n)?;
    let w = lambda / (n * n) as f64;
    Ok(DMatrix::from_fn(n + 1, n + 1, |j, k| {
        mt.get(k as i64 - j as i64) * (1.0 + w * (j * k) as f64)
    }))
}

/// `‖p‖² + (λ/n²)‖p′‖²`.
pub fn sobolev_norm_sq(p: &Poly, mt: &MomentTable, lambda: f64, n: usize) -> Result<f64> {
    Ok(norm_sq(p, mt)? + lambda / (n * n) as f64 * norm_sq(&p.derivative(), mt)?)
}

/// Ratio of extreme eigenvalues of a Hermitian matrix.
pub fn condition_number(g: &DMatrix<Complex64>) -> f64 {
    let eig = SymmetricEigen::new(g.clone());
    let (lo, hi) = eig
        .eigenvalues
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    if lo <= 0.0 {
        f64::INFINITY
    } else {
        hi / lo
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SobolevSolution {
    pub lambda: f64,
    pub n: usize,
    /// Monic minimizer of degree `n`.
    pub s: Poly,
    pub sigma: f64,
    pub gram_condition: f64,
}

impl SobolevSolution {
    pub fn sigma2(&self) -> f64 {
        self.sigma * self.sigma
    }
}

pub fn sobolev_min(mt: &MomentTable, lambda: f64, n: usize) -> Result<SobolevSolution> {
    let g = sobolev_gram(mt, lambda, n)?;
    let gram_condition = condition_number(&g);
    if !(gram_condition <= MAX_GRAM_CONDITION) {
        return Err(Error::SingularGram {
            condition: gram_condition,
        });
    }
    let a = g.view((0, 0), (n, n)).into_owned();
    let b: DVector<Complex64> = g.view((0, n), (n, 1)).column(0).into_owned();
    let chol = Cholesky::new(a.clone()).ok_or(Error::SingularGram {
        condition: gram_condition,
    })?;
    let rhs = -&b;
    let mut c = chol.solve(&rhs);
    let residual = &rhs - &a * &c;
    c += chol.solve(&residual);
    let mut coeffs: Vec<Complex64> = c.iter().copied().collect();
    coeffs.push(Complex64::new(1.0, 0.0));
    let s = Poly::new(coeffs);
    let sigma2 = sobolev_norm_sq(&s, mt, lambda, n)?;
    if !(sigma2 > 0.0) || !sigma2.is_finite() {
        return Err(Error::SingularGram {
            condition: gram_condition,
        });
    }
    Ok(SobolevSolution {
        lambda,
        n,
        s,
        sigma: sigma2.sqrt(),
        gram_condition,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SobolevCheck {
    /// `σ_n² / ‖Φ_n‖²`.
    pub ratio: f64,
    /// `‖Φ_n‖²_S − σ_n²`.
    pub defect: f64,
    /// `‖S_n − Φ_n‖²_S` evaluated directly.
    pub defect_direct: f64,
    /// `S_n(z) / Φ_n(z)` at the exterior point.
    pub ext_ratio: Complex64,
}

pub fn sobolev_ratio_check(
    mt: &MomentTable,
    basis: &OpucBasis,
    sol: &SobolevSolution,
    z_ext: Complex64,
) -> Result<SobolevCheck> {
    let (lambda, n) = (sol.lambda, sol.n);
    if n > basis.max_degree() {
        return Err(Error::DegreeExceeded {
            needed: n,
            available: basis.max_degree(),
        });
    }
    let phi = basis.monic(n);
    let phi_s = sobolev_norm_sq(phi, mt, lambda, n)?;
    Ok(SobolevCheck {
        ratio: sol.sigma2() / basis.monic_norm(n).powi(2),
        defect: phi_s - sol.sigma2(),
        defect_direct: sobolev_norm_sq(&(&sol.s - phi), mt, lambda, n)?,
        ext_ratio: sol.s.eval(z_ext) / phi.eval(z_ext),
    })
}

pub const SOBOLEV_HEADER: [&str; 5] = ["n", "lambda", "sigma2", "ratio", "defect"];
