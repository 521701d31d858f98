//! Gauss–Jacobi rules on [−1, 1] from the Golub–Welsch eigenproblem.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::specialfn::gamma;

/// Nodes and weights for `∫₋₁¹ f(x) (1−x)^α (1+x)^β dx`.
#[derive(Debug, Clone)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

pub fn gauss_jacobi(n: usize, alpha: f64, beta: f64) -> Result<GaussRule> {
    if n == 0 {
        return Err(Error::InvalidParameter("Gauss rule needs at least one node".into()));
    }
    if alpha <= -1.0 || beta <= -1.0 {
        return Err(Error::InvalidParameter(format!(
            "Jacobi exponents must exceed -1 (got {alpha}, {beta})"
        )));
    }
    let ab = alpha + beta;
    let mut jac = DMatrix::<f64>::zeros(n, n);
    jac[(0, 0)] = (beta - alpha) / (ab + 2.0);
    for k in 1..n {
        let kf = k as f64;
        let s = 2.0 * kf + ab;
        jac[(k, k)] = (beta * beta - alpha * alpha) / (s * (s + 2.0));
        let b2 = if k == 1 {
            4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab).powi(2) * (3.0 + ab))
        } else {
            4.0 * kf * (kf + alpha) * (kf + beta) * (kf + ab) / (s * s * (s + 1.0) * (s - 1.0))
        };
        let b = b2.sqrt();
        jac[(k, k - 1)] = b;
        jac[(k - 1, k)] = b;
    }
    let mu0 = 2f64.powf(ab + 1.0) * gamma(alpha + 1.0)? * gamma(beta + 1.0)? / gamma(ab + 2.0)?;
    let eig = SymmetricEigen::new(jac);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (eig.eigenvalues[i], mu0 * v0 * v0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(GaussRule {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
    })
}
