//! Szegő recursion, reversed and second-kind polynomials, moment/Verblunsky
//! conversion and Christoffel–Darboux kernels.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::MomentTable;
use crate::numeric::{ComplexDD, ComplexSum, DoubleDouble};
use crate::poly::Poly;
use crate::specialfn::hyp2f1_coefficients;

/// Levinson gives up once a coefficient reaches this distance from the circle.
pub const LEVINSON_MARGIN: f64 = 1e-10;

/// `ρ = √(1 − |α|²)`, factored to keep accuracy near the circle.
pub fn rho(a: Complex64) -> f64 {
    let m = a.norm();
    ((1.0 - m) * (1.0 + m)).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerblunskySeq {
    alpha: Vec<Complex64>,
}

impl VerblunskySeq {
    pub fn new(alpha: Vec<Complex64>) -> Result<Self> {
        for (index, a) in alpha.iter().enumerate() {
            let modulus = a.norm();
            if !(modulus < 1.0) {
                return Err(Error::OutsideDisk { index, modulus });
            }
        }
        Ok(VerblunskySeq { alpha })
    }

    pub fn from_pairs(pairs: &[[f64; 2]]) -> Result<Self> {
        Self::new(pairs.iter().map(|p| Complex64::new(p[0], p[1])).collect())
    }

    pub fn to_pairs(&self) -> Vec<[f64; 2]> {
        self.alpha.iter().map(|a| [a.re, a.im]).collect()
    }

    /// All-zero coefficients of length `n`.
    pub fn free(n: usize) -> Self {
        VerblunskySeq {
            alpha: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    pub fn constant(a: Complex64, n: usize) -> Result<Self> {
        Self::new(vec![a; n])
    }

    /// `α_j = 2^{−(j+1)}`.
    pub fn baxter(n: usize) -> Self {
        VerblunskySeq {
            alpha: (0..n).map(|j| Complex64::new(0.5f64.powi(j as i32 + 1), 0.0)).collect(),
        }
    }

    /// Sparse sequence with `α_{N_k − 1} = (k+1)^{−1/2}` at `N_k = 2^k`,
    /// `k ≥ 1`, and zero elsewhere.
    pub fn sparse(n: usize) -> Self {
        let mut alpha = vec![Complex64::new(0.0, 0.0); n];
        let mut k = 1u32;
        while (1usize << k) - 1 < n {
            alpha[(1usize << k) - 1] = Complex64::new(1.0 / ((k + 1) as f64).sqrt(), 0.0);
            k += 1;
        }
        VerblunskySeq { alpha }
    }

    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }

    /// `α_j`, zero past the stored length.
    pub fn get(&self, j: usize) -> Complex64 {
        self.alpha.get(j).copied().unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.alpha
    }

    pub fn negated(&self) -> Self {
        VerblunskySeq {
            alpha: self.alpha.iter().map(|a| -a).collect(),
        }
    }

    /// Copy padded with zeros (or cut) to length `n`.
    pub fn resized(&self, n: usize) -> Self {
        VerblunskySeq {
            alpha: (0..n).map(|j| self.get(j)).collect(),
        }
    }
}

/// Monic polynomials `Φ_0..Φ_N`, their reversals and norms.
#[derive(Debug, Clone, PartialEq)]
pub struct OpucBasis {
    monic: Vec<Poly>,
    monic_star: Vec<Poly>,
    monic_norms: Vec<f64>,
    alpha: VerblunskySeq,
}

impl OpucBasis {
    /// Highest degree `N` available.
    pub fn max_degree(&self) -> usize {
        self.monic.len() - 1
    }

    pub fn alpha(&self) -> &VerblunskySeq {
        &self.alpha
    }

    pub fn monic(&self, n: usize) -> &Poly {
        &self.monic[n]
    }

    pub fn monic_star(&self, n: usize) -> &Poly {
        &self.monic_star[n]
    }

    /// `‖Φ_n‖ = ∏_{j<n} ρ_j`.
    pub fn monic_norm(&self, n: usize) -> f64 {
        self.monic_norms[n]
    }

    pub fn monic_norms(&self) -> &[f64] {
        &self.monic_norms
    }

    /// `φ_n = Φ_n / ‖Φ_n‖`.
    pub fn orthonormal(&self, n: usize) -> Poly {
        self.monic[n].scale_real(1.0 / self.monic_norms[n])
    }

    pub fn orthonormal_star(&self, n: usize) -> Poly {
        self.monic_star[n].scale_real(1.0 / self.monic_norms[n])
    }

    fn check_degree(&self, n: usize) -> Result<()> {
        if n > self.max_degree() {
            return Err(Error::DegreeExceeded {
                needed: n,
                available: self.max_degree(),
            });
        }
        Ok(())
    }

    /// `(φ_j(z), φ_j*(z))` for `j = 0..=n`, by running the recursion on values.
    pub fn orthonormal_values(&self, z: Complex64, n: usize) -> Result<Vec<(Complex64, Complex64)>> {
        self.check_degree(n)?;
        let mut out = Vec::with_capacity(n + 1);
        let mut p = Complex64::new(1.0, 0.0);
        let mut ps = Complex64::new(1.0, 0.0);
        for j in 0..=n {
            out.push((p / self.monic_norms[j], ps / self.monic_norms[j]));
            let a = self.alpha.get(j);
            let zp = z * p;
            p = zp - a.conj() * ps;
            ps -= a * zp;
        }
        Ok(out)
    }

    /// Serializable dump: coefficients as `[re, im]` pairs per degree.
    pub fn dump(&self) -> BasisDump {
        let pairs = |p: &Poly| p.coeffs().iter().map(|c| [c.re, c.im]).collect();
        BasisDump {
            alpha: self.alpha.to_pairs(),
            norms: self.monic_norms.clone(),
            monic: self.monic.iter().map(pairs).collect(),
            monic_star: self.monic_star.iter().map(pairs).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisDump {
    pub alpha: Vec<[f64; 2]>,
    pub norms: Vec<f64>,
    pub monic: Vec<Vec<[f64; 2]>>,
    pub monic_star: Vec<Vec<[f64; 2]>>,
}

/// `Φ*_{n+1} = Φ*_n − z α_n Φ_n`, with `Φ_{n+1}` read off by reversal.
pub fn szego_forward(alpha: &VerblunskySeq) -> Result<OpucBasis> {
    let alpha = VerblunskySeq::new(alpha.as_slice().to_vec())?;
    let n = alpha.len();
    let mut monic = Vec::with_capacity(n + 1);
    let mut monic_star = Vec::with_capacity(n + 1);
    let mut norms = Vec::with_capacity(n + 1);
    monic.push(Poly::one());
    monic_star.push(Poly::one());
    norms.push(1.0);
    for (j, &a) in alpha.as_slice().iter().enumerate() {
        let next_star = &monic_star[j].padded(j + 1)? - &monic[j].shift(1).scale(a);
        debug_assert_eq!(next_star[0], Complex64::new(1.0, 0.0));
        monic.push(next_star.star());
        monic_star.push(next_star);
        norms.push(norms[j] * rho(a));
    }
    Ok(OpucBasis {
        monic,
        monic_star,
        monic_norms: norms,
        alpha,
    })
}

/// `zⁿ conj(p(1/z̄))`.
pub fn reverse_poly(p: &Poly, n: usize) -> Result<Poly> {
    p.reversed(n)
}

pub fn poly_derivative(p: &Poly) -> Poly {
    p.derivative()
}

/// Both sides of `n p = z p′ + [(p*)′]*`, where `*` is taken at degree `n`
/// inside and `n − 1` outside.
pub fn reversal_derivative_identity(p: &Poly) -> (Poly, Poly) {
    let n = p.degree();
    let lhs = p.scale_real(n as f64);
    if n == 0 {
        return (lhs, Poly::zero());
    }
    let zp = p.derivative().shift(1);
    // p.star() has degree n, so its derivative has degree n − 1
    let tail = p.star().derivative().star();
    (lhs, &zp + &tail)
}

/// Basis for the sign-flipped coefficients `−α_n`.
pub fn second_kind(alpha: &VerblunskySeq) -> Result<OpucBasis> {
    szego_forward(&alpha.negated())
}

/// Recovers `α_0..α_{N−1}` from moments by running the recursion in
/// coefficient space: `conj(α_n) = ⟨1, zΦ_n⟩ / ‖Φ_n‖²`.
pub fn levinson(mt: &MomentTable, n: usize) -> Result<VerblunskySeq> {
    let (seq, err) = levinson_prefix(mt, n, LEVINSON_MARGIN);
    match err {
        Some(e) => Err(e),
        None => Ok(seq),
    }
}

/// Like [`levinson`], but returns the coefficients found before a failure
/// together with the failure.
pub fn levinson_prefix(mt: &MomentTable, n: usize, margin: f64) -> (VerblunskySeq, Option<Error>) {
    let mut alpha = Vec::with_capacity(n);
    if n > mt.k_max() {
        let err = Error::DegreeExceeded {
            needed: n,
            available: mt.k_max(),
        };
        return (VerblunskySeq { alpha }, Some(err));
    }
    // carried in double-double: the Toeplitz systems of gapped measures lose
    // about one digit per degree
    let one = ComplexDD::from_c64(Complex64::new(1.0, 0.0));
    let mut phi = vec![one];
    let mut phi_star = vec![one];
    let mut energy = DoubleDouble::from_f64(mt.get(0).re);
    for deg in 0..n {
        if !(energy.hi > 0.0) {
            let err = Error::NotPositiveDefinite {
                degree: deg,
                modulus: f64::NAN,
            };
            return (VerblunskySeq { alpha }, Some(err));
        }
        let defect = phi
            .iter()
            .enumerate()
            .fold(ComplexDD::ZERO, |acc, (k, c)| acc.add(c.mul(ComplexDD::from_c64(mt.get(k as i64 + 1)))));
        let a = defect.div_real(energy).conj();
        let modulus = a.to_c64().norm();
        if !(modulus < 1.0 - margin) {
            let err = Error::NotPositiveDefinite { degree: deg, modulus };
            return (VerblunskySeq { alpha }, Some(err));
        }
        let mut next_star = phi_star.clone();
        next_star.push(ComplexDD::ZERO);
        for (k, c) in phi.iter().enumerate() {
            next_star[k + 1] = next_star[k + 1].sub(a.mul(*c));
        }
        phi = next_star.iter().rev().map(|c| c.conj()).collect();
        phi_star = next_star;
        energy = energy.mul(DoubleDouble::from_f64(1.0).sub(a.norm_sqr()));
        alpha.push(a.to_c64());
    }
    (VerblunskySeq { alpha }, None)
}

/// Moments `γ_0..γ_K` of the measure with the given coefficients (zero past
/// the stored length): `γ_{n+1} = conj(α_n)‖Φ_n‖² − Σ_{k<n} c_k γ_{k+1}`.
pub fn moments_from_verblunsky(alpha: &VerblunskySeq, k_max: usize) -> Result<MomentTable> {
    let alpha = VerblunskySeq::new(alpha.as_slice().to_vec())?;
    let mut gamma = Vec::with_capacity(k_max + 1);
    gamma.push(Complex64::new(1.0, 0.0));
    let mut phi = Poly::one();
    let mut phi_star = Poly::one();
    let mut energy = 1.0;
    for deg in 0..k_max {
        let a = alpha.get(deg);
        let partial: ComplexSum = phi.coeffs()[..deg]
            .iter()
            .enumerate()
            .map(|(k, c)| c * gamma[k + 1])
            .collect();
        gamma.push(a.conj() * energy - partial.value());
        let next_star = &phi_star.padded(deg + 1)? - &phi.shift(1).scale(a);
        phi = next_star.star();
        phi_star = next_star;
        energy *= rho(a).powi(2);
    }
    Ok(MomentTable::from_nonnegative(&gamma))
}

/// `K_{n−1}(z, w) = Σ_{j<n} φ_j(z) conj(φ_j(w))`.
pub fn cd_kernel(basis: &OpucBasis, z: Complex64, w: Complex64, n: usize) -> Result<Complex64> {
    if n == 0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let vz = basis.orthonormal_values(z, n - 1)?;
    let vw = basis.orthonormal_values(w, n - 1)?;
    let acc: ComplexSum = vz.iter().zip(&vw).map(|(a, b)| a.0 * b.0.conj()).collect();
    Ok(acc.value())
}

/// `K_{n−1}(·, w)` as a polynomial of degree `n − 1` in the first slot.
pub fn cd_kernel_poly(basis: &OpucBasis, w: Complex64, n: usize) -> Result<Poly> {
    if n == 0 {
        return Ok(Poly::zero());
    }
    let vw = basis.orthonormal_values(w, n - 1)?;
    let mut acc = Poly::new(vec![Complex64::new(0.0, 0.0); n]);
    for (j, v) in vw.iter().enumerate() {
        acc = &acc + &basis.orthonormal(j).scale(v.0.conj());
    }
    Ok(acc)
}

/// Closed-form orthonormal `φ_n*` of the circular Jacobi weight,
/// `∏_{j<n} (a+1+j)/√((j+1)(2a+1+j)) · ₂F₁(−n, a; −n−a; z)`.
pub fn cjacobi_orthonormal_star(a: f64, n: usize) -> Result<Poly> {
    let coeffs = hyp2f1_coefficients(n, a, -(n as f64) - a)?;
    let pref = (0..n).fold(1.0, |acc, j| {
        let j = j as f64;
        acc * (a + 1.0 + j) / ((j + 1.0) * (2.0 * a + 1.0 + j)).sqrt()
    });
    Ok(Poly::from_real(&coeffs.iter().map(|c| c * pref).collect::<Vec<_>>()))
}

/// Closed-form orthonormal `φ_n` of the circular Jacobi weight (reversal of
/// [`cjacobi_orthonormal_star`]).
pub fn cjacobi_orthonormal(a: f64, n: usize) -> Result<Poly> {
    Ok(cjacobi_orthonormal_star(a, n)?.star())
}
