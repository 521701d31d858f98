//! Gamma, Pochhammer and terminating Gauss hypergeometric evaluators, plus
//! the two reciprocal-Gamma convolution identities for the circular Jacobi
//! coefficients `c_m = (−n)_m (a+1)_m / ((−n−a)_m m!)`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numeric::{ComplexSum, NeumaierSum};

// Lanczos approximation with g = 671/128 and 14 terms, applied on [1, 2)
// after shifting the argument with the recurrence Γ(x+1) = xΓ(x).
const LANCZOS_G_HALF: f64 = 5.242_187_5;
const LANCZOS_C0: f64 = 0.999_999_999_999_997_1;
const LANCZOS_COF: [f64; 14] = [
    57.156_235_665_862_92,
    -59.597_960_355_475_49,
    14.136_097_974_741_747,
    -0.491_913_816_097_620_2,
    3.399_464_998_481_188_7e-5,
    4.652_362_892_704_857_6e-5,
    -9.837_447_530_487_956e-5,
    1.580_887_032_249_125e-4,
    -2.102_644_417_241_048_8e-4,
    2.174_396_181_152_126_4e-4,
    -1.643_181_065_367_639e-4,
    8.441_822_398_385_274e-5,
    -2.619_083_840_158_141e-5,
    3.689_918_265_953_162_5e-6,
];
const SQRT_TWO_PI: f64 = 2.506_628_274_631_000_5;

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.round()
}

fn lanczos(x: f64) -> f64 {
    let mut y = x;
    let mut ser = LANCZOS_C0;
    for c in LANCZOS_COF {
        y += 1.0;
        ser += c / y;
    }
    let tmp = x + LANCZOS_G_HALF;
    SQRT_TWO_PI * ser / x * tmp.powf(x + 0.5) * (-tmp).exp()
}

fn gamma_positive(x: f64) -> f64 {
    let mut y = x;
    let mut scale = 1.0;
    while y >= 2.0 {
        y -= 1.0;
        scale *= y;
    }
    while y < 1.0 {
        scale /= y;
        y += 1.0;
    }
    scale * lanczos(y)
}

/// Γ(x) for real `x`, using reflection below 1/2.
pub fn gamma(x: f64) -> Result<f64> {
    if x.is_nan() || is_nonpositive_integer(x) {
        return Err(Error::GammaPole(x));
    }
    if x == x.round() && x <= 171.0 {
        // exact factorials for positive integers
        return Ok((1..x as u64).fold(1.0, |acc, k| acc * k as f64));
    }
    if x < 0.5 {
        Ok(PI / ((PI * x).sin() * gamma_positive(1.0 - x)))
    } else {
        Ok(gamma_positive(x))
    }
}

/// 1/Γ(x), defined as exactly 0 at the poles `x ∈ {0, −1, −2, …}`.
pub fn rgamma(x: f64) -> f64 {
    if is_nonpositive_integer(x) {
        0.0
    } else {
        // gamma cannot fail off the poles
        1.0 / gamma(x).unwrap_or(f64::INFINITY)
    }
}

/// Rising factorial `(s)_n = s (s+1) ⋯ (s+n−1)`, with `(s)_0 = 1`.
pub fn pochhammer(s: f64, n: usize) -> f64 {
    (0..n).fold(1.0, |acc, j| acc * (s + j as f64))
}

/// Parameters of a terminating series `₂F₁(−n, b; c; z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HypParams {
    pub n: usize,
    pub b: f64,
    pub c: f64,
    pub z: Complex64,
}

impl HypParams {
    pub fn new(n: usize, b: f64, c: f64, z: Complex64) -> Self {
        HypParams { n, b, c, z }
    }

    fn check(&self) -> Result<()> {
        if is_nonpositive_integer(self.c) && self.c > -(self.n as f64) {
            return Err(Error::DenominatorPole {
                c: self.c,
                n: self.n,
            });
        }
        Ok(())
    }
}

/// Coefficients `(−n)_k (b)_k / ((c)_k k!)`, `k = 0..=n`, built by term ratios.
pub fn hyp2f1_coefficients(n: usize, b: f64, c: f64) -> Result<Vec<f64>> {
    HypParams::new(n, b, c, Complex64::new(0.0, 0.0)).check()?;
    let mut out = Vec::with_capacity(n + 1);
    let mut t = 1.0;
    out.push(t);
    for k in 0..n {
        let kf = k as f64;
        t *= (kf - n as f64) * (b + kf) / ((c + kf) * (kf + 1.0));
        out.push(t);
    }
    Ok(out)
}

/// `₂F₁(−n, b; c; z) = Σ_{k=0}^{n} (−n)_k (b)_k / ((c)_k k!) z^k`, summed in
/// increasing `k` with compensated accumulation.
pub fn hyp2f1_terminating(p: HypParams) -> Result<Complex64> {
    let coeffs = hyp2f1_coefficients(p.n, p.b, p.c)?;
    let mut acc = ComplexSum::new();
    let mut zk = Complex64::new(1.0, 0.0);
    for ck in coeffs {
        acc.add(zk * ck);
        zk *= p.z;
    }
    Ok(acc.value())
}

/// `c_m` for the circular Jacobi polynomial `₂F₁(−n, a+1; −n−a; z)`.
pub fn jacobi_coefficients(n: usize, a: f64) -> Vec<f64> {
    // −n−a is never a forbidden lower parameter for a > −1/2
    hyp2f1_coefficients(n, a + 1.0, -(n as f64) - a)
        .unwrap_or_else(|_| vec![f64::NAN; n + 1])
}

fn identity_sum(n: usize, k: usize, a: f64, weight: impl Fn(usize) -> f64) -> f64 {
    let c = jacobi_coefficients(n, a);
    let mut acc = NeumaierSum::new();
    for (m, cm) in c.iter().enumerate() {
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        let d = k as f64 - m as f64;
        acc.add(sign * weight(m) * cm * rgamma(d + a + 1.0) * rgamma(-d + a + 1.0));
    }
    acc.value()
}

fn identity_scale(n: usize, k: usize, a: f64) -> f64 {
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    // n!/Γ(n+a+1) as a product to avoid overflow
    let ratio = (1..=n).fold(rgamma(a + 1.0), |acc, j| acc * j as f64 / (j as f64 + a));
    sign * ratio * rgamma(a + 1.0)
}

/// Both sides of `Σ_m (−1)^m c_m / (Γ(k−m+a+1) Γ(m−k+a+1)) = (−1)^k n! / (Γ(a+1) Γ(n+a+1))`.
///
/// Requires `0 ≤ k ≤ n` and `a > −1/2`.
pub fn jacobi_sum_identity(n: usize, k: usize, a: f64) -> (f64, f64) {
    (identity_sum(n, k, a, |_| 1.0), identity_scale(n, k, a))
}

/// Both sides of the `m`-weighted companion:
/// `Σ_m (−1)^m m c_m / (Γ(k−m+a+1) Γ(m−k+a+1)) = (−1)^k (k + (2k−n)a) n! / (Γ(a+1) Γ(n+a+1))`.
pub fn weighted_jacobi_sum_identity(n: usize, k: usize, a: f64) -> (f64, f64) {
    let lhs = identity_sum(n, k, a, |m| m as f64);
    let factor = k as f64 + (2.0 * k as f64 - n as f64) * a;
    (lhs, factor * identity_scale(n, k, a))
}

/// Magnitude used to judge identity residuals when the right side vanishes:
/// `n! / |Γ(a+1) Γ(n+a+1)|`.
pub fn identity_magnitude(n: usize, a: f64) -> f64 {
    identity_scale(n, 0, a).abs()
}
