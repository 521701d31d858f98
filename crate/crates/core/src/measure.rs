//! Probability measures on the unit circle: weight families, atoms, moment
//! tables and uniform quadrature.
//!
//! Moments follow `γ_k = ∫ e^{ikθ} dμ(θ)` and the inner product is
//! `⟨f, g⟩ = ∫ conj(f) g dμ`, so the Toeplitz entry `(j, k)` is `γ_{k−j}`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{ComplexDot, ComplexSum};
use crate::opuc::{self, VerblunskySeq};
use crate::poly::Poly;
use crate::quadrature::gauss_jacobi;
use crate::specialfn::{gamma, rgamma};

const LOCATION_TOL: f64 = 1e-12;

/// A point mass at `e^{iθ}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub theta: f64,
    pub mass: f64,
}

/// A singular point `e^{iθ}` of a generalized Jacobi weight with factor
/// `|e^{iθ'} − e^{iθ}|^{2·exponent}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingularPoint {
    pub theta: f64,
    #[serde(alias = "a")]
    pub exponent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "snake_case")]
pub enum Family {
    Lebesgue,
    /// `∝ |1 − e^{iθ}|^{2a}`.
    Cjacobi { a: f64 },
    /// `∝ g(θ) ∏ |e^{iθ} − e^{iθ_k}|^{2a_k}`, with `g` a positive trigonometric
    /// polynomial given by its Fourier coefficients `ĝ_0, ĝ_1, …` as `[re, im]`
    /// pairs (`ĝ_{−j} = conj(ĝ_j)`); an empty list means `g ≡ 1`.
    GeneralizedJacobi {
        points: Vec<SingularPoint>,
        #[serde(default)]
        g: Vec<[f64; 2]>,
    },
    /// Uniform on the arc `δ ≤ θ ≤ 2π − δ`.
    ArcUniform { delta: f64 },
    /// The measure whose Verblunsky coefficients are the given `[re, im]`
    /// pairs followed by zeros.
    VerblunskyGiven { alpha: Vec<[f64; 2]> },
}

/// A weight family plus atoms. Atom masses are final (already normalized);
/// the weight carries the remaining mass `1 − Σ mass`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureSpec {
    #[serde(flatten)]
    pub family: Family,
    #[serde(default)]
    pub atoms: Vec<Atom>,
}

impl MeasureSpec {
    pub fn new(family: Family) -> Self {
        MeasureSpec {
            family,
            atoms: Vec::new(),
        }
    }

    pub fn lebesgue() -> Self {
        Self::new(Family::Lebesgue)
    }

    pub fn cjacobi(a: f64) -> Self {
        Self::new(Family::Cjacobi { a })
    }

    pub fn arc_uniform(delta: f64) -> Self {
        Self::new(Family::ArcUniform { delta })
    }

    pub fn generalized_jacobi(points: Vec<SingularPoint>) -> Self {
        Self::new(Family::GeneralizedJacobi { points, g: Vec::new() })
    }

    pub fn verblunsky_given(alpha: &[Complex64]) -> Self {
        Self::new(Family::VerblunskyGiven {
            alpha: alpha.iter().map(|a| [a.re, a.im]).collect(),
        })
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let m: MeasureSpec =
            serde_json::from_str(s).map_err(|e| Error::InvalidParameter(format!("measure JSON: {e}")))?;
        m.validate()?;
        Ok(m)
    }

    pub fn to_json(&self) -> String {
        // plain data, serialization cannot fail
        serde_json::to_string(self).unwrap_or_default()
    }

    /// Mass carried by the absolutely continuous part.
    pub fn weight_mass(&self) -> f64 {
        1.0 - self.atoms.iter().map(|a| a.mass).sum::<f64>()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        match &self.family {
            Family::Lebesgue => {}
            Family::Cjacobi { a } => {
                if !(*a > -0.5) {
                    return bad(format!("cjacobi requires a > -1/2, got {a}"));
                }
            }
            Family::GeneralizedJacobi { points, g } => {
                if points.is_empty() {
                    return bad("generalized_jacobi needs at least one singular point".into());
                }
                for p in points {
                    if !(p.exponent > -0.5) {
                        return bad(format!("singular exponent must exceed -1/2, got {}", p.exponent));
                    }
                    if !p.theta.is_finite() {
                        return bad("singular point location must be finite".into());
                    }
                }
                let sorted = sorted_points(points);
                for w in sorted.windows(2) {
                    if w[1].theta - w[0].theta < LOCATION_TOL {
                        return bad(format!("singular points repeat at theta = {}", w[0].theta));
                    }
                }
                if sorted.len() > 1 && sorted[0].theta + TAU - sorted[sorted.len() - 1].theta < LOCATION_TOL {
                    return bad("singular points repeat across 0".into());
                }
                if let Some(first) = g.first() {
                    if first[1] != 0.0 {
                        return bad("constant Fourier coefficient of g must be real".into());
                    }
                    let m = 4096.max(64 * g.len());
                    let min = circle_grid(m).map(|th| lipschitz_factor(g, th)).fold(f64::INFINITY, f64::min);
                    if !(min > 0.0) {
                        return bad(format!("g must be strictly positive (grid minimum {min})"));
                    }
                }
            }
            Family::ArcUniform { delta } => {
                if !(*delta > 0.0 && *delta < PI) {
                    return bad(format!("arc_uniform requires 0 < delta < pi, got {delta}"));
                }
            }
            Family::VerblunskyGiven { alpha } => {
                VerblunskySeq::from_pairs(alpha)?;
            }
        }
        let mut total = 0.0;
        for a in &self.atoms {
            if !(a.mass > 0.0) {
                return bad(format!("atom mass must be positive, got {}", a.mass));
            }
            if !(0.0..TAU).contains(&a.theta) {
                return bad(format!("atom location must lie in [0, 2pi), got {}", a.theta));
            }
            total += a.mass;
        }
        for (i, a) in self.atoms.iter().enumerate() {
            for b in &self.atoms[i + 1..] {
                if circular_distance(a.theta, b.theta) < LOCATION_TOL {
                    return bad(format!("atoms repeat at theta = {}", a.theta));
                }
            }
        }
        if total >= 1.0 {
            return bad(format!("atom masses sum to {total}, leaving no mass for the weight"));
        }
        Ok(())
    }
}

/// Hermitian table `γ_{−K}, …, γ_K`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentTable {
    k_max: usize,
    gamma: Vec<Complex64>,
}

impl MomentTable {
    /// Builds the table from `γ_0, …, γ_K`; negative indices are conjugates.
    pub fn from_nonnegative(nonneg: &[Complex64]) -> Self {
        let k_max = nonneg.len().saturating_sub(1);
        let mut gamma = Vec::with_capacity(2 * k_max + 1);
        gamma.extend(nonneg[1..].iter().rev().map(|g| g.conj()));
        gamma.extend_from_slice(nonneg);
        MomentTable { k_max, gamma }
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    /// `γ_k` for `|k| ≤ K`.
    pub fn get(&self, k: i64) -> Complex64 {
        self.gamma[(k + self.k_max as i64) as usize]
    }

    pub fn try_get(&self, k: i64) -> Result<Complex64> {
        if k.unsigned_abs() as usize > self.k_max {
            return Err(Error::DegreeExceeded {
                needed: k.unsigned_abs() as usize,
                available: self.k_max,
            });
        }
        Ok(self.get(k))
    }

    /// `γ_{−K}, …, γ_K` in order.
    pub fn values(&self) -> &[Complex64] {
        &self.gamma
    }

    pub fn nonnegative(&self) -> &[Complex64] {
        &self.gamma[self.k_max..]
    }

    pub fn truncated(&self, k: usize) -> Result<MomentTable> {
        if k > self.k_max {
            return Err(Error::DegreeExceeded {
                needed: k,
                available: self.k_max,
            });
        }
        Ok(Self::from_nonnegative(&self.nonnegative()[..=k]))
    }

    /// Moments of `(μ + t δ_{θ0}) / (1 + t)`.
    pub fn with_mass_point(&self, theta0: f64, t: f64) -> MomentTable {
        let s = 1.0 / (1.0 + t);
        let nonneg: Vec<Complex64> = self
            .nonnegative()
            .iter()
            .enumerate()
            .map(|(k, g)| (g + Complex64::from_polar(t, k as f64 * theta0)) * s)
            .collect();
        Self::from_nonnegative(&nonneg)
    }

    /// Moments of the measure rotated so that `e^{iθ0}` moves to 1:
    /// `γ_k ↦ e^{−ikθ0} γ_k`.
    pub fn rotated(&self, theta0: f64) -> MomentTable {
        let nonneg: Vec<Complex64> = self
            .nonnegative()
            .iter()
            .enumerate()
            .map(|(k, g)| g * Complex64::from_polar(1.0, -(k as f64) * theta0))
            .collect();
        Self::from_nonnegative(&nonneg)
    }
}

/// `γ_k` of the circular Jacobi weight, `(−1)^k Γ(a+1)² / (Γ(k+a+1) Γ(−k+a+1))`.
///
/// Evaluated as the product `∏_{j<|k|} (j−a)/(j+a+1)`, which is exactly zero
/// once a factor `j = a` appears.
pub fn cjacobi_moment(a: f64, k: i64) -> Complex64 {
    let m = k.unsigned_abs();
    let v = (0..m).fold(1.0, |acc, j| acc * (j as f64 - a) / (j as f64 + a + 1.0));
    Complex64::new(v, 0.0)
}

/// Constant that makes `|1 − e^{iθ}|^{2a}` a unit weight for `dθ/2π`.
pub fn cjacobi_normalization(a: f64) -> Result<f64> {
    Ok(gamma(a + 1.0)?.powi(2) * rgamma(2.0 * a + 1.0))
}

pub fn moment_table(m: &MeasureSpec, k_max: usize) -> Result<MomentTable> {
    m.validate()?;
    let weight = weight_moments(&m.family, k_max)?;
    let wm = m.weight_mass();
    let nonneg = (0..=k_max)
        .map(|k| {
            let mut acc = ComplexSum::new();
            acc.add(weight[k] * wm);
            for a in &m.atoms {
                acc.add(Complex64::from_polar(a.mass, k as f64 * a.theta));
            }
            acc.value()
        })
        .collect::<Vec<_>>();
    Ok(MomentTable::from_nonnegative(&nonneg))
}

fn weight_moments(family: &Family, k_max: usize) -> Result<Vec<Complex64>> {
    let one = Complex64::new(1.0, 0.0);
    Ok(match family {
        Family::Lebesgue => {
            let mut v = vec![Complex64::new(0.0, 0.0); k_max + 1];
            v[0] = one;
            v
        }
        Family::Cjacobi { a } => (0..=k_max as i64).map(|k| cjacobi_moment(*a, k)).collect(),
        Family::ArcUniform { delta } => (0..=k_max)
            .map(|k| {
                if k == 0 {
                    one
                } else {
                    let kf = k as f64;
                    Complex64::new(-(kf * delta).sin() / (kf * (PI - delta)), 0.0)
                }
            })
            .collect(),
        Family::VerblunskyGiven { alpha } => {
            let seq = VerblunskySeq::from_pairs(alpha)?;
            opuc::moments_from_verblunsky(&seq, k_max)?.nonnegative().to_vec()
        }
        Family::GeneralizedJacobi { points, g } => generalized_jacobi_moments(points, g, k_max)?.0,
    })
}

fn sorted_points(points: &[SingularPoint]) -> Vec<SingularPoint> {
    let mut p: Vec<SingularPoint> = points
        .iter()
        .map(|p| SingularPoint {
            theta: p.theta.rem_euclid(TAU),
            exponent: p.exponent,
        })
        .collect();
    p.sort_by(|a, b| a.theta.total_cmp(&b.theta));
    p
}

fn lipschitz_factor(g: &[[f64; 2]], theta: f64) -> f64 {
    if g.is_empty() {
        return 1.0;
    }
    let mut v = g[0][0];
    for (j, c) in g.iter().enumerate().skip(1) {
        let e = Complex64::from_polar(1.0, j as f64 * theta);
        v += 2.0 * (Complex64::new(c[0], c[1]) * e).re;
    }
    v
}

/// Unnormalized generalized Jacobi density `g(θ) ∏ |2 sin((θ−θ_k)/2)|^{2a_k}`.
fn generalized_jacobi_raw(points: &[SingularPoint], g: &[[f64; 2]], theta: f64) -> f64 {
    points
        .iter()
        .map(|p| (2.0 * ((theta - p.theta) / 2.0).sin()).abs().powf(2.0 * p.exponent))
        .product::<f64>()
        * lipschitz_factor(g, theta)
}

/// Normalized moments `γ_0..γ_K` and the normalization constant.
///
/// The circle is cut at the singular points; on each arc the endpoint
/// singularities are absorbed into a Gauss–Jacobi rule and the remaining
/// factor is smooth.
fn generalized_jacobi_moments(
    points: &[SingularPoint],
    g: &[[f64; 2]],
    k_max: usize,
) -> Result<(Vec<Complex64>, f64)> {
    let pts = sorted_points(points);
    let np = pts.len();
    let mut sums: Vec<ComplexSum> = (0..=k_max).map(|_| ComplexSum::new()).collect();
    for i in 0..np {
        let left = pts[i];
        let right = pts[(i + 1) % np];
        let theta_l = left.theta;
        let theta_r = if i + 1 < np { right.theta } else { right.theta + TAU };
        let len = theta_r - theta_l;
        let half = len / 2.0;
        let mid = theta_l + half;
        let nodes = 64.max((k_max as f64 * len / 2.0).ceil() as usize + 48);
        let rule = gauss_jacobi(nodes, 2.0 * right.exponent, 2.0 * left.exponent)?;
        let scale = half.powf(1.0 + 2.0 * left.exponent + 2.0 * right.exponent) / TAU;
        for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
            let theta = mid + half * x;
            let dl = half * (1.0 + x);
            let dr = half * (1.0 - x);
            let mut h = lipschitz_factor(g, theta);
            for (j, p) in pts.iter().enumerate() {
                let mut d = 1.0;
                if j == i {
                    d *= dl;
                }
                if j == (i + 1) % np {
                    d *= dr;
                }
                h *= ((2.0 * ((theta - p.theta) / 2.0).sin()).abs() / d).powf(2.0 * p.exponent);
            }
            let step = Complex64::from_polar(1.0, theta);
            let mut zk = Complex64::new(scale * w * h, 0.0);
            for s in sums.iter_mut() {
                s.add(zk);
                zk *= step;
            }
        }
    }
    let raw: Vec<Complex64> = sums.iter().map(|s| s.value()).collect();
    let total = raw[0].re;
    let mut out: Vec<Complex64> = raw.iter().map(|v| v / total).collect();
    out[0] = Complex64::new(1.0, 0.0);
    Ok((out, 1.0 / total))
}

/// `(μ + t δ_{θ0}) / (1 + t)`; an atom already at `θ0` absorbs the new mass.
pub fn add_mass_point(m: &MeasureSpec, theta0: f64, t: f64) -> Result<MeasureSpec> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidParameter(format!("mass t must be positive, got {t}")));
    }
    let theta0 = theta0.rem_euclid(TAU);
    let s = 1.0 / (1.0 + t);
    let mut atoms: Vec<Atom> = m
        .atoms
        .iter()
        .map(|a| Atom {
            theta: a.theta,
            mass: a.mass * s,
        })
        .collect();
    match atoms.iter_mut().find(|a| circular_distance(a.theta, theta0) < LOCATION_TOL) {
        Some(a) => a.mass += t * s,
        None => atoms.push(Atom {
            theta: theta0,
            mass: t * s,
        }),
    }
    Ok(MeasureSpec {
        family: m.family.clone(),
        atoms,
    })
}

/// `Σ_{j,k} conj(p_j) q_k γ_{k−j}`.
pub fn inner_product_poly(p: &Poly, q: &Poly, mt: &MomentTable) -> Result<Complex64> {
    let (dp, dq) = (p.degree(), q.degree());
    if dp > mt.k_max() || dq > mt.k_max() {
        return Err(Error::DegreeExceeded {
            needed: dp.max(dq),
            available: mt.k_max(),
        });
    }
    let mut acc = ComplexDot::new();
    for (j, pj) in p.coeffs().iter().enumerate() {
        if *pj == Complex64::new(0.0, 0.0) {
            continue;
        }
        let mut row = ComplexDot::new();
        for (k, qk) in q.coeffs().iter().enumerate() {
            row.add_product(*qk, mt.get(k as i64 - j as i64));
        }
        acc.add_product(pj.conj(), row.value());
    }
    Ok(acc.value())
}

/// `‖p‖²` in `L²(μ)`.
pub fn norm_sq(p: &Poly, mt: &MomentTable) -> Result<f64> {
    Ok(inner_product_poly(p, p, mt)?.re)
}

/// Offset grid `θ_i = 2π(i + 1/2)/M`.
pub fn circle_grid(m: usize) -> impl Iterator<Item = f64> {
    (0..m).map(move |i| TAU * (i as f64 + 0.5) / m as f64)
}

/// `∫ f dθ/2π` by the `M`-node trapezoid rule on the offset grid.
pub fn quadrature_integral(f: impl Fn(f64) -> Complex64, m: usize) -> Result<Complex64> {
    if m < 16 {
        return Err(Error::InvalidParameter(format!("quadrature needs M >= 16, got {m}")));
    }
    let acc: ComplexSum = circle_grid(m).map(f).collect();
    Ok(acc.value() / m as f64)
}

/// Density of the absolutely continuous part with respect to `dθ/2π`.
pub fn weight_eval(m: &MeasureSpec, theta: f64) -> Result<f64> {
    WeightDensity::new(m)?.eval(theta)
}

/// [`weight_eval`] with the family's normalization computed once.
#[derive(Debug, Clone)]
pub struct WeightDensity {
    family: Family,
    scale: f64,
    star: Option<Poly>,
}

impl WeightDensity {
    pub fn new(m: &MeasureSpec) -> Result<Self> {
        let mut star = None;
        let norm = match &m.family {
            Family::Lebesgue => 1.0,
            Family::Cjacobi { a } => cjacobi_normalization(*a)?,
            Family::ArcUniform { delta } => PI / (PI - delta),
            Family::GeneralizedJacobi { points, g } => generalized_jacobi_moments(points, g, 0)?.1,
            Family::VerblunskyGiven { alpha } => {
                let basis = opuc::szego_forward(&VerblunskySeq::from_pairs(alpha)?)?;
                let n = basis.max_degree();
                star = Some(basis.monic_star(n).clone());
                basis.monic_norm(n).powi(2)
            }
        };
        Ok(WeightDensity {
            family: m.family.clone(),
            scale: norm * m.weight_mass(),
            star,
        })
    }

    pub fn eval(&self, theta: f64) -> Result<f64> {
        let shape = match &self.family {
            Family::Lebesgue => 1.0,
            Family::Cjacobi { a } => {
                let d = (Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, theta)).norm();
                if d == 0.0 && *a < 0.0 {
                    return Err(Error::SingularPoint(theta));
                }
                d.powf(2.0 * a)
            }
            Family::ArcUniform { delta } => {
                let th = theta.rem_euclid(TAU);
                if th >= *delta && th <= TAU - delta {
                    1.0
                } else {
                    0.0
                }
            }
            Family::GeneralizedJacobi { points, g } => {
                for p in points {
                    if p.exponent < 0.0 && circular_distance(p.theta, theta) == 0.0 {
                        return Err(Error::SingularPoint(theta));
                    }
                }
                generalized_jacobi_raw(points, g, theta)
            }
            Family::VerblunskyGiven { .. } => {
                let z = Complex64::from_polar(1.0, theta);
                self.star.as_ref().map_or(1.0, |p| 1.0 / p.eval(z).norm_sqr())
            }
        };
        Ok(self.scale * shape)
    }
}

fn circular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}
