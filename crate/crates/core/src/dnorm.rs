//! The normalized derivative norm `‖φ′_n/n‖` by moment sums, by the zeros of
//! `φ_n`, and by the `f_n = K_{n−1}/(n|φ_n|²)` quadrature, plus scans and
//! diagnostics built on them.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{circle_grid, moment_table, norm_sq, quadrature_integral, MeasureSpec, MomentTable};
use crate::numeric::{ComplexSum, NeumaierSum};
use crate::opuc::{levinson, moments_from_verblunsky, szego_forward, OpucBasis, VerblunskySeq};
use crate::poly::Poly;
use crate::zeros::{roots, zero_measure_moment, ZeroSet};

/// Convergence target for the adaptive `f_n` quadrature in scans.
pub const FN_REL_TOL: f64 = 1e-12;

/// Zeros closer than this to the circle switch the zeros route off.
pub const ZEROS_EDGE: f64 = 1e-8;

fn require_positive(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter("derivative norms need n >= 1".into()));
    }
    Ok(())
}

fn scaled_norm(p: &Poly, mt: &MomentTable, n: usize) -> Result<f64> {
    Ok((norm_sq(p, mt)?.max(0.0)).sqrt() / n as f64)
}

/// `‖φ′_n‖ / n` in `L²(μ)` from the moment table.
pub fn dnorm_direct(basis: &OpucBasis, mt: &MomentTable, n: usize) -> Result<f64> {
    require_positive(n)?;
    scaled_norm(&basis.orthonormal(n).derivative(), mt, n)
}

/// `‖(φ_n*)′‖ / n` in `L²(μ)` from the moment table.
pub fn star_dnorm(basis: &OpucBasis, mt: &MomentTable, n: usize) -> Result<f64> {
    require_positive(n)?;
    scaled_norm(&basis.orthonormal_star(n).derivative(), mt, n)
}

/// `‖φ′_n/n‖² − ‖(φ_n*)′/n‖² − 1`, which vanishes identically.
pub fn pythagoras_defect(basis: &OpucBasis, mt: &MomentTable, n: usize) -> Result<f64> {
    Ok(dnorm_direct(basis, mt, n)?.powi(2) - star_dnorm(basis, mt, n)?.powi(2) - 1.0)
}

fn check_inside(zs: &ZeroSet) -> Result<()> {
    let modulus = zs.max_modulus();
    if !(modulus < 1.0) {
        return Err(Error::ZeroOutsideDisk { modulus });
    }
    Ok(())
}

/// `√((1/n²) Σ_{j,k} 1/(1 − conj(ζ_j) ζ_k))`.
pub fn dnorm_zeros(zs: &ZeroSet) -> Result<f64> {
    check_inside(zs)?;
    let n = zs.len();
    let mut acc = NeumaierSum::new();
    for zj in &zs.roots {
        let cj = zj.conj();
        for zk in &zs.roots {
            acc.add((Complex64::new(1.0, 0.0) - cj * zk).inv().re);
        }
    }
    Ok((acc.value() / (n * n) as f64).sqrt())
}

/// `1 + Σ_{j=1}^{J} |∫ z^j dν_n|²` (the squared norm) and the bound
/// `r^{2(J+1)}/(1 − r²)` on the omitted tail, `r = max |ζ|`.
pub fn dnorm_series(zs: &ZeroSet, j_max: usize) -> Result<(f64, f64)> {
    check_inside(zs)?;
    let mut acc = NeumaierSum::new();
    acc.add(1.0);
    for j in 1..=j_max {
        acc.add(zero_measure_moment(zs, j).norm_sqr());
    }
    let r = zs.max_modulus();
    let tail = r.powi(2 * (j_max as i32 + 1)) / (1.0 - r * r);
    Ok((acc.value(), tail))
}

/// `f_n(e^{iθ}) = Σ_{j<n} |φ_j|² / (n |φ_n|²)`.
pub fn fn_eval(basis: &OpucBasis, n: usize, theta: f64) -> Result<f64> {
    require_positive(n)?;
    basis_covers(basis, n)?;
    Ok(fn_value(basis, n, theta))
}

fn fn_value(basis: &OpucBasis, n: usize, theta: f64) -> f64 {
    let z = Complex64::from_polar(1.0, theta);
    let mut p = Complex64::new(1.0, 0.0);
    let mut ps = p;
    let mut kernel = NeumaierSum::new();
    for j in 0..n {
        kernel.add(p.norm_sqr() / basis.monic_norm(j).powi(2));
        let a = basis.alpha().get(j);
        let zp = z * p;
        p = zp - a.conj() * ps;
        ps -= a * zp;
    }
    kernel.value() / (n as f64 * p.norm_sqr() / basis.monic_norm(n).powi(2))
}

/// Starting quadrature size for `f_n` integrals.
pub fn fn_grid(n: usize) -> usize {
    2048.max(16 * n)
}

/// Largest grid tried by [`dnorm_fn_adaptive`].
pub const FN_GRID_CAP: usize = 1 << 18;

fn fn_square_mean(basis: &OpucBasis, n: usize, m: usize) -> Result<f64> {
    let q = quadrature_integral(|th| Complex64::new(fn_value(basis, n, th).powi(2), 0.0), m)?;
    if !q.re.is_finite() {
        return Err(Error::InvalidParameter(format!("f_n is not finite on the grid at n = {n}")));
    }
    Ok(q.re)
}

/// `√(1/2 + (1/2) ∫ f_n² dθ/2π)` on an `M`-point grid, `M ≥ 16n`.
pub fn dnorm_fn(basis: &OpucBasis, n: usize, m: usize) -> Result<f64> {
    require_positive(n)?;
    basis_covers(basis, n)?;
    if m < 16 * n {
        return Err(Error::InvalidParameter(format!("f_n quadrature needs M >= 16n, got {m}")));
    }
    Ok((0.5 + 0.5 * fn_square_mean(basis, n, m)?).sqrt())
}

/// [`dnorm_fn`] starting from [`fn_grid`] and doubling the grid until two
/// successive values agree to `rel_tol`. Returns the value and the final grid.
pub fn dnorm_fn_adaptive(basis: &OpucBasis, n: usize, rel_tol: f64) -> Result<(f64, usize)> {
    require_positive(n)?;
    basis_covers(basis, n)?;
    let mut m = fn_grid(n);
    let mut prev = fn_square_mean(basis, n, m)?;
    while m < FN_GRID_CAP {
        m *= 2;
        let next = fn_square_mean(basis, n, m)?;
        let done = (next - prev).abs() <= rel_tol * next.abs();
        prev = next;
        if done {
            break;
        }
    }
    Ok(((0.5 + 0.5 * prev).sqrt(), m))
}

fn basis_covers(basis: &OpucBasis, n: usize) -> Result<()> {
    if n > basis.max_degree() {
        return Err(Error::DegreeExceeded {
            needed: n,
            available: basis.max_degree(),
        });
    }
    Ok(())
}

/// `‖f_n − 1‖` in `L¹(dθ/2π)`.
pub fn fn_l1_deviation(basis: &OpucBasis, n: usize, m: usize) -> Result<f64> {
    require_positive(n)?;
    basis_covers(basis, n)?;
    let q = quadrature_integral(|th| Complex64::new((fn_value(basis, n, th) - 1.0).abs(), 0.0), m)?;
    Ok(q.re)
}

/// Lower and upper bounds
/// `(1/n) Σ_{k=1}^{n} ∏_{j=k}^{n} (1 ∓ |α_{j−1}|)/(1 ± |α_{j−1}|)` on `f_n`.
pub fn fn_sandwich(alpha: &VerblunskySeq, n: usize) -> (f64, f64) {
    let (mut lo, mut hi) = (0.0, 0.0);
    let (mut plo, mut phi) = (1.0, 1.0);
    for j in (1..=n).rev() {
        let a = alpha.get(j - 1).norm();
        plo *= (1.0 - a) / (1.0 + a);
        phi *= (1.0 + a) / (1.0 - a);
        lo += plo;
        hi += phi;
    }
    (lo / n as f64, hi / n as f64)
}

/// `sup_θ |(φ_n*)′(e^{iθ})| / n` over the `M`-point offset grid.
pub fn star_supnorm(basis: &OpucBasis, n: usize, m: usize) -> Result<f64> {
    require_positive(n)?;
    basis_covers(basis, n)?;
    let d = basis.orthonormal_star(n).derivative();
    Ok(circle_grid(m)
        .map(|th| d.eval(Complex64::from_polar(1.0, th)).norm())
        .fold(0.0, f64::max)
        / n as f64)
}

/// Pieces of the sup-norm bound `(1/n)‖(Φ_n*)′‖_∞ ≤ A (1/n) Σ_{j<n} (j+1)|α_j|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupBound {
    /// `(1/n) sup |(Φ_n*)′|` on the grid.
    pub lhs: f64,
    /// `max_{m≤n} sup |Φ_m|` on the grid.
    pub a_est: f64,
    /// `(1/n) Σ_{j=0}^{n−1} (j+1)|α_j|`.
    pub weighted_sum: f64,
}

pub fn sup_bound(basis: &OpucBasis, n: usize, m: usize) -> Result<SupBound> {
    require_positive(n)?;
    basis_covers(basis, n)?;
    let grid: Vec<Complex64> = circle_grid(m).map(|th| Complex64::from_polar(1.0, th)).collect();
    let d = basis.monic_star(n).derivative();
    let lhs = grid.iter().map(|z| d.eval(*z).norm()).fold(0.0, f64::max) / n as f64;
    let a_est = (0..=n)
        .map(|k| grid.iter().map(|z| basis.monic(k).eval(*z).norm()).fold(0.0, f64::max))
        .fold(0.0, f64::max);
    let weighted: NeumaierSum = (0..n).map(|j| (j + 1) as f64 * basis.alpha().get(j).norm()).collect();
    Ok(SupBound {
        lhs,
        a_est,
        weighted_sum: weighted.value() / n as f64,
    })
}

/// What to scan: a measure (moments first) or a coefficient sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanSource {
    Measure(MeasureSpec),
    Verblunsky(VerblunskySeq),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanOptions {
    /// Degrees above this skip the zeros route.
    pub zeros_max_degree: usize,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions { zeros_max_degree: 128 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalityRow {
    pub n: usize,
    pub dnorm_direct: f64,
    pub dnorm_zeros: Option<f64>,
    pub dnorm_fn: f64,
    pub star_norm: f64,
    pub star_supnorm: f64,
    pub alpha_abs: f64,
    pub nthroot: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalityReport {
    pub rows: Vec<NormalityRow>,
}

pub const REPORT_HEADER: [&str; 8] = [
    "n",
    "dnorm_direct",
    "dnorm_zeros",
    "dnorm_fn",
    "star_norm",
    "star_supnorm",
    "alpha_abs",
    "nthroot",
];

impl NormalityReport {
    /// Violations of `dnorm ≥ 1`, of `dnorm² − star² = 1`, and of route
    /// agreement beyond `route_tol` (relative).
    pub fn invariant_violations(&self, route_tol: f64) -> Vec<String> {
        let mut out = Vec::new();
        for r in &self.rows {
            if r.dnorm_direct < 1.0 - 1e-9 {
                out.push(format!("n={}: dnorm_direct {} < 1", r.n, r.dnorm_direct));
            }
            let defect = r.dnorm_direct.powi(2) - r.star_norm.powi(2) - 1.0;
            if defect.abs() > 1e-8 {
                out.push(format!("n={}: dnorm^2 - star^2 - 1 = {defect:e}", r.n));
            }
            let mut routes = vec![("fn", r.dnorm_fn)];
            if let Some(z) = r.dnorm_zeros {
                routes.push(("zeros", z));
            }
            for (name, v) in routes {
                let rel = (v - r.dnorm_direct).abs() / r.dnorm_direct;
                if !(rel <= route_tol) {
                    out.push(format!("n={}: {name} route differs by {rel:e}", r.n));
                }
            }
        }
        out
    }
}

/// Moment table and basis covering degrees `0..=n_max + 1`.
pub fn prepare(source: &ScanSource, n_max: usize) -> Result<(MomentTable, OpucBasis)> {
    match source {
        ScanSource::Measure(m) => {
            let mt = moment_table(m, n_max + 1)?;
            let alpha = levinson(&mt, n_max + 1)?;
            Ok((mt, szego_forward(&alpha)?))
        }
        ScanSource::Verblunsky(seq) => {
            let seq = seq.resized(n_max + 1);
            Ok((moments_from_verblunsky(&seq, n_max + 1)?, szego_forward(&seq)?))
        }
    }
}

fn zeros_route(basis: &OpucBasis, n: usize) -> Option<f64> {
    let zs = roots(&basis.orthonormal(n)).ok()?;
    if zs.max_modulus() > 1.0 - ZEROS_EDGE {
        return None;
    }
    dnorm_zeros(&zs).ok()
}

/// Per-degree report for `n = 1..=n_max`; rows are computed in parallel and
/// returned in increasing `n`.
pub fn normality_scan(source: &ScanSource, n_max: usize, opts: ScanOptions) -> Result<NormalityReport> {
    if n_max < 2 {
        return Err(Error::InvalidParameter(format!("scan needs n_max >= 2, got {n_max}")));
    }
    let (mt, basis) = prepare(source, n_max)?;
    let rows = (1..=n_max)
        .into_par_iter()
        .map(|n| {
            let dnorm_direct = dnorm_direct(&basis, &mt, n)?;
            let dnorm_zeros = if n <= opts.zeros_max_degree {
                zeros_route(&basis, n)
            } else {
                None
            };
            Ok(NormalityRow {
                n,
                dnorm_direct,
                dnorm_zeros,
                dnorm_fn: dnorm_fn_adaptive(&basis, n, FN_REL_TOL)?.0,
                star_norm: star_dnorm(&basis, &mt, n)?,
                star_supnorm: star_supnorm(&basis, n, fn_grid(n))?,
                alpha_abs: basis.alpha().get(n).norm(),
                nthroot: (n as f64 * dnorm_direct).powf(1.0 / n as f64),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(NormalityReport { rows })
}

/// `Σ_j Poisson(ζ_j, e^{iθ})`, which equals `n f_n(e^{iθ})`.
pub fn poisson_sum(zs: &ZeroSet, theta: f64) -> f64 {
    let z = Complex64::from_polar(1.0, theta);
    let acc: ComplexSum = zs
        .roots
        .iter()
        .map(|w| Complex64::new((1.0 - w.norm_sqr()) / (z - w).norm_sqr(), 0.0))
        .collect();
    acc.value().re
}
