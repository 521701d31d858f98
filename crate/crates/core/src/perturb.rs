//! Adding a point mass at `z = 1`: the Geronimus transform of the monic
//! polynomials, the norm ratio, the three-term split of `(φ_n*)′(1)`, the
//! perturbed circular Jacobi quantities, and the mass-point-in-a-gap run.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{add_mass_point, inner_product_poly, moment_table, norm_sq, MeasureSpec, MomentTable};
use crate::numeric::{median, ComplexSum};
use crate::opuc::{
    cd_kernel, cd_kernel_poly, cjacobi_orthonormal, levinson, levinson_prefix, second_kind, szego_forward,
    OpucBasis,
};
use crate::poly::Poly;

/// Levinson cut-off used by the gap experiment.
pub const GAP_MARGIN: f64 = 1e-8;

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

fn check_mass(t: f64) -> Result<()> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidParameter(format!("mass t must be nonnegative, got {t}")));
    }
    Ok(())
}

fn check_degree(basis: &OpucBasis, n: usize) -> Result<()> {
    if n > basis.max_degree() {
        return Err(Error::DegreeExceeded {
            needed: n,
            available: basis.max_degree(),
        });
    }
    Ok(())
}

/// `K_{n−1}(1, 1)` of the base measure.
fn kernel_at_one(basis: &OpucBasis, n: usize) -> Result<f64> {
    Ok(cd_kernel(basis, one(), one(), n)?.re)
}

/// `Φ_n(1; t) = Φ_n(1; 0) / (1 + t K_{n−1}(1, 1; 0))`.
pub fn perturbed_value_at_one(basis0: &OpucBasis, t: f64, n: usize) -> Result<Complex64> {
    check_mass(t)?;
    check_degree(basis0, n)?;
    Ok(basis0.monic(n).eval(one()) / (1.0 + t * kernel_at_one(basis0, n)?))
}

/// Monic `Φ_n(z; t) = Φ_n(z; 0) − t Φ_n(1; t) K_{n−1}(z, 1; 0)` for
/// `(μ + t δ_1)/(1 + t)`.
pub fn geronimus_monic(basis0: &OpucBasis, t: f64, n: usize) -> Result<Poly> {
    let at_one = perturbed_value_at_one(basis0, t, n)?;
    let kernel = cd_kernel_poly(basis0, one(), n)?;
    Ok(basis0.monic(n) - &kernel.scale(at_one * t))
}

/// `‖Φ_n(·; t)‖²_t / ‖Φ_n(·; 0)‖² = (1 + t K_n(1,1))/((1 + t)(1 + t K_{n−1}(1,1)))`.
pub fn norm_ratio(basis0: &OpucBasis, t: f64, n: usize) -> Result<f64> {
    check_mass(t)?;
    check_degree(basis0, n)?;
    let kn = kernel_at_one(basis0, n + 1)?;
    let km = kernel_at_one(basis0, n)?;
    Ok((1.0 + t * kn) / ((1.0 + t) * (1.0 + t * km)))
}

/// Both sides of
/// `(1 + t)‖Φ_n(·;t)‖²_t = ‖Φ_n(·;0)‖² (1 + t|φ_n(1;0)|²/(1 + t K_{n−1}(1,1;0)))`,
/// the left side integrated against the perturbed moments.
pub fn norm_split(basis0: &OpucBasis, mt0: &MomentTable, t: f64, n: usize) -> Result<(f64, f64)> {
    let phi_t = geronimus_monic(basis0, t, n)?;
    let lhs = (1.0 + t) * norm_sq(&phi_t, &mt0.with_mass_point(0.0, t))?;
    let phi1 = basis0.orthonormal(n).eval(one()).norm_sqr();
    let rhs = basis0.monic_norm(n).powi(2) * (1.0 + t * phi1 / (1.0 + t * kernel_at_one(basis0, n)?));
    Ok((lhs, rhs))
}

/// The three pieces of `q_n (φ_n*)′(1; t)`:
/// `(φ_n*)′(1;0)`, `−c Σ_{j<n} φ_j(1)(φ_j*)′(1)` and `−c Σ_{j<n} (n−j) φ_j(1)φ_j*(1)`,
/// with `c = t conj(φ_n(1;0)) / (1 + t K_{n−1}(1,1;0))`.
pub fn zeta_decomposition(basis0: &OpucBasis, t: f64, n: usize) -> Result<(Complex64, Complex64, Complex64)> {
    check_mass(t)?;
    check_degree(basis0, n)?;
    let vals = basis0.orthonormal_values(one(), n)?;
    let kernel: f64 = vals[..n].iter().map(|v| v.0.norm_sqr()).sum();
    let c = vals[n].0.conj() * t / (1.0 + t * kernel);
    let z1 = basis0.orthonormal_star(n).derivative().eval(one());
    let mut s2 = ComplexSum::new();
    let mut s3 = ComplexSum::new();
    for (j, v) in vals[..n].iter().enumerate() {
        s2.add(v.0 * basis0.orthonormal_star(j).derivative().eval(one()));
        s3.add(v.0 * v.1 * (n - j) as f64);
    }
    Ok((z1, -c * s2.value(), -c * s3.value()))
}

/// `q_n = ‖Φ_n(·;t)‖_t / ‖Φ_n(·;0)‖`.
pub fn q_factor(basis0: &OpucBasis, t: f64, n: usize) -> Result<f64> {
    Ok(norm_ratio(basis0, t, n)?.sqrt())
}

/// `q_n (φ_n*)′(1; t)` by differentiating the transformed polynomial.
pub fn scaled_star_derivative(basis0: &OpucBasis, t: f64, n: usize) -> Result<Complex64> {
    let phi = geronimus_monic(basis0, t, n)?;
    Ok(phi.star().derivative().eval(one()) / basis0.monic_norm(n))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MassPointRow {
    pub n: usize,
    /// `(φ_n*)′(z_0; t)`.
    pub star_deriv_at_z0: Complex64,
    /// `(1/n)|(φ_n*)′(z_0; t)|`.
    pub scaled_star_deriv: f64,
    pub norm_ratio: f64,
    pub zeta1: Complex64,
    pub zeta2: Complex64,
    pub zeta3: Complex64,
    /// `|φ_n(z_0; 0)|`.
    pub base_value_abs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MassPointExperiment {
    pub base: MeasureSpec,
    pub t: f64,
    pub theta0: f64,
    pub rows: Vec<MassPointRow>,
    /// Window `[n_max/2, n_max]` used for the constants below.
    pub window: (usize, usize),
    /// Window minimum and maximum of `|φ_n(z_0; 0)|`.
    pub c1: f64,
    pub c2: f64,
    pub band_lower: f64,
    pub band_upper: f64,
    /// Window minimum and maximum of `(1/n)|(φ_n*)′(z_0; t)|`.
    pub observed_min: f64,
    pub observed_max: f64,
    pub in_band: bool,
    /// `max |α_n(0)|` over the window.
    pub alpha_tail: f64,
    /// `(1/n)|(φ_n*)′(z_0; 0)|` at `n_max`.
    pub base_star_deriv: f64,
}

pub const MASS_POINT_HEADER: [&str; 7] = [
    "n",
    "star_deriv_re",
    "star_deriv_im",
    "scaled_star_deriv",
    "norm_ratio",
    "zeta_sum_abs",
    "base_value_abs",
];

/// Adds mass `t` at `e^{iθ0}` to `base` and follows `(1/n)|(φ_n*)′(e^{iθ0}; t)|`
/// for `n = 1..=n_max`, computed after rotating `e^{iθ0}` to 1.
pub fn mass_point_experiment(base: &MeasureSpec, t: f64, theta0: f64, n_max: usize) -> Result<MassPointExperiment> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidParameter(format!("mass t must be positive, got {t}")));
    }
    if n_max < 2 {
        return Err(Error::InvalidParameter(format!("n_max must be >= 2, got {n_max}")));
    }
    let mt0 = moment_table(base, n_max + 1)?.rotated(theta0);
    let basis0 = szego_forward(&levinson(&mt0, n_max + 1)?)?;
    let mut rows = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let (zeta1, zeta2, zeta3) = zeta_decomposition(&basis0, t, n)?;
        let q = q_factor(&basis0, t, n)?;
        let star_deriv = (zeta1 + zeta2 + zeta3) / q;
        rows.push(MassPointRow {
            n,
            star_deriv_at_z0: star_deriv,
            scaled_star_deriv: star_deriv.norm() / n as f64,
            norm_ratio: q * q,
            zeta1,
            zeta2,
            zeta3,
            base_value_abs: basis0.orthonormal(n).eval(one()).norm(),
        });
    }
    let lo = (n_max / 2).max(1);
    let win: Vec<&MassPointRow> = rows.iter().filter(|r| r.n >= lo).collect();
    let fold = |f: fn(&MassPointRow) -> f64| {
        win.iter()
            .map(|r| f(r))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)))
    };
    let (c1, c2) = fold(|r| r.base_value_abs);
    let (observed_min, observed_max) = fold(|r| r.scaled_star_deriv);
    let s = (1.0 + t).sqrt();
    let band_lower = s * c1.powi(3) / (2.0 * c2 * c2);
    let band_upper = s * c2.powi(3) / (2.0 * c1 * c1);
    let alpha_tail = (lo..=n_max).map(|j| basis0.alpha().get(j).norm()).fold(0.0, f64::max);
    let base_star_deriv = basis0.orthonormal_star(n_max).derivative().eval(one()).norm() / n_max as f64;
    Ok(MassPointExperiment {
        base: base.clone(),
        t,
        theta0,
        rows,
        window: (lo, n_max),
        c1,
        c2,
        band_lower,
        band_upper,
        observed_min,
        observed_max,
        in_band: band_lower <= observed_min && observed_max <= band_upper,
        alpha_tail,
        base_star_deriv,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapRow {
    pub n: usize,
    pub phi_at_z0: Complex64,
    pub phi_deriv_at_z0: Complex64,
    pub psi_at_z0: Complex64,
    /// `φ′_n(z_0) − ψ_n(z_0) / (2 z_0 μ({z_0}))`.
    pub residual: Complex64,
    /// `|φ′_{n+1}(z_0)| / |φ′_n(z_0)|`; absent on the last row.
    pub growth_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapExperiment {
    pub delta: f64,
    pub t: f64,
    pub atom_mass: f64,
    pub rows: Vec<GapRow>,
    /// Largest degree reached before Levinson hit the margin.
    pub max_usable_n: usize,
    pub stopped_early: Option<String>,
    /// `exp(median log growth ratio)` over the top half of degrees.
    pub median_growth: f64,
    /// Smallest `n` from which `|φ′_n(z_0)|` never decreases.
    pub monotone_from: usize,
    /// `|φ′_n(z_0)|^{1/n}` and `|ψ_n(z_0)|^{1/n}` at the last degree.
    pub deriv_rate: f64,
    pub psi_rate: f64,
    /// `|residual| / |φ′_n(z_0)|` at the last degree.
    pub residual_ratio: f64,
}

pub const GAP_HEADER: [&str; 9] = [
    "n",
    "phi_re",
    "phi_im",
    "phi_deriv_re",
    "phi_deriv_im",
    "psi_re",
    "psi_im",
    "residual_abs",
    "growth_ratio",
];

/// `(arc_uniform(δ) + t δ_1)/(1 + t)`, with `z_0 = 1` inside the gap.
pub fn gap_experiment(delta: f64, t: f64, n_max: usize) -> Result<GapExperiment> {
    if !(delta > 0.0 && delta < std::f64::consts::FRAC_PI_2) {
        return Err(Error::InvalidParameter(format!("gap half-width must lie in (0, pi/2), got {delta}")));
    }
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidParameter(format!("mass t must be positive, got {t}")));
    }
    if n_max < 4 {
        return Err(Error::InvalidParameter(format!("n_max must be >= 4, got {n_max}")));
    }
    let mt = moment_table(&MeasureSpec::arc_uniform(delta), n_max)?.with_mass_point(0.0, t);
    let (alpha, err) = levinson_prefix(&mt, n_max, GAP_MARGIN);
    let max_usable_n = alpha.len();
    if max_usable_n < 4 {
        return Err(err.unwrap_or(Error::InvalidParameter("gap run produced too few degrees".into())));
    }
    let basis = szego_forward(&alpha)?;
    let psi_basis = second_kind(&alpha)?;
    let atom_mass = t / (1.0 + t);
    let z0 = one();
    let prefactor = (z0 * 2.0 * atom_mass).inv();
    let mut rows: Vec<GapRow> = (1..=max_usable_n)
        .map(|n| {
            let (phi, dphi) = basis.orthonormal(n).eval_with_derivative(z0);
            let psi = psi_basis.orthonormal(n).eval(z0);
            GapRow {
                n,
                phi_at_z0: phi,
                phi_deriv_at_z0: dphi,
                psi_at_z0: psi,
                residual: dphi - prefactor * psi,
                growth_ratio: None,
            }
        })
        .collect();
    for i in 0..rows.len() - 1 {
        rows[i].growth_ratio = Some(rows[i + 1].phi_deriv_at_z0.norm() / rows[i].phi_deriv_at_z0.norm());
    }
    let top = max_usable_n / 2;
    let logs: Vec<f64> = rows
        .iter()
        .filter(|r| r.n >= top)
        .filter_map(|r| r.growth_ratio.map(f64::ln))
        .collect();
    let median_growth = median(&logs).map_or(f64::NAN, f64::exp);
    let mut monotone_from = max_usable_n;
    while monotone_from > 1 {
        let i = monotone_from - 2;
        if rows[i].growth_ratio.is_some_and(|g| g >= 1.0) {
            monotone_from -= 1;
        } else {
            break;
        }
    }
    let last = rows.last().expect("at least four rows");
    let nf = last.n as f64;
    Ok(GapExperiment {
        delta,
        t,
        atom_mass,
        deriv_rate: last.phi_deriv_at_z0.norm().powf(1.0 / nf),
        psi_rate: last.psi_at_z0.norm().powf(1.0 / nf),
        residual_ratio: last.residual.norm() / last.phi_deriv_at_z0.norm(),
        rows,
        max_usable_n,
        stopped_early: err.map(|e| e.to_string()),
        median_growth,
        monotone_from,
    })
}

/// `(1/n)(φ_n*)′(1) ` and `a/(2a+1) φ_n(1)` for the circular Jacobi weight.
pub fn cjacobi_endpoint_relation(a: f64, n: usize) -> Result<(f64, f64)> {
    let phi = cjacobi_orthonormal(a, n)?;
    let lhs = phi.star().derivative().eval(one()).re / n as f64;
    let rhs = a / (2.0 * a + 1.0) * phi.eval(one()).re;
    Ok((lhs, rhs))
}

/// `‖φ_n(·; μ_{a+1})‖²` in `L²(μ_a)` by moment sums, and `1 + 2n/(2a+3)`.
pub fn cjacobi_shifted_norm(a: f64, n: usize) -> Result<(f64, f64)> {
    let p = cjacobi_orthonormal(a + 1.0, n)?;
    let mt = moment_table(&MeasureSpec::cjacobi(a), n)?;
    Ok((inner_product_poly(&p, &p, &mt)?.re, 1.0 + 2.0 * n as f64 / (2.0 * a + 3.0)))
}

fn cjacobi_basis(a: f64, n: usize) -> Result<(MomentTable, OpucBasis)> {
    let mt = moment_table(&MeasureSpec::cjacobi(a), n + 1)?;
    let basis = szego_forward(&levinson(&mt, n + 1)?)?;
    Ok((mt, basis))
}

/// `‖(φ_n*)′(·; ν_{a,t})/n‖` in `L²(μ_a)`, where `ν_{a,t} = (μ_a + t δ_1)/(1 + t)`.
pub fn perturbed_star_norm_under_base(a: f64, t: f64, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter("need n >= 1".into()));
    }
    let perturbed = add_mass_point(&MeasureSpec::cjacobi(a), 0.0, t)?;
    let mt_t = moment_table(&perturbed, n)?;
    let basis_t = szego_forward(&levinson(&mt_t, n)?)?;
    let (mt_a, _) = cjacobi_basis(a, n)?;
    let d = basis_t.orthonormal_star(n).derivative();
    Ok(norm_sq(&d, &mt_a)?.max(0.0).sqrt() / n as f64)
}

/// Least-squares log–log slopes of `(1/n)|(φ_n*)′(1; ν_{a,t})|` and of the
/// monic `(1/n)|(Φ_n*)′(1; ν_{a,t})|` against `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    pub orthonormal_slope: f64,
    pub monic_slope: f64,
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

pub fn perturbed_growth_exponent(a: f64, t: f64, degrees: &[usize]) -> Result<GrowthFit> {
    if degrees.len() < 2 || degrees.contains(&0) {
        return Err(Error::InvalidParameter("need at least two positive degrees".into()));
    }
    let n_max = *degrees.iter().max().expect("nonempty");
    let (_, basis0) = cjacobi_basis(a, n_max)?;
    let mut xs = Vec::new();
    let mut ortho = Vec::new();
    let mut monic = Vec::new();
    for &n in degrees {
        let d = geronimus_monic(&basis0, t, n)?.star().derivative().eval(one()).norm() / n as f64;
        let norm_t = q_factor(&basis0, t, n)? * basis0.monic_norm(n);
        xs.push((n as f64).ln());
        monic.push(d.ln());
        ortho.push((d / norm_t).ln());
    }
    Ok(GrowthFit {
        orthonormal_slope: slope(&xs, &ortho),
        monic_slope: slope(&xs, &monic),
    })
}
