use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use opuclab::dnorm::{dnorm_direct, dnorm_fn_adaptive, dnorm_zeros, FN_REL_TOL, fn_eval, fn_grid, prepare, star_dnorm, star_supnorm, ScanSource};
use opuclab::measure::{add_mass_point, cjacobi_moment, cjacobi_normalization, moment_table, quadrature_integral};
use opuclab::opuc::{levinson, moments_from_verblunsky, szego_forward};
use opuclab::perturb::{cjacobi_shifted_norm, gap_experiment, mass_point_experiment};
use opuclab::sobolev::{sobolev_min, sobolev_ratio_check};
use opuclab::specialfn::{identity_magnitude, jacobi_sum_identity, weighted_jacobi_sum_identity};
use opuclab::zeros::roots;
use opuclab::{Complex64, MeasureSpec, Result, SingularPoint, VerblunskySeq};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome {
        pass,
        detail: detail.into(),
    })
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn families() -> Vec<(&'static str, MeasureSpec)> {
    vec![
        ("lebesgue", MeasureSpec::lebesgue()),
        ("cjacobi(0.5)", MeasureSpec::cjacobi(0.5)),
        ("cjacobi(-0.25)", MeasureSpec::cjacobi(-0.25)),
        (
            "generalized_jacobi",
            MeasureSpec::generalized_jacobi(vec![
                SingularPoint { theta: 0.0, exponent: 0.5 },
                SingularPoint { theta: PI, exponent: -0.25 },
            ]),
        ),
        ("arc_uniform(0.8)", MeasureSpec::arc_uniform(0.8)),
        ("verblunsky_given", MeasureSpec::verblunsky_given(VerblunskySeq::baxter(12).as_slice())),
    ]
}

fn cjacobi_exact_law() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for a in [-0.4, -0.25, 0.5, 1.0, 2.0] {
        let (mt, basis) = prepare(&ScanSource::Measure(MeasureSpec::cjacobi(a)), 40)?;
        for n in [5, 10, 20, 40] {
            let v = star_dnorm(&basis, &mt, n)?.powi(2) * n as f64;
            worst = worst.max(rel(v, a * a / (2.0 * a + 1.0)));
        }
    }
    outcome(worst <= 1e-7, format!("max rel err {worst:.2e}"))
}

fn shifted_norm() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for a in [0.0, 1.0] {
        for n in 0..=20 {
            let (v, expect) = cjacobi_shifted_norm(a, n)?;
            worst = worst.max(rel(v, expect));
        }
    }
    outcome(worst <= 1e-8, format!("max rel err {worst:.2e}"))
}

fn pythagoras() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    let mut all = families();
    all.push(("cjacobi(1)+atom", add_mass_point(&MeasureSpec::cjacobi(1.0), 0.0, 1.0)?));
    for (_, m) in all {
        let (mt, basis) = prepare(&ScanSource::Measure(m), 32)?;
        for n in 1..=32 {
            let d = dnorm_direct(&basis, &mt, n)?.powi(2) - star_dnorm(&basis, &mt, n)?.powi(2) - 1.0;
            worst = worst.max(d.abs());
        }
    }
    outcome(worst <= 1e-8, format!("max |defect| {worst:.2e}"))
}

fn route_triangulation() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    let mut where_ = String::new();
    for (name, m) in families() {
        let (mt, basis) = prepare(&ScanSource::Measure(m), 24)?;
        for n in 1..=24 {
            let direct = dnorm_direct(&basis, &mt, n)?;
            let zeros = dnorm_zeros(&roots(&basis.orthonormal(n))?)?;
            let quad = dnorm_fn_adaptive(&basis, n, FN_REL_TOL)?.0;
            let e = rel(zeros, direct).max(rel(quad, direct)).max(rel(quad, zeros));
            if e > worst {
                worst = e;
                where_ = format!("{name} n={n}");
            }
        }
    }
    outcome(worst <= 1e-6, format!("max pairwise rel diff {worst:.2e} at {where_}"))
}

fn mass_point_nonnormality() -> Result<Outcome> {
    let m = add_mass_point(&MeasureSpec::lebesgue(), 0.0, 1.0)?;
    let (mt, basis) = prepare(&ScanSource::Measure(m), 200)?;
    let v = star_dnorm(&basis, &mt, 200)?;
    outcome(rel(v, 0.5) <= 0.02, format!("star_dnorm(200) = {v:.6}, target 0.5"))
}

fn mass_point_limit() -> Result<Outcome> {
    let mut pass = true;
    let mut detail = Vec::new();
    for (t, target) in [(1.0, FRAC_1_SQRT_2), (3.0, 1.0)] {
        let exp = mass_point_experiment(&MeasureSpec::lebesgue(), t, 0.0, 128)?;
        let v = exp.rows.last().expect("rows").scaled_star_deriv;
        pass &= rel(v, target) <= 0.03;
        detail.push(format!("t={t}: {v:.5} vs {target:.5}"));
    }
    outcome(pass, detail.join(", "))
}

fn hypergeometric_identities() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for a in [-0.4, 0.3, 1.0, 2.5] {
        for n in 0..=12 {
            let scale = identity_magnitude(n, a);
            for k in 0..=n {
                for (lhs, rhs) in [jacobi_sum_identity(n, k, a), weighted_jacobi_sum_identity(n, k, a)] {
                    worst = worst.max((lhs - rhs).abs() / rhs.abs().max(scale));
                }
            }
        }
    }
    outcome(worst <= 1e-10, format!("max rel residual {worst:.2e}"))
}

fn moment_closed_form() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for a in [1i32, 2, 3] {
        let af = a as f64;
        let norm = cjacobi_normalization(af)?;
        for k in -8i64..=8 {
            let q = quadrature_integral(
                |th| {
                    let w = norm * (2.0 - 2.0 * th.cos()).powi(a);
                    Complex64::from_polar(w, k as f64 * th)
                },
                256,
            )?;
            worst = worst.max((q - cjacobi_moment(af, k)).norm());
        }
    }
    let exact = cjacobi_moment(1.0, 1).re == -0.5
        && cjacobi_moment(1.0, 2).re == 0.0
        && cjacobi_moment(0.5, 1).re == -1.0 / 3.0;
    outcome(worst <= 1e-12 && exact, format!("max quadrature err {worst:.2e}, exact values {exact}"))
}

fn sparse_normality() -> Result<Outcome> {
    let seq = VerblunskySeq::sparse(64);
    let (mt, basis) = prepare(&ScanSource::Verblunsky(seq), 64)?;
    let vals: Vec<f64> = (3..=6).map(|j| star_dnorm(&basis, &mt, 1 << j)).collect::<Result<_>>()?;
    let decreasing = vals.windows(2).all(|w| w[1] < w[0]);
    outcome(decreasing && vals[3] < 0.25, format!("star_dnorm at 8,16,32,64 = {vals:.4?}"))
}

fn baxter_supnorm() -> Result<Outcome> {
    let basis = szego_forward(&VerblunskySeq::baxter(64))?;
    let s16 = star_supnorm(&basis, 16, fn_grid(16))?;
    let s64 = star_supnorm(&basis, 64, fn_grid(64))?;
    outcome(s64 < 0.05 && s64 < s16, format!("n=16: {s16:.5}, n=64: {s64:.5}"))
}

fn gap() -> Result<Outcome> {
    let g = gap_experiment(0.8, 0.5, 40)?;
    let rate = rel(g.deriv_rate, g.psi_rate);
    let pass = g.max_usable_n >= 40 && g.median_growth > 1.02 && g.residual_ratio < 1e-2 && rate <= 0.05;
    outcome(
        pass,
        format!(
            "n={} growth {:.4}, residual ratio {:.2e}, rates {:.4}/{:.4}",
            g.max_usable_n, g.median_growth, g.residual_ratio, g.deriv_rate, g.psi_rate
        ),
    )
}

fn sobolev() -> Result<Outcome> {
    let n = 100;
    let seq = VerblunskySeq::baxter(n);
    let mt = moments_from_verblunsky(&seq, n)?;
    let basis = szego_forward(&seq)?;
    let sol = sobolev_min(&mt, 1.0, n)?;
    let chk = sobolev_ratio_check(&mt, &basis, &sol, Complex64::new(2.0, 0.0))?;
    let pyth = (chk.defect - chk.defect_direct).abs();
    outcome(
        rel(chk.ratio, 2.0) <= 0.02 && pyth <= 1e-9,
        format!("ratio {:.5}, Pythagoras residual {pyth:.2e}", chk.ratio),
    )
}

fn fn_bounded() -> Result<Outcome> {
    let m = MeasureSpec::generalized_jacobi(vec![
        SingularPoint { theta: 0.0, exponent: 0.5 },
        SingularPoint { theta: PI, exponent: -0.25 },
    ]);
    let mt = moment_table(&m, 33)?;
    let basis = szego_forward(&levinson(&mt, 33)?)?;
    let mut maxima = Vec::new();
    for n in [8, 16, 32] {
        let grid = fn_grid(n);
        let mut best: f64 = 0.0;
        for i in 0..grid {
            best = best.max(fn_eval(&basis, n, std::f64::consts::TAU * (i as f64 + 0.5) / grid as f64)?);
        }
        maxima.push(best);
    }
    let pass = maxima.iter().all(|&v| v <= 3.0 * maxima[0]);
    outcome(pass, format!("max f_n at 8,16,32 = {maxima:.4?}"))
}

type Criterion = (&'static str, u64, fn() -> Result<Outcome>);

fn main() -> ExitCode {
    let criteria: [Criterion; 13] = [
        ("circular Jacobi exact law", 5, cjacobi_exact_law),
        ("shifted circular Jacobi norm", 2, shifted_norm),
        ("derivative Pythagoras identity", 10, pythagoras),
        ("route triangulation", 30, route_triangulation),
        ("mass-point nonnormality", 10, mass_point_nonnormality),
        ("mass-point derivative limit", 10, mass_point_limit),
        ("hypergeometric identities", 1, hypergeometric_identities),
        ("circular Jacobi moments", 1, moment_closed_form),
        ("sparse normality", 5, sparse_normality),
        ("Baxter sup-norm decay", 5, baxter_supnorm),
        ("gap experiment", 10, gap),
        ("Sobolev ratio", 20, sobolev),
        ("f_n boundedness", 20, fn_bounded),
    ];
    let mut failures = 0;
    for (i, (name, budget, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let res = f();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(*budget);
        let (pass, detail) = match res {
            Ok(o) => (o.pass && in_time, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failures += 1;
        }
        println!(
            "criterion {:>2} {:<32} {}  {} [{:.3}s / {}s]",
            i + 1,
            name,
            if pass { "PASS" } else { "FAIL" },
            detail,
            elapsed.as_secs_f64(),
            budget
        );
    }
    println!("{} of 13 criteria passed", 13 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
