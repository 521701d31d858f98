use std::f64::consts::{PI, TAU};

use opuclab::dnorm::*;
use opuclab::measure::{add_mass_point, inner_product_poly, norm_sq, quadrature_integral};
use opuclab::opuc::szego_forward;
use opuclab::zeros::roots;
use opuclab::{Complex64, MeasureSpec, SingularPoint, VerblunskySeq};

fn measure(m: MeasureSpec, n: usize) -> (opuclab::MomentTable, opuclab::OpucBasis) {
    prepare(&ScanSource::Measure(m), n).unwrap()
}

#[test]
fn cjacobi_direct_value() {
    let (mt, b) = measure(MeasureSpec::cjacobi(1.0), 10);
    let v = dnorm_direct(&b, &mt, 10).unwrap();
    assert!((v - (1.0 + 1.0 / 30.0f64).sqrt()).abs() < 1e-12);
}

#[test]
fn cjacobi_star_law() {
    for a in [-0.3, 0.7, 1.5] {
        let (mt, b) = measure(MeasureSpec::cjacobi(a), 30);
        for n in [3, 11, 30] {
            let v = star_dnorm(&b, &mt, n).unwrap().powi(2);
            let expect = a * a / ((2.0 * a + 1.0) * n as f64);
            assert!((v - expect).abs() <= 1e-9 * expect, "a={a} n={n}");
        }
    }
}

#[test]
fn mass_point_direct_approaches_limit() {
    let m = add_mass_point(&MeasureSpec::lebesgue(), 0.0, 1.0).unwrap();
    let (mt, b) = measure(m, 150);
    let target = 1.25f64.sqrt();
    let errs: Vec<f64> = [25, 50, 150].iter().map(|&n| (dnorm_direct(&b, &mt, n).unwrap() - target).abs()).collect();
    assert!(errs[2] < errs[1] && errs[1] < errs[0]);
    assert!(errs[2] < 5e-3);
}

#[test]
fn baxter_star_norm_decreases() {
    let (mt, b) = prepare(&ScanSource::Verblunsky(VerblunskySeq::baxter(40)), 40).unwrap();
    let vals: Vec<f64> = (8..=40).map(|n| star_dnorm(&b, &mt, n).unwrap()).collect();
    assert!(vals.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn zeros_route_cjacobi() {
    let (mt, b) = measure(MeasureSpec::cjacobi(0.5), 12);
    let zs = roots(&b.orthonormal(12)).unwrap();
    assert!((dnorm_zeros(&zs).unwrap() - dnorm_direct(&b, &mt, 12).unwrap()).abs() < 1e-8);
}

#[test]
fn series_matches_pairwise_sum() {
    let (_, b) = measure(MeasureSpec::cjacobi(1.0), 10);
    let zs = roots(&b.orthonormal(10)).unwrap();
    let r = zs.max_modulus();
    let j = ((1e-12 * (1.0 - r * r)).ln() / (2.0 * r.ln())).ceil() as usize;
    let (v, tail) = dnorm_series(&zs, j).unwrap();
    assert!(tail < 1e-12);
    assert!((v - dnorm_zeros(&zs).unwrap().powi(2)).abs() < 1e-10);
}

#[test]
fn fn_integrates_to_one() {
    let (_, b) = measure(MeasureSpec::cjacobi(1.0), 6);
    let q = quadrature_integral(|th| Complex64::new(fn_eval(&b, 6, th).unwrap(), 0.0), 2048).unwrap();
    assert!((q.re - 1.0).abs() < 1e-13);
}

#[test]
fn fn_is_poisson_sum_of_zeros() {
    let (_, b) = measure(MeasureSpec::cjacobi(1.0), 9);
    let zs = roots(&b.orthonormal(9)).unwrap();
    for i in 0..32 {
        let th = TAU * i as f64 / 32.0 + 0.1;
        let lhs = 9.0 * fn_eval(&b, 9, th).unwrap();
        assert!((lhs - poisson_sum(&zs, th)).abs() < 1e-9);
    }
}

#[test]
fn squared_fn_integral_matches_zero_sum() {
    // ∫ (n f_n)² = −n² + 2n² dnorm²
    let n = 8;
    let (_, b) = measure(MeasureSpec::cjacobi(1.0), n);
    let zs = roots(&b.orthonormal(n)).unwrap();
    let nf = n as f64;
    let q = quadrature_integral(|th| Complex64::new((nf * fn_eval(&b, n, th).unwrap()).powi(2), 0.0), fn_grid(n)).unwrap();
    let expect = -nf * nf + 2.0 * nf * nf * dnorm_zeros(&zs).unwrap().powi(2);
    assert!((q.re - expect).abs() < 1e-7);
}

#[test]
fn fn_route_singular_weight() {
    let (mt, b) = measure(MeasureSpec::cjacobi(-0.25), 16);
    assert!((dnorm_fn(&b, 16, fn_grid(16)).unwrap() - dnorm_direct(&b, &mt, 16).unwrap()).abs() < 1e-6);
}

#[test]
fn adaptive_grid_resolves_near_circle_zeros() {
    let (mt, b) = measure(MeasureSpec::arc_uniform(0.8), 24);
    let fixed = dnorm_fn(&b, 24, fn_grid(24)).unwrap();
    let (adaptive, m) = dnorm_fn_adaptive(&b, 24, 1e-12).unwrap();
    let direct = dnorm_direct(&b, &mt, 24).unwrap();
    assert!(m > fn_grid(24));
    assert!((adaptive - direct).abs() < 1e-9);
    assert!((fixed - direct).abs() > 1e-3);
}

#[test]
fn star_supnorm_does_not_vanish_with_atom() {
    let m = add_mass_point(&MeasureSpec::lebesgue(), 0.0, 1.0).unwrap();
    let (_, b) = measure(m, 64);
    let vals: Vec<f64> = [16, 32, 64].iter().map(|&n| star_supnorm(&b, n, fn_grid(n)).unwrap()).collect();
    assert!(vals.iter().all(|&v| v > 0.4), "{vals:?}");
}

#[test]
fn baxter_sup_bound_trend() {
    let b = szego_forward(&VerblunskySeq::baxter(48)).unwrap();
    let mut prev = f64::INFINITY;
    for n in [8, 16, 32, 48] {
        let sb = sup_bound(&b, n, 1024).unwrap();
        assert!(sb.lhs <= sb.a_est * sb.weighted_sum * (1.0 + 1e-12));
        assert!(sb.weighted_sum < prev);
        prev = sb.weighted_sum;
    }
}

#[test]
fn reversed_derivative_norm_identity() {
    // ‖(φ_n*)′/n‖ = ‖zφ′_n/n − φ_n‖
    for m in [MeasureSpec::cjacobi(0.8), MeasureSpec::arc_uniform(1.0)] {
        let (mt, b) = measure(m, 14);
        for n in 1..=14 {
            let phi = b.orthonormal(n);
            let w = &phi.derivative().shift(1).scale_real(1.0 / n as f64) - &phi.padded(n).unwrap();
            let rhs = norm_sq(&w, &mt).unwrap().sqrt();
            assert!((star_dnorm(&b, &mt, n).unwrap() - rhs).abs() < 1e-9);
        }
    }
}

#[test]
fn fn_sandwich_holds_on_grid() {
    for seq in [VerblunskySeq::baxter(20), VerblunskySeq::sparse(20)] {
        let b = szego_forward(&seq).unwrap();
        for n in [4, 10, 20] {
            let (lo, hi) = fn_sandwich(&seq, n);
            for i in 0..256 {
                let v = fn_eval(&b, n, TAU * (i as f64 + 0.5) / 256.0).unwrap();
                assert!(lo - 1e-9 <= v && v <= hi + 1e-9, "n={n} v={v} [{lo}, {hi}]");
            }
        }
    }
}

#[test]
fn fn_l1_deviation_decreases() {
    let (_, b) = measure(MeasureSpec::cjacobi(1.0), 32);
    let d4 = fn_l1_deviation(&b, 4, 4096).unwrap();
    let d32 = fn_l1_deviation(&b, 32, 4096).unwrap();
    assert!(d32 < d4);
}

#[test]
fn scan_sparse_star_norm_decreases_at_block_starts() {
    let rep = normality_scan(&ScanSource::Verblunsky(VerblunskySeq::sparse(64)), 64, ScanOptions::default()).unwrap();
    let at: Vec<f64> = [8, 16, 32, 64].iter().map(|&n| rep.rows[n - 1].star_norm).collect();
    assert!(at.windows(2).all(|w| w[1] < w[0]), "{at:?}");
    assert!(rep.invariant_violations(1e-6).is_empty());
}

#[test]
fn scan_perturbed_cjacobi_not_normal() {
    let m = add_mass_point(&MeasureSpec::cjacobi(1.0), 0.0, 1.0).unwrap();
    let rep = normality_scan(&ScanSource::Measure(m), 40, ScanOptions::default()).unwrap();
    assert!(rep.rows[20..].iter().all(|r| r.star_norm > 0.5));
}

#[test]
fn scan_rows_satisfy_invariants() {
    let families = [
        MeasureSpec::cjacobi(0.5),
        MeasureSpec::generalized_jacobi(vec![
            SingularPoint { theta: 0.0, exponent: 0.5 },
            SingularPoint { theta: PI, exponent: -0.25 },
        ]),
        MeasureSpec::arc_uniform(0.8),
    ];
    for m in families {
        let rep = normality_scan(&ScanSource::Measure(m.clone()), 24, ScanOptions::default()).unwrap();
        let v = rep.invariant_violations(1e-6);
        assert!(v.is_empty(), "{m:?}: {v:?}");
    }
}

#[test]
fn zeros_route_skipped_above_cutoff() {
    let opts = ScanOptions { zeros_max_degree: 5 };
    let rep = normality_scan(&ScanSource::Measure(MeasureSpec::cjacobi(1.0)), 8, opts).unwrap();
    assert!(rep.rows[..5].iter().all(|r| r.dnorm_zeros.is_some()));
    assert!(rep.rows[5..].iter().all(|r| r.dnorm_zeros.is_none()));
}

#[test]
fn nevai_necessity_for_normal_families() {
    // families whose scan trends to 1 have small late coefficients
    for m in [MeasureSpec::cjacobi(-0.25), MeasureSpec::cjacobi(1.0)] {
        let rep = normality_scan(&ScanSource::Measure(m), 64, ScanOptions { zeros_max_degree: 0 }).unwrap();
        let star: Vec<f64> = rep.rows.iter().map(|r| r.star_norm).collect();
        assert!(star[63] < star[15]);
        assert!(rep.rows[32..].iter().all(|r| r.alpha_abs < 0.1));
    }
}

#[test]
fn inner_product_of_derivative_is_hermitian() {
    let (mt, b) = measure(MeasureSpec::cjacobi(0.4), 7);
    let p = b.orthonormal(7).derivative();
    let q = b.orthonormal_star(7).derivative();
    let pq = inner_product_poly(&p, &q, &mt).unwrap();
    let qp = inner_product_poly(&q, &p, &mt).unwrap();
    assert!((pq - qp.conj()).norm() < 1e-13);
}
