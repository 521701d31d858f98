use opuclab::dnorm::{prepare, ScanSource};
use opuclab::zeros::*;
use opuclab::{Complex64, MeasureSpec, VerblunskySeq};

fn bases() -> Vec<opuclab::OpucBasis> {
    [
        ScanSource::Measure(MeasureSpec::cjacobi(0.5)),
        ScanSource::Measure(MeasureSpec::arc_uniform(0.6)),
        ScanSource::Verblunsky(VerblunskySeq::baxter(20)),
        ScanSource::Verblunsky(VerblunskySeq::constant(Complex64::new(0.3, -0.4), 20).unwrap()),
    ]
    .iter()
    .map(|s| prepare(s, 20).unwrap().1)
    .collect()
}

#[test]
fn zeros_inside_disk() {
    for b in bases() {
        for n in 1..=20 {
            let zs = roots(&b.orthonormal(n)).unwrap();
            assert_eq!(zs.len(), n);
            assert!(zs.max_modulus() < 1.0);
        }
    }
}

#[test]
fn bernstein_holds() {
    for b in bases() {
        for n in [3, 10, 20] {
            let p = b.orthonormal(n);
            let (lhs, rhs) = bernstein_check(&p, inequality_grid(n));
            assert!(lhs <= rhs * (1.0 + 1e-9));
        }
    }
}

#[test]
fn turan_holds() {
    for b in bases() {
        for n in [3, 10, 20] {
            assert!(turan_check(&b.orthonormal(n), inequality_grid(n)).unwrap() >= 1.0 - 1e-9);
        }
    }
}

#[test]
fn derivative_zeros_in_hull() {
    for b in bases() {
        for n in 2..=20 {
            assert!(gauss_lucas_excess(&b.orthonormal(n)).unwrap() <= 1e-8, "n={n}");
        }
    }
}

#[test]
fn zero_measure_first_moment_is_coefficient_ratio() {
    // (1/n) Σ ζ_k = −c_{n−1} / n for monic Φ_n
    for b in bases() {
        let p = b.monic(12);
        let zs = roots(p).unwrap();
        let expect = -p.coeffs()[11] / 12.0;
        assert!((zero_measure_moment(&zs, 1) - expect).norm() < 1e-12);
    }
}
