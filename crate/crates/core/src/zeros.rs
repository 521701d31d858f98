//! Polynomial zeros by Aberth–Ehrlich iteration, the zero-counting measure,
//! and grid checks of the Bernstein and Turán inequalities.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::circle_grid;
use crate::poly::Poly;

const MAX_ITERATIONS: usize = 500;
const STEP_TOL: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroSet {
    pub roots: Vec<Complex64>,
    /// `max_j |P(ζ_j)| / |leading coefficient|`.
    pub residual: f64,
}

impl ZeroSet {
    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn max_modulus(&self) -> f64 {
        self.roots.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Bound on the rounding error of Horner evaluation at `z`.
fn horner_error_bound(p: &Poly, z: Complex64) -> f64 {
    let r = z.norm();
    let mag = p.coeffs().iter().rev().fold(0.0, |acc, c| acc * r + c.norm());
    8.0 * f64::EPSILON * mag * p.degree().max(1) as f64
}

pub fn roots(p: &Poly) -> Result<ZeroSet> {
    let p = p.trimmed();
    let n = p.degree();
    if n == 0 {
        return Err(Error::InvalidParameter("root finding needs degree >= 1".into()));
    }
    let lead = p.leading();
    let zeros_at_origin = p.coeffs().iter().take_while(|c| c.norm() == 0.0).count();
    let mut out = vec![Complex64::new(0.0, 0.0); zeros_at_origin];
    let q = Poly::new(p.coeffs()[zeros_at_origin..].to_vec());
    let d = q.degree();
    if d == 1 {
        out.push(-q[0] / q[1]);
    } else if d > 1 {
        out.extend(aberth(&q)?);
    }
    let residual = out.iter().map(|z| p.eval(*z).norm()).fold(0.0, f64::max) / lead.norm();
    Ok(ZeroSet { roots: out, residual })
}

fn aberth(q: &Poly) -> Result<Vec<Complex64>> {
    let d = q.degree();
    let radius = (q[0].norm() / q.leading().norm()).powf(1.0 / d as f64);
    let mut z: Vec<Complex64> = (0..d)
        .map(|k| Complex64::from_polar(radius, TAU * k as f64 / d as f64 + 0.4))
        .collect();
    let mut frozen = vec![false; d];
    for _ in 0..MAX_ITERATIONS {
        for i in 0..d {
            if frozen[i] {
                continue;
            }
            let (v, dv) = q.eval_with_derivative(z[i]);
            if v.norm() <= horner_error_bound(q, z[i]) {
                frozen[i] = true;
                continue;
            }
            let ratio = v / dv;
            let repulsion: Complex64 = (0..d)
                .filter(|&j| j != i)
                .map(|j| (z[i] - z[j]).inv())
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            z[i] -= step;
            if step.norm() <= STEP_TOL * z[i].norm().max(1.0) {
                frozen[i] = true;
            }
        }
        if frozen.iter().all(|&f| f) {
            return Ok(z);
        }
    }
    let residual = z.iter().map(|r| q.eval(*r).norm()).fold(0.0, f64::max) / q.leading().norm();
    Err(Error::RootsNotConverged {
        iterations: MAX_ITERATIONS,
        residual,
    })
}

/// `(1/n) Σ_k ζ_k^j`.
pub fn zero_measure_moment(zs: &ZeroSet, j: usize) -> Complex64 {
    if zs.roots.is_empty() || j == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let s: Complex64 = zs.roots.iter().map(|z| z.powu(j as u32)).sum();
    s / zs.roots.len() as f64
}

/// `(sup |P′|/n, sup |P|)` over the `M`-point offset grid.
pub fn bernstein_check(p: &Poly, m: usize) -> (f64, f64) {
    let n = p.trimmed().degree();
    let (mut lhs, mut rhs) = (0.0f64, 0.0f64);
    for th in circle_grid(m) {
        let (v, dv) = p.eval_with_derivative(Complex64::from_polar(1.0, th));
        if n > 0 {
            lhs = lhs.max(dv.norm() / n as f64);
        }
        rhs = rhs.max(v.norm());
    }
    (lhs, rhs)
}

/// `min_θ |P′| / ((n/2)|P|)` over the grid; requires all zeros in the closed disk.
pub fn turan_check(p: &Poly, m: usize) -> Result<f64> {
    let zs = roots(p)?;
    let modulus = zs.max_modulus();
    if modulus > 1.0 + 1e-12 {
        return Err(Error::ZeroOutsideDisk { modulus });
    }
    let n = zs.len() as f64;
    Ok(circle_grid(m)
        .map(|th| {
            let (v, dv) = p.eval_with_derivative(Complex64::from_polar(1.0, th));
            dv.norm() / (0.5 * n * v.norm())
        })
        .fold(f64::INFINITY, f64::min))
}

/// Default grid size for the inequality checks.
pub fn inequality_grid(deg: usize) -> usize {
    512.max(16 * deg)
}

fn cross(o: Complex64, a: Complex64, b: Complex64) -> f64 {
    (a.re - o.re) * (b.im - o.im) - (a.im - o.im) * (b.re - o.re)
}

/// Convex hull vertices in counterclockwise order (monotone chain).
pub fn convex_hull(points: &[Complex64]) -> Vec<Complex64> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let mut hull: Vec<Complex64> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Complex64>> =
            if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

fn segment_distance(p: Complex64, a: Complex64, b: Complex64) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = (((p - a) * ab.conj()).re / len2).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

/// Distance from `p` to the convex polygon `hull` (zero inside).
pub fn distance_to_hull(p: Complex64, hull: &[Complex64]) -> f64 {
    match hull.len() {
        0 => f64::INFINITY,
        1 => (p - hull[0]).norm(),
        2 => segment_distance(p, hull[0], hull[1]),
        k => {
            let inside = (0..k).all(|i| cross(hull[i], hull[(i + 1) % k], p) >= 0.0);
            if inside {
                0.0
            } else {
                (0..k)
                    .map(|i| segment_distance(p, hull[i], hull[(i + 1) % k]))
                    .fold(f64::INFINITY, f64::min)
            }
        }
    }
}

/// Largest distance from a zero of `P′` to the convex hull of the zeros of `P`.
pub fn gauss_lucas_excess(p: &Poly) -> Result<f64> {
    let hull = convex_hull(&roots(p)?.roots);
    let dp = p.trimmed().derivative();
    if dp.trimmed().degree() == 0 {
        return Ok(0.0);
    }
    Ok(roots(&dp)?
        .roots
        .iter()
        .map(|z| distance_to_hull(*z, &hull))
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn monomial_roots_are_exact_zeros() {
        let zs = roots(&Poly::monomial(6)).unwrap();
        assert_eq!(zs.roots, vec![c(0.0, 0.0); 6]);
        assert_eq!(zs.residual, 0.0);
    }

    #[test]
    fn linear_root() {
        let zs = roots(&Poly::from_real(&[-0.5, 1.0])).unwrap();
        assert_eq!(zs.roots, vec![c(0.5, 0.0)]);
    }

    #[test]
    fn constant_has_no_roots() {
        assert!(roots(&Poly::one()).is_err());
    }

    #[test]
    fn mixed_origin_and_nonzero_roots() {
        let p = Poly::from_roots(&[c(0.0, 0.0), c(0.0, 0.0), c(0.5, 0.5), c(-0.7, 0.1)]);
        let zs = roots(&p).unwrap();
        assert_eq!(zs.len(), 4);
        assert!(zs.residual < 1e-14);
    }

    #[test]
    fn triple_root_converges() {
        let p = Poly::from_roots(&[c(0.9, 0.0); 3]);
        let zs = roots(&p).unwrap();
        assert!(zs.roots.iter().all(|z| (z - c(0.9, 0.0)).norm() < 1e-4));
    }

    #[test]
    fn zero_measure_moment_examples() {
        let zs = ZeroSet {
            roots: vec![c(0.0, 0.0); 3],
            residual: 0.0,
        };
        assert_eq!(zero_measure_moment(&zs, 2), c(0.0, 0.0));
        assert_eq!(zero_measure_moment(&zs, 0), c(1.0, 0.0));
        let half = ZeroSet {
            roots: vec![c(0.5, 0.0)],
            residual: 0.0,
        };
        assert_eq!(zero_measure_moment(&half, 2), c(0.25, 0.0));
    }

    #[test]
    fn bernstein_examples() {
        let (l, r) = bernstein_check(&Poly::monomial(7), 512);
        assert!((l - 1.0).abs() < 1e-15 && (r - 1.0).abs() < 1e-15);
        assert_eq!(bernstein_check(&Poly::one(), 64), (0.0, 1.0));
    }

    #[test]
    fn turan_examples() {
        assert!((turan_check(&Poly::monomial(5), 512).unwrap() - 2.0).abs() < 1e-14);
        let cube = Poly::from_roots(&[c(0.9, 0.0); 3]);
        assert!(turan_check(&cube, 512).unwrap() >= 1.0);
        let outside = Poly::from_roots(&[c(2.0, 0.0)]);
        assert!(matches!(turan_check(&outside, 64), Err(Error::ZeroOutsideDisk { .. })));
    }

    #[test]
    fn hull_of_square_and_distance() {
        let pts = [c(0.0, 0.0), c(1.0, 0.0), c(1.0, 1.0), c(0.0, 1.0), c(0.5, 0.5)];
        let hull = convex_hull(&pts);
        assert_eq!(hull.len(), 4);
        assert_eq!(distance_to_hull(c(0.2, 0.7), &hull), 0.0);
        assert!((distance_to_hull(c(2.0, 0.5), &hull) - 1.0).abs() < 1e-15);
    }
}
