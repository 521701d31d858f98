//! Compensated accumulation helpers.

use num_complex::Complex64;

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = NeumaierSum::new();
        for v in iter {
            s.add(v);
        }
        s
    }
}

/// Componentwise compensated sum of complex values.
#[derive(Debug, Clone, Copy, Default)]
pub struct ComplexSum {
    re: NeumaierSum,
    im: NeumaierSum,
}

impl ComplexSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, v: Complex64) {
        self.re.add(v.re);
        self.im.add(v.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

/// Complex dot product with error-free products (`fma`) and compensated sums,
/// accurate as if computed in twice the working precision.
#[derive(Debug, Clone, Copy, Default)]
pub struct ComplexDot {
    re: NeumaierSum,
    im: NeumaierSum,
}

impl ComplexDot {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    fn push(acc: &mut NeumaierSum, a: f64, b: f64) {
        let p = a * b;
        acc.add(p);
        acc.comp += a.mul_add(b, -p);
    }

    /// Adds `a · b`.
    #[inline]
    pub fn add_product(&mut self, a: Complex64, b: Complex64) {
        Self::push(&mut self.re, a.re, b.re);
        Self::push(&mut self.re, -a.im, b.im);
        Self::push(&mut self.im, a.re, b.im);
        Self::push(&mut self.im, a.im, b.re);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

impl FromIterator<Complex64> for ComplexSum {
    fn from_iter<I: IntoIterator<Item = Complex64>>(iter: I) -> Self {
        let mut s = ComplexSum::new();
        for v in iter {
            s.add(v);
        }
        s
    }
}

/// Unevaluated sum `hi + lo` carrying about 32 significant digits.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

impl DoubleDouble {
    pub const ZERO: DoubleDouble = DoubleDouble { hi: 0.0, lo: 0.0 };

    pub fn from_f64(v: f64) -> Self {
        DoubleDouble { hi: v, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn add(self, o: Self) -> Self {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        DoubleDouble { hi, lo }
    }

    pub fn neg(self) -> Self {
        DoubleDouble {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    pub fn sub(self, o: Self) -> Self {
        self.add(o.neg())
    }

    pub fn mul(self, o: Self) -> Self {
        let p = self.hi * o.hi;
        let e = self.hi.mul_add(o.hi, -p) + (self.hi * o.lo + self.lo * o.hi);
        let (hi, lo) = quick_two_sum(p, e);
        DoubleDouble { hi, lo }
    }

    pub fn div(self, o: Self) -> Self {
        let q1 = self.hi / o.hi;
        let r = self.sub(o.mul(Self::from_f64(q1)));
        let q2 = r.hi / o.hi;
        let r = r.sub(o.mul(Self::from_f64(q2)));
        let q3 = r.hi / o.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        DoubleDouble { hi, lo }.add(Self::from_f64(q3))
    }
}

/// Complex number with double-double parts.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ComplexDD {
    pub re: DoubleDouble,
    pub im: DoubleDouble,
}

impl ComplexDD {
    pub const ZERO: ComplexDD = ComplexDD {
        re: DoubleDouble::ZERO,
        im: DoubleDouble::ZERO,
    };

    pub fn from_c64(z: Complex64) -> Self {
        ComplexDD {
            re: DoubleDouble::from_f64(z.re),
            im: DoubleDouble::from_f64(z.im),
        }
    }

    pub fn to_c64(self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    pub fn add(self, o: Self) -> Self {
        ComplexDD {
            re: self.re.add(o.re),
            im: self.im.add(o.im),
        }
    }

    pub fn sub(self, o: Self) -> Self {
        ComplexDD {
            re: self.re.sub(o.re),
            im: self.im.sub(o.im),
        }
    }

    pub fn mul(self, o: Self) -> Self {
        ComplexDD {
            re: self.re.mul(o.re).sub(self.im.mul(o.im)),
            im: self.re.mul(o.im).add(self.im.mul(o.re)),
        }
    }

    pub fn conj(self) -> Self {
        ComplexDD {
            re: self.re,
            im: self.im.neg(),
        }
    }

    pub fn div_real(self, d: DoubleDouble) -> Self {
        ComplexDD {
            re: self.re.div(d),
            im: self.im.div(d),
        }
    }

    pub fn norm_sqr(self) -> DoubleDouble {
        self.re.mul(self.re).add(self.im.mul(self.im))
    }
}

pub fn sum(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().collect::<NeumaierSum>().value()
}

pub fn csum(values: impl IntoIterator<Item = Complex64>) -> Complex64 {
    values.into_iter().collect::<ComplexSum>().value()
}

/// Median of a slice (NaNs sort last). Returns `None` for an empty slice.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let m = v.len() / 2;
    Some(if v.len() % 2 == 1 { v[m] } else { 0.5 * (v[m - 1] + v[m]) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neumaier_recovers_cancelled_terms() {
        let vals = [1.0, 1e100, 1.0, -1e100];
        assert_eq!(sum(vals), 2.0);
        let naive: f64 = vals.iter().sum();
        assert_eq!(naive, 0.0);
    }

    #[test]
    fn double_double_keeps_low_bits() {
        let third = DoubleDouble::from_f64(1.0).div(DoubleDouble::from_f64(3.0));
        let back = third.mul(DoubleDouble::from_f64(3.0)).sub(DoubleDouble::from_f64(1.0));
        assert!(back.to_f64().abs() < 1e-30);
        let tiny = DoubleDouble::from_f64(1.0).add(DoubleDouble::from_f64(1e-20));
        assert_eq!(tiny.sub(DoubleDouble::from_f64(1.0)).to_f64(), 1e-20);
    }

    #[test]
    fn complex_sum_is_componentwise() {
        let vals = [
            Complex64::new(1.0, 1e100),
            Complex64::new(1e100, 1.0),
            Complex64::new(-1e100, -1e100),
        ];
        assert_eq!(csum(vals), Complex64::new(1.0, 1.0));
    }

    #[test]
    fn median_even_and_odd() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), Some(2.5));
        assert_eq!(median(&[]), None);
    }
}
