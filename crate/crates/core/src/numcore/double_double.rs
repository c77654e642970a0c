//! Double-double arithmetic built from error-free transformations.
//!
//! A value is the unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`, giving
//! roughly 106 bits of significand. Only the operations needed by the
//! Stieltjes procedure and the Airy/Bessel series are provided.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

#[derive(Copy, Clone, Default, PartialEq)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

/// Knuth's two-sum: `a + b = s + e` exactly.
#[inline]
pub fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

/// Requires `|a| >= |b|` (or `a == 0`).
#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let e = b - (s - a);
    (s, e)
}

/// `a * b = p + e` exactly, via fused multiply-add.
#[inline]
pub fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let e = a.mul_add(b, -p);
    (p, e)
}

impl DoubleDouble {
    pub const ZERO: Self = Self { hi: 0.0, lo: 0.0 };
    pub const ONE: Self = Self { hi: 1.0, lo: 0.0 };

    #[inline]
    pub const fn new(hi: f64, lo: f64) -> Self {
        Self { hi, lo }
    }

    #[inline]
    pub const fn from_f64(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    /// Normalizes an arbitrary pair so that `|lo| <= ulp(hi)/2`.
    #[inline]
    pub fn renormalized(hi: f64, lo: f64) -> Self {
        let (h, l) = two_sum(hi, lo);
        Self { hi: h, lo: l }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn abs(self) -> Self {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            -self
        } else {
            self
        }
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.hi.is_finite() && self.lo.is_finite()
    }

    #[inline]
    pub fn mul_f64(self, b: f64) -> Self {
        let (p, e) = two_prod(self.hi, b);
        let e = e + self.lo * b;
        let (hi, lo) = quick_two_sum(p, e);
        Self { hi, lo }
    }

    #[inline]
    pub fn add_f64(self, b: f64) -> Self {
        let (s, e) = two_sum(self.hi, b);
        let e = e + self.lo;
        let (hi, lo) = quick_two_sum(s, e);
        Self { hi, lo }
    }

    pub fn recip(self) -> Self {
        Self::ONE / self
    }

    /// Square root by one Newton correction of the native estimate.
    pub fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return if self.hi == 0.0 { Self::ZERO } else { Self::from_f64(f64::NAN) };
        }
        let x = self.hi.sqrt();
        let (p, e) = two_prod(x, x);
        let residual = ((self.hi - p) - e) + self.lo;
        Self::renormalized(x, residual / (2.0 * x))
    }

    /// Integer power by repeated squaring.
    pub fn powi(self, n: i32) -> Self {
        if n == 0 {
            return Self::ONE;
        }
        let mut base = if n < 0 { self.recip() } else { self };
        let mut k = n.unsigned_abs();
        let mut acc = Self::ONE;
        while k > 0 {
            if k & 1 == 1 {
                acc *= base;
            }
            base *= base;
            k >>= 1;
        }
        acc
    }
}

impl From<f64> for DoubleDouble {
    fn from(x: f64) -> Self {
        Self::from_f64(x)
    }
}

impl fmt::Debug for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DD({:e} + {:e})", self.hi, self.lo)
    }
}

impl fmt::Display for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.to_f64(), f)
    }
}

impl PartialOrd for DoubleDouble {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            ord => ord,
        }
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self { hi: -self.hi, lo: -self.lo }
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    #[inline]
    fn add(self, b: Self) -> Self {
        // accurate (IEEE-style) addition
        let (s1, s2) = two_sum(self.hi, b.hi);
        let (t1, t2) = two_sum(self.lo, b.lo);
        let s2 = s2 + t1;
        let (s1, s2) = quick_two_sum(s1, s2);
        let s2 = s2 + t2;
        let (hi, lo) = quick_two_sum(s1, s2);
        Self { hi, lo }
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    #[inline]
    fn sub(self, b: Self) -> Self {
        self + (-b)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    #[inline]
    fn mul(self, b: Self) -> Self {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Self { hi, lo }
    }
}

impl Div for DoubleDouble {
    type Output = Self;
    fn div(self, b: Self) -> Self {
        // long division with three quotient digits
        let q1 = self.hi / b.hi;
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Self { hi, lo }.add_f64(q3)
    }
}

impl AddAssign for DoubleDouble {
    #[inline]
    fn add_assign(&mut self, b: Self) {
        *self = *self + b;
    }
}

impl SubAssign for DoubleDouble {
    #[inline]
    fn sub_assign(&mut self, b: Self) {
        *self = *self - b;
    }
}

impl MulAssign for DoubleDouble {
    #[inline]
    fn mul_assign(&mut self, b: Self) {
        *self = *self * b;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const TOL: f64 = 7.888609052210118e-31; // 2^-100

    fn rel(a: DoubleDouble, b: DoubleDouble) -> f64 {
        ((a - b).to_f64() / b.to_f64()).abs()
    }

    #[test]
    fn third_times_three_is_one() {
        let third = DoubleDouble::ONE / DoubleDouble::from_f64(3.0);
        let back = third * DoubleDouble::from_f64(3.0);
        assert!((back - DoubleDouble::ONE).to_f64().abs() < 1e-31);
        // the low word actually carries information
        assert!(third.lo != 0.0);
    }

    #[test]
    fn sqrt_two_squared() {
        let r = DoubleDouble::from_f64(2.0).sqrt();
        assert!(((r * r) - DoubleDouble::from_f64(2.0)).to_f64().abs() < 1e-31);
    }

    #[test]
    fn powi_matches_repeated_product() {
        let x = DoubleDouble::from_f64(1.1);
        let mut p = DoubleDouble::ONE;
        for _ in 0..7 {
            p *= x;
        }
        assert!(rel(x.powi(7), p) < 1e-30);
        assert!(rel(x.powi(-2) * x * x, DoubleDouble::ONE) < 1e-30);
    }

    proptest! {
        #[test]
        fn add_then_subtract_recovers(m1 in 1.0f64..10.0, e1 in -10i32..10, m2 in 1.0f64..10.0, e2 in -10i32..10,
                                      s2 in proptest::bool::ANY) {
            let a = DoubleDouble::from_f64(m1 * 10f64.powi(e1)) / DoubleDouble::from_f64(3.0);
            let b = DoubleDouble::from_f64(if s2 { -m2 } else { m2 } * 10f64.powi(e2)) / DoubleDouble::from_f64(7.0);
            let back = (a + b) - b;
            // relative to the larger operand: cancellation is bounded by max(|a|,|b|)
            let scale = a.to_f64().abs().max(b.to_f64().abs());
            prop_assert!(((back - a).to_f64() / scale).abs() <= TOL * 4.0);
        }

        #[test]
        fn mul_then_divide_recovers(m1 in 1.0f64..10.0, e1 in -10i32..10, m2 in 1.0f64..10.0, e2 in -10i32..10) {
            let a = DoubleDouble::from_f64(m1 * 10f64.powi(e1)) / DoubleDouble::from_f64(3.0);
            let b = DoubleDouble::from_f64(m2 * 10f64.powi(e2)) / DoubleDouble::from_f64(7.0);
            prop_assert!(rel((a * b) / b, a) <= TOL * 4.0);
        }
    }
}
