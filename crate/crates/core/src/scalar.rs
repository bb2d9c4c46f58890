//! Numeric abstraction shared by every engine.
//!
//! Integer scalars (`i64`, `i128`) give exact arithmetic end to end; `f64`
//! trades exactness for range. All engines are generic over [`Scalar`].

use std::cmp::Ordering;
use std::fmt::{Debug, Display};
use std::ops::{Add, Mul, Neg, Sub};

pub trait Scalar:
    Copy
    + PartialOrd
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    const ZERO: Self;
    const ONE: Self;
    /// Whether `+`, `-`, `*` and comparisons are exact.
    const EXACT: bool;

    fn from_i64(v: i64) -> Self;
    fn to_f64(self) -> f64;

    /// Largest value not above `v`.
    fn floor_from_f64(v: f64) -> Self;
    /// Smallest value not below `v`.
    fn ceil_from_f64(v: f64) -> Self;

    /// Largest representable value strictly below `self`.
    fn pred(self) -> Self;

    /// Total order; inputs are never NaN.
    fn total_cmp(&self, other: &Self) -> Ordering;

    /// Compares `a * b` with `c * d` without overflow.
    fn cmp_products(a: Self, b: Self, c: Self, d: Self) -> Ordering;

    /// `floor(num / den)` for `den != 0`. Rounded division for floats.
    fn floor_div(num: Self, den: Self) -> Self;
    /// `ceil(num / den)` for `den != 0`. Rounded division for floats.
    fn ceil_div(num: Self, den: Self) -> Self;

    /// Integral value as `i128`, saturating for out-of-range floats.
    fn to_i128(self) -> i128;

    fn abs(self) -> Self {
        if self < Self::ZERO {
            -self
        } else {
            self
        }
    }

    fn is_zero(self) -> bool {
        self == Self::ZERO
    }

    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    /// Compares `a / b` with `c / d` for `b, d > 0`.
    fn cmp_frac(a: Self, b: Self, c: Self, d: Self) -> Ordering {
        Self::cmp_products(a, d, c, b)
    }

    /// Sign of the cross product `(a - o) x (b - o)`.
    fn orient(o: (Self, Self), a: (Self, Self), b: (Self, Self)) -> Ordering {
        Self::cmp_products(a.0 - o.0, b.1 - o.1, a.1 - o.1, b.0 - o.0)
    }

    /// Sign of the cross product of two vectors.
    fn cross_sign(u: (Self, Self), v: (Self, Self)) -> Ordering {
        Self::cmp_products(u.0, v.1, u.1, v.0)
    }
}

/// Exact nonnegative fraction `num / den` with `den > 0`.
#[derive(Clone, Copy, Debug)]
pub struct Frac<T> {
    pub num: T,
    pub den: T,
}

impl<T: Scalar> Frac<T> {
    pub fn new(num: T, den: T) -> Self {
        if den < T::ZERO {
            Self { num: -num, den: -den }
        } else {
            Self { num, den }
        }
    }

    pub fn cmp(&self, other: &Self) -> Ordering {
        T::cmp_frac(self.num, self.den, other.num, other.den)
    }

    pub fn to_f64(self) -> f64 {
        self.num.to_f64() / self.den.to_f64()
    }
}

impl<T: Scalar> PartialEq for Frac<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

macro_rules! int_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            const ZERO: Self = 0;
            const ONE: Self = 1;
            const EXACT: bool = true;

            fn from_i64(v: i64) -> Self {
                v as $t
            }

            fn to_f64(self) -> f64 {
                self as f64
            }

            fn floor_from_f64(v: f64) -> Self {
                v.floor() as $t
            }

            fn ceil_from_f64(v: f64) -> Self {
                v.ceil() as $t
            }

            fn pred(self) -> Self {
                self - 1
            }

            fn total_cmp(&self, other: &Self) -> Ordering {
                self.cmp(other)
            }

            fn cmp_products(a: Self, b: Self, c: Self, d: Self) -> Ordering {
                cmp_products_i128(a as i128, b as i128, c as i128, d as i128)
            }

            fn floor_div(num: Self, den: Self) -> Self {
                let q = num / den;
                if (num % den != 0) && ((num < 0) != (den < 0)) {
                    q - 1
                } else {
                    q
                }
            }

            fn ceil_div(num: Self, den: Self) -> Self {
                let q = num / den;
                if (num % den != 0) && ((num < 0) == (den < 0)) {
                    q + 1
                } else {
                    q
                }
            }

            fn to_i128(self) -> i128 {
                self as i128
            }
        }
    };
}

int_scalar!(i64);
int_scalar!(i128);

impl Scalar for f64 {
    const ZERO: Self = 0.0;
    const ONE: Self = 1.0;
    const EXACT: bool = false;

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn to_f64(self) -> f64 {
        self
    }

    fn floor_from_f64(v: f64) -> Self {
        v
    }

    fn ceil_from_f64(v: f64) -> Self {
        v
    }

    fn pred(self) -> Self {
        self.next_down()
    }

    fn total_cmp(&self, other: &Self) -> Ordering {
        f64::total_cmp(self, other)
    }

    fn cmp_products(a: Self, b: Self, c: Self, d: Self) -> Ordering {
        (a * b).total_cmp(&(c * d))
    }

    fn floor_div(num: Self, den: Self) -> Self {
        (num / den).floor()
    }

    fn ceil_div(num: Self, den: Self) -> Self {
        (num / den).ceil()
    }

    fn to_i128(self) -> i128 {
        self as i128
    }
}

/// 128x128 -> 256 bit unsigned product as (high, low).
fn widening_mul(a: u128, b: u128) -> (u128, u128) {
    const MASK: u128 = u64::MAX as u128;
    let (a_hi, a_lo) = (a >> 64, a & MASK);
    let (b_hi, b_lo) = (b >> 64, b & MASK);
    let ll = a_lo * b_lo;
    let lh = a_lo * b_hi;
    let hl = a_hi * b_lo;
    let hh = a_hi * b_hi;
    let mid = (ll >> 64) + (lh & MASK) + (hl & MASK);
    let lo = (ll & MASK) | (mid << 64);
    let hi = hh + (lh >> 64) + (hl >> 64) + (mid >> 64);
    (hi, lo)
}

fn cmp_products_i128(a: i128, b: i128, c: i128, d: i128) -> Ordering {
    if let (Some(x), Some(y)) = (a.checked_mul(b), c.checked_mul(d)) {
        return x.cmp(&y);
    }
    let sign = |p: i128, q: i128| -> i8 {
        if p == 0 || q == 0 {
            0
        } else if (p < 0) == (q < 0) {
            1
        } else {
            -1
        }
    };
    let (s1, s2) = (sign(a, b), sign(c, d));
    if s1 != s2 {
        return s1.cmp(&s2);
    }
    if s1 == 0 {
        return Ordering::Equal;
    }
    let m1 = widening_mul(a.unsigned_abs(), b.unsigned_abs());
    let m2 = widening_mul(c.unsigned_abs(), d.unsigned_abs());
    if s1 > 0 {
        m1.cmp(&m2)
    } else {
        m2.cmp(&m1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floor_and_ceil_division_round_toward_infinities() {
        assert_eq!(i64::floor_div(7, 2), 3);
        assert_eq!(i64::floor_div(-7, 2), -4);
        assert_eq!(i64::floor_div(7, -2), -4);
        assert_eq!(i64::ceil_div(7, 2), 4);
        assert_eq!(i64::ceil_div(-7, 2), -3);
        assert_eq!(i64::ceil_div(6, 3), 2);
        assert_eq!(i128::floor_div(-6, 3), -2);
    }

    #[test]
    fn wide_products_compare_exactly() {
        let big = i128::MAX / 3;
        assert_eq!(i128::cmp_products(big, 5, big, 4), Ordering::Greater);
        assert_eq!(i128::cmp_products(-big, 5, big, 4), Ordering::Less);
        assert_eq!(i128::cmp_products(-big, -5, big, 5), Ordering::Equal);
        assert_eq!(i128::cmp_products(0, big, -1, big), Ordering::Greater);
        // (2^100 + 1) * 2^27 vs 2^127 - 1 is decided by the low bits.
        let x = (1i128 << 100) + 1;
        assert_eq!(i128::cmp_products(x, 1 << 27, 1 << 126, 2), Ordering::Greater);
    }

    #[test]
    fn fraction_ordering_ignores_representation() {
        let a = Frac::new(2i64, 4);
        let b = Frac::new(-1i64, -2);
        assert!(a == b);
        assert_eq!(Frac::new(1i64, 3).cmp(&Frac::new(1, 2)), Ordering::Less);
    }

    #[test]
    fn pred_is_the_next_value_down() {
        assert_eq!(5i64.pred(), 4);
        let v = 1.5f64;
        assert!(v.pred() < v);
        assert!((v.pred() + f64::EPSILON) >= v);
    }
}
