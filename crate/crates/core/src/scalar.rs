//! Numeric abstraction shared by every solver.
//!
//! Costs, multipliers and LP values are all carried by a [`Scalar`]. The exact
//! instantiation ([`crate::Rational`]) makes every comparison against a proven
//! bound exact; the floating instantiations trade that for speed and compare
//! with a small absolute tolerance.

use std::cmp::Ordering;
use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};

pub trait Scalar: Clone + Debug + Display + PartialOrd + Num + Signed + FromPrimitive + ToPrimitive + Send + Sync + 'static {
    /// Whether arithmetic on this type is exact.
    const EXACT: bool;

    /// Absolute slack for feasibility and bound checks; zero for exact types.
    fn tolerance() -> Self;

    /// Parses an integer, a decimal (`1.25`) or a fraction (`5/4`).
    fn parse_literal(s: &str) -> Option<Self>;

    /// Lossless textual form: `p/q` for rationals, shortest round-trip for floats.
    fn to_exact_string(&self) -> String;

    fn from_weight(w: u64) -> Self {
        Self::from_u64(w).expect("weight representable")
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_i64(num).expect("integer representable") / Self::from_i64(den).expect("integer representable")
    }

    fn approx_f64(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Total order; incomparable values (NaN) compare equal.
    fn total_cmp(&self, other: &Self) -> Ordering {
        self.partial_cmp(other).unwrap_or(Ordering::Equal)
    }

    /// `self <= other` up to the type's tolerance.
    fn le_tol(&self, other: &Self) -> bool {
        *self <= other.clone() + Self::tolerance()
    }

    /// `self > other` beyond the type's tolerance.
    fn gt_tol(&self, other: &Self) -> bool {
        !self.le_tol(other)
    }

    fn is_positive_tol(&self) -> bool {
        *self > Self::tolerance()
    }

    fn min_of(a: Self, b: Self) -> Self {
        if b < a {
            b
        } else {
            a
        }
    }

    fn max_of(a: Self, b: Self) -> Self {
        if b > a {
            b
        } else {
            a
        }
    }
}

fn split_fraction(s: &str) -> Option<(&str, &str)> {
    let (n, d) = s.split_once('/')?;
    Some((n.trim(), d.trim()))
}

fn parse_decimal_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    if body.is_empty() {
        return None;
    }
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let numer: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().ok()? };
    let denom = num_traits::pow(BigInt::from(10u32), frac_part.len());
    let value = BigRational::new(numer, denom);
    Some(if neg { -value } else { value })
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn tolerance() -> Self {
        BigRational::zero()
    }

    fn parse_literal(s: &str) -> Option<Self> {
        match split_fraction(s) {
            Some((n, d)) => {
                let n: BigInt = n.parse().ok()?;
                let d: BigInt = d.parse().ok()?;
                if d.is_zero() {
                    return None;
                }
                Some(BigRational::new(n, d))
            }
            None => parse_decimal_rational(s),
        }
    }

    fn to_exact_string(&self) -> String {
        if self.denom().is_one() {
            self.numer().to_string()
        } else {
            format!("{}/{}", self.numer(), self.denom())
        }
    }
}

macro_rules! float_scalar {
    ($t:ty, $tol:expr) => {
        impl Scalar for $t {
            const EXACT: bool = false;

            fn tolerance() -> Self {
                $tol
            }

            fn parse_literal(s: &str) -> Option<Self> {
                match split_fraction(s) {
                    Some((n, d)) => {
                        let n: $t = n.parse().ok()?;
                        let d: $t = d.parse().ok()?;
                        if d == 0.0 {
                            return None;
                        }
                        Some(n / d)
                    }
                    None => s.trim().parse().ok().filter(|v: &$t| v.is_finite()),
                }
            }

            fn to_exact_string(&self) -> String {
                format!("{}", self)
            }
        }
    };
}

float_scalar!(f64, 1e-9);
float_scalar!(f32, 1e-4);
