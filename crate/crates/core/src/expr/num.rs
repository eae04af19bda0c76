use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

pub type Rational = BigRational;

/// Values a polynomial can be evaluated in: exact rationals or doubles.
pub trait Numeric:
    Clone
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
{
    fn from_rational(q: &Rational) -> Self;
    fn zero_value() -> Self;
    fn one_value() -> Self;
    fn as_f64(&self) -> f64;
    fn is_exact_zero(&self) -> bool;

    fn powu(&self, e: u32) -> Self {
        let mut acc = Self::one_value();
        for _ in 0..e {
            acc = acc * self.clone();
        }
        acc
    }
}

impl Numeric for Rational {
    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }
    fn zero_value() -> Self {
        Zero::zero()
    }
    fn one_value() -> Self {
        One::one()
    }
    fn as_f64(&self) -> f64 {
        ratio_to_f64(self)
    }
    fn is_exact_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn powu(&self, e: u32) -> Self {
        num_traits::pow(self.clone(), e as usize)
    }
}

impl Numeric for f64 {
    fn from_rational(q: &Rational) -> Self {
        ratio_to_f64(q)
    }
    fn zero_value() -> Self {
        0.0
    }
    fn one_value() -> Self {
        1.0
    }
    fn as_f64(&self) -> f64 {
        *self
    }
    fn is_exact_zero(&self) -> bool {
        *self == 0.0
    }
    fn powu(&self, e: u32) -> Self {
        self.powi(e as i32)
    }
}

pub fn ratio_to_f64(q: &Rational) -> f64 {
    ToPrimitive::to_f64(q).unwrap_or_else(|| {
        let n = q.numer().to_f64().unwrap_or(f64::NAN);
        let d = q.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

/// Prints `p` or `p/q`, the literal form the DSL accepts.
pub fn fmt_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}
