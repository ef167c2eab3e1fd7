//! Scalar types.
//!
//! Structured specs are handled in exact rationals ([`Rational`]); black-box
//! paths run in `f64`. [`Value`] carries either and degrades to floating point
//! as soon as one operand is approximate.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

/// Arithmetic needed by set functions, multilinear polynomials and the
/// conversion formulas between bases.
pub trait Scalar:
    Clone
    + fmt::Debug
    + PartialEq
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Send
    + Sync
{
    fn from_ratio(num: i64, den: i64) -> Self;

    fn to_f64(&self) -> f64;

    fn from_int(v: i64) -> Self {
        Self::from_ratio(v, 1)
    }

    fn powi(&self, exp: usize) -> Self {
        let mut acc = Self::one();
        for _ in 0..exp {
            acc = acc * self.clone();
        }
        acc
    }
}

impl Scalar for f64 {
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn powi(&self, exp: usize) -> Self {
        f64::powi(*self, exp as i32)
    }
}

impl Scalar for Rational {
    fn from_ratio(num: i64, den: i64) -> Self {
        Rational::new(BigInt::from(num), BigInt::from(den))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn powi(&self, exp: usize) -> Self {
        num_traits::pow(self.clone(), exp)
    }
}

/// Shorthand for a small rational constant.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::from_ratio(num, den)
}

/// Exact conversion of a finite `f64` (every finite double is a dyadic rational).
pub fn rational_from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

/// Formats a rational as `p` or `p/q`.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// An index or coefficient value: exact when every input on its path was exact.
#[derive(Clone, Debug)]
pub enum Value {
    Exact(Rational),
    Approx(f64),
}

impl Value {
    pub fn exact(&self) -> Option<&Rational> {
        match self {
            Value::Exact(r) => Some(r),
            Value::Approx(_) => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Value::Exact(_))
    }

    /// Exact rational image; approximate values convert exactly from their
    /// binary representation.
    pub fn to_rational(&self) -> Option<Rational> {
        match self {
            Value::Exact(r) => Some(r.clone()),
            Value::Approx(x) => rational_from_f64(*x),
        }
    }

    pub fn abs(&self) -> Value {
        match self {
            Value::Exact(r) => Value::Exact(r.abs()),
            Value::Approx(x) => Value::Approx(x.abs()),
        }
    }
}

impl From<Rational> for Value {
    fn from(r: Rational) -> Self {
        Value::Exact(r)
    }
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Approx(x)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Exact(r) => f.write_str(&format_rational(r)),
            Value::Approx(x) => write!(f, "{x}"),
        }
    }
}

impl PartialEq for Value {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Value::Exact(a), Value::Exact(b)) => a == b,
            _ => self.to_f64() == other.to_f64(),
        }
    }
}

macro_rules! value_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Value {
            type Output = Value;
            fn $method(self, rhs: Value) -> Value {
                match (self, rhs) {
                    (Value::Exact(a), Value::Exact(b)) => Value::Exact(a.$method(b)),
                    (a, b) => Value::Approx(a.to_f64().$method(b.to_f64())),
                }
            }
        }
    };
}

value_binop!(Add, add);
value_binop!(Sub, sub);
value_binop!(Mul, mul);
value_binop!(Div, div);

impl Neg for Value {
    type Output = Value;
    fn neg(self) -> Value {
        match self {
            Value::Exact(a) => Value::Exact(-a),
            Value::Approx(x) => Value::Approx(-x),
        }
    }
}

impl Zero for Value {
    fn zero() -> Self {
        Value::Exact(Rational::zero())
    }

    fn is_zero(&self) -> bool {
        match self {
            Value::Exact(r) => r.is_zero(),
            Value::Approx(x) => *x == 0.0,
        }
    }
}

impl One for Value {
    fn one() -> Self {
        Value::Exact(Rational::one())
    }
}

impl Scalar for Value {
    fn from_ratio(num: i64, den: i64) -> Self {
        Value::Exact(ratio(num, den))
    }

    fn to_f64(&self) -> f64 {
        match self {
            Value::Exact(r) => Scalar::to_f64(r),
            Value::Approx(x) => *x,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exactness_is_contagious_only_downward() {
        let a = Value::from(ratio(1, 3));
        let b = Value::from(ratio(2, 3));
        assert_eq!(a.clone() + b, Value::Exact(ratio(1, 1)));
        let c = a + Value::Approx(0.5);
        assert!(!c.is_exact());
        assert!((c.to_f64() - (1.0 / 3.0 + 0.5)).abs() < 1e-15);
    }

    #[test]
    fn rational_formatting() {
        assert_eq!(format_rational(&ratio(-1, 4)), "-1/4");
        assert_eq!(format_rational(&ratio(6, 3)), "2");
    }

    #[test]
    fn float_to_rational_is_exact() {
        let r = rational_from_f64(0.1).unwrap();
        assert_eq!(Scalar::to_f64(&r), 0.1);
        assert!(rational_from_f64(f64::NAN).is_none());
    }
}
