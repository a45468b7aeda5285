//! Extended-precision real scalar backed by MPFR.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use rug::float::Round;
use rug::ops::Pow;
use rug::Float;

use crate::error::{AimError, Result};

/// Default significand width in bits.
pub const DEFAULT_PRECISION: u32 = 192;
/// Smallest supported significand width (IEEE double).
pub const MIN_PRECISION: u32 = 53;

/// Arbitrary-precision real number.
///
/// Binary operations run at the larger of the two operand precisions.
#[derive(Clone, PartialEq, PartialOrd)]
pub struct ExtReal(Float);

fn clamp_prec(prec: u32) -> u32 {
    prec.max(MIN_PRECISION)
}

impl ExtReal {
    pub fn zero(prec: u32) -> Self {
        ExtReal(Float::new(clamp_prec(prec)))
    }

    pub fn one(prec: u32) -> Self {
        Self::from_i64(1, prec)
    }

    pub fn from_f64(value: f64, prec: u32) -> Self {
        ExtReal(Float::with_val(clamp_prec(prec), value))
    }

    pub fn from_i64(value: i64, prec: u32) -> Self {
        ExtReal(Float::with_val(clamp_prec(prec), value))
    }

    /// Ratio of two integers, rounded once at `prec`.
    pub fn from_ratio(num: i64, den: i64, prec: u32) -> Self {
        let p = clamp_prec(prec);
        ExtReal(Float::with_val(p, num) / Float::with_val(p, den))
    }

    /// Parses a decimal literal exactly to `prec` bits (so "0.1" is not the
    /// binary double nearest to 0.1).
    pub fn parse(text: &str, prec: u32) -> Result<Self> {
        let parsed = Float::parse(text.trim())
            .map_err(|e| AimError::Parse(format!("{text:?}: {e}")))?;
        let value = Float::with_val(clamp_prec(prec), parsed);
        if !value.is_finite() {
            return Err(AimError::Parse(format!("{text:?} is not a finite number")));
        }
        Ok(ExtReal(value))
    }

    pub fn from_float(value: Float) -> Self {
        if value.prec() < MIN_PRECISION {
            let p = MIN_PRECISION;
            return ExtReal(Float::with_val(p, value));
        }
        ExtReal(value)
    }

    pub fn as_float(&self) -> &Float {
        &self.0
    }

    pub fn into_float(self) -> Float {
        self.0
    }

    pub fn precision(&self) -> u32 {
        self.0.prec()
    }

    /// Copy rounded (or widened) to `prec` bits.
    pub fn with_precision(&self, prec: u32) -> Self {
        ExtReal(Float::with_val(clamp_prec(prec), &self.0))
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.0.is_finite()
    }

    pub fn is_sign_negative(&self) -> bool {
        self.0.is_sign_negative() && !self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_sign_positive() && !self.0.is_zero() && !self.0.is_nan()
    }

    /// -1, 0 or +1.
    pub fn signum(&self) -> i8 {
        match self.0.cmp0() {
            Some(Ordering::Less) => -1,
            Some(Ordering::Greater) => 1,
            _ => 0,
        }
    }

    pub fn abs(&self) -> Self {
        ExtReal(self.0.clone().abs())
    }

    pub fn sqrt(&self) -> Self {
        ExtReal(self.0.clone().sqrt())
    }

    pub fn ln(&self) -> Self {
        ExtReal(self.0.clone().ln())
    }

    pub fn exp(&self) -> Self {
        ExtReal(self.0.clone().exp())
    }

    pub fn recip(&self) -> Self {
        ExtReal(self.0.clone().recip())
    }

    pub fn square(&self) -> Self {
        ExtReal(self.0.clone().square())
    }

    pub fn powi(&self, exp: i32) -> Self {
        ExtReal(Float::with_val(self.precision(), (&self.0).pow(exp)))
    }

    pub fn powf(&self, exp: &ExtReal) -> Self {
        let p = self.precision().max(exp.precision());
        ExtReal(Float::with_val(p, (&self.0).pow(&exp.0)))
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    pub fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    /// Errors unless the value is finite.
    pub fn finite_or(self, what: &str) -> Result<Self> {
        if self.is_finite() {
            Ok(self)
        } else {
            Err(AimError::PrecisionExhausted(format!(
                "{what} is not finite at {} bits; increase the working precision",
                self.precision()
            )))
        }
    }

    /// Decimal rendering with `digits` significant digits.
    pub fn to_sig_string(&self, digits: usize) -> String {
        if self.0.is_zero() {
            return "0".to_string();
        }
        let (neg, mantissa, exp) = match self.0.to_sign_string_exp_round(10, Some(digits), Round::Nearest) {
            (neg, m, Some(e)) => (neg, m, e),
            (neg, m, None) => (neg, m, 0),
        };
        let mantissa = mantissa.trim_end_matches('0').to_string();
        let mantissa = if mantissa.is_empty() { "0".to_string() } else { mantissa };
        // value = 0.mantissa * 10^exp
        let sign = if neg { "-" } else { "" };
        let point = exp;
        let body = if point <= 0 {
            format!("0.{}{}", "0".repeat(point.unsigned_abs() as usize), mantissa)
        } else if point as usize >= mantissa.len() {
            format!("{}{}", mantissa, "0".repeat(point as usize - mantissa.len()))
        } else {
            let (int, frac) = mantissa.split_at(point as usize);
            format!("{int}.{frac}")
        };
        let body = if body.contains('.') {
            body.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            body
        };
        format!("{sign}{body}")
    }
}

impl fmt::Debug for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ExtReal({}; {} bits)", self.to_sig_string(20), self.precision())
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(20);
        f.pad(&self.to_sig_string(digits.max(1)))
    }
}

impl FromStr for ExtReal {
    type Err = AimError;

    fn from_str(s: &str) -> Result<Self> {
        ExtReal::parse(s, DEFAULT_PRECISION)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait<&ExtReal> for &ExtReal {
            type Output = ExtReal;
            fn $method(self, rhs: &ExtReal) -> ExtReal {
                let p = self.0.prec().max(rhs.0.prec());
                ExtReal(Float::with_val(p, &self.0 $op &rhs.0))
            }
        }
        impl $trait<ExtReal> for ExtReal {
            type Output = ExtReal;
            fn $method(self, rhs: ExtReal) -> ExtReal {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&ExtReal> for ExtReal {
            type Output = ExtReal;
            fn $method(self, rhs: &ExtReal) -> ExtReal {
                (&self).$method(rhs)
            }
        }
        impl $trait<ExtReal> for &ExtReal {
            type Output = ExtReal;
            fn $method(self, rhs: ExtReal) -> ExtReal {
                self.$method(&rhs)
            }
        }
        impl $trait<f64> for &ExtReal {
            type Output = ExtReal;
            fn $method(self, rhs: f64) -> ExtReal {
                ExtReal(Float::with_val(self.0.prec(), &self.0 $op rhs))
            }
        }
        impl $trait<f64> for ExtReal {
            type Output = ExtReal;
            fn $method(self, rhs: f64) -> ExtReal {
                (&self).$method(rhs)
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);
binop!(Div, div, /);

impl AddAssign<&ExtReal> for ExtReal {
    fn add_assign(&mut self, rhs: &ExtReal) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&ExtReal> for ExtReal {
    fn sub_assign(&mut self, rhs: &ExtReal) {
        *self = &*self - rhs;
    }
}

impl MulAssign<&ExtReal> for ExtReal {
    fn mul_assign(&mut self, rhs: &ExtReal) {
        *self = &*self * rhs;
    }
}

impl Neg for ExtReal {
    type Output = ExtReal;
    fn neg(self) -> ExtReal {
        ExtReal(-self.0)
    }
}

impl Neg for &ExtReal {
    type Output = ExtReal;
    fn neg(self) -> ExtReal {
        ExtReal(-self.0.clone())
    }
}
