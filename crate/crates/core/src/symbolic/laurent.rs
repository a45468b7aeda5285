//! Univariate Laurent polynomials with dense extended-precision coefficients.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rug::Float;

use super::ext_real::{ExtReal, MIN_PRECISION};
use crate::error::{AimError, Result};

/// `coeffs[i]` multiplies `u^(min_exp + i)`.
///
/// The first and last stored coefficients are nonzero; the zero polynomial
/// is the empty vector with `min_exp == 0`. Only exact zeros are trimmed.
#[derive(Clone, PartialEq, Default)]
pub struct LaurentPoly {
    min_exp: i32,
    coeffs: Vec<ExtReal>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: ExtReal) -> Self {
        Self::monomial(c, 0)
    }

    pub fn monomial(c: ExtReal, exp: i32) -> Self {
        Self::from_dense(exp, vec![c])
    }

    /// Builds from a dense coefficient run starting at `min_exp`.
    pub fn from_dense(min_exp: i32, coeffs: Vec<ExtReal>) -> Self {
        let mut p = LaurentPoly { min_exp, coeffs };
        p.normalize();
        p
    }

    /// Builds from `(exponent, coefficient)` terms; repeated exponents are summed.
    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = (i32, ExtReal)>,
    {
        let terms: Vec<(i32, ExtReal)> = terms.into_iter().collect();
        let Some(lo) = terms.iter().map(|t| t.0).min() else {
            return Self::zero();
        };
        let hi = terms.iter().map(|t| t.0).max().unwrap();
        let prec = terms.iter().map(|t| t.1.precision()).max().unwrap();
        let mut coeffs = vec![ExtReal::zero(prec); (hi - lo + 1) as usize];
        for (e, c) in terms {
            coeffs[(e - lo) as usize] += &c;
        }
        Self::from_dense(lo, coeffs)
    }

    fn normalize(&mut self) {
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead == self.coeffs.len() {
            self.coeffs.clear();
            self.min_exp = 0;
            return;
        }
        let trail = self.coeffs.iter().rev().take_while(|c| c.is_zero()).count();
        self.coeffs.truncate(self.coeffs.len() - trail);
        self.coeffs.drain(..lead);
        self.min_exp += lead as i32;
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Lowest stored exponent (0 for the zero polynomial).
    pub fn min_exp(&self) -> i32 {
        self.min_exp
    }

    /// Highest exponent with a nonzero coefficient.
    pub fn max_exp(&self) -> Option<i32> {
        if self.is_zero() {
            None
        } else {
            Some(self.min_exp + self.coeffs.len() as i32 - 1)
        }
    }

    pub fn coeffs(&self) -> &[ExtReal] {
        &self.coeffs
    }

    /// Coefficient of `u^exp` (zero when absent).
    pub fn coeff(&self, exp: i32) -> ExtReal {
        let idx = exp - self.min_exp;
        if idx < 0 || idx as usize >= self.coeffs.len() {
            ExtReal::zero(self.precision())
        } else {
            self.coeffs[idx as usize].clone()
        }
    }

    /// Widest coefficient precision (53 for the zero polynomial).
    pub fn precision(&self) -> u32 {
        self.coeffs
            .iter()
            .map(ExtReal::precision)
            .max()
            .unwrap_or(MIN_PRECISION)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, &ExtReal)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(i, c)| (self.min_exp + i as i32, c))
    }

    pub fn add(&self, other: &LaurentPoly) -> LaurentPoly {
        self.combine(other, false)
    }

    pub fn sub(&self, other: &LaurentPoly) -> LaurentPoly {
        self.combine(other, true)
    }

    fn combine(&self, other: &LaurentPoly, subtract: bool) -> LaurentPoly {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return if subtract { other.negate() } else { other.clone() };
        }
        let lo = self.min_exp.min(other.min_exp);
        let hi = self.max_exp().unwrap().max(other.max_exp().unwrap());
        let prec = self.precision().max(other.precision());
        let mut out: Vec<Float> = vec![Float::new(prec); (hi - lo + 1) as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[(self.min_exp - lo) as usize + i] += c.as_float();
        }
        for (i, c) in other.coeffs.iter().enumerate() {
            let slot = &mut out[(other.min_exp - lo) as usize + i];
            if subtract {
                *slot -= c.as_float();
            } else {
                *slot += c.as_float();
            }
        }
        LaurentPoly::from_dense(lo, out.into_iter().map(ExtReal::from_float).collect())
    }

    pub fn negate(&self) -> LaurentPoly {
        LaurentPoly {
            min_exp: self.min_exp,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn scale(&self, factor: &ExtReal) -> LaurentPoly {
        LaurentPoly::from_dense(self.min_exp, self.coeffs.iter().map(|c| c * factor).collect())
    }

    /// Product; each output coefficient is accumulated with fused multiply-adds.
    pub fn mul(&self, other: &LaurentPoly) -> LaurentPoly {
        if self.is_zero() || other.is_zero() {
            return LaurentPoly::zero();
        }
        let prec = self.precision().max(other.precision());
        let mut out: Vec<Float> = vec![Float::new(prec); self.coeffs.len() + other.coeffs.len() - 1];
        // Iterate the sparser factor in the outer loop.
        let (outer, inner) = if self.coeffs.len() <= other.coeffs.len() {
            (self, other)
        } else {
            (other, self)
        };
        for (i, a) in outer.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let a = a.as_float();
            for (j, b) in inner.coeffs.iter().enumerate() {
                out[i + j] += a * b.as_float();
            }
        }
        LaurentPoly::from_dense(
            self.min_exp + other.min_exp,
            out.into_iter().map(ExtReal::from_float).collect(),
        )
    }

    /// d/du, term by term: `c u^e -> c e u^(e-1)`.
    pub fn differentiate(&self) -> LaurentPoly {
        if self.is_zero() {
            return LaurentPoly::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let e = self.min_exp + i as i32;
                let mut f = c.as_float().clone();
                f *= e;
                ExtReal::from_float(f)
            })
            .collect();
        LaurentPoly::from_dense(self.min_exp - 1, coeffs)
    }

    /// Value at `u0`. Nonnegative and negative powers are each summed by
    /// Horner's rule (in `u0` and `1/u0` respectively).
    pub fn evaluate(&self, u0: &ExtReal) -> Result<ExtReal> {
        if self.min_exp < 0 && !u0.is_positive() {
            return Err(AimError::Domain(format!(
                "Laurent polynomial with u^{} term evaluated at u = {}",
                self.min_exp, u0
            )));
        }
        let prec = self.precision().max(u0.precision());
        let x = u0.as_float();
        let mut pos = Float::new(prec);
        let mut neg = Float::new(prec);
        let Some(max_exp) = self.max_exp() else {
            return Ok(ExtReal::from_float(pos));
        };
        let at = |e: i32| -> Option<&Float> {
            let idx = e - self.min_exp;
            (idx >= 0 && (idx as usize) < self.coeffs.len()).then(|| self.coeffs[idx as usize].as_float())
        };
        for e in (0..=max_exp).rev() {
            pos *= x;
            if let Some(c) = at(e) {
                pos += c;
            }
        }
        if self.min_exp < 0 {
            let inv = Float::with_val(prec, x.recip_ref());
            for e in self.min_exp..0 {
                if let Some(c) = at(e) {
                    neg += c;
                }
                neg *= &inv;
            }
        }
        pos += &neg;
        Ok(ExtReal::from_float(pos))
    }

    /// Same as [`evaluate`](Self::evaluate) but with an `f64` argument.
    pub fn evaluate_f64(&self, u0: f64) -> Result<ExtReal> {
        self.evaluate(&ExtReal::from_f64(u0, self.precision()))
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        LaurentPoly::add(self, rhs)
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        LaurentPoly::sub(self, rhs)
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        LaurentPoly::mul(self, rhs)
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        self.negate()
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms().collect::<Vec<_>>().into_iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({})u^{}", c.to_sig_string(12), e)?;
        }
        Ok(())
    }
}
