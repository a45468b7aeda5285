use crate::error::{AimError, Result};
use crate::symbolic::{ExtReal, LaurentPoly};

use super::AimOde;

/// Largest iteration at which plain double precision is accepted.
const DOUBLE_PRECISION_MAX_K: usize = 25;

/// `(lambda_k, s_k)` at recurrence index `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct AimPair {
    pub k: usize,
    pub lambda: LaurentPoly,
    pub s: LaurentPoly,
}

/// How the recurrence is seeded.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum RecurrenceStart {
    /// `(lambda_0, s_0)` taken directly from the ODE.
    #[default]
    FromOne,
    /// One extra step from `lambda_{-1} = 1`, `s_{-1} = 0`.
    FromZero,
}

fn step(lambda: &LaurentPoly, s: &LaurentPoly, lambda0: &LaurentPoly, s0: &LaurentPoly) -> (LaurentPoly, LaurentPoly) {
    let next_lambda = lambda.differentiate().add(s).add(&lambda0.mul(lambda));
    let next_s = s.differentiate().add(&s0.mul(lambda));
    (next_lambda, next_s)
}

/// One application of the recurrence.
pub fn aim_step(prev: &AimPair, lambda0: &LaurentPoly, s0: &LaurentPoly) -> AimPair {
    let (lambda, s) = step(&prev.lambda, &prev.s, lambda0, s0);
    AimPair { k: prev.k + 1, lambda, s }
}

/// The `k = 0` pair.
pub fn initial_pair(lambda0: &LaurentPoly, s0: &LaurentPoly, start: RecurrenceStart) -> AimPair {
    match start {
        RecurrenceStart::FromOne => AimPair { k: 0, lambda: lambda0.clone(), s: s0.clone() },
        RecurrenceStart::FromZero => {
            let one = LaurentPoly::constant(ExtReal::one(lambda0.precision()));
            let (lambda, s) = step(&one, &LaurentPoly::zero(), lambda0, s0);
            AimPair { k: 0, lambda, s }
        }
    }
}

/// `delta_k(u0) = lambda_k s_{k-1} - lambda_{k-1} s_k`, combined as polynomials
/// and then evaluated.
pub fn delta(curr: &AimPair, prev: &AimPair, u0: &ExtReal) -> Result<ExtReal> {
    if curr.k != prev.k + 1 {
        return Err(AimError::InvalidParameter(format!(
            "delta needs consecutive pairs (got k = {} and {})",
            curr.k, prev.k
        )));
    }
    let combined = curr.lambda.mul(&prev.s).sub(&prev.lambda.mul(&curr.s));
    combined.evaluate(u0)?.finite_or("quantization function")
}

/// Iterator over successive recurrence pairs for one value of `eps`.
pub struct Recurrence {
    lambda0: LaurentPoly,
    s0: LaurentPoly,
    current: Option<AimPair>,
}

impl Recurrence {
    pub fn new<O: AimOde + ?Sized>(ode: &O, epsilon: &ExtReal, start: RecurrenceStart) -> Self {
        let lambda0 = ode.lambda0().clone();
        let s0 = ode.s0(epsilon);
        let first = initial_pair(&lambda0, &s0, start);
        Recurrence { lambda0, s0, current: Some(first) }
    }
}

impl Iterator for Recurrence {
    type Item = AimPair;

    fn next(&mut self) -> Option<AimPair> {
        let out = self.current.take()?;
        self.current = Some(aim_step(&out, &self.lambda0, &self.s0));
        Some(out)
    }
}

/// Quantization function at iteration `k` (see the module docs for the
/// labelling): `delta_{k+1}(u0; eps)`.
pub fn quantization_value<O: AimOde + ?Sized>(
    ode: &O,
    epsilon: &ExtReal,
    k: usize,
    start: RecurrenceStart,
) -> Result<ExtReal> {
    if ode.precision() < 64 && k > DOUBLE_PRECISION_MAX_K {
        return Err(AimError::PrecisionExhausted(format!(
            "{} bits is only accepted up to k = {DOUBLE_PRECISION_MAX_K} (asked for k = {k})",
            ode.precision()
        )));
    }
    let eps = epsilon.with_precision(ode.precision().max(epsilon.precision()));
    let mut pairs = Recurrence::new(ode, &eps, start).skip(k);
    let prev = pairs.next().expect("recurrence is infinite");
    let curr = pairs.next().expect("recurrence is infinite");
    delta(&curr, &prev, ode.pivot())
}
