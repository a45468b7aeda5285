//! Physical parameters of `V(r) = A/r^2 - B/r + C r^kappa`, their reduction to
//! dimensionless form, and the iteration-ready ODE for kappa = 1 and 2.
//!
//! With `r = r0 rho`, `r0 = hbar^2 / (2 m B)`, the radial equation becomes
//!
//! ```text
//! R'' + [eps + 1/rho - gamma^2 rho^kappa - l'(l'+1)/rho^2] R = 0
//! ```
//!
//! and `rho = u^2`, `R = sqrt(u) phi(u)`, `phi = u^(Lambda+1) exp(-gamma beta u^4 / 2) f(u)`
//! turn it into `f'' = lambda0 f' + s0 f` with
//!
//! ```text
//! lambda0 = 2 (2 beta gamma u^3 - (Lambda + 1)/u)
//! s0      = (4 beta gamma Lambda + 10 beta gamma - 4 eps) u^2 - 4 beta^2 gamma^2 u^6 - 4 + 4 gamma^2 u^(2 kappa + 2)
//! ```

use std::fmt;

use crate::engine::AimOde;
use crate::error::{AimError, Result};
use crate::symbolic::{ExtReal, LaurentPoly};

/// Exponent of the `C r^kappa` term.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kappa {
    MinusTwo,
    MinusOne,
    Zero,
    One,
    Two,
}

impl Kappa {
    pub const ALL: [Kappa; 5] = [Kappa::MinusTwo, Kappa::MinusOne, Kappa::Zero, Kappa::One, Kappa::Two];

    pub fn value(self) -> i32 {
        match self {
            Kappa::MinusTwo => -2,
            Kappa::MinusOne => -1,
            Kappa::Zero => 0,
            Kappa::One => 1,
            Kappa::Two => 2,
        }
    }

    /// True for the cases without a closed form (solved by iteration).
    pub fn is_iterative(self) -> bool {
        matches!(self, Kappa::One | Kappa::Two)
    }

    /// Default convergence constant beta.
    pub fn default_beta(self) -> f64 {
        match self {
            Kappa::Two => 1.0,
            _ => 0.5,
        }
    }
}

impl TryFrom<i32> for Kappa {
    type Error = AimError;

    fn try_from(value: i32) -> Result<Self> {
        match value {
            -2 => Ok(Kappa::MinusTwo),
            -1 => Ok(Kappa::MinusOne),
            0 => Ok(Kappa::Zero),
            1 => Ok(Kappa::One),
            2 => Ok(Kappa::Two),
            other => Err(AimError::InvalidParameter(format!(
                "kappa must be one of -2, -1, 0, 1, 2 (got {other})"
            ))),
        }
    }
}

impl fmt::Display for Kappa {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

/// `A/r^2 - B/r + C r^kappa` together with the particle mass and hbar.
#[derive(Clone, Debug, PartialEq)]
pub struct PotentialParams {
    pub a: ExtReal,
    pub b: ExtReal,
    pub c: ExtReal,
    pub kappa: Kappa,
    pub mass: ExtReal,
    pub hbar: ExtReal,
}

impl PotentialParams {
    pub fn new(a: ExtReal, b: ExtReal, c: ExtReal, kappa: Kappa, mass: ExtReal, hbar: ExtReal) -> Result<Self> {
        if a.is_sign_negative() {
            return Err(AimError::InvalidParameter(format!("A must be >= 0 (got {a})")));
        }
        if b.is_sign_negative() {
            return Err(AimError::InvalidParameter(format!("B must be >= 0 (got {b})")));
        }
        if c.is_sign_negative() {
            return Err(AimError::InvalidParameter(format!(
                "C must be >= 0, only the confining branch is supported (got {c})"
            )));
        }
        if !mass.is_positive() {
            return Err(AimError::InvalidParameter(format!("mass must be > 0 (got {mass})")));
        }
        if !hbar.is_positive() {
            return Err(AimError::InvalidParameter(format!("hbar must be > 0 (got {hbar})")));
        }
        Ok(PotentialParams { a, b, c, kappa, mass, hbar })
    }

    /// Convenience constructor from doubles.
    pub fn from_f64(a: f64, b: f64, c: f64, kappa: i32, mass: f64, hbar: f64, prec: u32) -> Result<Self> {
        let x = |v: f64| ExtReal::from_f64(v, prec);
        Self::new(x(a), x(b), x(c), Kappa::try_from(kappa)?, x(mass), x(hbar))
    }

    pub fn precision(&self) -> u32 {
        [&self.a, &self.b, &self.c, &self.mass, &self.hbar]
            .iter()
            .map(|v| v.precision())
            .max()
            .unwrap()
    }

    /// `2 m / hbar^2`
    pub fn two_m_over_hbar2(&self) -> ExtReal {
        &(&self.mass * 2.0) / &self.hbar.square()
    }

    /// `A~ = 2 m A / hbar^2`
    pub fn a_tilde(&self) -> ExtReal {
        &self.two_m_over_hbar2() * &self.a
    }

    /// `r0 = hbar^2 / (2 m B)`
    pub fn r0(&self) -> Result<ExtReal> {
        if !self.b.is_positive() {
            return Err(AimError::ScalingUndefined(self.b.to_string()));
        }
        Ok(&self.hbar.square() / &(&(&self.mass * 2.0) * &self.b))
    }

    /// `eps = hbar^2 E / (2 m B^2)`
    pub fn to_reduced_energy(&self, energy: &ExtReal) -> Result<ExtReal> {
        if !self.b.is_positive() {
            return Err(AimError::ScalingUndefined(self.b.to_string()));
        }
        Ok(&(energy / &self.two_m_over_hbar2()) / &self.b.square())
    }
}

/// Dimensionless parameters of the reduced radial equation.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedParams {
    pub a_tilde: ExtReal,
    pub gamma: ExtReal,
    /// Effective angular momentum `l' = -1/2 + sqrt((l + 1/2)^2 + A~)`.
    pub l_prime: ExtReal,
    /// `Lambda = 2 l' + 1/2`.
    pub lambda_big: ExtReal,
    /// Length unit; absent when the reduced parameters were given directly.
    pub r0: Option<ExtReal>,
    pub l: u32,
}

impl ReducedParams {
    /// Direct entry of `A~` and `gamma` (no physical length scale).
    pub fn new(a_tilde: ExtReal, gamma: ExtReal, l: u32) -> Result<Self> {
        if a_tilde.is_sign_negative() {
            return Err(AimError::InvalidParameter(format!("A~ must be >= 0 (got {a_tilde})")));
        }
        if gamma.is_sign_negative() {
            return Err(AimError::InvalidParameter(format!("gamma must be >= 0 (got {gamma})")));
        }
        let l_prime = effective_l(l, &a_tilde);
        let lambda_big = &(&l_prime * 2.0) + 0.5;
        Ok(ReducedParams { a_tilde, gamma, l_prime, lambda_big, r0: None, l })
    }

    pub fn precision(&self) -> u32 {
        self.a_tilde.precision().max(self.gamma.precision())
    }
}

/// `-1/2 + sqrt((l + 1/2)^2 + x)`
pub(crate) fn effective_l(l: u32, x: &ExtReal) -> ExtReal {
    let p = x.precision();
    let half = ExtReal::from_f64(l as f64 + 0.5, p);
    &(&half.square() + x).sqrt() - 0.5
}

/// Physical to reduced units for angular momentum `l`.
pub fn reduce(params: &PotentialParams, l: u32) -> Result<ReducedParams> {
    let r0 = params.r0()?;
    let gamma2 = &(&params.two_m_over_hbar2() * &params.c) * &r0.powi(params.kappa.value() + 2);
    let mut reduced = ReducedParams::new(params.a_tilde(), gamma2.sqrt(), l)?;
    reduced.r0 = Some(r0);
    Ok(reduced)
}

/// Reduced eigenvalue to physical energy, `E = 2 m B^2 eps / hbar^2`.
pub fn to_physical(epsilon: &ExtReal, params: &PotentialParams) -> Result<ExtReal> {
    if !params.b.is_positive() {
        return Err(AimError::ScalingUndefined(params.b.to_string()));
    }
    Ok(&(&params.two_m_over_hbar2() * &params.b.square()) * epsilon)
}

/// The iteration-ready ODE `f'' = lambda0 f' + s0 f` in the variable `u`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProblemSetup {
    pub kappa: Kappa,
    pub beta: ExtReal,
    pub reduced: ReducedParams,
    lambda0: LaurentPoly,
    /// `s0` with the `-4 eps u^2` term removed.
    s0_fixed: LaurentPoly,
    u0: ExtReal,
}

impl ProblemSetup {
    pub fn lambda0(&self) -> &LaurentPoly {
        &self.lambda0
    }

    /// `s0(u; eps)`.
    pub fn s0(&self, epsilon: &ExtReal) -> LaurentPoly {
        let shift = LaurentPoly::monomial(epsilon * -4.0, 2);
        self.s0_fixed.add(&shift)
    }

    /// Positive root of `lambda0`, the maximum of the asymptotic factor.
    pub fn u0(&self) -> &ExtReal {
        &self.u0
    }

    pub fn precision(&self) -> u32 {
        self.u0.precision()
    }
}

impl AimOde for ProblemSetup {
    fn lambda0(&self) -> &LaurentPoly {
        &self.lambda0
    }

    fn s0(&self, epsilon: &ExtReal) -> LaurentPoly {
        ProblemSetup::s0(self, epsilon)
    }

    fn pivot(&self) -> &ExtReal {
        &self.u0
    }

    fn angular_momentum(&self) -> u32 {
        self.reduced.l
    }
}

/// Builds `lambda0`, `s0` and the pivot for kappa = 1 or 2.
pub fn setup(reduced: &ReducedParams, kappa: Kappa, beta: &ExtReal) -> Result<ProblemSetup> {
    if !kappa.is_iterative() {
        return Err(AimError::WrongModule { kappa: kappa.value(), module: "closed-form" });
    }
    if !beta.is_positive() {
        return Err(AimError::InvalidParameter(format!("beta must be > 0 (got {beta})")));
    }
    if !reduced.gamma.is_positive() {
        return Err(AimError::PivotUndefined);
    }
    let prec = reduced.precision().max(beta.precision());
    let gamma = reduced.gamma.with_precision(prec);
    let beta = beta.with_precision(prec);
    let lam = reduced.lambda_big.with_precision(prec);
    let bg = &beta * &gamma;
    let lam_plus_1 = &lam + 1.0;

    let lambda0 = LaurentPoly::from_terms([(3, &bg * 4.0), (-1, &lam_plus_1 * -2.0)]);

    let u2 = &(&(&bg * &lam) * 4.0) + &(&bg * 10.0);
    let top = match kappa {
        Kappa::One => 4,
        _ => 6,
    };
    let s0_fixed = LaurentPoly::from_terms([
        (2, u2),
        (6, &bg.square() * -4.0),
        (0, ExtReal::from_f64(-4.0, prec)),
        (top, &gamma.square() * 4.0),
    ]);

    let u0 = (&lam_plus_1 / &(&bg * 2.0)).sqrt().sqrt();
    Ok(ProblemSetup {
        kappa,
        beta,
        reduced: reduced.clone(),
        lambda0,
        s0_fixed,
        u0,
    })
}
