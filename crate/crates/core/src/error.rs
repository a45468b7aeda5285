use thiserror::Error;

pub type Result<T> = std::result::Result<T, AimError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AimError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("could not parse number {0}")]
    Parse(String),

    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),

    #[error("length scale r0 = hbar^2/(2 m B) is undefined for B = {0}; supply reduced parameters instead")]
    ScalingUndefined(String),

    #[error("pivot point is undefined for gamma = 0 (C = 0 is the Kratzer case, use the closed-form solver)")]
    PivotUndefined,

    #[error("kappa = {kappa} is handled by the {module} solver")]
    WrongModule { kappa: i32, module: &'static str },

    #[error("no sign change of the quantization function near epsilon = {near} at iteration {k}")]
    BracketLost { k: usize, near: String, trace: Vec<(usize, String)> },

    #[error("sign change lost while refining [{lo}, {hi}] at iteration {k}: {reason}")]
    SignChangeLost { k: usize, lo: String, hi: String, reason: String },

    #[error("hypergeometric parameter b = {0} is a non-positive integer (pole)")]
    Pole(String),

    #[error("singular integrand: {0}")]
    SingularIntegrand(String),

    #[error("energy window too small: {0}")]
    WindowTooSmall(String),
}
