use aim_core::AimError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),

    #[error(transparent)]
    Solver(#[from] AimError),

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),

    #[error("output: {0}")]
    Output(String),
}

impl CliError {
    /// Process exit code for an error that aborts the whole run.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Solver(AimError::InvalidParameter(_) | AimError::Parse(_) | AimError::ScalingUndefined(_))
            | CliError::Solver(AimError::PivotUndefined | AimError::WrongModule { .. }) => 2,
            CliError::Solver(_) => 3,
            CliError::Io(_) | CliError::Output(_) => 1,
        }
    }
}
