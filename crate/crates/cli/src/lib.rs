//! Command-line front end for the `aim-core` solvers.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod tables;

pub use commands::{execute, Outcome};
pub use config::RunConfig;
pub use error::CliError;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_CONVERGENCE: i32 = 3;
pub const EXIT_MISMATCH: i32 = 4;
