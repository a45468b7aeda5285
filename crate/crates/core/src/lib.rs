//! Bound states of the radial Schrödinger equation with
//! `V(r) = A/r^2 - B/r + C r^kappa`, `kappa` in {-2, -1, 0, 1, 2}.
//!
//! * [`engine`] runs the asymptotic iteration method for kappa = 1, 2 on the
//!   ODE built by [`problems`].
//! * [`analytic`] has the closed forms for kappa = 0, -1, -2.
//! * [`oracle`] is an independent Numerov solver used for cross-checks.
//! * [`symbolic`] holds the extended-precision scalar and Laurent-polynomial
//!   algebra everything runs on.

pub mod analytic;
pub mod engine;
mod error;
pub mod oracle;
pub mod problems;
pub mod symbolic;

pub use error::{AimError, Result};
