//! The asymptotic iteration method for `f'' = lambda0(u) f' + s0(u; eps) f`.
//!
//! The recurrence
//!
//! ```text
//! lambda_k = lambda_{k-1}' + s_{k-1} + lambda0 lambda_{k-1}
//! s_k      = s_{k-1}'      + s0 lambda_{k-1}
//! ```
//!
//! is run on exact-structure Laurent polynomials for one numeric value of
//! `eps` at a time. Eigenvalues are the roots in `eps` of
//! `delta_k = lambda_k s_{k-1} - lambda_{k-1} s_k` at the pivot `u0`.
//!
//! # Iteration labels
//!
//! Public entry points take an *iteration number* `k`. Iteration `k` evaluates
//! the quantization function on the pairs `k + 1` and `k` of the recurrence,
//! i.e. `delta_{k+1}`. This is the labelling under which the tabulated
//! convergence sequences for the Coulomb-plus-linear case are reproduced row
//! for row (row 20 of the beta = 2 column is `delta_21`).

mod recurrence;
mod roots;
mod wavefunction;

pub use recurrence::{aim_step, delta, initial_pair, quantization_value, AimPair, Recurrence, RecurrenceStart};
pub use roots::{
    converge, refine_root, scan_roots, solve_state, sweep, trace_roots, Bracket, ConvergenceStatus, EigenResult,
    ScanRange, SolveOptions, DEFAULT_CONVERGENCE_TOL, DEFAULT_ROOT_TOL,
};
pub use wavefunction::{count_sign_changes, wavefunction, RadialSample, MIN_GRID_POINTS};

use crate::symbolic::{ExtReal, LaurentPoly};

/// A second-order ODE in AIM canonical form, with `eps` entering `s0` only.
pub trait AimOde: Sync {
    fn lambda0(&self) -> &LaurentPoly;

    fn s0(&self, epsilon: &ExtReal) -> LaurentPoly;

    /// Evaluation point of the quantization function.
    fn pivot(&self) -> &ExtReal;

    /// Working precision in bits.
    fn precision(&self) -> u32 {
        self.pivot().precision()
    }

    /// Orbital quantum number carried into results.
    fn angular_momentum(&self) -> u32 {
        0
    }
}
