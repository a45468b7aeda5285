//! Extended-precision scalars and the Laurent-polynomial algebra the
//! iteration recurrence runs on.

mod ext_real;
mod laurent;

pub use ext_real::{ExtReal, DEFAULT_PRECISION, MIN_PRECISION};
pub use laurent::LaurentPoly;
