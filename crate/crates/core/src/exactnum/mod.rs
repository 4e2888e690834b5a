//! Exact arithmetic over the rationals and real quadratic fields.
//!
//! Nothing on the decision path uses floating point: signs of `a + c·√d`
//! are settled by comparing `a²` against `c²·d`.

mod parse;
mod quadratic;
mod real;

use num_bigint::BigInt;
use thiserror::Error;

pub use parse::parse;
pub use quadratic::{surd_sign, QuadraticValue};
pub use real::{ExactReal, Surd, MAX_RADICAND};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumError {
    #[error("malformed number: {0}")]
    Parse(String),
    #[error("radicand must be positive, got {0}")]
    NonPositiveRadicand(BigInt),
    #[error("radicand {0} exceeds the supported bound {MAX_RADICAND}")]
    RadicandTooLarge(BigInt),
    #[error("division by zero")]
    DivisionByZero,
    #[error("values lie in different quadratic fields (sqrt({0}) vs sqrt({1}))")]
    IncompatibleRadicands(BigInt, BigInt),
}
