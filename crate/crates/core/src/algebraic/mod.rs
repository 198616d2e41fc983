//! Real algebraic number fields `Q(λ)` with exact arithmetic and certified embeddings.

mod classify;
mod contains;
mod field;
mod height;

pub use classify::{classify_lambda, LambdaClass, LambdaKind};
pub use contains::{contains, Membership};
pub use field::{FieldElement, NumberField, RootSelector};
pub use height::{height, min_poly_of};

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum AlgebraicError {
    #[error("ReduciblePolynomial: factor {factor}")]
    ReduciblePolynomial { factor: String },
    #[error("NoRealRootAboveOne: {0}")]
    NoRealRootAboveOne(String),
    #[error("AmbiguousRootSelection: {count} real roots in the interval")]
    AmbiguousRootSelection { count: usize },
    #[error("NotAlgebraicInteger: minimal polynomial is not monic")]
    NotAlgebraicInteger,
    #[error("PrecisionExhausted: undecided at {bits} bits")]
    PrecisionExhausted { bits: u32 },
    #[error("AmbiguousIsolation: approximation meets {count} roots of the candidate polynomial")]
    AmbiguousIsolation { count: usize },
    #[error("DegeneratePolynomial: {0}")]
    DegeneratePolynomial(String),
    #[error("DivisionByZero")]
    DivisionByZero,
    #[error("FieldMismatch: elements belong to different fields")]
    FieldMismatch,
}
