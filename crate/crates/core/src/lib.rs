//! Fourier decay, digit changes and uniqueness for self-similar measures on the line.
//!
//! The crate is generic over the ball midpoint scalar where numerics dominate
//! ([`fourier`]), and exact over number fields elsewhere.

pub mod algebraic;
pub mod diophantine;
pub mod fourier;
pub mod io;
pub mod ifs;
pub mod lattice;
pub mod linalg;
pub mod poly;
pub mod real;
pub mod renewal;
pub mod roots;
pub mod uniqueness;

/// Default working precision in bits.
pub const DEFAULT_PREC: u32 = 128;
/// Precision cap for adaptive refinement.
pub const MAX_PREC: u32 = 8192;

pub use algebraic::{FieldElement, NumberField, RootSelector};
pub use ifs::{build_ifs, Ifs, IfsError, IfsInput, RatioSpec};
pub use poly::{IntPoly, Poly, RatPoly};
pub use real::Real;
