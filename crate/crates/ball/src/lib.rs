//! Certified real and complex ball arithmetic.
//!
//! Balls are generic over the midpoint type through [`BallScalar`]; the
//! aliases below fix the two scalars used in practice.

pub mod ball;
pub mod bigfloat;
pub mod complex;
pub mod mag;
pub mod scalar;
pub mod transcendental;

pub use ball::Ball;
pub use bigfloat::BigFloat;
pub use complex::ComplexBall;
pub use mag::Mag;
pub use scalar::BallScalar;

/// Arbitrary-precision real ball.
pub type RealBall = Ball<BigFloat>;
/// Arbitrary-precision complex ball.
pub type CBall = ComplexBall<BigFloat>;
/// Hardware-precision real ball.
pub type Ball64 = Ball<f64>;
/// Hardware-precision complex ball.
pub type CBall64 = ComplexBall<f64>;
