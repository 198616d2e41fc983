//! Midpoint scalars for balls.
//!
//! [`BallScalar`] abstracts over the midpoint representation. Every rounded
//! operation reports its own error so that [`crate::Ball`] can fold it into the
//! radius. `f64` gives fast, fixed 53-bit balls; [`BigFloat`] gives balls at any
//! requested precision.

use std::cmp::Ordering;
use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, FromPrimitive, ToPrimitive};

use crate::bigfloat::BigFloat;
use crate::mag::Mag;
use crate::transcendental;

/// Scalar usable as a ball midpoint.
pub trait BallScalar: Clone + Debug + PartialEq + PartialOrd + Send + Sync + 'static {
    /// Precision actually delivered when `requested` bits are asked for.
    fn effective_prec(requested: u32) -> u32;

    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn neg(&self) -> Self;
    fn abs(&self) -> Self;
    fn mul_2exp(&self, e: i64) -> Self;
    fn to_f64(&self) -> f64;
    /// Exact value as a dyadic.
    fn to_bigfloat(&self) -> BigFloat;

    fn from_bigfloat(x: &BigFloat, prec: u32) -> (Self, Mag);
    fn from_rational(q: &BigRational, prec: u32) -> (Self, Mag) {
        let (bf, e) = BigFloat::from_rational(q, Self::effective_prec(prec) + 8);
        let (v, e2) = Self::from_bigfloat(&bf, prec);
        (v, e.add(&e2))
    }
    fn from_bigint(v: &BigInt, prec: u32) -> (Self, Mag) {
        Self::from_bigfloat(&BigFloat::from_bigint(v.clone()), prec)
    }

    fn add(&self, o: &Self, prec: u32) -> (Self, Mag);
    fn sub(&self, o: &Self, prec: u32) -> (Self, Mag);
    fn mul(&self, o: &Self, prec: u32) -> (Self, Mag);
    fn div(&self, o: &Self, prec: u32) -> (Self, Mag);
    fn sqrt(&self, prec: u32) -> (Self, Mag);
    fn exp(&self, prec: u32) -> (Self, Mag);
    /// Natural logarithm of a positive value.
    fn ln(&self, prec: u32) -> (Self, Mag);
    /// `(cos 2πx, sin 2πx)` with a shared error bound.
    fn cos_sin_2pi(&self, prec: u32) -> (Self, Self, Mag);
    fn pi(prec: u32) -> (Self, Mag);

    fn mag_upper(&self) -> Mag {
        self.to_bigfloat().mag_upper()
    }

    fn sign(&self) -> Ordering {
        self.to_bigfloat().sign()
    }
}

impl BallScalar for BigFloat {
    fn effective_prec(requested: u32) -> u32 {
        requested.max(16)
    }
    fn zero() -> Self {
        BigFloat::zero()
    }
    fn one() -> Self {
        BigFloat::one()
    }
    fn is_zero(&self) -> bool {
        BigFloat::is_zero(self)
    }
    fn neg(&self) -> Self {
        BigFloat::neg(self)
    }
    fn abs(&self) -> Self {
        BigFloat::abs(self)
    }
    fn mul_2exp(&self, e: i64) -> Self {
        BigFloat::mul_2exp(self, e)
    }
    fn to_f64(&self) -> f64 {
        BigFloat::to_f64(self)
    }
    fn to_bigfloat(&self) -> BigFloat {
        self.clone()
    }
    fn from_bigfloat(x: &BigFloat, prec: u32) -> (Self, Mag) {
        x.round(Self::effective_prec(prec))
    }
    fn from_rational(q: &BigRational, prec: u32) -> (Self, Mag) {
        BigFloat::from_rational(q, Self::effective_prec(prec))
    }
    fn add(&self, o: &Self, prec: u32) -> (Self, Mag) {
        BigFloat::add(self, o, Self::effective_prec(prec))
    }
    fn sub(&self, o: &Self, prec: u32) -> (Self, Mag) {
        BigFloat::sub(self, o, Self::effective_prec(prec))
    }
    fn mul(&self, o: &Self, prec: u32) -> (Self, Mag) {
        BigFloat::mul(self, o, Self::effective_prec(prec))
    }
    fn div(&self, o: &Self, prec: u32) -> (Self, Mag) {
        BigFloat::div(self, o, Self::effective_prec(prec))
    }
    fn sqrt(&self, prec: u32) -> (Self, Mag) {
        BigFloat::sqrt(self, Self::effective_prec(prec))
    }
    fn exp(&self, prec: u32) -> (Self, Mag) {
        transcendental::exp(self, Self::effective_prec(prec))
    }
    fn ln(&self, prec: u32) -> (Self, Mag) {
        transcendental::ln(self, Self::effective_prec(prec))
    }
    fn cos_sin_2pi(&self, prec: u32) -> (Self, Self, Mag) {
        transcendental::cos_sin_2pi(self, Self::effective_prec(prec))
    }
    fn pi(prec: u32) -> (Self, Mag) {
        transcendental::pi(Self::effective_prec(prec))
    }
    fn mag_upper(&self) -> Mag {
        BigFloat::mag_upper(self)
    }
    fn sign(&self) -> Ordering {
        BigFloat::sign(self)
    }
}

/// Error of one correctly rounded `f64` operation producing `r`.
fn f64_round_err(r: f64) -> Mag {
    Mag::from_f64_up(r.abs() * f64::EPSILON * 0.5).add(&Mag::pow2(-1074))
}

/// Error of a libm transcendental producing `r`, taken as 2 ulp.
fn f64_libm_err(r: f64) -> Mag {
    Mag::from_f64_up(r.abs() * f64::EPSILON * 2.0).add(&Mag::pow2(-1070))
}

fn checked(v: f64, err: Mag) -> (f64, Mag) {
    if v.is_finite() {
        (v, err)
    } else {
        (0.0, Mag::INF)
    }
}

impl BallScalar for f64 {
    fn effective_prec(_requested: u32) -> u32 {
        53
    }
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn neg(&self) -> Self {
        -*self
    }
    fn abs(&self) -> Self {
        Float::abs(*self)
    }
    fn mul_2exp(&self, e: i64) -> Self {
        *self * 2f64.powi(e.clamp(-2000, 2000) as i32)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn to_bigfloat(&self) -> BigFloat {
        BigFloat::from_f64(*self).expect("finite midpoint")
    }
    fn from_bigfloat(x: &BigFloat, _prec: u32) -> (Self, Mag) {
        let v = x.to_f64();
        match BigFloat::from_f64(v) {
            Some(b) => (v, b.sub_exact(x).mag_upper()),
            None => (0.0, Mag::INF),
        }
    }
    fn from_bigint(v: &BigInt, prec: u32) -> (Self, Mag) {
        match v.to_i64() {
            Some(i) if i.unsigned_abs() < (1 << 53) => (i as f64, Mag::ZERO),
            _ => Self::from_bigfloat(&BigFloat::from_bigint(v.clone()), prec),
        }
    }
    fn add(&self, o: &Self, _prec: u32) -> (Self, Mag) {
        let r = self + o;
        checked(r, f64_round_err(r))
    }
    fn sub(&self, o: &Self, _prec: u32) -> (Self, Mag) {
        let r = self - o;
        checked(r, f64_round_err(r))
    }
    fn mul(&self, o: &Self, _prec: u32) -> (Self, Mag) {
        let r = self * o;
        checked(r, f64_round_err(r))
    }
    fn div(&self, o: &Self, _prec: u32) -> (Self, Mag) {
        let r = self / o;
        checked(r, f64_round_err(r))
    }
    fn sqrt(&self, _prec: u32) -> (Self, Mag) {
        let r = Float::sqrt(*self);
        checked(r, f64_round_err(r))
    }
    fn exp(&self, _prec: u32) -> (Self, Mag) {
        let r = Float::exp(*self);
        checked(r, f64_libm_err(r))
    }
    fn ln(&self, _prec: u32) -> (Self, Mag) {
        let r = Float::ln(*self);
        checked(r, f64_libm_err(r))
    }
    fn cos_sin_2pi(&self, _prec: u32) -> (Self, Self, Mag) {
        // the reduction x - round(x) is exact for |x| < 2^52
        if Float::abs(*self) >= 4503599627370496.0 {
            return (0.0, 0.0, Mag::from_u64(2));
        }
        let f = *self - Float::round(*self);
        if f == 0.0 {
            return (1.0, 0.0, Mag::ZERO);
        }
        if Float::abs(f) == 0.5 {
            return (-1.0, 0.0, Mag::ZERO);
        }
        let theta = std::f64::consts::TAU * f;
        let (s, c) = theta.sin_cos();
        // theta carries <= 2 ulp of relative error; sin/cos have Lipschitz constant 1
        let err = Mag::from_f64_up(Float::abs(theta) * f64::EPSILON * 2.0)
            .add(&Mag::from_f64_up(f64::EPSILON * 2.0))
            .add(&Mag::pow2(-1070));
        (c, s, err)
    }
    fn pi(_prec: u32) -> (Self, Mag) {
        (std::f64::consts::PI, Mag::from_f64_up(f64::EPSILON * 2.0))
    }
    fn mag_upper(&self) -> Mag {
        Mag::from_f64_up(*self)
    }
    fn sign(&self) -> Ordering {
        self.partial_cmp(&0.0).unwrap_or(Ordering::Equal)
    }
}

/// Convenience for tests and callers that hold plain integers.
pub fn scalar_from_i64<T: BallScalar>(v: i64) -> T {
    T::from_bigint(&BigInt::from_i64(v).expect("i64 fits"), 64).0
}
