//! Midpoint-radius real balls.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::bigfloat::BigFloat;
use crate::mag::Mag;
use crate::scalar::BallScalar;

/// The closed interval `[mid - rad, mid + rad]`, carried at a working precision.
#[derive(Clone, PartialEq)]
pub struct Ball<T: BallScalar> {
    mid: T,
    rad: Mag,
    prec: u32,
}

/// Upper bound on 2π.
pub(crate) fn two_pi_mag() -> Mag {
    Mag::from_f64_up(6.283_185_307_2)
}

impl<T: BallScalar> Ball<T> {
    pub fn new(mid: T, rad: Mag, prec: u32) -> Self {
        Ball { mid, rad, prec }
    }

    pub fn exact(mid: T, prec: u32) -> Self {
        Ball::new(mid, Mag::ZERO, prec)
    }

    pub fn zero(prec: u32) -> Self {
        Ball::exact(T::zero(), prec)
    }

    pub fn one(prec: u32) -> Self {
        Ball::exact(T::one(), prec)
    }

    pub fn from_i64(v: i64, prec: u32) -> Self {
        Self::from_bigint(&BigInt::from(v), prec)
    }

    pub fn from_bigint(v: &BigInt, prec: u32) -> Self {
        let (m, e) = T::from_bigint(v, prec);
        Ball::new(m, e, prec)
    }

    pub fn from_rational(q: &BigRational, prec: u32) -> Self {
        let (m, e) = T::from_rational(q, prec);
        Ball::new(m, e, prec)
    }

    pub fn from_bigfloat(x: &BigFloat, prec: u32) -> Self {
        let (m, e) = T::from_bigfloat(x, prec);
        Ball::new(m, e, prec)
    }

    /// Ball covering `x ± r`.
    pub fn from_bigfloat_rad(x: &BigFloat, r: Mag, prec: u32) -> Self {
        Self::from_bigfloat(x, prec).add_error(r)
    }

    /// Exact `f64` value; `NaN`/infinities give an unbounded ball.
    pub fn from_f64(v: f64, prec: u32) -> Self {
        match BigFloat::from_f64(v) {
            Some(b) => Self::from_bigfloat(&b, prec),
            None => Ball::new(T::zero(), Mag::INF, prec),
        }
    }

    /// Smallest ball (up to rounding) containing `[lo, hi]`.
    pub fn from_interval(lo: &BigFloat, hi: &BigFloat, prec: u32) -> Self {
        let mid = lo.add_exact(hi).mul_2exp(-1);
        let half = hi.sub_exact(lo).mul_2exp(-1).mag_upper();
        Self::from_bigfloat_rad(&mid, half, prec)
    }

    pub fn pi(prec: u32) -> Self {
        let (m, e) = T::pi(prec);
        Ball::new(m, e, prec)
    }

    pub fn mid(&self) -> &T {
        &self.mid
    }

    pub fn rad(&self) -> Mag {
        self.rad
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn with_prec(mut self, prec: u32) -> Self {
        self.prec = prec;
        self
    }

    pub fn add_error(mut self, e: Mag) -> Self {
        self.rad = self.rad.add(&e);
        self
    }

    pub fn is_exact(&self) -> bool {
        self.rad.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.rad.is_finite()
    }

    pub fn to_f64(&self) -> f64 {
        self.mid.to_f64()
    }

    /// Exact lower endpoint.
    pub fn lower(&self) -> BigFloat {
        self.mid.to_bigfloat().sub_exact(&BigFloat::from_mag(&self.rad))
    }

    /// Exact upper endpoint.
    pub fn upper(&self) -> BigFloat {
        self.mid.to_bigfloat().add_exact(&BigFloat::from_mag(&self.rad))
    }

    /// Upper bound on `|x|` over the ball.
    pub fn abs_upper(&self) -> Mag {
        self.mid.mag_upper().add(&self.rad)
    }

    /// Lower bound on `|x|` over the ball (zero when the ball touches zero).
    pub fn abs_lower(&self) -> Mag {
        if !self.rad.is_finite() {
            return Mag::ZERO;
        }
        let m = self.mid.to_bigfloat().abs();
        let d = m.sub_exact(&BigFloat::from_mag(&self.rad));
        if d.sign() == Ordering::Greater {
            d.mag_lower()
        } else {
            Mag::ZERO
        }
    }

    pub fn contains_zero(&self) -> bool {
        !self.is_positive() && !self.is_negative()
    }

    /// Every point of the ball is `> 0`.
    pub fn is_positive(&self) -> bool {
        self.rad.is_finite() && self.lower().sign() == Ordering::Greater
    }

    /// Every point of the ball is `< 0`.
    pub fn is_negative(&self) -> bool {
        self.rad.is_finite() && self.upper().sign() == Ordering::Less
    }

    /// Certified comparison: `Some` only when the balls are disjoint or both exact.
    pub fn cmp_certified(&self, other: &Self) -> Option<Ordering> {
        let d = self.sub(other);
        if d.is_positive() {
            Some(Ordering::Greater)
        } else if d.is_negative() {
            Some(Ordering::Less)
        } else if self.is_exact() && other.is_exact() && d.mid.is_zero() && d.is_exact() {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    /// Certified comparison with an exact rational.
    pub fn cmp_rational(&self, q: &BigRational) -> Option<Ordering> {
        if !self.rad.is_finite() {
            return None;
        }
        let lo = self.lower().cmp_rational(q);
        let hi = self.upper().cmp_rational(q);
        match (lo, hi) {
            (Ordering::Greater, _) => Some(Ordering::Greater),
            (_, Ordering::Less) => Some(Ordering::Less),
            (Ordering::Equal, Ordering::Equal) => Some(Ordering::Equal),
            _ => None,
        }
    }

    pub fn contains_bigfloat(&self, x: &BigFloat) -> bool {
        if !self.rad.is_finite() {
            return true;
        }
        self.lower() <= *x && *x <= self.upper()
    }

    pub fn contains_rational(&self, q: &BigRational) -> bool {
        if !self.rad.is_finite() {
            return true;
        }
        self.lower().cmp_rational(q) != Ordering::Greater
            && self.upper().cmp_rational(q) != Ordering::Less
    }

    /// `other ⊆ self`.
    pub fn contains(&self, other: &Self) -> bool {
        if !self.rad.is_finite() {
            return true;
        }
        if !other.rad.is_finite() {
            return false;
        }
        self.lower() <= other.lower() && other.upper() <= self.upper()
    }

    pub fn overlaps(&self, other: &Self) -> bool {
        if !self.rad.is_finite() || !other.rad.is_finite() {
            return true;
        }
        !(self.upper() < other.lower() || other.upper() < self.lower())
    }

    /// Smallest ball (up to rounding) containing both.
    pub fn union(&self, other: &Self) -> Self {
        let prec = self.prec.max(other.prec);
        if !self.rad.is_finite() || !other.rad.is_finite() {
            return Ball::new(self.mid.clone(), Mag::INF, prec);
        }
        let lo = self.lower().min(other.lower());
        let hi = self.upper().max(other.upper());
        Self::from_interval(&lo, &hi, prec)
    }

    pub fn neg(&self) -> Self {
        Ball::new(self.mid.neg(), self.rad, self.prec)
    }

    pub fn abs(&self) -> Self {
        Ball::new(self.mid.abs(), self.rad, self.prec)
    }

    pub fn mul_2exp(&self, e: i64) -> Self {
        Ball::new(self.mid.mul_2exp(e), self.rad.mul_2exp(e), self.prec)
    }

    pub fn add(&self, o: &Self) -> Self {
        let prec = self.prec.max(o.prec);
        let (m, e) = self.mid.add(&o.mid, prec);
        Ball::new(m, self.rad.add(&o.rad).add(&e), prec)
    }

    pub fn sub(&self, o: &Self) -> Self {
        let prec = self.prec.max(o.prec);
        let (m, e) = self.mid.sub(&o.mid, prec);
        Ball::new(m, self.rad.add(&o.rad).add(&e), prec)
    }

    pub fn mul(&self, o: &Self) -> Self {
        let prec = self.prec.max(o.prec);
        let (m, e) = self.mid.mul(&o.mid, prec);
        let rad = self
            .mid
            .mag_upper()
            .mul(&o.rad)
            .add(&o.mid.mag_upper().mul(&self.rad))
            .add(&self.rad.mul(&o.rad))
            .add(&e);
        Ball::new(m, rad, prec)
    }

    pub fn sqr(&self) -> Self {
        self.mul(self)
    }

    /// Quotient; unbounded when the divisor ball contains zero.
    pub fn div(&self, o: &Self) -> Self {
        let prec = self.prec.max(o.prec);
        let den_lo = o.abs_lower();
        if den_lo.is_zero() {
            return Ball::new(T::zero(), Mag::INF, prec);
        }
        let (m, e) = self.mid.div(&o.mid, prec);
        // |a/b - am/bm| <= (ra + |am/bm| rb) / (|bm| - rb)
        let q = m.mag_upper().add(&e);
        let rad = self.rad.add(&q.mul(&o.rad)).div(&den_lo).add(&e);
        Ball::new(m, rad, prec)
    }

    pub fn recip(&self) -> Self {
        Ball::one(self.prec).div(self)
    }

    pub fn powi(&self, n: i64) -> Self {
        if n < 0 {
            return self.powi(-n).recip();
        }
        let mut result = Ball::one(self.prec);
        let mut base = self.clone();
        let mut k = n as u64;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.sqr();
            }
        }
        result
    }

    pub fn sqrt(&self) -> Self {
        let prec = self.prec;
        if self.is_negative() || !self.rad.is_finite() {
            return Ball::new(T::zero(), Mag::INF, prec);
        }
        let lo = self.abs_lower();
        if self.is_positive() && !lo.is_zero() {
            let (m, e) = self.mid.sqrt(prec);
            // |sqrt a - sqrt b| <= |a - b| / sqrt(min)
            let (s, se) = BigFloat::from_mag(&lo).sqrt(40);
            let s_lo = s.sub_exact(&BigFloat::from_mag(&se));
            if s_lo.sign() == Ordering::Greater {
                let rad = self.rad.div(&s_lo.mag_lower()).add(&e);
                return Ball::new(m, rad, prec);
            }
        }
        // ball touches zero: cover [0, sqrt(upper)]
        let up = self.upper();
        let (s, se) = up.sqrt(40);
        let top = s.add_exact(&BigFloat::from_mag(&se));
        let half = top.mul_2exp(-1);
        Self::from_bigfloat_rad(&half, half.mag_upper(), prec)
    }

    pub fn exp(&self) -> Self {
        let prec = self.prec;
        if !self.rad.is_finite() {
            return Ball::new(T::zero(), Mag::INF, prec);
        }
        let (m, e) = self.mid.exp(prec);
        // exp(x + h) - exp(x) <= exp(x) (e^r - 1) with e^r - 1 <= r e^r
        let r = self.rad.to_f64();
        let growth = if r == 0.0 {
            Mag::ZERO
        } else if r < 1.0 {
            self.rad.mul(&Mag::from_f64_up(2.718_281_9))
        } else {
            Mag::from_f64_up(r.exp_m1() * (1.0 + 1e-12) + 1e-300)
        };
        let rad = m.mag_upper().add(&e).mul(&growth).add(&e);
        Ball::new(m, rad, prec)
    }

    /// Natural logarithm; unbounded unless the ball is positive.
    pub fn ln(&self) -> Self {
        let prec = self.prec;
        if !self.is_positive() {
            return Ball::new(T::zero(), Mag::INF, prec);
        }
        let (m, e) = self.mid.ln(prec);
        let rad = self.rad.div(&self.abs_lower()).add(&e);
        Ball::new(m, rad, prec)
    }

    /// `(cos 2πx, sin 2πx)`.
    pub fn cos_sin_2pi(&self) -> (Self, Self) {
        let prec = self.prec;
        if !self.rad.is_finite() {
            return (
                Ball::new(T::zero(), Mag::from_u64(1), prec),
                Ball::new(T::zero(), Mag::from_u64(1), prec),
            );
        }
        let (c, s, e) = self.mid.cos_sin_2pi(prec);
        let rad = e.add(&self.rad.mul(&two_pi_mag()));
        (Ball::new(c, rad, prec), Ball::new(s, rad, prec))
    }

    /// If the nearest integer is the same across the ball, returns it together
    /// with a ball for the signed offset `x - n`.
    pub fn nearest_int(&self) -> Option<(BigInt, Self)> {
        if !self.rad.is_finite() {
            return None;
        }
        let half = BigFloat::from_parts(BigInt::from(1), -1);
        let lo = self.lower().add_exact(&half).floor();
        let hi = self.upper().add_exact(&half).floor();
        if lo != hi {
            return None;
        }
        let n = Ball::from_bigint(&lo, self.prec.max(64 + lo.bits() as u32));
        let off = self.sub(&n);
        Some((lo, off))
    }

    /// Ball for `‖x‖`, the distance to the nearest integer.
    pub fn dist_to_int(&self) -> Self {
        match self.nearest_int() {
            Some((_, off)) => off.abs_ball(),
            None => {
                let lo = BigFloat::zero();
                let hi = BigFloat::from_parts(BigInt::from(1), -1);
                // the ball straddles a half-integer, or is too wide
                if self.rad.is_finite() && self.rad < Mag::pow2(-1) {
                    let d = self.rad.add(&Mag::pow2(-60));
                    let lo_b = hi.sub_exact(&BigFloat::from_mag(&d));
                    Self::from_interval(&lo_b, &hi, self.prec)
                } else {
                    Self::from_interval(&lo, &hi, self.prec)
                }
            }
        }
    }

    /// Ball containing `{|x| : x in self}`.
    pub fn abs_ball(&self) -> Self {
        if self.contains_zero() {
            let top = self.abs_upper();
            let half = BigFloat::from_mag(&top).mul_2exp(-1);
            Self::from_bigfloat_rad(&half, half.mag_upper(), self.prec)
        } else {
            self.abs()
        }
    }

    /// Decimal rendering of the midpoint with `digits` significant digits.
    pub fn mid_string(&self, digits: usize) -> String {
        self.mid.to_bigfloat().to_sci_string(digits)
    }
}

impl<T: BallScalar> fmt::Debug for Ball<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{} +/- {:e}]", self.mid_string(20), self.rad.to_f64())
    }
}

impl<T: BallScalar> fmt::Display for Ball<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(17);
        write!(f, "[{} +/- {:.3e}]", self.mid_string(digits), self.rad.to_f64())
    }
}

// Operators are implemented on references only, so that the inherent
// `&self` methods win method resolution on owned balls.
macro_rules! forward_binop {
    ($tr:ident, $method:ident) => {
        impl<T: BallScalar> $tr<&Ball<T>> for &Ball<T> {
            type Output = Ball<T>;
            fn $method(self, rhs: &Ball<T>) -> Ball<T> {
                Ball::$method(self, rhs)
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl<T: BallScalar> Neg for &Ball<T> {
    type Output = Ball<T>;
    fn neg(self) -> Ball<T> {
        Ball::neg(self)
    }
}
