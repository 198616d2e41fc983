//! Rectangular complex balls.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;

use crate::ball::Ball;
use crate::mag::Mag;
use crate::scalar::BallScalar;

/// `re + i·im`, each part an independent real ball.
#[derive(Clone, PartialEq)]
pub struct ComplexBall<T: BallScalar> {
    pub re: Ball<T>,
    pub im: Ball<T>,
}

impl<T: BallScalar> ComplexBall<T> {
    pub fn new(re: Ball<T>, im: Ball<T>) -> Self {
        ComplexBall { re, im }
    }

    pub fn from_real(re: Ball<T>) -> Self {
        let prec = re.prec();
        ComplexBall::new(re, Ball::zero(prec))
    }

    pub fn zero(prec: u32) -> Self {
        Self::from_real(Ball::zero(prec))
    }

    pub fn one(prec: u32) -> Self {
        Self::from_real(Ball::one(prec))
    }

    pub fn prec(&self) -> u32 {
        self.re.prec().max(self.im.prec())
    }

    /// `e(x) = exp(2πix)`.
    pub fn expi_2pi(x: &Ball<T>) -> Self {
        let (c, s) = x.cos_sin_2pi();
        ComplexBall::new(c, s)
    }

    pub fn conj(&self) -> Self {
        ComplexBall::new(self.re.clone(), self.im.neg())
    }

    pub fn neg(&self) -> Self {
        ComplexBall::new(self.re.neg(), self.im.neg())
    }

    pub fn add(&self, o: &Self) -> Self {
        ComplexBall::new(self.re.add(&o.re), self.im.add(&o.im))
    }

    pub fn sub(&self, o: &Self) -> Self {
        ComplexBall::new(self.re.sub(&o.re), self.im.sub(&o.im))
    }

    pub fn mul(&self, o: &Self) -> Self {
        let re = self.re.mul(&o.re).sub(&self.im.mul(&o.im));
        let im = self.re.mul(&o.im).add(&self.im.mul(&o.re));
        ComplexBall::new(re, im)
    }

    /// Reciprocal; unbounded when the ball may contain zero.
    pub fn recip(&self) -> Self {
        let n2 = self.re.sqr().add(&self.im.sqr());
        let inv = n2.recip();
        ComplexBall::new(self.re.mul(&inv), self.im.neg().mul(&inv))
    }

    pub fn div(&self, o: &Self) -> Self {
        self.mul(&o.recip())
    }

    pub fn powi(&self, n: i64) -> Self {
        if n < 0 {
            return self.powi(-n).recip();
        }
        let mut result = ComplexBall::one(self.prec());
        let mut base = self.clone();
        let mut k = n as u64;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    pub fn scale(&self, k: &Ball<T>) -> Self {
        ComplexBall::new(self.re.mul(k), self.im.mul(k))
    }

    pub fn scale_rational(&self, q: &BigRational) -> Self {
        let k = Ball::from_rational(q, self.prec());
        self.scale(&k)
    }

    /// Widens both parts by `e`.
    pub fn add_error(self, e: Mag) -> Self {
        ComplexBall::new(self.re.add_error(e), self.im.add_error(e))
    }

    /// Ball for the modulus.
    pub fn abs(&self) -> Ball<T> {
        let prec = self.prec();
        let rm = self.re.mid().to_bigfloat();
        let im = self.im.mid().to_bigfloat();
        let (n2, e2) = rm.mul_exact(&rm).add(&im.mul_exact(&im), prec + 8);
        let mid_abs = Ball::from_bigfloat_rad(&n2, e2, prec + 8).sqrt();
        // | |z| - |z_mid| | <= |z - z_mid|
        mid_abs.add_error(self.disc_radius()).with_prec(prec)
    }

    /// Radius of a disc around the midpoint containing the ball.
    pub fn disc_radius(&self) -> Mag {
        let (a, b) = (self.re.rad(), self.im.rad());
        a.mul(&a).add(&b.mul(&b)).sqrt()
    }

    /// Exact midpoint and the disc radius.
    pub fn split_disc(&self) -> (Self, Mag) {
        let prec = self.prec();
        let mid = ComplexBall::new(Ball::exact(self.re.mid().clone(), prec), Ball::exact(self.im.mid().clone(), prec));
        (mid, self.disc_radius())
    }

    /// Upper bound on the modulus.
    pub fn abs_upper(&self) -> Mag {
        let a = self.abs();
        a.abs_upper()
    }

    pub fn contains_zero(&self) -> bool {
        self.re.contains_zero() && self.im.contains_zero()
    }

    /// Largest of the two part radii.
    pub fn rad(&self) -> Mag {
        self.re.rad().max(self.im.rad())
    }

    pub fn overlaps(&self, o: &Self) -> bool {
        self.re.overlaps(&o.re) && self.im.overlaps(&o.im)
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }
}

impl<T: BallScalar> fmt::Debug for ComplexBall<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} + i{:?}", self.re, self.im)
    }
}

impl<T: BallScalar> fmt::Display for ComplexBall<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + i{}", self.re, self.im)
    }
}

impl<T: BallScalar> Add for &ComplexBall<T> {
    type Output = ComplexBall<T>;
    fn add(self, rhs: Self) -> ComplexBall<T> {
        ComplexBall::add(self, rhs)
    }
}

impl<T: BallScalar> Sub for &ComplexBall<T> {
    type Output = ComplexBall<T>;
    fn sub(self, rhs: Self) -> ComplexBall<T> {
        ComplexBall::sub(self, rhs)
    }
}

impl<T: BallScalar> Mul for &ComplexBall<T> {
    type Output = ComplexBall<T>;
    fn mul(self, rhs: Self) -> ComplexBall<T> {
        ComplexBall::mul(self, rhs)
    }
}

impl<T: BallScalar> Neg for &ComplexBall<T> {
    type Output = ComplexBall<T>;
    fn neg(self) -> ComplexBall<T> {
        ComplexBall::neg(self)
    }
}
