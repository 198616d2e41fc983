//! Arbitrary-precision dyadic floating point numbers.
//!
//! A [`BigFloat`] is the exact dyadic rational `man * 2^exp`. Nothing is ever
//! rounded silently: every inexact operation takes a target precision in bits
//! and returns the rounded value together with an upper bound on the error.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::mag::Mag;

/// Exact dyadic number `man * 2^exp`, canonical with `man` odd (or zero).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BigFloat {
    man: BigInt,
    exp: i64,
}

impl BigFloat {
    pub fn zero() -> Self {
        BigFloat {
            man: BigInt::zero(),
            exp: 0,
        }
    }

    pub fn one() -> Self {
        Self::from_i64(1)
    }

    pub fn from_i64(v: i64) -> Self {
        Self::from_parts(BigInt::from(v), 0)
    }

    pub fn from_bigint(v: BigInt) -> Self {
        Self::from_parts(v, 0)
    }

    /// `man * 2^exp`, canonicalized.
    pub fn from_parts(man: BigInt, exp: i64) -> Self {
        if man.is_zero() {
            return Self::zero();
        }
        let tz = man.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            BigFloat {
                man: man >> tz,
                exp: exp + tz as i64,
            }
        } else {
            BigFloat { man, exp }
        }
    }

    /// Exact conversion; `None` for NaN or infinities.
    pub fn from_f64(v: f64) -> Option<Self> {
        if !v.is_finite() {
            return None;
        }
        if v == 0.0 {
            return Some(Self::zero());
        }
        let bits = v.to_bits();
        let neg = bits >> 63 == 1;
        let raw_exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (man, exp) = if raw_exp == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), raw_exp - 1075)
        };
        let man = if neg {
            -BigInt::from(man)
        } else {
            BigInt::from(man)
        };
        Some(Self::from_parts(man, exp))
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.man
    }

    pub fn exponent(&self) -> i64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.man.is_zero()
    }

    pub fn sign(&self) -> Ordering {
        match self.man.sign() {
            Sign::Minus => Ordering::Less,
            Sign::NoSign => Ordering::Equal,
            Sign::Plus => Ordering::Greater,
        }
    }

    pub fn is_negative(&self) -> bool {
        self.man.is_negative()
    }

    pub fn neg(&self) -> Self {
        BigFloat {
            man: -&self.man,
            exp: self.exp,
        }
    }

    pub fn abs(&self) -> Self {
        BigFloat {
            man: self.man.abs(),
            exp: self.exp,
        }
    }

    pub fn mul_2exp(&self, e: i64) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        BigFloat {
            man: self.man.clone(),
            exp: self.exp + e,
        }
    }

    /// Number of significant bits of the mantissa.
    pub fn bits(&self) -> u64 {
        self.man.bits()
    }

    /// `t` such that `2^(t-1) <= |self| < 2^t`; `i64::MIN` for zero.
    pub fn top(&self) -> i64 {
        if self.is_zero() {
            i64::MIN
        } else {
            self.exp + self.man.bits() as i64
        }
    }

    /// Upper bound on `|self|` as a [`Mag`].
    pub fn mag_upper(&self) -> Mag {
        if self.is_zero() {
            return Mag::ZERO;
        }
        let bits = self.man.bits();
        let mag = self.man.magnitude();
        if bits <= 64 {
            return Mag::from_parts_up(mag.to_u64().unwrap() as u128, self.exp);
        }
        let s = bits - 64;
        let top: u64 = (mag >> s).to_u64().unwrap();
        // +1 covers the discarded low bits
        Mag::from_parts_up(top as u128 + 1, self.exp + s as i64)
    }

    /// Lower bound on `|self|` as an `f64`-free dyadic (truncated to 64 bits).
    pub fn abs_lower_trunc(&self) -> BigFloat {
        let bits = self.man.bits();
        if bits <= 64 {
            return self.abs();
        }
        let s = bits - 64;
        Self::from_parts(BigInt::from(self.man.magnitude() >> s), self.exp + s as i64)
    }

    /// Lower bound on `|self|` as a [`Mag`] (zero only for zero).
    pub fn mag_lower(&self) -> Mag {
        let t = self.abs_lower_trunc();
        let bits = t.man.bits();
        let mag = t.man.magnitude();
        if bits <= 32 {
            return Mag::from_parts_up(mag.to_u64().unwrap() as u128, t.exp);
        }
        let s = bits - 32;
        Mag::from_parts_up((mag >> s).to_u64().unwrap() as u128, t.exp + s as i64)
    }

    /// Exact conversion of a magnitude.
    pub fn from_mag(m: &Mag) -> Self {
        assert!(m.is_finite(), "cannot convert an infinite magnitude");
        let (man, exp) = m.parts();
        Self::from_parts(BigInt::from(man), exp)
    }

    /// Nearest `f64` (ties may go either way); saturates to `±inf`.
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.man.bits();
        let (m, e) = if bits > 64 {
            let s = bits - 64;
            ((self.man.magnitude() >> s).to_u64().unwrap(), self.exp + s as i64)
        } else {
            (self.man.magnitude().to_u64().unwrap(), self.exp)
        };
        let v = if e > 1100 {
            f64::INFINITY
        } else if e < -1200 {
            // split the scaling to keep subnormal results
            (m as f64) * 2f64.powi(-600) * 2f64.powi((e + 600).max(-1200) as i32)
        } else if e < -1000 {
            (m as f64) * 2f64.powi(-500) * 2f64.powi((e + 500) as i32)
        } else {
            (m as f64) * 2f64.powi(e as i32)
        };
        if self.is_negative() {
            -v
        } else {
            v
        }
    }

    /// Rounds to at most `prec` significant bits (round half up in magnitude).
    pub fn round(&self, prec: u32) -> (Self, Mag) {
        let bits = self.man.bits();
        let prec = prec.max(2) as u64;
        if bits <= prec {
            return (self.clone(), Mag::ZERO);
        }
        let s = bits - prec;
        let mag = self.man.magnitude();
        let mut q = mag >> s;
        if mag.bit(s - 1) {
            q += 1u32;
        }
        let q = if self.is_negative() {
            -BigInt::from(q)
        } else {
            BigInt::from(q)
        };
        (
            Self::from_parts(q, self.exp + s as i64),
            Mag::pow2(self.exp + s as i64 - 1),
        )
    }

    /// Exact sum.
    pub fn add_exact(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let e = self.exp.min(other.exp);
        let a = &self.man << (self.exp - e) as usize;
        let b = &other.man << (other.exp - e) as usize;
        Self::from_parts(a + b, e)
    }

    pub fn sub_exact(&self, other: &Self) -> Self {
        self.add_exact(&other.neg())
    }

    pub fn mul_exact(&self, other: &Self) -> Self {
        Self::from_parts(&self.man * &other.man, self.exp + other.exp)
    }

    /// Rounded sum; far-apart operands are handled without forming the exact sum.
    pub fn add(&self, other: &Self, prec: u32) -> (Self, Mag) {
        if self.is_zero() {
            return other.round(prec);
        }
        if other.is_zero() {
            return self.round(prec);
        }
        let (ta, tb) = (self.top(), other.top());
        let gap = prec as i64 + 8;
        if tb < ta - gap && tb < self.exp {
            let (v, e) = self.round(prec);
            return (v, e.add(&other.mag_upper()));
        }
        if ta < tb - gap && ta < other.exp {
            let (v, e) = other.round(prec);
            return (v, e.add(&self.mag_upper()));
        }
        self.add_exact(other).round(prec)
    }

    pub fn sub(&self, other: &Self, prec: u32) -> (Self, Mag) {
        self.add(&other.neg(), prec)
    }

    pub fn mul(&self, other: &Self, prec: u32) -> (Self, Mag) {
        self.mul_exact(other).round(prec)
    }

    /// Rounded quotient; panics on division by zero.
    pub fn div(&self, other: &Self, prec: u32) -> (Self, Mag) {
        assert!(!other.is_zero(), "BigFloat division by zero");
        if self.is_zero() {
            return (Self::zero(), Mag::ZERO);
        }
        let ba = self.man.bits() as i64;
        let bb = other.man.bits() as i64;
        let s = (prec as i64 + 4 + bb - ba).max(0);
        let num = &self.man << s as usize;
        let (q, r) = num.div_rem(&other.man);
        let exp = self.exp - s - other.exp;
        let unit = if r.is_zero() { Mag::ZERO } else { Mag::pow2(exp) };
        let (v, e) = Self::from_parts(q, exp).round(prec);
        (v, e.add(&unit))
    }

    /// Rounded square root of a nonnegative value.
    pub fn sqrt(&self, prec: u32) -> (Self, Mag) {
        assert!(!self.is_negative(), "square root of a negative BigFloat");
        if self.is_zero() {
            return (Self::zero(), Mag::ZERO);
        }
        let mut man = self.man.clone();
        let mut exp = self.exp;
        if exp.rem_euclid(2) != 0 {
            man <<= 1;
            exp -= 1;
        }
        let want = 2 * (prec as i64 + 4);
        let bits = man.bits() as i64;
        let t = ((want - bits).max(0) + 1) / 2;
        man <<= (2 * t) as usize;
        exp -= 2 * t;
        let root = man.sqrt();
        let exact = &root * &root == man;
        let exp = exp / 2;
        let unit = if exact { Mag::ZERO } else { Mag::pow2(exp) };
        let (v, e) = Self::from_parts(root, exp).round(prec);
        (v, e.add(&unit))
    }

    /// `floor(self)`.
    pub fn floor(&self) -> BigInt {
        if self.exp >= 0 {
            &self.man << self.exp as usize
        } else {
            let s = (-self.exp) as u64;
            if s > self.man.bits() + 1 {
                return if self.is_negative() {
                    -BigInt::one()
                } else {
                    BigInt::zero()
                };
            }
            self.man.div_floor(&(BigInt::one() << s as usize))
        }
    }

    /// `ceil(self)`.
    pub fn ceil(&self) -> BigInt {
        -self.neg().floor()
    }

    /// Nearest integer, ties rounded up.
    pub fn round_int(&self) -> BigInt {
        self.add_exact(&Self::from_parts(BigInt::one(), -1)).floor()
    }

    pub fn to_rational(&self) -> BigRational {
        if self.exp >= 0 {
            BigRational::from_integer(&self.man << self.exp as usize)
        } else {
            BigRational::new(self.man.clone(), BigInt::one() << (-self.exp) as usize)
        }
    }

    /// Rounded conversion of a rational.
    pub fn from_rational(q: &BigRational, prec: u32) -> (Self, Mag) {
        let num = Self::from_bigint(q.numer().clone());
        if q.denom().is_one() {
            return num.round(prec);
        }
        num.div(&Self::from_bigint(q.denom().clone()), prec)
    }

    /// Exact comparison with a rational.
    pub fn cmp_rational(&self, q: &BigRational) -> Ordering {
        // self vs n/d with d > 0  <=>  self*d vs n
        let lhs = self.mul_exact(&Self::from_bigint(q.denom().clone()));
        lhs.cmp(&Self::from_bigint(q.numer().clone()))
    }

    /// Scientific-notation string with `digits` significant decimal digits
    /// (the last digit is truncated, not rounded).
    pub fn to_sci_string(&self, digits: usize) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let digits = digits.max(1);
        let q = self.to_rational().abs();
        // decimal exponent estimate from the binary one
        let mut e10 = ((self.top() - 1) as f64 * std::f64::consts::LOG10_2).floor() as i64;
        let ten = BigInt::from(10);
        let scaled = |e: i64| -> BigRational {
            let p = BigRational::from_integer(num_traits::pow(ten.clone(), e.unsigned_abs() as usize));
            if e >= 0 {
                &q / p
            } else {
                &q * p
            }
        };
        let mut m = scaled(e10);
        let one = BigRational::one();
        let ten_q = BigRational::from_integer(ten.clone());
        while m >= ten_q {
            e10 += 1;
            m = scaled(e10);
        }
        while m < one {
            e10 -= 1;
            m = scaled(e10);
        }
        let int = (m * BigRational::from_integer(num_traits::pow(ten, digits - 1)))
            .to_integer()
            .to_string();
        let mut s = String::new();
        if self.is_negative() {
            s.push('-');
        }
        s.push_str(&int[..1]);
        if int.len() > 1 {
            s.push('.');
            s.push_str(&int[1..]);
        }
        if e10 != 0 {
            s.push_str(&format!("e{e10}"));
        }
        s
    }
}

impl PartialOrd for BigFloat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for BigFloat {
    fn cmp(&self, other: &Self) -> Ordering {
        let (sa, sb) = (self.sign(), other.sign());
        if sa != sb {
            return sa.cmp(&sb);
        }
        if sa == Ordering::Equal {
            return Ordering::Equal;
        }
        let mag = match self.top().cmp(&other.top()) {
            Ordering::Equal => {
                let e = self.exp.min(other.exp);
                let a = self.man.magnitude() << (self.exp - e) as usize;
                let b = other.man.magnitude() << (other.exp - e) as usize;
                a.cmp(&b)
            }
            o => o,
        };
        if sa == Ordering::Less {
            mag.reverse()
        } else {
            mag
        }
    }
}

impl fmt::Debug for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_sci_string(20))
    }
}

impl fmt::Display for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(17);
        write!(f, "{}", self.to_sci_string(digits))
    }
}

impl Default for BigFloat {
    fn default() -> Self {
        Self::zero()
    }
}
