//! Unsigned magnitudes with one-sided (upward) rounding.
//!
//! A [`Mag`] is a 32-bit mantissa with an unbounded binary exponent. It is the
//! radius type of every ball: all operations round up, so a `Mag` computed from
//! upper bounds is itself an upper bound.

use std::cmp::Ordering;
use std::fmt;

const MAN_BITS: u32 = 32;
const MAN_MIN: u64 = 1 << (MAN_BITS - 1);
const MAN_LIM: u64 = 1 << MAN_BITS;

/// Nonnegative magnitude `man * 2^exp`, rounded up on every operation.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Mag {
    man: u64,
    exp: i64,
}

impl Mag {
    pub const ZERO: Mag = Mag { man: 0, exp: 0 };
    pub const INF: Mag = Mag {
        man: u64::MAX,
        exp: i64::MAX,
    };

    pub fn is_zero(&self) -> bool {
        self.man == 0
    }

    pub fn is_finite(&self) -> bool {
        self.man != u64::MAX
    }

    /// `2^e`.
    pub fn pow2(e: i64) -> Mag {
        Mag {
            man: MAN_MIN,
            exp: e - (MAN_BITS as i64 - 1),
        }
    }

    pub fn from_u64(v: u64) -> Mag {
        Self::normalize_up(v as u128, 0)
    }

    /// Raw mantissa/exponent pair; `value = man * 2^exp`.
    pub fn parts(&self) -> (u64, i64) {
        (self.man, self.exp)
    }

    /// Builds `man * 2^exp`, rounding the mantissa up to 32 bits.
    pub fn from_parts_up(man: u128, exp: i64) -> Mag {
        Self::normalize_up(man, exp)
    }

    fn normalize_up(mut man: u128, mut exp: i64) -> Mag {
        if man == 0 {
            return Mag::ZERO;
        }
        let bits = 128 - man.leading_zeros();
        if bits > MAN_BITS {
            let s = bits - MAN_BITS;
            let low = man & ((1u128 << s) - 1);
            man >>= s;
            if low != 0 {
                man += 1;
            }
            exp += s as i64;
            if man == MAN_LIM as u128 {
                man >>= 1;
                exp += 1;
            }
        } else if bits < MAN_BITS {
            let s = MAN_BITS - bits;
            man <<= s;
            exp -= s as i64;
        }
        Mag {
            man: man as u64,
            exp,
        }
    }

    /// Upper bound for a finite nonnegative `f64`; `NaN` and infinities give [`Mag::INF`].
    pub fn from_f64_up(v: f64) -> Mag {
        if !v.is_finite() {
            return Mag::INF;
        }
        let v = v.abs();
        if v == 0.0 {
            return Mag::ZERO;
        }
        let bits = v.to_bits();
        let raw_exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (man, exp) = if raw_exp == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), raw_exp - 1075)
        };
        Self::normalize_up(man as u128, exp)
    }

    /// Approximate value; may round either way and saturates to `inf`.
    pub fn to_f64(&self) -> f64 {
        if !self.is_finite() {
            return f64::INFINITY;
        }
        if self.man == 0 {
            return 0.0;
        }
        let e = self.exp.clamp(-2000, 2000) as i32;
        (self.man as f64) * 2f64.powi(e)
    }

    /// Upper bound on `log2(self)`, as an integer (`i64::MIN` for zero).
    pub fn log2_ceil(&self) -> i64 {
        if self.is_zero() {
            return i64::MIN;
        }
        if !self.is_finite() {
            return i64::MAX;
        }
        self.exp + MAN_BITS as i64
    }

    pub fn add(&self, other: &Mag) -> Mag {
        if !self.is_finite() || !other.is_finite() {
            return Mag::INF;
        }
        if self.is_zero() {
            return *other;
        }
        if other.is_zero() {
            return *self;
        }
        let (hi, lo) = if self.exp >= other.exp {
            (self, other)
        } else {
            (other, self)
        };
        let shift = hi.exp - lo.exp;
        if shift > 64 {
            // lo < 2^(hi.exp) and is absorbed by bumping the last mantissa bit
            return Self::normalize_up(hi.man as u128 + 1, hi.exp);
        }
        let sum = ((hi.man as u128) << shift) + lo.man as u128;
        Self::normalize_up(sum, lo.exp)
    }

    pub fn mul(&self, other: &Mag) -> Mag {
        if self.is_zero() || other.is_zero() {
            return Mag::ZERO;
        }
        if !self.is_finite() || !other.is_finite() {
            return Mag::INF;
        }
        Self::normalize_up(self.man as u128 * other.man as u128, self.exp + other.exp)
    }

    /// Upper bound on `self / other`; division by zero gives [`Mag::INF`].
    pub fn div(&self, other: &Mag) -> Mag {
        if self.is_zero() {
            return Mag::ZERO;
        }
        if other.is_zero() || !self.is_finite() {
            return Mag::INF;
        }
        if !other.is_finite() {
            return Mag::ZERO;
        }
        let num = (self.man as u128) << 64;
        let den = other.man as u128;
        let q = num / den + if num % den != 0 { 1 } else { 0 };
        Self::normalize_up(q, self.exp - other.exp - 64)
    }

    pub fn mul_u64(&self, k: u64) -> Mag {
        self.mul(&Mag::from_u64(k))
    }

    pub fn mul_2exp(&self, e: i64) -> Mag {
        if self.is_zero() || !self.is_finite() {
            return *self;
        }
        Mag {
            man: self.man,
            exp: self.exp + e,
        }
    }

    /// Upper bound on `sqrt(self)`.
    pub fn sqrt(&self) -> Mag {
        if self.is_zero() || !self.is_finite() {
            return *self;
        }
        let (mut man, mut exp) = (self.man as u128, self.exp);
        if exp % 2 != 0 {
            man <<= 1;
            exp -= 1;
        }
        man <<= 64;
        exp -= 64;
        let mut r = (man as f64).sqrt() as u128;
        while r * r < man {
            r += 1;
        }
        while r > 0 && (r - 1) * (r - 1) >= man {
            r -= 1;
        }
        Self::normalize_up(r, exp / 2)
    }

    pub fn max(self, other: Mag) -> Mag {
        if self >= other {
            self
        } else {
            other
        }
    }
}

impl PartialOrd for Mag {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Mag {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.is_finite(), other.is_finite()) {
            (false, false) => return Ordering::Equal,
            (false, true) => return Ordering::Greater,
            (true, false) => return Ordering::Less,
            _ => {}
        }
        match (self.is_zero(), other.is_zero()) {
            (true, true) => Ordering::Equal,
            (true, false) => Ordering::Less,
            (false, true) => Ordering::Greater,
            _ => self
                .exp
                .cmp(&other.exp)
                .then_with(|| self.man.cmp(&other.man)),
        }
    }
}

impl Default for Mag {
    fn default() -> Self {
        Mag::ZERO
    }
}

impl fmt::Debug for Mag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Mag({:e})", self.to_f64())
    }
}

impl fmt::Display for Mag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e}", self.to_f64())
    }
}
