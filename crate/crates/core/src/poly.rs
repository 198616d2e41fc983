//! Dense univariate polynomials over exact rings.

use std::fmt;
use std::ops::Neg;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, Zero};
use ssm_ball::{Ball, BallScalar, ComplexBall};

/// Coefficient ring requirements.
pub trait Coeff: Clone + Num + Neg<Output = Self> + PartialEq {}
impl<T: Clone + Num + Neg<Output = T> + PartialEq> Coeff for T {}

/// Polynomial with coefficients stored from the constant term upward, with no
/// trailing zeros (the zero polynomial is the empty vector).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly<T> {
    c: Vec<T>,
}

pub type IntPoly = Poly<BigInt>;
pub type RatPoly = Poly<BigRational>;

impl<T: Coeff> Poly<T> {
    pub fn new(mut c: Vec<T>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        Poly { c }
    }

    pub fn zero() -> Self {
        Poly { c: Vec::new() }
    }

    pub fn one() -> Self {
        Poly { c: vec![T::one()] }
    }

    pub fn constant(v: T) -> Self {
        Poly::new(vec![v])
    }

    /// `v * x^k`.
    pub fn monomial(v: T, k: usize) -> Self {
        let mut c = vec![T::zero(); k + 1];
        c[k] = v;
        Poly::new(c)
    }

    pub fn x() -> Self {
        Self::monomial(T::one(), 1)
    }

    pub fn coeffs(&self) -> &[T] {
        &self.c
    }

    pub fn coeff(&self, i: usize) -> T {
        self.c.get(i).cloned().unwrap_or_else(T::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    /// Degree with the zero polynomial mapped to 0.
    pub fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    /// Leading coefficient (zero for the zero polynomial).
    pub fn lc(&self) -> T {
        self.c.last().cloned().unwrap_or_else(T::zero)
    }

    pub fn eval(&self, x: &T) -> T {
        let mut acc = T::zero();
        for a in self.c.iter().rev() {
            acc = acc * x.clone() + a.clone();
        }
        acc
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        Poly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        Poly::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }

    pub fn neg(&self) -> Self {
        Poly::new(self.c.iter().map(|a| -a.clone()).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut c = vec![T::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                c[i + j] = c[i + j].clone() + a.clone() * b.clone();
            }
        }
        Poly::new(c)
    }

    pub fn scale(&self, k: &T) -> Self {
        Poly::new(self.c.iter().map(|a| a.clone() * k.clone()).collect())
    }

    pub fn pow(&self, mut n: u32) -> Self {
        let mut result = Self::one();
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                result = result.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    pub fn derivative(&self) -> Self {
        let mut c = Vec::with_capacity(self.c.len().saturating_sub(1));
        let mut k = T::zero();
        for a in self.c.iter() {
            if !k.is_zero() {
                c.push(a.clone() * k.clone());
            }
            k = k + T::one();
        }
        Poly::new(c)
    }

    /// `self(other(x))`.
    pub fn compose(&self, other: &Self) -> Self {
        let mut acc = Self::zero();
        for a in self.c.iter().rev() {
            acc = acc.mul(other).add(&Self::constant(a.clone()));
        }
        acc
    }

    /// `x^deg * self(1/x)`.
    pub fn reversed(&self) -> Self {
        Poly::new(self.c.iter().rev().cloned().collect())
    }

    pub fn map<U: Coeff>(&self, f: impl Fn(&T) -> U) -> Poly<U> {
        Poly::new(self.c.iter().map(f).collect())
    }

    /// Palindromic coefficient sequence.
    pub fn is_reciprocal(&self) -> bool {
        let n = self.c.len();
        (0..n / 2).all(|i| self.c[i] == self.c[n - 1 - i])
    }
}

impl RatPoly {
    pub fn from_int(p: &IntPoly) -> Self {
        p.map(|a| BigRational::from_integer(a.clone()))
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let inv = self.lc().recip();
        self.scale(&inv)
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let dd = d.deg();
        let inv = d.lc().recip();
        let mut r = self.c.clone();
        if r.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut q = vec![BigRational::zero(); r.len() - dd];
        for i in (0..q.len()).rev() {
            let t = &r[i + dd] * &inv;
            if !t.is_zero() {
                for (j, b) in d.c.iter().enumerate() {
                    r[i + j] = &r[i + j] - &t * b;
                }
            }
            q[i] = t;
        }
        r.truncate(dd);
        (Poly::new(q), Poly::new(r))
    }

    pub fn rem(&self, d: &Self) -> Self {
        self.div_rem(d).1
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, o: &Self) -> Self {
        let mut a = self.clone();
        let mut b = o.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `(g, s, t)` with `s*self + t*o = g` monic.
    pub fn xgcd(&self, o: &Self) -> (Self, Self, Self) {
        let (mut r0, mut r1) = (self.clone(), o.clone());
        let (mut s0, mut s1) = (Self::one(), Self::zero());
        let (mut t0, mut t1) = (Self::zero(), Self::one());
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            r0 = std::mem::replace(&mut r1, r);
            let s = s0.sub(&q.mul(&s1));
            s0 = std::mem::replace(&mut s1, s);
            let t = t0.sub(&q.mul(&t1));
            t0 = std::mem::replace(&mut t1, t);
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let inv = r0.lc().recip();
        (r0.scale(&inv), s0.scale(&inv), t0.scale(&inv))
    }

    /// Squarefree part, monic.
    pub fn squarefree(&self) -> Self {
        if self.deg() == 0 {
            return Self::one();
        }
        let g = self.gcd(&self.derivative());
        self.div_rem(&g).0.monic()
    }

    /// Primitive integer polynomial with positive leading coefficient.
    pub fn to_primitive_int(&self) -> IntPoly {
        if self.is_zero() {
            return IntPoly::zero();
        }
        let l = self
            .c
            .iter()
            .fold(BigInt::one(), |acc, a| acc.lcm(a.denom()));
        let ints = IntPoly::new(
            self.c
                .iter()
                .map(|a| (a * BigRational::from_integer(l.clone())).to_integer())
                .collect(),
        );
        ints.primitive_part()
    }

    /// Sturm sequence of a squarefree polynomial.
    pub fn sturm_sequence(&self) -> Vec<Self> {
        let mut seq = vec![self.clone(), self.derivative()];
        loop {
            let n = seq.len();
            if seq[n - 1].is_zero() {
                seq.pop();
                break;
            }
            let r = seq[n - 2].rem(&seq[n - 1]).neg();
            if r.is_zero() {
                break;
            }
            seq.push(r);
        }
        seq
    }

    /// Number of distinct real roots in the half-open interval `(a, b]`.
    pub fn count_roots_between(&self, a: &BigRational, b: &BigRational) -> usize {
        let seq = self.squarefree().sturm_sequence();
        let va = sign_changes(seq.iter().map(|p| p.eval(a)));
        let vb = sign_changes(seq.iter().map(|p| p.eval(b)));
        va.saturating_sub(vb)
    }

    /// Number of distinct real roots in `(a, +inf)`.
    pub fn count_roots_above(&self, a: &BigRational) -> usize {
        let seq = self.squarefree().sturm_sequence();
        let va = sign_changes(seq.iter().map(|p| p.eval(a)));
        let vinf = sign_changes(seq.iter().map(|p| p.lc()));
        va.saturating_sub(vinf)
    }

    /// Number of distinct real roots.
    pub fn count_real_roots(&self) -> usize {
        let seq = self.squarefree().sturm_sequence();
        let neg = sign_changes(seq.iter().map(|p| {
            if p.deg() % 2 == 0 {
                p.lc()
            } else {
                -p.lc()
            }
        }));
        let pos = sign_changes(seq.iter().map(|p| p.lc()));
        neg.saturating_sub(pos)
    }
}

fn sign_changes(vals: impl Iterator<Item = BigRational>) -> usize {
    let mut last = 0i8;
    let mut n = 0;
    for v in vals {
        let s = if v.is_positive() {
            1
        } else if v.is_negative() {
            -1
        } else {
            0
        };
        if s != 0 {
            if last != 0 && s != last {
                n += 1;
            }
            last = s;
        }
    }
    n
}

impl IntPoly {
    pub fn from_i64(c: &[i64]) -> Self {
        Poly::new(c.iter().map(|&v| BigInt::from(v)).collect())
    }

    /// Gcd of the coefficients (nonnegative).
    pub fn content(&self) -> BigInt {
        self.c.iter().fold(BigInt::zero(), |acc, a| acc.gcd(a))
    }

    /// Divides out the content and makes the leading coefficient positive.
    pub fn primitive_part(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut g = self.content();
        if self.lc().is_negative() {
            g = -g;
        }
        Poly::new(self.c.iter().map(|a| a / &g).collect())
    }

    pub fn is_monic(&self) -> bool {
        self.lc().is_one()
    }

    /// Exact quotient over the integers, if `d` divides `self`.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        let (q, r) = RatPoly::from_int(self).div_rem(&RatPoly::from_int(d));
        if !r.is_zero() || q.c.iter().any(|a| !a.is_integer()) {
            return None;
        }
        Some(q.map(|a| a.to_integer()))
    }

    /// Cauchy bound: every complex root has modulus below it.
    pub fn root_bound(&self) -> BigRational {
        let lc = BigRational::from_integer(self.lc().abs());
        let m = self.c[..self.c.len().saturating_sub(1)]
            .iter()
            .map(|a| BigRational::from_integer(a.abs()))
            .max()
            .unwrap_or_else(BigRational::zero);
        BigRational::one() + m / lc
    }

    /// Sum of absolute values of the coefficients.
    pub fn l1_norm(&self) -> BigInt {
        self.c.iter().map(|a| a.abs()).sum()
    }

    pub fn eval_ball<T: BallScalar>(&self, x: &Ball<T>) -> Ball<T> {
        let prec = x.prec();
        let mut acc = Ball::zero(prec);
        for a in self.c.iter().rev() {
            acc = acc.mul(x).add(&Ball::from_bigint(a, prec));
        }
        acc
    }

    pub fn eval_cball<T: BallScalar>(&self, z: &ComplexBall<T>) -> ComplexBall<T> {
        let prec = z.prec();
        let mut acc = ComplexBall::zero(prec);
        for a in self.c.iter().rev() {
            acc = acc
                .mul(z)
                .add(&ComplexBall::from_real(Ball::from_bigint(a, prec)));
        }
        acc
    }

    /// Discriminant, via the resultant with the derivative.
    pub fn discriminant(&self) -> BigInt {
        let d = self.deg();
        if d == 0 {
            return BigInt::one();
        }
        let res = resultant(self, &self.derivative());
        let sign = if (d * (d - 1) / 2) % 2 == 0 {
            BigInt::one()
        } else {
            -BigInt::one()
        };
        (sign * res) / self.lc()
    }
}

/// Resultant of two integer polynomials, by exact elimination over the rationals.
pub fn resultant(a: &IntPoly, b: &IntPoly) -> BigInt {
    let m = a.deg();
    let n = b.deg();
    let size = m + n;
    if size == 0 {
        return BigInt::one();
    }
    // Sylvester matrix
    let mut rows: Vec<Vec<BigRational>> = Vec::with_capacity(size);
    for i in 0..n {
        let mut row = vec![BigRational::zero(); size];
        for (j, c) in a.coeffs().iter().rev().enumerate() {
            row[i + j] = BigRational::from_integer(c.clone());
        }
        rows.push(row);
    }
    for i in 0..m {
        let mut row = vec![BigRational::zero(); size];
        for (j, c) in b.coeffs().iter().rev().enumerate() {
            row[i + j] = BigRational::from_integer(c.clone());
        }
        rows.push(row);
    }
    crate::linalg::determinant(rows).to_integer()
}

impl<T: Coeff + fmt::Display + Signed> fmt::Display for Poly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, a) in self.c.iter().enumerate().rev() {
            if a.is_zero() {
                continue;
            }
            let neg = a.is_negative();
            let mag = a.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let show_coeff = !mag.is_one() || i == 0;
            if show_coeff {
                write!(f, "{mag}")?;
            }
            match i {
                0 => {}
                1 => write!(f, "x")?,
                _ => write!(f, "x^{i}")?,
            }
        }
        Ok(())
    }
}

impl<T: fmt::Debug> fmt::Debug for Poly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly{:?}", self.c)
    }
}
