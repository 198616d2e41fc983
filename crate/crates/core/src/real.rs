//! Computable reals as expression graphs with exact folding.
//!
//! Rational and number-field subexpressions are folded exactly as they are
//! built, so a value that is algebraic in a known field stays exact. Everything
//! else is evaluated on demand to a requested accuracy with ball arithmetic.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use ssm_ball::{Ball, BallScalar, Mag, RealBall};
use thiserror::Error;

use crate::algebraic::{contains, min_poly_of, FieldElement, Membership, NumberField};
use crate::poly::IntPoly;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ParseError {
    #[error("ParseError: {0}")]
    Syntax(String),
    #[error("ParseError: field coordinates `[...]` need a number field")]
    NoField,
}

#[derive(Clone)]
enum Node {
    Rational(BigRational),
    Field(NumberField, FieldElement),
    Pi,
    Euler,
    Sqrt(Real),
    Exp(Real),
    Ln(Real),
    Add(Real, Real),
    Sub(Real, Real),
    Mul(Real, Real),
    Div(Real, Real),
    Neg(Real),
    PowI(Real, i64),
}

/// A real number given by an expression graph.
#[derive(Clone)]
pub struct Real(Arc<Node>);

/// An exactly known value.
#[derive(Clone, Debug)]
pub enum Exact {
    Rational(BigRational),
    Field(NumberField, FieldElement),
}

impl Real {
    fn node(n: Node) -> Real {
        Real(Arc::new(n))
    }

    pub fn rational(q: BigRational) -> Real {
        Real::node(Node::Rational(q))
    }

    pub fn int(v: i64) -> Real {
        Real::rational(BigRational::from_integer(v.into()))
    }

    pub fn ratio(n: i64, d: i64) -> Real {
        Real::rational(BigRational::new(n.into(), d.into()))
    }

    /// A field element; rational elements fold to rationals.
    pub fn field(k: &NumberField, a: FieldElement) -> Real {
        match a.as_rational() {
            Some(q) => Real::rational(q),
            None => Real::node(Node::Field(k.clone(), a)),
        }
    }

    pub fn pi() -> Real {
        Real::node(Node::Pi)
    }

    pub fn e() -> Real {
        Real::node(Node::Euler)
    }

    pub fn exact(&self) -> Option<Exact> {
        match &*self.0 {
            Node::Rational(q) => Some(Exact::Rational(q.clone())),
            Node::Field(k, a) => Some(Exact::Field(k.clone(), a.clone())),
            _ => None,
        }
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        match &*self.0 {
            Node::Rational(q) => Some(q.clone()),
            _ => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(&*self.0, Node::Rational(_) | Node::Field(..))
    }

    /// The field carrying this value when it is an exact irrational element.
    pub fn field_of(&self) -> Option<NumberField> {
        match &*self.0 {
            Node::Field(k, _) => Some(k.clone()),
            _ => None,
        }
    }

    fn combine(
        a: &Real,
        b: &Real,
        rat: impl Fn(&BigRational, &BigRational) -> Option<BigRational>,
        fld: impl Fn(&NumberField, &FieldElement, &FieldElement) -> Option<FieldElement>,
        fallback: impl Fn(Real, Real) -> Node,
    ) -> Real {
        match (&*a.0, &*b.0) {
            (Node::Rational(x), Node::Rational(y)) => {
                if let Some(q) = rat(x, y) {
                    return Real::rational(q);
                }
            }
            (Node::Field(k, x), Node::Rational(y)) => {
                if let Some(v) = fld(k, x, &k.from_rational(y.clone())) {
                    return Real::field(k, v);
                }
            }
            (Node::Rational(x), Node::Field(k, y)) => {
                if let Some(v) = fld(k, &k.from_rational(x.clone()), y) {
                    return Real::field(k, v);
                }
            }
            (Node::Field(k, x), Node::Field(k2, y)) if k == k2 => {
                if let Some(v) = fld(k, x, y) {
                    return Real::field(k, v);
                }
            }
            _ => {}
        }
        Real::node(fallback(a.clone(), b.clone()))
    }

    pub fn add(&self, o: &Real) -> Real {
        Self::combine(self, o, |x, y| Some(x + y), |k, x, y| Some(k.add(x, y)), Node::Add)
    }

    pub fn sub(&self, o: &Real) -> Real {
        Self::combine(self, o, |x, y| Some(x - y), |k, x, y| Some(k.sub(x, y)), Node::Sub)
    }

    pub fn mul(&self, o: &Real) -> Real {
        Self::combine(self, o, |x, y| Some(x * y), |k, x, y| Some(k.mul(x, y)), Node::Mul)
    }

    /// Quotient; division by an exact zero is left unevaluated and evaluates to an unbounded ball.
    pub fn div(&self, o: &Real) -> Real {
        Self::combine(
            self,
            o,
            |x, y| (!y.is_zero()).then(|| x / y),
            |k, x, y| k.div(x, y).ok(),
            Node::Div,
        )
    }

    pub fn neg(&self) -> Real {
        match &*self.0 {
            Node::Rational(q) => Real::rational(-q),
            Node::Field(k, a) => Real::field(k, k.neg(a)),
            _ => Real::node(Node::Neg(self.clone())),
        }
    }

    pub fn powi(&self, n: i64) -> Real {
        match &*self.0 {
            Node::Rational(q) if !(q.is_zero() && n < 0) => {
                let r = num_traits::pow(q.clone(), n.unsigned_abs() as usize);
                Real::rational(if n < 0 { r.recip() } else { r })
            }
            Node::Field(k, a) => match k.pow(a, n) {
                Ok(v) => Real::field(k, v),
                Err(_) => Real::node(Node::PowI(self.clone(), n)),
            },
            _ => Real::node(Node::PowI(self.clone(), n)),
        }
    }

    pub fn sqrt(&self) -> Real {
        if let Node::Rational(q) = &*self.0 {
            if !q.is_negative() {
                let (n, d) = (q.numer(), q.denom());
                let (rn, rd) = (n.sqrt(), d.sqrt());
                if &(&rn * &rn) == n && &(&rd * &rd) == d {
                    return Real::rational(BigRational::new(rn, rd));
                }
            }
        }
        Real::node(Node::Sqrt(self.clone()))
    }

    pub fn exp(&self) -> Real {
        if self.as_rational().is_some_and(|q| q.is_zero()) {
            return Real::int(1);
        }
        Real::node(Node::Exp(self.clone()))
    }

    pub fn ln(&self) -> Real {
        if self.as_rational().is_some_and(|q| q.is_one()) {
            return Real::int(0);
        }
        Real::node(Node::Ln(self.clone()))
    }

    /// Ball at working precision `wp` (no accuracy target).
    fn eval_raw(&self, wp: u32) -> RealBall {
        match &*self.0 {
            Node::Rational(q) => RealBall::from_rational(q, wp),
            Node::Field(k, a) => k.embed_real(a, wp),
            Node::Pi => RealBall::pi(wp),
            Node::Euler => RealBall::one(wp).exp(),
            Node::Sqrt(x) => x.eval_raw(wp).sqrt(),
            Node::Exp(x) => x.eval_raw(wp).exp(),
            Node::Ln(x) => x.eval_raw(wp).ln(),
            Node::Add(a, b) => a.eval_raw(wp).add(&b.eval_raw(wp)),
            Node::Sub(a, b) => a.eval_raw(wp).sub(&b.eval_raw(wp)),
            Node::Mul(a, b) => a.eval_raw(wp).mul(&b.eval_raw(wp)),
            Node::Div(a, b) => a.eval_raw(wp).div(&b.eval_raw(wp)),
            Node::Neg(a) => a.eval_raw(wp).neg(),
            Node::PowI(a, n) => a.eval_raw(wp).powi(*n),
        }
    }

    /// Ball with radius at most `2^-prec · max(1, |x|)` when attainable.
    pub fn eval(&self, prec: u32) -> RealBall {
        let mut wp = prec + 24;
        loop {
            let b = self.eval_raw(wp);
            let scale = b.abs_upper().max(Mag::pow2(0));
            if b.rad() <= scale.mul_2exp(-(prec as i64)) || wp > 64 * prec.max(64) {
                let p = prec.max(b.prec());
                return b.with_prec(p);
            }
            wp *= 2;
        }
    }

    /// Ball over an arbitrary midpoint scalar.
    pub fn eval_as<T: BallScalar>(&self, prec: u32) -> Ball<T> {
        to_scalar_ball(&self.eval(prec + 8), prec)
    }

    pub fn to_f64(&self) -> f64 {
        self.eval(64).to_f64()
    }

    /// Certified comparison, exact when both sides are exact in a common field.
    /// `None` only when numerical refinement up to `max_prec` cannot separate them.
    pub fn cmp_to(&self, o: &Real, max_prec: u32) -> Option<Ordering> {
        let d = self.sub(o);
        match d.exact() {
            Some(Exact::Rational(q)) => return Some(q.cmp(&BigRational::zero())),
            Some(Exact::Field(k, a)) => return Some(k.sign(&a)),
            None => {}
        }
        let mut prec = 64;
        loop {
            let b = d.eval_raw(prec);
            if b.is_positive() {
                return Some(Ordering::Greater);
            }
            if b.is_negative() {
                return Some(Ordering::Less);
            }
            if prec >= max_prec {
                return None;
            }
            prec *= 2;
        }
    }

    /// The value as an element of `k`, when it provably lies there.
    pub fn as_field_element(&self, k: &NumberField) -> Option<FieldElement> {
        match &*self.0 {
            Node::Rational(q) => Some(k.from_rational(q.clone())),
            Node::Field(k2, a) => {
                if k2 == k {
                    Some(a.clone())
                } else {
                    a.as_rational().map(|q| k.from_rational(q))
                }
            }
            Node::Pi | Node::Euler | Node::Exp(_) | Node::Ln(_) => None,
            Node::Sqrt(x) => {
                let inner = x.as_field_element(k)?;
                if k.sign(&inner) == Ordering::Less {
                    return None;
                }
                // minimal polynomial of the square root divides m(y^2)
                let m = min_poly_of(k, &inner);
                let mut c = vec![BigInt::zero(); 2 * m.deg() + 1];
                for (i, a) in m.coeffs().iter().enumerate() {
                    c[2 * i] = a.clone();
                }
                let g = IntPoly::new(c);
                let approx = self.eval(64).add_error(Mag::pow2(-40));
                match contains(k, &g, &approx) {
                    Ok(Membership::Member(a)) => Some(a),
                    _ => None,
                }
            }
            Node::Add(a, b) => Some(k.add(&a.as_field_element(k)?, &b.as_field_element(k)?)),
            Node::Sub(a, b) => Some(k.sub(&a.as_field_element(k)?, &b.as_field_element(k)?)),
            Node::Mul(a, b) => Some(k.mul(&a.as_field_element(k)?, &b.as_field_element(k)?)),
            Node::Div(a, b) => k.div(&a.as_field_element(k)?, &b.as_field_element(k)?).ok(),
            Node::Neg(a) => Some(k.neg(&a.as_field_element(k)?)),
            Node::PowI(a, n) => k.pow(&a.as_field_element(k)?, *n).ok(),
        }
    }

    /// Parses an expression. `[c0, c1, …]` denotes `Σ c_i λ^i` in `field`, and
    /// `lambda` the generator. Decimal literals are read exactly.
    pub fn parse(s: &str, field: Option<&NumberField>) -> Result<Real, ParseError> {
        let mut p = Parser {
            toks: tokenize(s)?,
            pos: 0,
            field,
        };
        let r = p.expr()?;
        if p.pos != p.toks.len() {
            return Err(ParseError::Syntax(format!("unexpected token in `{s}`")));
        }
        Ok(r)
    }
}

/// Converts an arbitrary-precision ball to another midpoint scalar, widening soundly.
pub fn to_scalar_ball<T: BallScalar>(b: &RealBall, prec: u32) -> Ball<T> {
    if !b.rad().is_finite() {
        return Ball::new(T::zero(), Mag::INF, prec);
    }
    Ball::<T>::from_bigfloat(b.mid(), prec).add_error(b.rad())
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.0 {
            Node::Rational(q) => write!(f, "{q}"),
            Node::Field(_, a) => write!(f, "{a}"),
            Node::Pi => write!(f, "pi"),
            Node::Euler => write!(f, "e"),
            Node::Sqrt(x) => write!(f, "sqrt({x})"),
            Node::Exp(x) => write!(f, "exp({x})"),
            Node::Ln(x) => write!(f, "ln({x})"),
            Node::Add(a, b) => write!(f, "({a} + {b})"),
            Node::Sub(a, b) => write!(f, "({a} - {b})"),
            Node::Mul(a, b) => write!(f, "({a} * {b})"),
            Node::Div(a, b) => write!(f, "({a} / {b})"),
            Node::Neg(a) => write!(f, "-({a})"),
            Node::PowI(a, n) => write!(f, "({a})^({n})"),
        }
    }
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Real({self})")
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigRational),
    Ident(String),
    Sym(char),
}

fn parse_decimal(s: &str) -> Result<BigRational, ParseError> {
    let bad = || ParseError::Syntax(format!("bad number `{s}`"));
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i64>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (int, frac) = match mant.find('.') {
        Some(i) => (&mant[..i], &mant[i + 1..]),
        None => (mant, ""),
    };
    let digits = format!("{int}{frac}");
    if digits.is_empty() {
        return Err(bad());
    }
    let n: BigInt = digits.parse().map_err(|_| bad())?;
    let e = exp - frac.len() as i64;
    let ten = BigInt::from(10);
    Ok(if e >= 0 {
        BigRational::from_integer(n * num_traits::pow(ten, e as usize))
    } else {
        BigRational::new(n, num_traits::pow(ten, (-e) as usize))
    })
}

fn tokenize(s: &str) -> Result<Vec<Tok>, ParseError> {
    let c: Vec<char> = s.chars().collect();
    let mut i = 0;
    let mut out = Vec::new();
    while i < c.len() {
        let ch = c[i];
        if ch.is_whitespace() {
            i += 1;
        } else if ch.is_ascii_digit() || ch == '.' {
            let start = i;
            while i < c.len() && (c[i].is_ascii_digit() || c[i] == '.') {
                i += 1;
            }
            // exponent part directly after the digits
            if i + 1 < c.len()
                && (c[i] == 'e' || c[i] == 'E')
                && (c[i + 1].is_ascii_digit()
                    || ((c[i + 1] == '-' || c[i + 1] == '+') && i + 2 < c.len() && c[i + 2].is_ascii_digit()))
            {
                i += 2;
                while i < c.len() && c[i].is_ascii_digit() {
                    i += 1;
                }
            }
            let text: String = c[start..i].iter().collect();
            out.push(Tok::Num(parse_decimal(&text)?));
        } else if ch.is_alphabetic() || ch == '_' {
            let start = i;
            while i < c.len() && (c[i].is_alphanumeric() || c[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(c[start..i].iter().collect()));
        } else if "+-*/^()[],".contains(ch) {
            out.push(Tok::Sym(ch));
            i += 1;
        } else {
            return Err(ParseError::Syntax(format!("unexpected character `{ch}`")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    field: Option<&'a NumberField>,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(ParseError::Syntax(format!("expected `{c}`")))
        }
    }

    fn expr(&mut self) -> Result<Real, ParseError> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = acc.add(&self.term()?);
            } else if self.eat('-') {
                acc = acc.sub(&self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Real, ParseError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = acc.mul(&self.unary()?);
            } else if self.eat('/') {
                acc = acc.div(&self.unary()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Real, ParseError> {
        if self.eat('-') {
            return Ok(self.unary()?.neg());
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Real, ParseError> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let paren = self.eat('(');
        let neg = self.eat('-');
        let n = match self.toks.get(self.pos) {
            Some(Tok::Num(q)) if q.is_integer() => q.to_integer(),
            _ => return Err(ParseError::Syntax("exponent must be an integer".into())),
        };
        self.pos += 1;
        if paren {
            self.expect(')')?;
        }
        let n: i64 = n
            .try_into()
            .map_err(|_| ParseError::Syntax("exponent too large".into()))?;
        Ok(base.powi(if neg { -n } else { n }))
    }

    fn atom(&mut self) -> Result<Real, ParseError> {
        match self.toks.get(self.pos).cloned() {
            Some(Tok::Num(q)) => {
                self.pos += 1;
                Ok(Real::rational(q))
            }
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let r = self.expr()?;
                self.expect(')')?;
                Ok(r)
            }
            Some(Tok::Sym('[')) => {
                self.pos += 1;
                let k = self.field.ok_or(ParseError::NoField)?;
                let mut coords = Vec::new();
                if !self.eat(']') {
                    loop {
                        let v = self.expr()?;
                        let q = v.as_rational().ok_or_else(|| {
                            ParseError::Syntax("field coordinates must be rational".into())
                        })?;
                        coords.push(q);
                        if self.eat(']') {
                            break;
                        }
                        self.expect(',')?;
                    }
                }
                Ok(Real::field(k, k.from_coords(coords)))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                match name.as_str() {
                    "pi" => Ok(Real::pi()),
                    "e" => Ok(Real::e()),
                    "lambda" => {
                        let k = self.field.ok_or(ParseError::NoField)?;
                        Ok(Real::field(k, k.generator()))
                    }
                    "sqrt" | "exp" | "ln" | "log" => {
                        self.expect('(')?;
                        let x = self.expr()?;
                        self.expect(')')?;
                        Ok(match name.as_str() {
                            "sqrt" => x.sqrt(),
                            "exp" => x.exp(),
                            _ => x.ln(),
                        })
                    }
                    _ => Err(ParseError::Syntax(format!("unknown name `{name}`"))),
                }
            }
            _ => Err(ParseError::Syntax("unexpected end of expression".into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebraic::RootSelector;

    fn golden() -> NumberField {
        NumberField::from_coeffs(&[-1, -1, 1], RootSelector::LargestReal).unwrap()
    }

    #[test]
    fn decimals_are_exact() {
        let r = Real::parse("0.1 + 2.5e-1", None).unwrap();
        assert_eq!(r.as_rational().unwrap(), BigRational::new(7.into(), 20.into()));
        let r = Real::parse("1/3 * 3", None).unwrap();
        assert_eq!(r.as_rational().unwrap(), BigRational::one());
        let r = Real::parse("2^-3", None).unwrap();
        assert_eq!(r.as_rational().unwrap(), BigRational::new(1.into(), 8.into()));
    }

    #[test]
    fn transcendental_values() {
        let r = Real::parse("pi/2", None).unwrap();
        assert!(!r.is_exact());
        let b = r.eval(300);
        assert!((b.to_f64() - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        assert!(b.rad() < Mag::pow2(-299));
        let e = Real::parse("ln(exp(3))", None).unwrap().eval(100);
        assert!(e.contains_rational(&BigRational::from_integer(3.into())));
    }

    #[test]
    fn field_values_fold() {
        let k = golden();
        let r = Real::parse("[0, 1]^2 - [1, 1]", Some(&k)).unwrap();
        assert_eq!(r.as_rational().unwrap(), BigRational::zero());
        let s5 = Real::parse("sqrt(5)", None).unwrap();
        assert_eq!(s5.as_field_element(&k), Some(k.from_ints(&[-1, 2])));
        let s2 = Real::parse("sqrt(2)", None).unwrap();
        assert_eq!(s2.as_field_element(&k), None);
        let lam = Real::parse("2*lambda + 1", Some(&k)).unwrap();
        assert_eq!(lam.as_field_element(&k), Some(k.from_ints(&[1, 2])));
        assert!(Real::parse("sqrt(9/4)", None).unwrap().as_rational().is_some());
    }

    #[test]
    fn comparisons() {
        let a = Real::parse("sqrt(2)", None).unwrap();
        let b = Real::parse("1.4142", None).unwrap();
        assert_eq!(a.cmp_to(&b, 1024), Some(Ordering::Greater));
        let k = golden();
        let phi = Real::field(&k, k.generator());
        let alt = Real::parse("(1 + sqrt(5))/2", None).unwrap();
        assert_eq!(phi.cmp_to(&alt, 256), None);
    }

    #[test]
    fn parse_errors() {
        assert!(Real::parse("1 +", None).is_err());
        assert!(Real::parse("[1, 2]", None).is_err());
        assert!(Real::parse("foo(2)", None).is_err());
        assert!(Real::parse("2^x", None).is_err());
    }
}
