use std::cmp::Ordering;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use ssm_ball::{CBall, Mag, RealBall};

use super::AlgebraicError;
use crate::linalg::{self, RatMatrix};
use crate::poly::{IntPoly, RatPoly};
use crate::roots::{isolate, RootIsolation};
use crate::{DEFAULT_PREC, MAX_PREC};

/// Which real root of the minimal polynomial is `λ`.
#[derive(Clone, Debug, PartialEq)]
pub enum RootSelector {
    LargestReal,
    /// The unique real root in the closed interval.
    Interval(BigRational, BigRational),
}

/// Element of a number field as rational coordinates in the power basis
/// `1, λ, …, λ^(d-1)`. Arithmetic goes through [`NumberField`].
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldElement {
    coords: Vec<BigRational>,
}

impl FieldElement {
    pub fn coords(&self) -> &[BigRational] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    /// The rational value when the element lies in `Q`.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.coords[1..].iter().all(Zero::is_zero) {
            Some(self.coords[0].clone())
        } else {
            None
        }
    }

    fn to_poly(&self) -> RatPoly {
        RatPoly::new(self.coords.clone())
    }

    /// Least common denominator of the coordinates.
    pub fn denominator(&self) -> BigInt {
        use num_integer::Integer;
        self.coords
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

struct Inner {
    min_poly: IntPoly,
    modulus: RatPoly,
    degree: usize,
    /// isolation index of embedding `k`; embedding 0 is `λ`
    perm: Vec<usize>,
    real_count: usize,
    /// isolations by increasing precision; refinement only ever adds entries
    cache: Mutex<Vec<Arc<RootIsolation>>>,
}

/// `Q(λ)` for a real algebraic `λ > 1`, with a fixed ordering of the complex
/// embeddings: `λ` first, the other real embeddings in decreasing order, then
/// the non-real ones (upper half-plane first, conjugates after).
#[derive(Clone)]
pub struct NumberField(Arc<Inner>);

impl fmt::Debug for NumberField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NumberField({}, λ≈{})", self.0.min_poly, self.lambda_f64())
    }
}

impl PartialEq for NumberField {
    fn eq(&self, other: &Self) -> bool {
        if Arc::ptr_eq(&self.0, &other.0) {
            return true;
        }
        if self.0.degree == 1 && other.0.degree == 1 {
            return true;
        }
        self.0.min_poly == other.0.min_poly && self.0.perm[0] == other.0.perm[0]
    }
}

enum IntStatus {
    Excluded,
    Unique(BigInt),
    Unknown,
}

fn int_status(b: &RealBall) -> IntStatus {
    if !b.rad().is_finite() {
        return IntStatus::Unknown;
    }
    let lo = b.lower().ceil();
    let hi = b.upper().floor();
    if lo > hi {
        IntStatus::Excluded
    } else if lo == hi {
        IntStatus::Unique(lo)
    } else {
        IntStatus::Unknown
    }
}

/// Searches for a proper factor of the squarefree `f` from subsets of its
/// certified roots. `Err(())` asks for more precision.
fn find_factor(f: &IntPoly, iso: &RootIsolation) -> Result<Option<IntPoly>, ()> {
    let d = f.deg();
    let prec = iso.prec + 32;
    // units: single real roots or conjugate pairs, as real-ball factors
    let mut units: Vec<(usize, Vec<RealBall>)> = Vec::new();
    for k in 0..iso.real_count {
        let r = iso.roots[k].re.clone().with_prec(prec);
        units.push((1, vec![r.neg(), RealBall::one(prec)]));
    }
    for k in iso.real_count..iso.real_count + iso.complex_pairs() {
        let z = &iso.roots[k];
        let n2 = z.re.sqr().add(&z.im.sqr());
        units.push((2, vec![n2, z.re.mul_2exp(1).neg(), RealBall::one(prec)]));
    }
    let n = units.len();
    if n > 24 {
        return Err(());
    }
    let mut undecided = false;
    for mask in 1u64..(1u64 << n) {
        let deg: usize = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| units[i].0).sum();
        if deg == 0 || deg > d / 2 {
            continue;
        }
        let mut prod = vec![RealBall::from_bigint(&f.lc(), prec)];
        for (i, (_, u)) in units.iter().enumerate() {
            if mask >> i & 1 == 0 {
                continue;
            }
            let mut next = vec![RealBall::zero(prec); prod.len() + u.len() - 1];
            for (a, pa) in prod.iter().enumerate() {
                for (b, ub) in u.iter().enumerate() {
                    next[a + b] = next[a + b].add(&pa.mul(ub));
                }
            }
            prod = next;
        }
        let mut ints = Vec::with_capacity(prod.len());
        let mut excluded = false;
        let mut unknown = false;
        for c in &prod {
            match int_status(c) {
                IntStatus::Excluded => {
                    excluded = true;
                    break;
                }
                IntStatus::Unique(v) => ints.push(v),
                IntStatus::Unknown => unknown = true,
            }
        }
        if excluded {
            continue;
        }
        if unknown {
            undecided = true;
            continue;
        }
        let g = IntPoly::new(ints).primitive_part();
        if g.deg() >= 1 && g.deg() < d && f.div_exact(&g).is_some() {
            return Ok(Some(g));
        }
    }
    if undecided {
        Err(())
    } else {
        Ok(None)
    }
}

impl NumberField {
    /// Builds `Q(λ)` from an integer polynomial, checking irreducibility and
    /// selecting `λ` among its real roots.
    pub fn new(min_poly: IntPoly, sel: RootSelector) -> Result<Self, AlgebraicError> {
        if min_poly.deg() == 0 {
            return Err(AlgebraicError::DegeneratePolynomial(
                "constant polynomial".into(),
            ));
        }
        let f = min_poly.primitive_part();
        let d = f.deg();
        let fq = RatPoly::from_int(&f);
        let g = fq.gcd(&fq.derivative());
        if g.deg() > 0 {
            return Err(AlgebraicError::ReduciblePolynomial {
                factor: g.to_primitive_int().to_string(),
            });
        }
        let mut prec = 64;
        let iso = loop {
            let iso = isolate(&f, prec, MAX_PREC, None)
                .ok_or(AlgebraicError::PrecisionExhausted { bits: MAX_PREC })?;
            if d == 1 {
                break iso;
            }
            match find_factor(&f, &iso) {
                Ok(Some(factor)) => {
                    return Err(AlgebraicError::ReduciblePolynomial {
                        factor: factor.to_string(),
                    })
                }
                Ok(None) => break iso,
                Err(()) if prec >= MAX_PREC => {
                    return Err(AlgebraicError::PrecisionExhausted { bits: prec })
                }
                Err(()) => prec *= 2,
            }
        };
        let lambda_idx = Self::select(&f, &fq, &iso, &sel)?;
        let mut perm = vec![lambda_idx];
        perm.extend((0..d).filter(|&i| i != lambda_idx));
        Ok(NumberField(Arc::new(Inner {
            min_poly: f,
            modulus: fq.monic(),
            degree: d,
            perm,
            real_count: iso.real_count,
            cache: Mutex::new(vec![Arc::new(iso)]),
        })))
    }

    fn select(
        f: &IntPoly,
        fq: &RatPoly,
        iso0: &RootIsolation,
        sel: &RootSelector,
    ) -> Result<usize, AlgebraicError> {
        let one = BigRational::one();
        let rc = iso0.real_count;
        if rc == 0 {
            return Err(AlgebraicError::NoRealRootAboveOne("no real roots".into()));
        }
        let mut iso = iso0.clone();
        loop {
            let idx = match sel {
                RootSelector::LargestReal => Some(0),
                RootSelector::Interval(a, b) => {
                    let count = if f.deg() == 1 {
                        let r = BigRational::new(-f.coeff(0), f.coeff(1));
                        usize::from(*a <= r && r <= *b)
                    } else {
                        fq.count_roots_between(a, b)
                    };
                    if count == 0 {
                        return Err(AlgebraicError::NoRealRootAboveOne(format!(
                            "no real root in [{a}, {b}]"
                        )));
                    }
                    if count > 1 {
                        return Err(AlgebraicError::AmbiguousRootSelection { count });
                    }
                    let meets: Vec<usize> = (0..rc)
                        .filter(|&k| {
                            let r = &iso.roots[k].re;
                            r.cmp_rational(a) != Some(Ordering::Less)
                                && r.cmp_rational(b) != Some(Ordering::Greater)
                        })
                        .collect();
                    if meets.len() == 1 {
                        Some(meets[0])
                    } else {
                        None
                    }
                }
            };
            if let Some(k) = idx {
                match iso.roots[k].re.cmp_rational(&one) {
                    Some(Ordering::Greater) => return Ok(k),
                    Some(_) => {
                        return Err(AlgebraicError::NoRealRootAboveOne(
                            "selected root is at most one".into(),
                        ))
                    }
                    None => {}
                }
            }
            if iso.prec >= MAX_PREC {
                return Err(AlgebraicError::PrecisionExhausted { bits: iso.prec });
            }
            iso = isolate(f, iso.prec * 2, MAX_PREC, Some(&iso))
                .ok_or(AlgebraicError::PrecisionExhausted { bits: MAX_PREC })?;
        }
    }

    /// `Q` presented with the generator 2.
    pub fn rationals() -> Self {
        Self::new(IntPoly::from_i64(&[-2, 1]), RootSelector::LargestReal)
            .expect("x - 2 defines Q")
    }

    /// Convenience constructor from small coefficients, constant term first.
    pub fn from_coeffs(c: &[i64], sel: RootSelector) -> Result<Self, AlgebraicError> {
        Self::new(IntPoly::from_i64(c), sel)
    }

    pub fn degree(&self) -> usize {
        self.0.degree
    }

    pub fn min_poly(&self) -> &IntPoly {
        &self.0.min_poly
    }

    pub fn real_embeddings(&self) -> usize {
        self.0.real_count
    }

    pub fn is_rational(&self) -> bool {
        self.0.degree == 1
    }

    /// Isolation with radii at most `2^-prec` relative, reusing earlier work.
    fn isolation(&self, prec: u32) -> Arc<RootIsolation> {
        let mut cache = self.0.cache.lock().expect("root cache poisoned");
        if let Some(iso) = cache.iter().find(|i| i.prec >= prec) {
            return iso.clone();
        }
        let hint = cache.last().cloned();
        let iso = isolate(&self.0.min_poly, prec, prec.max(MAX_PREC) * 2, hint.as_deref())
            .expect("refining certified roots");
        let iso = Arc::new(iso);
        cache.push(iso.clone());
        cache.sort_by_key(|i| i.prec);
        iso
    }

    /// Enclosure of the `k`-th conjugate of `λ`.
    pub fn root(&self, k: usize, prec: u32) -> CBall {
        let iso = self.isolation(prec);
        iso.roots[self.0.perm[k]].clone()
    }

    /// Index of the complex-conjugate embedding of `k`.
    pub fn conjugate_embedding(&self, k: usize) -> usize {
        let iso = self.isolation(DEFAULT_PREC);
        let j = iso.conjugate_index(self.0.perm[k]);
        self.0.perm.iter().position(|&p| p == j).unwrap()
    }

    pub fn lambda_ball(&self, prec: u32) -> RealBall {
        self.root(0, prec).re
    }

    pub fn lambda_f64(&self) -> f64 {
        self.lambda_ball(64).to_f64()
    }

    // element construction

    pub fn zero(&self) -> FieldElement {
        self.from_rational(BigRational::zero())
    }

    pub fn one(&self) -> FieldElement {
        self.from_rational(BigRational::one())
    }

    pub fn from_rational(&self, q: BigRational) -> FieldElement {
        let mut coords = vec![BigRational::zero(); self.0.degree];
        coords[0] = q;
        FieldElement { coords }
    }

    pub fn from_int(&self, v: i64) -> FieldElement {
        self.from_rational(BigRational::from_integer(v.into()))
    }

    /// Element `Σ c_i λ^i`; longer vectors are reduced modulo the minimal polynomial.
    pub fn from_coords(&self, c: Vec<BigRational>) -> FieldElement {
        self.reduce(RatPoly::new(c))
    }

    /// The generator `λ`.
    pub fn generator(&self) -> FieldElement {
        self.reduce(RatPoly::x())
    }

    fn reduce(&self, p: RatPoly) -> FieldElement {
        let r = if p.deg() >= self.0.degree && !p.is_zero() {
            p.rem(&self.0.modulus)
        } else {
            p
        };
        let mut coords = r.coeffs().to_vec();
        coords.resize(self.0.degree, BigRational::zero());
        FieldElement { coords }
    }

    // arithmetic

    pub fn add(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        FieldElement {
            coords: a.coords.iter().zip(&b.coords).map(|(x, y)| x + y).collect(),
        }
    }

    pub fn sub(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        FieldElement {
            coords: a.coords.iter().zip(&b.coords).map(|(x, y)| x - y).collect(),
        }
    }

    pub fn neg(&self, a: &FieldElement) -> FieldElement {
        FieldElement {
            coords: a.coords.iter().map(|x| -x).collect(),
        }
    }

    pub fn scale(&self, a: &FieldElement, q: &BigRational) -> FieldElement {
        FieldElement {
            coords: a.coords.iter().map(|x| x * q).collect(),
        }
    }

    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        self.reduce(a.to_poly().mul(&b.to_poly()))
    }

    pub fn inv(&self, a: &FieldElement) -> Result<FieldElement, AlgebraicError> {
        if a.is_zero() {
            return Err(AlgebraicError::DivisionByZero);
        }
        let (g, s, _) = a.to_poly().xgcd(&self.0.modulus);
        debug_assert!(g.deg() == 0);
        Ok(self.reduce(s))
    }

    pub fn div(&self, a: &FieldElement, b: &FieldElement) -> Result<FieldElement, AlgebraicError> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    pub fn pow(&self, a: &FieldElement, n: i64) -> Result<FieldElement, AlgebraicError> {
        let base = if n < 0 { self.inv(a)? } else { a.clone() };
        let mut k = n.unsigned_abs();
        let mut result = self.one();
        let mut b = base;
        while k > 0 {
            if k & 1 == 1 {
                result = self.mul(&result, &b);
            }
            k >>= 1;
            if k > 0 {
                b = self.mul(&b, &b);
            }
        }
        Ok(result)
    }

    /// `λ^n` for any integer `n`.
    pub fn lambda_pow(&self, n: i64) -> FieldElement {
        self.pow(&self.generator(), n).expect("λ is nonzero")
    }

    /// Evaluates an integer polynomial at a field element.
    pub fn eval_poly(&self, p: &IntPoly, a: &FieldElement) -> FieldElement {
        let mut acc = self.zero();
        for c in p.coeffs().iter().rev() {
            acc = self.mul(&acc, a);
            acc.coords[0] += BigRational::from_integer(c.clone());
        }
        acc
    }

    // embeddings

    /// `σ_k(a)` with radius at most `2^-prec · max(1, |σ_k(a)|)`.
    pub fn embed(&self, a: &FieldElement, k: usize, prec: u32) -> CBall {
        let mut p = prec + 16;
        loop {
            let z = self.root(k, p);
            let wp = p + 32;
            let zw = CBall::new(z.re.clone().with_prec(wp), z.im.clone().with_prec(wp));
            let mut acc = CBall::zero(wp);
            for c in a.coords.iter().rev() {
                acc = acc
                    .mul(&zw)
                    .add(&CBall::from_real(RealBall::from_rational(c, wp)));
            }
            let scale = acc.abs_upper().max(Mag::pow2(0));
            if acc.rad() <= scale.mul_2exp(-(prec as i64)) || p >= 4 * MAX_PREC {
                return acc;
            }
            p *= 2;
        }
    }

    /// Real value of `a` under `λ ↦ λ`.
    pub fn embed_real(&self, a: &FieldElement, prec: u32) -> RealBall {
        self.embed(a, 0, prec).re
    }

    /// All conjugates of `a` in embedding order.
    pub fn conjugates(&self, a: &FieldElement, prec: u32) -> Vec<CBall> {
        (0..self.0.degree).map(|k| self.embed(a, k, prec)).collect()
    }

    /// Exact sign of the real value of `a`.
    pub fn sign(&self, a: &FieldElement) -> Ordering {
        if a.is_zero() {
            return Ordering::Equal;
        }
        if let Some(q) = a.as_rational() {
            return q.cmp(&BigRational::zero());
        }
        let mut prec = 64;
        loop {
            let v = self.embed_real(a, prec);
            if v.is_positive() {
                return Ordering::Greater;
            }
            if v.is_negative() {
                return Ordering::Less;
            }
            prec *= 2;
        }
    }

    /// Exact comparison of real values.
    pub fn cmp(&self, a: &FieldElement, b: &FieldElement) -> Ordering {
        self.sign(&self.sub(a, b))
    }

    /// Exact floor of the real value.
    pub fn floor(&self, a: &FieldElement) -> BigInt {
        if let Some(q) = a.as_rational() {
            return q.floor().to_integer();
        }
        let mut prec = 64;
        loop {
            let v = self.embed_real(a, prec);
            let lo = v.lower().floor();
            if lo == v.upper().floor() {
                return lo;
            }
            prec *= 2;
        }
    }

    /// Matrix of multiplication by `a` on the power basis (columns are images).
    pub fn mul_matrix(&self, a: &FieldElement) -> RatMatrix {
        let d = self.0.degree;
        let mut m = vec![vec![BigRational::zero(); d]; d];
        let mut col = a.clone();
        let lam = self.generator();
        for j in 0..d {
            for i in 0..d {
                m[i][j] = col.coords[i].clone();
            }
            col = self.mul(&col, &lam);
        }
        m
    }

    pub fn trace(&self, a: &FieldElement) -> BigRational {
        let m = self.mul_matrix(a);
        (0..self.0.degree).map(|i| m[i][i].clone()).sum()
    }

    pub fn norm(&self, a: &FieldElement) -> BigRational {
        linalg::determinant(self.mul_matrix(a))
    }

    /// Characteristic polynomial of `a` over `Q`.
    pub fn charpoly(&self, a: &FieldElement) -> RatPoly {
        linalg::charpoly(&self.mul_matrix(a))
    }

    /// Expresses `a` in the power basis of `b` when `a ∈ Q(b)`: returns
    /// coordinates `x` with `a = Σ x_i b^i`, `i < e`, where `e = [Q(b):Q]`.
    pub fn coords_over(&self, a: &FieldElement, b: &FieldElement, e: usize) -> Option<Vec<BigRational>> {
        let d = self.0.degree;
        let mut cols: Vec<FieldElement> = Vec::with_capacity(e);
        let mut p = self.one();
        for _ in 0..e {
            cols.push(p.clone());
            p = self.mul(&p, b);
        }
        let m: RatMatrix = (0..d)
            .map(|i| cols.iter().map(|c| c.coords[i].clone()).collect())
            .collect();
        let x = linalg::solve(&m, &a.coords)?;
        Some(x)
    }

    /// Largest absolute value of a nonzero conjugate among the embeddings `1..d`, as an upper bound.
    pub fn max_other_conjugate(&self, a: &FieldElement, prec: u32) -> Mag {
        (1..self.0.degree)
            .map(|k| self.embed(a, k, prec).abs_upper())
            .fold(Mag::ZERO, Mag::max)
    }

    pub fn is_integral_element(&self, a: &FieldElement) -> bool {
        let cp = self.charpoly(a);
        cp.coeffs().iter().all(|c| c.is_integer())
    }

    /// Element from integer coordinates.
    pub fn from_ints(&self, c: &[i64]) -> FieldElement {
        self.from_coords(c.iter().map(|&v| BigRational::from_integer(v.into())).collect())
    }

    pub fn is_negative(&self, a: &FieldElement) -> bool {
        self.sign(a) == Ordering::Less
    }

    pub fn abs(&self, a: &FieldElement) -> FieldElement {
        if self.sign(a) == Ordering::Less {
            self.neg(a)
        } else {
            a.clone()
        }
    }
}
