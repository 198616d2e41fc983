//! Iterated function systems of orientation-preserving similarities
//! `f_i(x) = r^{l_i} x + a_i` on the line.
//!
//! Values are [`Real`]s, so an IFS whose data lies in one number field is
//! handled exactly; anything else runs in numeric mode.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use ssm_ball::{Mag, RealBall};
use thiserror::Error;

use crate::algebraic::{AlgebraicError, FieldElement, NumberField};
use crate::real::{Exact, ParseError, Real};

/// Largest exponent tried when matching powers of field elements.
pub const EXPONENT_SEARCH_BOUND: u64 = 64;
/// Default cap on the number of maps produced by [`Ifs::equal_ratio_rewrite`].
pub const DEFAULT_REWRITE_CAP: usize = 1_000_000;
/// Precision used to certify numeric comparisons.
const CMP_PREC: u32 = 1024;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum IfsError {
    #[error("MultiplicativelyIndependent: ratios {i} and {j} are not powers of a common base{}", if *.bound_limited { " within the search bound" } else { "" })]
    MultiplicativelyIndependent { i: usize, j: usize, bound_limited: bool },
    #[error("InvalidProbabilityVector: {0}")]
    InvalidProbabilityVector(String),
    #[error("InvalidRatio: {0}")]
    InvalidRatio(String),
    #[error("TooFewMaps: need at least two maps, got {0}")]
    TooFewMaps(usize),
    #[error("ExplosionLimit: rewrite needs {maps} maps, cap is {cap}")]
    ExplosionLimit { maps: u128, cap: usize },
    #[error("NotNormalized: the first translation must be zero")]
    NotNormalized,
    #[error("ZeroTranslation: translation {0} must differ from the first")]
    ZeroTranslation(usize),
    #[error("UnequalExponents: maps {0} and {1} have different ratios")]
    UnequalExponents(usize, usize),
    #[error("IndexOutOfRange: index {index} with {k} maps")]
    IndexOutOfRange { index: usize, k: usize },
    #[error(transparent)]
    Algebraic(#[from] AlgebraicError),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// Contraction ratios as given by the caller.
#[derive(Clone, Debug)]
pub enum RatioSpec {
    /// A common base `r` and the exponents `l_i`.
    Base { r: Real, exponents: Vec<u64> },
    /// Raw ratios `r_i`, which must be powers of a common base.
    Ratios(Vec<Real>),
}

/// Unvalidated IFS data. `field`, when present, is used to fold values exactly.
#[derive(Clone, Debug)]
pub struct IfsInput {
    pub field: Option<NumberField>,
    pub ratios: RatioSpec,
    pub translations: Vec<Real>,
    pub probs: Vec<BigRational>,
}

/// A validated IFS with `gcd(l_i) = 1` and `0 < r < 1`.
#[derive(Clone, Debug)]
pub struct Ifs {
    field: Option<NumberField>,
    r: Real,
    exponents: Vec<u64>,
    translations: Vec<Real>,
    probs: Vec<BigRational>,
}

fn field_of_values(values: &[&Real], hint: Option<&NumberField>) -> Option<NumberField> {
    let mut field: Option<NumberField> = hint.cloned();
    for v in values {
        match v.exact() {
            Some(Exact::Rational(_)) => {}
            Some(Exact::Field(k, _)) => match &field {
                None => field = Some(k),
                Some(f) if *f == k => {}
                Some(_) => return None,
            },
            None => {
                let f = field.as_ref()?;
                v.as_field_element(f)?;
            }
        }
    }
    Some(field.unwrap_or_else(NumberField::rationals))
}

fn fold(v: &Real, field: &NumberField) -> Real {
    if v.is_exact() {
        return v.clone();
    }
    match v.as_field_element(field) {
        Some(a) => Real::field(field, a),
        None => v.clone(),
    }
}

/// Integers `c_i` with `Σ c_i l_i = gcd(l)`.
pub(crate) fn bezout(l: &[u64]) -> (u64, Vec<BigInt>) {
    let mut g = BigInt::zero();
    let mut c: Vec<BigInt> = Vec::with_capacity(l.len());
    for &x in l {
        let x = BigInt::from(x);
        let e = g.extended_gcd(&x);
        for ci in c.iter_mut() {
            *ci *= &e.x;
        }
        c.push(e.y);
        g = e.gcd;
    }
    (g.to_u64().unwrap_or(0), c)
}

fn gcd_all(l: &[u64]) -> u64 {
    l.iter().fold(0, |g, &x| g.gcd(&x))
}

/// Refines integers > 1 into a pairwise coprime base.
fn coprime_base(nums: &[BigInt]) -> Vec<BigInt> {
    let mut base: Vec<BigInt> = nums.iter().filter(|n| **n > BigInt::one()).cloned().collect();
    loop {
        let mut split = None;
        'outer: for i in 0..base.len() {
            for j in i + 1..base.len() {
                let g = base[i].gcd(&base[j]);
                if !g.is_one() {
                    split = Some((i, j, g));
                    break 'outer;
                }
            }
        }
        let Some((i, j, g)) = split else {
            break;
        };
        let (a, b) = (&base[i] / &g, &base[j] / &g);
        base.remove(j);
        base.remove(i);
        for v in [g, a, b] {
            if v > BigInt::one() {
                base.push(v);
            }
        }
    }
    base.sort();
    base.dedup();
    base
}

fn valuation(n: &BigInt, p: &BigInt) -> i64 {
    let mut n = n.clone();
    let mut v = 0;
    while (&n % p).is_zero() {
        n /= p;
        v += 1;
    }
    v
}

/// Exponents `l_i` for positive rationals below one, exactly and without a bound.
fn rational_exponents(q: &[BigRational]) -> Result<Vec<u64>, IfsError> {
    let nums: Vec<BigInt> = q.iter().flat_map(|x| [x.numer().clone(), x.denom().clone()]).collect();
    let base = coprime_base(&nums);
    let vecs: Vec<Vec<i64>> = q
        .iter()
        .map(|x| base.iter().map(|p| valuation(x.numer(), p) - valuation(x.denom(), p)).collect())
        .collect();
    // every vector must be a positive multiple of a common primitive vector
    let g0 = vecs[0].iter().fold(0i64, |g, &x| g.gcd(&x));
    let w: Vec<i64> = vecs[0].iter().map(|x| x / g0).collect();
    let mut l = Vec::with_capacity(q.len());
    for (j, v) in vecs.iter().enumerate() {
        let pivot = w.iter().position(|&x| x != 0).expect("nonzero exponent vector");
        let c = v[pivot] / w[pivot];
        if c <= 0 || v.iter().zip(&w).any(|(a, b)| *a != c * b) {
            return Err(IfsError::MultiplicativelyIndependent {
                i: 0,
                j,
                bound_limited: false,
            });
        }
        l.push(c as u64);
    }
    Ok(l)
}

/// Smallest `(a, b)` with `x^b = y^a`, found from a floating estimate of
/// `ln x / ln y` and confirmed by `same`.
fn match_powers(lx: f64, ly: f64, mut same: impl FnMut(u64, u64) -> bool) -> Option<(u64, u64)> {
    let t = lx / ly;
    for b in 1..=EXPONENT_SEARCH_BOUND {
        let a = (t * b as f64).round();
        if a < 1.0 || a > EXPONENT_SEARCH_BOUND as f64 {
            continue;
        }
        if (t * b as f64 - a).abs() > 1e-6 * b as f64 {
            continue;
        }
        if same(a as u64, b) {
            return Some((a as u64, b));
        }
    }
    None
}

/// Exponents from pairwise ratios `l_0 / l_i = a_i / b_i`.
fn exponents_from_ratios(pairs: &[(u64, u64)]) -> Vec<u64> {
    // l_i = l_0 b_i / a_i, so l_0 must be a multiple of every a_i
    let l0 = pairs.iter().fold(1u64, |m, (a, _)| m.lcm(a));
    let l: Vec<u64> = pairs.iter().map(|(a, b)| l0 / a * b).collect();
    let g = gcd_all(&l);
    l.into_iter().map(|x| x / g).collect()
}

/// Certifies multiplicative independence through norms, when possible.
fn norms_independent(k: &NumberField, x: &FieldElement, y: &FieldElement) -> bool {
    let (nx, ny) = (k.norm(x).abs(), k.norm(y).abs());
    if nx.is_one() || ny.is_one() {
        return false;
    }
    let inv = |q: BigRational| if q > BigRational::one() { q.recip() } else { q };
    rational_exponents(&[inv(nx), inv(ny)]).is_err()
}

fn field_exponents(k: &NumberField, rho: &[FieldElement]) -> Result<Vec<u64>, IfsError> {
    let logs: Vec<f64> = rho.iter().map(|x| k.embed_real(x, 64).to_f64().ln()).collect();
    let mut pairs = vec![(1, 1)];
    for j in 1..rho.len() {
        let found = match_powers(logs[0], logs[j], |a, b| {
            matches!((k.pow(&rho[0], b as i64), k.pow(&rho[j], a as i64)), (Ok(u), Ok(v)) if u == v)
        });
        match found {
            Some(p) => pairs.push(p),
            None => {
                return Err(IfsError::MultiplicativelyIndependent {
                    i: 0,
                    j,
                    bound_limited: !norms_independent(k, &rho[0], &rho[j]),
                })
            }
        }
    }
    Ok(exponents_from_ratios(&pairs))
}

fn numeric_exponents(rho: &[Real]) -> Result<Vec<u64>, IfsError> {
    let logs: Vec<f64> = rho.iter().map(|x| x.to_f64().ln()).collect();
    let mut pairs = vec![(1, 1)];
    for j in 1..rho.len() {
        let found = match_powers(logs[0], logs[j], |a, b| {
            rho[0].powi(b as i64).cmp_to(&rho[j].powi(a as i64), CMP_PREC).is_none()
        });
        match found {
            Some(p) => pairs.push(p),
            None => {
                return Err(IfsError::MultiplicativelyIndependent {
                    i: 0,
                    j,
                    bound_limited: true,
                })
            }
        }
    }
    Ok(exponents_from_ratios(&pairs))
}

fn check_ratio(x: &Real, what: &str) -> Result<(), IfsError> {
    let pos = x.cmp_to(&Real::int(0), CMP_PREC) == Some(Ordering::Greater);
    let below = x.cmp_to(&Real::int(1), CMP_PREC) == Some(Ordering::Less);
    if pos && below {
        Ok(())
    } else {
        Err(IfsError::InvalidRatio(format!("{what} = {x} is not certified in (0, 1)")))
    }
}

fn check_probs(p: &[BigRational], k: usize) -> Result<(), IfsError> {
    if p.len() != k {
        return Err(IfsError::InvalidProbabilityVector(format!(
            "{} probabilities for {k} maps",
            p.len()
        )));
    }
    if let Some(q) = p.iter().find(|q| !q.is_positive()) {
        return Err(IfsError::InvalidProbabilityVector(format!("nonpositive entry {q}")));
    }
    let s: BigRational = p.iter().sum();
    if !s.is_one() {
        return Err(IfsError::InvalidProbabilityVector(format!("sum is {s}")));
    }
    Ok(())
}

/// Builds and validates an IFS, detecting the common base of raw ratios.
pub fn build_ifs(input: IfsInput) -> Result<Ifs, IfsError> {
    let k = input.translations.len();
    if k < 2 {
        return Err(IfsError::TooFewMaps(k));
    }
    check_probs(&input.probs, k)?;
    let (r, exponents) = match input.ratios {
        RatioSpec::Base { r, exponents } => {
            if exponents.len() != k {
                return Err(IfsError::InvalidRatio(format!("{} exponents for {k} maps", exponents.len())));
            }
            if exponents.iter().any(|&l| l == 0) {
                return Err(IfsError::InvalidRatio("exponents must be positive".into()));
            }
            check_ratio(&r, "r")?;
            (r, exponents)
        }
        RatioSpec::Ratios(rho) => {
            if rho.len() != k {
                return Err(IfsError::InvalidRatio(format!("{} ratios for {k} maps", rho.len())));
            }
            for (i, x) in rho.iter().enumerate() {
                check_ratio(x, &format!("ratio {}", i + 1))?;
            }
            let refs: Vec<&Real> = rho.iter().collect();
            let l = if let Some(q) = rho.iter().map(Real::as_rational).collect::<Option<Vec<_>>>() {
                rational_exponents(&q)?
            } else if let Some(f) = field_of_values(&refs, input.field.as_ref()) {
                let el: Vec<FieldElement> = rho
                    .iter()
                    .map(|x| x.as_field_element(&f).expect("value folds into its field"))
                    .collect();
                field_exponents(&f, &el)?
            } else {
                numeric_exponents(&rho)?
            };
            let g = gcd_all(&l);
            let l: Vec<u64> = l.iter().map(|x| x / g).collect();
            let (_, c) = bezout(&l);
            let r = rho
                .iter()
                .zip(&c)
                .filter(|(_, c)| !c.is_zero())
                .fold(Real::int(1), |acc, (x, c)| acc.mul(&x.powi(c.to_i64().expect("small Bezout coefficient"))));
            (r, l)
        }
    };
    // rescale so that the exponents are coprime
    let g = gcd_all(&exponents);
    let (r, exponents) = if g > 1 {
        (r.powi(g as i64), exponents.iter().map(|l| l / g).collect())
    } else {
        (r, exponents)
    };
    let mut all: Vec<&Real> = vec![&r];
    all.extend(input.translations.iter());
    let field = field_of_values(&all, input.field.as_ref());
    let (r, translations) = match &field {
        Some(f) => (fold(&r, f), input.translations.iter().map(|a| fold(a, f)).collect()),
        None => (r, input.translations),
    };
    Ok(Ifs {
        field,
        r,
        exponents,
        translations,
        probs: input.probs,
    })
}

impl Ifs {
    fn with_maps(&self, exponents: Vec<u64>, translations: Vec<Real>, probs: Vec<BigRational>) -> Ifs {
        Ifs {
            field: self.field.clone(),
            r: self.r.clone(),
            exponents,
            translations,
            probs,
        }
    }

    /// The number field holding all data, or `None` in numeric mode.
    pub fn field(&self) -> Option<&NumberField> {
        self.field.as_ref()
    }

    pub fn is_exact(&self) -> bool {
        self.field.is_some()
    }

    pub fn r(&self) -> &Real {
        &self.r
    }

    pub fn exponents(&self) -> &[u64] {
        &self.exponents
    }

    pub fn translations(&self) -> &[Real] {
        &self.translations
    }

    pub fn probs(&self) -> &[BigRational] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    /// Contraction ratio `r^{l_i}` of map `i`.
    pub fn ratio(&self, i: usize) -> Real {
        self.r.powi(self.exponents[i] as i64)
    }

    /// `r` as a field element in exact mode.
    pub fn r_element(&self) -> Option<FieldElement> {
        self.r.as_field_element(self.field.as_ref()?)
    }

    /// Translations as field elements in exact mode.
    pub fn translation_elements(&self) -> Option<Vec<FieldElement>> {
        let k = self.field.as_ref()?;
        self.translations.iter().map(|a| a.as_field_element(k)).collect()
    }

    fn check_index(&self, i: usize) -> Result<(), IfsError> {
        if i < self.len() {
            Ok(())
        } else {
            Err(IfsError::IndexOutOfRange { index: i, k: self.len() })
        }
    }

    /// Fixed point `a_i / (1 - r^{l_i})` of map `i`.
    pub fn fixed_point(&self, i: usize) -> Real {
        self.translations[i].div(&Real::int(1).sub(&self.ratio(i)))
    }

    /// Conjugates by a translation so that the first map fixes zero.
    pub fn normalize(&self) -> Ifs {
        self.normalize_with_shift().0
    }

    /// As [`Ifs::normalize`], also returning the shift `t` (the old fixed point of `f_1`).
    pub fn normalize_with_shift(&self) -> (Ifs, Real) {
        let t = self.fixed_point(0);
        let a = (0..self.len())
            .map(|j| {
                if j == 0 {
                    Real::int(0)
                } else {
                    self.translations[j].add(&self.ratio(j).sub(&Real::int(1)).mul(&t))
                }
            })
            .collect();
        (self.with_maps(self.exponents.clone(), a, self.probs.clone()), t)
    }

    /// Conjugates by `x ↦ s x + t`, giving maps `r^{l_i} x + s a_i + (1 - r^{l_i}) t`.
    pub fn conjugate(&self, s: &Real, t: &Real) -> Ifs {
        let a = (0..self.len())
            .map(|i| s.mul(&self.translations[i]).add(&Real::int(1).sub(&self.ratio(i)).mul(t)))
            .collect();
        let mut out = self.with_maps(self.exponents.clone(), a, self.probs.clone());
        if let Some(k) = &self.field {
            let mut all: Vec<&Real> = vec![&out.r];
            all.extend(out.translations.iter());
            out.field = field_of_values(&all, Some(k)).or_else(|| field_of_values(&all, None));
        }
        out
    }

    fn is_zero_translation(&self, i: usize) -> bool {
        self.translations[i].cmp_to(&Real::int(0), CMP_PREC).is_none_or(|o| o == Ordering::Equal)
    }

    /// Rewrites a normalized IFS so the first two maps share a ratio and
    /// `a'_1 - a'_2 = b · a_j`. Returns the new IFS and `b`.
    pub fn equal_ratio_rewrite(&self, j: usize, cap: usize) -> Result<(Ifs, Real), IfsError> {
        self.check_index(j)?;
        if !self.translations[0].as_rational().is_some_and(|q| q.is_zero()) && !self.is_zero_translation(0) {
            return Err(IfsError::NotNormalized);
        }
        if j == 0 || self.is_zero_translation(j) {
            return Err(IfsError::ZeroTranslation(j + 1));
        }
        let (l1, lj) = (self.exponents[0], self.exponents[j]);
        if l1 == lj {
            let mut order: Vec<usize> = vec![0, j];
            order.extend((1..self.len()).filter(|&i| i != j));
            let out = self.with_maps(
                order.iter().map(|&i| self.exponents[i]).collect(),
                order.iter().map(|&i| self.translations[i].clone()).collect(),
                order.iter().map(|&i| self.probs[i].clone()).collect(),
            );
            return Ok((out, Real::int(-1)));
        }
        let diff = l1.abs_diff(lj);
        let p = (2u32..).filter(|&n| is_prime(n)).find(|&n| diff % n as u64 != 0).expect("some prime");
        let k = self.len();
        let maps = (k as u128).checked_pow(p).unwrap_or(u128::MAX);
        if maps > cap as u128 {
            return Err(IfsError::ExplosionLimit { maps, cap });
        }
        let p = p as usize;
        let mut first = vec![0usize; p];
        first[p - 1] = j;
        let mut second = vec![0usize; p];
        second[0] = j;
        let mut words = vec![first.clone(), second.clone()];
        let mut w = vec![0usize; p];
        loop {
            if w != first && w != second {
                words.push(w.clone());
            }
            let mut pos = p;
            loop {
                if pos == 0 {
                    break;
                }
                pos -= 1;
                w[pos] += 1;
                if w[pos] < k {
                    break;
                }
                w[pos] = 0;
            }
            if w.iter().all(|&x| x == 0) {
                break;
            }
        }
        let mut r_pow: BTreeMap<u64, Real> = BTreeMap::new();
        let mut pow = |e: u64| r_pow.entry(e).or_insert_with(|| self.r.powi(e as i64)).clone();
        let mut exps = Vec::with_capacity(words.len());
        let mut trans = Vec::with_capacity(words.len());
        let mut probs = Vec::with_capacity(words.len());
        for w in &words {
            let mut l = 0u64;
            let mut a = Real::int(0);
            let mut q = BigRational::one();
            for &i in w {
                if !self.is_zero_translation(i) {
                    a = a.add(&self.translations[i].mul(&pow(l)));
                }
                l += self.exponents[i];
                q *= &self.probs[i];
            }
            exps.push(l);
            trans.push(a);
            probs.push(q);
        }
        assert_eq!(gcd_all(&exps), 1, "rewritten exponents must be coprime");
        let b = pow((p as u64 - 1) * l1).sub(&Real::int(1));
        Ok((self.with_maps(exps, trans, probs), b))
    }

    /// Mean and variance of the self-similar measure, exact when the data is.
    pub fn moments(&self) -> (Real, Real) {
        let one = Real::int(1);
        let (mut s1, mut s2, mut num) = (Real::int(0), Real::int(0), Real::int(0));
        let p: Vec<Real> = self.probs.iter().map(|q| Real::rational(q.clone())).collect();
        let rho: Vec<Real> = (0..self.len()).map(|i| self.ratio(i)).collect();
        for i in 0..self.len() {
            s1 = s1.add(&p[i].mul(&rho[i]));
            s2 = s2.add(&p[i].mul(&rho[i].mul(&rho[i])));
            num = num.add(&p[i].mul(&self.translations[i]));
        }
        let mean = num.div(&one.sub(&s1));
        let mut rhs = Real::int(0);
        for i in 0..self.len() {
            let a = &self.translations[i];
            let t = Real::int(2).mul(&rho[i]).mul(a).mul(&mean).add(&a.mul(a));
            rhs = rhs.add(&p[i].mul(&t));
        }
        let second = rhs.div(&one.sub(&s2));
        let var = second.sub(&mean.mul(&mean));
        (mean, var)
    }

    /// Convex hull `[A, B]` of the attractor: the extreme fixed points.
    pub fn attractor_hull(&self) -> (Real, Real) {
        let fp: Vec<Real> = (0..self.len()).map(|i| self.fixed_point(i)).collect();
        let pick = |want: Ordering| {
            fp.iter()
                .skip(1)
                .fold(fp[0].clone(), |best, x| match x.cmp_to(&best, CMP_PREC) {
                    Some(o) if o == want => x.clone(),
                    _ => best,
                })
        };
        (pick(Ordering::Less), pick(Ordering::Greater))
    }

    /// `Σ_n a_{ω_n} r^{L_{n-1}}` over the prefix and the total exponent `L`.
    pub fn partial_sum(&self, prefix: &[usize]) -> Result<(Real, u64), IfsError> {
        let mut l = 0u64;
        let mut s = Real::int(0);
        for &i in prefix {
            self.check_index(i)?;
            s = s.add(&self.translations[i].mul(&self.r.powi(l as i64)));
            l += self.exponents[i];
        }
        Ok((s, l))
    }

    /// Attractor points coded by `prefix` (0-based indices): the partial sum plus
    /// `r^L` times the hull midpoint, with radius `r^L · diam(hull)`.
    pub fn point(&self, prefix: &[usize], prec: u32) -> Result<RealBall, IfsError> {
        let (s, l) = self.partial_sum(prefix)?;
        let (lo, hi) = self.attractor_hull();
        let rl = self.r.powi(l as i64);
        let mid = s.add(&rl.mul(&lo.add(&hi)).div(&Real::int(2)));
        let rad = rl.mul(&hi.sub(&lo)).div(&Real::int(2)).eval(prec).abs_upper();
        Ok(mid.eval(prec).add_error(rad))
    }

    /// Hull diameter as an upper magnitude.
    pub fn diameter_upper(&self, prec: u32) -> Mag {
        let (lo, hi) = self.attractor_hull();
        hi.sub(&lo).eval(prec).abs_upper()
    }
}

fn is_prime(n: u32) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebraic::RootSelector;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn half_probs(k: usize) -> Vec<BigRational> {
        vec![q(1, k as i64); k]
    }

    fn from_ratios(r: &[(i64, i64)], a: &[(i64, i64)]) -> Result<Ifs, IfsError> {
        build_ifs(IfsInput {
            field: None,
            ratios: RatioSpec::Ratios(r.iter().map(|&(n, d)| Real::ratio(n, d)).collect()),
            translations: a.iter().map(|&(n, d)| Real::ratio(n, d)).collect(),
            probs: half_probs(r.len()),
        })
    }

    fn base(r: Real, l: &[u64], a: &[Real]) -> Ifs {
        build_ifs(IfsInput {
            field: None,
            ratios: RatioSpec::Base { r, exponents: l.to_vec() },
            translations: a.to_vec(),
            probs: half_probs(l.len()),
        })
        .unwrap()
    }

    fn eq(a: &Real, b: &Real) -> bool {
        a.cmp_to(b, 256) == Some(Ordering::Equal)
    }

    #[test]
    fn common_base_of_rationals() {
        let f = from_ratios(&[(1, 4), (1, 2)], &[(0, 1), (1, 1)]).unwrap();
        assert!(eq(f.r(), &Real::ratio(1, 2)));
        assert_eq!(f.exponents(), &[2, 1]);
        let f = from_ratios(&[(1, 4), (1, 8)], &[(0, 1), (1, 1)]).unwrap();
        assert!(eq(f.r(), &Real::ratio(1, 2)));
        assert_eq!(f.exponents(), &[2, 3]);
        let f = from_ratios(&[(1, 4), (1, 16)], &[(0, 1), (1, 1)]).unwrap();
        assert!(eq(f.r(), &Real::ratio(1, 4)));
        assert_eq!(f.exponents(), &[1, 2]);
        let f = from_ratios(&[(4, 9), (8, 27), (2, 3)], &[(0, 1), (1, 1), (2, 1)]).unwrap();
        assert!(eq(f.r(), &Real::ratio(2, 3)));
        assert_eq!(f.exponents(), &[2, 3, 1]);
    }

    #[test]
    fn independent_rationals() {
        let e = from_ratios(&[(1, 2), (1, 3)], &[(0, 1), (1, 1)]).unwrap_err();
        assert_eq!(
            e,
            IfsError::MultiplicativelyIndependent {
                i: 0,
                j: 1,
                bound_limited: false
            }
        );
        // 6^-1 and 12^-1 share no base even though they share factors
        assert!(from_ratios(&[(1, 6), (1, 12)], &[(0, 1), (1, 1)]).is_err());
    }

    #[test]
    fn common_base_in_golden_field() {
        let k = NumberField::from_coeffs(&[-1, -1, 1], RootSelector::LargestReal).unwrap();
        let r = k.inv(&k.generator()).unwrap();
        let rho = vec![
            Real::field(&k, k.pow(&r, 2).unwrap()),
            Real::field(&k, k.pow(&r, 3).unwrap()),
        ];
        let f = build_ifs(IfsInput {
            field: Some(k.clone()),
            ratios: RatioSpec::Ratios(rho),
            translations: vec![Real::int(0), Real::int(1)],
            probs: half_probs(2),
        })
        .unwrap();
        assert_eq!(f.exponents(), &[2, 3]);
        assert_eq!(f.r_element().unwrap(), r);
        assert_eq!(f.field().unwrap(), &k);
        // φ^-1 against 1/2: the norms -1 and 1/4 cannot certify independence
        let e = build_ifs(IfsInput {
            field: Some(k.clone()),
            ratios: RatioSpec::Ratios(vec![Real::field(&k, r.clone()), Real::ratio(1, 2)]),
            translations: vec![Real::int(0), Real::int(1)],
            probs: half_probs(2),
        })
        .unwrap_err();
        assert_eq!(
            e,
            IfsError::MultiplicativelyIndependent {
                i: 0,
                j: 1,
                bound_limited: true
            }
        );
        // (2 - φ)/2 has norm 1/4 and 1/3 has norm 1/9, so the norms certify independence
        let x = k.scale(&k.from_ints(&[2, -1]), &q(1, 2));
        let e = build_ifs(IfsInput {
            field: Some(k.clone()),
            ratios: RatioSpec::Ratios(vec![Real::field(&k, x), Real::ratio(1, 3)]),
            translations: vec![Real::int(0), Real::int(1)],
            probs: half_probs(2),
        })
        .unwrap_err();
        assert!(matches!(e, IfsError::MultiplicativelyIndependent { bound_limited: false, .. }));
    }

    #[test]
    fn numeric_mode_base() {
        let r = Real::int(1).div(&Real::pi());
        let f = build_ifs(IfsInput {
            field: None,
            ratios: RatioSpec::Ratios(vec![r.powi(2), r.powi(3)]),
            translations: vec![Real::int(0), Real::int(1)],
            probs: half_probs(2),
        })
        .unwrap();
        assert!(!f.is_exact());
        assert_eq!(f.exponents(), &[2, 3]);
        assert!((f.r().to_f64() - 1.0 / std::f64::consts::PI).abs() < 1e-14);
    }

    #[test]
    fn validation_errors() {
        let bad = build_ifs(IfsInput {
            field: None,
            ratios: RatioSpec::Base { r: Real::ratio(1, 2), exponents: vec![1, 1] },
            translations: vec![Real::int(0), Real::int(1)],
            probs: vec![q(1, 2), q(1, 3)],
        });
        assert!(matches!(bad, Err(IfsError::InvalidProbabilityVector(_))));
        let bad = build_ifs(IfsInput {
            field: None,
            ratios: RatioSpec::Base { r: Real::ratio(3, 2), exponents: vec![1, 1] },
            translations: vec![Real::int(0), Real::int(1)],
            probs: half_probs(2),
        });
        assert!(matches!(bad, Err(IfsError::InvalidRatio(_))));
        let bad = build_ifs(IfsInput {
            field: None,
            ratios: RatioSpec::Base { r: Real::ratio(1, 2), exponents: vec![1] },
            translations: vec![Real::int(0)],
            probs: vec![q(1, 1)],
        });
        assert_eq!(bad.unwrap_err(), IfsError::TooFewMaps(1));
        let f = base(Real::ratio(1, 2), &[2, 4], &[Real::int(0), Real::int(1)]);
        assert_eq!(f.exponents(), &[1, 2]);
        assert!(eq(f.r(), &Real::ratio(1, 4)));
    }

    #[test]
    fn normalize_examples() {
        let f = base(Real::ratio(1, 2), &[1, 1], &[Real::int(1), Real::int(0)]);
        let (n, t) = f.normalize_with_shift();
        assert!(eq(&t, &Real::int(2)));
        assert!(eq(&n.translations()[0], &Real::int(0)));
        assert!(eq(&n.translations()[1], &Real::int(-1)));
        let f = base(Real::ratio(1, 3), &[1, 1], &[Real::ratio(2, 3), Real::int(0)]);
        let n = f.normalize();
        assert!(eq(&n.translations()[1], &Real::ratio(-2, 3)));
        let n2 = n.normalize();
        assert!(eq(&n2.translations()[1], &Real::ratio(-2, 3)));
    }

    #[test]
    fn rewrite_examples() {
        let k = NumberField::from_coeffs(&[-1, -1, 1], RootSelector::LargestReal).unwrap();
        let r = Real::field(&k, k.inv(&k.generator()).unwrap());
        let f = base(r.clone(), &[1, 1], &[Real::int(0), Real::int(1)]);
        let (g, b) = f.equal_ratio_rewrite(1, DEFAULT_REWRITE_CAP).unwrap();
        assert!(eq(&b, &Real::int(-1)));
        assert_eq!(g.len(), 2);

        let f = base(r.clone(), &[1, 2], &[Real::int(0), Real::int(1)]);
        let (g, b) = f.equal_ratio_rewrite(1, DEFAULT_REWRITE_CAP).unwrap();
        assert_eq!(g.exponents(), &[3, 3, 2, 4]);
        assert!(eq(&b, &r.sub(&Real::int(1))));
        let d = g.translations()[0].sub(&g.translations()[1]);
        assert!(eq(&d, &b));
        assert!(eq(&g.probs().iter().map(|p| Real::rational(p.clone())).fold(Real::int(0), |s, p| s.add(&p)), &Real::int(1)));

        let f = base(r.clone(), &[1, 3], &[Real::int(0), Real::int(1)]);
        let (g, b) = f.equal_ratio_rewrite(1, DEFAULT_REWRITE_CAP).unwrap();
        assert_eq!(g.len(), 8);
        assert!(eq(&b, &r.powi(2).sub(&Real::int(1))));
        assert_eq!(g.exponents()[0], g.exponents()[1]);

        let e = f.equal_ratio_rewrite(1, 4).unwrap_err();
        assert_eq!(e, IfsError::ExplosionLimit { maps: 8, cap: 4 });
        let un = base(r, &[1, 3], &[Real::int(1), Real::int(0)]);
        assert_eq!(un.equal_ratio_rewrite(1, 100).unwrap_err(), IfsError::NotNormalized);
    }

    #[test]
    fn moment_examples() {
        let f = base(Real::ratio(1, 2), &[1, 1], &[Real::int(0), Real::int(1)]);
        let (m, v) = f.moments();
        assert_eq!(m.as_rational(), Some(q(1, 1)));
        assert_eq!(v.as_rational(), Some(q(1, 3)));
        let f = base(Real::ratio(1, 3), &[1, 1], &[Real::int(0), Real::ratio(2, 3)]);
        assert_eq!(f.moments().0.as_rational(), Some(q(1, 2)));
        let f = base(Real::ratio(1, 3), &[1, 1], &[Real::int(0), Real::int(0)]);
        let (m, v) = f.moments();
        assert_eq!((m.as_rational(), v.as_rational()), (Some(q(0, 1)), Some(q(0, 1))));
    }

    #[test]
    fn hull_and_points() {
        let f = base(Real::ratio(1, 3), &[1, 1], &[Real::int(0), Real::ratio(2, 3)]);
        let (a, b) = f.attractor_hull();
        assert!(eq(&a, &Real::int(0)) && eq(&b, &Real::int(1)));
        let f = base(Real::ratio(1, 2), &[1, 1], &[Real::int(0), Real::int(1)]);
        let (a, b) = f.attractor_hull();
        assert!(eq(&a, &Real::int(0)) && eq(&b, &Real::int(2)));
        let p = f.point(&[1, 0, 0, 0, 0, 0, 0, 0], 64).unwrap();
        // f_2(hull) = [1, 2]
        assert!(p.lower().to_f64() >= 1.0 - 1.0 / 64.0);
        assert!(p.upper().to_f64() <= 2.0);
        assert!(f.point(&[2], 64).is_err());
    }
}
