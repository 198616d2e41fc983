//! Digit changes along the ladder `x λ^{-t}`, recovery of field elements from
//! long runs of near-integers `α λ^j`, and a search for Liouville witnesses.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use ssm_ball::{Mag, RealBall};
use thiserror::Error;

use crate::algebraic::{height, AlgebraicError, FieldElement, NumberField};
use crate::real::{Exact, Real};
use crate::MAX_PREC;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum DiophantineError {
    #[error("UndecidableAtThreshold: ‖x λ^-{t}‖ cannot be separated from ε")]
    UndecidableAtThreshold { t: u64 },
    #[error("DigitChangePresent: ‖α λ^{j}‖ exceeds ε")]
    DigitChangePresent { j: u64 },
    #[error("RecurrenceViolated: window starting at {j} does not satisfy the minimal polynomial")]
    RecurrenceViolated { j: u64 },
    #[error("AlphaInField: α is an element of the field")]
    AlphaInField,
    #[error("GammaInField: γ is an element of the field")]
    GammaInField,
    #[error("InvalidArgument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Algebraic(#[from] AlgebraicError),
}

fn lambda_real(field: &NumberField) -> Real {
    Real::field(field, field.generator())
}

fn check_lambda(field: &NumberField) -> Result<(), DiophantineError> {
    if field.lambda_f64() <= 1.0 {
        return Err(DiophantineError::InvalidArgument("λ must exceed 1".into()));
    }
    Ok(())
}

fn check_epsilon(eps: &BigRational) -> Result<(), DiophantineError> {
    if !eps.is_positive() || *eps >= BigRational::new(1.into(), 2.into()) {
        return Err(DiophantineError::InvalidArgument(format!("ε = {eps} is not in (0, 1/2)")));
    }
    Ok(())
}

/// One rung of the ladder.
#[derive(Clone, Debug, Serialize)]
pub struct DcRow {
    pub t: u64,
    pub value: String,
    pub nearest_int: String,
    pub distance: f64,
    pub counted: bool,
}

/// Digit-change count with its ladder.
#[derive(Clone, Debug, Serialize)]
pub struct DcResult {
    pub count: u64,
    pub rows: Vec<DcRow>,
}

struct Rung {
    ge_one: Option<bool>,
    counted: bool,
    value: String,
    nearest: BigInt,
    distance: f64,
}

fn half() -> BigRational {
    BigRational::new(1.into(), 2.into())
}

fn rung_exact(y: &Exact, eps: &BigRational, t: u64) -> Result<Rung, DiophantineError> {
    let (k, a) = match y {
        Exact::Rational(q) => (NumberField::rationals(), NumberField::rationals().from_rational(q.clone())),
        Exact::Field(k, a) => (k.clone(), a.clone()),
    };
    let n = k.floor(&k.add(&a, &k.from_rational(half())));
    let d = k.abs(&k.sub(&a, &k.from_rational(BigRational::from_integer(n.clone()))));
    let e = k.from_rational(eps.clone());
    let ord = k.cmp(&d, &e);
    if ord == Ordering::Equal {
        return Err(DiophantineError::UndecidableAtThreshold { t });
    }
    let ge_one = k.cmp(&a, &k.one()) != Ordering::Less;
    Ok(Rung {
        ge_one: Some(ge_one),
        counted: ge_one && ord == Ordering::Greater,
        value: k.embed_real(&a, 96).mid_string(24),
        nearest: n,
        distance: k.embed_real(&d, 64).to_f64(),
    })
}

fn rung_ball(y: &Real, eps: &BigRational, t: u64) -> Result<Rung, DiophantineError> {
    let mag = y.eval(32).abs_upper().log2_ceil().max(0) as u32;
    let mut prec = 64 + mag;
    loop {
        let b = y.eval(prec);
        let ge_one = match b.cmp_rational(&BigRational::one()) {
            Some(Ordering::Less) => Some(false),
            Some(_) => Some(true),
            None => None,
        };
        if ge_one == Some(false) {
            return Ok(Rung { ge_one, counted: false, value: b.mid_string(24), nearest: BigInt::zero(), distance: 0.0 });
        }
        let d = b.dist_to_int();
        match d.cmp_rational(eps) {
            Some(Ordering::Greater) if ge_one == Some(true) => {
                let nearest = b.nearest_int().map(|(n, _)| n).unwrap_or_else(|| b.mid().round_int());
                return Ok(Rung { ge_one, counted: true, value: b.mid_string(24), nearest, distance: d.to_f64() });
            }
            Some(Ordering::Less) => {
                let nearest = b.nearest_int().map(|(n, _)| n).unwrap_or_else(|| b.mid().round_int());
                return Ok(Rung { ge_one, counted: false, value: b.mid_string(24), nearest, distance: d.to_f64() });
            }
            _ => {}
        }
        if prec >= MAX_PREC {
            return Err(DiophantineError::UndecidableAtThreshold { t });
        }
        prec = (prec * 2).min(MAX_PREC);
    }
}

/// `DC(x, λ, ε) = #{t ≥ 0 : x λ^{-t} ≥ 1, ‖x λ^{-t}‖ > ε}`, decided exactly
/// for values in the field and by refinement up to the precision cap otherwise.
pub fn dc_count(x: &Real, field: &NumberField, eps: &BigRational) -> Result<DcResult, DiophantineError> {
    check_lambda(field)?;
    check_epsilon(eps)?;
    if x.cmp_to(&Real::int(0), MAX_PREC) != Some(Ordering::Greater) {
        return Err(DiophantineError::InvalidArgument("x must be positive".into()));
    }
    let inv = Real::int(1).div(&lambda_real(field));
    let mut y = x.clone();
    let mut rows = Vec::new();
    let mut count = 0;
    for t in 0u64.. {
        let rung = match y.exact() {
            Some(e) => rung_exact(&e, eps, t)?,
            None => rung_ball(&y, eps, t)?,
        };
        if rung.ge_one == Some(false) {
            break;
        }
        count += rung.counted as u64;
        rows.push(DcRow {
            t,
            value: rung.value,
            nearest_int: rung.nearest.to_string(),
            distance: rung.distance,
            counted: rung.counted,
        });
        if rung.ge_one.is_none() {
            // y straddles 1, so the next rung is below 1
            break;
        }
        y = y.mul(&inv);
    }
    Ok(DcResult { count, rows })
}

/// Coefficients of `L_1(x) = q(x) / q(λ)` with `q(x) = f(x) / (x - λ)`: the
/// first column of the inverse of the matrix with rows `(1, λ_k, …, λ_k^{d-1})`.
pub fn lagrange_first_column(field: &NumberField) -> Vec<FieldElement> {
    let f = field.min_poly();
    let d = f.deg();
    let lam = field.generator();
    let c = |i: usize| field.from_rational(BigRational::from_integer(f.coeff(i)));
    let mut q = vec![field.zero(); d];
    q[d - 1] = c(d);
    for i in (1..d).rev() {
        q[i - 1] = field.add(&c(i), &field.mul(&lam, &q[i]));
    }
    let q_lam = q.iter().rev().fold(field.zero(), |acc, qi| field.add(&field.mul(&acc, &lam), qi));
    let inv = field.inv(&q_lam).expect("f'(λ) ≠ 0 for a squarefree minimal polynomial");
    q.iter().map(|qi| field.mul(qi, &inv)).collect()
}

/// `max_k |Σ_i col_i σ_k(λ)^{i-1} - δ_{k,1}|` with `col_i` taken at the real embedding.
pub fn lagrange_residual(field: &NumberField, col: &[FieldElement], prec: u32) -> Mag {
    (0..field.degree())
        .map(|k| {
            let z = field.root(k, prec);
            let mut acc = ssm_ball::CBall::zero(prec);
            let mut p = ssm_ball::CBall::one(prec);
            for c in col {
                acc = acc.add(&p.scale(&field.embed_real(c, prec)));
                p = p.mul(&z);
            }
            if k == 0 {
                acc = acc.sub(&ssm_ball::CBall::one(prec));
            }
            acc.abs_upper()
        })
        .fold(Mag::ZERO, Mag::max)
}

/// A recovered approximant.
#[derive(Clone, Debug)]
pub struct RecoveryResult {
    pub beta: FieldElement,
    /// `h(β)`.
    pub height: RealBall,
    /// Certified upper bound on `|α - β|`.
    pub error_bound: RealBall,
    /// `(j, K_j, ε_j)` with `α λ^j = K_j + ε_j`.
    pub residuals: Vec<(u64, BigInt, RealBall)>,
    pub n: u64,
    pub k: u64,
}

/// Recovers `β ∈ Q(λ)` from `‖α λ^j‖ ≤ ε` for `n ≤ j ≤ K n`.
///
/// The integers `K_j` satisfy the recurrence of the minimal polynomial, so
/// `K_j = Σ_k b_k σ_k(λ)^j` and `β = b_1`. On any window starting at `m`,
/// `α - β = λ^{-m} Σ_i col_i ε_{m+i-1}`; the last window gives the error bound.
pub fn recover_beta(
    alpha: &Real,
    field: &NumberField,
    n: u64,
    k: u64,
    eps: &BigRational,
) -> Result<RecoveryResult, DiophantineError> {
    check_lambda(field)?;
    check_epsilon(eps)?;
    let f = field.min_poly();
    let d = f.deg() as u64;
    let l1: BigInt = f.coeffs().iter().map(|c| c.abs()).sum();
    if *eps >= BigRational::new(BigInt::one(), l1.clone()) {
        return Err(DiophantineError::InvalidArgument(format!("ε must be below 1/{l1}")));
    }
    if n == 0 || k < 2 || (k - 1) * n < d {
        return Err(DiophantineError::InvalidArgument(format!("need n ≥ 1, K ≥ 2 and (K-1)n ≥ {d}")));
    }
    let top = k * n;
    let lam_bits = field.lambda_f64().log2();
    let alpha_bits = alpha.eval(32).abs_upper().log2_ceil().max(0) as f64;
    let mut prec = 64 + (lam_bits * top as f64 + alpha_bits).ceil() as u32;
    let (kj, ej) = loop {
        let a = alpha.eval(prec + 16);
        let lam = field.lambda_ball(prec + 16);
        let mut v = a.mul(&lam.powi(n as i64));
        let mut kj = Vec::new();
        let mut ej = Vec::new();
        let mut retry = false;
        for j in n..=top {
            let dist = v.dist_to_int();
            match dist.cmp_rational(eps) {
                Some(Ordering::Greater) => return Err(DiophantineError::DigitChangePresent { j }),
                Some(_) => match v.nearest_int() {
                    Some((m, off)) => {
                        kj.push(m);
                        ej.push(off);
                    }
                    None => retry = true,
                },
                None => retry = true,
            }
            if retry {
                break;
            }
            v = v.mul(&lam);
        }
        if !retry {
            break (kj, ej);
        }
        if prec >= MAX_PREC {
            return Err(DiophantineError::DigitChangePresent { j: n });
        }
        prec = (prec * 2).min(MAX_PREC);
    };
    let d = d as usize;
    for m in 0..kj.len() - d {
        let s: BigInt = (0..=d).map(|i| f.coeff(i) * &kj[m + i]).sum();
        if !s.is_zero() {
            return Err(DiophantineError::RecurrenceViolated { j: n + m as u64 });
        }
    }
    let col = lagrange_first_column(field);
    let lead: FieldElement = (0..d).fold(field.zero(), |acc, i| {
        field.add(&acc, &field.scale(&col[i], &BigRational::from_integer(kj[i].clone())))
    });
    let beta = field.mul(&lead, &field.lambda_pow(-(n as i64)));
    let last = kj.len() - d;
    let wp = prec + 16;
    let mut s = RealBall::zero(wp);
    for i in 0..d {
        s = s.add(&field.embed_real(&col[i], wp).mul(&ej[last + i]));
    }
    let m = n + last as u64;
    let err = s.abs_ball().div(&field.lambda_ball(wp).powi(m as i64));
    let bound = RealBall::from_bigfloat(&ssm_ball::BigFloat::from_mag(&err.abs_upper()), wp);
    let h = height(field, &beta, 64);
    Ok(RecoveryResult {
        beta,
        height: h,
        error_bound: bound,
        residuals: (0..kj.len()).map(|i| (n + i as u64, kj[i].clone(), ej[i].clone())).collect(),
        n,
        k,
    })
}

/// `α = λ^s α*` with `α* ∈ [1, λ)`.
pub fn normalize_alpha(alpha: &Real, field: &NumberField) -> Result<(i64, Real), DiophantineError> {
    if alpha.cmp_to(&Real::int(0), MAX_PREC) != Some(Ordering::Greater) {
        return Err(DiophantineError::InvalidArgument("α must be positive".into()));
    }
    let lam = lambda_real(field);
    let mut s = (alpha.to_f64().ln() / field.lambda_f64().ln()).floor() as i64;
    for _ in 0..4 {
        let a = alpha.mul(&lam.powi(-s));
        if a.cmp_to(&Real::int(1), MAX_PREC) == Some(Ordering::Less) {
            s -= 1;
        } else if a.cmp_to(&lam, MAX_PREC) != Some(Ordering::Less) {
            s += 1;
        } else {
            return Ok((s, a));
        }
    }
    Err(DiophantineError::InvalidArgument("cannot place α on the ladder".into()))
}

/// One recovered candidate of the Liouville search.
#[derive(Clone, Debug, Serialize)]
pub struct LiouvilleWitness {
    pub beta: String,
    pub height: f64,
    pub distance_upper: f64,
    pub log_distance_upper: f64,
    pub threshold_log: f64,
    pub satisfies: bool,
    pub n: u64,
    pub k: u64,
    #[serde(skip)]
    pub element: Option<FieldElement>,
}

/// Search outcome. An empty list is evidence, not proof, that α is not Liouville.
#[derive(Clone, Debug, Serialize)]
pub struct LiouvilleReport {
    pub witnesses: Vec<LiouvilleWitness>,
    pub schedule: Vec<(u64, u64)>,
    pub conclusive: bool,
}

/// Runs [`recover_beta`] over `n = 8, 16, … ≤ budget`, `K ∈ {2, 3, 4}` with
/// `ε = 1 / (Σ|c_i| + 1)`, and tests `|α - β| ≤ e^{-H h(β)}` for every `β` found.
///
/// A decimal (rational) `α` is read as an approximation of the intended real
/// number; a symbolic element of the field is rejected.
pub fn liouville_search(alpha: &Real, field: &NumberField, h_exp: f64, budget: u64) -> Result<LiouvilleReport, DiophantineError> {
    check_lambda(field)?;
    if !(h_exp >= 1.0) {
        return Err(DiophantineError::InvalidArgument("H must be at least 1".into()));
    }
    if matches!(alpha.exact(), Some(Exact::Field(..))) {
        return Err(DiophantineError::AlphaInField);
    }
    let (s, a_star) = normalize_alpha(alpha, field)?;
    let l1: BigInt = field.min_poly().coeffs().iter().map(|c| c.abs()).sum();
    let eps = BigRational::new(BigInt::one(), l1 + 1);
    let lam_s = field.lambda_ball(128).powi(s);
    let mut witnesses: Vec<LiouvilleWitness> = Vec::new();
    let mut schedule = Vec::new();
    let mut n = 8;
    while n <= budget.max(8) {
        for k in [2u64, 3, 4] {
            schedule.push((n, k));
            let Ok(rec) = recover_beta(&a_star, field, n, k, &eps) else {
                continue;
            };
            let beta = field.mul(&rec.beta, &field.lambda_pow(s));
            if beta.is_zero() || witnesses.iter().any(|w| w.element.as_ref() == Some(&beta)) {
                continue;
            }
            let h = height(field, &beta, 64);
            let dist = rec.error_bound.mul(&lam_s);
            let up = dist.abs_upper();
            let log_up = if up.is_zero() { f64::NEG_INFINITY } else { up.log2_ceil() as f64 * std::f64::consts::LN_2 };
            let threshold_log = -h_exp * h.upper().to_f64();
            witnesses.push(LiouvilleWitness {
                beta: beta.to_string(),
                height: h.to_f64(),
                distance_upper: up.to_f64(),
                log_distance_upper: log_up,
                threshold_log,
                satisfies: log_up <= threshold_log,
                n,
                k,
                element: Some(beta),
            });
        }
        n *= 2;
    }
    Ok(LiouvilleReport { witnesses, schedule, conclusive: false })
}

/// `DC(x)`, `DC(γx)` and `(DC(x) + DC(γx)) / log log x`.
#[derive(Clone, Debug, Serialize)]
pub struct DcPair {
    pub dc_x: u64,
    pub dc_gamma_x: u64,
    pub ratio: f64,
}

pub fn dc_pair_bound(x: &Real, gamma: &Real, field: &NumberField, eps: &BigRational) -> Result<DcPair, DiophantineError> {
    let ee = Real::e().exp();
    if x.cmp_to(&ee, MAX_PREC) != Some(Ordering::Greater) {
        return Err(DiophantineError::InvalidArgument("x must exceed e^e".into()));
    }
    if gamma.as_field_element(field).is_some() {
        return Err(DiophantineError::GammaInField);
    }
    let a = dc_count(x, field, eps)?.count;
    let b = dc_count(&x.mul(gamma), field, eps)?.count;
    let ll = x.ln().ln().to_f64();
    Ok(DcPair {
        dc_x: a,
        dc_gamma_x: b,
        ratio: (a + b) as f64 / ll,
    })
}

/// Exact rational `p/q` helper for callers.
pub fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebraic::RootSelector;

    fn two() -> NumberField {
        NumberField::from_coeffs(&[-2, 1], RootSelector::LargestReal).unwrap()
    }

    fn golden() -> NumberField {
        NumberField::from_coeffs(&[-1, -1, 1], RootSelector::LargestReal).unwrap()
    }

    #[test]
    fn dc_examples() {
        let k = two();
        assert_eq!(dc_count(&Real::int(3), &k, &rational(1, 10)).unwrap().count, 1);
        assert_eq!(dc_count(&Real::int(1024), &k, &rational(1, 4)).unwrap().count, 0);
        let r = dc_count(&Real::pi(), &k, &rational(1, 5)).unwrap();
        assert_eq!(r.count, 1);
        assert_eq!(r.rows.len(), 2);
        assert!(!r.rows[0].counted && r.rows[1].counted);
        // ‖1.1‖ = 0.1 exactly
        let e = dc_count(&Real::ratio(11, 10), &k, &rational(1, 10)).unwrap_err();
        assert_eq!(e, DiophantineError::UndecidableAtThreshold { t: 0 });
    }

    #[test]
    fn lagrange_examples() {
        let k = NumberField::from_coeffs(&[-2, 0, 1], RootSelector::LargestReal).unwrap();
        let col = lagrange_first_column(&k);
        assert_eq!(col[0], k.from_rational(rational(1, 2)));
        assert_eq!(col[1], k.from_coords(vec![rational(0, 1), rational(1, 4)]));
        let g = golden();
        let col = lagrange_first_column(&g);
        assert!(lagrange_residual(&g, &col, 128) < Mag::pow2(-100));
        let col = lagrange_first_column(&two());
        assert_eq!(col, vec![two().one()]);
    }

    fn decimal_of(k: &NumberField, a: &FieldElement, digits: u32) -> Real {
        let b = k.embed_real(a, digits * 4);
        let scale = num_traits::pow(BigInt::from(10), digits as usize);
        let n = (b.mid().to_rational() * BigRational::from_integer(scale.clone())).round().to_integer();
        Real::rational(BigRational::new(n, scale))
    }

    #[test]
    fn recover_examples() {
        let k = golden();
        let b = k.from_ints(&[2, 1]);
        let alpha = decimal_of(&k, &b, 200);
        let r = recover_beta(&alpha, &k, 11, 3, &rational(1, 100)).unwrap();
        assert_eq!(r.beta, b);
        let true_err = alpha.sub(&Real::field(&k, b)).eval(256).abs();
        assert!(true_err.upper() <= r.error_bound.upper());
        let r = recover_beta(&Real::int(1), &k, 11, 3, &rational(1, 100)).unwrap();
        assert_eq!(r.beta, k.one());
        assert!(r.error_bound.to_f64() < 1e-13);
        let e = recover_beta(&Real::pi().div(&Real::int(2)), &k, 11, 3, &rational(1, 100)).unwrap_err();
        assert!(matches!(e, DiophantineError::DigitChangePresent { .. }));
    }

    #[test]
    fn liouville_examples() {
        let k = golden();
        let b = k.from_ints(&[2, 1]);
        assert_eq!(
            liouville_search(&Real::field(&k, b.clone()), &k, 10.0, 32).unwrap_err(),
            DiophantineError::AlphaInField
        );
        // 2 + φ + 10^-500 as a 700-digit decimal
        let approx = decimal_of(&k, &b, 700).add(&Real::rational(BigRational::new(1.into(), num_traits::pow(BigInt::from(10), 500))));
        let rep = liouville_search(&approx, &k, 10.0, 16).unwrap();
        let w = rep.witnesses.iter().find(|w| w.element.as_ref() == Some(&b)).expect("witness 2 + φ");
        assert!(w.satisfies);
        assert!(w.log_distance_upper < w.threshold_log);
        let rep = liouville_search(&Real::int(2).sqrt(), &k, 50.0, 64).unwrap();
        assert!(rep.witnesses.iter().all(|w| !w.satisfies));
    }

    #[test]
    fn dc_pair_examples() {
        let k = two();
        let g = Real::int(3).sqrt();
        let p = dc_pair_bound(&Real::int(100), &g, &k, &rational(1, 10)).unwrap();
        assert_eq!((p.dc_x, p.dc_gamma_x), (4, 8));
        let p = dc_pair_bound(&Real::int(1 << 20), &g, &k, &rational(1, 10)).unwrap();
        assert_eq!(p.dc_x, 0);
        assert!(p.dc_gamma_x > 0);
        assert_eq!(
            dc_pair_bound(&Real::int(100), &Real::int(3), &k, &rational(1, 10)).unwrap_err(),
            DiophantineError::GammaInField
        );
    }
}
