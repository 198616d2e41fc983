//! Membership of a real algebraic number in `Q(λ)`.
//!
//! If `α ∈ K` then `c_g · disc(θ) · α ∈ Z[θ]` for `θ = c_d λ`, so its power-basis
//! coordinates are integers. Every embedding of `K` sends `α` to a root of its
//! polynomial `g`; for each consistent assignment of roots to embeddings the
//! coordinates are recovered by Lagrange interpolation and tested for
//! integrality. Surviving candidates are verified exactly.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use ssm_ball::{CBall, RealBall};

use super::{AlgebraicError, FieldElement, NumberField};
use crate::poly::{IntPoly, RatPoly};
use crate::roots::{isolate, RootIsolation};
use crate::MAX_PREC;

#[derive(Clone, Debug, PartialEq)]
pub enum Membership {
    Member(FieldElement),
    NotMember,
}

/// Interpolation weights: row `k` holds the coefficients of
/// `f(x) / ((x - λ_k) f'(λ_k))`.
fn lagrange_rows(field: &NumberField, prec: u32) -> Vec<Vec<CBall>> {
    let f = field.min_poly();
    let d = f.deg();
    (0..d)
        .map(|k| {
            let z = field.root(k, prec);
            let mut q = vec![CBall::zero(prec); d];
            q[d - 1] = CBall::from_real(RealBall::from_bigint(&f.coeff(d), prec));
            for i in (1..d).rev() {
                q[i - 1] = CBall::from_real(RealBall::from_bigint(&f.coeff(i), prec)).add(&z.mul(&q[i]));
            }
            let mut qz = CBall::zero(prec);
            for c in q.iter().rev() {
                qz = qz.mul(&z).add(c);
            }
            let inv = qz.recip();
            q.iter().map(|c| c.mul(&inv)).collect()
        })
        .collect()
}

enum Outcome {
    Found(FieldElement),
    None,
    Undecided,
}

/// Isolates the root of `g` inside `approx`, returning its index.
fn isolate_candidate(g: &IntPoly, approx: &RealBall) -> Result<RootIsolation, AlgebraicError> {
    let mut prec = 64;
    loop {
        let iso = isolate(g, prec, MAX_PREC, None).ok_or(AlgebraicError::PrecisionExhausted { bits: MAX_PREC })?;
        let hits: Vec<usize> = (0..iso.real_count)
            .filter(|&i| iso.roots[i].re.overlaps(approx))
            .collect();
        if hits.len() == 1 {
            // move the selected root to the front
            let mut iso = iso;
            let r = iso.roots.remove(hits[0]);
            iso.roots.insert(0, r);
            return Ok(iso);
        }
        if hits.is_empty() || prec >= MAX_PREC {
            return Err(AlgebraicError::AmbiguousIsolation { count: hits.len() });
        }
        prec *= 2;
    }
}

fn try_assignments(
    field: &NumberField,
    g: &IntPoly,
    groots: &RootIsolation,
    approx: &RealBall,
    denom: &BigInt,
    prec: u32,
) -> Outcome {
    let d = field.degree();
    let rc = field.real_embeddings();
    let pairs = (d - rc) / 2;
    let rows = lagrange_rows(field, prec);
    let groots_at = isolate(g, prec, MAX_PREC, Some(groots)).unwrap_or_else(|| groots.clone());
    let m = groots_at.roots.len();
    let g_real = groots_at.real_count;
    let cd = field.min_poly().lc();
    // choices: real embeddings 1..rc take real roots; each upper embedding takes any root
    let slots: Vec<usize> = (1..rc).map(|_| g_real).chain((0..pairs).map(|_| m)).collect();
    let mut choice = vec![0usize; slots.len()];
    let mut undecided = false;
    let upper_embed: Vec<usize> = (rc..d)
        .filter(|&k| field.root(k, 64).im.is_positive())
        .collect();
    loop {
        let mut s: Vec<Option<CBall>> = vec![None; d];
        s[0] = Some(groots_at.roots[0].clone());
        for (slot, &c) in choice.iter().enumerate() {
            if slot < rc.saturating_sub(1) {
                s[slot + 1] = Some(groots_at.roots[c].clone());
            } else {
                let k = upper_embed[slot - (rc - 1)];
                let z = groots_at.roots[c].clone();
                s[field.conjugate_embedding(k)] = Some(z.conj());
                s[k] = Some(z);
            }
        }
        let s: Vec<CBall> = s.into_iter().map(|v| v.expect("every embedding assigned")).collect();
        let mut coords = Vec::with_capacity(d);
        let mut reject = false;
        let mut unsure = false;
        let mut cpow = BigInt::from(1);
        for i in 0..d {
            let mut x = CBall::zero(prec);
            for k in 0..d {
                x = x.add(&s[k].mul(&rows[k][i]));
            }
            if !x.im.contains_zero() {
                reject = true;
                break;
            }
            let scale = BigRational::new(denom.clone(), cpow.clone());
            let y = x.re.mul(&RealBall::from_rational(&scale, prec));
            let lo = y.lower().ceil();
            let hi = y.upper().floor();
            if lo > hi {
                reject = true;
                break;
            }
            if lo == hi {
                coords.push(BigRational::new(lo * &cpow, denom.clone()));
            } else {
                unsure = true;
            }
            cpow *= &cd;
        }
        if !reject {
            if unsure {
                undecided = true;
            } else {
                let a = field.from_coords(coords);
                if field.eval_poly(g, &a).is_zero() && field.embed_real(&a, prec).overlaps(approx) {
                    return Outcome::Found(a);
                }
            }
        }
        // odometer
        let mut pos = 0;
        loop {
            if pos == choice.len() {
                return if undecided { Outcome::Undecided } else { Outcome::None };
            }
            choice[pos] += 1;
            if choice[pos] < slots[pos] {
                break;
            }
            choice[pos] = 0;
            pos += 1;
        }
    }
}

/// Decides whether the root of `cand_min_poly` isolated by `cand_approx` lies in the field.
pub fn contains(
    field: &NumberField,
    cand_min_poly: &IntPoly,
    cand_approx: &RealBall,
) -> Result<Membership, AlgebraicError> {
    if cand_min_poly.deg() == 0 {
        return Err(AlgebraicError::DegeneratePolynomial("constant candidate".into()));
    }
    let g = RatPoly::from_int(cand_min_poly).squarefree().to_primitive_int();
    if g.deg() == 1 {
        let r = BigRational::new(-g.coeff(0), g.coeff(1));
        if !cand_approx.contains_rational(&r) {
            return Err(AlgebraicError::AmbiguousIsolation { count: 0 });
        }
        return Ok(Membership::Member(field.from_rational(r)));
    }
    let groots = isolate_candidate(&g, cand_approx)?;
    // denominator bound c_g |disc(θ)| with θ = c_d λ
    let f = field.min_poly();
    let d = f.deg();
    let cd = f.lc();
    let theta = IntPoly::new(
        (0..=d)
            .map(|i| f.coeff(i) * num_traits::pow(cd.clone(), d - i) / &cd)
            .collect(),
    );
    let disc = if d == 1 { BigInt::from(1) } else { theta.discriminant().abs() };
    let denom = g.lc() * disc;
    if denom.is_zero() {
        return Err(AlgebraicError::DegeneratePolynomial("zero discriminant".into()));
    }
    let mut prec = 64 + 2 * denom.bits() as u32;
    loop {
        match try_assignments(field, &g, &groots, cand_approx, &denom, prec) {
            Outcome::Found(a) => return Ok(Membership::Member(a)),
            Outcome::None => return Ok(Membership::NotMember),
            Outcome::Undecided if prec >= MAX_PREC => {
                return Err(AlgebraicError::PrecisionExhausted { bits: prec })
            }
            Outcome::Undecided => prec *= 2,
        }
    }
}
