use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;
use ssm_ball::{Mag, RealBall};

use super::{AlgebraicError, NumberField};
use crate::poly::{IntPoly, RatPoly};
use crate::MAX_PREC;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum LambdaKind {
    Pisot,
    Salem,
    Neither,
}

/// Classification with the extremal conjugate as witness: the embedding
/// index and a ball for its modulus. Degree one has no other conjugates.
#[derive(Clone, Debug)]
pub struct LambdaClass {
    pub kind: LambdaKind,
    pub witness: Option<(usize, RealBall)>,
}

/// `g` with `f(x) = x^m g(x + 1/x)` for a palindromic `f` of degree `2m`.
fn trace_polynomial(f: &IntPoly) -> RatPoly {
    let m = f.deg() / 2;
    let q = |v: &BigInt| BigRational::from_integer(v.clone());
    // P_k(y) = x^k + x^-k as a polynomial in y = x + 1/x
    let y = RatPoly::x();
    let mut p_prev = RatPoly::constant(BigRational::from_integer(2.into()));
    let mut p_cur = y.clone();
    let mut g = RatPoly::constant(q(&f.coeff(m)));
    for k in 1..=m {
        g = g.add(&p_cur.scale(&q(&f.coeff(m + k))));
        let next = y.mul(&p_cur).sub(&p_prev);
        p_prev = p_cur;
        p_cur = next;
    }
    g
}

fn is_salem_reciprocal(f: &IntPoly) -> bool {
    let m = f.deg() / 2;
    let g = trace_polynomial(f);
    let two = BigRational::from_integer(2.into());
    g.count_roots_above(&two) == 1 && g.count_roots_between(&-two.clone(), &two) == m - 1
}

/// Extremal conjugate: largest modulus among embeddings `1..d`.
fn extremal(field: &NumberField, prec: u32) -> Option<(usize, RealBall)> {
    (1..field.degree())
        .map(|k| (k, field.root(k, prec).abs()))
        .max_by(|a, b| a.1.to_f64().total_cmp(&b.1.to_f64()))
}

/// Decides whether `λ` is a Pisot number, a Salem number, or neither.
pub fn classify_lambda(field: &NumberField) -> Result<LambdaClass, AlgebraicError> {
    let f = field.min_poly();
    if !f.is_monic() {
        return Err(AlgebraicError::NotAlgebraicInteger);
    }
    let d = f.deg();
    if d == 1 {
        return Ok(LambdaClass {
            kind: LambdaKind::Pisot,
            witness: None,
        });
    }
    if d >= 4 && d % 2 == 0 && f.is_reciprocal() {
        // 1/λ is a conjugate, so λ cannot be Pisot; Salem iff the rest lie on the unit circle
        let kind = if is_salem_reciprocal(f) {
            LambdaKind::Salem
        } else {
            LambdaKind::Neither
        };
        return Ok(LambdaClass {
            kind,
            witness: extremal(field, 64),
        });
    }
    let mut prec = 64;
    loop {
        let mut all_inside = true;
        let mut outside = None;
        for k in 1..d {
            let m = field.root(k, prec).abs();
            let up = m.abs_upper();
            if up < Mag::pow2(0) {
                continue;
            }
            all_inside = false;
            if m.cmp_rational(&BigRational::from_integer(1.into())) == Some(std::cmp::Ordering::Greater) {
                outside = Some(k);
            }
        }
        if all_inside {
            return Ok(LambdaClass {
                kind: LambdaKind::Pisot,
                witness: extremal(field, prec),
            });
        }
        if outside.is_some() {
            return Ok(LambdaClass {
                kind: LambdaKind::Neither,
                witness: extremal(field, prec),
            });
        }
        if prec >= MAX_PREC {
            return Err(AlgebraicError::PrecisionExhausted { bits: prec });
        }
        prec *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebraic::RootSelector;

    fn classify(c: &[i64]) -> LambdaKind {
        let k = NumberField::from_coeffs(c, RootSelector::LargestReal).unwrap();
        classify_lambda(&k).unwrap().kind
    }

    #[test]
    fn reference_classifications() {
        assert_eq!(classify(&[-1, -1, 1]), LambdaKind::Pisot);
        assert_eq!(classify(&[-1, -1, 0, 1]), LambdaKind::Pisot);
        assert_eq!(classify(&[-2, 0, 1]), LambdaKind::Neither);
        assert_eq!(classify(&[1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1]), LambdaKind::Salem);
        assert_eq!(classify(&[-3, 1]), LambdaKind::Pisot);
        // x^2 - 3x + 1 is reciprocal of degree two and Pisot
        assert_eq!(classify(&[1, -3, 1]), LambdaKind::Pisot);
        // x^4 - 10x^2 + 1 is reciprocal with roots ±√2 ± √3
        assert_eq!(classify(&[1, 0, -10, 0, 1]), LambdaKind::Neither);
        // x^4 - x^3 - x^2 - x + 1 is reciprocal with a pair on the unit circle
        assert_eq!(classify(&[1, -1, -1, -1, 1]), LambdaKind::Salem);
        for c in [[1, -3, 1, -3, 1], [1, -2, -1, -2, 1], [1, 0, -4, 0, 1]] {
            if let Ok(k) = NumberField::from_coeffs(&c, RootSelector::LargestReal) {
                assert_eq!(classify_lambda(&k).unwrap().kind, classify_numeric(&c));
            }
        }
    }

    fn classify_numeric(c: &[i64]) -> LambdaKind {
        let k = NumberField::from_coeffs(c, RootSelector::LargestReal).unwrap();
        let big = (1..k.degree()).any(|i| k.root(i, 64).abs().to_f64() > 1.0 + 1e-9);
        let on = (1..k.degree()).any(|i| (k.root(i, 64).abs().to_f64() - 1.0).abs() < 1e-9);
        if big {
            LambdaKind::Neither
        } else if on {
            LambdaKind::Salem
        } else {
            LambdaKind::Pisot
        }
    }

    #[test]
    fn non_monic_rejected() {
        let k = NumberField::from_coeffs(&[-3, 0, 2], RootSelector::LargestReal).unwrap();
        assert_eq!(classify_lambda(&k).unwrap_err(), AlgebraicError::NotAlgebraicInteger);
    }

    #[test]
    fn witness_is_extremal_conjugate() {
        let k = NumberField::from_coeffs(&[-1, -1, 1], RootSelector::LargestReal).unwrap();
        let c = classify_lambda(&k).unwrap();
        let (idx, m) = c.witness.unwrap();
        assert_eq!(idx, 1);
        assert!((m.to_f64() - 0.618_033_988_749_895).abs() < 1e-12);
    }
}
