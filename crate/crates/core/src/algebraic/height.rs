use num_traits::Zero;
use ssm_ball::{BigFloat, Mag, RealBall};

use super::{FieldElement, NumberField};
use crate::poly::IntPoly;
use crate::roots::isolate;
use crate::MAX_PREC;

/// Primitive integer minimal polynomial of `a` over `Q`, positive leading coefficient.
pub fn min_poly_of(field: &NumberField, a: &FieldElement) -> IntPoly {
    field.charpoly(a).squarefree().to_primitive_int()
}

/// `max(0, ln m)` for a modulus ball.
fn log_plus(m: &RealBall) -> RealBall {
    let prec = m.prec();
    let up = m.abs_upper();
    if up <= Mag::pow2(0) {
        return RealBall::zero(prec);
    }
    if m.abs_lower() > Mag::pow2(0) {
        return m.ln();
    }
    let top = RealBall::from_bigfloat(&BigFloat::from_mag(&up), prec).ln();
    RealBall::from_interval(&BigFloat::zero(), &top.upper(), prec)
}

/// Logarithmic Mahler measure of the minimal polynomial of `a`:
/// `ln|a_d| + Σ max(0, ln|β_j|)`, not divided by the degree. Zero maps to zero.
pub fn height(field: &NumberField, a: &FieldElement, prec: u32) -> RealBall {
    if a.is_zero() {
        return RealBall::zero(prec);
    }
    let p = min_poly_of(field, a);
    let lc = RealBall::from_bigint(&p.lc(), prec + 16).ln();
    if p.deg() == 1 {
        let root = num_rational::BigRational::new(-p.coeff(0), p.coeff(1));
        if root.is_zero() {
            return lc;
        }
        let m = RealBall::from_rational(&root, prec + 16).abs();
        return lc.add(&log_plus(&m));
    }
    let iso = isolate(&p, prec + 16, MAX_PREC, None).expect("isolating a minimal polynomial");
    iso.roots
        .iter()
        .fold(lc, |acc, z| acc.add(&log_plus(&z.abs())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebraic::RootSelector;
    use num_rational::BigRational;

    #[test]
    fn reference_heights() {
        let k = NumberField::from_coeffs(&[-1, -1, 1], RootSelector::LargestReal).unwrap();
        let phi = k.generator();
        let h = height(&k, &phi, 128);
        assert!((h.to_f64() - 1.618_033_988_749_895f64.ln()).abs() < 1e-15);
        let half = k.from_rational(BigRational::new(1.into(), 2.into()));
        assert!((height(&k, &half, 128).to_f64() - 2f64.ln()).abs() < 1e-15);
        // 2 + φ has minimal polynomial x^2 - 5x + 5
        let b = k.from_ints(&[2, 1]);
        assert_eq!(min_poly_of(&k, &b), IntPoly::from_i64(&[5, -5, 1]));
        assert!((height(&k, &b, 128).to_f64() - 5f64.ln()).abs() < 1e-14);
        assert!(height(&k, &k.zero(), 64).is_exact());
    }
}
