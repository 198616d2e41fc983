//! Elementary functions on exact dyadic inputs.
//!
//! Each kernel evaluates in fixed point with guard bits and returns the rounded
//! result plus an explicit error bound. Series truncation and every integer
//! truncation are charged to the bound, so the returned error is rigorous.

use std::sync::Mutex;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::bigfloat::BigFloat;
use crate::mag::Mag;

fn log2_ceil(n: u64) -> u32 {
    64 - n.max(1).leading_zeros()
}

/// `floor(x * 2^w)`.
fn to_fixed(x: &BigFloat, w: i64) -> BigInt {
    let e = x.exponent() + w;
    if e >= 0 {
        x.mantissa() << e as usize
    } else {
        x.mantissa() >> (-e) as usize
    }
}

/// `atan(1/n) * 2^w` in fixed point, with its error in units of `2^-w`.
fn atan_inv_fixed(n: u64, w: u64) -> (BigInt, u64) {
    let n2 = BigInt::from(n * n);
    let mut power = (BigInt::one() << w as usize) / BigInt::from(n);
    let mut sum = BigInt::zero();
    let mut k: u64 = 0;
    while !power.is_zero() {
        let term = &power / BigInt::from(2 * k + 1);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
        power /= &n2;
        k += 1;
    }
    // each power carries <= 2 ulp, each term <= 3 ulp, plus the truncated tail
    (sum, 3 * k + 2)
}

struct PiCache {
    prec: u32,
    value: BigFloat,
    err: Mag,
}

static PI_CACHE: Mutex<Option<PiCache>> = Mutex::new(None);

/// π rounded to `prec` bits.
pub fn pi(prec: u32) -> (BigFloat, Mag) {
    if let Ok(guard) = PI_CACHE.lock() {
        if let Some(c) = guard.as_ref() {
            if c.prec >= prec + 8 {
                let (v, e) = c.value.round(prec);
                return (v, e.add(&c.err));
            }
        }
    }
    let work = prec + 32;
    let w = work as u64 + 8;
    let (a, ea) = atan_inv_fixed(5, w);
    let (b, eb) = atan_inv_fixed(239, w);
    let fixed = a * 16 - b * 4;
    let ulps = 16 * ea + 4 * eb;
    let exact_err = Mag::from_u64(ulps).mul_2exp(-(w as i64));
    let raw = BigFloat::from_parts(fixed, -(w as i64));
    let (value, re) = raw.round(work);
    let err = re.add(&exact_err);
    if let Ok(mut guard) = PI_CACHE.lock() {
        *guard = Some(PiCache {
            prec: work,
            value: value.clone(),
            err,
        });
    }
    let (v, e) = value.round(prec);
    (v, e.add(&err))
}

/// `exp(x)` rounded to `prec` bits.
pub fn exp(x: &BigFloat, prec: u32) -> (BigFloat, Mag) {
    if x.is_zero() {
        return (BigFloat::one(), Mag::ZERO);
    }
    if x.is_negative() {
        let (e, err) = exp(&x.neg(), prec + 8);
        // 1/(e±err): error <= err / (e (e - err))
        let (q, qe) = BigFloat::one().div(&e, prec);
        let lower = e.sub_exact(&BigFloat::from_mag(&err));
        let prop = if lower.is_negative() || lower.is_zero() {
            Mag::INF
        } else {
            let lo = lower.abs_lower_trunc();
            let lo_mag_down = BigFloat::one().div(&lo, 40);
            // 1/lo <= lo_mag_down + its error
            let inv = lo_mag_down.0.mag_upper().add(&lo_mag_down.1);
            err.mul(&inv).mul(&inv)
        };
        return (q, qe.add(&prop));
    }
    // argument halving so the Taylor argument is below 2^-8
    let s = (x.top() + 8).max(0) as u64;
    let terms_guess = (prec as u64 / 8).max(8);
    let w = prec as u64 + s + 2 * log2_ceil(terms_guess) as u64 + 24;
    let r = to_fixed(&x.mul_2exp(-(s as i64)), w as i64);
    let one = BigInt::one() << w as usize;
    let mut sum = &one + &r;
    let mut term = r.clone();
    let mut k: u64 = 2;
    while !term.is_zero() {
        term = ((&term * &r) >> w as usize) / BigInt::from(k);
        sum += &term;
        k += 1;
    }
    // Taylor: <= 2 ulp per term, argument truncation: <= 2 ulp
    let e0 = 2 * k + 4;
    let mut v = sum;
    for _ in 0..s {
        v = (&v * &v) >> w as usize;
    }
    // relative error after s squarings: <= 2^(s+1) (e0 + 1) 2^-w
    let rel = Mag::from_u64(e0 + 1).mul_2exp(s as i64 + 1 - w as i64);
    let raw = BigFloat::from_parts(v, -(w as i64));
    let abs_err = raw.mag_upper().mul(&rel);
    let (val, re) = raw.round(prec);
    (val, re.add(&abs_err))
}

/// `2 atanh(z) * 2^w` for a fixed-point `z` with `|z| <= 1/3`, plus error ulps.
fn atanh2_fixed(z: &BigInt, w: u64) -> (BigInt, u64) {
    if z.sign() == num_bigint::Sign::Minus {
        // odd function; shifting a negative value would floor forever at -1
        let (v, u) = atanh2_fixed(&-z, w);
        return (-v, u);
    }
    let z2 = (z * z) >> w as usize;
    let mut power = z.clone();
    let mut sum = z.clone();
    let mut k: u64 = 1;
    loop {
        power = (&power * &z2) >> w as usize;
        if power.is_zero() {
            break;
        }
        sum += &power / BigInt::from(2 * k + 1);
        k += 1;
    }
    (sum << 1usize, 2 * (3 * k + 4))
}

struct Ln2Cache {
    w: u64,
    value: BigInt,
    ulps: u64,
}

static LN2_CACHE: Mutex<Option<Ln2Cache>> = Mutex::new(None);

fn ln2_fixed(w: u64) -> (BigInt, u64) {
    if let Ok(guard) = LN2_CACHE.lock() {
        if let Some(c) = guard.as_ref() {
            if c.w >= w {
                let shift = (c.w - w) as usize;
                let carried = if shift >= 64 { 0 } else { c.ulps >> shift };
                return (&c.value >> shift, 1 + carried);
            }
        }
    }
    let third = (BigInt::one() << w as usize) / BigInt::from(3);
    let (v, ulps) = atanh2_fixed(&third, w);
    // the truncation of 1/3 contributes < 2 ulp through the derivative 2/(1-z^2)
    let ulps = ulps + 3;
    if let Ok(mut guard) = LN2_CACHE.lock() {
        *guard = Some(Ln2Cache {
            w,
            value: v.clone(),
            ulps,
        });
    }
    (v, ulps)
}

/// `ln(2)` rounded to `prec` bits.
pub fn ln2(prec: u32) -> (BigFloat, Mag) {
    let w = prec as u64 + 16;
    let (v, ulps) = ln2_fixed(w);
    let raw = BigFloat::from_parts(v, -(w as i64));
    let (val, re) = raw.round(prec);
    (val, re.add(&Mag::from_u64(ulps).mul_2exp(-(w as i64))))
}

/// Natural logarithm of a positive value.
pub fn ln(x: &BigFloat, prec: u32) -> (BigFloat, Mag) {
    assert!(!x.is_negative() && !x.is_zero(), "ln of a nonpositive BigFloat");
    if *x == BigFloat::one() {
        return (BigFloat::zero(), Mag::ZERO);
    }
    // x = m 2^e with m in [3/4, 3/2)
    let mut e = x.top() - 1;
    let mut m = x.mul_2exp(-e);
    if m >= BigFloat::from_parts(BigInt::from(3), -1) {
        m = m.mul_2exp(-1);
        e += 1;
    }
    let e_bits = log2_ceil(e.unsigned_abs() + 1) as u64;
    let w = prec as u64 + e_bits + 2 * log2_ceil(prec as u64) as u64 + 24;
    // z = (m-1)/(m+1) in fixed point
    let num = m.sub_exact(&BigFloat::one());
    let den = m.add_exact(&BigFloat::one());
    let shift = w as i64 + num.exponent() - den.exponent();
    let scaled = if shift >= 0 {
        num.mantissa() << shift as usize
    } else {
        num.mantissa() >> (-shift) as usize
    };
    let z = scaled / den.mantissa();
    let (lnm, ulps_m) = if z.is_zero() {
        (BigInt::zero(), 0)
    } else {
        atanh2_fixed(&z, w)
    };
    // z truncation (<= 2 ulp) through the derivative 2/(1-z^2) <= 2.3
    let mut ulps = ulps_m + 5;
    let mut total = lnm;
    if e != 0 {
        let (l2, ul2) = ln2_fixed(w);
        total += l2 * BigInt::from(e);
        ulps += ul2 * e.unsigned_abs();
    }
    let raw = BigFloat::from_parts(total, -(w as i64));
    let (val, re) = raw.round(prec);
    (val, re.add(&Mag::from_u64(ulps).mul_2exp(-(w as i64))))
}

/// `(cos(2πx), sin(2πx))` with a shared error bound.
pub fn cos_sin_2pi(x: &BigFloat, prec: u32) -> (BigFloat, BigFloat, Mag) {
    let n = x.round_int();
    let f = x.sub_exact(&BigFloat::from_bigint(n));
    if f.is_zero() {
        return (BigFloat::one(), BigFloat::zero(), Mag::ZERO);
    }
    let half = BigFloat::from_parts(BigInt::one(), -1);
    let quarter = BigFloat::from_parts(BigInt::one(), -2);
    if f.abs() == half {
        return (BigFloat::from_i64(-1), BigFloat::zero(), Mag::ZERO);
    }
    if f == quarter {
        return (BigFloat::zero(), BigFloat::one(), Mag::ZERO);
    }
    if f == quarter.neg() {
        return (BigFloat::zero(), BigFloat::from_i64(-1), Mag::ZERO);
    }
    let terms_guess = (prec as u64 / 2).max(8);
    let w = prec as u64 + 2 * log2_ceil(terms_guess) as u64 + 24;
    // theta = 2 pi f with |theta| <= pi
    let (pi_v, pi_e) = pi(w as u32 + 8);
    let theta_bf = pi_v.mul_exact(&f).mul_2exp(1);
    let theta = to_fixed(&theta_bf, w as i64);
    let theta_err = pi_e.mul(&f.mag_upper()).mul_2exp(1).add(&Mag::pow2(-(w as i64)));
    let t2 = (&theta * &theta) >> w as usize;
    let one = BigInt::one() << w as usize;
    let mut sin = theta.clone();
    let mut cos = one.clone();
    let mut st = theta.clone();
    let mut ct = one;
    let mut k: u64 = 1;
    loop {
        ct = ((&ct * &t2) >> w as usize) / BigInt::from((2 * k - 1) * (2 * k));
        st = ((&st * &t2) >> w as usize) / BigInt::from((2 * k) * (2 * k + 1));
        if k % 2 == 1 {
            cos -= &ct;
            sin -= &st;
        } else {
            cos += &ct;
            sin += &st;
        }
        k += 1;
        if ct.is_zero() && st.is_zero() {
            break;
        }
    }
    // per-term truncation <= 2 ulp; early factors theta^2/((2k)(2k+1)) amplify by < 2
    let ulps = 8 * k + 16;
    let err = Mag::from_u64(ulps)
        .mul_2exp(-(w as i64))
        .add(&theta_err);
    let (c, ce) = BigFloat::from_parts(cos, -(w as i64)).round(prec);
    let (s, se) = BigFloat::from_parts(sin, -(w as i64)).round(prec);
    (c, s, err.add(&ce.max(se)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn within(v: &BigFloat, err: &Mag, reference: f64, tol: f64) {
        assert!(
            (v.to_f64() - reference).abs() <= tol,
            "{} vs {reference}",
            v.to_f64()
        );
        assert!(err.to_f64() < 1e-30, "error too large: {err}");
    }

    #[test]
    fn pi_digits() {
        let (p, e) = pi(400);
        let s = p.to_rational();
        // 50 digits of pi
        let digits = "3.1415926535897932384626433832795028841971693993751";
        let reference = BigRational::new(
            BigInt::parse_bytes(digits.replace('.', "").as_bytes(), 10).unwrap(),
            num_traits::pow(BigInt::from(10), 49),
        );
        let diff = num_traits::Signed::abs(&(s - reference));
        let tol = BigRational::new(BigInt::one(), num_traits::pow(BigInt::from(10), 48));
        assert!(diff < tol);
        // half an ulp of a value in [2, 4) plus the series error
        assert!(e <= Mag::pow2(-397));
    }

    #[test]
    fn exp_and_ln_agree_with_f64() {
        for v in [1e-12, 0.3, 1.0, 2.5, 10.0, 100.0, -0.7, -30.0] {
            let x = BigFloat::from_f64(v).unwrap();
            let (e, ee) = exp(&x, 128);
            let rel = (e.to_f64() / v.exp() - 1.0).abs();
            assert!(rel < 1e-14, "exp({v})");
            assert!(ee.to_f64() <= v.exp() * 1e-35);
            if v > 0.0 {
                let (l, le) = ln(&x, 128);
                within(&l, &le, v.ln(), 1e-14 * v.ln().abs().max(1.0));
            }
        }
    }

    #[test]
    fn ln_exp_roundtrip_high_precision() {
        let x = BigFloat::from_f64(1.7).unwrap();
        let (e, ee) = exp(&x, 600);
        let (back, be) = ln(&e, 600);
        let diff = back.sub_exact(&x).abs();
        // |ln(e) - x| <= be + ee/e
        let bound = be.add(&ee.mul(&Mag::from_u64(1)));
        assert!(diff.mag_upper() <= bound.mul_u64(2).add(&Mag::pow2(-590)));
    }

    #[test]
    fn trig_values() {
        let cases = [(0.125, (std::f64::consts::FRAC_PI_4).cos()), (1.0 / 3.0, -0.5)];
        for (x, c) in cases {
            let (cv, sv, err) = cos_sin_2pi(&BigFloat::from_f64(x).unwrap(), 200);
            assert!((cv.to_f64() - c).abs() < 1e-14);
            assert!((sv.to_f64() - (2.0 * std::f64::consts::PI * x).sin()).abs() < 1e-14);
            assert!(err <= Mag::pow2(-190));
        }
        let (c, s, e) = cos_sin_2pi(&BigFloat::from_f64(2.5).unwrap(), 64);
        assert_eq!((c, s), (BigFloat::from_i64(-1), BigFloat::zero()));
        assert!(e.is_zero());
    }

    #[test]
    fn pythagoras_at_high_precision() {
        let x = BigFloat::from_f64(0.123456789).unwrap();
        let (c, s, e) = cos_sin_2pi(&x, 1000);
        let one = c.mul_exact(&c).add_exact(&s.mul_exact(&s)).sub_exact(&BigFloat::one());
        assert!(one.mag_upper() <= e.mul_u64(5).add(&Mag::pow2(-995)));
    }
}
