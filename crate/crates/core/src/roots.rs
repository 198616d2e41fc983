//! Certified isolation of the complex roots of a squarefree integer polynomial.
//!
//! Approximations come from an `f64` Aberth iteration followed by
//! Weierstrass (Durand–Kerner) steps at the working precision. Each
//! approximation `z_i` is then certified with Smith's bound: the disks of
//! radius `d |f(z_i)| / |lc ∏_{j≠i} (z_i - z_j)|` cover the roots, and when they
//! are pairwise disjoint each holds exactly one root.

use num_complex::Complex64;
use num_traits::{Signed, ToPrimitive, Zero};
use ssm_ball::{BigFloat, CBall, Mag, RealBall};

use crate::poly::IntPoly;

/// Certified root enclosures.
///
/// Real roots come first in decreasing order, then the roots with positive
/// imaginary part by decreasing real part, then their conjugates in the same
/// order. Real roots carry an exact zero imaginary part.
#[derive(Clone, Debug)]
pub struct RootIsolation {
    pub prec: u32,
    pub roots: Vec<CBall>,
    pub real_count: usize,
}

impl RootIsolation {
    pub fn degree(&self) -> usize {
        self.roots.len()
    }

    pub fn complex_pairs(&self) -> usize {
        (self.roots.len() - self.real_count) / 2
    }

    /// Index of the conjugate of root `k`.
    pub fn conjugate_index(&self, k: usize) -> usize {
        if k < self.real_count {
            k
        } else {
            let p = self.complex_pairs();
            let j = k - self.real_count;
            if j < p {
                k + p
            } else {
                k - p
            }
        }
    }
}

/// Midpoint complex number at a working precision.
#[derive(Clone, Debug)]
struct Cx {
    re: BigFloat,
    im: BigFloat,
}

impl Cx {
    fn from_c64(z: Complex64) -> Cx {
        Cx {
            re: BigFloat::from_f64(z.re).unwrap_or_else(BigFloat::zero),
            im: BigFloat::from_f64(z.im).unwrap_or_else(BigFloat::zero),
        }
    }
    fn sub(&self, o: &Cx, p: u32) -> Cx {
        Cx {
            re: self.re.sub(&o.re, p).0,
            im: self.im.sub(&o.im, p).0,
        }
    }
    fn mul(&self, o: &Cx, p: u32) -> Cx {
        let a = self.re.mul_exact(&o.re).sub_exact(&self.im.mul_exact(&o.im));
        let b = self.re.mul_exact(&o.im).add_exact(&self.im.mul_exact(&o.re));
        Cx {
            re: a.round(p).0,
            im: b.round(p).0,
        }
    }
    fn div(&self, o: &Cx, p: u32) -> Cx {
        let n = o.re.mul_exact(&o.re).add_exact(&o.im.mul_exact(&o.im));
        let a = self.re.mul_exact(&o.re).add_exact(&self.im.mul_exact(&o.im));
        let b = self.im.mul_exact(&o.re).sub_exact(&self.re.mul_exact(&o.im));
        Cx {
            re: a.div(&n, p).0,
            im: b.div(&n, p).0,
        }
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    /// Rough `log2 |z|`, `i64::MIN` for zero.
    fn log2_abs(&self) -> i64 {
        let a = if self.re.is_zero() { i64::MIN } else { self.re.top() };
        let b = if self.im.is_zero() { i64::MIN } else { self.im.top() };
        a.max(b)
    }
    fn to_cball(&self, p: u32) -> CBall {
        CBall::new(
            RealBall::from_bigfloat(&self.re, p),
            RealBall::from_bigfloat(&self.im, p),
        )
    }
}

fn horner_c64(f: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::zero();
    let mut dp = Complex64::zero();
    for &a in f.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

/// Aberth iteration in double precision.
fn aberth_f64(f: &IntPoly) -> Vec<Complex64> {
    let d = f.deg();
    let c: Vec<f64> = f
        .coeffs()
        .iter()
        .map(|a| a.to_f64().unwrap_or(f64::MAX))
        .collect();
    // initial points on a circle sized by the coefficient ratio
    let lc = c[d].abs();
    let c0 = c[0].abs().max(f64::MIN_POSITIVE);
    let radius = (c0 / lc).powf(1.0 / d as f64).clamp(1e-3, 1e6);
    let mut z: Vec<Complex64> = (0..d)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / d as f64 + 0.4;
            Complex64::from_polar(radius, t)
        })
        .collect();
    for _ in 0..500 {
        let mut max_step: f64 = 0.0;
        for i in 0..d {
            let (p, dp) = horner_c64(&c, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let s: Complex64 = (0..d)
                .filter(|&j| j != i)
                .map(|j| (z[i] - z[j]).inv())
                .sum();
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            if w.is_finite() {
                z[i] -= w;
                max_step = max_step.max(w.norm() / z[i].norm().max(1.0));
            }
        }
        if max_step < 1e-15 {
            break;
        }
    }
    z
}

/// Weierstrass correction `f(z_i) / (lc ∏_{j≠i} (z_i - z_j))` at precision `p`.
fn weierstrass_step(f: &IntPoly, z: &[Cx], p: u32) -> Vec<Cx> {
    let d = z.len();
    let lc = Cx {
        re: BigFloat::from_bigint(f.lc()),
        im: BigFloat::zero(),
    };
    (0..d)
        .map(|i| {
            let mut val = Cx {
                re: BigFloat::zero(),
                im: BigFloat::zero(),
            };
            for a in f.coeffs().iter().rev() {
                val = val.mul(&z[i], p);
                val.re = val.re.add(&BigFloat::from_bigint(a.clone()), p).0;
            }
            let mut den = lc.clone();
            for j in 0..d {
                if j != i {
                    den = den.mul(&z[i].sub(&z[j], p), p);
                }
            }
            if den.is_zero() {
                val
            } else {
                val.div(&den, p)
            }
        })
        .collect()
}

/// Runs Weierstrass iterations until the corrections fall below `2^-p` relative.
fn polish(f: &IntPoly, mut z: Vec<Cx>, p: u32) -> Vec<Cx> {
    for _ in 0..400 {
        let w = weierstrass_step(f, &z, p);
        let mut worst = i64::MIN;
        for (zi, wi) in z.iter_mut().zip(&w) {
            *zi = zi.sub(wi, p);
            if !wi.is_zero() {
                let scale = zi.log2_abs().max(0);
                worst = worst.max(wi.log2_abs() - scale);
            }
        }
        if worst < -(p as i64) + 4 {
            break;
        }
    }
    z
}

/// Smith radii for the approximations `z`.
fn smith_radii(f: &IntPoly, z: &[Cx], p: u32) -> Option<Vec<Mag>> {
    let d = z.len();
    let balls: Vec<CBall> = z.iter().map(|c| c.to_cball(p)).collect();
    let lc = RealBall::from_bigint(&f.lc(), p);
    let mut out = Vec::with_capacity(d);
    for i in 0..d {
        let val = f.eval_cball(&balls[i]);
        let mut den = CBall::from_real(lc.clone());
        for j in 0..d {
            if j != i {
                den = den.mul(&balls[i].sub(&balls[j]));
            }
        }
        let lo = den.abs().abs_lower();
        if lo.is_zero() {
            return None;
        }
        out.push(val.abs_upper().div(&lo).mul_u64(d as u64));
    }
    Some(out)
}

/// Lower bound on `|a - b|` for midpoint values.
fn dist_lower(a: &Cx, b: &Cx, p: u32) -> Mag {
    a.to_cball(p).sub(&b.to_cball(p)).abs().abs_lower()
}

fn conj(z: &Cx) -> Cx {
    Cx {
        re: z.re.clone(),
        im: z.im.neg(),
    }
}

/// Smith radii and real/non-real flags at precision `p`, or `None` when some
/// disks overlap, are too wide for `target`, or a root cannot be classified.
fn certify(f: &IntPoly, z: &[Cx], p: u32, target: u32) -> Option<(Vec<Mag>, Vec<bool>)> {
    let d = z.len();
    let r = smith_radii(f, z, p)?;
    for i in 0..d {
        let scale = z[i].log2_abs().max(0);
        if r[i] > Mag::pow2(scale - target as i64) {
            return None;
        }
        for j in i + 1..d {
            if dist_lower(&z[i], &z[j], p) <= r[i].add(&r[j]) {
                return None;
            }
        }
    }
    let mut real = Vec::with_capacity(d);
    for i in 0..d {
        let zc = conj(&z[i]);
        // the conjugate disk meets no other disk, so the root is its own conjugate
        let own = (0..d).all(|j| j == i || dist_lower(&zc, &z[j], p) > r[i].add(&r[j]));
        let off_axis = z[i].im.mag_lower() > r[i];
        match (own, off_axis) {
            (true, false) => real.push(true),
            (false, true) => real.push(false),
            _ => return None,
        }
    }
    Some((r, real))
}

/// `order` lists the real roots, then one root of each conjugate pair.
fn assemble(z: &[Cx], r: &[Mag], order: &[usize], real_count: usize, p: u32, target: u32) -> RootIsolation {
    let pairs = order.len() - real_count;
    let mk = |zz: &Cx, rad: Mag| {
        CBall::new(
            RealBall::from_bigfloat_rad(&zz.re, rad, p),
            RealBall::from_bigfloat_rad(&zz.im, rad, p),
        )
    };
    let mut roots = Vec::with_capacity(order.len());
    for &i in &order[..real_count] {
        roots.push(CBall::from_real(RealBall::from_bigfloat_rad(&z[i].re, r[i], p)));
    }
    for &i in &order[real_count..real_count + pairs] {
        roots.push(mk(&z[i], r[i]));
    }
    for &i in &order[real_count..real_count + pairs] {
        roots.push(mk(&z[i], r[i]).conj());
    }
    RootIsolation {
        prec: target,
        roots,
        real_count,
    }
}

/// Real roots in decreasing order, then upper half-plane roots by decreasing real part.
fn canonical_order(z: &[Cx], real: &[bool]) -> Option<(Vec<usize>, usize)> {
    let mut reals: Vec<usize> = (0..z.len()).filter(|&i| real[i]).collect();
    let mut upper: Vec<usize> = (0..z.len())
        .filter(|&i| !real[i] && !z[i].im.is_negative())
        .collect();
    if reals.len() + 2 * upper.len() != z.len() {
        return None;
    }
    reals.sort_by(|&a, &b| z[b].re.cmp(&z[a].re));
    upper.sort_by(|&a, &b| z[b].re.cmp(&z[a].re).then(z[b].im.cmp(&z[a].im)));
    let rc = reals.len();
    let mut order = reals;
    order.extend(upper);
    Some((order, rc))
}

/// Isolates all roots of the squarefree polynomial `f` with radii at most
/// `2^-prec · max(1, |root|)`, raising the working precision up to `max_prec`.
pub fn isolate(f: &IntPoly, prec: u32, max_prec: u32, hint: Option<&RootIsolation>) -> Option<RootIsolation> {
    let d = f.deg();
    assert!(d >= 1, "constant polynomial has no roots");
    if d == 1 {
        // -c0 / c1, to the requested accuracy
        let q = num_rational::BigRational::new(-f.coeff(0), f.coeff(1));
        let b = RealBall::from_rational(&q, prec + 8);
        return Some(RootIsolation {
            prec,
            roots: vec![CBall::from_real(b)],
            real_count: 1,
        });
    }
    let mut z: Vec<Cx> = match hint {
        Some(h) => h
            .roots
            .iter()
            .map(|c| Cx {
                re: c.re.mid().clone(),
                im: c.im.mid().clone(),
            })
            .collect(),
        None => aberth_f64(f).into_iter().map(Cx::from_c64).collect(),
    };
    let coeff_bits = f
        .coeffs()
        .iter()
        .map(|a| a.abs().bits())
        .max()
        .unwrap_or(1) as u32;
    let mut work = prec + 32 + coeff_bits + 4 * d as u32;
    loop {
        z = polish(f, z, work);
        if let Some((r, real)) = certify(f, &z, work, prec) {
            match hint {
                Some(h) => {
                    // keep the order of the hint
                    let rc = h.real_count;
                    if (0..d).all(|i| real[i] == (i < rc)) {
                        let order: Vec<usize> = (0..rc + (d - rc) / 2).collect();
                        return Some(assemble(&z, &r, &order, rc, work, prec));
                    }
                }
                None => {
                    if let Some((order, rc)) = canonical_order(&z, &real) {
                        return Some(assemble(&z, &r, &order, rc, work, prec));
                    }
                }
            }
        }
        if work >= max_prec.max(prec + 64) {
            return None;
        }
        work = (work * 2).min(max_prec.max(prec + 64));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    #[test]
    fn golden_ratio_roots() {
        let f = IntPoly::from_i64(&[-1, -1, 1]);
        let iso = isolate(&f, 200, 8192, None).unwrap();
        assert_eq!(iso.real_count, 2);
        let phi = 1.618_033_988_749_895;
        assert!((iso.roots[0].re.to_f64() - phi).abs() < 1e-15);
        assert!(iso.roots[0].re.rad() < Mag::pow2(-199));
        // φ^2 = φ + 1 inside the ball
        let r = &iso.roots[0].re;
        assert!(r.sqr().sub(r).contains_rational(&BigRational::from_integer(1.into())));
    }

    #[test]
    fn complex_pairs_are_ordered_and_conjugate() {
        // x^3 - x - 1: one real root, one conjugate pair
        let f = IntPoly::from_i64(&[-1, -1, 0, 1]);
        let iso = isolate(&f, 100, 8192, None).unwrap();
        assert_eq!(iso.real_count, 1);
        assert!(iso.roots[1].im.is_positive());
        assert!(iso.roots[2].im.is_negative());
        assert_eq!(iso.conjugate_index(1), 2);
        let m = iso.roots[1].abs().to_f64();
        assert!((m - 0.868_836_961).abs() < 1e-8);
    }

    #[test]
    fn lehmer_roots() {
        let f = IntPoly::from_i64(&[1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1]);
        let iso = isolate(&f, 64, 8192, None).unwrap();
        assert_eq!(iso.real_count, 2);
        assert!((iso.roots[0].re.to_f64() - 1.176_280_818_259_917).abs() < 1e-12);
        for k in 2..10 {
            assert!((iso.roots[k].abs().to_f64() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn hint_refines() {
        let f = IntPoly::from_i64(&[-2, 0, 1]);
        let a = isolate(&f, 64, 8192, None).unwrap();
        let b = isolate(&f, 1000, 8192, Some(&a)).unwrap();
        assert!(b.roots[0].re.rad() < Mag::pow2(-999));
        assert!(b.roots[0].re.overlaps(&a.roots[0].re));
    }
}
