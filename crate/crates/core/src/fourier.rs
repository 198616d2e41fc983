//! Certified Fourier transforms of self-similar measures and the decay bounds
//! that control them.
//!
//! Everything numeric here is generic over the ball midpoint scalar: `f64` for
//! fast sweeps, [`ssm_ball::BigFloat`] when precision matters.

use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use ssm_ball::{Ball, BallScalar, BigFloat, ComplexBall, Mag};
use thiserror::Error;

use crate::ifs::{Ifs, IfsError};
use crate::real::Real;

/// Default DP cutoff `δ`.
pub const DEFAULT_DELTA: f64 = 1.0 / 1024.0;
/// Largest constant tried by [`calibrate`].
pub const CALIBRATION_CAP: f64 = (1u64 << 20) as f64;
/// Tail tolerance used by [`bounds`] for the quadratic sum.
const SUM_TOL: f64 = 1e-12;
/// Upper limit on scale-ladder length.
const MAX_LADDER: usize = 1 << 20;
/// Samples per Monte-Carlo RNG stream.
const MC_CHUNK: usize = 4096;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum FourierError {
    #[error("UnequalExponents: maps {0} and {1} have different ratios")]
    UnequalExponents(usize, usize),
    #[error("IdenticalTranslations: maps {0} and {1} have the same translation")]
    IdenticalTranslations(usize, usize),
    #[error("CapExceeded: no constant up to {cap} works; witnesses {witnesses:?}")]
    CapExceeded { cap: f64, witnesses: Vec<f64> },
    #[error("PrecisionExhausted: result is not finite at {bits} bits")]
    PrecisionExhausted { bits: u32 },
    #[error("InvalidDelta: {0} is not in (0, 1/4]")]
    InvalidDelta(f64),
    #[error("InvalidArgument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Ifs(#[from] IfsError),
}

type CB<T> = ComplexBall<T>;

/// An IFS evaluated to balls at a fixed precision.
#[derive(Clone, Debug)]
pub struct NumericIfs<T: BallScalar> {
    prec: u32,
    r: Ball<T>,
    exponents: Vec<u64>,
    ratios: Vec<Ball<T>>,
    a: Vec<Ball<T>>,
    a_exact: Vec<Real>,
    p: Vec<Ball<T>>,
    probs: Vec<BigRational>,
    mean: Ball<T>,
    var: Ball<T>,
    diam: Ball<T>,
    abs_max: Ball<T>,
    f64_data: McData,
}

#[derive(Clone, Debug)]
struct McData {
    ratios: Vec<f64>,
    a: Vec<f64>,
    cum: Vec<f64>,
    diam: f64,
}

impl<T: BallScalar> NumericIfs<T> {
    pub fn new(ifs: &Ifs, prec: u32) -> Self {
        let ev = |x: &Real| x.eval_as::<T>(prec);
        let (mean, var) = ifs.moments();
        let (lo, hi) = ifs.attractor_hull();
        let (lo, hi) = (ev(&lo), ev(&hi));
        let probs = ifs.probs().to_vec();
        let mut acc = 0.0;
        let cum = probs
            .iter()
            .map(|q| {
                acc += q.to_f64().unwrap_or(0.0);
                acc
            })
            .collect();
        let ratios: Vec<Ball<T>> = (0..ifs.len()).map(|i| ev(&ifs.ratio(i))).collect();
        let a: Vec<Ball<T>> = ifs.translations().iter().map(ev).collect();
        let diam = hi.sub(&lo);
        let f64_data = McData {
            ratios: ratios.iter().map(|x| x.to_f64()).collect(),
            a: a.iter().map(|x| x.to_f64()).collect(),
            cum,
            diam: diam.to_f64(),
        };
        NumericIfs {
            prec,
            r: ev(ifs.r()),
            exponents: ifs.exponents().to_vec(),
            ratios,
            p: probs.iter().map(|q| Ball::from_rational(q, prec)).collect(),
            a,
            a_exact: ifs.translations().to_vec(),
            probs,
            mean: ev(&mean),
            var: ev(&var).abs(),
            abs_max: lo.abs().union(&hi.abs()).abs(),
            diam,
            f64_data,
        }
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn r(&self) -> &Ball<T> {
        &self.r
    }

    pub fn exponents(&self) -> &[u64] {
        &self.exponents
    }

    pub fn translations(&self) -> &[Ball<T>] {
        &self.a
    }

    pub fn probs(&self) -> &[BigRational] {
        &self.probs
    }

    pub fn diameter(&self) -> &Ball<T> {
        &self.diam
    }

    fn check_pair(&self, (i, j): (usize, usize)) -> Result<(), FourierError> {
        let k = self.len();
        if i >= k || j >= k || i == j {
            return Err(FourierError::InvalidArgument(format!("pair ({}, {}) with {k} maps", i + 1, j + 1)));
        }
        if self.exponents[i] != self.exponents[j] {
            return Err(FourierError::UnequalExponents(i + 1, j + 1));
        }
        Ok(())
    }

    /// Translation difference `a_i - a_j`, rejected when certainly zero.
    fn pair_diff(&self, (i, j): (usize, usize)) -> Result<Ball<T>, FourierError> {
        let d = self.a[i].sub(&self.a[j]);
        if self.a_exact[i].cmp_to(&self.a_exact[j], 1024).is_none_or(|o| o.is_eq()) {
            return Err(FourierError::IdenticalTranslations(i + 1, j + 1));
        }
        Ok(d)
    }

    /// `q_1 q_2` with `q = p / (p_i + p_j)`.
    fn pair_weight(&self, (i, j): (usize, usize)) -> Ball<T> {
        let s = &self.probs[i] + &self.probs[j];
        let q = &self.probs[i] * &self.probs[j] / (&s * &s);
        Ball::from_rational(&q, self.prec)
    }
}

fn is_zero<T: BallScalar>(x: &Ball<T>) -> bool {
    x.is_exact() && x.mid().is_zero()
}

fn mag_of(x: f64) -> Mag {
    Mag::from_f64_up(x)
}

fn bf(x: f64) -> BigFloat {
    BigFloat::from_f64(x).expect("finite constant")
}

/// Clips a ball to `[0, 1]`.
fn clamp01<T: BallScalar>(x: Ball<T>) -> Ball<T> {
    let (lo, hi) = (x.lower(), x.upper());
    let zero = BigFloat::zero();
    let one = BigFloat::one();
    let lo = if lo < zero { zero.clone() } else if lo > one { one.clone() } else { lo };
    let hi = if hi > one { one } else if hi < zero { zero } else { hi };
    Ball::from_interval(&lo, &hi, x.prec())
}

/// `Σ_i p_i e(a_i ω)`.
pub fn phase_sum<T: BallScalar>(ifs: &NumericIfs<T>, omega: &Ball<T>) -> CB<T> {
    let prec = ifs.prec;
    if is_zero(omega) {
        return CB::one(prec);
    }
    (0..ifs.len()).fold(CB::zero(prec), |acc, i| {
        acc.add(&CB::expi_2pi(&ifs.a[i].mul(omega)).scale(&ifs.p[i]))
    })
}

/// `e(ξ·mean)` with the second-order error `(2πξ)² var / 2`.
fn base_case<T: BallScalar>(ifs: &NumericIfs<T>, xi: &Ball<T>) -> CB<T> {
    let v = CB::expi_2pi(&xi.mul(&ifs.mean));
    let two_pi_xi = Ball::<T>::pi(ifs.prec).mul_2exp(1).mul(xi);
    let err = two_pi_xi.sqr().mul(&ifs.var).mul_2exp(-1).abs_upper();
    v.add_error(err)
}

/// Certified `μ̂(ω)` by the dynamic program over the scale ladder, with the
/// second-order base case once `|r^m ω| · diam ≤ δ`.
pub fn mu_hat<T: BallScalar>(ifs: &NumericIfs<T>, omega: &Ball<T>, delta: f64) -> Result<CB<T>, FourierError> {
    if !(delta > 0.0 && delta <= 0.25) {
        return Err(FourierError::InvalidDelta(delta));
    }
    let prec = ifs.prec;
    if is_zero(omega) {
        return Ok(CB::one(prec));
    }
    let lmax = *ifs.exponents.iter().max().expect("nonempty IFS") as usize;
    let dmag = mag_of(delta);
    let diam = ifs.diam.abs_upper();
    let mut xi = vec![omega.clone()];
    while xi.last().expect("nonempty").abs_upper().mul(&diam) > dmag {
        if xi.len() > MAX_LADDER {
            return Err(FourierError::PrecisionExhausted { bits: prec });
        }
        let next = xi.last().expect("nonempty").mul(&ifs.r);
        xi.push(next);
    }
    let m_top = xi.len() - 1;
    while xi.len() < m_top + lmax {
        let next = xi.last().expect("nonempty").mul(&ifs.r);
        xi.push(next);
    }
    // Exact midpoints with a disc radius: the recursion is a convex combination
    // of rotations, so the disc never grows, whereas rectangles would.
    let mut f: Vec<Option<(CB<T>, Mag)>> = vec![None; xi.len()];
    for m in m_top..xi.len() {
        f[m] = Some(base_case(ifs, &xi[m]).split_disc());
    }
    for m in (0..m_top).rev() {
        let mut acc = CB::zero(prec);
        let mut err = Mag::ZERO;
        for i in 0..ifs.len() {
            let (mid, r) = f[m + ifs.exponents[i] as usize].as_ref().expect("ladder filled from the top");
            let phase = CB::expi_2pi(&ifs.a[i].mul(&xi[m])).scale(&ifs.p[i]);
            acc = acc.add(&phase.mul(mid));
            err = err.add(&phase.abs_upper().mul(r));
        }
        let (mid, r) = acc.split_disc();
        f[m] = Some((mid, err.add(&r)));
    }
    let (mid, err) = f[0].take().expect("root value");
    let out = mid.add_error(err);
    if !out.is_finite() {
        return Err(FourierError::PrecisionExhausted { bits: prec });
    }
    Ok(out)
}

/// `∏_{n≥0} phase_sum(r^{n l} ω)` for an IFS with a single exponent `l`, truncated
/// once `2π |ξ| max|x|` falls below `tol`; the remaining factor `μ̂(ξ)` is within
/// that distance of one.
pub fn product_oracle<T: BallScalar>(ifs: &NumericIfs<T>, omega: &Ball<T>, tol: f64) -> Result<CB<T>, FourierError> {
    if let Some(i) = (1..ifs.len()).find(|&i| ifs.exponents[i] != ifs.exponents[0]) {
        return Err(FourierError::UnequalExponents(1, i + 1));
    }
    let prec = ifs.prec;
    let step = ifs.ratios[0].clone();
    let two_pi = Ball::<T>::pi(prec).mul_2exp(1);
    let tmag = mag_of(tol);
    let mut xi = omega.clone();
    let mut acc = CB::one(prec);
    for _ in 0..MAX_LADDER {
        let tail = two_pi.mul(&xi).mul(&ifs.abs_max).abs_upper();
        if tail <= tmag {
            return Ok(acc.add_error(tail));
        }
        acc = acc.mul(&phase_sum(ifs, &xi));
        xi = xi.mul(&step);
    }
    Err(FourierError::PrecisionExhausted { bits: prec })
}

/// `u(ω) = 1 - |p_i e(a_i ω) + p_j e(a_j ω)| / (p_i + p_j)` for maps sharing a ratio.
pub fn u_factor<T: BallScalar>(
    ifs: &NumericIfs<T>,
    pair: (usize, usize),
    omega: &Ball<T>,
) -> Result<Ball<T>, FourierError> {
    ifs.check_pair(pair)?;
    Ok(u_unchecked(ifs, pair, omega))
}

fn u_unchecked<T: BallScalar>(ifs: &NumericIfs<T>, (i, j): (usize, usize), omega: &Ball<T>) -> Ball<T> {
    let prec = ifs.prec;
    if is_zero(omega) {
        return Ball::zero(prec);
    }
    let s = &ifs.probs[i] + &ifs.probs[j];
    let qi = Ball::from_rational(&(&ifs.probs[i] / &s), prec);
    let qj = Ball::from_rational(&(&ifs.probs[j] / &s), prec);
    let z = CB::expi_2pi(&ifs.a[i].mul(omega))
        .scale(&qi)
        .add(&CB::expi_2pi(&ifs.a[j].mul(omega)).scale(&qj));
    clamp01(Ball::one(prec).sub(&z.abs()))
}

/// `Σ_{j>C} ‖a_diff · ω · r^j‖²`. Once a term drops below `1/2` the rest is a
/// geometric series of squares; summation stops when that tail is below `tol`
/// and the tail is carried in the radius.
pub fn decay_sum<T: BallScalar>(a_diff: &Ball<T>, r: &Ball<T>, omega: &Ball<T>, c: f64, tol: f64) -> Ball<T> {
    let prec = a_diff.prec().max(r.prec()).max(omega.prec());
    if is_zero(omega) || is_zero(a_diff) {
        return Ball::zero(prec);
    }
    let j0 = if c < 0.0 { 0 } else { c.floor() as i64 + 1 };
    let r2 = r.sqr();
    let geo = Ball::<T>::one(prec).sub(&r2).recip();
    let mut x = a_diff.mul(omega).abs().mul(&r.powi(j0));
    let mut sum = Ball::<T>::zero(prec);
    let half = bf(0.5);
    for _ in 0..MAX_LADDER {
        if x.upper() < half {
            let tail = x.sqr().mul(&geo).abs_upper();
            if tail <= mag_of(tol) {
                let t = BigFloat::from_mag(&tail);
                return sum.add(&Ball::from_interval(&BigFloat::zero(), &t, prec));
            }
        }
        sum = sum.add(&x.dist_to_int().sqr());
        x = x.mul(r);
    }
    sum.add_error(Mag::INF)
}

/// Which decay bound to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BoundKind {
    /// `exp(-C^{-1} Σ_{j>C} ‖(a_1-a_2) ω r^j‖²)`.
    Exp,
    /// `∏_{n≥C} (1 - C^{-1} u(r^n ω))`.
    Prod,
}

/// Fourier value and both decay bounds at one frequency.
#[derive(Clone, Debug)]
pub struct DecayReport<T: BallScalar> {
    pub omega: Ball<T>,
    pub mu_hat: CB<T>,
    pub mu_hat_abs: Ball<T>,
    pub sum_s: Ball<T>,
    pub bound_exp: Ball<T>,
    pub bound_prod: Ball<T>,
    pub c_used: f64,
}

impl<T: BallScalar> DecayReport<T> {
    /// CSV columns: omega, re, im, abs, radius, sum_S, bound_exp, bound_prod, C.
    pub fn csv_row(&self) -> String {
        let (re, im) = self.mu_hat.to_f64();
        format!(
            "{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{}",
            self.omega.to_f64(),
            re,
            im,
            self.mu_hat_abs.to_f64(),
            self.mu_hat.rad().to_f64(),
            self.sum_s.to_f64(),
            self.bound_exp.to_f64(),
            self.bound_prod.to_f64(),
            self.c_used
        )
    }
}

pub const CSV_HEADER: &str = "omega,re,im,abs,radius,sum_S,bound_exp,bound_prod,C";

fn bound_exp_from_sum<T: BallScalar>(sum: &Ball<T>, c: f64) -> Ball<T> {
    let cb = Ball::<T>::from_f64(c, sum.prec());
    clamp01(sum.div(&cb).neg().exp())
}

fn exp_bound<T: BallScalar>(
    ifs: &NumericIfs<T>,
    diff: &Ball<T>,
    omega: &Ball<T>,
    c: f64,
) -> (Ball<T>, Ball<T>) {
    let s = decay_sum(diff, &ifs.r, omega, c, SUM_TOL);
    let b = bound_exp_from_sum(&s, c);
    (s, b)
}

fn prod_bound<T: BallScalar>(
    ifs: &NumericIfs<T>,
    pair: (usize, usize),
    diff: &Ball<T>,
    omega: &Ball<T>,
    c: f64,
    delta: f64,
) -> Ball<T> {
    let prec = ifs.prec;
    if is_zero(omega) {
        return Ball::one(prec);
    }
    let n0 = c.max(0.0).ceil() as i64;
    let cb = Ball::<T>::from_f64(c, prec);
    let w = ifs.pair_weight(pair);
    let eight_pi2 = Ball::<T>::pi(prec).sqr().mul_2exp(3);
    let geo = Ball::<T>::one(prec).sub(&ifs.r.sqr()).recip();
    let dmag = mag_of(delta);
    let mut xi = omega.mul(&ifs.r.powi(n0));
    let mut acc = Ball::<T>::one(prec);
    for _ in 0..MAX_LADDER {
        let theta = diff.mul(&xi).abs();
        // the tail factors satisfy u/C ≤ 1/2, so each is at least exp(-2u/C)
        let tail_exp = eight_pi2.mul(&w).mul(&theta.sqr()).mul(&geo).div(&cb);
        if theta.abs_upper() <= dmag && tail_exp.upper() <= bf(0.25) {
            let low = tail_exp.neg().exp();
            let tail = Ball::from_interval(&low.lower(), &BigFloat::one(), prec);
            return clamp01(acc.mul(&tail));
        }
        let f = clamp01(Ball::<T>::one(prec).sub(&u_unchecked(ifs, pair, &xi).div(&cb)));
        acc = acc.mul(&f);
        xi = xi.mul(&ifs.r);
    }
    clamp01(acc.add_error(Mag::INF))
}

/// Both decay bounds at `ω` with constant `C`, next to the certified `|μ̂(ω)|`.
pub fn bounds<T: BallScalar>(
    ifs: &NumericIfs<T>,
    pair: (usize, usize),
    omega: &Ball<T>,
    c: f64,
    delta: f64,
) -> Result<DecayReport<T>, FourierError> {
    ifs.check_pair(pair)?;
    let diff = ifs.pair_diff(pair)?;
    if !(c > 0.0) {
        return Err(FourierError::InvalidArgument(format!("C must be positive, got {c}")));
    }
    let mu = mu_hat(ifs, omega, delta)?;
    let (sum_s, bound_exp) = exp_bound(ifs, &diff, omega, c);
    let bound_prod = prod_bound(ifs, pair, &diff, omega, c, delta);
    Ok(DecayReport {
        omega: omega.clone(),
        mu_hat_abs: mu.abs(),
        mu_hat: mu,
        sum_s,
        bound_exp,
        bound_prod,
        c_used: c,
    })
}

/// Evaluates one bound kind at `ω` with constant `C`.
pub fn bound_value<T: BallScalar>(
    ifs: &NumericIfs<T>,
    pair: (usize, usize),
    omega: &Ball<T>,
    c: f64,
    kind: BoundKind,
    delta: f64,
) -> Result<Ball<T>, FourierError> {
    ifs.check_pair(pair)?;
    let diff = ifs.pair_diff(pair)?;
    Ok(match kind {
        BoundKind::Exp => exp_bound(ifs, &diff, omega, c).1,
        BoundKind::Prod => prod_bound(ifs, pair, &diff, omega, c, delta),
    })
}

/// Result of [`calibrate`].
#[derive(Clone, Debug, Serialize)]
pub struct Calibration {
    pub kind: BoundKind,
    pub c_hat: f64,
    /// Frequencies that still fail at the largest rejected constant.
    pub tight: Vec<f64>,
}

/// Smallest `C ≥ 1` (doubling, then bisection) with the bound certified above
/// `|μ̂(ω)|` at every grid frequency.
pub fn calibrate<T: BallScalar>(
    ifs: &NumericIfs<T>,
    pair: (usize, usize),
    grid: &[Ball<T>],
    kind: BoundKind,
    delta: f64,
) -> Result<Calibration, FourierError> {
    ifs.check_pair(pair)?;
    ifs.pair_diff(pair)?;
    if grid.is_empty() {
        return Err(FourierError::InvalidArgument("empty frequency grid".into()));
    }
    if grid.iter().any(is_zero) {
        return Err(FourierError::InvalidArgument("grid contains ω = 0".into()));
    }
    let uppers: Vec<BigFloat> = grid
        .par_iter()
        .map(|w| mu_hat(ifs, w, delta).map(|m| m.abs().upper()))
        .collect::<Result<_, _>>()?;
    let failures = |c: f64| -> Vec<usize> {
        let ok: Vec<bool> = grid
            .par_iter()
            .zip(&uppers)
            .map(|(w, up)| {
                bound_value(ifs, pair, w, c, kind, delta).is_ok_and(|b| b.lower() >= *up)
            })
            .collect();
        ok.iter().enumerate().filter(|(_, ok)| !**ok).map(|(i, _)| i).collect()
    };
    let mut hi = 1.0;
    let mut fail = failures(hi);
    if fail.is_empty() {
        return Ok(Calibration { kind, c_hat: 1.0, tight: vec![] });
    }
    let mut last_fail = fail.clone();
    while !fail.is_empty() {
        hi *= 2.0;
        if hi > CALIBRATION_CAP {
            return Err(FourierError::CapExceeded {
                cap: CALIBRATION_CAP,
                witnesses: fail.iter().map(|&i| grid[i].to_f64()).collect(),
            });
        }
        last_fail = fail;
        fail = failures(hi);
    }
    let mut lo = hi / 2.0;
    for _ in 0..24 {
        if hi - lo <= 1e-6 * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let f = failures(mid);
        if f.is_empty() {
            hi = mid;
        } else {
            lo = mid;
            last_fail = f;
        }
    }
    Ok(Calibration {
        kind,
        c_hat: hi,
        tight: last_fail.iter().map(|&i| grid[i].to_f64()).collect(),
    })
}

/// Monte-Carlo estimate of `μ̂(ω) = E[e(ω S)]`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct McEstimate {
    pub re: f64,
    pub im: f64,
    pub stderr_re: f64,
    pub stderr_im: f64,
    pub samples: usize,
    pub seed: u64,
}

impl McEstimate {
    pub fn abs(&self) -> f64 {
        self.re.hypot(self.im)
    }

    /// Combined standard error `sqrt(se_re² + se_im²)`.
    pub fn stderr(&self) -> f64 {
        self.stderr_re.hypot(self.stderr_im)
    }
}

/// Draws one attractor point by sampling a coding until `r^L · diam < 2^-bits`.
fn sample_point(d: &McData, rng: &mut ChaCha8Rng, bits: u32) -> f64 {
    let eps = (-(bits as f64)).exp2();
    let mut s = 0.0;
    let mut scale = 1.0;
    while scale * d.diam >= eps && scale > 0.0 {
        let u: f64 = rng.random();
        let i = d.cum.iter().position(|&c| u < c).unwrap_or(d.cum.len() - 1);
        s += scale * d.a[i];
        scale *= d.ratios[i];
    }
    s
}

/// Deterministic, parallel Monte-Carlo estimate. Chunk `c` of the samples uses
/// ChaCha8 seeded with `seed` on stream `c`, so results do not depend on threads.
pub fn mu_hat_mc<T: BallScalar>(ifs: &NumericIfs<T>, omega: f64, n_samples: usize, seed: u64, bits: u32) -> McEstimate {
    let n = n_samples.max(1);
    if omega == 0.0 {
        return McEstimate { re: 1.0, im: 0.0, stderr_re: 0.0, stderr_im: 0.0, samples: n, seed };
    }
    let bits = bits.clamp(8, 60);
    let chunks = n.div_ceil(MC_CHUNK);
    let parts: Vec<[f64; 4]> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let len = MC_CHUNK.min(n - c * MC_CHUNK);
            let mut acc = [0.0; 4];
            for _ in 0..len {
                let x = sample_point(&ifs.f64_data, &mut rng, bits);
                let ph = std::f64::consts::TAU * (omega * x).rem_euclid(1.0);
                let (s, co) = ph.sin_cos();
                acc[0] += co;
                acc[1] += s;
                acc[2] += co * co;
                acc[3] += s * s;
            }
            acc
        })
        .collect();
    let mut t = [0.0; 4];
    for p in &parts {
        for k in 0..4 {
            t[k] += p[k];
        }
    }
    let nf = n as f64;
    let (mr, mi) = (t[0] / nf, t[1] / nf);
    let var = |sq: f64, m: f64| ((sq / nf - m * m).max(0.0) * nf / (nf - 1.0).max(1.0)).max(0.0);
    McEstimate {
        re: mr,
        im: mi,
        stderr_re: (var(t[2], mr) / nf).sqrt(),
        stderr_im: (var(t[3], mi) / nf).sqrt(),
        samples: n,
        seed,
    }
}

/// `n` log-spaced frequencies in `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}
