//! Renewal walks on the exponent lattice: exact hitting probabilities and
//! simulated stopped products of the weights `w_i`.

use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::ifs::Ifs;

const TRIAL_CHUNK: usize = 1024;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum RenewalError {
    #[error("InvalidWalk: {0}")]
    InvalidWalk(String),
    #[error("UnequalExponents: maps {0} and {1} have different ratios")]
    UnequalExponents(usize, usize),
    #[error("InvalidArgument: {0}")]
    InvalidArgument(String),
}

/// Step lengths with exact probabilities.
#[derive(Clone, Debug, PartialEq)]
pub struct WalkSpec {
    steps: Vec<u64>,
    probs: Vec<BigRational>,
}

impl WalkSpec {
    pub fn new(steps: Vec<u64>, probs: Vec<BigRational>) -> Result<Self, RenewalError> {
        if steps.is_empty() || steps.len() != probs.len() {
            return Err(RenewalError::InvalidWalk(format!(
                "{} steps and {} probabilities",
                steps.len(),
                probs.len()
            )));
        }
        if steps.iter().any(|&l| l == 0) {
            return Err(RenewalError::InvalidWalk("steps must be positive".into()));
        }
        if steps.iter().fold(0u64, |g, l| g.gcd(l)) != 1 {
            return Err(RenewalError::InvalidWalk("steps must have gcd 1".into()));
        }
        if probs.iter().any(|p| !p.is_positive()) {
            return Err(RenewalError::InvalidWalk("probabilities must be positive".into()));
        }
        if !probs.iter().sum::<BigRational>().is_one() {
            return Err(RenewalError::InvalidWalk("probabilities must sum to 1".into()));
        }
        Ok(WalkSpec { steps, probs })
    }

    /// The walk driven by maps `2..k` of `ifs`, where map 2 carries `p_1 + p_2`.
    /// `pair` names the two maps playing the roles of 1 and 2.
    pub fn merged(ifs: &Ifs, pair: (usize, usize)) -> Result<Self, RenewalError> {
        let (i, j) = check_pair(ifs, pair)?;
        let mut steps = vec![ifs.exponents()[j]];
        let mut probs = vec![&ifs.probs()[i] + &ifs.probs()[j]];
        for m in (0..ifs.len()).filter(|&m| m != i && m != j) {
            steps.push(ifs.exponents()[m]);
            probs.push(ifs.probs()[m].clone());
        }
        // merging can leave a common factor, e.g. exponents (1, 1, 2) become (1, 2)
        WalkSpec::new(steps, probs)
    }

    pub fn steps(&self) -> &[u64] {
        &self.steps
    }

    pub fn probs(&self) -> &[BigRational] {
        &self.probs
    }

    /// `E[l]`.
    pub fn mean_step(&self) -> BigRational {
        self.steps
            .iter()
            .zip(&self.probs)
            .map(|(l, p)| p * BigRational::from_integer((*l).into()))
            .sum()
    }

    fn cumulative(&self) -> Vec<f64> {
        let mut acc = 0.0;
        self.probs
            .iter()
            .map(|p| {
                acc += p.to_f64().unwrap_or(0.0);
                acc
            })
            .collect()
    }
}

fn check_pair(ifs: &Ifs, (i, j): (usize, usize)) -> Result<(usize, usize), RenewalError> {
    let k = ifs.len();
    if i >= k || j >= k || i == j {
        return Err(RenewalError::InvalidArgument(format!("pair ({}, {}) with {k} maps", i + 1, j + 1)));
    }
    if ifs.exponents()[i] != ifs.exponents()[j] {
        return Err(RenewalError::UnequalExponents(i + 1, j + 1));
    }
    Ok((i, j))
}

/// `P_k`, the probability that the walk from 0 visits `k`, for `k = 0..=k_max`.
pub fn hitting_probs(spec: &WalkSpec, k_max: usize) -> Vec<BigRational> {
    let mut p: Vec<BigRational> = Vec::with_capacity(k_max + 1);
    p.push(BigRational::one());
    for k in 1..=k_max {
        let mut s = BigRational::zero();
        for (l, q) in spec.steps.iter().zip(&spec.probs) {
            if let Some(prev) = k.checked_sub(*l as usize) {
                s += q * &p[prev];
            }
        }
        p.push(s);
    }
    p
}

fn chunked<R: Send>(n: usize, seed: u64, f: impl Fn(&mut ChaCha8Rng, usize) -> R + Sync) -> Vec<R> {
    let chunks = n.div_ceil(TRIAL_CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            f(&mut rng, TRIAL_CHUNK.min(n - c * TRIAL_CHUNK))
        })
        .collect()
}

fn draw(cum: &[f64], rng: &mut ChaCha8Rng) -> usize {
    let u: f64 = rng.random();
    cum.iter().position(|&c| u < c).unwrap_or(cum.len() - 1)
}

/// Empirical visit frequencies for `k = 0..=k_max` over `trials` simulated walks.
pub fn simulate_hits(spec: &WalkSpec, k_max: usize, trials: usize, seed: u64) -> Vec<f64> {
    let cum = spec.cumulative();
    let counts = chunked(trials, seed, |rng, len| {
        let mut c = vec![0u64; k_max + 1];
        for _ in 0..len {
            let mut y = 0usize;
            while y <= k_max {
                c[y] += 1;
                y += spec.steps[draw(&cum, rng)] as usize;
            }
        }
        c
    });
    let mut total = vec![0u64; k_max + 1];
    for c in counts {
        for (t, v) in total.iter_mut().zip(c) {
            *t += v;
        }
    }
    total.iter().map(|&v| v as f64 / trials.max(1) as f64).collect()
}

/// Mean and standard error of `W_{τ(t)}`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct StoppedEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub trials: usize,
    pub seed: u64,
    /// Largest `Y_{τ(t)}` seen; never above `t + max(l)`.
    pub max_overshoot: u64,
}

/// Simulates the merged walk `X_n = r^{Y_n} ω` until `Y_n ≥ t`, multiplying
/// `W` by `w_2(X_n) = |p_1 e(a_1 X_{n-1}) + p_2 e(a_2 X_{n-1})| / (p_1 + p_2)`
/// whenever the merged index is drawn.
pub fn simulate_stopped(
    ifs: &Ifs,
    pair: (usize, usize),
    omega: f64,
    t: u64,
    n_trials: usize,
    seed: u64,
) -> Result<StoppedEstimate, RenewalError> {
    if t < 1 {
        return Err(RenewalError::InvalidArgument("t must be at least 1".into()));
    }
    if n_trials < 1 {
        return Err(RenewalError::InvalidArgument("need at least one trial".into()));
    }
    let (i, j) = check_pair(ifs, pair)?;
    let spec = WalkSpec::merged(ifs, pair)?;
    let cum = spec.cumulative();
    let r = ifs.r().to_f64();
    let (a1, a2) = (ifs.translations()[i].to_f64(), ifs.translations()[j].to_f64());
    let (p1, p2) = (ifs.probs()[i].to_f64().unwrap_or(0.0), ifs.probs()[j].to_f64().unwrap_or(0.0));
    let (q1, q2) = (p1 / (p1 + p2), p2 / (p1 + p2));
    let lmax = *spec.steps.iter().max().expect("nonempty walk");
    let w2 = |x: f64| {
        let (s1, c1) = (std::f64::consts::TAU * (a1 * x).rem_euclid(1.0)).sin_cos();
        let (s2, c2) = (std::f64::consts::TAU * (a2 * x).rem_euclid(1.0)).sin_cos();
        (q1 * c1 + q2 * c2).hypot(q1 * s1 + q2 * s2)
    };
    let parts = chunked(n_trials, seed, |rng, len| {
        let (mut s, mut s2, mut over) = (0.0, 0.0, 0u64);
        for _ in 0..len {
            let mut y = 0u64;
            let mut w = 1.0;
            while y < t {
                let idx = draw(&cum, rng);
                if idx == 0 {
                    w *= w2(r.powi(y as i32) * omega);
                }
                y += spec.steps[idx];
            }
            assert!(y <= t + lmax, "overshoot beyond the largest step");
            over = over.max(y);
            s += w;
            s2 += w * w;
        }
        (s, s2, over)
    });
    let (mut s, mut s2, mut over) = (0.0, 0.0, 0);
    for (a, b, o) in parts {
        s += a;
        s2 += b;
        over = over.max(o);
    }
    let n = n_trials as f64;
    let mean = s / n;
    let var = if n_trials > 1 { ((s2 / n - mean * mean) * n / (n - 1.0)).max(0.0) } else { 0.0 };
    Ok(StoppedEstimate {
        mean,
        stderr: (var / n).sqrt(),
        trials: n_trials,
        seed,
        max_overshoot: over,
    })
}
