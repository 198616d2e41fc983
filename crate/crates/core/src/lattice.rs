//! Floating-point LLL reduction and short-vector enumeration for small dimensions.

/// A basis given by rows, reduced in place, with the unimodular transform
/// `reduced = transform · original`.
#[derive(Clone, Debug)]
pub struct Reduced {
    pub basis: Vec<Vec<f64>>,
    pub transform: Vec<Vec<i64>>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn gram_schmidt(b: &[Vec<f64>]) -> (Vec<Vec<f64>>, Vec<f64>) {
    let n = b.len();
    let mut star: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut mu = vec![vec![0.0; n]; n];
    let mut norms = vec![0.0; n];
    for i in 0..n {
        let mut v = b[i].clone();
        for j in 0..i {
            mu[i][j] = dot(&b[i], &star[j]) / norms[j];
            for (x, y) in v.iter_mut().zip(&star[j]) {
                *x -= mu[i][j] * y;
            }
        }
        norms[i] = dot(&v, &v);
        star.push(v);
    }
    (mu, norms)
}

/// LLL with parameter `3/4 < δ < 1`. Dimensions are expected to be tiny, so the
/// Gram–Schmidt data is simply recomputed after each change.
pub fn lll(basis: &[Vec<f64>], delta: f64) -> Reduced {
    let n = basis.len();
    let mut b = basis.to_vec();
    let mut u: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| (i == j) as i64).collect()).collect();
    let (mut mu, mut norms) = gram_schmidt(&b);
    let mut k = 1;
    let mut guard = 0u64;
    while k < n && guard < 1_000_000 {
        guard += 1;
        for j in (0..k).rev() {
            let q = mu[k][j].round();
            if q != 0.0 {
                let qi = q as i64;
                for t in 0..b[k].len() {
                    b[k][t] -= q * b[j][t];
                }
                for t in 0..n {
                    u[k][t] -= qi * u[j][t];
                }
                (mu, norms) = gram_schmidt(&b);
            }
        }
        if norms[k] >= (delta - mu[k][k - 1] * mu[k][k - 1]) * norms[k - 1] {
            k += 1;
        } else {
            b.swap(k, k - 1);
            u.swap(k, k - 1);
            (mu, norms) = gram_schmidt(&b);
            k = (k - 1).max(1);
        }
    }
    Reduced { basis: b, transform: u }
}

/// Outcome of [`enumerate`].
#[derive(Debug, PartialEq, Eq)]
pub enum Enumeration {
    Stopped,
    Finished,
    CapReached,
}

/// Visits every nonzero integer vector `x` with `|Σ x_i b_i|² ≤ bound`, in
/// reduced-basis coordinates. The visitor returns `true` to stop early.
pub fn enumerate(basis: &[Vec<f64>], bound: f64, cap: u64, mut visit: impl FnMut(&[i64]) -> bool) -> (Enumeration, u64) {
    let n = basis.len();
    let (mu, norms) = gram_schmidt(basis);
    let mut x = vec![0i64; n];
    let mut visited = 0u64;
    let mut stopped = false;
    fn rec(
        level: usize,
        partial: f64,
        x: &mut Vec<i64>,
        mu: &[Vec<f64>],
        norms: &[f64],
        bound: f64,
        cap: u64,
        visited: &mut u64,
        stopped: &mut bool,
        visit: &mut dyn FnMut(&[i64]) -> bool,
    ) {
        let n = x.len();
        let c: f64 = -(level + 1..n).map(|j| x[j] as f64 * mu[j][level]).sum::<f64>();
        let room = ((bound - partial) / norms[level]).max(0.0).sqrt();
        let lo = (c - room - 1e-9).ceil() as i64;
        let hi = (c + room + 1e-9).floor() as i64;
        for v in lo..=hi {
            if *stopped || *visited >= cap {
                return;
            }
            x[level] = v;
            let t = v as f64 - c;
            let p = partial + t * t * norms[level];
            if p > bound * (1.0 + 1e-12) {
                continue;
            }
            if level == 0 {
                if x.iter().any(|&e| e != 0) {
                    *visited += 1;
                    if visit(x) {
                        *stopped = true;
                    }
                }
            } else {
                rec(level - 1, p, x, mu, norms, bound, cap, visited, stopped, visit);
            }
        }
        x[level] = 0;
    }
    if n > 0 {
        rec(n - 1, 0.0, &mut x, &mu, &norms, bound, cap, &mut visited, &mut stopped, &mut visit);
    }
    let status = if stopped {
        Enumeration::Stopped
    } else if visited >= cap {
        Enumeration::CapReached
    } else {
        Enumeration::Finished
    };
    (status, visited)
}

/// Maps reduced-basis coordinates back to coordinates in the original basis.
pub fn to_original(transform: &[Vec<i64>], x: &[i64]) -> Vec<i64> {
    let n = transform.len();
    (0..n).map(|t| (0..n).map(|i| x[i] * transform[i][t]).sum()).collect()
}
