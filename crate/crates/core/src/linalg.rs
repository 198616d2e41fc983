//! Exact linear algebra over the rationals.

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::poly::RatPoly;

pub type RatMatrix = Vec<Vec<BigRational>>;

/// Determinant by fraction-free-ish Gaussian elimination over Q.
pub fn determinant(mut m: RatMatrix) -> BigRational {
    let n = m.len();
    let mut det = BigRational::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return BigRational::zero();
        };
        if piv != col {
            m.swap(piv, col);
            det = -det;
        }
        let p = m[col][col].clone();
        det *= &p;
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let f = &m[r][col] / &p;
            for c in col..n {
                let v = &f * &m[col][c];
                m[r][c] -= v;
            }
        }
    }
    det
}

/// Solves `A x = b`; `None` when the system is inconsistent. Free variables are set to zero.
pub fn solve(a: &RatMatrix, b: &[BigRational]) -> Option<Vec<BigRational>> {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut m: RatMatrix = a
        .iter()
        .zip(b)
        .map(|(row, v)| {
            let mut r = row.clone();
            r.push(v.clone());
            r
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(piv) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(piv, r);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..=cols {
                    let v = &f * &m[r][j];
                    m[i][j] -= v;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    if m[r..].iter().any(|row| !row[cols].is_zero()) {
        return None;
    }
    let mut x = vec![BigRational::zero(); cols];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = m[i][cols].clone();
    }
    Some(x)
}

/// Characteristic polynomial `det(xI - M)` by the Faddeev–LeVerrier recursion.
pub fn charpoly(m: &RatMatrix) -> RatPoly {
    let n = m.len();
    let mut coeffs = vec![BigRational::zero(); n + 1];
    coeffs[n] = BigRational::one();
    // M_k = M (M_{k-1} + c_{n-k+1} I), c_{n-k} = -tr(M_k)/k
    let mut mk: RatMatrix = vec![vec![BigRational::zero(); n]; n];
    for k in 1..=n {
        let mut prev = mk.clone();
        for (i, row) in prev.iter_mut().enumerate() {
            row[i] += &coeffs[n - k + 1];
        }
        mk = matmul(m, &prev);
        let tr: BigRational = (0..n).map(|i| mk[i][i].clone()).sum();
        coeffs[n - k] = -tr / BigRational::from_integer((k as i64).into());
    }
    RatPoly::new(coeffs)
}

pub fn matmul(a: &RatMatrix, b: &RatMatrix) -> RatMatrix {
    let n = a.len();
    let k = b.len();
    let m = if k == 0 { 0 } else { b[0].len() };
    let mut out = vec![vec![BigRational::zero(); m]; n];
    for i in 0..n {
        for l in 0..k {
            if a[i][l].is_zero() {
                continue;
            }
            for j in 0..m {
                let v = &a[i][l] * &b[l][j];
                out[i][j] += v;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::IntPoly;

    fn q(v: i64) -> BigRational {
        BigRational::from_integer(v.into())
    }

    #[test]
    fn det_and_solve() {
        let a = vec![vec![q(2), q(1)], vec![q(1), q(3)]];
        assert_eq!(determinant(a.clone()), q(5));
        let x = solve(&a, &[q(3), q(4)]).unwrap();
        assert_eq!(x, vec![q(1), q(1)]);
        let sing = vec![vec![q(1), q(2)], vec![q(2), q(4)]];
        assert!(solve(&sing, &[q(1), q(3)]).is_none());
        assert!(solve(&sing, &[q(1), q(2)]).is_some());
    }

    #[test]
    fn companion_charpoly() {
        // companion of x^2 - x - 1
        let m = vec![vec![q(0), q(1)], vec![q(1), q(1)]];
        let p = charpoly(&m);
        assert_eq!(p, RatPoly::from_int(&IntPoly::from_i64(&[-1, -1, 1])));
    }
}
