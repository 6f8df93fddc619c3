//! Small dense linear-algebra kernels: Cholesky factorization, SPD solves
//! and a Jacobi eigendecomposition for symmetric matrices.
//!
//! The systems solved in this crate are either small (K x K normal equations
//! with K below ten) or moderate SPD systems (p x p ridge systems with p in
//! the low hundreds), so plain textbook kernels are sufficient.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};

/// Relative threshold below which an eigenvalue is treated as zero when
/// forming a pseudo-inverse.
const PINV_TOLERANCE: f64 = 1e-10;

/// Lower-triangular Cholesky factor of a symmetric positive-definite matrix.
///
/// Returns `None` when a non-positive pivot is encountered, i.e. the matrix
/// is not (numerically) positive definite.
pub fn cholesky(a: &Array2<f64>) -> Option<Array2<f64>> {
    let n = a.nrows();
    debug_assert_eq!(n, a.ncols());
    let mut l = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        for j in 0..=i {
            let mut sum = a[[i, j]];
            for k in 0..j {
                sum -= l[[i, k]] * l[[j, k]];
            }
            if i == j {
                if sum <= 0.0 || !sum.is_finite() {
                    return None;
                }
                l[[i, i]] = sum.sqrt();
            } else {
                l[[i, j]] = sum / l[[j, j]];
            }
        }
    }
    Some(l)
}

/// Solves `L L^T x = b` given the lower-triangular Cholesky factor `L`.
pub fn cholesky_solve(l: &Array2<f64>, b: &Array1<f64>) -> Array1<f64> {
    let n = l.nrows();
    let mut y = Array1::<f64>::zeros(n);
    for i in 0..n {
        let mut sum = b[i];
        for k in 0..i {
            sum -= l[[i, k]] * y[k];
        }
        y[i] = sum / l[[i, i]];
    }
    let mut x = Array1::<f64>::zeros(n);
    for i in (0..n).rev() {
        let mut sum = y[i];
        for k in (i + 1)..n {
            sum -= l[[k, i]] * x[k];
        }
        x[i] = sum / l[[i, i]];
    }
    x
}

/// Solves the SPD system `a x = b` via Cholesky.
pub fn solve_spd(a: &Array2<f64>, b: &Array1<f64>) -> Result<Array1<f64>> {
    let l = cholesky(a).ok_or(Error::SingularSystem)?;
    Ok(cholesky_solve(&l, b))
}

/// Eigendecomposition of a symmetric matrix by the cyclic Jacobi method.
///
/// Returns `(eigenvalues, eigenvectors)` with eigenvectors in columns, so
/// `a = V diag(w) V^T`.
pub fn sym_eigen(a: &Array2<f64>) -> (Array1<f64>, Array2<f64>) {
    let n = a.nrows();
    debug_assert_eq!(n, a.ncols());
    let mut m = a.clone();
    let mut v = Array2::<f64>::eye(n);
    for _sweep in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += m[[i, j]] * m[[i, j]];
            }
        }
        if off.sqrt() < 1e-14 * (1.0 + m.diag().iter().map(|x| x.abs()).fold(0.0, f64::max)) {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if m[[p, q]].abs() < 1e-300 {
                    continue;
                }
                let theta = (m[[q, q]] - m[[p, p]]) / (2.0 * m[[p, q]]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[[k, p]];
                    let mkq = m[[k, q]];
                    m[[k, p]] = c * mkp - s * mkq;
                    m[[k, q]] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[[p, k]];
                    let mqk = m[[q, k]];
                    m[[p, k]] = c * mpk - s * mqk;
                    m[[q, k]] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[[k, p]];
                    let vkq = v[[k, q]];
                    v[[k, p]] = c * vkp - s * vkq;
                    v[[k, q]] = s * vkp + c * vkq;
                }
            }
        }
    }
    (m.diag().to_owned(), v)
}

/// Minimum-norm solution of the symmetric system `a x = b` via the
/// eigenvalue pseudo-inverse. Used as the rank-deficient fallback for
/// normal equations.
pub fn pinv_solve_sym(a: &Array2<f64>, b: &Array1<f64>) -> Array1<f64> {
    let (w, v) = sym_eigen(a);
    let wmax = w.iter().map(|x| x.abs()).fold(0.0, f64::max);
    let tol = PINV_TOLERANCE * wmax.max(1e-300);
    let n = a.nrows();
    let mut x = Array1::<f64>::zeros(n);
    for k in 0..n {
        if w[k].abs() > tol {
            let coeff = v.column(k).dot(b) / w[k];
            for i in 0..n {
                x[i] += coeff * v[[i, k]];
            }
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn cholesky_solves_spd_system() {
        let a = array![[4.0, 2.0, 0.6], [2.0, 5.0, 1.0], [0.6, 1.0, 3.0]];
        let b = array![1.0, -2.0, 0.5];
        let x = solve_spd(&a, &b).unwrap();
        let r = a.dot(&x) - &b;
        assert!(r.iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let a = array![[1.0, 2.0], [2.0, 1.0]];
        assert!(cholesky(&a).is_none());
    }

    #[test]
    fn jacobi_recovers_known_spectrum() {
        // diag(1, 3) rotated by 45 degrees
        let a = array![[2.0, 1.0], [1.0, 2.0]];
        let (w, v) = sym_eigen(&a);
        let mut evs: Vec<f64> = w.to_vec();
        evs.sort_by(|x, y| x.partial_cmp(y).unwrap());
        assert!((evs[0] - 1.0).abs() < 1e-12);
        assert!((evs[1] - 3.0).abs() < 1e-12);
        // reconstruction
        let mut rec = Array2::<f64>::zeros((2, 2));
        for k in 0..2 {
            for i in 0..2 {
                for j in 0..2 {
                    rec[[i, j]] += w[k] * v[[i, k]] * v[[j, k]];
                }
            }
        }
        for i in 0..2 {
            for j in 0..2 {
                assert!((rec[[i, j]] - a[[i, j]]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn pinv_gives_minimum_norm_solution() {
        // rank-1 system: a = c c^T with c = (1, 2); b in range
        let a = array![[1.0, 2.0], [2.0, 4.0]];
        let b = array![1.0, 2.0];
        let x = pinv_solve_sym(&a, &b);
        let r = a.dot(&x) - &b;
        assert!(r.iter().all(|v| v.abs() < 1e-10));
        // minimum-norm solution is c / 5
        assert!((x[0] - 0.2).abs() < 1e-10);
        assert!((x[1] - 0.4).abs() < 1e-10);
    }
}
