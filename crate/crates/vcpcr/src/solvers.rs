//! Penalized and unpenalized linear/logistic solvers.
//!
//! These back three things: the supervision-weight fits (lasso or ridge
//! coefficients on the full predictor matrix), the second-stage model on the
//! cluster latent variables, and the baseline methods.
//!
//! Conventions, fixed once for the whole crate:
//! - lasso objective: (1/(2n)) ||y - Xb||^2 + delta ||b||_1
//! - ridge normal equations: (X^T X + 2 n delta I) b = X^T y
//! so lasso and ridge delta grids live on comparable scales.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::linalg;

const CD_TOL: f64 = 1e-8;
const CD_MAX_SWEEPS: usize = 10_000;
const IRLS_MAX_ITER: usize = 100;
const IRLS_GRAD_TOL: f64 = 1e-6;
const IRLS_MAX_HALVINGS: usize = 20;
const SEPARATION_CAP: f64 = 1e4;

/// Penalty attached to a linear fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Penalty {
    None,
    Lasso(f64),
    Ridge(f64),
}

/// Result of a linear fit (OLS, lasso or ridge).
#[derive(Debug, Clone)]
pub struct LinearFit {
    pub coefficients: Array1<f64>,
    /// Zero when inputs are centered; kept for interface symmetry.
    pub intercept: f64,
    pub penalty: Penalty,
    /// Final objective value under the penalty's convention.
    pub loss: f64,
    /// Set when the normal equations were rank deficient and the
    /// minimum-norm solution was returned instead.
    pub rank_deficient: bool,
}

/// Result of a logistic fit.
#[derive(Debug, Clone)]
pub struct LogisticFit {
    pub coefficients: Array1<f64>,
    pub intercept: f64,
    pub converged: bool,
    pub iterations: usize,
    /// Set when the coefficient norm hit the separation cap.
    pub separation: bool,
}

impl LogisticFit {
    /// Class-1 probabilities for rows of `m`.
    pub fn predict_proba(&self, m: &Array2<f64>) -> Array1<f64> {
        let eta = m.dot(&self.coefficients) + self.intercept;
        eta.mapv(sigmoid)
    }
}

pub fn soft_threshold(z: f64, delta: f64) -> f64 {
    if z > delta {
        z - delta
    } else if z < -delta {
        z + delta
    } else {
        0.0
    }
}

fn sigmoid(eta: f64) -> f64 {
    if eta >= 0.0 {
        1.0 / (1.0 + (-eta).exp())
    } else {
        let e = eta.exp();
        e / (1.0 + e)
    }
}

/// log(1 + exp(eta)) without overflow.
fn log1p_exp(eta: f64) -> f64 {
    if eta > 0.0 {
        eta + (-eta).exp().ln_1p()
    } else {
        eta.exp().ln_1p()
    }
}

/// Ordinary least squares on a small design (the second-stage latent matrix).
///
/// Falls back to the minimum-norm solution when the normal equations are
/// rank deficient, flagging the fit.
pub fn ols_fit(m: &Array2<f64>, y: &Array1<f64>) -> Result<LinearFit> {
    let (n, _k) = m.dim();
    if y.len() != n {
        return Err(Error::LengthMismatch { left: y.len(), right: n });
    }
    let gram = m.t().dot(m);
    let rhs = m.t().dot(y);
    let (coefficients, rank_deficient) = match linalg::cholesky(&gram) {
        Some(l) => (linalg::cholesky_solve(&l, &rhs), false),
        None => (linalg::pinv_solve_sym(&gram, &rhs), true),
    };
    let resid = y - &m.dot(&coefficients);
    let loss = resid.dot(&resid) / (2.0 * n as f64);
    Ok(LinearFit { coefficients, intercept: 0.0, penalty: Penalty::None, loss, rank_deficient })
}

fn lasso_objective(resid: &Array1<f64>, b: &Array1<f64>, delta: f64, n: f64) -> f64 {
    resid.dot(resid) / (2.0 * n) + delta * b.iter().map(|v| v.abs()).sum::<f64>()
}

/// The smallest delta at which the lasso solution is identically zero:
/// max_j |x_j^T y| / n.
pub fn lasso_delta_max(x: &Array2<f64>, y: &Array1<f64>) -> f64 {
    let n = x.nrows() as f64;
    let grad = x.t().dot(y);
    grad.iter().map(|v| v.abs() / n).fold(0.0, f64::max)
}

/// Lasso by cyclical coordinate descent, warm-started from `b0` when given.
///
/// Columns of `x` must be centered (the usual standardized-input case); the
/// update uses the exact per-column scale, so unit variance is not required.
pub fn lasso_fit_warm(
    x: &Array2<f64>,
    y: &Array1<f64>,
    delta: f64,
    b0: Option<&Array1<f64>>,
) -> Result<LinearFit> {
    let (n_usize, p) = x.dim();
    let n = n_usize as f64;
    if delta < 0.0 {
        return Err(Error::InvalidParameter("delta must be nonnegative".into()));
    }
    let mut b = match b0 {
        Some(init) => init.clone(),
        None => Array1::zeros(p),
    };
    let mut resid = y - &x.dot(&b);
    let col_sq: Vec<f64> = (0..p).map(|j| x.column(j).dot(&x.column(j))).collect();
    let mut obj = lasso_objective(&resid, &b, delta, n);
    for _sweep in 0..CD_MAX_SWEEPS {
        let mut max_step: f64 = 0.0;
        for j in 0..p {
            if col_sq[j] == 0.0 {
                continue;
            }
            let old = b[j];
            let z = (x.column(j).dot(&resid) + col_sq[j] * old) / n;
            let new = soft_threshold(z, delta) * n / col_sq[j];
            if new != old {
                let diff = old - new;
                resid.scaled_add(diff, &x.column(j));
                b[j] = new;
                max_step = max_step.max(diff.abs());
            }
        }
        let new_obj = lasso_objective(&resid, &b, delta, n);
        assert!(
            new_obj <= obj + 1e-10 * (1.0 + obj.abs()),
            "lasso objective increased within a sweep: {obj} -> {new_obj}"
        );
        let change = (obj - new_obj).abs() / (1.0 + obj.abs());
        obj = new_obj;
        // the objective is flat near the optimum, so also require the
        // coefficients themselves to have settled
        if change < CD_TOL && max_step < 1e-9 {
            return Ok(LinearFit {
                coefficients: b,
                intercept: 0.0,
                penalty: Penalty::Lasso(delta),
                loss: obj,
                rank_deficient: false,
            });
        }
    }
    Err(Error::MaxIterations(CD_MAX_SWEEPS))
}

pub fn lasso_fit(x: &Array2<f64>, y: &Array1<f64>, delta: f64) -> Result<LinearFit> {
    lasso_fit_warm(x, y, delta, None)
}

/// Lasso solutions along a decreasing delta path, each warm-started from the
/// previous one. Returns fits in the order of `deltas`.
pub fn lasso_path(x: &Array2<f64>, y: &Array1<f64>, deltas: &[f64]) -> Result<Vec<LinearFit>> {
    let mut fits = Vec::with_capacity(deltas.len());
    let mut warm: Option<Array1<f64>> = None;
    for &d in deltas {
        let fit = lasso_fit_warm(x, y, d, warm.as_ref())?;
        warm = Some(fit.coefficients.clone());
        fits.push(fit);
    }
    Ok(fits)
}

/// Ridge regression: solves (X^T X + 2 n delta I) b = X^T y.
pub fn ridge_fit(x: &Array2<f64>, y: &Array1<f64>, delta: f64) -> Result<LinearFit> {
    let (n_usize, p) = x.dim();
    let n = n_usize as f64;
    if delta < 0.0 {
        return Err(Error::InvalidParameter("delta must be nonnegative".into()));
    }
    let mut gram = x.t().dot(x);
    for j in 0..p {
        gram[[j, j]] += 2.0 * n * delta;
    }
    let rhs = x.t().dot(y);
    let l = linalg::cholesky(&gram).ok_or(Error::SingularSystem)?;
    let coefficients = linalg::cholesky_solve(&l, &rhs);
    let resid = y - &x.dot(&coefficients);
    let loss = resid.dot(&resid) / (2.0 * n) + delta * coefficients.dot(&coefficients);
    Ok(LinearFit {
        coefficients,
        intercept: 0.0,
        penalty: Penalty::Ridge(delta),
        loss,
        rank_deficient: false,
    })
}

fn check_binary_two_class(y: &Array1<f64>) -> Result<()> {
    if y.iter().any(|&v| v != 0.0 && v != 1.0) {
        return Err(Error::InvalidParameter("classification response must be 0/1".into()));
    }
    let ones = y.iter().filter(|&&v| v == 1.0).count();
    if ones == 0 || ones == y.len() {
        return Err(Error::SingleClassResponse);
    }
    Ok(())
}

fn nll(eta: &Array1<f64>, y: &Array1<f64>) -> f64 {
    eta.iter().zip(y.iter()).map(|(&e, &yi)| log1p_exp(e) - yi * e).sum()
}

/// Unpenalized logistic regression with an explicit intercept, fit by
/// iteratively reweighted least squares with step halving.
pub fn logistic_fit(m: &Array2<f64>, y: &Array1<f64>) -> Result<LogisticFit> {
    let (n, k) = m.dim();
    if y.len() != n {
        return Err(Error::LengthMismatch { left: y.len(), right: n });
    }
    check_binary_two_class(y)?;

    // coef layout: [intercept, slopes...]
    let q = k + 1;
    let mut coef = Array1::<f64>::zeros(q);
    let ybar = y.sum() / n as f64;
    coef[0] = (ybar / (1.0 - ybar)).ln();

    let eta_of = |c: &Array1<f64>| -> Array1<f64> {
        let slopes = c.slice(ndarray::s![1..]).to_owned();
        m.dot(&slopes) + c[0]
    };
    let mut eta = eta_of(&coef);
    let mut cur_nll = nll(&eta, y);
    let mut converged = false;
    let mut separation = false;
    let mut iterations = 0;

    for it in 0..IRLS_MAX_ITER {
        iterations = it + 1;
        let pi = eta.mapv(sigmoid);
        // gradient of the NLL wrt [intercept, slopes]
        let resid = &pi - y;
        let mut grad = Array1::<f64>::zeros(q);
        grad[0] = resid.sum();
        for j in 0..k {
            grad[j + 1] = m.column(j).dot(&resid);
        }
        if grad.iter().map(|v| v.abs()).fold(0.0, f64::max) <= IRLS_GRAD_TOL {
            converged = true;
            break;
        }
        let w = pi.mapv(|p| (p * (1.0 - p)).max(1e-10));
        // Hessian = Z^T W Z with Z = [1 | M]
        let mut hess = Array2::<f64>::zeros((q, q));
        hess[[0, 0]] = w.sum();
        for j in 0..k {
            let hw = m.column(j).dot(&w);
            hess[[0, j + 1]] = hw;
            hess[[j + 1, 0]] = hw;
            for l in j..k {
                let mut s = 0.0;
                for i in 0..n {
                    s += m[[i, j]] * w[i] * m[[i, l]];
                }
                hess[[j + 1, l + 1]] = s;
                hess[[l + 1, j + 1]] = s;
            }
        }
        for d in 0..q {
            hess[[d, d]] += 1e-12;
        }
        let step = match linalg::cholesky(&hess) {
            Some(l) => linalg::cholesky_solve(&l, &grad),
            None => linalg::pinv_solve_sym(&hess, &grad),
        };
        // step halving keeps the NLL non-increasing
        let mut scale = 1.0;
        let mut accepted = false;
        for _ in 0..=IRLS_MAX_HALVINGS {
            let trial = &coef - &(step.mapv(|v| v * scale));
            let trial_eta = eta_of(&trial);
            let trial_nll = nll(&trial_eta, y);
            if trial_nll <= cur_nll + 1e-12 * (1.0 + cur_nll.abs()) {
                coef = trial;
                eta = trial_eta;
                assert!(
                    trial_nll <= cur_nll + 1e-10 * (1.0 + cur_nll.abs()),
                    "IRLS negative log-likelihood increased"
                );
                cur_nll = trial_nll;
                accepted = true;
                break;
            }
            scale *= 0.5;
        }
        if !accepted {
            break;
        }
        let norm = coef.dot(&coef).sqrt();
        if norm > SEPARATION_CAP {
            separation = true;
            break;
        }
    }

    Ok(LogisticFit {
        coefficients: coef.slice(ndarray::s![1..]).to_owned(),
        intercept: coef[0],
        converged,
        iterations,
        separation,
    })
}

/// Ridge-penalized logistic regression: (1/n) NLL + delta ||b||^2 with an
/// unpenalized intercept. Used for classification supervision weights.
pub fn logistic_ridge_fit(x: &Array2<f64>, y: &Array1<f64>, delta: f64) -> Result<LogisticFit> {
    let (n_usize, p) = x.dim();
    let n = n_usize as f64;
    check_binary_two_class(y)?;
    let q = p + 1;
    let mut coef = Array1::<f64>::zeros(q);
    let ybar = y.sum() / n;
    coef[0] = (ybar / (1.0 - ybar)).ln();

    let objective = |c: &Array1<f64>| -> (Array1<f64>, f64) {
        let slopes = c.slice(ndarray::s![1..]).to_owned();
        let eta = x.dot(&slopes) + c[0];
        let pen = delta * slopes.dot(&slopes);
        let val = nll(&eta, y) / n + pen;
        (eta, val)
    };
    let (mut eta, mut cur) = objective(&coef);
    let mut converged = false;
    let mut separation = false;
    let mut iterations = 0;

    for it in 0..(2 * IRLS_MAX_ITER) {
        iterations = it + 1;
        let pi = eta.mapv(sigmoid);
        let resid = (&pi - y).mapv(|v| v / n);
        let mut grad = Array1::<f64>::zeros(q);
        grad[0] = resid.sum();
        for j in 0..p {
            grad[j + 1] = x.column(j).dot(&resid) + 2.0 * delta * coef[j + 1];
        }
        if grad.iter().map(|v| v.abs()).fold(0.0, f64::max) <= 1e-8 {
            converged = true;
            break;
        }
        let w = pi.mapv(|v| (v * (1.0 - v)).max(1e-10) / n);
        let mut hess = Array2::<f64>::zeros((q, q));
        hess[[0, 0]] = w.sum();
        for j in 0..p {
            let hw = x.column(j).dot(&w);
            hess[[0, j + 1]] = hw;
            hess[[j + 1, 0]] = hw;
            for l in j..p {
                let mut s = 0.0;
                for i in 0..n_usize {
                    s += x[[i, j]] * w[i] * x[[i, l]];
                }
                hess[[j + 1, l + 1]] = s;
                hess[[l + 1, j + 1]] = s;
            }
            hess[[j + 1, j + 1]] += 2.0 * delta;
        }
        for d in 0..q {
            hess[[d, d]] += 1e-12;
        }
        let step = match linalg::cholesky(&hess) {
            Some(l) => linalg::cholesky_solve(&l, &grad),
            None => linalg::pinv_solve_sym(&hess, &grad),
        };
        let mut scale = 1.0;
        let mut accepted = false;
        for _ in 0..=IRLS_MAX_HALVINGS {
            let trial = &coef - &(step.mapv(|v| v * scale));
            let (trial_eta, trial_obj) = objective(&trial);
            if trial_obj <= cur + 1e-12 * (1.0 + cur.abs()) {
                coef = trial;
                eta = trial_eta;
                cur = trial_obj;
                accepted = true;
                break;
            }
            scale *= 0.5;
        }
        if !accepted {
            break;
        }
        if coef.dot(&coef).sqrt() > SEPARATION_CAP {
            separation = true;
            break;
        }
    }

    Ok(LogisticFit {
        coefficients: coef.slice(ndarray::s![1..]).to_owned(),
        intercept: coef[0],
        converged,
        iterations,
        separation,
    })
}

/// The smallest delta at which the lasso-penalized logistic solution has all
/// zero slopes: max_j |x_j^T (y - mean(y))| / n.
pub fn logistic_lasso_delta_max(x: &Array2<f64>, y: &Array1<f64>) -> f64 {
    let n = x.nrows() as f64;
    let ybar = y.sum() / n;
    let centered = y.mapv(|v| v - ybar);
    let grad = x.t().dot(&centered);
    grad.iter().map(|v| v.abs() / n).fold(0.0, f64::max)
}

/// Lasso-penalized logistic regression: (1/n) NLL + delta ||b||_1 with an
/// unpenalized intercept, solved by IRLS with coordinate descent on the
/// weighted working response.
pub fn logistic_lasso_fit(x: &Array2<f64>, y: &Array1<f64>, delta: f64) -> Result<LogisticFit> {
    let (n_usize, p) = x.dim();
    let n = n_usize as f64;
    check_binary_two_class(y)?;
    let mut b = Array1::<f64>::zeros(p);
    let ybar = y.sum() / n;
    let mut intercept = (ybar / (1.0 - ybar)).ln();
    let mut converged = false;
    let mut separation = false;
    let mut iterations = 0;

    for it in 0..IRLS_MAX_ITER {
        iterations = it + 1;
        let eta = x.dot(&b) + intercept;
        let pi = eta.mapv(sigmoid);
        let w = pi.mapv(|v| (v * (1.0 - v)).max(1e-5));
        // working response for the quadratic approximation
        let z: Array1<f64> =
            (0..n_usize).map(|i| eta[i] + (y[i] - pi[i]) / w[i]).collect::<Vec<_>>().into();
        let w_sum = w.sum();
        let wx_sq: Vec<f64> = (0..p)
            .map(|j| (0..n_usize).map(|i| w[i] * x[[i, j]] * x[[i, j]]).sum())
            .collect();
        let mut resid = &z - &x.dot(&b) - intercept;
        let mut max_delta_coef: f64 = 0.0;
        for _sweep in 0..500 {
            let mut sweep_max: f64 = 0.0;
            // intercept update
            let num: f64 = (0..n_usize).map(|i| w[i] * resid[i]).sum();
            let shift = num / w_sum;
            if shift != 0.0 {
                intercept += shift;
                resid.mapv_inplace(|v| v - shift);
                sweep_max = sweep_max.max(shift.abs());
            }
            for j in 0..p {
                if wx_sq[j] == 0.0 {
                    continue;
                }
                let old = b[j];
                let zj: f64 =
                    (0..n_usize).map(|i| w[i] * x[[i, j]] * resid[i]).sum::<f64>() / n + wx_sq[j] * old / n;
                let new = soft_threshold(zj, delta) * n / wx_sq[j];
                if new != old {
                    for i in 0..n_usize {
                        resid[i] += x[[i, j]] * (old - new);
                    }
                    b[j] = new;
                    sweep_max = sweep_max.max((new - old).abs());
                }
            }
            max_delta_coef = sweep_max;
            if sweep_max < 1e-9 {
                break;
            }
        }
        if max_delta_coef < 1e-7 {
            converged = true;
            break;
        }
        if b.dot(&b).sqrt() > SEPARATION_CAP {
            separation = true;
            break;
        }
    }

    Ok(LogisticFit { coefficients: b, intercept, converged, iterations, separation })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::standardize;
    use ndarray::{array, Array};
    use rand::Rng;

    fn random_standardized(n: usize, p: usize, seed: u64) -> Array2<f64> {
        let mut rng = crate::rng::stream_rng(seed, &[11]);
        let x = Array::from_shape_fn((n, p), |_| rng.random_range(-2.0..2.0));
        standardize(&x).unwrap().values
    }

    #[test]
    fn ols_single_column_equal_to_response() {
        let y = array![1.0, -2.0, 0.5, 3.0];
        let m = y.clone().insert_axis(ndarray::Axis(1));
        let fit = ols_fit(&m, &y).unwrap();
        assert!((fit.coefficients[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ols_orthogonal_response_gives_zero() {
        let m = array![[1.0], [1.0], [-1.0], [-1.0]];
        let y = array![1.0, -1.0, 1.0, -1.0];
        let fit = ols_fit(&m, &y).unwrap();
        assert!(fit.coefficients[0].abs() < 1e-12);
    }

    #[test]
    fn ols_matches_explicit_normal_equation_solve() {
        // independent oracle: 2x2 inverse written out by hand
        let m = array![[1.0, 0.5], [2.0, -1.0], [0.0, 1.5], [-1.0, 0.3]];
        let y = array![0.7, -0.2, 1.1, 0.4];
        let fit = ols_fit(&m, &y).unwrap();
        let g00 = m.column(0).dot(&m.column(0));
        let g01 = m.column(0).dot(&m.column(1));
        let g11 = m.column(1).dot(&m.column(1));
        let r0 = m.column(0).dot(&y);
        let r1 = m.column(1).dot(&y);
        let det = g00 * g11 - g01 * g01;
        let a0 = (g11 * r0 - g01 * r1) / det;
        let a1 = (-g01 * r0 + g00 * r1) / det;
        assert!((fit.coefficients[0] - a0).abs() < 1e-10);
        assert!((fit.coefficients[1] - a1).abs() < 1e-10);
        // residual orthogonal to design
        let resid = &y - &m.dot(&fit.coefficients);
        assert!(m.column(0).dot(&resid).abs() < 1e-8);
        assert!(m.column(1).dot(&resid).abs() < 1e-8);
    }

    #[test]
    fn ols_rank_deficient_falls_back_to_min_norm() {
        let c = array![1.0, 2.0, -1.0, 0.0];
        let mut m = Array2::<f64>::zeros((4, 2));
        m.column_mut(0).assign(&c);
        m.column_mut(1).assign(&c); // duplicated column
        let y = array![1.0, 2.0, -1.0, 0.0];
        let fit = ols_fit(&m, &y).unwrap();
        assert!(fit.rank_deficient);
        // min-norm solution splits the unit coefficient between the twins
        assert!((fit.coefficients[0] - 0.5).abs() < 1e-8);
        assert!((fit.coefficients[1] - 0.5).abs() < 1e-8);
    }

    #[test]
    fn lasso_zero_above_delta_max() {
        let x = random_standardized(20, 5, 3);
        let y = x.column(0).to_owned() + 0.5 * &x.column(1);
        let dmax = lasso_delta_max(&x, &y);
        for mult in [1.0, 1.5, 4.0] {
            let fit = lasso_fit(&x, &y, dmax * mult).unwrap();
            assert!(fit.coefficients.iter().all(|&v| v == 0.0), "mult={mult}");
        }
        // just below the threshold something enters
        let fit = lasso_fit(&x, &y, dmax * 0.99).unwrap();
        assert!(fit.coefficients.iter().any(|&v| v != 0.0));
    }

    #[test]
    fn lasso_with_zero_penalty_matches_ols() {
        let x = random_standardized(30, 4, 7);
        let mut rng = crate::rng::stream_rng(7, &[12]);
        let y: Array1<f64> =
            (0..30).map(|i| x[[i, 0]] - 0.3 * x[[i, 2]] + 0.01 * rng.random_range(-1.0..1.0)).collect::<Vec<_>>().into();
        let lasso = lasso_fit(&x, &y, 0.0).unwrap();
        let ols = ols_fit(&x, &y).unwrap();
        for j in 0..4 {
            assert!((lasso.coefficients[j] - ols.coefficients[j]).abs() < 1e-6);
        }
    }

    #[test]
    fn lasso_single_predictor_closed_form() {
        let x = random_standardized(15, 1, 9);
        let y = 0.8 * &x.column(0).to_owned();
        let n = 15.0;
        let z = x.column(0).dot(&y) / n;
        let xx = x.column(0).dot(&x.column(0));
        for delta in [0.0, 0.1, 0.3, z.abs() * 0.9] {
            let fit = lasso_fit(&x, &y, delta).unwrap();
            let expect = soft_threshold(z, delta) * n / xx;
            assert!(
                (fit.coefficients[0] - expect).abs() < 1e-10,
                "delta={delta}: {} vs {}",
                fit.coefficients[0],
                expect
            );
        }
    }

    #[test]
    fn lasso_path_is_warm_started_and_consistent() {
        let x = random_standardized(25, 6, 21);
        let y = x.column(0).to_owned() - &x.column(3);
        let dmax = lasso_delta_max(&x, &y);
        let deltas: Vec<f64> = (0..6).map(|i| dmax * 0.8f64.powi(i)).collect();
        let path = lasso_path(&x, &y, &deltas).unwrap();
        for (fit, &d) in path.iter().zip(&deltas) {
            let cold = lasso_fit(&x, &y, d).unwrap();
            for j in 0..6 {
                assert!((fit.coefficients[j] - cold.coefficients[j]).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn ridge_orthonormal_closed_form() {
        // two orthogonal columns with x^T x = n - 1
        let half = 3.0f64.sqrt() / 2.0;
        let x = array![
            [half, half],
            [half, -half],
            [-half, half],
            [-half, -half]
        ];
        let n = 4.0;
        let y = array![1.0, 0.3, -0.2, -1.1];
        for delta in [0.01, 0.1, 1.0] {
            let fit = ridge_fit(&x, &y, delta).unwrap();
            for j in 0..2 {
                let expect = x.column(j).dot(&y) / ((n - 1.0) + 2.0 * n * delta);
                assert!((fit.coefficients[j] - expect).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn ridge_norm_shrinks_with_delta() {
        let x = random_standardized(12, 8, 31);
        let y = x.column(0).to_owned() + &x.column(5);
        let mut last = f64::INFINITY;
        for delta in [1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0] {
            let fit = ridge_fit(&x, &y, delta).unwrap();
            let norm = fit.coefficients.dot(&fit.coefficients).sqrt();
            assert!(norm <= last + 1e-12, "ridge norm not shrinking at delta={delta}");
            last = norm;
        }
    }

    #[test]
    fn ridge_zero_penalty_matches_ols_when_well_conditioned() {
        let x = random_standardized(40, 3, 17);
        let y = 2.0 * &x.column(1).to_owned();
        let ridge = ridge_fit(&x, &y, 0.0).unwrap();
        let ols = ols_fit(&x, &y).unwrap();
        for j in 0..3 {
            assert!((ridge.coefficients[j] - ols.coefficients[j]).abs() < 1e-8);
        }
    }

    #[test]
    fn logistic_null_design_recovers_base_rate() {
        let m = Array2::<f64>::zeros((8, 2));
        let y = array![1.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0];
        let fit = logistic_fit(&m, &y).unwrap();
        let base = 3.0_f64 / 8.0;
        assert!((fit.intercept - (base / (1.0 - base)).ln()).abs() < 1e-6);
        assert!(fit.coefficients.iter().all(|v| v.abs() < 1e-9));
    }

    #[test]
    fn logistic_slope_sign_follows_association() {
        let m = array![[-2.0], [-1.0], [-0.5], [0.5], [1.0], [2.0]];
        let y = array![0.0, 0.0, 1.0, 0.0, 1.0, 1.0];
        let fit = logistic_fit(&m, &y).unwrap();
        assert!(fit.coefficients[0] > 0.0);
    }

    #[test]
    fn logistic_matches_independent_newton_oracle() {
        // overlapping classes so the maximum-likelihood estimate is finite
        let m = array![
            [0.5, 1.0],
            [-0.3, 0.2],
            [1.2, -0.7],
            [-1.0, -0.5],
            [0.1, 0.9],
            [0.7, -1.2],
            [-0.6, 0.4],
            [1.5, 0.1],
            [-0.2, -0.9],
            [0.9, 0.6]
        ];
        let y = array![1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 1.0, 1.0, 0.0];
        let fit = logistic_fit(&m, &y).unwrap();

        // oracle: plain Newton with a hand-written 3x3 solve
        let mut coef = [0.0f64; 3];
        for _ in 0..200 {
            let mut grad = [0.0f64; 3];
            let mut hess = [[0.0f64; 3]; 3];
            for i in 0..m.nrows() {
                let zi = [1.0, m[[i, 0]], m[[i, 1]]];
                let eta: f64 = (0..3).map(|a| coef[a] * zi[a]).sum();
                let pi = 1.0 / (1.0 + (-eta).exp());
                let wi = pi * (1.0 - pi);
                for a in 0..3 {
                    grad[a] += (pi - y[i]) * zi[a];
                    for b in 0..3 {
                        hess[a][b] += wi * zi[a] * zi[b];
                    }
                }
            }
            // explicit inverse via adjugate
            let h = hess;
            let det = h[0][0] * (h[1][1] * h[2][2] - h[1][2] * h[2][1])
                - h[0][1] * (h[1][0] * h[2][2] - h[1][2] * h[2][0])
                + h[0][2] * (h[1][0] * h[2][1] - h[1][1] * h[2][0]);
            let inv = [
                [
                    (h[1][1] * h[2][2] - h[1][2] * h[2][1]) / det,
                    (h[0][2] * h[2][1] - h[0][1] * h[2][2]) / det,
                    (h[0][1] * h[1][2] - h[0][2] * h[1][1]) / det,
                ],
                [
                    (h[1][2] * h[2][0] - h[1][0] * h[2][2]) / det,
                    (h[0][0] * h[2][2] - h[0][2] * h[2][0]) / det,
                    (h[0][2] * h[1][0] - h[0][0] * h[1][2]) / det,
                ],
                [
                    (h[1][0] * h[2][1] - h[1][1] * h[2][0]) / det,
                    (h[0][1] * h[2][0] - h[0][0] * h[2][1]) / det,
                    (h[0][0] * h[1][1] - h[0][1] * h[1][0]) / det,
                ],
            ];
            let mut step = [0.0f64; 3];
            for a in 0..3 {
                for b in 0..3 {
                    step[a] += inv[a][b] * grad[b];
                }
            }
            for a in 0..3 {
                coef[a] -= step[a];
            }
        }
        assert!((fit.intercept - coef[0]).abs() < 1e-4);
        assert!((fit.coefficients[0] - coef[1]).abs() < 1e-4);
        assert!((fit.coefficients[1] - coef[2]).abs() < 1e-4);
    }

    #[test]
    fn logistic_lasso_zeroes_above_delta_max() {
        let x = random_standardized(30, 5, 41);
        let y: Array1<f64> = (0..30).map(|i| if x[[i, 0]] > 0.0 { 1.0 } else { 0.0 }).collect::<Vec<_>>().into();
        let dmax = logistic_lasso_delta_max(&x, &y);
        let fit = logistic_lasso_fit(&x, &y, dmax * 1.01).unwrap();
        assert!(fit.coefficients.iter().all(|&v| v == 0.0));
        let fit2 = logistic_lasso_fit(&x, &y, dmax * 0.5).unwrap();
        assert!(fit2.coefficients.iter().any(|&v| v != 0.0));
    }

    #[test]
    fn logistic_ridge_shrinks_toward_zero() {
        let x = random_standardized(30, 4, 43);
        let y: Array1<f64> = (0..30).map(|i| if x[[i, 1]] + x[[i, 2]] > 0.0 { 1.0 } else { 0.0 }).collect::<Vec<_>>().into();
        let small = logistic_ridge_fit(&x, &y, 1e-3).unwrap();
        let large = logistic_ridge_fit(&x, &y, 10.0).unwrap();
        let ns = small.coefficients.dot(&small.coefficients);
        let nl = large.coefficients.dot(&large.coefficients);
        assert!(nl < ns);
    }
}
