//! The end-to-end two-stage pipeline: supervision weights, sparse cluster
//! membership, per-cluster latent variables, and the final linear or
//! logistic model with per-variable coefficient recovery.

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::data::{
    apply_standardization, standardize, standardize_response, Dataset, StandardizedResponse, Task,
};
use crate::error::{Error, Result};
use crate::solvers;
use crate::sosnmf::{
    self, correlation_scores, FitOptions, MembershipMatrix, SosnmfFit, WeightVector,
};

/// How the supervision weights are produced.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "delta", rename_all = "lowercase")]
pub enum WeightScheme {
    /// All-ones weights: the unweighted factorization.
    Identity,
    /// Coefficients of an l1-penalized fit; zero-weight variables can never
    /// be assigned to a cluster.
    Lasso(f64),
    /// Coefficients of an l2-penalized fit; typically all nonzero.
    Ridge(f64),
}

impl WeightScheme {
    pub fn validate(&self) -> Result<()> {
        let delta = match self {
            WeightScheme::Identity => return Ok(()),
            WeightScheme::Lasso(d) | WeightScheme::Ridge(d) => *d,
        };
        if delta < 0.0 || !delta.is_finite() {
            return Err(Error::InvalidParameter("weight delta must be nonnegative".into()));
        }
        Ok(())
    }
}

/// A fitted two-stage model, carrying everything needed to predict on new
/// raw data and to report coefficients and cluster assignments.
#[derive(Debug, Clone)]
pub struct VcpcrFit {
    pub scheme: WeightScheme,
    pub task: Task,
    pub weights: WeightVector,
    pub sosnmf: SosnmfFit,
    /// Second-stage latent matrix `M = X V` built from the original
    /// (standardized, unweighted) predictors.
    pub m: Array2<f64>,
    /// Cluster coefficients of the second-stage model.
    pub a: Array1<f64>,
    /// Intercept of the second-stage model (zero for regression, where both
    /// sides are centered).
    pub intercept: f64,
    /// Per-variable coefficients `b = V a` on the standardized scale.
    pub b: Array1<f64>,
    pub k_requested: usize,
    /// Second-stage design was collinear and the minimum-norm solve was used.
    pub rank_deficient: bool,
    pub x_center: Array1<f64>,
    pub x_scale: Array1<f64>,
    pub y_center: f64,
    pub y_scale: f64,
}

impl VcpcrFit {
    pub fn k_surviving(&self) -> usize {
        self.sosnmf.membership.k_surviving()
    }

    /// Cluster assignment per variable (`None` = removed).
    pub fn labels(&self) -> Vec<Option<usize>> {
        self.sosnmf.membership.labels()
    }

    /// Number of variables with nonzero recovered coefficients.
    pub fn model_size(&self) -> usize {
        self.b.iter().filter(|&&v| v != 0.0).count()
    }

    /// Predictions for raw (unstandardized) rows: response-scale values for
    /// regression, class-1 probabilities for classification.
    pub fn predict(&self, x_new: &Array2<f64>) -> Result<Array1<f64>> {
        if x_new.ncols() != self.b.len() {
            return Err(Error::DimensionMismatch { expected: self.b.len(), got: x_new.ncols() });
        }
        let xs = apply_standardization(x_new, &self.x_center, &self.x_scale)?;
        let eta = xs.dot(&self.b) + self.intercept;
        Ok(match self.task {
            Task::Regression => eta.mapv(|v| v * self.y_scale + self.y_center),
            Task::Classification => eta.mapv(|v| {
                if v >= 0.0 {
                    1.0 / (1.0 + (-v).exp())
                } else {
                    v.exp() / (1.0 + v.exp())
                }
            }),
        })
    }
}

/// Supervision weights for the given scheme: all ones, or the coefficients
/// of a penalized fit matching the task (squared loss for regression,
/// logistic loss for classification).
pub fn compute_weights(
    x_std: &Array2<f64>,
    y: &StandardizedResponse,
    scheme: WeightScheme,
) -> Result<WeightVector> {
    scheme.validate()?;
    let p = x_std.ncols();
    let w = match (scheme, y.task) {
        (WeightScheme::Identity, _) => Array1::ones(p),
        (WeightScheme::Lasso(delta), Task::Regression) => {
            solvers::lasso_fit(x_std, &y.values, delta)?.coefficients
        }
        (WeightScheme::Ridge(delta), Task::Regression) => {
            solvers::ridge_fit(x_std, &y.values, delta)?.coefficients
        }
        (WeightScheme::Lasso(delta), Task::Classification) => {
            solvers::logistic_lasso_fit(x_std, &y.values, delta)?.coefficients
        }
        (WeightScheme::Ridge(delta), Task::Classification) => {
            solvers::logistic_ridge_fit(x_std, &y.values, delta)?.coefficients
        }
    };
    WeightVector::new(w)
}

/// The smallest sparsity level that empties the membership matrix, computed
/// from the latent variables of the first iteration:
/// `lambda_max = max_{j,k} w_j cor(u_k^(1), x_j)`.
pub fn lambda_max(
    x_std: &Array2<f64>,
    weights: &WeightVector,
    initial_labels: &[usize],
    k: usize,
) -> Result<f64> {
    let v = sosnmf::init_membership(initial_labels, k)?;
    let u = sosnmf::update_latent(x_std, weights, &v)?;
    let cors = correlation_scores(x_std, &u);
    let mut best = f64::NEG_INFINITY;
    for j in 0..x_std.ncols() {
        for c in 0..u.k() {
            let s = weights.w[j] * cors[[j, c]];
            if s > best {
                best = s;
            }
        }
    }
    Ok(best)
}

/// Fits the full pipeline on a raw dataset.
///
/// Standardizes predictors (and the response, for regression), computes the
/// supervision weights, runs the stage-one factorization, then models the
/// response on `M = X V` with OLS or logistic regression and recovers the
/// per-variable coefficients `b = V a`.
pub fn fit_vcpcr(
    dataset: &Dataset,
    scheme: WeightScheme,
    k: usize,
    initial_labels: &[usize],
    lambda: f64,
    options: FitOptions,
) -> Result<VcpcrFit> {
    if initial_labels.len() != dataset.p() {
        return Err(Error::LengthMismatch { left: initial_labels.len(), right: dataset.p() });
    }
    let xs = standardize(&dataset.x)?;
    let ys = standardize_response(&dataset.y, dataset.task)?;
    let weights = compute_weights(&xs.values, &ys, scheme)?;
    let sfit = sosnmf::fit_sosnmf(&xs.values, &weights, initial_labels, k, lambda, options)?;
    fit_second_stage(dataset.task, scheme, k, xs, ys, weights, sfit)
}

/// Stage two on an existing factorization; shared by `fit_vcpcr` and the
/// cross-validation harness (which standardizes fold data itself).
pub(crate) fn fit_second_stage(
    task: Task,
    scheme: WeightScheme,
    k_requested: usize,
    xs: crate::data::StandardizedMatrix,
    ys: StandardizedResponse,
    weights: WeightVector,
    sfit: SosnmfFit,
) -> Result<VcpcrFit> {
    // the second stage relates the original predictors to the response, so
    // M comes from X, not XW
    let m = xs.values.dot(&sfit.membership.values);
    let (a, intercept, rank_deficient) = match task {
        Task::Regression => {
            let fit = solvers::ols_fit(&m, &ys.values)?;
            (fit.coefficients, 0.0, fit.rank_deficient)
        }
        Task::Classification => {
            let fit = solvers::logistic_fit(&m, &ys.values)?;
            (fit.coefficients, fit.intercept, false)
        }
    };
    let b = sfit.membership.values.dot(&a);
    // algebraic identity: predictions through M a and through X b agree
    let via_m = m.dot(&a);
    let via_b = xs.values.dot(&b);
    for (lhs, rhs) in via_m.iter().zip(via_b.iter()) {
        assert!(
            (lhs - rhs).abs() <= 1e-10 * (1.0 + lhs.abs()),
            "prediction identity violated: {lhs} vs {rhs}"
        );
    }
    Ok(VcpcrFit {
        scheme,
        task,
        weights,
        sosnmf: sfit,
        m,
        a,
        intercept,
        b,
        k_requested,
        rank_deficient,
        x_center: xs.center,
        x_scale: xs.scale,
        y_center: ys.center,
        y_scale: ys.scale,
    })
}

/// Convenience: membership matrix of a fit (stage-one output).
pub fn membership(fit: &VcpcrFit) -> &MembershipMatrix {
    &fit.sosnmf.membership
}
