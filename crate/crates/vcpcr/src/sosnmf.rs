//! Alternating solver for the weighted sparse orthogonal semi-NMF problem
//! that drives stage one of the pipeline.
//!
//! The factorization approximates the column-weighted predictor matrix by
//! `U V^T`, where the latent columns of `U` have unit sample variance and
//! `V` is nonnegative with disjoint column supports, so every variable is
//! assigned to at most one cluster with a membership degree, or dropped.
//! The plain (unweighted) problem is the all-ones-weights special case.
//!
//! Both update steps are exact block minimizers: latent columns solve a
//! least-squares problem cluster by cluster (supports are disjoint), and the
//! membership rows solve a per-variable soft-threshold problem on the
//! correlation between variable and latent column.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};

/// Relative spread below which a weighted cluster sum counts as degenerate.
const DEGENERATE_SPREAD: f64 = 1e-13;

/// Signed diagonal supervision weights, one per variable.
#[derive(Debug, Clone)]
pub struct WeightVector {
    pub w: Array1<f64>,
}

impl WeightVector {
    pub fn new(w: Array1<f64>) -> Result<Self> {
        if w.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(WeightVector { w })
    }

    pub fn ones(p: usize) -> Self {
        WeightVector { w: Array1::ones(p) }
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }
}

/// Sparse nonnegative membership matrix with disjoint column supports.
///
/// `values` holds the currently surviving columns; `active_columns` maps
/// each of them back to the cluster index it had in the initial partition,
/// so labels stay comparable while columns get pruned.
#[derive(Debug, Clone)]
pub struct MembershipMatrix {
    pub values: Array2<f64>,
    pub active_columns: Vec<usize>,
}

impl MembershipMatrix {
    pub fn p(&self) -> usize {
        self.values.nrows()
    }

    pub fn k_surviving(&self) -> usize {
        self.values.ncols()
    }

    /// Per-variable assignment: original cluster index of the row's nonzero
    /// entry, or `None` for a removed variable.
    pub fn labels(&self) -> Vec<Option<usize>> {
        (0..self.p())
            .map(|j| {
                self.values
                    .row(j)
                    .iter()
                    .position(|&v| v > 0.0)
                    .map(|c| self.active_columns[c])
            })
            .collect()
    }

    /// Membership degree of the row's nonzero entry (0 when removed).
    pub fn degrees(&self) -> Array1<f64> {
        Array1::from_iter((0..self.p()).map(|j| self.values.row(j).iter().cloned().fold(0.0, f64::max)))
    }

    /// Drops all-zero columns in place, keeping the original-index map.
    pub fn prune_zero_columns(&mut self) {
        let keep: Vec<usize> = (0..self.k_surviving())
            .filter(|&c| self.values.column(c).iter().any(|&v| v != 0.0))
            .collect();
        if keep.len() == self.k_surviving() {
            return;
        }
        self.retain_columns(&keep);
    }

    fn retain_columns(&mut self, keep: &[usize]) {
        let p = self.p();
        let mut next = Array2::<f64>::zeros((p, keep.len()));
        for (to, &from) in keep.iter().enumerate() {
            next.column_mut(to).assign(&self.values.column(from));
        }
        self.values = next;
        self.active_columns = keep.iter().map(|&c| self.active_columns[c]).collect();
    }

    fn drop_column(&mut self, col: usize) {
        let keep: Vec<usize> = (0..self.k_surviving()).filter(|&c| c != col).collect();
        self.retain_columns(&keep);
    }

    pub fn is_all_zero(&self) -> bool {
        self.k_surviving() == 0 || self.values.iter().all(|&v| v == 0.0)
    }

    /// Checks the structural invariants: nonnegativity and at most one
    /// nonzero entry per row (which makes `V^T V` diagonal).
    pub fn check_invariants(&self) {
        for j in 0..self.p() {
            let row = self.values.row(j);
            assert!(row.iter().all(|&v| v >= 0.0), "negative membership in row {j}");
            let nz = row.iter().filter(|&&v| v != 0.0).count();
            assert!(nz <= 1, "row {j} has {nz} nonzero memberships");
        }
    }
}

/// Unit-variance latent columns, one per surviving cluster.
#[derive(Debug, Clone)]
pub struct LatentMatrix {
    pub values: Array2<f64>,
    pub active_columns: Vec<usize>,
}

impl LatentMatrix {
    pub fn n(&self) -> usize {
        self.values.nrows()
    }

    pub fn k(&self) -> usize {
        self.values.ncols()
    }
}

/// Result of a full alternating fit.
#[derive(Debug, Clone)]
pub struct SosnmfFit {
    pub membership: MembershipMatrix,
    pub latent: LatentMatrix,
    pub lambda: f64,
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Number of iterations on which the objective went up. The alternating
    /// scheme has no descent proof under the unit-variance rescaling, so
    /// increases are recorded rather than treated as failures.
    pub objective_increases: usize,
}

/// Builds the binary membership matrix from an initial partition with labels
/// in `0..k`.
pub fn init_membership(labels: &[usize], k: usize) -> Result<MembershipMatrix> {
    let p = labels.len();
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    let mut counts = vec![0usize; k];
    for &l in labels {
        if l >= k {
            return Err(Error::InvalidLabel { label: l + 1, k });
        }
        counts[l] += 1;
    }
    if let Some(empty) = counts.iter().position(|&c| c == 0) {
        return Err(Error::EmptyCluster(empty + 1));
    }
    let mut values = Array2::<f64>::zeros((p, k));
    for (j, &l) in labels.iter().enumerate() {
        values[[j, l]] = 1.0;
    }
    Ok(MembershipMatrix { values, active_columns: (0..k).collect() })
}

fn sample_sd(u: &Array1<f64>) -> f64 {
    let n = u.len() as f64;
    let mean = u.sum() / n;
    let ss: f64 = u.iter().map(|v| (v - mean) * (v - mean)).sum();
    (ss / (n - 1.0)).sqrt()
}

/// Least-squares latent columns for fixed memberships, rescaled to unit
/// sample variance.
///
/// Because column supports are disjoint, the joint solve decouples into one
/// weighted sum per cluster:
/// `u_k = sum_{j in C_k} v_jk w_j x_j / sum_{j in C_k} v_jk^2`.
///
/// `x` must be standardized (n x p) and `v` must have no zero columns.
pub fn update_latent(
    x: &Array2<f64>,
    weights: &WeightVector,
    v: &MembershipMatrix,
) -> Result<LatentMatrix> {
    let (n, p) = x.dim();
    debug_assert_eq!(p, v.p());
    debug_assert_eq!(p, weights.len());
    let k = v.k_surviving();
    let mut values = Array2::<f64>::zeros((n, k));
    let mut denom = vec![0.0f64; k];
    let mut spread_scale = vec![0.0f64; k];
    for j in 0..p {
        for (c, &vjk) in v.values.row(j).iter().enumerate() {
            if vjk != 0.0 {
                let coef = vjk * weights.w[j];
                let mut col = values.column_mut(c);
                col.scaled_add(coef, &x.column(j));
                denom[c] += vjk * vjk;
                spread_scale[c] += coef.abs();
            }
        }
    }
    for c in 0..k {
        debug_assert!(denom[c] > 0.0, "update_latent called with a zero column");
        let mut col = values.column_mut(c);
        let d = denom[c];
        col.mapv_inplace(|t| t / d);
        let sd = sample_sd(&col.to_owned());
        if sd <= DEGENERATE_SPREAD * (spread_scale[c] / d).max(f64::MIN_POSITIVE) {
            return Err(Error::DegenerateLatent(c));
        }
        col.mapv_inplace(|t| t / sd);
    }
    Ok(LatentMatrix { values, active_columns: v.active_columns.clone() })
}

/// One exact membership update for fixed latent columns.
///
/// Row by row: pick the cluster maximizing `w_j cor(u_k, x_j)` and give it
/// membership `(w_j cor - lambda)_+`; everything else in the row is zero.
/// Ties pick the lowest cluster index; a row of zeros means the variable is
/// removed.
/// Correlations between every variable and every latent column, as a p x k
/// matrix. Both sides are standardized, so `cor(u_k, x_j) = u_k^T x_j / (n-1)`;
/// the latent columns are linear combinations of centered columns, which
/// keeps their means at zero - checked here because the shortcut relies on it.
pub fn correlation_scores(x: &Array2<f64>, u: &LatentMatrix) -> Array2<f64> {
    let n = x.nrows();
    for c in 0..u.k() {
        let mean = u.values.column(c).sum() / n as f64;
        assert!(
            mean.abs() <= 1e-10,
            "latent column {c} has non-negligible mean {mean}"
        );
    }
    x.t().dot(&u.values).mapv(|t| t / (n as f64 - 1.0))
}

pub fn update_membership(
    x: &Array2<f64>,
    weights: &WeightVector,
    u: &LatentMatrix,
    lambda: f64,
) -> MembershipMatrix {
    let p = x.ncols();
    let k = u.k();
    let cors = correlation_scores(x, u);
    let mut values = Array2::<f64>::zeros((p, k));
    for j in 0..p {
        let wj = weights.w[j];
        let mut best = 0usize;
        let mut best_score = f64::NEG_INFINITY;
        for c in 0..k {
            let score = wj * cors[[j, c]];
            if score > best_score {
                best_score = score;
                best = c;
            }
        }
        let degree = best_score - lambda;
        if degree > 0.0 {
            values[[j, best]] = degree;
        }
    }
    MembershipMatrix { values, active_columns: u.active_columns.clone() }
}

/// Exact objective: `(1/(2(n-1))) ||X W - U V^T||_F^2 + lambda sum_j ||v_j||_1`.
pub fn objective(
    x: &Array2<f64>,
    weights: &WeightVector,
    u: &LatentMatrix,
    v: &MembershipMatrix,
    lambda: f64,
) -> f64 {
    let (n, p) = x.dim();
    let mut frob = 0.0;
    for j in 0..p {
        let wj = weights.w[j];
        // at most one nonzero membership per row
        let row = v.values.row(j);
        let hit = row.iter().enumerate().find(|(_, &vv)| vv != 0.0);
        match hit {
            Some((c, &vjk)) => {
                for i in 0..n {
                    let r = wj * x[[i, j]] - u.values[[i, c]] * vjk;
                    frob += r * r;
                }
            }
            None => {
                for i in 0..n {
                    let r = wj * x[[i, j]];
                    frob += r * r;
                }
            }
        }
    }
    let l1: f64 = v.values.iter().map(|v| v.abs()).sum();
    frob / (2.0 * (n as f64 - 1.0)) + lambda * l1
}

/// Options for the alternating fit.
#[derive(Debug, Clone, Copy)]
pub struct FitOptions {
    pub max_iter: usize,
    /// Relative objective-change tolerance; label stability is checked first.
    pub tol: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions { max_iter: 200, tol: 1e-8 }
    }
}

/// Alternating fit: latent update, membership update, pruning of dead
/// clusters, until the assignment labels repeat, the objective settles, or
/// the iteration cap is reached.
pub fn fit_sosnmf(
    x: &Array2<f64>,
    weights: &WeightVector,
    initial_labels: &[usize],
    k: usize,
    lambda: f64,
    options: FitOptions,
) -> Result<SosnmfFit> {
    if lambda < 0.0 {
        return Err(Error::InvalidParameter("lambda must be nonnegative".into()));
    }
    let mut v = init_membership(initial_labels, k)?;
    let mut prev_labels = v.labels();
    let mut trace: Vec<f64> = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    let mut objective_increases = 0;
    let mut latent: Option<LatentMatrix> = None;

    for it in 0..options.max_iter {
        iterations = it + 1;
        v.prune_zero_columns();
        if v.is_all_zero() {
            return Err(Error::AllVariablesRemoved);
        }
        // a cluster whose weighted sum has no spread is dropped, as if its
        // column had been pruned
        let u = loop {
            match update_latent(x, weights, &v) {
                Ok(u) => break u,
                Err(Error::DegenerateLatent(col)) => {
                    v.drop_column(col);
                    if v.is_all_zero() {
                        return Err(Error::AllVariablesRemoved);
                    }
                }
                Err(e) => return Err(e),
            }
        };
        let next_v = update_membership(x, weights, &u, lambda);
        next_v.check_invariants();
        let obj = objective(x, weights, &u, &next_v, lambda);
        if let Some(&last) = trace.last() {
            if obj > last + 1e-12 * (1.0 + last.abs()) {
                objective_increases += 1;
            }
        }
        trace.push(obj);
        let labels = next_v.labels();
        v = next_v;
        latent = Some(u);
        if labels == prev_labels {
            converged = true;
            break;
        }
        if trace.len() >= 2 {
            let prev = trace[trace.len() - 2];
            if (prev - obj).abs() <= options.tol * (1.0 + prev.abs()) {
                converged = true;
                break;
            }
        }
        prev_labels = labels;
    }

    if v.is_all_zero() {
        return Err(Error::AllVariablesRemoved);
    }
    // drop columns that died on the last membership update, from V and U in
    // step
    let keep: Vec<usize> = (0..v.k_surviving())
        .filter(|&c| v.values.column(c).iter().any(|&t| t != 0.0))
        .collect();
    let mut u = latent.expect("at least one iteration ran");
    if keep.len() < v.k_surviving() {
        let mut uv = Array2::<f64>::zeros((u.n(), keep.len()));
        for (to, &from) in keep.iter().enumerate() {
            uv.column_mut(to).assign(&u.values.column(from));
        }
        u = LatentMatrix {
            values: uv,
            active_columns: keep.iter().map(|&c| u.active_columns[c]).collect(),
        };
        v.retain_columns(&keep);
    }

    let first = *trace.first().expect("trace is nonempty");
    let last = *trace.last().expect("trace is nonempty");
    assert!(
        last <= first + 1e-9 * (1.0 + first.abs()),
        "final objective {last} above initial {first}"
    );

    Ok(SosnmfFit {
        membership: v,
        latent: u,
        lambda,
        objective_trace: trace,
        iterations,
        converged,
        objective_increases,
    })
}
