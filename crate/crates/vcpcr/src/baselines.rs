//! Competitor methods: cluster-representative lasso on top of unsupervised
//! column clustering (K-means or Ward agglomeration), and the embedded
//! cluster elastic net that alternates a penalized coordinate-descent
//! regression with K-means on coefficient-weighted columns.
//!
//! These baselines are regression-only: their objectives are squared-loss by
//! construction.

use ndarray::{Array1, Array2};
use rand::seq::index::sample;


use crate::data::{standardize, standardize_response, Dataset, Task};
use crate::error::{Error, Result};
use crate::rng::{stream, stream_rng};
use crate::solvers;

/// A hard assignment of every variable to one of `k` clusters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    pub labels: Vec<usize>,
    pub k: usize,
}

impl Partition {
    pub fn new(labels: Vec<usize>, k: usize) -> Result<Self> {
        if let Some(&bad) = labels.iter().find(|&&l| l >= k) {
            return Err(Error::InvalidLabel { label: bad + 1, k });
        }
        Ok(Partition { labels, k })
    }

    pub fn p(&self) -> usize {
        self.labels.len()
    }

    /// Members of each cluster, by cluster index.
    pub fn clusters(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.k];
        for (j, &l) in self.labels.iter().enumerate() {
            out[l].push(j);
        }
        out
    }

    pub fn cluster_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.k];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }
}

/// Uniformly shuffled assignment with cluster sizes differing by at most one.
pub fn random_balanced_partition(p: usize, k: usize, seed: u64) -> Result<Partition> {
    if k == 0 || k > p {
        return Err(Error::InvalidParameter(format!("k must be in 1..={p}, got {k}")));
    }
    let mut rng = stream_rng(seed, &[stream::PARTITION]);
    let mut order: Vec<usize> = (0..p).collect();
    use rand::seq::SliceRandom;
    order.shuffle(&mut rng);
    let mut labels = vec![0usize; p];
    for (pos, &j) in order.iter().enumerate() {
        labels[j] = pos % k;
    }
    Partition::new(labels, k)
}

/// Within-cluster sum of squares for points given as *columns* of `z`.
pub fn wcss_columns(z: &Array2<f64>, partition: &Partition) -> f64 {
    let n = z.nrows();
    let clusters = partition.clusters();
    let mut total = 0.0;
    for members in clusters.iter().filter(|m| !m.is_empty()) {
        let mut centroid = Array1::<f64>::zeros(n);
        for &j in members {
            centroid += &z.column(j);
        }
        centroid.mapv_inplace(|v| v / members.len() as f64);
        for &j in members {
            let diff = &z.column(j) - &centroid;
            total += diff.dot(&diff);
        }
    }
    total
}

/// Lloyd iterations from the given centroids over points stored as rows of
/// `pts`. Returns labels and the final within-cluster sum of squares.
fn lloyd(pts: &Array2<f64>, mut centroids: Array2<f64>, max_iter: usize) -> (Vec<usize>, f64) {
    let (p, _dim) = pts.dim();
    let k = centroids.nrows();
    let mut labels = vec![usize::MAX; p];
    for _ in 0..max_iter {
        // assignment step
        let mut changed = false;
        let mut counts = vec![0usize; k];
        for j in 0..p {
            let mut best = 0usize;
            let mut best_d = f64::INFINITY;
            for c in 0..k {
                let diff = &pts.row(j) - &centroids.row(c);
                let d = diff.dot(&diff);
                if d < best_d {
                    best_d = d;
                    best = c;
                }
            }
            if labels[j] != best {
                changed = true;
                labels[j] = best;
            }
            counts[best] += 1;
        }
        // an emptied cluster grabs the point farthest from its own centroid
        for c in 0..k {
            if counts[c] == 0 {
                let mut far = 0usize;
                let mut far_d = -1.0;
                for j in 0..p {
                    if counts[labels[j]] <= 1 {
                        continue;
                    }
                    let diff = &pts.row(j) - &centroids.row(labels[j]);
                    let d = diff.dot(&diff);
                    if d > far_d {
                        far_d = d;
                        far = j;
                    }
                }
                counts[labels[far]] -= 1;
                labels[far] = c;
                counts[c] = 1;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        // update step
        centroids.fill(0.0);
        for j in 0..p {
            let mut row = centroids.row_mut(labels[j]);
            row += &pts.row(j);
        }
        for c in 0..k {
            if counts[c] > 0 {
                let inv = 1.0 / counts[c] as f64;
                centroids.row_mut(c).mapv_inplace(|v| v * inv);
            }
        }
    }
    let mut wcss = 0.0;
    for j in 0..p {
        let diff = &pts.row(j) - &centroids.row(labels[j]);
        wcss += diff.dot(&diff);
    }
    (labels, wcss)
}

/// K-means over the columns of `z`, best of `n_restarts` seeded Lloyd runs
/// by within-cluster sum of squares.
pub fn kmeans_columns(z: &Array2<f64>, k: usize, seed: u64, n_restarts: usize) -> Result<Partition> {
    let p = z.ncols();
    if k == 0 || k > p {
        return Err(Error::InvalidParameter(format!("k must be in 1..={p}, got {k}")));
    }
    let pts = z.t().to_owned(); // points as rows
    let dim = pts.ncols();
    let mut best: Option<(Vec<usize>, f64)> = None;
    for restart in 0..n_restarts.max(1) {
        let mut rng = stream_rng(seed, &[stream::KMEANS, restart as u64]);
        let picks = sample(&mut rng, p, k);
        let mut centroids = Array2::<f64>::zeros((k, dim));
        for (c, j) in picks.into_iter().enumerate() {
            centroids.row_mut(c).assign(&pts.row(j));
        }
        let (labels, wcss) = lloyd(&pts, centroids, 100);
        let replace = match &best {
            None => true,
            Some((_, best_wcss)) => wcss < *best_wcss,
        };
        if replace {
            best = Some((labels, wcss));
        }
    }
    let (labels, _) = best.expect("at least one restart");
    Partition::new(labels, k)
}

/// One merge of the agglomeration: the two cluster representatives joined
/// and the dissimilarity at which it happened.
#[derive(Debug, Clone, Copy)]
pub struct WardMerge {
    pub left: usize,
    pub right: usize,
    pub height: f64,
}

fn ward_agglomerate(x: &Array2<f64>, stop_at: usize) -> (Vec<Option<usize>>, Vec<WardMerge>) {
    let p = x.ncols();
    // squared Euclidean distances between columns
    let mut dist = Array2::<f64>::zeros((p, p));
    for a in 0..p {
        for b in (a + 1)..p {
            let diff = &x.column(a) - &x.column(b);
            let d = diff.dot(&diff);
            dist[[a, b]] = d;
            dist[[b, a]] = d;
        }
    }
    let mut active: Vec<bool> = vec![true; p];
    let mut size: Vec<f64> = vec![1.0; p];
    // slot -> current cluster id for cutting; merges recorded for heights
    let mut cluster_of: Vec<Option<usize>> = (0..p).map(Some).collect();
    let mut merges = Vec::new();
    let mut remaining = p;
    while remaining > stop_at {
        // closest active pair
        let mut bi = 0;
        let mut bj = 0;
        let mut bd = f64::INFINITY;
        for i in 0..p {
            if !active[i] {
                continue;
            }
            for j in (i + 1)..p {
                if !active[j] {
                    continue;
                }
                if dist[[i, j]] < bd {
                    bd = dist[[i, j]];
                    bi = i;
                    bj = j;
                }
            }
        }
        merges.push(WardMerge { left: bi, right: bj, height: bd });
        // Lance-Williams update for the Ward criterion
        let (ni, nj) = (size[bi], size[bj]);
        for q in 0..p {
            if !active[q] || q == bi || q == bj {
                continue;
            }
            let nq = size[q];
            let d = ((ni + nq) * dist[[bi, q]] + (nj + nq) * dist[[bj, q]] - nq * bd)
                / (ni + nj + nq);
            dist[[bi, q]] = d;
            dist[[q, bi]] = d;
        }
        size[bi] = ni + nj;
        active[bj] = false;
        // fold the members of bj into bi
        for c in cluster_of.iter_mut() {
            if *c == Some(bj) {
                *c = Some(bi);
            }
        }
        remaining -= 1;
    }
    (cluster_of, merges)
}

/// Merge heights of the full agglomeration (down to a single cluster).
pub fn ward_heights(x: &Array2<f64>) -> Vec<f64> {
    let (_, merges) = ward_agglomerate(x, 1);
    merges.iter().map(|m| m.height).collect()
}

/// Agglomerative clustering of the columns of `x` by the Ward
/// minimum-variance criterion, cut at `k` clusters.
pub fn ward_hac(x: &Array2<f64>, k: usize) -> Result<Partition> {
    let p = x.ncols();
    if k == 0 || k > p {
        return Err(Error::InvalidParameter(format!("k must be in 1..={p}, got {k}")));
    }
    let (cluster_of, _) = ward_agglomerate(x, k);
    // compact the surviving slot ids into 0..k
    let mut ids: Vec<usize> = cluster_of.iter().map(|c| c.unwrap()).collect();
    let mut seen: Vec<usize> = Vec::new();
    for id in &ids {
        if !seen.contains(id) {
            seen.push(*id);
        }
    }
    seen.sort_unstable();
    for id in ids.iter_mut() {
        *id = seen.iter().position(|s| s == id).unwrap();
    }
    Partition::new(ids, k)
}

/// Which column clusterer the representative-lasso baseline uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Clusterer {
    Kmeans,
    Ward,
}

/// Fitted cluster-representative lasso.
#[derive(Debug, Clone)]
pub struct CrlFit {
    pub partition: Partition,
    /// Lasso coefficients on the cluster centroids.
    pub a: Array1<f64>,
    /// Implied per-variable coefficients: a_k / p_k for members of cluster k.
    pub b: Array1<f64>,
    pub cluster_sizes: Vec<usize>,
    pub delta: f64,
    pub x_center: Array1<f64>,
    pub x_scale: Array1<f64>,
    pub y_center: f64,
    pub y_scale: f64,
}

impl CrlFit {
    /// Model size: members of clusters with nonzero coefficients.
    pub fn model_size(&self) -> usize {
        crate::evaluation::model_size_clusters(&self.a, &self.cluster_sizes)
    }

    pub fn labels(&self) -> Vec<Option<usize>> {
        self.partition.labels.iter().map(|&l| Some(l)).collect()
    }

    pub fn predict(&self, x_new: &Array2<f64>) -> Result<Array1<f64>> {
        if x_new.ncols() != self.b.len() {
            return Err(Error::DimensionMismatch { expected: self.b.len(), got: x_new.ncols() });
        }
        let xs = crate::data::apply_standardization(x_new, &self.x_center, &self.x_scale)?;
        Ok(xs.dot(&self.b).mapv(|v| v * self.y_scale + self.y_center))
    }
}

/// Cluster centroids as columns: mean of each cluster's member columns.
pub fn cluster_centroids(x: &Array2<f64>, partition: &Partition) -> Array2<f64> {
    let n = x.nrows();
    let clusters = partition.clusters();
    let mut m = Array2::<f64>::zeros((n, partition.k));
    for (c, members) in clusters.iter().enumerate() {
        if members.is_empty() {
            continue;
        }
        let mut col = m.column_mut(c);
        for &j in members {
            col += &x.column(j);
        }
        col.mapv_inplace(|v| v / members.len() as f64);
    }
    m
}

/// Two-step baseline: cluster the standardized columns, then lasso on the
/// cluster centroids.
pub fn crl_fit(
    dataset: &Dataset,
    clusterer: Clusterer,
    k: usize,
    delta: f64,
    seed: u64,
) -> Result<CrlFit> {
    if dataset.task != Task::Regression {
        return Err(Error::InvalidParameter("this baseline supports regression only".into()));
    }
    let xs = standardize(&dataset.x)?;
    let ys = standardize_response(&dataset.y, dataset.task)?;
    let partition = match clusterer {
        Clusterer::Kmeans => kmeans_columns(&xs.values, k, seed, 10)?,
        Clusterer::Ward => ward_hac(&xs.values, k)?,
    };
    crl_fit_on_standardized(xs, ys, partition, delta)
}

pub(crate) fn crl_fit_on_standardized(
    xs: crate::data::StandardizedMatrix,
    ys: crate::data::StandardizedResponse,
    partition: Partition,
    delta: f64,
) -> Result<CrlFit> {
    let m = cluster_centroids(&xs.values, &partition);
    let fit = solvers::lasso_fit(&m, &ys.values, delta)?;
    let sizes = partition.cluster_sizes();
    let p = xs.values.ncols();
    let mut b = Array1::<f64>::zeros(p);
    for (j, &l) in partition.labels.iter().enumerate() {
        if sizes[l] > 0 {
            b[j] = fit.coefficients[l] / sizes[l] as f64;
        }
    }
    Ok(CrlFit {
        partition,
        a: fit.coefficients,
        b,
        cluster_sizes: sizes,
        delta,
        x_center: xs.center,
        x_scale: xs.scale,
        y_center: ys.center,
        y_scale: ys.scale,
    })
}

/// Fitted cluster elastic net.
#[derive(Debug, Clone)]
pub struct CenFit {
    pub b: Array1<f64>,
    pub partition: Partition,
    /// Objective value after every alternation (b-sweep then cluster step).
    pub objective_trace: Vec<f64>,
    pub delta: f64,
    pub lambda: f64,
    pub converged: bool,
    pub x_center: Array1<f64>,
    pub x_scale: Array1<f64>,
    pub y_center: f64,
    pub y_scale: f64,
}

impl CenFit {
    pub fn model_size(&self) -> usize {
        self.b.iter().filter(|&&v| v != 0.0).count()
    }

    pub fn labels(&self) -> Vec<Option<usize>> {
        self.partition.labels.iter().map(|&l| Some(l)).collect()
    }

    pub fn predict(&self, x_new: &Array2<f64>) -> Result<Array1<f64>> {
        if x_new.ncols() != self.b.len() {
            return Err(Error::DimensionMismatch { expected: self.b.len(), got: x_new.ncols() });
        }
        let xs = crate::data::apply_standardization(x_new, &self.x_center, &self.x_scale)?;
        Ok(xs.dot(&self.b).mapv(|v| v * self.y_scale + self.y_center))
    }
}

/// Grouping penalty (without its multiplier): total squared distance of the
/// coefficient-weighted columns to their cluster centroids.
pub fn cen_grouping(x: &Array2<f64>, b: &Array1<f64>, partition: &Partition) -> f64 {
    let mut weighted = x.clone();
    for (j, mut col) in weighted.columns_mut().into_iter().enumerate() {
        let bj = b[j];
        col.mapv_inplace(|v| v * bj);
    }
    wcss_columns(&weighted, partition)
}

/// The full objective: squared loss, sparsity penalty, and half the grouping
/// multiplier times the grouping penalty. The half makes each coordinate
/// update an exact minimizer, so the alternation descends.
pub fn cen_objective(
    x: &Array2<f64>,
    y: &Array1<f64>,
    b: &Array1<f64>,
    partition: &Partition,
    delta: f64,
    lambda: f64,
) -> f64 {
    let resid = y - &x.dot(b);
    0.5 * resid.dot(&resid)
        + delta * b.iter().map(|v| v.abs()).sum::<f64>()
        + 0.5 * lambda * cen_grouping(x, b, partition)
}

/// Partition step: K-means on the coefficient-weighted columns.
///
/// Lloyd runs once warm-started from the current partition and then from
/// seeded random restarts; the best result by grouping penalty wins, and the
/// current partition is kept unless something beats it, so this step never
/// increases the objective.
pub fn cen_cluster_step(
    x: &Array2<f64>,
    b: &Array1<f64>,
    partition: &Partition,
    seed: u64,
) -> Partition {
    let mut weighted = x.t().to_owned(); // points as rows
    for (j, mut row) in weighted.rows_mut().into_iter().enumerate() {
        let bj = b[j];
        row.mapv_inplace(|v| v * bj);
    }
    let p = weighted.nrows();
    let k = partition.k;
    let dim = weighted.ncols();
    let sizes = partition.cluster_sizes();
    let mut centroids = Array2::<f64>::zeros((k, dim));
    for (j, &l) in partition.labels.iter().enumerate() {
        let mut row = centroids.row_mut(l);
        row += &weighted.row(j);
    }
    for c in 0..k {
        if sizes[c] > 0 {
            let inv = 1.0 / sizes[c] as f64;
            centroids.row_mut(c).mapv_inplace(|v| v * inv);
        }
    }

    let mut best = partition.clone();
    let mut best_penalty = cen_grouping(x, b, partition);
    let mut consider = |labels: Vec<usize>, best: &mut Partition, best_penalty: &mut f64| {
        if let Ok(cand) = Partition::new(labels, k) {
            let penalty = cen_grouping(x, b, &cand);
            if penalty < *best_penalty - 1e-12 * (1.0 + best_penalty.abs()) {
                *best = cand;
                *best_penalty = penalty;
            }
        }
    };
    let (warm_labels, _) = lloyd(&weighted, centroids, 100);
    consider(warm_labels, &mut best, &mut best_penalty);
    for restart in 0..9u64 {
        let mut rng = stream_rng(seed, &[stream::KMEANS, restart]);
        let picks = sample(&mut rng, p, k);
        let mut init = Array2::<f64>::zeros((k, dim));
        for (c, j) in picks.into_iter().enumerate() {
            init.row_mut(c).assign(&weighted.row(j));
        }
        let (labels, _) = lloyd(&weighted, init, 100);
        consider(labels, &mut best, &mut best_penalty);
    }
    best
}

/// One full cyclical coordinate-descent pass of the penalized regression
/// given a fixed partition. Returns the largest coefficient movement.
fn cen_b_sweep(
    gram: &Array2<f64>,
    xty: &Array1<f64>,
    b: &mut Array1<f64>,
    partition: &Partition,
    delta: f64,
    lambda: f64,
) -> f64 {
    let p = b.len();
    let clusters = partition.clusters();
    let sizes = partition.cluster_sizes();
    // residual correlations maintained through gram products:
    // x_j^T e_j = x_j^T y - sum_l G[j,l] b_l + G[j,j] b_j
    let mut max_step: f64 = 0.0;
    for j in 0..p {
        let l = partition.labels[j];
        let pk = sizes[l] as f64;
        let mut gb = 0.0;
        for t in 0..p {
            if b[t] != 0.0 {
                gb += gram[[j, t]] * b[t];
            }
        }
        let e_dot = xty[j] - gb + gram[[j, j]] * b[j];
        let mut cross = 0.0;
        for &m in &clusters[l] {
            if m != j && b[m] != 0.0 {
                cross += b[m] * gram[[j, m]];
            }
        }
        let z = e_dot + (lambda / pk) * cross;
        let denom = gram[[j, j]] * (1.0 + lambda * (pk - 1.0) / pk);
        let new = solvers::soft_threshold(z, delta) / denom;
        if new != b[j] {
            max_step = max_step.max((new - b[j]).abs());
            b[j] = new;
        }
    }
    max_step
}

/// Embedded baseline: alternate a coordinate-descent sweep of the penalized
/// regression with the K-means partition step until the objective settles.
pub fn cen_fit(dataset: &Dataset, k: usize, delta: f64, lambda: f64, seed: u64) -> Result<CenFit> {
    if dataset.task != Task::Regression {
        return Err(Error::InvalidParameter("this baseline supports regression only".into()));
    }
    if delta < 0.0 || lambda < 0.0 {
        return Err(Error::InvalidParameter("penalties must be nonnegative".into()));
    }
    let xs = standardize(&dataset.x)?;
    let ys = standardize_response(&dataset.y, dataset.task)?;
    let partition = random_balanced_partition(dataset.p(), k, seed)?;
    cen_fit_on_standardized(xs, ys, partition, delta, lambda)
}

pub(crate) fn cen_fit_on_standardized(
    xs: crate::data::StandardizedMatrix,
    ys: crate::data::StandardizedResponse,
    mut partition: Partition,
    delta: f64,
    lambda: f64,
) -> Result<CenFit> {
    let x = &xs.values;
    let y = &ys.values;
    let p = x.ncols();
    let gram = x.t().dot(x);
    let xty = x.t().dot(y);
    let mut b = Array1::<f64>::zeros(p);
    let mut trace: Vec<f64> = Vec::new();
    let mut converged = false;

    for _outer in 0..100 {
        // (i) coordinate descent over b for the current partition
        for _sweep in 0..500 {
            let step = cen_b_sweep(&gram, &xty, &mut b, &partition, delta, lambda);
            if step < 1e-9 {
                break;
            }
        }
        // (ii) K-means on the coefficient-weighted columns
        if lambda > 0.0 && b.iter().any(|&v| v != 0.0) {
            partition = cen_cluster_step(x, &b, &partition);
        }
        let obj = cen_objective(x, y, &b, &partition, delta, lambda);
        if let Some(&last) = trace.last() {
            assert!(
                obj <= last + 1e-8 * (1.0 + last.abs()),
                "objective increased across alternations: {last} -> {obj}"
            );
            if (last - obj).abs() <= 1e-8 * (1.0 + last.abs()) {
                trace.push(obj);
                converged = true;
                break;
            }
        }
        trace.push(obj);
    }

    Ok(CenFit {
        b,
        partition,
        objective_trace: trace,
        delta,
        lambda,
        converged,
        x_center: xs.center,
        x_scale: xs.scale,
        y_center: ys.center,
        y_scale: ys.scale,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array;
    use rand::Rng;

    fn random_matrix(n: usize, p: usize, seed: u64) -> Array2<f64> {
        let mut rng = stream_rng(seed, &[81]);
        Array::from_shape_fn((n, p), |_| rng.random_range(-2.0..2.0))
    }

    #[test]
    fn balanced_partition_sizes_and_determinism() {
        let p1 = random_balanced_partition(10, 5, 3).unwrap();
        assert!(p1.cluster_sizes().iter().all(|&s| s == 2));
        let p2 = random_balanced_partition(7, 3, 4).unwrap();
        let mut sizes = p2.cluster_sizes();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![2, 2, 3]);
        let again = random_balanced_partition(10, 5, 3).unwrap();
        assert_eq!(p1.labels, again.labels);
    }

    #[test]
    fn kmeans_recovers_duplicated_column_groups() {
        let n = 12;
        let mut rng = stream_rng(5, &[82]);
        let s1: Array1<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect::<Vec<_>>().into();
        let s2: Array1<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect::<Vec<_>>().into();
        let mut z = Array2::<f64>::zeros((n, 6));
        for j in 0..3 {
            z.column_mut(j).assign(&s1);
            z.column_mut(j + 3).assign(&s2);
        }
        let part = kmeans_columns(&z, 2, 1, 5).unwrap();
        assert_eq!(part.labels[0], part.labels[1]);
        assert_eq!(part.labels[0], part.labels[2]);
        assert_eq!(part.labels[3], part.labels[4]);
        assert_eq!(part.labels[3], part.labels[5]);
        assert_ne!(part.labels[0], part.labels[3]);
        assert!(wcss_columns(&z, &part) < 1e-20);
    }

    #[test]
    fn kmeans_with_k_equal_p_gives_singletons() {
        let z = random_matrix(6, 4, 7);
        let part = kmeans_columns(&z, 4, 2, 3).unwrap();
        let mut sizes = part.cluster_sizes();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![1, 1, 1, 1]);
        assert!(wcss_columns(&z, &part) < 1e-20);
    }

    #[test]
    fn kmeans_matches_exhaustive_enumeration_on_planted_blocks() {
        // p = 6 columns in two planted groups
        let n = 10;
        let mut rng = stream_rng(9, &[83]);
        let s1: Array1<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect::<Vec<_>>().into();
        let s2: Array1<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect::<Vec<_>>().into();
        let mut z = Array2::<f64>::zeros((n, 6));
        for j in 0..3 {
            for i in 0..n {
                z[[i, j]] = s1[i] + 0.1 * rng.random_range(-1.0..1.0);
                z[[i, j + 3]] = s2[i] + 0.1 * rng.random_range(-1.0..1.0);
            }
        }
        let part = kmeans_columns(&z, 2, 3, 10).unwrap();
        let got = wcss_columns(&z, &part);
        // enumerate all 2-partitions of 6 points (2^5 - 1 nonempty splits)
        let mut best = f64::INFINITY;
        for mask in 1u32..(1 << 5) {
            let mut labels = vec![0usize; 6];
            for j in 1..6 {
                if mask & (1 << (j - 1)) != 0 {
                    labels[j] = 1;
                }
            }
            let cand = Partition::new(labels, 2).unwrap();
            if cand.cluster_sizes().iter().any(|&s| s == 0) {
                continue;
            }
            best = best.min(wcss_columns(&z, &cand));
        }
        assert!((got - best).abs() < 1e-10, "kmeans {got} vs enumeration {best}");
    }

    #[test]
    fn ward_merges_duplicated_columns_first() {
        let n = 8;
        let mut rng = stream_rng(11, &[84]);
        let mut z = random_matrix(n, 5, 12);
        let dup = z.column(0).to_owned();
        z.column_mut(3).assign(&dup);
        let heights = ward_heights(&z);
        assert!(heights[0] < 1e-20, "duplicates should merge at height 0");
        let _ = &mut rng;
    }

    #[test]
    fn ward_with_k_equal_p_gives_singletons() {
        let z = random_matrix(6, 4, 13);
        let part = ward_hac(&z, 4).unwrap();
        let mut sizes = part.cluster_sizes();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![1, 1, 1, 1]);
    }

    #[test]
    fn ward_heights_match_hand_recursion_on_five_points() {
        // 1-D points 0, 1, 3, 7, 20 as single-row columns; squared-distance
        // update worked through the recursion by hand
        let z = ndarray::array![[0.0, 1.0, 3.0, 7.0, 20.0]];
        let heights = ward_heights(&z);
        let expect = [1.0, 25.0 / 3.0, 289.0 / 6.0, 476.1];
        assert_eq!(heights.len(), 4);
        for (h, e) in heights.iter().zip(expect.iter()) {
            assert!((h - e).abs() < 1e-10, "{h} vs {e}");
        }
        // monotone dendrogram
        for w in heights.windows(2) {
            assert!(w[1] >= w[0] - 1e-12);
        }
    }

    #[test]
    fn ward_cut_groups_planted_blocks() {
        let n = 10;
        let mut rng = stream_rng(15, &[85]);
        let s1: Array1<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect::<Vec<_>>().into();
        let s2: Array1<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect::<Vec<_>>().into();
        let mut z = Array2::<f64>::zeros((n, 6));
        for j in 0..3 {
            for i in 0..n {
                z[[i, j]] = s1[i] + 0.05 * rng.random_range(-1.0..1.0);
                z[[i, j + 3]] = s2[i] + 0.05 * rng.random_range(-1.0..1.0);
            }
        }
        let part = ward_hac(&z, 2).unwrap();
        assert_eq!(part.labels[0], part.labels[1]);
        assert_eq!(part.labels[1], part.labels[2]);
        assert_eq!(part.labels[3], part.labels[4]);
        assert_eq!(part.labels[4], part.labels[5]);
        assert_ne!(part.labels[0], part.labels[3]);
    }

    fn toy_regression(n: usize, p: usize, seed: u64) -> Dataset {
        let x = random_matrix(n, p, seed);
        let mut rng = stream_rng(seed, &[86]);
        let y: Array1<f64> = (0..n)
            .map(|i| x[[i, 0]] - 0.7 * x[[i, 1]] + 0.05 * rng.random_range(-1.0..1.0))
            .collect::<Vec<_>>()
            .into();
        Dataset::new(x, y, Task::Regression).unwrap()
    }

    #[test]
    fn crl_delta_above_max_empties_the_model() {
        let d = toy_regression(20, 8, 21);
        let fit = crl_fit(&d, Clusterer::Kmeans, 3, 100.0, 1).unwrap();
        assert_eq!(fit.model_size(), 0);
        assert!(fit.b.iter().all(|&v| v == 0.0));
        // null model predicts the training mean
        let pred = fit.predict(&d.x).unwrap();
        let mean = d.y.sum() / d.n() as f64;
        for v in pred.iter() {
            assert!((v - mean).abs() < 1e-10);
        }
    }

    #[test]
    fn crl_model_size_counts_member_variables() {
        let d = toy_regression(25, 10, 22);
        let fit = crl_fit(&d, Clusterer::Ward, 2, 1e-4, 1).unwrap();
        let sizes = fit.cluster_sizes.clone();
        let selected: usize = fit
            .a
            .iter()
            .zip(sizes.iter())
            .filter(|(&a, _)| a != 0.0)
            .map(|(_, &s)| s)
            .sum();
        assert_eq!(fit.model_size(), selected);
        assert!(fit.model_size() > 0);
    }

    #[test]
    fn cen_with_zero_lambda_matches_plain_lasso() {
        let d = toy_regression(30, 6, 23);
        let xs = standardize(&d.x).unwrap();
        let ys = standardize_response(&d.y, d.task).unwrap();
        let delta_solver = 0.05;
        let n = d.n() as f64;
        // objective scales differ by a factor n between the two conventions
        let cen = cen_fit(&d, 2, delta_solver * n, 0.0, 9).unwrap();
        let lasso = solvers::lasso_fit(&xs.values, &ys.values, delta_solver).unwrap();
        for j in 0..6 {
            assert!(
                (cen.b[j] - lasso.coefficients[j]).abs() < 1e-6,
                "coefficient {j}: {} vs {}",
                cen.b[j],
                lasso.coefficients[j]
            );
        }
    }

    #[test]
    fn cen_with_no_penalties_matches_ols() {
        let d = toy_regression(40, 5, 24);
        let xs = standardize(&d.x).unwrap();
        let ys = standardize_response(&d.y, d.task).unwrap();
        let cen = cen_fit(&d, 2, 0.0, 0.0, 10).unwrap();
        let ols = solvers::ols_fit(&xs.values, &ys.values).unwrap();
        for j in 0..5 {
            assert!((cen.b[j] - ols.coefficients[j]).abs() < 1e-6);
        }
    }

    #[test]
    fn cen_objective_descends_and_converges() {
        for seed in 0..6u64 {
            let d = toy_regression(15, 8, 30 + seed);
            let fit = cen_fit(&d, 3, 0.3, 1.5, seed).unwrap();
            for w in fit.objective_trace.windows(2) {
                assert!(w[1] <= w[0] + 1e-8 * (1.0 + w[0].abs()));
            }
            assert!(fit.converged);
        }
    }

    #[test]
    fn cen_cluster_step_matches_partition_enumeration() {
        // p = 4, K = 2, fixed coefficients: the step must reach the best
        // 2-partition by grouping penalty
        let x = standardize(&random_matrix(12, 4, 40)).unwrap().values;
        let b = Array1::from_vec(vec![1.0, -0.8, 0.5, 1.2]);
        let start = Partition::new(vec![0, 1, 0, 1], 2).unwrap();
        let stepped = cen_cluster_step(&x, &b, &start);
        let got = cen_grouping(&x, &b, &stepped);
        let mut best = f64::INFINITY;
        for mask in 1u32..(1 << 3) {
            let mut labels = vec![0usize; 4];
            for j in 1..4 {
                if mask & (1 << (j - 1)) != 0 {
                    labels[j] = 1;
                }
            }
            let cand = Partition::new(labels, 2).unwrap();
            best = best.min(cen_grouping(&x, &b, &cand));
        }
        assert!((got - best).abs() < 1e-10, "step {got} vs enumeration {best}");
    }

    #[test]
    fn cen_zero_model_skips_clustering() {
        let d = toy_regression(20, 5, 41);
        // delta far above any correlation scale
        let fit = cen_fit(&d, 2, 1e6, 2.0, 3).unwrap();
        assert_eq!(fit.model_size(), 0);
        let init = random_balanced_partition(5, 2, 3).unwrap();
        assert_eq!(fit.partition.labels, init.labels);
    }
}
