//! Model evaluation: prediction error, model size, support recovery and
//! pairwise cluster recovery.

use ndarray::Array1;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Binary confusion counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub true_pos: usize,
    pub true_neg: usize,
    pub false_pos: usize,
    pub false_neg: usize,
}

impl ConfusionCounts {
    pub fn total(&self) -> usize {
        self.true_pos + self.true_neg + self.false_pos + self.false_neg
    }
}

/// One row of evaluation results for a fitted model.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricReport {
    pub msep: f64,
    pub model_size: usize,
    /// Undefined (`None`) when no ground truth is available.
    pub support_mcc: Option<f64>,
    pub cluster_mcc: Option<f64>,
}

/// Mean squared error of prediction.
pub fn msep(y_true: &Array1<f64>, y_pred: &Array1<f64>) -> Result<f64> {
    if y_true.len() != y_pred.len() {
        return Err(Error::LengthMismatch { left: y_true.len(), right: y_pred.len() });
    }
    if y_true.is_empty() {
        return Err(Error::TooFewSamples { needed: 1, got: 0 });
    }
    let n = y_true.len() as f64;
    Ok(y_true
        .iter()
        .zip(y_pred.iter())
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        / n)
}

/// Number of active variables for a per-variable coefficient vector.
pub fn model_size_coefficients(b: &Array1<f64>) -> usize {
    b.iter().filter(|&&v| v != 0.0).count()
}

/// Number of active variables for a per-cluster model: sum of the sizes of
/// clusters whose coefficient is nonzero.
pub fn model_size_clusters(a: &Array1<f64>, cluster_sizes: &[usize]) -> usize {
    a.iter()
        .zip(cluster_sizes.iter())
        .filter(|(&ak, _)| ak != 0.0)
        .map(|(_, &pk)| pk)
        .sum()
}

/// Matthews correlation coefficient. Returns 0 when any marginal is empty
/// (the value of a random classifier).
pub fn mcc(c: ConfusionCounts) -> f64 {
    let tp = c.true_pos as f64;
    let tn = c.true_neg as f64;
    let fp = c.false_pos as f64;
    let fneg = c.false_neg as f64;
    let denom = (tp + fp) * (tp + fneg) * (tn + fp) * (tn + fneg);
    if denom == 0.0 {
        return 0.0;
    }
    (tp * tn - fp * fneg) / denom.sqrt()
}

/// Support-recovery MCC: variables with nonzero coefficients form the
/// positive class on both sides.
pub fn support_mcc(b_hat: &Array1<f64>, b_true: &Array1<f64>) -> Result<f64> {
    if b_hat.len() != b_true.len() {
        return Err(Error::LengthMismatch { left: b_hat.len(), right: b_true.len() });
    }
    let mut c = ConfusionCounts::default();
    for (&h, &t) in b_hat.iter().zip(b_true.iter()) {
        match (h != 0.0, t != 0.0) {
            (true, true) => c.true_pos += 1,
            (false, false) => c.true_neg += 1,
            (true, false) => c.false_pos += 1,
            (false, true) => c.false_neg += 1,
        }
    }
    Ok(mcc(c))
}

/// How removed variables enter the pairwise comparison on the predicted side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnassignedPolicy {
    /// A removed variable is never in the same predicted cluster as anything
    /// (the reported convention; mass removal earns no cluster credit).
    Unlinked,
    /// All removed variables form one predicted cluster, mirroring the
    /// ground-truth convention for inactive variables.
    Linked,
}

/// Pairwise cluster-recovery MCC over all unique variable pairs.
///
/// A pair is predicted-positive when both variables are assigned and share a
/// predicted cluster; true-positive when they share a true cluster.
pub fn cluster_pair_mcc(
    labels_hat: &[Option<usize>],
    labels_true: &[usize],
    policy: UnassignedPolicy,
) -> Result<f64> {
    if labels_hat.len() != labels_true.len() {
        return Err(Error::LengthMismatch { left: labels_hat.len(), right: labels_true.len() });
    }
    let counts = pair_counts(labels_hat, labels_true, policy);
    Ok(mcc(counts))
}

/// Confusion counts over the p(p-1)/2 variable pairs.
pub fn pair_counts(
    labels_hat: &[Option<usize>],
    labels_true: &[usize],
    policy: UnassignedPolicy,
) -> ConfusionCounts {
    let p = labels_hat.len();
    let mut c = ConfusionCounts::default();
    for a in 0..p {
        for b in (a + 1)..p {
            let pred_same = match (labels_hat[a], labels_hat[b]) {
                (Some(x), Some(y)) => x == y,
                (None, None) => policy == UnassignedPolicy::Linked,
                _ => false,
            };
            let true_same = labels_true[a] == labels_true[b];
            match (pred_same, true_same) {
                (true, true) => c.true_pos += 1,
                (false, false) => c.true_neg += 1,
                (true, false) => c.false_pos += 1,
                (false, true) => c.false_neg += 1,
            }
        }
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use proptest::prelude::*;

    #[test]
    fn msep_formula_cases() {
        let y = array![1.0, 2.0];
        assert_eq!(msep(&y, &y).unwrap(), 0.0);
        let shifted = y.mapv(|v| v + 3.0);
        assert!((msep(&y, &shifted).unwrap() - 9.0).abs() < 1e-12);
        let zeros = array![0.0, 0.0];
        assert!((msep(&y, &zeros).unwrap() - 2.5).abs() < 1e-12);
        assert!(matches!(msep(&y, &array![1.0]), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn msep_translation_equivariance() {
        let y = array![0.3, -1.0, 2.0];
        let yh = array![0.1, -0.4, 2.5];
        let base = msep(&y, &yh).unwrap();
        let shifted = msep(&y.mapv(|v| v + 7.0), &yh.mapv(|v| v + 7.0)).unwrap();
        assert!((base - shifted).abs() < 1e-12);
    }

    #[test]
    fn model_size_both_forms() {
        assert_eq!(model_size_coefficients(&array![0.0, 0.0, 0.0]), 0);
        assert_eq!(model_size_coefficients(&array![1.0, 0.0, -0.2]), 2);
        // one selected 7-member cluster
        assert_eq!(model_size_clusters(&array![0.0, 0.4], &[3, 7]), 7);
        assert_eq!(model_size_clusters(&array![0.0, 0.0], &[3, 7]), 0);
        assert_eq!(model_size_clusters(&array![1.0, 0.4], &[3, 7]), 10);
    }

    #[test]
    fn mcc_known_values() {
        let perfect = ConfusionCounts { true_pos: 4, true_neg: 6, false_pos: 0, false_neg: 0 };
        assert_eq!(mcc(perfect), 1.0);
        let c = ConfusionCounts { true_pos: 2, true_neg: 3, false_pos: 1, false_neg: 0 };
        assert!((mcc(c) - 6.0 / 72.0f64.sqrt()).abs() < 1e-12);
        let random = ConfusionCounts { true_pos: 1, true_neg: 1, false_pos: 1, false_neg: 1 };
        assert_eq!(mcc(random), 0.0);
        let degenerate = ConfusionCounts { true_pos: 0, true_neg: 5, false_pos: 0, false_neg: 3 };
        assert_eq!(mcc(degenerate), 0.0);
    }

    #[test]
    fn support_mcc_cases() {
        let mut b_true = Array1::<f64>::zeros(200);
        for j in 0..20 {
            b_true[j] = 1.0;
        }
        assert_eq!(support_mcc(&b_true, &b_true).unwrap(), 1.0);
        let zeros = Array1::<f64>::zeros(200);
        assert_eq!(support_mcc(&zeros, &b_true).unwrap(), 0.0);
        // tp=20, fp=5, fn=0, tn=175
        let mut b_hat = b_true.clone();
        for j in 50..55 {
            b_hat[j] = 0.3;
        }
        let expect = mcc(ConfusionCounts { true_pos: 20, true_neg: 175, false_pos: 5, false_neg: 0 });
        assert!((support_mcc(&b_hat, &b_true).unwrap() - expect).abs() < 1e-12);
    }

    #[test]
    fn cluster_pair_mcc_hand_enumerated() {
        // truth {1,1,2,2}, prediction {1,1,1,2}: tp=1 fp=2 fn=1 tn=2 -> 0
        let truth = vec![0usize, 0, 1, 1];
        let pred = vec![Some(0), Some(0), Some(0), Some(1)];
        let counts = pair_counts(&pred, &truth, UnassignedPolicy::Unlinked);
        assert_eq!(
            counts,
            ConfusionCounts { true_pos: 1, false_pos: 2, false_neg: 1, true_neg: 2 }
        );
        assert_eq!(cluster_pair_mcc(&pred, &truth, UnassignedPolicy::Unlinked).unwrap(), 0.0);
    }

    #[test]
    fn cluster_pair_mcc_perfect_and_degenerate() {
        let truth = vec![0usize, 0, 1, 1, 2];
        let same: Vec<Option<usize>> = truth.iter().map(|&l| Some(l)).collect();
        assert_eq!(cluster_pair_mcc(&same, &truth, UnassignedPolicy::Unlinked).unwrap(), 1.0);
        // all singletons: no predicted positives -> 0 by convention
        let singletons: Vec<Option<usize>> = (0..5).map(Some).collect();
        assert_eq!(
            cluster_pair_mcc(&singletons, &truth, UnassignedPolicy::Unlinked).unwrap(),
            0.0
        );
    }

    #[test]
    fn unassigned_policy_changes_the_counts() {
        let truth = vec![0usize, 0, 1, 1];
        let pred = vec![Some(0), Some(0), None, None];
        let unlinked = pair_counts(&pred, &truth, UnassignedPolicy::Unlinked);
        assert_eq!(unlinked.true_pos, 1);
        assert_eq!(unlinked.false_neg, 1); // the (2,3) pair
        let linked = pair_counts(&pred, &truth, UnassignedPolicy::Linked);
        assert_eq!(linked.true_pos, 2);
        assert_eq!(linked.false_neg, 0);
    }

    proptest! {
        #[test]
        fn mcc_is_class_symmetric(tp in 0usize..30, tn in 0usize..30, fp in 0usize..30, fneg in 0usize..30) {
            let a = mcc(ConfusionCounts { true_pos: tp, true_neg: tn, false_pos: fp, false_neg: fneg });
            let b = mcc(ConfusionCounts { true_pos: tn, true_neg: tp, false_pos: fneg, false_neg: fp });
            prop_assert!((a - b).abs() < 1e-12);
        }

        #[test]
        fn cluster_mcc_invariant_to_relabeling(seed in 0u64..200) {
            use rand::Rng;
            let mut rng = crate::rng::stream_rng(seed, &[71]);
            let p = 8;
            let truth: Vec<usize> = (0..p).map(|_| rng.random_range(0..3)).collect();
            let pred: Vec<Option<usize>> = (0..p)
                .map(|_| {
                    if rng.random_range(0.0..1.0f64) < 0.2 {
                        None
                    } else {
                        Some(rng.random_range(0..3usize))
                    }
                })
                .collect();
            let base = cluster_pair_mcc(&pred, &truth, UnassignedPolicy::Unlinked).unwrap();
            // permute both labelings
            let perm = [2usize, 0, 1];
            let truth2: Vec<usize> = truth.iter().map(|&l| perm[l]).collect();
            let pred2: Vec<Option<usize>> = pred.iter().map(|l| l.map(|v| perm[v])).collect();
            let relabeled = cluster_pair_mcc(&pred2, &truth2, UnassignedPolicy::Unlinked).unwrap();
            prop_assert!((base - relabeled).abs() < 1e-12);
        }
    }
}
