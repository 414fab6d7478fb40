//! k-nearest-neighbors classification over a precomputed distance matrix,
//! with plain or grouped leave-one-out validation.

use super::{AnalyticsError, DistanceMatrix};

/// Which items are hidden from the candidate pool when classifying item i.
#[derive(Debug, Clone, Copy)]
pub enum Holdout<'a> {
    /// Only item i itself is held out.
    LeaveOneOut,
    /// Every item sharing item i's group id is held out (e.g. all streams of
    /// one host when classifying user roles).
    LeaveGroupOut(&'a [usize]),
}

/// Predictions and per-class F1 scores of a kNN run.
#[derive(Debug, Clone, PartialEq)]
pub struct KnnReport {
    pub predictions: Vec<usize>,
    /// `(class, f1)` for every class present in the true labels, ascending.
    pub per_class_f1: Vec<(usize, f64)>,
    pub macro_f1: f64,
}

/// Classify every item from its K nearest non-held-out neighbors by majority
/// vote.
///
/// Vote ties break toward the label with the smaller summed distance among
/// its voters, then toward the lowest label id — fully deterministic.
pub fn knn_classify(
    dm: &DistanceMatrix,
    labels: &[usize],
    k: usize,
    holdout: Holdout,
) -> Result<KnnReport, AnalyticsError> {
    let n = dm.n();
    if labels.len() != n {
        return Err(AnalyticsError::LabelLengthMismatch {
            labels: labels.len(),
            n,
        });
    }
    if k == 0 {
        return Err(AnalyticsError::KZero);
    }
    if let Holdout::LeaveGroupOut(groups) = holdout {
        if groups.len() != n {
            return Err(AnalyticsError::LabelLengthMismatch {
                labels: groups.len(),
                n,
            });
        }
    }

    let mut predictions = Vec::with_capacity(n);
    for i in 0..n {
        let mut candidates: Vec<(f64, usize)> = (0..n)
            .filter(|&j| match holdout {
                Holdout::LeaveOneOut => j != i,
                Holdout::LeaveGroupOut(groups) => groups[j] != groups[i],
            })
            .map(|j| (dm.get(i, j), j))
            .collect();
        if candidates.len() < k {
            return Err(AnalyticsError::FoldTooSmall {
                candidates: candidates.len(),
                k,
            });
        }
        candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        candidates.truncate(k);

        // votes[label] = (count, summed distance)
        let mut votes: std::collections::BTreeMap<usize, (usize, f64)> = Default::default();
        for &(d, j) in &candidates {
            let slot = votes.entry(labels[j]).or_insert((0, 0.0));
            slot.0 += 1;
            slot.1 += d;
        }
        let winner = votes
            .iter()
            .min_by(|(la, (ca, sa)), (lb, (cb, sb))| {
                cb.cmp(ca).then(sa.total_cmp(sb)).then(la.cmp(lb))
            })
            .map(|(&label, _)| label)
            .expect("k >= 1 voters");
        predictions.push(winner);
    }

    let mut classes: Vec<usize> = labels.to_vec();
    classes.sort_unstable();
    classes.dedup();
    let mut per_class_f1 = Vec::with_capacity(classes.len());
    for &class in &classes {
        let tp = predictions
            .iter()
            .zip(labels)
            .filter(|(&p, &t)| p == class && t == class)
            .count() as f64;
        let fp = predictions
            .iter()
            .zip(labels)
            .filter(|(&p, &t)| p == class && t != class)
            .count() as f64;
        let fn_ = predictions
            .iter()
            .zip(labels)
            .filter(|(&p, &t)| p != class && t == class)
            .count() as f64;
        let f1 = if tp == 0.0 {
            0.0
        } else {
            2.0 * tp / (2.0 * tp + fp + fn_)
        };
        per_class_f1.push((class, f1));
    }
    let macro_f1 = per_class_f1.iter().map(|(_, f)| f).sum::<f64>() / per_class_f1.len() as f64;

    Ok(KnnReport {
        predictions,
        per_class_f1,
        macro_f1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytics::pairwise_matrix;

    fn euclidean_dm(points: &[f64]) -> DistanceMatrix {
        pairwise_matrix(points, |a, b| Ok((a - b).abs())).unwrap()
    }

    #[test]
    fn two_well_separated_pairs_classify_perfectly_at_k1() {
        let dm = euclidean_dm(&[0.0, 0.1, 10.0, 10.1]);
        let labels = [0, 0, 1, 1];
        let report = knn_classify(&dm, &labels, 1, Holdout::LeaveOneOut).unwrap();
        assert_eq!(report.predictions, labels);
        assert_eq!(report.macro_f1, 1.0);
        assert_eq!(report.per_class_f1, vec![(0, 1.0), (1, 1.0)]);
    }

    #[test]
    fn degenerate_tie_breaks_deterministically() {
        // Four points where the K=3 neighborhood of item 0 votes 1:1:1 over
        // three labels; summed distance then lowest id decide.
        let values = vec![
            0.0, 1.0, 2.0, 3.0, //
            1.0, 0.0, 9.0, 9.0, //
            2.0, 9.0, 0.0, 9.0, //
            3.0, 9.0, 9.0, 0.0,
        ];
        let dm = DistanceMatrix::from_values(4, values).unwrap();
        let labels = [9, 5, 4, 3];
        let report = knn_classify(&dm, &labels, 3, Holdout::LeaveOneOut).unwrap();
        // Voters for item 0: items 1 (label 5, d=1), 2 (label 4, d=2),
        // 3 (label 3, d=3). One vote each; the smallest summed distance wins.
        assert_eq!(report.predictions[0], 5);
    }

    #[test]
    fn leave_group_out_hides_the_whole_group() {
        // Two groups of two; within-group distances are tiny, so LOO would
        // trivially succeed. Group holdout forces voting across groups.
        let dm = euclidean_dm(&[0.0, 0.1, 1.0, 1.1]);
        let labels = [0, 0, 0, 0];
        let groups = [0, 0, 1, 1];
        let report = knn_classify(&dm, &labels, 2, Holdout::LeaveGroupOut(&groups)).unwrap();
        assert_eq!(report.predictions, labels);
        // With both same-group candidates hidden, K larger than the
        // remaining pool is an error.
        assert!(matches!(
            knn_classify(&dm, &labels, 3, Holdout::LeaveGroupOut(&groups)),
            Err(AnalyticsError::FoldTooSmall { .. })
        ));
    }

    #[test]
    fn predictions_invariant_under_monotone_distance_transform() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        let points: Vec<f64> = (0..24).map(|_| rng.random_range(0.0..100.0)).collect();
        let labels: Vec<usize> = (0..24).map(|i| i % 3).collect();
        let dm = euclidean_dm(&points);
        let transformed =
            DistanceMatrix::from_fn::<std::convert::Infallible>(24, |i, j| Ok(dm.get(i, j).sqrt()))
                .unwrap();
        // K = 1: the vote depends only on the argmin, which any strictly
        // increasing transform preserves.
        let a = knn_classify(&dm, &labels, 1, Holdout::LeaveOneOut).unwrap();
        let b = knn_classify(&transformed, &labels, 1, Holdout::LeaveOneOut).unwrap();
        assert_eq!(a.predictions, b.predictions);

        // K = 3 with decisive majorities: two tight blobs with distinct labels.
        let blob_points: Vec<f64> = vec![0.0, 0.2, 0.4, 0.6, 50.0, 50.2, 50.4, 50.6];
        let blob_labels = vec![0, 0, 0, 0, 1, 1, 1, 1];
        let dm = euclidean_dm(&blob_points);
        let transformed =
            DistanceMatrix::from_fn::<std::convert::Infallible>(8, |i, j| Ok(dm.get(i, j).powi(3)))
                .unwrap();
        let a = knn_classify(&dm, &blob_labels, 3, Holdout::LeaveOneOut).unwrap();
        let b = knn_classify(&transformed, &blob_labels, 3, Holdout::LeaveOneOut).unwrap();
        assert_eq!(a.predictions, b.predictions);
        assert_eq!(a.macro_f1, 1.0);
    }
}
