//! DBSCAN over a precomputed distance matrix.

use super::{ClusterAssignment, DistanceMatrix};

const UNVISITED: i64 = -2;
const NOISE: i64 = -1;

/// Density-based clustering: core points have at least `min_pts` neighbors
/// within `eps` (the neighborhood includes the point itself), clusters grow
/// by breadth-first expansion from cores, and sparse points end up labeled
/// `-1` as outliers.
///
/// Deterministic: cluster ids are assigned in discovery order, scanning from
/// the lowest-index unvisited core point.
pub fn dbscan(dm: &DistanceMatrix, eps: f64, min_pts: usize) -> ClusterAssignment {
    debug_assert!(eps > 0.0);
    debug_assert!(min_pts >= 1);
    let n = dm.n();
    let neighborhood =
        |i: usize| -> Vec<usize> { (0..n).filter(|&j| dm.get(i, j) <= eps).collect() };

    let mut labels = vec![UNVISITED; n];
    let mut cluster = 0i64;
    for i in 0..n {
        if labels[i] != UNVISITED {
            continue;
        }
        let neighbors = neighborhood(i);
        if neighbors.len() < min_pts {
            labels[i] = NOISE;
            continue;
        }
        labels[i] = cluster;
        let mut queue: std::collections::VecDeque<usize> = neighbors.into();
        while let Some(q) = queue.pop_front() {
            if labels[q] == NOISE {
                // Border point reached from a core: joins the cluster.
                labels[q] = cluster;
            }
            if labels[q] != UNVISITED {
                continue;
            }
            labels[q] = cluster;
            let q_neighbors = neighborhood(q);
            if q_neighbors.len() >= min_pts {
                queue.extend(q_neighbors);
            }
        }
        cluster += 1;
    }

    ClusterAssignment {
        labels,
        centroids: None,
    }
}

/// The documented parameter heuristic: eps as the median 4th-nearest-neighbor
/// distance (self excluded) and `min_pts = 4`.
pub fn suggest_dbscan_params(dm: &DistanceMatrix) -> (f64, usize) {
    const MIN_PTS: usize = 4;
    let n = dm.n();
    let mut fourth: Vec<f64> = (0..n)
        .map(|i| {
            let mut row: Vec<f64> = (0..n).filter(|&j| j != i).map(|j| dm.get(i, j)).collect();
            row.sort_by(f64::total_cmp);
            row.get(MIN_PTS - 1)
                .copied()
                .unwrap_or_else(|| row.last().copied().unwrap_or(1.0))
        })
        .collect();
    fourth.sort_by(f64::total_cmp);
    let eps = fourth[fourth.len() / 2].max(f64::MIN_POSITIVE);
    (eps, MIN_PTS)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytics::pairwise_matrix;

    fn dm_from_points(points: &[(f64, f64)]) -> DistanceMatrix {
        pairwise_matrix(points, |a, b| {
            Ok(((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt())
        })
        .unwrap()
    }

    #[test]
    fn identical_points_form_one_cluster_without_noise() {
        let points = vec![(1.0, 1.0); 6];
        let dm = dm_from_points(&points);
        let result = dbscan(&dm, 0.5, 4);
        assert_eq!(result.labels, vec![0; 6]);
        assert!(result.outliers().is_empty());
        assert_eq!(result.cluster_count(), 1);
    }

    #[test]
    fn far_point_is_noise() {
        let mut points = vec![(0.0, 0.0), (0.1, 0.0), (0.0, 0.1), (0.1, 0.1)];
        points.push((100.0, 100.0));
        let dm = dm_from_points(&points);
        let result = dbscan(&dm, 0.5, 4);
        assert_eq!(result.labels[..4], [0, 0, 0, 0]);
        assert_eq!(result.labels[4], -1);
        assert_eq!(result.outliers(), vec![4]);
    }

    #[test]
    fn border_point_joins_the_earliest_discovered_cluster() {
        // Three cores at x = 0 +- 0.1 and a border point at x = 0.5 that is
        // within eps of a core but has too few neighbors to be core itself.
        let points = [(0.0, 0.0), (0.1, 0.0), (-0.1, 0.0), (0.5, 0.0), (10.0, 0.0)];
        let dm = dm_from_points(&points);
        let result = dbscan(&dm, 0.55, 3);
        assert_eq!(result.labels[..3], [0, 0, 0]);
        assert_eq!(result.labels[3], 0, "border point joins cluster 0");
        assert_eq!(result.labels[4], -1);
    }

    #[test]
    fn relabeling_invariant_under_permutation() {
        use rand::{seq::SliceRandom, SeedableRng};
        let points: Vec<(f64, f64)> = vec![
            (0.0, 0.0),
            (0.2, 0.1),
            (0.1, 0.2),
            (5.0, 5.0),
            (5.2, 5.1),
            (5.1, 5.2),
            (20.0, 0.0),
        ];
        let dm = dm_from_points(&points);
        let base = dbscan(&dm, 0.6, 3);

        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let mut perm: Vec<usize> = (0..points.len()).collect();
            perm.shuffle(&mut rng);
            let permuted = dbscan(&dm.permuted(&perm), 0.6, 3);
            // The noise SET is exactly invariant.
            let noise_base: std::collections::BTreeSet<usize> =
                base.outliers().into_iter().collect();
            let noise_perm: std::collections::BTreeSet<usize> =
                permuted.outliers().into_iter().map(|i| perm[i]).collect();
            assert_eq!(noise_base, noise_perm);
            // Cluster partitions agree up to relabeling.
            for i in 0..points.len() {
                for j in 0..points.len() {
                    let same_base = base.labels[i] >= 0 && base.labels[i] == base.labels[j];
                    let (pi, pj) = (
                        perm.iter().position(|&p| p == i).unwrap(),
                        perm.iter().position(|&p| p == j).unwrap(),
                    );
                    let same_perm =
                        permuted.labels[pi] >= 0 && permuted.labels[pi] == permuted.labels[pj];
                    assert_eq!(same_base, same_perm);
                }
            }
        }
    }

    #[test]
    fn suggested_params_are_sane() {
        let points: Vec<(f64, f64)> = (0..12).map(|i| (i as f64 * 0.1, 0.0)).collect();
        let dm = dm_from_points(&points);
        let (eps, min_pts) = suggest_dbscan_params(&dm);
        assert_eq!(min_pts, 4);
        assert!(eps > 0.0);
        // 4th nearest neighbor along the line is 0.2 or 0.3 away; the median
        // sits between.
        assert!(eps <= 0.5);
    }
}
