//! Analytics over distance matrices: pairwise matrices, kNN classification,
//! k-means with elbow selection, DBSCAN, and metric MDS.
//!
//! Everything here consumes either items plus a metric closure or a
//! precomputed [`DistanceMatrix`], so the same machinery runs over entries,
//! streams, or centroids. All randomized procedures draw from an explicit
//! seed and are deterministic for a fixed seed.

mod dbscan;
mod kmeans;
mod knn;
mod matrix;
mod mds;

pub use dbscan::{dbscan, suggest_dbscan_params};
pub use kmeans::{elbow, kmeans, KmeansOptions, KmeansRun, SeedingLaw};
pub use knn::{knn_classify, Holdout, KnnReport};
pub use matrix::{pairwise_matrix, DistanceMatrix};
pub use mds::{mmds, Embedding2D};

use thiserror::Error;

use crate::aggregate::AggregateError;
use crate::entry::{LogEntry, LogStream};
use crate::metrics::MetricError;

#[derive(Debug, Error)]
pub enum AnalyticsError {
    #[error("need at least {needed} items, got {got}")]
    TooFewItems { needed: usize, got: usize },
    #[error("matrix is not symmetric with a zero diagonal at ({i}, {j})")]
    NotSymmetric { i: usize, j: usize },
    #[error("labels length {labels} does not match matrix size {n}")]
    LabelLengthMismatch { labels: usize, n: usize },
    #[error("k = {k} exceeds the number of items {n}")]
    KTooLarge { k: usize, n: usize },
    #[error("k must be at least 1")]
    KZero,
    #[error("a holdout fold leaves only {candidates} candidates for K = {k}")]
    FoldTooSmall { candidates: usize, k: usize },
    #[error("stream of {len} entries is shorter than the window length {m}")]
    StreamTooShort { len: usize, m: usize },
    #[error("window length must be at least 1")]
    WindowZero,
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Aggregate(#[from] AggregateError),
}

/// Cluster labels for n items. Labels of real clusters form the contiguous
/// range `0..k`; `-1` marks DBSCAN outliers.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterAssignment {
    pub labels: Vec<i64>,
    pub centroids: Option<Vec<crate::aggregate::Centroid>>,
}

impl ClusterAssignment {
    /// Number of non-outlier clusters.
    pub fn cluster_count(&self) -> usize {
        self.labels
            .iter()
            .filter(|&&l| l >= 0)
            .map(|&l| l as usize + 1)
            .max()
            .unwrap_or(0)
    }

    /// Indices labeled as outliers.
    pub fn outliers(&self) -> Vec<usize> {
        self.labels
            .iter()
            .enumerate()
            .filter(|(_, &l)| l == -1)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Split a stream into consecutive non-overlapping m-length windows, in time
/// order; a final remainder shorter than m is dropped.
pub fn subsequences(stream: &LogStream, m: usize) -> Result<Vec<&[LogEntry]>, AnalyticsError> {
    if m == 0 {
        return Err(AnalyticsError::WindowZero);
    }
    if stream.entries.len() < m {
        return Err(AnalyticsError::StreamTooShort {
            len: stream.entries.len(),
            m,
        });
    }
    Ok(stream.entries.chunks_exact(m).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entry::LogEntry;

    fn stream(n: usize) -> LogStream {
        LogStream {
            host: "h".into(),
            entries: (0..n)
                .map(|i| LogEntry {
                    time: i as f64,
                    values: vec![],
                })
                .collect(),
        }
    }

    #[test]
    fn subsequences_partition_the_stream_prefix() {
        let s = stream(21);
        let windows = subsequences(&s, 7).unwrap();
        assert_eq!(windows.len(), 3);

        let s = stream(20);
        let windows = subsequences(&s, 7).unwrap();
        assert_eq!(windows.len(), 2);
        // The windows tile the first 14 entries exactly.
        let tiled: Vec<f64> = windows
            .iter()
            .flat_map(|w| w.iter().map(|e| e.time))
            .collect();
        assert_eq!(tiled, (0..14).map(|i| i as f64).collect::<Vec<_>>());

        let windows = subsequences(&s, 1).unwrap();
        assert_eq!(windows.len(), 20);

        assert!(matches!(
            subsequences(&stream(3), 7),
            Err(AnalyticsError::StreamTooShort { .. })
        ));
        assert!(matches!(
            subsequences(&s, 0),
            Err(AnalyticsError::WindowZero)
        ));
    }
}
