//! Symmetric pairwise distance matrices.

use super::AnalyticsError;

/// A symmetric n-by-n matrix of nonnegative distances with a zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    values: Vec<f64>,
}

impl DistanceMatrix {
    /// Fill from a metric evaluated on the upper triangle and mirrored.
    pub fn from_fn<E>(
        n: usize,
        mut d: impl FnMut(usize, usize) -> Result<f64, E>,
    ) -> Result<Self, E> {
        let mut values = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let v = d(i, j)?;
                values[i * n + j] = v;
                values[j * n + i] = v;
            }
        }
        Ok(DistanceMatrix { n, values })
    }

    /// Wrap a row-major value buffer, checking symmetry and the zero
    /// diagonal within 1e-9.
    pub fn from_values(n: usize, values: Vec<f64>) -> Result<Self, AnalyticsError> {
        assert_eq!(values.len(), n * n, "value buffer must be n*n");
        for i in 0..n {
            if values[i * n + i].abs() > 1e-9 {
                return Err(AnalyticsError::NotSymmetric { i, j: i });
            }
            for j in (i + 1)..n {
                if (values[i * n + j] - values[j * n + i]).abs() > 1e-9 {
                    return Err(AnalyticsError::NotSymmetric { i, j });
                }
            }
        }
        Ok(DistanceMatrix { n, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    /// Distances from item i to every item, including the zero self-distance.
    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n..(i + 1) * self.n]
    }

    /// Reorder items by a permutation: entry (i, j) of the result is the
    /// distance between `perm[i]` and `perm[j]`.
    pub fn permuted(&self, perm: &[usize]) -> DistanceMatrix {
        assert_eq!(perm.len(), self.n);
        let mut values = vec![0.0; self.n * self.n];
        for i in 0..self.n {
            for j in 0..self.n {
                values[i * self.n + j] = self.get(perm[i], perm[j]);
            }
        }
        DistanceMatrix { n: self.n, values }
    }
}

/// Pairwise distance matrix of a list of items under a metric closure.
pub fn pairwise_matrix<T>(
    items: &[T],
    mut d: impl FnMut(&T, &T) -> Result<f64, AnalyticsError>,
) -> Result<DistanceMatrix, AnalyticsError> {
    if items.len() < 2 {
        return Err(AnalyticsError::TooFewItems {
            needed: 2,
            got: items.len(),
        });
    }
    DistanceMatrix::from_fn(items.len(), |i, j| d(&items[i], &items[j]))
}
