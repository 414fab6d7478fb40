//! Metric multidimensional scaling to 2-D by SMACOF stress majorization.
//!
//! SMACOF minimizes the raw stress `sum_{i<j} (d_ij - |y_i - y_j|)^2` by
//! iterating the Guttman transform; majorization guarantees the stress never
//! increases from one iteration to the next, which makes the embedding an
//! honest picture of the distance matrix whenever the final stress is small.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{AnalyticsError, DistanceMatrix};

/// A 2-D configuration with its stress diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding2D {
    /// One (x, y) coordinate per item, centered at the origin.
    pub coordinates: Vec<[f64; 2]>,
    /// Final raw stress.
    pub stress: f64,
    /// Raw stress after each iteration; nonincreasing.
    pub stress_trace: Vec<f64>,
    pub iterations: usize,
}

impl Embedding2D {
    /// Distance between two embedded items.
    pub fn embedded_distance(&self, i: usize, j: usize) -> f64 {
        let (a, b) = (self.coordinates[i], self.coordinates[j]);
        ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
    }
}

fn raw_stress(coords: &[[f64; 2]], dm: &DistanceMatrix) -> f64 {
    let n = coords.len();
    let mut stress = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let delta = embedded(coords, i, j) - dm.get(i, j);
            stress += delta * delta;
        }
    }
    stress
}

#[inline]
fn embedded(coords: &[[f64; 2]], i: usize, j: usize) -> f64 {
    let (a, b) = (coords[i], coords[j]);
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

fn center(coords: &mut [[f64; 2]]) {
    let n = coords.len() as f64;
    for dim in 0..2 {
        let mean: f64 = coords.iter().map(|c| c[dim]).sum::<f64>() / n;
        for c in coords.iter_mut() {
            c[dim] -= mean;
        }
    }
}

/// Embed a distance matrix into the plane with SMACOF.
///
/// Starts from a seeded random configuration and stops when the relative
/// stress improvement drops under `tol` or after `max_iter` iterations.
/// Defaults used by the command line: `max_iter = 500`, `tol = 1e-8`.
pub fn mmds(
    dm: &DistanceMatrix,
    seed: u64,
    max_iter: usize,
    tol: f64,
) -> Result<Embedding2D, AnalyticsError> {
    let n = dm.n();
    if n < 3 {
        return Err(AnalyticsError::TooFewItems { needed: 3, got: n });
    }

    // Random initialization scaled to the data diameter.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut diameter: f64 = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            diameter = diameter.max(dm.get(i, j));
        }
    }
    if diameter == 0.0 {
        diameter = 1.0;
    }
    let mut coords: Vec<[f64; 2]> = (0..n)
        .map(|_| {
            [
                (rng.random::<f64>() - 0.5) * diameter,
                (rng.random::<f64>() - 0.5) * diameter,
            ]
        })
        .collect();
    center(&mut coords);

    let mut stress = raw_stress(&coords, dm);
    let mut stress_trace = Vec::new();
    let mut iterations = 0;

    for _ in 0..max_iter {
        // Guttman transform with uniform weights: X' = (1/n) B(X) X.
        let mut next = vec![[0.0f64; 2]; n];
        for i in 0..n {
            let mut row_sum = 0.0;
            let mut acc = [0.0f64; 2];
            for j in 0..n {
                if i == j {
                    continue;
                }
                let e = embedded(&coords, i, j);
                let b = if e > 1e-12 { dm.get(i, j) / e } else { 0.0 };
                row_sum += b;
                acc[0] -= b * coords[j][0];
                acc[1] -= b * coords[j][1];
            }
            next[i][0] = (row_sum * coords[i][0] + acc[0]) / n as f64;
            next[i][1] = (row_sum * coords[i][1] + acc[1]) / n as f64;
        }
        center(&mut next);
        coords = next;
        iterations += 1;

        let new_stress = raw_stress(&coords, dm);
        stress_trace.push(new_stress);
        let improved = stress - new_stress;
        let done = new_stress == 0.0 || improved <= tol * stress.max(f64::MIN_POSITIVE);
        stress = new_stress;
        if done {
            break;
        }
    }

    Ok(Embedding2D {
        coordinates: coords,
        stress,
        stress_trace,
        iterations,
    })
}
