//! Lloyd's k-means over log entries under the entry metric, with
//! inverse-distance seeding and elbow-method support.
//!
//! Items are entries (or centroid pseudo-entries); cluster centers are
//! [`Centroid`] aggregates, so categorical centers stay readable as
//! per-category fractions and string attributes work through the multiset
//! workaround.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{AnalyticsError, ClusterAssignment};
use crate::aggregate::{centroid, d_to_centroid, Centroid};
use crate::entry::LogEntry;
use crate::metrics::d_entry;
use crate::schema::Schema;

/// How successive seeds are drawn relative to the ones already chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SeedingLaw {
    /// Probability inversely proportional to the distance to the closest
    /// existing seed (the default).
    #[default]
    InverseDistance,
    /// Probability proportional to the squared distance to the closest
    /// existing seed, as in standard k-means++.
    SquaredDistance,
}

#[derive(Debug, Clone)]
pub struct KmeansOptions {
    pub k: usize,
    pub seed: u64,
    pub seeding: SeedingLaw,
    pub max_iter: usize,
}

impl KmeansOptions {
    pub fn new(k: usize, seed: u64) -> Self {
        KmeansOptions {
            k,
            seed,
            seeding: SeedingLaw::default(),
            max_iter: 100,
        }
    }

    pub fn seeding(mut self, law: SeedingLaw) -> Self {
        self.seeding = law;
        self
    }
}

/// Result of one k-means run.
#[derive(Debug, Clone)]
pub struct KmeansRun {
    pub assignment: ClusterAssignment,
    /// Final within-cluster sum of squares.
    pub wcss: f64,
    /// WCSS after each Lloyd iteration (assignment + centroid update).
    pub wcss_trace: Vec<f64>,
    pub iterations: usize,
}

const SEED_EPSILON: f64 = 1e-12;

fn choose_seeds(
    items: &[LogEntry],
    schema: &Schema,
    k: usize,
    law: SeedingLaw,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<usize>, AnalyticsError> {
    let n = items.len();
    let mut seeds = Vec::with_capacity(k);
    let mut is_seed = vec![false; n];
    let first = rng.random_range(0..n);
    seeds.push(first);
    is_seed[first] = true;

    // Distance of every item to its closest existing seed.
    let mut d_min: Vec<f64> = (0..n)
        .map(|i| d_entry(&items[i], &items[first], schema).map_err(AnalyticsError::from))
        .collect::<Result<_, _>>()?;

    while seeds.len() < k {
        let weights: Vec<f64> = (0..n)
            .map(|i| {
                if is_seed[i] {
                    0.0
                } else {
                    match law {
                        SeedingLaw::InverseDistance => 1.0 / (SEED_EPSILON + d_min[i]),
                        SeedingLaw::SquaredDistance => d_min[i] * d_min[i],
                    }
                }
            })
            .collect();
        let total: f64 = weights.iter().sum();
        let choice = if total > 0.0 {
            let r = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut picked = None;
            for (i, &w) in weights.iter().enumerate() {
                acc += w;
                if w > 0.0 && r < acc {
                    picked = Some(i);
                    break;
                }
            }
            picked.unwrap_or_else(|| weights.iter().rposition(|&w| w > 0.0).expect("total > 0"))
        } else {
            // Every remaining candidate coincides with a seed; take the
            // first of them.
            (0..n).find(|&i| !is_seed[i]).expect("k <= n")
        };
        seeds.push(choice);
        is_seed[choice] = true;
        for i in 0..n {
            let d = d_entry(&items[i], &items[choice], schema)?;
            if d < d_min[i] {
                d_min[i] = d;
            }
        }
    }
    Ok(seeds)
}

/// Cluster entries into k bins with Lloyd iterations under the entry metric.
///
/// Seeding follows the configured law; Lloyd assigns each item to the
/// nearest centroid by [`d_to_centroid`], recomputes centroids, and stops
/// when the assignment is fixed or after `max_iter` iterations. An empty
/// cluster is re-seeded at the point farthest from its nearest centroid.
pub fn kmeans(
    items: &[LogEntry],
    schema: &Schema,
    opts: &KmeansOptions,
) -> Result<KmeansRun, AnalyticsError> {
    let n = items.len();
    if opts.k == 0 {
        return Err(AnalyticsError::KZero);
    }
    if opts.k > n {
        return Err(AnalyticsError::KTooLarge { k: opts.k, n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let seeds = choose_seeds(items, schema, opts.k, opts.seeding, &mut rng)?;
    let mut centroids: Vec<Centroid> = seeds
        .iter()
        .map(|&i| centroid(std::slice::from_ref(&items[i]), schema))
        .collect::<Result<_, _>>()?;

    let mut labels: Vec<usize> = vec![usize::MAX; n];
    let mut wcss_trace = Vec::new();
    let mut iterations = 0;

    for _ in 0..opts.max_iter {
        // Assignment step: nearest centroid, lowest index on ties.
        let mut new_labels = Vec::with_capacity(n);
        let mut nearest_d = Vec::with_capacity(n);
        for item in items {
            let mut best = (0usize, f64::INFINITY);
            for (j, c) in centroids.iter().enumerate() {
                let d = d_to_centroid(item, c, schema)?;
                if d < best.1 {
                    best = (j, d);
                }
            }
            new_labels.push(best.0);
            nearest_d.push(best.1);
        }

        // Re-seed empty clusters at the farthest point from its nearest
        // centroid, one point per empty cluster.
        let mut counts = vec![0usize; opts.k];
        for &l in &new_labels {
            counts[l] += 1;
        }
        let mut stolen = vec![false; n];
        for j in 0..opts.k {
            if counts[j] > 0 {
                continue;
            }
            let farthest = (0..n)
                .filter(|&i| !stolen[i] && counts[new_labels[i]] > 1)
                .max_by(|&a, &b| nearest_d[a].total_cmp(&nearest_d[b]))
                .expect("a nonempty cluster with at least two members exists");
            counts[new_labels[farthest]] -= 1;
            new_labels[farthest] = j;
            counts[j] = 1;
            stolen[farthest] = true;
        }

        if new_labels == labels {
            break;
        }
        labels = new_labels;

        // Update step: recompute each centroid from its members.
        let mut members: Vec<Vec<LogEntry>> = vec![Vec::new(); opts.k];
        for (item, &l) in items.iter().zip(&labels) {
            members[l].push(item.clone());
        }
        centroids = members
            .iter()
            .map(|m| centroid(m, schema))
            .collect::<Result<_, _>>()?;

        let mut wcss = 0.0;
        for (item, &l) in items.iter().zip(&labels) {
            let d = d_to_centroid(item, &centroids[l], schema)?;
            wcss += d * d;
        }
        wcss_trace.push(wcss);
        iterations += 1;
    }

    let wcss = wcss_trace.last().copied().unwrap_or(0.0);
    Ok(KmeansRun {
        assignment: ClusterAssignment {
            labels: labels.iter().map(|&l| l as i64).collect(),
            centroids: Some(centroids),
        },
        wcss,
        wcss_trace,
        iterations,
    })
}

fn mix_seed(seed: u64, k: usize, restart: usize) -> u64 {
    // splitmix64 over the (seed, k, restart) triple.
    let mut z = seed
        .wrapping_add((k as u64).wrapping_mul(0x9E3779B97F4A7C15))
        .wrapping_add((restart as u64).wrapping_mul(0xBF58476D1CE4E5B9));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Within-cluster sum of squares as a function of k, best of `restarts`
/// seeded runs per k — the data behind an elbow plot.
pub fn elbow(
    items: &[LogEntry],
    schema: &Schema,
    k_range: std::ops::RangeInclusive<usize>,
    seed: u64,
    restarts: usize,
) -> Result<Vec<(usize, f64)>, AnalyticsError> {
    let mut out = Vec::new();
    let mut best_prev: Option<KmeansRun> = None;
    for k in k_range {
        let mut best: Option<KmeansRun> = None;
        for r in 0..restarts.max(1) {
            let opts = KmeansOptions::new(k, mix_seed(seed, k, r));
            let run = kmeans(items, schema, &opts)?;
            if best.as_ref().is_none_or(|b| run.wcss < b.wcss) {
                best = Some(run);
            }
        }
        let mut best = best.expect("at least one restart");
        // A k-solution can never be better than the best (k-1)-solution
        // refined by splitting: warm-start one extra run from the previous
        // best assignment with its worst-fitting point split off.
        if let Some(prev) = &best_prev {
            if let Some(run) = refine_from_previous(items, schema, prev, k)? {
                if run.wcss < best.wcss {
                    best = run;
                }
            }
        }
        out.push((k, best.wcss));
        best_prev = Some(best);
    }
    Ok(out)
}

/// One Lloyd descent for k clusters started from a (k-1)-cluster assignment
/// with the point farthest from its centroid promoted to its own cluster.
fn refine_from_previous(
    items: &[LogEntry],
    schema: &Schema,
    prev: &KmeansRun,
    k: usize,
) -> Result<Option<KmeansRun>, AnalyticsError> {
    let n = items.len();
    if k > n || prev.assignment.labels.len() != n || k < 2 {
        return Ok(None);
    }
    let Some(prev_centroids) = &prev.assignment.centroids else {
        return Ok(None);
    };
    if prev_centroids.len() != k - 1 {
        return Ok(None);
    }
    let mut labels: Vec<usize> = prev.assignment.labels.iter().map(|&l| l as usize).collect();
    let mut worst = (0usize, f64::NEG_INFINITY);
    let mut counts = vec![0usize; k - 1];
    for &l in &labels {
        counts[l] += 1;
    }
    for (i, &l) in labels.iter().enumerate() {
        if counts[l] < 2 {
            continue;
        }
        let d = d_to_centroid(&items[i], &prev_centroids[l], schema)?;
        if d > worst.1 {
            worst = (i, d);
        }
    }
    if worst.1 == f64::NEG_INFINITY {
        return Ok(None);
    }
    labels[worst.0] = k - 1;

    // Lloyd descent from this assignment, keeping only consistent
    // (labels, centroids, wcss) snapshots.
    let mut snapshot: Option<(Vec<usize>, Vec<Centroid>, f64)> = None;
    let mut wcss_trace = Vec::new();
    let mut iterations = 0;
    for _ in 0..100 {
        let mut members: Vec<Vec<LogEntry>> = vec![Vec::new(); k];
        for (item, &l) in items.iter().zip(&labels) {
            members[l].push(item.clone());
        }
        if members.iter().any(|m| m.is_empty()) {
            break;
        }
        let centroids: Vec<Centroid> = members
            .iter()
            .map(|m| centroid(m, schema))
            .collect::<Result<_, _>>()?;
        let mut wcss = 0.0;
        for (item, &l) in items.iter().zip(&labels) {
            let d = d_to_centroid(item, &centroids[l], schema)?;
            wcss += d * d;
        }
        wcss_trace.push(wcss);
        iterations += 1;

        let mut new_labels = Vec::with_capacity(n);
        for item in items {
            let mut best = (0usize, f64::INFINITY);
            for (j, c) in centroids.iter().enumerate() {
                let d = d_to_centroid(item, c, schema)?;
                if d < best.1 {
                    best = (j, d);
                }
            }
            new_labels.push(best.0);
        }
        let converged = new_labels == labels;
        if snapshot.as_ref().is_none_or(|(_, _, w)| wcss < *w) {
            snapshot = Some((labels.clone(), centroids, wcss));
        }
        if converged {
            break;
        }
        labels = new_labels;
    }
    let Some((labels, centroids, wcss)) = snapshot else {
        return Ok(None);
    };
    Ok(Some(KmeansRun {
        assignment: ClusterAssignment {
            labels: labels.iter().map(|&l| l as i64).collect(),
            centroids: Some(centroids),
        },
        wcss,
        wcss_trace,
        iterations,
    }))
}
