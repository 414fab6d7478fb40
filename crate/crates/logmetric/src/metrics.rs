//! The metric space: per-attribute metrics, the entry metric, and the two
//! stream metrics.
//!
//! Attribute metrics all map into `[0, 1]`:
//!
//! * categorical — half the l1 distance between probability vectors (total
//!   variation), which is `0`/`1` between one-hot vectors;
//! * numerical — `|x - y| / (x_max - x_min + 1)` under the fitted range,
//!   clamped to `1` when an online value escapes that range;
//! * string — the normalized generalized Levenshtein distance
//!   `2L / (|a| + |b| + L)`, a true metric bounded by 1.
//!
//! Entries combine their N attribute distances by l2 norm, giving a metric
//! with range `[0, sqrt(N)]`; the timestamp orders and interpolates entries
//! but never enters the sum. Equal-length entry sequences are compared by
//! the mean positional entry distance, and streams with real timestamps by
//! averaging over a uniform interpolation grid spanning the overlap of the
//! two time spans.
//!
//! Everything here is pure and reentrant; pairwise distance-matrix fills may
//! run over index pairs in parallel with no shared mutable state.

use thiserror::Error;

use crate::entry::{AttributeValue, LogEntry, LogStream};
use crate::schema::{AttributeStats, Schema};

#[derive(Debug, Error, PartialEq)]
pub enum MetricError {
    #[error("probability vectors have different dimensions ({left} vs {right})")]
    DimensionMismatch { left: usize, right: usize },
    #[error("entry does not match the schema: {0}")]
    SchemaMismatch(String),
    #[error("sequences have different lengths ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },
    #[error("sequence is empty")]
    EmptySequence,
    #[error("time {time} lies outside the stream span [{start}, {end}]")]
    OutsideSpan { time: f64, start: f64, end: f64 },
    #[error("stream time spans do not overlap")]
    DisjointSpans,
    #[error("an interpolation grid needs at least two points")]
    GridTooSmall,
    #[error("grid endpoints are not increasing ({start} >= {end})")]
    GridNotIncreasing { start: f64, end: f64 },
}

/// Total-variation distance between two probability vectors: half the l1
/// distance. `0` for identical vectors, `1` for distinct one-hots.
pub fn d_categorical(u: &[f64], v: &[f64]) -> Result<f64, MetricError> {
    if u.len() != v.len() {
        return Err(MetricError::DimensionMismatch {
            left: u.len(),
            right: v.len(),
        });
    }
    let l1: f64 = u.iter().zip(v).map(|(a, b)| (a - b).abs()).sum();
    Ok(0.5 * l1)
}

/// Normalized absolute difference under a fitted range, clamped to 1 when a
/// value escapes the range it was fitted on.
pub fn d_numerical(x: f64, y: f64, x_min: f64, x_max: f64) -> f64 {
    debug_assert!(x_min <= x_max);
    let d = (x - y).abs() / (x_max - x_min + 1.0);
    d.min(1.0)
}

/// Unit-cost Levenshtein edit distance over Unicode scalar values.
///
/// Two rolling rows; the inner loop is the hot path for command-line-bearing
/// schemas.
pub fn lev(a: &str, b: &str) -> usize {
    let (short, long): (Vec<char>, Vec<char>) = {
        let a: Vec<char> = a.chars().collect();
        let b: Vec<char> = b.chars().collect();
        if a.len() <= b.len() {
            (a, b)
        } else {
            (b, a)
        }
    };
    if short.is_empty() {
        return long.len();
    }
    let mut row: Vec<usize> = (0..=short.len()).collect();
    for (j, &cl) in long.iter().enumerate() {
        let mut diagonal = row[0];
        row[0] = j + 1;
        for (i, &cs) in short.iter().enumerate() {
            let above = row[i + 1];
            row[i + 1] = if cs == cl {
                diagonal
            } else {
                1 + diagonal.min(above).min(row[i])
            };
            diagonal = above;
        }
    }
    *row.last().unwrap()
}

/// Normalized generalized Levenshtein distance,
/// `2L / (|a| + |b| + L)` with `L = lev(a, b)`.
///
/// The degenerate 0/0 case of two empty strings is defined as 0; a nonempty
/// string against the empty string is exactly 1.
pub fn d_string(a: &str, b: &str) -> f64 {
    let l = lev(a, b);
    if l == 0 {
        return 0.0;
    }
    let la = a.chars().count();
    let lb = b.chars().count();
    2.0 * l as f64 / (la + lb + l) as f64
}

fn attribute_distance(
    index: usize,
    a: &AttributeValue,
    b: &AttributeValue,
    schema: &Schema,
) -> Result<f64, MetricError> {
    let attr = schema.attribute(index);
    match (&attr.stats, a, b) {
        (
            AttributeStats::Categorical { vocabulary },
            AttributeValue::Categorical(u),
            AttributeValue::Categorical(v),
        ) => {
            if u.len() != vocabulary.len() || v.len() != vocabulary.len() {
                return Err(MetricError::SchemaMismatch(format!(
                    "attribute {:?} expects vectors of dimension {}",
                    attr.name,
                    vocabulary.len()
                )));
            }
            d_categorical(u, v)
        }
        (
            AttributeStats::Numerical { x_min, x_max },
            AttributeValue::Numerical(x),
            AttributeValue::Numerical(y),
        ) => Ok(d_numerical(*x, *y, *x_min, *x_max)),
        (AttributeStats::String, AttributeValue::Str(s), AttributeValue::Str(t)) => {
            Ok(d_string(s, t))
        }
        _ => Err(MetricError::SchemaMismatch(format!(
            "attribute {:?} value variant does not match its domain",
            attr.name
        ))),
    }
}

/// Entry metric: the l2 combination of the N attribute distances.
///
/// Range `[0, sqrt(N)]`; the timestamp is excluded from the sum.
pub fn d_entry(a: &LogEntry, b: &LogEntry, schema: &Schema) -> Result<f64, MetricError> {
    let n = schema.attribute_count();
    if a.values.len() != n || b.values.len() != n {
        return Err(MetricError::SchemaMismatch(format!(
            "entries carry {} and {} values under a {}-attribute schema",
            a.values.len(),
            b.values.len(),
            n
        )));
    }
    let mut sum = 0.0;
    for (i, (va, vb)) in a.values.iter().zip(&b.values).enumerate() {
        let d = attribute_distance(i, va, vb, schema)?;
        sum += d * d;
    }
    Ok(sum.sqrt())
}

/// Sequence stream metric: the mean positional entry distance between two
/// equal-length entry sequences.
pub fn d_stream_seq(f: &[LogEntry], g: &[LogEntry], schema: &Schema) -> Result<f64, MetricError> {
    if f.len() != g.len() {
        return Err(MetricError::LengthMismatch {
            left: f.len(),
            right: g.len(),
        });
    }
    if f.is_empty() {
        return Err(MetricError::EmptySequence);
    }
    let mut sum = 0.0;
    for (a, b) in f.iter().zip(g) {
        sum += d_entry(a, b, schema)?;
    }
    Ok(sum / f.len() as f64)
}

/// A uniform grid of k interpolation points spanning `[start, end]`.
#[derive(Debug, Clone, PartialEq)]
pub struct InterpolationGrid {
    points: Vec<f64>,
}

impl InterpolationGrid {
    pub fn uniform(start: f64, end: f64, k: usize) -> Result<Self, MetricError> {
        if k < 2 {
            return Err(MetricError::GridTooSmall);
        }
        if start >= end || start.is_nan() || end.is_nan() {
            return Err(MetricError::GridNotIncreasing { start, end });
        }
        let step = (end - start) / (k - 1) as f64;
        let mut points: Vec<f64> = (0..k).map(|i| start + step * i as f64).collect();
        // Pin the endpoints against rounding drift.
        points[0] = start;
        points[k - 1] = end;
        Ok(InterpolationGrid { points })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Value of a stream at time `s` by convex combination of the two bracketing
/// entries.
///
/// Numerical values and categorical probability vectors are convex-combined,
/// which keeps probability vectors on the simplex. Strings admit no convex
/// combination, so the string value is taken from the nearer-in-time entry,
/// the earlier one on an exact midpoint. `s` must lie inside the stream
/// span.
pub fn interpolate_entry(stream: &LogStream, s: f64) -> Result<LogEntry, MetricError> {
    let entries = &stream.entries;
    let (start, end) = stream.span().ok_or(MetricError::EmptySequence)?;
    if s < start || s > end {
        return Err(MetricError::OutsideSpan {
            time: s,
            start,
            end,
        });
    }
    // First entry at or after s.
    let right = entries.partition_point(|e| e.time < s);
    let b = &entries[right.min(entries.len() - 1)];
    if b.time == s {
        return Ok(entries[right].clone());
    }
    let a = &entries[right - 1];
    let lambda_b = (s - a.time) / (b.time - a.time);
    let lambda_a = 1.0 - lambda_b;
    let values = a
        .values
        .iter()
        .zip(&b.values)
        .map(|(va, vb)| match (va, vb) {
            (AttributeValue::Numerical(x), AttributeValue::Numerical(y)) => {
                Ok(AttributeValue::Numerical(lambda_a * x + lambda_b * y))
            }
            (AttributeValue::Categorical(u), AttributeValue::Categorical(v)) => {
                if u.len() != v.len() {
                    return Err(MetricError::DimensionMismatch {
                        left: u.len(),
                        right: v.len(),
                    });
                }
                Ok(AttributeValue::Categorical(
                    u.iter()
                        .zip(v)
                        .map(|(x, y)| lambda_a * x + lambda_b * y)
                        .collect(),
                ))
            }
            (AttributeValue::Str(x), AttributeValue::Str(y)) => {
                let value = if s - a.time <= b.time - s { x } else { y };
                Ok(AttributeValue::Str(value.clone()))
            }
            _ => Err(MetricError::SchemaMismatch(
                "bracketing entries disagree on a value variant".into(),
            )),
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(LogEntry { time: s, values })
}

/// Time-interpolated stream distance over a uniform grid of `k` points
/// spanning the overlap of the two stream spans.
///
/// Computed as the mean of the entry distances at the grid points; the
/// uniform-grid quadrature weight is absorbed into the normalization, so the
/// constant-stream case reduces to a single entry distance for any k.
pub fn d_stream_time(
    f: &LogStream,
    g: &LogStream,
    k: usize,
    schema: &Schema,
) -> Result<f64, MetricError> {
    let (f0, f1) = f.span().ok_or(MetricError::EmptySequence)?;
    let (g0, g1) = g.span().ok_or(MetricError::EmptySequence)?;
    let start = f0.max(g0);
    let end = f1.min(g1);
    if start > end {
        return Err(MetricError::DisjointSpans);
    }
    if start == end {
        // Spans touch at a single instant; the grid degenerates to it.
        return d_entry(
            &interpolate_entry(f, start)?,
            &interpolate_entry(g, start)?,
            schema,
        );
    }
    let grid = InterpolationGrid::uniform(start, end, k)?;
    let mut sum = 0.0;
    for &u in grid.points() {
        sum += d_entry(&interpolate_entry(f, u)?, &interpolate_entry(g, u)?, schema)?;
    }
    Ok(sum / k as f64)
}
