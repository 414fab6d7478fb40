//! Average representations: centroids of entry sets, distance to a centroid,
//! and variance of entry or stream sets.
//!
//! Numerical and categorical attributes live in a normed vector space, so
//! their centroid components are plain means; a categorical component reads
//! directly as the fraction of each category among the members. Strings have
//! no vector embedding, so the string component keeps the multiset of member
//! strings and measures distance to the centroid as the average string
//! distance to the members. Centroid computation is a commutative,
//! associative fold (string multisets merge by union), so it parallelizes as
//! a reduction.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::entry::{AttributeValue, LogEntry};
use crate::metrics::{d_categorical, d_numerical, d_string, MetricError};
use crate::schema::{AttributeStats, Schema};

#[derive(Debug, Error, PartialEq)]
pub enum AggregateError {
    #[error("cannot aggregate an empty set")]
    EmptySet,
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error("operation requires a string-free schema, but attribute {0:?} is a string")]
    StringAttribute(String),
}

/// The multiset of member strings standing in for a geometric string
/// centroid. Distance from a string to the centroid is the mean string
/// distance to the members.
///
/// In memory-bounded mode the multiset holds a uniform random sample and the
/// distance becomes an estimate, flagged by [`StringMultiset::approximate`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StringMultiset {
    samples: Vec<String>,
    member_count: usize,
    approximate: bool,
}

impl StringMultiset {
    fn new() -> Self {
        StringMultiset {
            samples: Vec::new(),
            member_count: 0,
            approximate: false,
        }
    }

    /// Reservoir-sampled push with an optional capacity.
    fn push(&mut self, s: &str, cap: Option<usize>, rng: &mut ChaCha8Rng) {
        self.member_count += 1;
        match cap {
            Some(cap) if self.samples.len() >= cap => {
                self.approximate = true;
                let slot = rng.random_range(0..self.member_count);
                if slot < cap {
                    self.samples[slot] = s.to_string();
                }
            }
            _ => self.samples.push(s.to_string()),
        }
    }

    pub fn samples(&self) -> &[String] {
        &self.samples
    }

    pub fn member_count(&self) -> usize {
        self.member_count
    }

    pub fn approximate(&self) -> bool {
        self.approximate
    }

    /// Mean string distance from `s` to the members.
    pub fn mean_distance_to(&self, s: &str) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        let total: f64 = self.samples.iter().map(|m| d_string(s, m)).sum();
        total / self.samples.len() as f64
    }
}

/// Per-attribute aggregate of an entry set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CentroidComponent {
    /// Mean of the member one-hots: the per-category fractions.
    Categorical(Vec<f64>),
    /// Mean value.
    Numerical(f64),
    Str(StringMultiset),
}

/// Average representation of a nonempty set of entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Centroid {
    pub components: Vec<CentroidComponent>,
    pub member_count: usize,
}

impl Centroid {
    /// View a string-free centroid as a pseudo-entry so entry-level machinery
    /// (metrics, clustering) can run on it. Returns `None` when any
    /// component is a string multiset.
    pub fn to_entry(&self, time: f64) -> Option<LogEntry> {
        let values = self
            .components
            .iter()
            .map(|c| match c {
                CentroidComponent::Categorical(v) => Some(AttributeValue::Categorical(v.clone())),
                CentroidComponent::Numerical(x) => Some(AttributeValue::Numerical(*x)),
                CentroidComponent::Str(_) => None,
            })
            .collect::<Option<Vec<_>>>()?;
        Some(LogEntry { time, values })
    }

    /// Category fractions of a categorical component, sorted descending, the
    /// way cluster listings print them. The null slot reads as `"∅"`.
    pub fn category_fractions(&self, schema: &Schema, attribute: usize) -> Vec<(String, f64)> {
        let CentroidComponent::Categorical(v) = &self.components[attribute] else {
            return Vec::new();
        };
        let AttributeStats::Categorical { vocabulary } = &schema.attribute(attribute).stats else {
            return Vec::new();
        };
        let mut fractions: Vec<(String, f64)> = vocabulary
            .iter()
            .zip(v)
            .filter(|(_, &p)| p > 0.0)
            .map(|(name, &p)| {
                let label = if name.is_empty() {
                    "∅".to_string()
                } else {
                    name.clone()
                };
                (label, p)
            })
            .collect();
        fractions.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        fractions
    }

    /// Human-readable JSON listing: categorical attributes as sorted
    /// category-to-fraction maps, numerical attributes as means, string
    /// attributes as a sample of members.
    pub fn to_listing(&self, schema: &Schema) -> serde_json::Value {
        let mut listing = serde_json::Map::new();
        for (i, attr) in schema.attributes().iter().enumerate() {
            let value = match &self.components[i] {
                CentroidComponent::Categorical(_) => {
                    let mut map = serde_json::Map::new();
                    for (name, p) in self.category_fractions(schema, i) {
                        map.insert(name, serde_json::json!((p * 100.0).round() / 100.0));
                    }
                    serde_json::Value::Object(map)
                }
                CentroidComponent::Numerical(x) => serde_json::json!(x),
                CentroidComponent::Str(multiset) => serde_json::json!({
                    "member_count": multiset.member_count(),
                    "approximate": multiset.approximate(),
                    "samples": multiset.samples().iter().take(8).collect::<Vec<_>>(),
                }),
            };
            listing.insert(attr.name.clone(), value);
        }
        serde_json::Value::Object(listing)
    }
}

/// String sample cap of the memory-bounded centroid mode.
pub const DEFAULT_STRING_SAMPLE_CAP: usize = 256;

/// Centroid of a nonempty entry set: per-attribute means, with string
/// attributes kept as the full member multiset.
pub fn centroid(entries: &[LogEntry], schema: &Schema) -> Result<Centroid, AggregateError> {
    centroid_sampled(entries, schema, None, 0)
}

/// Memory-bounded centroid: string multisets hold at most
/// [`DEFAULT_STRING_SAMPLE_CAP`] uniformly sampled members and flag
/// themselves approximate once they overflow.
pub fn centroid_bounded(
    entries: &[LogEntry],
    schema: &Schema,
    seed: u64,
) -> Result<Centroid, AggregateError> {
    centroid_sampled(entries, schema, Some(DEFAULT_STRING_SAMPLE_CAP), seed)
}

/// Centroid with the string multisets capped at `cap` uniformly sampled
/// members (memory-bounded mode; the multiset flags itself approximate).
pub fn centroid_sampled(
    entries: &[LogEntry],
    schema: &Schema,
    cap: Option<usize>,
    seed: u64,
) -> Result<Centroid, AggregateError> {
    if entries.is_empty() {
        return Err(AggregateError::EmptySet);
    }
    let n = schema.attribute_count();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut components: Vec<CentroidComponent> = schema
        .attributes()
        .iter()
        .map(|attr| match &attr.stats {
            AttributeStats::Categorical { vocabulary } => {
                CentroidComponent::Categorical(vec![0.0; vocabulary.len()])
            }
            AttributeStats::Numerical { .. } => CentroidComponent::Numerical(0.0),
            AttributeStats::String => CentroidComponent::Str(StringMultiset::new()),
        })
        .collect();

    for entry in entries {
        if entry.values.len() != n {
            return Err(MetricError::SchemaMismatch(format!(
                "entry carries {} values under a {}-attribute schema",
                entry.values.len(),
                n
            ))
            .into());
        }
        for (component, value) in components.iter_mut().zip(&entry.values) {
            match (component, value) {
                (CentroidComponent::Categorical(acc), AttributeValue::Categorical(v)) => {
                    if acc.len() != v.len() {
                        return Err(MetricError::DimensionMismatch {
                            left: acc.len(),
                            right: v.len(),
                        }
                        .into());
                    }
                    for (a, x) in acc.iter_mut().zip(v) {
                        *a += x;
                    }
                }
                (CentroidComponent::Numerical(acc), AttributeValue::Numerical(x)) => {
                    *acc += x;
                }
                (CentroidComponent::Str(multiset), AttributeValue::Str(s)) => {
                    multiset.push(s, cap, &mut rng);
                }
                _ => {
                    return Err(MetricError::SchemaMismatch(
                        "entry value variant does not match its domain".into(),
                    )
                    .into())
                }
            }
        }
    }

    let k = entries.len() as f64;
    for component in &mut components {
        match component {
            CentroidComponent::Categorical(acc) => acc.iter_mut().for_each(|a| *a /= k),
            CentroidComponent::Numerical(acc) => *acc /= k,
            CentroidComponent::Str(_) => {}
        }
    }
    Ok(Centroid {
        components,
        member_count: entries.len(),
    })
}

/// Distance from an entry to a centroid: the entry metric's l2 form with the
/// string terms replaced by the multiset-average distance.
pub fn d_to_centroid(
    entry: &LogEntry,
    centroid: &Centroid,
    schema: &Schema,
) -> Result<f64, AggregateError> {
    let n = schema.attribute_count();
    if entry.values.len() != n || centroid.components.len() != n {
        return Err(MetricError::SchemaMismatch(
            "entry or centroid does not match the schema arity".into(),
        )
        .into());
    }
    let mut sum = 0.0;
    for ((value, component), attr) in entry
        .values
        .iter()
        .zip(&centroid.components)
        .zip(schema.attributes())
    {
        let d = match (value, component, &attr.stats) {
            (
                AttributeValue::Categorical(u),
                CentroidComponent::Categorical(v),
                AttributeStats::Categorical { .. },
            ) => d_categorical(u, v)?,
            (
                AttributeValue::Numerical(x),
                CentroidComponent::Numerical(m),
                AttributeStats::Numerical { x_min, x_max },
            ) => d_numerical(*x, *m, *x_min, *x_max),
            (AttributeValue::Str(s), CentroidComponent::Str(multiset), AttributeStats::String) => {
                multiset.mean_distance_to(s)
            }
            _ => {
                return Err(MetricError::SchemaMismatch(
                    "value, centroid component and domain disagree".into(),
                )
                .into())
            }
        };
        sum += d * d;
    }
    Ok(sum.sqrt())
}

/// Distance between two string-free centroids: the entry metric's l2 form
/// over the aggregate components.
pub fn d_between_centroids(
    a: &Centroid,
    b: &Centroid,
    schema: &Schema,
) -> Result<f64, AggregateError> {
    let ea = require_entry(a, schema)?;
    let eb = require_entry(b, schema)?;
    Ok(crate::metrics::d_entry(&ea, &eb, schema)?)
}

fn require_entry(c: &Centroid, schema: &Schema) -> Result<LogEntry, AggregateError> {
    c.to_entry(0.0).ok_or_else(|| {
        let name = schema
            .attributes()
            .iter()
            .find(|a| a.stats == AttributeStats::String)
            .map(|a| a.name.clone())
            .unwrap_or_default();
        AggregateError::StringAttribute(name)
    })
}

/// Variance of an entry set: the mean squared distance to the set centroid.
pub fn variance_entries(entries: &[LogEntry], schema: &Schema) -> Result<f64, AggregateError> {
    let c = centroid(entries, schema)?;
    let mut sum = 0.0;
    for entry in entries {
        let d = d_to_centroid(entry, &c, schema)?;
        sum += d * d;
    }
    Ok(sum / entries.len() as f64)
}

/// Variance of a set of streams, each represented by its entry centroid.
/// Requires a string-free schema, as stream-level variance has no string
/// workaround.
pub fn variance_centroids(centroids: &[Centroid], schema: &Schema) -> Result<f64, AggregateError> {
    if centroids.is_empty() {
        return Err(AggregateError::EmptySet);
    }
    let pseudo: Vec<LogEntry> = centroids
        .iter()
        .map(|c| require_entry(c, schema))
        .collect::<Result<_, _>>()?;
    variance_entries(&pseudo, schema)
}
