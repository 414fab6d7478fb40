//! Standardized log entries and per-host log streams.
//!
//! A [`LogEntry`] is one record under a fitted [`Schema`](crate::schema::Schema):
//! a UNIX-seconds timestamp plus one typed value per schema attribute. A
//! [`LogStream`] is the time-ordered sequence of entries from a single host.

use serde::{Deserialize, Serialize};

/// One typed attribute value of a standardized log entry.
///
/// Categorical values are probability vectors over the attribute vocabulary
/// (null slot at index 0). Straight out of ingestion they are one-hot;
/// general probability vectors appear only inside centroids and time
/// interpolants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttributeValue {
    Categorical(Vec<f64>),
    Numerical(f64),
    Str(String),
}

impl AttributeValue {
    /// One-hot vector of dimension `dim` with the unit mass at `index`.
    pub fn one_hot(index: usize, dim: usize) -> Self {
        debug_assert!(index < dim);
        let mut v = vec![0.0; dim];
        v[index] = 1.0;
        AttributeValue::Categorical(v)
    }

    /// Index of the unit entry if this is a strict one-hot vector.
    pub fn one_hot_index(&self) -> Option<usize> {
        match self {
            AttributeValue::Categorical(v) => {
                let mut hit = None;
                for (i, &x) in v.iter().enumerate() {
                    if x == 1.0 {
                        if hit.is_some() {
                            return None;
                        }
                        hit = Some(i);
                    } else if x != 0.0 {
                        return None;
                    }
                }
                hit
            }
            _ => None,
        }
    }
}

/// A standardized record: timestamp plus one value per schema attribute.
///
/// `values.len()` always equals the attribute count of the schema the entry
/// was standardized under; the timestamp orders and interpolates entries but
/// never enters the entry metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogEntry {
    /// UNIX seconds.
    pub time: f64,
    pub values: Vec<AttributeValue>,
}

/// Time-ordered entries from one host.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogStream {
    pub host: String,
    /// Entries sorted ascending by time.
    pub entries: Vec<LogEntry>,
}

impl LogStream {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// First and last timestamp, or `None` for an empty stream.
    pub fn span(&self) -> Option<(f64, f64)> {
        match (self.entries.first(), self.entries.last()) {
            (Some(a), Some(b)) => Some((a.time, b.time)),
            _ => None,
        }
    }
}
