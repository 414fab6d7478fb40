//! The relation schema: attribute names, domains, and fitted statistics.
//!
//! A schema fixes the ordered set of N attributes a log is reduced to, the
//! domain of each (categorical, numerical, or string), and the statistics
//! needed by the attribute metrics: the `(x_min, x_max)` range for numerical
//! attributes and the vocabulary (with a reserved null slot at index 0) for
//! categorical ones. Schemas are authored as JSON config documents; fitted
//! statistics are serialized back into the same document under a `fitted`
//! block.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Category name reserved for the null slot at vocabulary index 0.
pub const NULL_CATEGORY: &str = "";

#[derive(Debug, Error)]
pub enum SchemaError {
    #[error("schema has no attributes")]
    NoAttributes,
    #[error("duplicate attribute name {0:?}")]
    DuplicateAttribute(String),
    #[error("attribute {name:?}: {detail}")]
    InvalidAttribute { name: String, detail: String },
    #[error("schema config has no fitted statistics; run fit_schema_stats first")]
    NotFitted,
    #[error("fitted block length {fitted} does not match attribute count {attributes}")]
    FittedLengthMismatch { fitted: usize, attributes: usize },
    #[error("no records")]
    NoRecords,
    #[error("no records contained a value for numerical attribute {0:?}")]
    NoNumericalValues(String),
    #[error("invalid schema config: {0}")]
    Config(#[from] serde_json::Error),
}

/// Domain of an attribute's values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DomainKind {
    Categorical,
    Numerical,
    String,
}

/// Rule deriving an attribute's raw value from its source value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Derivation {
    /// Final path component with the extension stripped, uppercased.
    PathBasename,
    /// Text after the final `.` of the final path component, uppercased.
    PathExtension,
}

/// One attribute declaration in a schema config document.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AttributeSpec {
    pub name: String,
    pub domain: DomainKind,
    /// Flattened key the raw value is read from; defaults to `name`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_key: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub derivation: Option<Derivation>,
}

/// Fitted statistics for one attribute.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum AttributeStats {
    /// Vocabulary in first-seen order; index 0 is the reserved null slot.
    Categorical {
        vocabulary: Vec<String>,
    },
    Numerical {
        x_min: f64,
        x_max: f64,
    },
    String,
}

/// The external schema config document (JSON).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SchemaConfig {
    pub attributes: Vec<AttributeSpec>,
    /// Flattened key holding the record timestamp.
    pub time_key: String,
    /// Flattened key holding the host identifier, when not supplied out of band.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub host_key: Option<String>,
    /// Fitted statistics, one per attribute, in attribute order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fitted: Option<Vec<AttributeStats>>,
}

impl SchemaConfig {
    pub fn from_json(text: &str) -> Result<Self, SchemaError> {
        let config: SchemaConfig = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("schema config serializes")
    }

    pub fn validate(&self) -> Result<(), SchemaError> {
        if self.attributes.is_empty() {
            return Err(SchemaError::NoAttributes);
        }
        let mut seen = std::collections::HashSet::new();
        for spec in &self.attributes {
            if !seen.insert(spec.name.as_str()) {
                return Err(SchemaError::DuplicateAttribute(spec.name.clone()));
            }
            if spec.name.is_empty() {
                return Err(SchemaError::InvalidAttribute {
                    name: spec.name.clone(),
                    detail: "empty name".into(),
                });
            }
        }
        if let Some(fitted) = &self.fitted {
            if fitted.len() != self.attributes.len() {
                return Err(SchemaError::FittedLengthMismatch {
                    fitted: fitted.len(),
                    attributes: self.attributes.len(),
                });
            }
        }
        Ok(())
    }

    /// Turn a fitted config into a runtime [`Schema`].
    pub fn into_schema(self) -> Result<Schema, SchemaError> {
        self.validate()?;
        let fitted = self.fitted.clone().ok_or(SchemaError::NotFitted)?;
        let mut attributes = Vec::with_capacity(self.attributes.len());
        for (spec, stats) in self.attributes.iter().cloned().zip(fitted) {
            match (spec.domain, &stats) {
                (DomainKind::Categorical, AttributeStats::Categorical { vocabulary }) => {
                    if vocabulary.is_empty() || vocabulary[0] != NULL_CATEGORY {
                        return Err(SchemaError::InvalidAttribute {
                            name: spec.name,
                            detail: "vocabulary must reserve the null slot at index 0".into(),
                        });
                    }
                }
                (DomainKind::Numerical, AttributeStats::Numerical { x_min, x_max }) => {
                    if x_min > x_max || x_min.is_nan() || x_max.is_nan() {
                        return Err(SchemaError::InvalidAttribute {
                            name: spec.name,
                            detail: format!("x_min {x_min} > x_max {x_max}"),
                        });
                    }
                }
                (DomainKind::String, AttributeStats::String) => {}
                _ => {
                    return Err(SchemaError::InvalidAttribute {
                        name: spec.name,
                        detail: "fitted statistics do not match the declared domain".into(),
                    })
                }
            }
            attributes.push(Attribute {
                source_key: spec.source_key.clone().unwrap_or_else(|| spec.name.clone()),
                name: spec.name,
                derivation: spec.derivation,
                stats,
            });
        }
        Ok(Schema {
            attributes,
            time_key: self.time_key,
            host_key: self.host_key,
        })
    }
}

/// One fitted attribute of a [`Schema`].
#[derive(Debug, Clone, PartialEq)]
pub struct Attribute {
    pub name: String,
    pub source_key: String,
    pub derivation: Option<Derivation>,
    pub stats: AttributeStats,
}

impl Attribute {
    pub fn kind(&self) -> DomainKind {
        match self.stats {
            AttributeStats::Categorical { .. } => DomainKind::Categorical,
            AttributeStats::Numerical { .. } => DomainKind::Numerical,
            AttributeStats::String => DomainKind::String,
        }
    }
}

/// A fully fitted relation schema, ready for standardization and metric
/// evaluation. Immutable once constructed.
#[derive(Debug, Clone, PartialEq)]
pub struct Schema {
    attributes: Vec<Attribute>,
    time_key: String,
    host_key: Option<String>,
}

impl Schema {
    /// Number of attributes N (time excluded).
    pub fn attribute_count(&self) -> usize {
        self.attributes.len()
    }

    pub fn attributes(&self) -> &[Attribute] {
        &self.attributes
    }

    pub fn attribute(&self, index: usize) -> &Attribute {
        &self.attributes[index]
    }

    /// Index of the attribute with the given name.
    pub fn attribute_index(&self, name: &str) -> Option<usize> {
        self.attributes.iter().position(|a| a.name == name)
    }

    pub fn time_key(&self) -> &str {
        &self.time_key
    }

    pub fn host_key(&self) -> Option<&str> {
        self.host_key.as_deref()
    }

    /// Largest possible entry distance, `sqrt(N)`.
    pub fn max_entry_distance(&self) -> f64 {
        (self.attribute_count() as f64).sqrt()
    }

    /// Serialize back to the config document form, fitted block included.
    pub fn to_config(&self) -> SchemaConfig {
        SchemaConfig {
            attributes: self
                .attributes
                .iter()
                .map(|a| AttributeSpec {
                    name: a.name.clone(),
                    domain: a.kind(),
                    source_key: if a.source_key == a.name {
                        None
                    } else {
                        Some(a.source_key.clone())
                    },
                    derivation: a.derivation,
                })
                .collect(),
            time_key: self.time_key.clone(),
            host_key: self.host_key.clone(),
            fitted: Some(self.attributes.iter().map(|a| a.stats.clone()).collect()),
        }
    }
}

/// Build a fitted schema directly; used by tests and programmatic callers.
pub struct SchemaBuilder {
    attributes: Vec<Attribute>,
    time_key: String,
    host_key: Option<String>,
}

impl SchemaBuilder {
    pub fn new(time_key: impl Into<String>) -> Self {
        SchemaBuilder {
            attributes: Vec::new(),
            time_key: time_key.into(),
            host_key: None,
        }
    }

    pub fn host_key(mut self, key: impl Into<String>) -> Self {
        self.host_key = Some(key.into());
        self
    }

    /// Categorical attribute; `categories` excludes the null slot, which is
    /// prepended automatically.
    pub fn categorical<S: Into<String>>(
        mut self,
        name: impl Into<String>,
        categories: impl IntoIterator<Item = S>,
    ) -> Self {
        let name = name.into();
        let mut vocabulary = vec![NULL_CATEGORY.to_string()];
        vocabulary.extend(categories.into_iter().map(Into::into));
        self.attributes.push(Attribute {
            source_key: name.clone(),
            name,
            derivation: None,
            stats: AttributeStats::Categorical { vocabulary },
        });
        self
    }

    pub fn numerical(mut self, name: impl Into<String>, x_min: f64, x_max: f64) -> Self {
        let name = name.into();
        self.attributes.push(Attribute {
            source_key: name.clone(),
            name,
            derivation: None,
            stats: AttributeStats::Numerical { x_min, x_max },
        });
        self
    }

    pub fn string(mut self, name: impl Into<String>) -> Self {
        let name = name.into();
        self.attributes.push(Attribute {
            source_key: name.clone(),
            name,
            derivation: None,
            stats: AttributeStats::String,
        });
        self
    }

    /// Override the source key and derivation of the most recently added
    /// attribute.
    pub fn from_source(
        mut self,
        source_key: impl Into<String>,
        derivation: Option<Derivation>,
    ) -> Self {
        let attr = self
            .attributes
            .last_mut()
            .expect("from_source follows an attribute");
        attr.source_key = source_key.into();
        attr.derivation = derivation;
        self
    }

    pub fn build(self) -> Result<Schema, SchemaError> {
        if self.attributes.is_empty() {
            return Err(SchemaError::NoAttributes);
        }
        let mut seen = std::collections::HashSet::new();
        for a in &self.attributes {
            if !seen.insert(a.name.as_str()) {
                return Err(SchemaError::DuplicateAttribute(a.name.clone()));
            }
        }
        Ok(Schema {
            attributes: self.attributes,
            time_key: self.time_key,
            host_key: self.host_key,
        })
    }
}
