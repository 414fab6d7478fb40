//! Ingestion: flatten raw semi-structured logs, standardize them under a
//! schema, and assemble per-host streams.
//!
//! The pipeline is a pure function chain. A raw document is first un-nested
//! into a flat key/value list ([`flatten`]); flat records are used to fit
//! schema statistics ([`fit_schema_stats`]) and are then reduced to
//! standardized entries ([`standardize`]). Records that carry none of the
//! schema keys are discarded; records with a malformed timestamp or an
//! untypeable numerical value are rejected with a counted diagnostic, never
//! fatally. All functions here are reentrant, so standardization may run
//! over shards in parallel once the schema is fitted and immutable.

use serde_json::{Map, Value};
use thiserror::Error;

use crate::entry::{AttributeValue, LogEntry, LogStream};
use crate::schema::{
    Attribute, AttributeSpec, AttributeStats, Derivation, DomainKind, Schema, SchemaConfig,
    SchemaError, NULL_CATEGORY,
};

/// A raw semi-structured log document plus out-of-band host and time.
#[derive(Debug, Clone)]
pub struct RawLog {
    /// Arbitrarily nested key/value document (a finite tree).
    pub document: Value,
    pub source_host: String,
    /// Timestamp carried outside the document, if any; otherwise the
    /// schema's `time_key` is looked up in the flattened pairs.
    pub raw_time: Option<Value>,
}

impl RawLog {
    pub fn new(document: Value, source_host: impl Into<String>) -> Self {
        RawLog {
            document,
            source_host: source_host.into(),
            raw_time: None,
        }
    }
}

/// A flattened log: no nested values remain and all keys are unique.
#[derive(Debug, Clone)]
pub struct FlatLog {
    pub pairs: Map<String, Value>,
    pub source_host: String,
    pub raw_time: Option<Value>,
}

/// Why a record was rejected during standardization.
///
/// Rejections are diagnostics to be counted by the caller; log corpora are
/// dirty by nature and a rejected record never aborts a run.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Rejection {
    #[error("malformed or missing timestamp: {0}")]
    BadTimestamp(String),
    #[error("numerical attribute {0:?} has a non-numeric value")]
    BadNumeric(String),
}

/// Running counts of ingestion outcomes.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize)]
pub struct IngestStats {
    pub standardized: u64,
    /// Records carrying none of the schema keys.
    pub discarded: u64,
    pub rejected_bad_timestamp: u64,
    pub rejected_bad_numeric: u64,
}

impl IngestStats {
    pub fn record_rejection(&mut self, rejection: &Rejection) {
        match rejection {
            Rejection::BadTimestamp(_) => self.rejected_bad_timestamp += 1,
            Rejection::BadNumeric(_) => self.rejected_bad_numeric += 1,
        }
    }

    pub fn rejected(&self) -> u64 {
        self.rejected_bad_timestamp + self.rejected_bad_numeric
    }
}

/// Un-nest a raw document into a flat key/value list.
///
/// Nested keys are concatenated depth-first with `.`; an empty child key is
/// path-transparent. When path-joining produces a key that already exists,
/// the newcomer gets a `_2`, `_3`, ... suffix in encounter order. Any tree
/// flattens; this function has no failure mode.
pub fn flatten(raw: &RawLog) -> FlatLog {
    let mut pairs = Map::new();
    flatten_value("", &raw.document, &mut pairs);
    FlatLog {
        pairs,
        source_host: raw.source_host.clone(),
        raw_time: raw.raw_time.clone(),
    }
}

fn join_key(prefix: &str, key: &str) -> String {
    if key.is_empty() {
        prefix.to_string()
    } else if prefix.is_empty() {
        key.to_string()
    } else {
        format!("{prefix}.{key}")
    }
}

fn flatten_value(prefix: &str, value: &Value, out: &mut Map<String, Value>) {
    match value {
        Value::Object(map) => {
            for (key, child) in map {
                flatten_value(&join_key(prefix, key), child, out);
            }
        }
        Value::Array(items) => {
            for (i, child) in items.iter().enumerate() {
                flatten_value(&join_key(prefix, &i.to_string()), child, out);
            }
        }
        scalar => {
            insert_unique(out, prefix, scalar.clone());
        }
    }
}

fn insert_unique(out: &mut Map<String, Value>, key: &str, value: Value) {
    if !out.contains_key(key) {
        out.insert(key.to_string(), value);
        return;
    }
    let mut n = 2usize;
    loop {
        let candidate = format!("{key}_{n}");
        if !out.contains_key(&candidate) {
            out.insert(candidate, value);
            return;
        }
        n += 1;
    }
}

/// Basename and extension of a path, both uppercased, both `""` when absent.
///
/// The final component is the text after the last `/` or `\`; the extension
/// is the text after the final `.` of that component and the basename is the
/// component with the extension (and its dot) stripped.
pub fn derive_path_fields(path: &str) -> (String, String) {
    let component = path.rsplit(['/', '\\']).next().unwrap_or_default();
    match component.rfind('.') {
        Some(dot) => (
            component[..dot].to_uppercase(),
            component[dot + 1..].to_uppercase(),
        ),
        None => (component.to_uppercase(), String::new()),
    }
}

/// Display form of a flattened scalar; `None` for JSON null.
fn scalar_to_string(value: &Value) -> Option<String> {
    match value {
        Value::Null => None,
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        Value::Bool(b) => Some(b.to_string()),
        // Containers never survive flatten; fall back to their JSON text.
        other => Some(other.to_string()),
    }
}

fn scalar_to_f64(value: &Value) -> Option<f64> {
    match value {
        Value::Number(n) => n.as_f64(),
        Value::String(s) => s.trim().parse::<f64>().ok().filter(|x| x.is_finite()),
        _ => None,
    }
}

/// Parse a timestamp value: integer or float UNIX seconds, a numeric string,
/// or an RFC 3339 datetime string.
pub fn parse_timestamp(value: &Value) -> Option<f64> {
    match value {
        Value::Number(n) => n.as_f64().filter(|t| t.is_finite()),
        Value::String(s) => {
            let s = s.trim();
            if let Ok(t) = s.parse::<f64>() {
                return t.is_finite().then_some(t);
            }
            chrono::DateTime::parse_from_rfc3339(s)
                .ok()
                .map(|dt| dt.timestamp() as f64 + f64::from(dt.timestamp_subsec_nanos()) * 1e-9)
        }
        _ => None,
    }
}

/// The raw value feeding an attribute, after derivation, before typing.
fn attribute_raw(attr: &Attribute, pairs: &Map<String, Value>) -> Option<Value> {
    let value = pairs.get(&attr.source_key)?;
    if value.is_null() {
        return None;
    }
    match attr.derivation {
        None => Some(value.clone()),
        Some(rule) => {
            let text = scalar_to_string(value)?;
            let (base, ext) = derive_path_fields(&text);
            Some(Value::String(match rule {
                Derivation::PathBasename => base,
                Derivation::PathExtension => ext,
            }))
        }
    }
}

/// Standardize one flattened record under a fitted schema.
///
/// Returns `Ok(None)` when the record carries none of the N schema keys (it
/// is discarded). Missing attributes are encoded with the null element of
/// their type: the null-slot one-hot, `0`, or `""`. Categorical raw values
/// are uppercased before vocabulary lookup, and a category outside the
/// fitted vocabulary maps to the null slot, so a frozen schema stays valid
/// online.
pub fn standardize(flat: &FlatLog, schema: &Schema) -> Result<Option<LogEntry>, Rejection> {
    let present = schema
        .attributes()
        .iter()
        .any(|attr| attribute_raw(attr, &flat.pairs).is_some());
    if !present {
        return Ok(None);
    }

    let time_value = flat
        .raw_time
        .as_ref()
        .or_else(|| flat.pairs.get(schema.time_key()));
    let time = match time_value {
        Some(v) => parse_timestamp(v)
            .ok_or_else(|| Rejection::BadTimestamp(scalar_to_string(v).unwrap_or_default()))?,
        None => return Err(Rejection::BadTimestamp("absent".into())),
    };

    let mut values = Vec::with_capacity(schema.attribute_count());
    for attr in schema.attributes() {
        let raw = attribute_raw(attr, &flat.pairs);
        let value = match &attr.stats {
            AttributeStats::Categorical { vocabulary } => {
                let index = match raw.as_ref().and_then(scalar_to_string) {
                    None => 0,
                    Some(text) => {
                        let upper = text.to_uppercase();
                        vocabulary.iter().position(|c| *c == upper).unwrap_or(0)
                    }
                };
                AttributeValue::one_hot(index, vocabulary.len())
            }
            AttributeStats::Numerical { .. } => match raw {
                None => AttributeValue::Numerical(0.0),
                Some(v) => AttributeValue::Numerical(
                    scalar_to_f64(&v).ok_or_else(|| Rejection::BadNumeric(attr.name.clone()))?,
                ),
            },
            AttributeStats::String => {
                AttributeValue::Str(raw.as_ref().and_then(scalar_to_string).unwrap_or_default())
            }
        };
        values.push(value);
    }
    Ok(Some(LogEntry { time, values }))
}

/// Fit per-attribute statistics over flattened records.
///
/// Numerical attributes get their observed `(x_min, x_max)`; categorical
/// attributes get a vocabulary of the distinct uppercased observed values in
/// first-seen order behind the null slot. Derivation rules apply before
/// observation, exactly as they do in [`standardize`].
pub fn fit_schema_stats<'a>(
    flats: impl IntoIterator<Item = &'a FlatLog>,
    config: &SchemaConfig,
) -> Result<Schema, SchemaError> {
    config.validate()?;
    let specs = &config.attributes;
    // Fit against a throwaway schema with empty stats so attribute_raw sees
    // the same source keys and derivations standardize will.
    let probes: Vec<Attribute> = specs
        .iter()
        .map(|spec| Attribute {
            name: spec.name.clone(),
            source_key: spec.source_key.clone().unwrap_or_else(|| spec.name.clone()),
            derivation: spec.derivation,
            stats: AttributeStats::String,
        })
        .collect();

    struct NumFit {
        min: f64,
        max: f64,
        seen: bool,
    }
    let mut numeric: Vec<NumFit> = specs
        .iter()
        .map(|_| NumFit {
            min: f64::INFINITY,
            max: f64::NEG_INFINITY,
            seen: false,
        })
        .collect();
    let mut vocabularies: Vec<Vec<String>> = specs
        .iter()
        .map(|_| vec![NULL_CATEGORY.to_string()])
        .collect();
    let mut vocab_seen: Vec<std::collections::HashSet<String>> =
        specs.iter().map(|_| Default::default()).collect();

    let mut any = false;
    for flat in flats {
        any = true;
        for (i, spec) in specs.iter().enumerate() {
            let Some(raw) = attribute_raw(&probes[i], &flat.pairs) else {
                continue;
            };
            match spec.domain {
                DomainKind::Numerical => {
                    if let Some(x) = scalar_to_f64(&raw) {
                        let fit = &mut numeric[i];
                        fit.min = fit.min.min(x);
                        fit.max = fit.max.max(x);
                        fit.seen = true;
                    }
                }
                DomainKind::Categorical => {
                    if let Some(text) = scalar_to_string(&raw) {
                        let upper = text.to_uppercase();
                        if vocab_seen[i].insert(upper.clone()) && upper != NULL_CATEGORY {
                            vocabularies[i].push(upper);
                        }
                    }
                }
                DomainKind::String => {}
            }
        }
    }
    if !any {
        return Err(SchemaError::NoRecords);
    }

    let fitted: Vec<AttributeStats> = specs
        .iter()
        .enumerate()
        .map(|(i, spec)| match spec.domain {
            DomainKind::Numerical => {
                let fit = &numeric[i];
                if !fit.seen {
                    return Err(SchemaError::NoNumericalValues(spec.name.clone()));
                }
                Ok(AttributeStats::Numerical {
                    x_min: fit.min,
                    x_max: fit.max,
                })
            }
            DomainKind::Categorical => Ok(AttributeStats::Categorical {
                vocabulary: std::mem::take(&mut vocabularies[i]),
            }),
            DomainKind::String => Ok(AttributeStats::String),
        })
        .collect::<Result<_, _>>()?;

    SchemaConfig {
        attributes: config.attributes.clone(),
        time_key: config.time_key.clone(),
        host_key: config.host_key.clone(),
        fitted: Some(fitted),
    }
    .into_schema()
}

/// Group standardized entries into per-host streams.
///
/// Streams come out in first-seen host order; entries are stably sorted by
/// time, so equal timestamps keep their input order.
pub fn build_streams(entries: Vec<(String, LogEntry)>) -> Vec<LogStream> {
    let mut order: Vec<String> = Vec::new();
    let mut by_host: std::collections::HashMap<String, Vec<LogEntry>> = Default::default();
    for (host, entry) in entries {
        if !by_host.contains_key(&host) {
            order.push(host.clone());
        }
        by_host.entry(host).or_default().push(entry);
    }
    order
        .into_iter()
        .map(|host| {
            let mut entries = by_host.remove(&host).unwrap_or_default();
            entries.sort_by(|a, b| a.time.total_cmp(&b.time));
            LogStream { host, entries }
        })
        .collect()
}

/// Convenience for spec-style configs: one `AttributeSpec` per line.
pub fn attribute_spec(
    name: &str,
    domain: DomainKind,
    source_key: Option<&str>,
    derivation: Option<Derivation>,
) -> AttributeSpec {
    AttributeSpec {
        name: name.to_string(),
        domain,
        source_key: source_key.map(str::to_string),
        derivation,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schema::SchemaBuilder;
    use serde_json::json;

    fn raw(doc: Value) -> RawLog {
        RawLog::new(doc, "host1")
    }

    #[test]
    fn flatten_single_nesting() {
        let flat = flatten(&raw(json!({"a": {"b": 1}, "c": "x"})));
        assert_eq!(flat.pairs.get("a.b"), Some(&json!(1)));
        assert_eq!(flat.pairs.get("c"), Some(&json!("x")));
        assert_eq!(flat.pairs.len(), 2);
    }

    #[test]
    fn flatten_no_collision_after_path_join() {
        let flat = flatten(&raw(json!({"a": 1, "b": {"a": 2}})));
        assert_eq!(flat.pairs.get("a"), Some(&json!(1)));
        assert_eq!(flat.pairs.get("b.a"), Some(&json!(2)));
    }

    #[test]
    fn flatten_forced_collision_appends_counter() {
        // "a.b" collides with the path-joined key of {"a": {"b": ...}}.
        let flat = flatten(&raw(json!({"a.b": 1, "a": {"b": 2}})));
        assert_eq!(flat.pairs.get("a.b"), Some(&json!(1)));
        assert_eq!(flat.pairs.get("a.b_2"), Some(&json!(2)));

        // An empty nested key is path-transparent, colliding with its parent.
        let flat = flatten(&raw(json!({"a": {"": 1, "x": 2}, "a.x": 3})));
        assert_eq!(flat.pairs.get("a"), Some(&json!(1)));
        assert_eq!(flat.pairs.get("a.x"), Some(&json!(2)));
        assert_eq!(flat.pairs.get("a.x_2"), Some(&json!(3)));
    }

    #[test]
    fn flatten_collision_counter_skips_taken_suffixes() {
        // The empty top-level key is path-transparent, so {"": {"k": 9}}
        // re-produces the key "k"; with "k_2" already a literal key the
        // counter walks on to "k_3".
        let flat = flatten(&raw(json!({"k": 1, "k_2": 5, "": {"k": 9}})));
        assert_eq!(flat.pairs.get("k"), Some(&json!(1)));
        assert_eq!(flat.pairs.get("k_2"), Some(&json!(5)));
        assert_eq!(flat.pairs.get("k_3"), Some(&json!(9)));
    }

    #[test]
    fn flatten_arrays_use_index_segments() {
        let flat = flatten(&raw(json!({"a": [10, {"b": 1}]})));
        assert_eq!(flat.pairs.get("a.0"), Some(&json!(10)));
        assert_eq!(flat.pairs.get("a.1.b"), Some(&json!(1)));
    }

    #[test]
    fn derive_path_fields_examples() {
        assert_eq!(
            derive_path_fields(r"C:\Users\hostX\AppData\Local\Temp\Low\4328.tmp"),
            ("4328".to_string(), "TMP".to_string())
        );
        assert_eq!(
            derive_path_fields(r"C:\Windows\explorer.exe"),
            ("EXPLORER".to_string(), "EXE".to_string())
        );
        assert_eq!(
            derive_path_fields("noext"),
            ("NOEXT".to_string(), String::new())
        );
        assert_eq!(derive_path_fields(""), (String::new(), String::new()));
        assert_eq!(derive_path_fields("dir/"), (String::new(), String::new()));
    }

    #[test]
    fn derive_path_fields_case_normalizing() {
        for path in [r"C:\a\b\Setup.MSI", "usr/bin/make", "Mixed.Case.TXT"] {
            assert_eq!(
                derive_path_fields(path),
                derive_path_fields(&path.to_uppercase())
            );
        }
    }

    fn fig5_schema() -> Schema {
        SchemaBuilder::new("Time")
            .categorical("BaseFileName", ["4328", "8D6", "EXPLORER"])
            .from_source("NewProc", Some(Derivation::PathBasename))
            .categorical("BaseFileExtn", ["TMP", "EXE"])
            .from_source("NewProc", Some(Derivation::PathExtension))
            .categorical("CreatorProc", ["IEXPLORE", "USERINIT", "4328"])
            .numerical("TokenElevation", 1.0, 3.0)
            .string("CmdLine")
            .build()
            .unwrap()
    }

    #[test]
    fn standardize_discards_record_without_schema_keys() {
        let schema = fig5_schema();
        let flat = flatten(&raw(json!({"Time": 1446532736, "LogonType": 5})));
        assert_eq!(standardize(&flat, &schema).unwrap(), None);
    }

    #[test]
    fn standardize_fig2_right_matches_fig5_left_entry() {
        let schema = fig5_schema();
        let flat = flatten(&raw(json!({
            "Time": 1446532736,
            "CmdLine": r"C:\Users\hostX\AppData\Local\Temp\Low\4328.tmp",
            "CreatorProc": "iexplore",
            "NewProc": r"C:\Users\hostX\AppData\Local\Temp\Low\4328.tmp",
            "TokenElevation": 3
        })));
        let entry = standardize(&flat, &schema).unwrap().unwrap();
        assert_eq!(entry.time, 1446532736.0);
        // BaseFileName = 4328 (vocab slot 1), BaseFileExtn = TMP, CreatorProc = IEXPLORE.
        assert_eq!(entry.values[0].one_hot_index(), Some(1));
        assert_eq!(entry.values[1].one_hot_index(), Some(1));
        assert_eq!(entry.values[2].one_hot_index(), Some(1));
        assert_eq!(entry.values[3], AttributeValue::Numerical(3.0));
        assert_eq!(
            entry.values[4],
            AttributeValue::Str(r"C:\Users\hostX\AppData\Local\Temp\Low\4328.tmp".into())
        );
    }

    #[test]
    fn standardize_missing_cmdline_becomes_null_string() {
        let schema = fig5_schema();
        let flat = flatten(&raw(json!({
            "Time": 1446532766,
            "CreatorProc": "4328",
            "NewProc": r"C:\Windows\SysWOW64\explorer.exe",
            "TokenElevation": 3
        })));
        let entry = standardize(&flat, &schema).unwrap().unwrap();
        assert_eq!(entry.values[4], AttributeValue::Str(String::new()));
        // Unlisted category maps to the null slot.
        let flat = flatten(&raw(json!({"Time": 0, "CreatorProc": "never-seen"})));
        let entry = standardize(&flat, &schema).unwrap().unwrap();
        assert_eq!(entry.values[2].one_hot_index(), Some(0));
    }

    #[test]
    fn standardize_rejects_bad_timestamp_and_bad_numeric() {
        let schema = fig5_schema();
        let flat = flatten(&raw(
            json!({"Time": "not-a-time", "CreatorProc": "iexplore"}),
        ));
        assert!(matches!(
            standardize(&flat, &schema),
            Err(Rejection::BadTimestamp(_))
        ));
        let flat = flatten(&raw(json!({"CreatorProc": "iexplore"})));
        assert!(matches!(
            standardize(&flat, &schema),
            Err(Rejection::BadTimestamp(_))
        ));
        let flat = flatten(&raw(json!({"Time": 5, "TokenElevation": "high"})));
        assert!(matches!(
            standardize(&flat, &schema),
            Err(Rejection::BadNumeric(_))
        ));
    }

    #[test]
    fn timestamps_accept_unix_and_rfc3339() {
        assert_eq!(parse_timestamp(&json!(1446532736)), Some(1446532736.0));
        assert_eq!(parse_timestamp(&json!(1446532736.25)), Some(1446532736.25));
        assert_eq!(parse_timestamp(&json!("1446532736.5")), Some(1446532736.5));
        let t = parse_timestamp(&json!("2015-11-03T06:38:56Z")).unwrap();
        assert_eq!(t, 1446532736.0);
        assert_eq!(parse_timestamp(&json!("yesterday")), None);
    }

    #[test]
    fn fit_stats_token_elevation_and_vocab() {
        let config = SchemaConfig {
            attributes: vec![
                attribute_spec("TokenElevation", DomainKind::Numerical, None, None),
                attribute_spec(
                    "Extn",
                    DomainKind::Categorical,
                    Some("path"),
                    Some(Derivation::PathExtension),
                ),
            ],
            time_key: "Time".into(),
            host_key: None,
            fitted: None,
        };
        let flats: Vec<FlatLog> = [
            json!({"Time": 1, "TokenElevation": 1, "path": "a/b.exe"}),
            json!({"Time": 2, "TokenElevation": 3, "path": "c/d.exe"}),
        ]
        .into_iter()
        .map(|doc| flatten(&raw(doc)))
        .collect();
        let schema = fit_schema_stats(&flats, &config).unwrap();
        assert_eq!(
            schema.attribute(0).stats,
            AttributeStats::Numerical {
                x_min: 1.0,
                x_max: 3.0
            }
        );
        match &schema.attribute(1).stats {
            AttributeStats::Categorical { vocabulary } => {
                assert_eq!(
                    vocabulary,
                    &vec![NULL_CATEGORY.to_string(), "EXE".to_string()]
                );
            }
            other => panic!("unexpected stats {other:?}"),
        }
    }

    #[test]
    fn fit_stats_errors() {
        let config = SchemaConfig {
            attributes: vec![attribute_spec("x", DomainKind::Numerical, None, None)],
            time_key: "Time".into(),
            host_key: None,
            fitted: None,
        };
        assert!(matches!(
            fit_schema_stats(&[], &config),
            Err(SchemaError::NoRecords)
        ));
        let flats = [flatten(&raw(json!({"Time": 1, "other": 2})))];
        assert!(matches!(
            fit_schema_stats(&flats, &config),
            Err(SchemaError::NoNumericalValues(_))
        ));
    }

    #[test]
    fn build_streams_groups_and_sorts() {
        let e = |t: f64| LogEntry {
            time: t,
            values: vec![],
        };
        let streams = build_streams(vec![
            ("a".into(), e(3.0)),
            ("b".into(), e(1.0)),
            ("a".into(), e(2.0)),
        ]);
        assert_eq!(streams.len(), 2);
        assert_eq!(streams[0].host, "a");
        assert_eq!(streams[0].entries.len(), 2);
        assert_eq!(streams[0].entries[0].time, 2.0);
        assert_eq!(streams[1].host, "b");
        assert_eq!(streams[1].entries.len(), 1);
    }

    #[test]
    fn build_streams_stable_on_equal_timestamps() {
        let mk = |t: f64, tag: &str| LogEntry {
            time: t,
            values: vec![AttributeValue::Str(tag.into())],
        };
        let streams = build_streams(vec![
            ("h".into(), mk(1.0, "first")),
            ("h".into(), mk(1.0, "second")),
            ("h".into(), mk(0.5, "earliest")),
        ]);
        let tags: Vec<_> = streams[0]
            .entries
            .iter()
            .map(|e| match &e.values[0] {
                AttributeValue::Str(s) => s.clone(),
                _ => unreachable!(),
            })
            .collect();
        assert_eq!(tags, ["earliest", "first", "second"]);
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn scalar() -> impl Strategy<Value = Value> {
            prop_oneof![
                any::<i32>().prop_map(|n| json!(n)),
                "[a-z .\\\\]{0,12}".prop_map(|s| json!(s)),
                Just(Value::Null),
                any::<bool>().prop_map(Value::Bool),
            ]
        }

        fn document() -> impl Strategy<Value = Value> {
            let leaf = scalar();
            leaf.prop_recursive(3, 24, 4, |inner| {
                proptest::collection::btree_map("[a-zA-Z0-9_.]{0,6}", inner, 0..4)
                    .prop_map(|m| Value::Object(m.into_iter().collect()))
            })
        }

        proptest! {
            // Re-wrapping a flattened map as a depth-1 document and
            // flattening again is the identity.
            #[test]
            fn flatten_is_idempotent(doc in document()) {
                let once = flatten(&RawLog::new(doc, "h"));
                let rewrapped = RawLog::new(Value::Object(once.pairs.clone()), "h");
                let twice = flatten(&rewrapped);
                prop_assert_eq!(once.pairs, twice.pairs);
            }

            // Every emitted entry has exactly N values whose variants match
            // the schema domains, and categorical values are unit-mass
            // one-hots of vocabulary dimension.
            #[test]
            fn standardize_output_shape(doc in document(), t in 0i64..2_000_000_000) {
                let schema = SchemaBuilder::new("t")
                    .categorical("c", ["A", "B"])
                    .numerical("n", 0.0, 10.0)
                    .string("s")
                    .build()
                    .unwrap();
                let mut raw = RawLog::new(doc, "h");
                raw.raw_time = Some(json!(t));
                let flat = flatten(&raw);
                if let Ok(Some(entry)) = standardize(&flat, &schema) {
                    prop_assert_eq!(entry.values.len(), 3);
                    match &entry.values[0] {
                        AttributeValue::Categorical(v) => {
                            prop_assert_eq!(v.len(), 3);
                            let mass: f64 = v.iter().sum();
                            prop_assert!((mass - 1.0).abs() < 1e-9);
                            prop_assert!(entry.values[0].one_hot_index().is_some());
                        }
                        other => prop_assert!(false, "expected categorical, got {:?}", other),
                    }
                    prop_assert!(matches!(entry.values[1], AttributeValue::Numerical(_)));
                    prop_assert!(matches!(entry.values[2], AttributeValue::Str(_)));
                }
            }
        }
    }
}
