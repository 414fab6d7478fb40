//! File formats and the document-stream ingestion driver.
//!
//! Record streams travel as JSON-lines, matrices and label tables as CSV
//! with a header row of item ids. Output files are written atomically
//! (temp file in the target directory, then rename).

use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::analytics::DistanceMatrix;
use crate::entry::{LogEntry, LogStream};
use crate::ingest::{build_streams, fit_schema_stats, flatten, standardize, IngestStats, RawLog};
use crate::schema::{Schema, SchemaConfig, SchemaError};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: invalid JSON: {source}")]
    Json {
        path: PathBuf,
        line: usize,
        source: serde_json::Error,
    },
    #[error(transparent)]
    Schema(#[from] SchemaError),
    #[error("CSV error in {path}: {detail}")]
    Csv { path: PathBuf, detail: String },
    #[error("no records")]
    NoRecords,
}

fn file_err(path: &Path) -> impl FnOnce(std::io::Error) -> IoError + '_ {
    move |source| IoError::File {
        path: path.to_path_buf(),
        source,
    }
}

/// Atomically write `content` to `path` via a temp file in the same
/// directory.
pub fn write_atomic(path: &Path, content: &[u8]) -> Result<(), IoError> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    std::fs::create_dir_all(dir).map_err(file_err(path))?;
    let mut temp = tempfile_in(dir).map_err(file_err(path))?;
    temp.1.write_all(content).map_err(file_err(path))?;
    temp.1.flush().map_err(file_err(path))?;
    drop(temp.1);
    std::fs::rename(&temp.0, path).map_err(file_err(path))?;
    Ok(())
}

fn tempfile_in(dir: &Path) -> std::io::Result<(PathBuf, std::fs::File)> {
    // Unique-enough name for single-process writers; collisions fail openly.
    let name = format!(
        ".tmp-{}-{:x}",
        std::process::id(),
        std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_nanos())
            .unwrap_or(0)
    );
    let path = dir.join(name);
    let file = std::fs::OpenOptions::new()
        .write(true)
        .create_new(true)
        .open(&path)?;
    Ok((path, file))
}

/// Read one JSON document per line; blank lines are skipped.
pub fn read_json_lines(path: &Path) -> Result<Vec<Value>, IoError> {
    let file = std::fs::File::open(path).map_err(file_err(path))?;
    let reader = std::io::BufReader::new(file);
    let mut documents = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(file_err(path))?;
        if line.trim().is_empty() {
            continue;
        }
        let value = serde_json::from_str(&line).map_err(|source| IoError::Json {
            path: path.to_path_buf(),
            line: i + 1,
            source,
        })?;
        documents.push(value);
    }
    Ok(documents)
}

/// One standardized entry with its host, the JSON-lines record format of
/// entries files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HostedEntry {
    pub host: String,
    #[serde(flatten)]
    pub entry: LogEntry,
}

pub fn write_entries_jsonl(path: &Path, streams: &[LogStream]) -> Result<(), IoError> {
    let mut out = String::new();
    for stream in streams {
        for entry in &stream.entries {
            let record = HostedEntry {
                host: stream.host.clone(),
                entry: entry.clone(),
            };
            out.push_str(&serde_json::to_string(&record).expect("entry serializes"));
            out.push('\n');
        }
    }
    write_atomic(path, out.as_bytes())
}

pub fn read_entries_jsonl(path: &Path) -> Result<Vec<LogStream>, IoError> {
    let mut entries = Vec::new();
    for (i, value) in read_json_lines(path)?.into_iter().enumerate() {
        let record: HostedEntry =
            serde_json::from_value(value).map_err(|source| IoError::Json {
                path: path.to_path_buf(),
                line: i + 1,
                source,
            })?;
        entries.push((record.host, record.entry));
    }
    Ok(build_streams(entries))
}

/// Everything an ingestion run produces.
#[derive(Debug)]
pub struct IngestRun {
    pub schema: Schema,
    pub streams: Vec<LogStream>,
    pub stats: IngestStats,
    pub rejected_missing_host: u64,
}

/// Drive the full ingestion pipeline over in-memory documents: flatten, fit
/// statistics when the config carries none (a pre-fitted config is used
/// frozen), standardize, and group into per-host streams.
pub fn ingest_documents(
    documents: &[Value],
    config: &SchemaConfig,
    host_override: Option<&str>,
) -> Result<IngestRun, IoError> {
    let flats: Vec<_> = documents
        .iter()
        .map(|doc| flatten(&RawLog::new(doc.clone(), "")))
        .collect();
    if flats.is_empty() {
        return Err(IoError::NoRecords);
    }

    let schema = if config.fitted.is_some() {
        config.clone().into_schema()?
    } else {
        fit_schema_stats(&flats, config)?
    };

    let mut stats = IngestStats::default();
    let mut rejected_missing_host = 0;
    let mut entries = Vec::new();
    for flat in &flats {
        let host = match host_override {
            Some(host) => Some(host.to_string()),
            None => schema
                .host_key()
                .and_then(|key| flat.pairs.get(key))
                .and_then(|v| {
                    v.as_str()
                        .map(str::to_string)
                        .or_else(|| Some(v.to_string()))
                }),
        };
        match standardize(flat, &schema) {
            Ok(Some(entry)) => match host {
                Some(host) => {
                    stats.standardized += 1;
                    entries.push((host, entry));
                }
                None => rejected_missing_host += 1,
            },
            Ok(None) => stats.discarded += 1,
            Err(rejection) => stats.record_rejection(&rejection),
        }
    }
    Ok(IngestRun {
        schema,
        streams: build_streams(entries),
        stats,
        rejected_missing_host,
    })
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::Writer::from_writer(Vec::new())
}

fn csv_finish(path: &Path, writer: csv::Writer<Vec<u8>>) -> Result<(), IoError> {
    let bytes = writer.into_inner().map_err(|e| IoError::Csv {
        path: path.to_path_buf(),
        detail: e.to_string(),
    })?;
    write_atomic(path, &bytes)
}

/// n-by-n matrix CSV: a header row of item ids, then one row per item.
pub fn write_matrix_csv(
    path: &Path,
    ids: &[String],
    matrix: &DistanceMatrix,
) -> Result<(), IoError> {
    assert_eq!(ids.len(), matrix.n());
    let mut writer = csv_writer();
    let mut header = vec!["id".to_string()];
    header.extend_from_slice(ids);
    writer.write_record(&header).map_err(|e| IoError::Csv {
        path: path.to_path_buf(),
        detail: e.to_string(),
    })?;
    for (i, id) in ids.iter().enumerate() {
        let mut row = vec![id.clone()];
        row.extend(matrix.row(i).iter().map(|d| format!("{d:.12}")));
        writer.write_record(&row).map_err(|e| IoError::Csv {
            path: path.to_path_buf(),
            detail: e.to_string(),
        })?;
    }
    csv_finish(path, writer)
}

pub fn read_matrix_csv(path: &Path) -> Result<(Vec<String>, DistanceMatrix), IoError> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| IoError::Csv {
        path: path.to_path_buf(),
        detail: e.to_string(),
    })?;
    let headers = reader.headers().map_err(|e| IoError::Csv {
        path: path.to_path_buf(),
        detail: e.to_string(),
    })?;
    let ids: Vec<String> = headers.iter().skip(1).map(str::to_string).collect();
    let n = ids.len();
    let mut values = Vec::with_capacity(n * n);
    for record in reader.records() {
        let record = record.map_err(|e| IoError::Csv {
            path: path.to_path_buf(),
            detail: e.to_string(),
        })?;
        for field in record.iter().skip(1) {
            let v: f64 = field.parse().map_err(|_| IoError::Csv {
                path: path.to_path_buf(),
                detail: format!("bad number {field:?}"),
            })?;
            values.push(v);
        }
    }
    if values.len() != n * n {
        return Err(IoError::Csv {
            path: path.to_path_buf(),
            detail: format!("expected {} values, found {}", n * n, values.len()),
        });
    }
    let matrix = DistanceMatrix::from_values(n, values).map_err(|e| IoError::Csv {
        path: path.to_path_buf(),
        detail: e.to_string(),
    })?;
    Ok((ids, matrix))
}

/// Two-column CSV of (item id, value), used for labels and predictions.
pub fn write_labels_csv<T: std::fmt::Display>(
    path: &Path,
    header: (&str, &str),
    rows: impl IntoIterator<Item = (String, T)>,
) -> Result<(), IoError> {
    let mut writer = csv_writer();
    writer
        .write_record([header.0, header.1])
        .map_err(|e| IoError::Csv {
            path: path.to_path_buf(),
            detail: e.to_string(),
        })?;
    for (id, value) in rows {
        writer
            .write_record([id, value.to_string()])
            .map_err(|e| IoError::Csv {
                path: path.to_path_buf(),
                detail: e.to_string(),
            })?;
    }
    csv_finish(path, writer)
}

pub fn read_labels_csv(path: &Path) -> Result<Vec<(String, String)>, IoError> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| IoError::Csv {
        path: path.to_path_buf(),
        detail: e.to_string(),
    })?;
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| IoError::Csv {
            path: path.to_path_buf(),
            detail: e.to_string(),
        })?;
        if record.len() < 2 {
            return Err(IoError::Csv {
                path: path.to_path_buf(),
                detail: "expected two columns".into(),
            });
        }
        rows.push((record[0].to_string(), record[1].to_string()));
    }
    Ok(rows)
}
