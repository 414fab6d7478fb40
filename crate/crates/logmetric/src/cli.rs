//! The command-line driver: file-in/file-out pipelines over the library.
//!
//! Subcommands: `ingest`, `dist`, `detect`, `cluster-kmeans`,
//! `cluster-dbscan`, `classify`, `embed`, `hist`, `synth`. Every command is
//! deterministic for a fixed `--seed` and identical inputs. Exit codes:
//! 0 success, 1 usage error, 2 data error.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::aggregate::{self, Centroid};
use crate::analytics::{
    dbscan, elbow, kmeans, knn_classify, mmds, pairwise_matrix, subsequences,
    suggest_dbscan_params, Holdout, KmeansOptions, SeedingLaw,
};
use crate::detect::{extract_signature, run_detector, Signature};
use crate::entry::{LogEntry, LogStream};
use crate::io;
use crate::metrics::{d_entry, d_stream_seq, d_stream_time};
use crate::schema::{Schema, SchemaConfig};
use crate::synth;

#[derive(Parser)]
#[command(
    name = "logmetric",
    version,
    about = "Embed host logs into a metric space: distances, soft-signature detection, classification, clustering"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Standardize raw JSON-lines logs under a schema config
    Ingest(IngestArgs),
    /// Write a pairwise distance matrix of entries, streams, or centroids
    Dist(DistArgs),
    /// Slide an attack signature across streams and score each window
    Detect(DetectArgs),
    /// k-means over grouped stream centroids, with optional elbow sweep
    ClusterKmeans(ClusterKmeansArgs),
    /// DBSCAN over fixed-length subsequences, outliers labeled -1
    ClusterDbscan(ClusterDbscanArgs),
    /// kNN classification over a distance matrix with (grouped) leave-one-out
    Classify(ClassifyArgs),
    /// SMACOF metric MDS of a distance matrix down to 2-D
    Embed(EmbedArgs),
    /// Hour-of-day histogram data from hour-cluster labels
    Hist(HistArgs),
    /// Generate the synthetic corpus with ground truth
    Synth(SynthArgs),
}

pub fn run() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let usage_ok = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let _ = e.print();
            return if usage_ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            };
        }
    };
    let result = match cli.command {
        Command::Ingest(args) => cmd_ingest(args),
        Command::Dist(args) => cmd_dist(args),
        Command::Detect(args) => cmd_detect(args),
        Command::ClusterKmeans(args) => cmd_cluster_kmeans(args),
        Command::ClusterDbscan(args) => cmd_cluster_dbscan(args),
        Command::Classify(args) => cmd_classify(args),
        Command::Embed(args) => cmd_embed(args),
        Command::Hist(args) => cmd_hist(args),
        Command::Synth(args) => cmd_synth(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

// ---------------------------------------------------------------- ingest --

#[derive(Args)]
struct IngestArgs {
    /// Schema config JSON; fitted stats are reused when present, fitted
    /// from this input otherwise
    #[arg(long)]
    schema: PathBuf,
    /// Raw JSON-lines input, one document per line
    #[arg(long, required = true, num_args = 1..)]
    input: Vec<PathBuf>,
    #[arg(long)]
    output_dir: PathBuf,
    /// Fixed host for all records, overriding the schema host key
    #[arg(long)]
    host: Option<String>,
    /// Flattened key holding the host, overriding the schema config
    #[arg(long)]
    host_key: Option<String>,
    /// Flattened key holding the timestamp, overriding the schema config
    #[arg(long)]
    time_key: Option<String>,
}

fn cmd_ingest(args: IngestArgs) -> Result<()> {
    let mut config = load_schema_config(&args.schema)?;
    if let Some(key) = &args.host_key {
        config.host_key = Some(key.clone());
    }
    if let Some(key) = &args.time_key {
        config.time_key = key.clone();
    }
    let mut documents = Vec::new();
    for path in &args.input {
        documents.extend(io::read_json_lines(path)?);
    }
    let run = io::ingest_documents(&documents, &config, args.host.as_deref())?;

    io::write_entries_jsonl(&args.output_dir.join("entries.jsonl"), &run.streams)?;
    io::write_atomic(
        &args.output_dir.join("schema_fitted.json"),
        run.schema.to_config().to_json_pretty().as_bytes(),
    )?;

    let stats = &run.stats;
    eprintln!(
        "ingest: {} standardized into {} streams; {} discarded (no schema keys), \
         {} rejected (bad timestamp), {} rejected (bad numeric), {} rejected (missing host)",
        stats.standardized,
        run.streams.len(),
        stats.discarded,
        stats.rejected_bad_timestamp,
        stats.rejected_bad_numeric,
        run.rejected_missing_host,
    );
    Ok(())
}

// ------------------------------------------------------------------ dist --

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MetricKind {
    /// Entry metric between individual entries
    Entry,
    /// Mean positional entry distance between equal-length groups
    StreamSeq,
    /// Time-interpolated stream distance over a uniform grid
    StreamTime,
    /// Entry-form distance between group centroids (string-free schemas)
    Centroid,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Grouping {
    /// Each entry is its own item
    Entry,
    /// One item per host
    Host,
    /// One item per host and wall-clock day
    HostDay,
    /// One item per host and wall-clock hour
    HostHour,
}

#[derive(Args)]
struct DistArgs {
    /// Standardized entries (JSON-lines from `ingest`)
    #[arg(long)]
    entries: PathBuf,
    /// Fitted schema config
    #[arg(long)]
    schema: PathBuf,
    #[arg(long, value_enum, default_value = "centroid")]
    metric: MetricKind,
    #[arg(long, value_enum, default_value = "host-day")]
    group: Grouping,
    /// Interpolation grid size for the stream-time metric
    #[arg(long, default_value_t = 64)]
    grid: usize,
    /// Minutes added to UTC before day/hour bucketing
    #[arg(long, default_value_t = 0)]
    tz_offset_minutes: i64,
    /// Output matrix CSV
    #[arg(long)]
    output: PathBuf,
}

fn cmd_dist(args: DistArgs) -> Result<()> {
    let schema = load_fitted_schema(&args.schema)?;
    let streams = io::read_entries_jsonl(&args.entries)?;
    let grouping = if args.metric == MetricKind::Entry {
        Grouping::Entry
    } else {
        args.group
    };
    let groups = group_items(&streams, grouping, args.tz_offset_minutes * 60);
    if groups.len() < 2 {
        bail!("need at least 2 items, got {}", groups.len());
    }
    let ids: Vec<String> = groups.iter().map(|(id, _)| id.clone()).collect();

    let matrix = match args.metric {
        MetricKind::Entry => {
            pairwise_matrix(&groups, |a, b| Ok(d_entry(&a.1[0], &b.1[0], &schema)?))?
        }
        MetricKind::StreamSeq => {
            pairwise_matrix(&groups, |a, b| Ok(d_stream_seq(&a.1, &b.1, &schema)?))?
        }
        MetricKind::StreamTime => {
            let as_streams: Vec<LogStream> = groups
                .iter()
                .map(|(id, entries)| LogStream {
                    host: id.clone(),
                    entries: entries.clone(),
                })
                .collect();
            pairwise_matrix(&as_streams, |a, b| {
                Ok(d_stream_time(a, b, args.grid, &schema)?)
            })?
        }
        MetricKind::Centroid => {
            let centroids: Vec<Centroid> = groups
                .iter()
                .map(|(_, entries)| aggregate::centroid(entries, &schema))
                .collect::<Result<_, _>>()?;
            pairwise_matrix(&centroids, |a, b| {
                Ok(aggregate::d_between_centroids(a, b, &schema)?)
            })?
        }
    };
    io::write_matrix_csv(&args.output, &ids, &matrix)?;
    println!(
        "dist: wrote {0}x{0} matrix to {1}",
        ids.len(),
        args.output.display()
    );
    Ok(())
}

// ---------------------------------------------------------------- detect --

#[derive(Args)]
struct DetectArgs {
    /// Standardized entries (JSON-lines from `ingest`)
    #[arg(long)]
    entries: PathBuf,
    /// Fitted schema config
    #[arg(long)]
    schema: PathBuf,
    /// Signature file (JSON) to test against every stream
    #[arg(long, required_unless_present = "extract")]
    signature: Option<PathBuf>,
    /// Cut a signature out of the input instead of loading one:
    /// HOST:START:END with entry indices, END exclusive
    #[arg(long, value_parser = parse_extract)]
    extract: Option<(String, usize, usize)>,
    /// Where to write an extracted signature
    #[arg(long)]
    signature_out: Option<PathBuf>,
    /// Alert when the one-sided p-value is at or under this
    #[arg(long, default_value_t = 1e-15)]
    threshold: f64,
    /// Minimum history length before any alert
    #[arg(long, default_value_t = 30)]
    warmup: u64,
    #[arg(long)]
    output_dir: PathBuf,
}

fn parse_extract(text: &str) -> Result<(String, usize, usize), String> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err("expected HOST:START:END".into());
    }
    let start: usize = parts[1]
        .parse()
        .map_err(|_| "START must be an integer".to_string())?;
    let end: usize = parts[2]
        .parse()
        .map_err(|_| "END must be an integer".to_string())?;
    Ok((parts[0].to_string(), start, end))
}

fn cmd_detect(args: DetectArgs) -> Result<()> {
    let schema = load_fitted_schema(&args.schema)?;
    let streams = io::read_entries_jsonl(&args.entries)?;

    let signature: Signature = match (&args.signature, &args.extract) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading signature {}", path.display()))?;
            Signature::from_json(&text)?
        }
        (None, Some((host, start, end))) => {
            let stream = streams
                .iter()
                .find(|s| s.host == *host)
                .ok_or_else(|| anyhow!("no stream for host {host:?}"))?;
            let sig = extract_signature(stream, *start, *end)?;
            if let Some(out) = &args.signature_out {
                io::write_atomic(out, sig.to_json_pretty().as_bytes())?;
                eprintln!("detect: wrote signature to {}", out.display());
            }
            sig
        }
        _ => bail!("pass exactly one of --signature or --extract"),
    };

    let mut alerts_jsonl = String::new();
    let mut trace = csv::Writer::from_writer(Vec::new());
    trace.write_record(["host", "window_index", "window_time", "distance", "p_value"])?;
    println!(
        "{:<10} {:>9} {:>13} {:>8}",
        "host", "windows", "min_p", "alerts"
    );
    for stream in &streams {
        let run = run_detector(&signature, stream, &schema, args.threshold, args.warmup)?;
        for (k, (&d, &p)) in run.distances.iter().zip(&run.p_values).enumerate() {
            trace.write_record([
                stream.host.as_str(),
                &k.to_string(),
                &format!("{:.3}", stream.entries[k].time),
                &format!("{d:.9}"),
                &format!("{p:.6e}"),
            ])?;
        }
        for alert in &run.alerts {
            alerts_jsonl.push_str(&serde_json::to_string(alert)?);
            alerts_jsonl.push('\n');
        }
        println!(
            "{:<10} {:>9} {:>13.3e} {:>8}",
            run.host,
            run.distances.len(),
            run.min_p_value().unwrap_or(1.0),
            run.alerts.len()
        );
    }
    io::write_atomic(
        &args.output_dir.join("alerts.jsonl"),
        alerts_jsonl.as_bytes(),
    )?;
    io::write_atomic(
        &args.output_dir.join("trace.csv"),
        &trace.into_inner().map_err(|e| anyhow!("{e}"))?,
    )?;
    Ok(())
}

// -------------------------------------------------------- cluster-kmeans --

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SeedingArg {
    /// Probability inversely proportional to the distance to the
    /// closest seed
    Inverse,
    /// Probability proportional to the squared distance (k-means++)
    Squared,
}

#[derive(Args)]
struct ClusterKmeansArgs {
    #[arg(long)]
    entries: PathBuf,
    #[arg(long)]
    schema: PathBuf,
    #[arg(long, value_enum, default_value = "host-hour")]
    group: Grouping,
    #[arg(long, default_value_t = 0)]
    tz_offset_minutes: i64,
    /// Number of clusters
    #[arg(long, required_unless_present = "elbow")]
    k: Option<usize>,
    /// Also sweep k over an inclusive range, e.g. 2..10, writing elbow.csv
    #[arg(long, value_parser = parse_range)]
    elbow: Option<(usize, usize)>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "inverse")]
    seeding: SeedingArg,
    /// Restarts per k; the best WCSS wins
    #[arg(long, default_value_t = 5)]
    restarts: usize,
    #[arg(long)]
    output_dir: PathBuf,
}

fn parse_range(text: &str) -> Result<(usize, usize), String> {
    let (lo, hi) = text
        .split_once("..")
        .ok_or_else(|| "expected LO..HI".to_string())?;
    let lo: usize = lo
        .parse()
        .map_err(|_| "LO must be an integer".to_string())?;
    let hi: usize = hi
        .trim_start_matches('=')
        .parse()
        .map_err(|_| "HI must be an integer".to_string())?;
    if lo < 1 || hi < lo {
        return Err("need 1 <= LO <= HI".into());
    }
    Ok((lo, hi))
}

fn group_pseudo_entries(
    streams: &[LogStream],
    grouping: Grouping,
    tz_offset_seconds: i64,
    schema: &Schema,
) -> Result<(Vec<String>, Vec<LogEntry>)> {
    let groups = group_items(streams, grouping, tz_offset_seconds);
    let mut ids = Vec::with_capacity(groups.len());
    let mut items = Vec::with_capacity(groups.len());
    for (id, entries) in groups {
        if grouping == Grouping::Entry {
            ids.push(id);
            items.push(entries.into_iter().next().expect("entry group"));
            continue;
        }
        let c = aggregate::centroid(&entries, schema)?;
        let pseudo = c.to_entry(0.0).ok_or_else(|| {
            anyhow!(
                "grouped clustering needs a string-free schema; \
                 re-ingest under a schema without string attributes"
            )
        })?;
        ids.push(id);
        items.push(pseudo);
    }
    Ok((ids, items))
}

fn cmd_cluster_kmeans(args: ClusterKmeansArgs) -> Result<()> {
    let schema = load_fitted_schema(&args.schema)?;
    let streams = io::read_entries_jsonl(&args.entries)?;
    let (ids, items) =
        group_pseudo_entries(&streams, args.group, args.tz_offset_minutes * 60, &schema)?;
    let seeding = match args.seeding {
        SeedingArg::Inverse => SeedingLaw::InverseDistance,
        SeedingArg::Squared => SeedingLaw::SquaredDistance,
    };

    if let Some((lo, hi)) = args.elbow {
        let curve = elbow(&items, &schema, lo..=hi, args.seed, args.restarts)?;
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(["k", "wcss"])?;
        for (k, wcss) in &curve {
            writer.write_record([k.to_string(), format!("{wcss:.9}")])?;
        }
        io::write_atomic(
            &args.output_dir.join("elbow.csv"),
            &writer.into_inner().map_err(|e| anyhow!("{e}"))?,
        )?;
        println!("elbow: {curve:?}");
    }

    let Some(k) = args.k else { return Ok(()) };
    let mut best: Option<crate::analytics::KmeansRun> = None;
    for restart in 0..args.restarts.max(1) {
        let opts = KmeansOptions {
            k,
            seed: args
                .seed
                .wrapping_mul(0x9E3779B97F4A7C15)
                .wrapping_add(restart as u64),
            seeding,
            max_iter: 100,
        };
        let run = kmeans(&items, &schema, &opts)?;
        if best.as_ref().is_none_or(|b| run.wcss < b.wcss) {
            best = Some(run);
        }
    }
    let run = best.expect("at least one restart");

    io::write_labels_csv(
        &args.output_dir.join("labels.csv"),
        ("item_id", "label"),
        ids.iter()
            .cloned()
            .zip(run.assignment.labels.iter().copied()),
    )?;
    let centroids = run.assignment.centroids.as_ref().expect("kmeans centroids");
    let listing: Vec<serde_json::Value> = centroids
        .iter()
        .enumerate()
        .map(|(i, c)| {
            serde_json::json!({
                "cluster": i,
                "members": run.assignment.labels.iter().filter(|&&l| l == i as i64).count(),
                "centroid": c.to_listing(&schema),
            })
        })
        .collect();
    io::write_atomic(
        &args.output_dir.join("centroids.json"),
        serde_json::to_string_pretty(&listing)?.as_bytes(),
    )?;
    println!(
        "cluster-kmeans: k={} over {} items, wcss={:.6}, {} iterations",
        k,
        ids.len(),
        run.wcss,
        run.iterations
    );
    Ok(())
}

// -------------------------------------------------------- cluster-dbscan --

#[derive(Args)]
struct ClusterDbscanArgs {
    #[arg(long)]
    entries: PathBuf,
    #[arg(long)]
    schema: PathBuf,
    /// Subsequence window length m
    #[arg(long, default_value_t = 7)]
    subseq_len: usize,
    /// Neighborhood radius; defaults to the median 4th-nearest-neighbor
    /// distance
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long, default_value_t = 4)]
    min_pts: usize,
    #[arg(long)]
    output_dir: PathBuf,
}

fn cmd_cluster_dbscan(args: ClusterDbscanArgs) -> Result<()> {
    let schema = load_fitted_schema(&args.schema)?;
    let streams = io::read_entries_jsonl(&args.entries)?;

    let mut ids = Vec::new();
    let mut windows: Vec<&[LogEntry]> = Vec::new();
    for stream in &streams {
        if stream.entries.len() < args.subseq_len {
            continue;
        }
        for (w, window) in subsequences(stream, args.subseq_len)?
            .into_iter()
            .enumerate()
        {
            ids.push(format!("{}@{}", stream.host, w * args.subseq_len));
            windows.push(window);
        }
    }
    if windows.len() < 2 {
        bail!("need at least 2 subsequences, got {}", windows.len());
    }

    let matrix = pairwise_matrix(&windows, |a, b| Ok(d_stream_seq(a, b, &schema)?))?;
    let (eps, min_pts) = match args.eps {
        Some(eps) => (eps, args.min_pts),
        None => {
            let (eps, _) = suggest_dbscan_params(&matrix);
            (eps, args.min_pts)
        }
    };
    let assignment = dbscan(&matrix, eps, min_pts);

    io::write_labels_csv(
        &args.output_dir.join("labels.csv"),
        ("item_id", "label"),
        ids.iter().cloned().zip(assignment.labels.iter().copied()),
    )?;

    // Interpretable cluster summaries: pooled centroid of the member
    // windows' entries.
    let mut listing = Vec::new();
    for cluster in 0..assignment.cluster_count() {
        let members: Vec<LogEntry> = windows
            .iter()
            .zip(&assignment.labels)
            .filter(|(_, &l)| l == cluster as i64)
            .flat_map(|(w, _)| w.iter().cloned())
            .collect();
        let c = aggregate::centroid(&members, &schema)?;
        listing.push(serde_json::json!({
            "cluster": cluster,
            "windows": assignment.labels.iter().filter(|&&l| l == cluster as i64).count(),
            "centroid": c.to_listing(&schema),
        }));
    }
    io::write_atomic(
        &args.output_dir.join("centroids.json"),
        serde_json::to_string_pretty(&listing)?.as_bytes(),
    )?;
    println!(
        "cluster-dbscan: {} windows, eps={:.6}, min_pts={}, {} clusters, {} outliers",
        windows.len(),
        eps,
        min_pts,
        assignment.cluster_count(),
        assignment.outliers().len()
    );
    Ok(())
}

// -------------------------------------------------------------- classify --

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum HoldoutArg {
    /// Hold out only the classified item
    Loo,
    /// Hold out every item of the same host (id prefix before '@')
    Host,
}

#[derive(Args)]
struct ClassifyArgs {
    /// Distance matrix CSV from `dist`
    #[arg(long)]
    matrix: PathBuf,
    /// CSV of item_id,label with one row per matrix item
    #[arg(long)]
    labels: PathBuf,
    #[arg(long, default_value_t = 3)]
    k: usize,
    #[arg(long, value_enum, default_value = "loo")]
    holdout: HoldoutArg,
    /// Predictions CSV
    #[arg(long)]
    output: PathBuf,
}

fn host_of(id: &str) -> &str {
    id.split('@').next().unwrap_or(id)
}

fn cmd_classify(args: ClassifyArgs) -> Result<()> {
    let (ids, matrix) = io::read_matrix_csv(&args.matrix)?;
    let label_rows = io::read_labels_csv(&args.labels)?;
    let by_id: BTreeMap<&str, &str> = label_rows
        .iter()
        .map(|(id, label)| (id.as_str(), label.as_str()))
        .collect();

    let mut class_names: Vec<&str> = label_rows.iter().map(|(_, l)| l.as_str()).collect();
    class_names.sort_unstable();
    class_names.dedup();
    let labels: Vec<usize> = ids
        .iter()
        .map(|id| {
            let name = by_id
                .get(id.as_str())
                .ok_or_else(|| anyhow!("no label for item {id:?}"))?;
            Ok(class_names.binary_search(name).expect("label interned"))
        })
        .collect::<Result<_>>()?;

    let groups: Vec<usize>;
    let holdout = match args.holdout {
        HoldoutArg::Loo => Holdout::LeaveOneOut,
        HoldoutArg::Host => {
            let mut hosts: Vec<&str> = ids.iter().map(|id| host_of(id)).collect();
            hosts.sort_unstable();
            hosts.dedup();
            groups = ids
                .iter()
                .map(|id| hosts.binary_search(&host_of(id)).expect("host interned"))
                .collect();
            Holdout::LeaveGroupOut(&groups)
        }
    };

    let report = knn_classify(&matrix, &labels, args.k, holdout)?;
    io::write_labels_csv(
        &args.output,
        ("item_id", "predicted"),
        ids.iter().cloned().zip(
            report
                .predictions
                .iter()
                .map(|&p| class_names[p].to_string()),
        ),
    )?;

    println!("{:<16} {:>8}", "class", "f1");
    for (class, f1) in &report.per_class_f1 {
        println!("{:<16} {:>8.4}", class_names[*class], f1);
    }
    println!("{:<16} {:>8.4}", "macro", report.macro_f1);
    Ok(())
}

// ----------------------------------------------------------------- embed --

#[derive(Args)]
struct EmbedArgs {
    /// Distance matrix CSV from `dist`
    #[arg(long)]
    matrix: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 500)]
    max_iter: usize,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Coordinates CSV; the final stress lands in a `.stress.json` sidecar
    #[arg(long)]
    output: PathBuf,
}

fn cmd_embed(args: EmbedArgs) -> Result<()> {
    let (ids, matrix) = io::read_matrix_csv(&args.matrix)?;
    let embedding = mmds(&matrix, args.seed, args.max_iter, args.tol)?;

    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(["item_id", "x", "y"])?;
    for (id, xy) in ids.iter().zip(&embedding.coordinates) {
        writer.write_record([id.clone(), format!("{:.9}", xy[0]), format!("{:.9}", xy[1])])?;
    }
    io::write_atomic(
        &args.output,
        &writer.into_inner().map_err(|e| anyhow!("{e}"))?,
    )?;

    let sidecar = sidecar_path(&args.output, "stress.json");
    io::write_atomic(
        &sidecar,
        serde_json::to_string_pretty(&serde_json::json!({
            "stress": embedding.stress,
            "iterations": embedding.iterations,
        }))?
        .as_bytes(),
    )?;
    println!(
        "embed: {} items, stress {:.6e} after {} iterations",
        ids.len(),
        embedding.stress,
        embedding.iterations
    );
    Ok(())
}

fn sidecar_path(path: &Path, suffix: &str) -> PathBuf {
    let mut name = path.file_stem().unwrap_or_default().to_os_string();
    name.push(".");
    name.push(suffix);
    path.with_file_name(name)
}

// ------------------------------------------------------------------ hist --

#[derive(Args)]
struct HistArgs {
    /// labels.csv from `cluster-kmeans --group host-hour`
    #[arg(long)]
    labels: PathBuf,
    /// Output CSV of host,hour,cluster_label,count
    #[arg(long)]
    output: PathBuf,
}

fn cmd_hist(args: HistArgs) -> Result<()> {
    let rows = io::read_labels_csv(&args.labels)?;
    let mut counts: BTreeMap<(String, i64, String), u64> = BTreeMap::new();
    for (id, label) in rows {
        let (host, bucket) = id
            .split_once('@')
            .ok_or_else(|| anyhow!("item id {id:?} is not host@hour"))?;
        let bucket: i64 = bucket
            .parse()
            .map_err(|_| anyhow!("item id {id:?} has a non-numeric hour bucket"))?;
        let hour = bucket.rem_euclid(24);
        *counts.entry((host.to_string(), hour, label)).or_insert(0) += 1;
    }
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(["host", "hour", "cluster_label", "count"])?;
    let row_count = counts.len();
    for ((host, hour, label), count) in counts {
        writer.write_record([host, hour.to_string(), label, count.to_string()])?;
    }
    io::write_atomic(
        &args.output,
        &writer.into_inner().map_err(|e| anyhow!("{e}"))?,
    )?;
    println!("hist: {row_count} rows to {}", args.output.display());
    Ok(())
}

// ----------------------------------------------------------------- synth --

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    output_dir: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 7)]
    hosts: usize,
    /// Host-days in total, spread across hosts
    #[arg(long, default_value_t = 61)]
    days: usize,
    #[arg(long, default_value_t = 260)]
    entries_per_day: usize,
    /// Hosts that get one implanted attack sequence each
    #[arg(long, default_value_t = 4)]
    attacks: usize,
}

fn cmd_synth(args: SynthArgs) -> Result<()> {
    if args.hosts == 0 || args.days < args.hosts {
        bail!("need at least one day per host");
    }
    if args.attacks > args.hosts {
        bail!("more attacks than hosts");
    }
    let corpus = synth::generate(&synth::SynthConfig {
        seed: args.seed,
        hosts: args.hosts,
        total_days: args.days,
        entries_per_day: args.entries_per_day,
        attacks: args.attacks,
        ..Default::default()
    });

    let mut lines = String::new();
    for doc in &corpus.documents {
        lines.push_str(&serde_json::to_string(doc)?);
        lines.push('\n');
    }
    io::write_atomic(&args.output_dir.join("logs.jsonl"), lines.as_bytes())?;
    io::write_atomic(
        &args.output_dir.join("schema.json"),
        corpus.schema_config.to_json_pretty().as_bytes(),
    )?;
    io::write_atomic(
        &args.output_dir.join("truth.json"),
        serde_json::to_string_pretty(&corpus.truth)?.as_bytes(),
    )?;
    println!(
        "synth: {} documents for {} hosts ({} attacks) in {}",
        corpus.documents.len(),
        args.hosts,
        corpus.truth.attacks.len(),
        args.output_dir.display()
    );
    Ok(())
}

// --------------------------------------------------------------- helpers --

fn load_schema_config(path: &Path) -> Result<SchemaConfig> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading schema config {}", path.display()))?;
    Ok(SchemaConfig::from_json(&text)?)
}

fn load_fitted_schema(path: &Path) -> Result<Schema> {
    Ok(load_schema_config(path)?.into_schema()?)
}

/// Group stream entries into identified items. Ids are stable:
/// `host#index` for single entries, `host` for whole streams, and
/// `host@bucket` for day/hour buckets, with the bucket the floor of the
/// offset-shifted time over the bucket width.
fn group_items(
    streams: &[LogStream],
    grouping: Grouping,
    tz_offset_seconds: i64,
) -> Vec<(String, Vec<LogEntry>)> {
    match grouping {
        Grouping::Entry => streams
            .iter()
            .flat_map(|s| {
                s.entries
                    .iter()
                    .enumerate()
                    .map(move |(i, e)| (format!("{}#{}", s.host, i), vec![e.clone()]))
            })
            .collect(),
        Grouping::Host => streams
            .iter()
            .map(|s| (s.host.clone(), s.entries.clone()))
            .collect(),
        Grouping::HostDay | Grouping::HostHour => {
            let width = if grouping == Grouping::HostDay {
                86_400.0
            } else {
                3_600.0
            };
            let mut buckets: BTreeMap<(String, i64), Vec<LogEntry>> = BTreeMap::new();
            for stream in streams {
                for entry in &stream.entries {
                    let shifted = entry.time + tz_offset_seconds as f64;
                    let bucket = (shifted / width).floor() as i64;
                    buckets
                        .entry((stream.host.clone(), bucket))
                        .or_default()
                        .push(entry.clone());
                }
            }
            buckets
                .into_iter()
                .map(|((host, bucket), entries)| (format!("{host}@{bucket}"), entries))
                .collect()
        }
    }
}
