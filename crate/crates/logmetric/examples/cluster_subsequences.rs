//! Subsequence clustering: split streams into 7-entry windows, compare them
//! with the sequence stream metric, and run DBSCAN to separate recurring
//! background runs (clusters) from one-off activity (outliers).
//!
//! ```bash
//! cargo run --release --example cluster_subsequences
//! ```

use logmetric::aggregate::centroid;
use logmetric::analytics::{dbscan, pairwise_matrix, subsequences, suggest_dbscan_params};
use logmetric::entry::LogEntry;
use logmetric::io::ingest_documents;
use logmetric::metrics::d_stream_seq;
use logmetric::synth;

const WINDOW: usize = 7;

fn main() {
    let corpus = synth::generate(&synth::SynthConfig {
        total_days: 7,
        entries_per_day: 120,
        attacks: 1,
        ..Default::default()
    });
    let run =
        ingest_documents(&corpus.documents, &corpus.schema_config, None).expect("corpus ingests");

    let mut ids: Vec<String> = Vec::new();
    let mut windows: Vec<&[LogEntry]> = Vec::new();
    for stream in &run.streams {
        for (w, window) in subsequences(stream, WINDOW)
            .expect("long enough")
            .into_iter()
            .enumerate()
        {
            ids.push(format!("{}@{}", stream.host, w * WINDOW));
            windows.push(window);
        }
    }
    println!("{} windows of {WINDOW} entries each", windows.len());

    let matrix =
        pairwise_matrix(&windows, |a, b| Ok(d_stream_seq(a, b, &run.schema)?)).expect("matrix");
    let (eps, min_pts) = suggest_dbscan_params(&matrix);
    println!("DBSCAN with eps = {eps:.3} (median 4th-neighbor distance), min_pts = {min_pts}");

    let assignment = dbscan(&matrix, eps, min_pts);
    println!(
        "{} clusters, {} outlier windows\n",
        assignment.cluster_count(),
        assignment.outliers().len()
    );

    for cluster in 0..assignment.cluster_count() {
        let members: Vec<LogEntry> = windows
            .iter()
            .zip(&assignment.labels)
            .filter(|(_, &l)| l == cluster as i64)
            .flat_map(|(w, _)| w.iter().cloned())
            .collect();
        let c = centroid(&members, &run.schema).expect("nonempty cluster");
        let window_count = members.len() / WINDOW;
        let top: Vec<String> = c
            .category_fractions(&run.schema, 2)
            .into_iter()
            .take(3)
            .map(|(name, p)| format!("{name} {p:.2}"))
            .collect();
        println!(
            "cluster {cluster:<2} {window_count:>4} windows  creators: {}",
            top.join(", ")
        );
    }

    // Outliers are where one-off (possibly hostile) activity hides; the
    // implanted attack window should be among them or in a tiny cluster.
    let attack = &corpus.truth.attacks[0];
    let attack_window = attack.start_index / WINDOW;
    let attack_id = format!("{}@{}", attack.host, attack_window * WINDOW);
    let label = ids
        .iter()
        .zip(&assignment.labels)
        .find(|(id, _)| **id == attack_id)
        .map(|(_, &l)| l)
        .expect("attack window exists");
    println!(
        "\nwindow containing the implanted attack ({attack_id}): label {label} \
         ({})",
        if label == -1 { "outlier" } else { "cluster" }
    );
}
