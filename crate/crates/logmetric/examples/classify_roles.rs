//! Stream classification: represent each host-day as a centroid, compare
//! the centroids pairwise, and classify user roles and host identities with
//! kNN under (grouped) leave-one-out validation.
//!
//! ```bash
//! cargo run --release --example classify_roles
//! ```

use logmetric::aggregate::{centroid, d_between_centroids, variance_centroids};
use logmetric::analytics::{knn_classify, pairwise_matrix, Holdout};
use logmetric::entry::LogEntry;
use logmetric::io::ingest_documents;
use logmetric::synth;
use std::collections::BTreeMap;

fn main() {
    let corpus = synth::generate(&synth::SynthConfig::default());
    // Stream comparison works best without the free-text command line.
    let run = ingest_documents(
        &corpus.documents,
        &synth::classification_schema_config(),
        None,
    )
    .expect("corpus ingests");

    // One centroid per host-day: the average activity of that day.
    let mut ids: Vec<String> = Vec::new();
    let mut hosts: Vec<String> = Vec::new();
    let mut daily = Vec::new();
    for stream in &run.streams {
        let mut by_day: BTreeMap<i64, Vec<LogEntry>> = BTreeMap::new();
        for entry in &stream.entries {
            by_day
                .entry((entry.time / 86_400.0).floor() as i64)
                .or_default()
                .push(entry.clone());
        }
        for (day, entries) in by_day {
            ids.push(format!("{}@{}", stream.host, day));
            hosts.push(stream.host.clone());
            daily.push(centroid(&entries, &run.schema).expect("nonempty day"));
        }
    }
    println!(
        "{} daily streams from {} hosts",
        daily.len(),
        run.streams.len()
    );

    let matrix = pairwise_matrix(&daily, |a, b| Ok(d_between_centroids(a, b, &run.schema)?))
        .expect("matrix");

    // Per-host variance of the daily centroids: low variance means the host
    // behaves the same way every day.
    println!("\nper-host variance of daily activity:");
    let host_names: Vec<String> = corpus.truth.roles.iter().map(|(h, _)| h.clone()).collect();
    for host in &host_names {
        let own: Vec<_> = daily
            .iter()
            .zip(&hosts)
            .filter(|(_, h)| *h == host)
            .map(|(c, _)| c.clone())
            .collect();
        let variance = variance_centroids(&own, &run.schema).expect("string-free");
        println!("  {host}: {variance:.4}");
    }

    let role_of = |host: &str| -> &str {
        corpus
            .truth
            .roles
            .iter()
            .find(|(h, _)| h == host)
            .map(|(_, r)| r.as_str())
            .unwrap()
    };
    let mut role_names: Vec<&str> = corpus.truth.roles.iter().map(|(_, r)| r.as_str()).collect();
    role_names.sort_unstable();
    role_names.dedup();

    // Role classification: hold out every stream of the host under test.
    let role_labels: Vec<usize> = hosts
        .iter()
        .map(|h| role_names.iter().position(|r| *r == role_of(h)).unwrap())
        .collect();
    let host_groups: Vec<usize> = hosts
        .iter()
        .map(|h| host_names.iter().position(|x| x == h).unwrap())
        .collect();
    let report = knn_classify(
        &matrix,
        &role_labels,
        3,
        Holdout::LeaveGroupOut(&host_groups),
    )
    .expect("classifies");
    println!("\nrole classification (K=3, leave-host-out):");
    for (class, f1) in &report.per_class_f1 {
        println!("  {:<12} F1 = {f1:.3}", role_names[*class]);
    }
    println!("  (a role represented by a single host cannot be scored: with that");
    println!("   host held out the candidate pool contains no example of it)");

    // Host classification: plain leave-one-out.
    let report = knn_classify(&matrix, &host_groups, 3, Holdout::LeaveOneOut).expect("classifies");
    println!("\nhost classification (K=3, leave-one-out):");
    for (class, f1) in &report.per_class_f1 {
        println!("  {:<8} F1 = {f1:.3}", host_names[*class]);
    }
    println!("  macro-F1 = {:.3}", report.macro_f1);
}
