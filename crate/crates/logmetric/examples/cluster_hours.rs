//! Hourly activity clustering: centroid per host-hour, elbow sweep for k,
//! k-means with inverse-distance seeding, and interpretable cluster
//! listings.
//!
//! ```bash
//! cargo run --release --example cluster_hours
//! ```

use logmetric::aggregate::centroid;
use logmetric::analytics::{elbow, kmeans, KmeansOptions};
use logmetric::entry::LogEntry;
use logmetric::io::ingest_documents;
use logmetric::synth;
use std::collections::BTreeMap;

fn main() {
    // A lighter fleet keeps the hour count readable.
    let corpus = synth::generate(&synth::SynthConfig {
        total_days: 21,
        entries_per_day: 160,
        attacks: 0,
        ..Default::default()
    });
    let run = ingest_documents(
        &corpus.documents,
        &synth::classification_schema_config(),
        None,
    )
    .expect("corpus ingests");

    // One aggregate log per host-hour.
    let mut items: Vec<LogEntry> = Vec::new();
    let mut slots: Vec<(String, i64)> = Vec::new();
    for stream in &run.streams {
        let mut by_hour: BTreeMap<i64, Vec<LogEntry>> = BTreeMap::new();
        for entry in &stream.entries {
            by_hour
                .entry((entry.time / 3600.0).floor() as i64)
                .or_default()
                .push(entry.clone());
        }
        for (hour, entries) in by_hour {
            let c = centroid(&entries, &run.schema).expect("nonempty hour");
            items.push(c.to_entry(0.0).expect("string-free schema"));
            slots.push((stream.host.clone(), hour.rem_euclid(24)));
        }
    }
    println!("{} host-hours to cluster", items.len());

    // Elbow: within-cluster sum of squares as k grows.
    println!("\nk    WCSS");
    let curve = elbow(&items, &run.schema, 2..=10, 0, 5).expect("elbow");
    for (k, wcss) in &curve {
        let bar = "#".repeat((wcss / curve[0].1 * 40.0).round() as usize);
        println!("{k:<4} {wcss:>9.3} {bar}");
    }

    let k = 5;
    let run_k = kmeans(&items, &run.schema, &KmeansOptions::new(k, 0)).expect("clusters");
    println!(
        "\nk = {k}: WCSS {:.3} after {} iterations",
        run_k.wcss, run_k.iterations
    );

    let centroids = run_k.assignment.centroids.as_ref().expect("centroids");
    for (label, c) in centroids.iter().enumerate() {
        let members = run_k
            .assignment
            .labels
            .iter()
            .filter(|&&l| l == label as i64)
            .count();
        println!("\ncluster {label} ({members} host-hours) dominant creators:");
        for (name, fraction) in c.category_fractions(&run.schema, 2).into_iter().take(3) {
            println!("  {name:<12} {fraction:.2}");
        }
        // Which wall-clock hours does this cluster own?
        let mut hours: Vec<i64> = slots
            .iter()
            .zip(&run_k.assignment.labels)
            .filter(|(_, &l)| l == label as i64)
            .map(|((_, hour), _)| *hour)
            .collect();
        hours.sort_unstable();
        hours.dedup();
        println!("  seen at hours {hours:?}");
    }
}
