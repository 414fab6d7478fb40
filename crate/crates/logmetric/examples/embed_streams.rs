//! Metric MDS: embed the 61 daily streams into the plane with SMACOF and
//! sketch the result, role by role, as an ASCII scatter.
//!
//! ```bash
//! cargo run --release --example embed_streams
//! ```

use logmetric::aggregate::{centroid, d_between_centroids};
use logmetric::analytics::{mmds, pairwise_matrix};
use logmetric::entry::LogEntry;
use logmetric::io::ingest_documents;
use logmetric::synth;
use std::collections::BTreeMap;

fn main() {
    let corpus = synth::generate(&synth::SynthConfig::default());
    let run = ingest_documents(
        &corpus.documents,
        &synth::classification_schema_config(),
        None,
    )
    .expect("corpus ingests");

    let mut hosts = Vec::new();
    let mut daily = Vec::new();
    for stream in &run.streams {
        let mut by_day: BTreeMap<i64, Vec<LogEntry>> = BTreeMap::new();
        for entry in &stream.entries {
            by_day
                .entry((entry.time / 86_400.0).floor() as i64)
                .or_default()
                .push(entry.clone());
        }
        for (_, entries) in by_day {
            hosts.push(stream.host.clone());
            daily.push(centroid(&entries, &run.schema).expect("nonempty day"));
        }
    }

    let matrix = pairwise_matrix(&daily, |a, b| Ok(d_between_centroids(a, b, &run.schema)?))
        .expect("matrix");
    let embedding = mmds(&matrix, 0, 2000, 1e-10).expect("embeds");
    println!(
        "embedded {} daily streams; raw stress {:.4e} after {} iterations\n",
        daily.len(),
        embedding.stress,
        embedding.iterations
    );

    // ASCII scatter: streams from the same role should pool together.
    let glyph_of = |host: &str| -> char {
        match corpus
            .truth
            .roles
            .iter()
            .find(|(h, _)| h == host)
            .map(|(_, r)| r.as_str())
        {
            Some("admin") => 'a',
            Some("it") => 'i',
            Some("researcher") => 'r',
            _ => '?',
        }
    };
    const W: usize = 72;
    const H: usize = 24;
    let (mut min_x, mut max_x) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut min_y, mut max_y) = (f64::INFINITY, f64::NEG_INFINITY);
    for c in &embedding.coordinates {
        min_x = min_x.min(c[0]);
        max_x = max_x.max(c[0]);
        min_y = min_y.min(c[1]);
        max_y = max_y.max(c[1]);
    }
    let mut grid = vec![vec![' '; W]; H];
    for (c, host) in embedding.coordinates.iter().zip(&hosts) {
        let col = ((c[0] - min_x) / (max_x - min_x) * (W - 1) as f64).round() as usize;
        let row = ((c[1] - min_y) / (max_y - min_y) * (H - 1) as f64).round() as usize;
        grid[H - 1 - row][col] = glyph_of(host);
    }
    for row in grid {
        println!("{}", row.into_iter().collect::<String>());
    }
    println!("\na = admin day, i = IT day, r = researcher day");
}
