//! End-to-end soft-signature detection on the synthetic corpus.
//!
//! One host's observed attack sequence becomes the signature; sliding it
//! across every other stream and scoring each window with the online
//! Student-t p-value separates the polymorphic attack instances from
//! ambient traffic by many orders of magnitude, with no ambient alerts at
//! the 1e-15 threshold.
//!
//! ```bash
//! cargo run --release --example soft_signature
//! ```

use logmetric::detect::{extract_signature, run_detector};
use logmetric::io::ingest_documents;
use logmetric::synth;

fn main() {
    // Seven hosts, four of them hit by a polymorphic ransomware run.
    let corpus = synth::generate(&synth::SynthConfig::default());
    let run =
        ingest_documents(&corpus.documents, &corpus.schema_config, None).expect("corpus ingests");
    println!(
        "ingested {} entries into {} streams ({} discarded, {} rejected)",
        run.stats.standardized,
        run.streams.len(),
        run.stats.discarded,
        run.stats.rejected()
    );

    // The analyst saw the first attack and cut its sequence out by hand;
    // the ground truth stands in for that manual step here.
    let observed = &corpus.truth.attacks[0];
    let origin = run
        .streams
        .iter()
        .find(|s| s.host == observed.host)
        .expect("attack stream");
    let signature = extract_signature(
        origin,
        observed.start_index,
        observed.start_index + observed.entry_count,
    )
    .expect("valid cut");
    println!(
        "\nsignature: {} entries over {:.1}s from {} (dropped file stem {:?})\n",
        signature.len(),
        signature.span_seconds(),
        observed.host,
        observed.marker
    );

    let attack_hosts: Vec<&str> = corpus
        .truth
        .attacks
        .iter()
        .map(|a| a.host.as_str())
        .collect();
    println!(
        "{:<8} {:>8} {:>12} {:>7}  note",
        "host", "windows", "min p", "alerts"
    );
    for stream in &run.streams {
        let result = run_detector(&signature, stream, &run.schema, 1e-15, 30).expect("detects");
        let note = if stream.host == observed.host {
            "signature origin"
        } else if attack_hosts.contains(&stream.host.as_str()) {
            "polymorphic instance of the same attack"
        } else {
            "ambient"
        };
        println!(
            "{:<8} {:>8} {:>12.3e} {:>7}  {}",
            stream.host,
            result.distances.len(),
            result.min_p_value().unwrap_or(1.0),
            result.alerts.len(),
            note
        );
    }
    println!("\nattack streams bottom out tens of orders of magnitude below ambient");
    println!("streams even though every instance dropped differently named files.");
}
