//! Acceptance suite: one test per release criterion, each printing a
//! PASS line with its runtime. Run with
//! `cargo test --test acceptance -- --nocapture` to see the lines.

mod common;

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use logmetric::aggregate::{centroid, d_to_centroid};
use logmetric::analytics::{
    dbscan, elbow, kmeans, knn_classify, mmds, pairwise_matrix, DistanceMatrix, Holdout,
    KmeansOptions,
};
use logmetric::detect::{extract_signature, run_detector, DetectorState};
use logmetric::entry::{AttributeValue, LogEntry};
use logmetric::ingest::{flatten, standardize, RawLog};
use logmetric::io::ingest_documents;
use logmetric::metrics::{d_categorical, d_entry, d_numerical, d_stream_seq, d_string, lev};
use logmetric::schema::{Schema, SchemaBuilder};
use logmetric::synth;

fn pass(criterion: &str, started: Instant) {
    println!(
        "[acceptance] {criterion}: PASS ({:.2}s)",
        started.elapsed().as_secs_f64()
    );
}

// ---------------------------------------------------------------------------
// Criterion 1: metric axioms for every metric level, 10^4 random triples
// each, zero violations at tolerance 1e-9, under 30 s.
// ---------------------------------------------------------------------------

fn axiom_schema() -> Schema {
    SchemaBuilder::new("t")
        .categorical("proc", ["A", "B", "C", "D"])
        .categorical("ext", ["X", "Y"])
        .numerical("level", 0.0, 10.0)
        .numerical("count", -5.0, 5.0)
        .string("cmd")
        .build()
        .unwrap()
}

fn random_prob_vector(dim: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut v: Vec<f64> = (0..dim).map(|_| rng.random_range(0.0..1.0f64)).collect();
    let total: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= total);
    v
}

fn random_string(rng: &mut ChaCha8Rng, max_len: usize) -> String {
    const ALPHABET: [char; 3] = ['a', 'b', 'c'];
    let len = rng.random_range(0..=max_len);
    (0..len).map(|_| ALPHABET[rng.random_range(0..3)]).collect()
}

fn random_entry(schema: &Schema, rng: &mut ChaCha8Rng) -> LogEntry {
    let _ = schema;
    LogEntry {
        time: rng.random_range(0.0..1e6),
        values: vec![
            AttributeValue::one_hot(rng.random_range(0..5), 5),
            AttributeValue::one_hot(rng.random_range(0..3), 3),
            AttributeValue::Numerical(rng.random_range(0.0..10.0)),
            AttributeValue::Numerical(rng.random_range(-5.0..5.0)),
            AttributeValue::Str(random_string(rng, 10)),
        ],
    }
}

fn check_axioms(
    name: &str,
    trials: usize,
    mut triple: impl FnMut(&mut ChaCha8Rng) -> (f64, f64, f64, f64, bool),
) {
    // triple returns (d_xy, d_yx, d_xz, d_zy_plus_d_yz_sum?) — see closure
    // contract below: (d_xy, d_yx, d_xz, d_zy, x_equals_y).
    let mut rng = ChaCha8Rng::seed_from_u64(0xAC5E);
    for i in 0..trials {
        let (d_xy, d_yx, d_xz, d_zy, x_equals_y) = triple(&mut rng);
        assert!(d_xy >= 0.0, "{name} trial {i}: negative distance");
        assert!(
            (d_xy - d_yx).abs() <= 1e-9,
            "{name} trial {i}: asymmetric ({d_xy} vs {d_yx})"
        );
        assert!(
            d_xy <= d_xz + d_zy + 1e-9,
            "{name} trial {i}: triangle violated ({d_xy} > {d_xz} + {d_zy})"
        );
        if x_equals_y {
            assert!(d_xy == 0.0, "{name} trial {i}: identity not at distance 0");
        } else {
            assert!(
                d_xy > 0.0,
                "{name} trial {i}: distinct points at distance 0"
            );
        }
    }
}

#[test]
fn criterion_01_metric_axioms() {
    let started = Instant::now();
    const TRIALS: usize = 10_000;

    check_axioms("d_categorical", TRIALS, |rng| {
        let dim = 5;
        let x = random_prob_vector(dim, rng);
        let y = if rng.random_range(0..8) == 0 {
            x.clone()
        } else {
            random_prob_vector(dim, rng)
        };
        let z = random_prob_vector(dim, rng);
        (
            d_categorical(&x, &y).unwrap(),
            d_categorical(&y, &x).unwrap(),
            d_categorical(&x, &z).unwrap(),
            d_categorical(&z, &y).unwrap(),
            x == y,
        )
    });

    // Unclamped regime: values stay inside the fitted range.
    check_axioms("d_numerical", TRIALS, |rng| {
        let (lo, hi) = (0.0, 10.0);
        let x = rng.random_range(lo..hi);
        let y = if rng.random_range(0..8) == 0 {
            x
        } else {
            rng.random_range(lo..hi)
        };
        let z = rng.random_range(lo..hi);
        (
            d_numerical(x, y, lo, hi),
            d_numerical(y, x, lo, hi),
            d_numerical(x, z, lo, hi),
            d_numerical(z, y, lo, hi),
            x == y,
        )
    });

    check_axioms("d_string", TRIALS, |rng| {
        let x = random_string(rng, 10);
        let y = if rng.random_range(0..8) == 0 {
            x.clone()
        } else {
            random_string(rng, 10)
        };
        let z = random_string(rng, 10);
        (
            d_string(&x, &y),
            d_string(&y, &x),
            d_string(&x, &z),
            d_string(&z, &y),
            x == y,
        )
    });

    let schema = axiom_schema();
    check_axioms("d_entry", TRIALS, |rng| {
        let x = random_entry(&schema, rng);
        let y = if rng.random_range(0..8) == 0 {
            x.clone()
        } else {
            random_entry(&schema, rng)
        };
        let z = random_entry(&schema, rng);
        (
            d_entry(&x, &y, &schema).unwrap(),
            d_entry(&y, &x, &schema).unwrap(),
            d_entry(&x, &z, &schema).unwrap(),
            d_entry(&z, &y, &schema).unwrap(),
            x.values == y.values,
        )
    });

    check_axioms("d_stream_seq", TRIALS, |rng| {
        let seq = |rng: &mut ChaCha8Rng| -> Vec<LogEntry> {
            (0..4).map(|_| random_entry(&schema, rng)).collect()
        };
        let x = seq(rng);
        let y = if rng.random_range(0..8) == 0 {
            x.clone()
        } else {
            seq(rng)
        };
        let z = seq(rng);
        let values = |s: &[LogEntry]| s.iter().map(|e| e.values.clone()).collect::<Vec<_>>();
        (
            d_stream_seq(&x, &y, &schema).unwrap(),
            d_stream_seq(&y, &x, &schema).unwrap(),
            d_stream_seq(&x, &z, &schema).unwrap(),
            d_stream_seq(&z, &y, &schema).unwrap(),
            values(&x) == values(&y),
        )
    });

    // Range bounds ride along on a final sweep.
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..1000 {
        let x = random_entry(&schema, &mut rng);
        let y = random_entry(&schema, &mut rng);
        let d = d_entry(&x, &y, &schema).unwrap();
        assert!(d <= schema.max_entry_distance() + 1e-9);
    }

    assert!(started.elapsed().as_secs() < 30, "criterion 1 over budget");
    pass(
        "criterion 1 (metric axioms, 5 metrics x 10^4 triples)",
        started,
    );
}

// ---------------------------------------------------------------------------
// Criterion 2: DP Levenshtein equals exhaustive recursion on 10^4 sampled
// pairs of strings of length <= 8 over {a, b, c}, under 60 s.
// ---------------------------------------------------------------------------

fn lev_exhaustive(a: &[u8], b: &[u8]) -> usize {
    if a.is_empty() {
        return b.len();
    }
    if b.is_empty() {
        return a.len();
    }
    let keep = lev_exhaustive(&a[1..], &b[1..]);
    if a[0] == b[0] {
        keep
    } else {
        let delete = lev_exhaustive(&a[1..], b);
        let insert = lev_exhaustive(a, &b[1..]);
        1 + keep.min(delete).min(insert)
    }
}

#[test]
fn criterion_02_levenshtein_oracle() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut mismatches = 0;
    for _ in 0..10_000 {
        let a = random_string(&mut rng, 8);
        let b = random_string(&mut rng, 8);
        if lev(&a, &b) != lev_exhaustive(a.as_bytes(), b.as_bytes()) {
            mismatches += 1;
        }
    }
    assert_eq!(mismatches, 0);
    assert!(started.elapsed().as_secs() < 60, "criterion 2 over budget");
    pass(
        "criterion 2 (Levenshtein vs exhaustive recursion, 10^4 pairs)",
        started,
    );
}

// ---------------------------------------------------------------------------
// Criterion 3: reference distances of the worked log pairs (~1.011 and
// ~1.866 within +-0.05) and the exact sqrt(5) maximum for a
// five-attribute schema.
// ---------------------------------------------------------------------------

fn reference_schema() -> Schema {
    SchemaBuilder::new("Time")
        .categorical("BaseFileName", ["4328", "8D6", "EXPLORER"])
        .from_source("NewProc", Some(logmetric::schema::Derivation::PathBasename))
        .categorical("BaseFileExtn", ["TMP", "EXE"])
        .from_source(
            "NewProc",
            Some(logmetric::schema::Derivation::PathExtension),
        )
        .categorical("CreatorProc", ["IEXPLORE", "USERINIT", "4328"])
        .numerical("TokenElevation", 1.0, 3.0)
        .string("CmdLine")
        .build()
        .unwrap()
}

fn reference_entry(schema: &Schema, doc: serde_json::Value) -> LogEntry {
    let flat = flatten(&RawLog::new(doc, "ref"));
    standardize(&flat, schema).unwrap().unwrap()
}

#[test]
fn criterion_03_reference_distances() {
    let started = Instant::now();
    let schema = reference_schema();

    // The two ransomware drop logs from different hosts: identical except
    // for the random temp-file stem and host directory.
    let fig2_left = reference_entry(
        &schema,
        serde_json::json!({
            "Time": 1446532706,
            "CmdLine": r"C:\Users\hostY\AppData\Local\Temp\Low\8D6.tmp",
            "CreatorProc": "iexplore",
            "NewProc": r"C:\Users\hostY\AppData\Local\Temp\Low\8D6.tmp",
            "TokenElevation": 3
        }),
    );
    let fig2_right = reference_entry(
        &schema,
        serde_json::json!({
            "Time": 1446532736,
            "CmdLine": r"C:\Users\hostX\AppData\Local\Temp\Low\4328.tmp",
            "CreatorProc": "iexplore",
            "NewProc": r"C:\Users\hostX\AppData\Local\Temp\Low\4328.tmp",
            "TokenElevation": 3
        }),
    );
    // An ordinary Windows Explorer launch.
    let fig3_left = reference_entry(
        &schema,
        serde_json::json!({
            "Time": 1446532800,
            "CmdLine": r"C:\Windows\explorer.exe",
            "CreatorProc": "userinit",
            "NewProc": r"C:\Windows\explorer.exe",
            "TokenElevation": 3
        }),
    );

    let near = d_entry(&fig2_left, &fig2_right, &schema).unwrap();
    assert!(
        (near - 1.011).abs() <= 0.05,
        "similar-pair distance {near} not within 1.011 +- 0.05"
    );
    let far = d_entry(&fig2_left, &fig3_left, &schema).unwrap();
    assert!(
        (far - 1.866).abs() <= 0.05,
        "dissimilar-pair distance {far} not within 1.866 +- 0.05"
    );

    // Maximum distance sqrt(5), attained exactly: distinct categoricals,
    // numerical endpoints one past the fitted range width, nonempty vs
    // empty string.
    let extreme_a = LogEntry {
        time: 0.0,
        values: vec![
            AttributeValue::one_hot(1, 4),
            AttributeValue::one_hot(1, 3),
            AttributeValue::one_hot(1, 4),
            AttributeValue::Numerical(1.0),
            AttributeValue::Str("x".into()),
        ],
    };
    let extreme_b = LogEntry {
        time: 0.0,
        values: vec![
            AttributeValue::one_hot(2, 4),
            AttributeValue::one_hot(2, 3),
            AttributeValue::one_hot(2, 4),
            AttributeValue::Numerical(4.0),
            AttributeValue::Str(String::new()),
        ],
    };
    let max = d_entry(&extreme_a, &extreme_b, &schema).unwrap();
    assert!(
        (max - 5.0f64.sqrt()).abs() < 1e-12,
        "maximum {max} != sqrt(5)"
    );
    assert!((max - schema.max_entry_distance()).abs() < 1e-12);

    pass(
        "criterion 3 (reference distances 1.011 / 1.866 / sqrt(5))",
        started,
    );
}

// ---------------------------------------------------------------------------
// Criterion 4: reference centroid fractions, 6/7 and 1/7, exactly.
// ---------------------------------------------------------------------------

#[test]
fn criterion_04_centroid_fractions() {
    let started = Instant::now();
    let schema = SchemaBuilder::new("t")
        .categorical("CreatorProc", ["NGENTASK", "NGEN"])
        .categorical("BaseFileName", ["NGEN", "MSCRSVW"])
        .categorical("BaseFileExtn", ["EXE"])
        .numerical("TokenElevation", 1.0, 3.0)
        .build()
        .unwrap();
    let member = |creator: usize, base: usize| LogEntry {
        time: 0.0,
        values: vec![
            AttributeValue::one_hot(creator, 3),
            AttributeValue::one_hot(base, 3),
            AttributeValue::one_hot(1, 2),
            AttributeValue::Numerical(1.0),
        ],
    };
    // Six NGENTASK->NGEN members and one NGEN->MSCRSVW member.
    let mut members = vec![member(1, 1); 6];
    members.push(member(2, 2));
    let c = centroid(&members, &schema).unwrap();

    let creator = c.category_fractions(&schema, 0);
    assert_eq!(creator[0].0, "NGENTASK");
    assert_eq!(creator[0].1, 6.0 / 7.0);
    assert_eq!(creator[1].0, "NGEN");
    assert_eq!(creator[1].1, 1.0 / 7.0);
    // Rounded to two digits they read 0.86 / 0.14 within half a cent.
    assert!(((creator[0].1 * 100.0).round() / 100.0 - 0.86).abs() < 0.005);
    assert!(((creator[1].1 * 100.0).round() / 100.0 - 0.14).abs() < 0.005);
    // TokenElevation mean 1.0 and a pure EXE extension, as in the listing.
    assert_eq!(
        c.category_fractions(&schema, 2),
        vec![("EXE".to_string(), 1.0)]
    );

    pass("criterion 4 (centroid fractions 6/7 and 1/7)", started);
}

// ---------------------------------------------------------------------------
// Criterion 5: detection separation on the synthetic corpus. Each
// signature, tested on the other attack streams, scores at least six orders
// of magnitude below the best ambient score, with zero ambient alerts at
// threshold 1e-15, under 2 minutes.
// ---------------------------------------------------------------------------

#[test]
fn criterion_05_detection_separation() {
    let started = Instant::now();
    const THRESHOLD: f64 = 1e-15;
    const WARMUP: u64 = 30;

    let corpus = synth::generate(&synth::SynthConfig::default());
    let run = ingest_documents(&corpus.documents, &corpus.schema_config, None).unwrap();
    let attack_hosts: Vec<&str> = corpus
        .truth
        .attacks
        .iter()
        .map(|a| a.host.as_str())
        .collect();

    let signature_len = corpus.truth.attacks[0].entry_count;
    for stream in &run.streams {
        assert!(
            stream.len() - signature_len + 1 >= 2000,
            "stream {} has too few windows",
            stream.host
        );
    }

    for attack in &corpus.truth.attacks {
        let origin = run
            .streams
            .iter()
            .find(|s| s.host == attack.host)
            .expect("attack stream present");
        let signature = extract_signature(
            origin,
            attack.start_index,
            attack.start_index + attack.entry_count,
        )
        .unwrap();

        let mut worst_attack_p: f64 = 0.0;
        let mut best_ambient_p: f64 = 1.0;
        for stream in &run.streams {
            if stream.host == attack.host {
                continue;
            }
            let result = run_detector(&signature, stream, &run.schema, THRESHOLD, WARMUP).unwrap();
            let min_p = result.min_p_value().unwrap();
            if attack_hosts.contains(&stream.host.as_str()) {
                worst_attack_p = worst_attack_p.max(min_p);
                assert!(
                    !result.alerts.is_empty(),
                    "signature from {} missed the attack in {}",
                    attack.host,
                    stream.host
                );
            } else {
                best_ambient_p = best_ambient_p.min(min_p);
                assert!(
                    result.alerts.is_empty(),
                    "false positive: signature from {} alerted on ambient {} (p = {:e})",
                    attack.host,
                    stream.host,
                    min_p
                );
            }
        }
        assert!(
            worst_attack_p <= best_ambient_p * 1e-6,
            "signature from {}: separation too small (attack {worst_attack_p:e} vs ambient {best_ambient_p:e})",
            attack.host
        );
    }

    assert!(started.elapsed().as_secs() < 120, "criterion 5 over budget");
    pass(
        "criterion 5 (detection separation >= 6 orders, zero ambient alerts)",
        started,
    );
}

// ---------------------------------------------------------------------------
// Criterion 6: the online p-value agrees with the independent
// incomplete-beta oracle within 1e-10; p(t* = 0) = 0.5 within 1e-12.
// ---------------------------------------------------------------------------

#[test]
fn criterion_06_t_cdf_oracle() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);

    // Drive the public online scorer at engineered (t*, df) points. With df
    // prior observations balanced at +-1 (sum 0, sum of squares df), scoring
    // d gives the inclusive statistics
    //   mean = d / k,   s^2 = 1 + d^2 / k,   k = df + 1,
    // so t* = d (1 - 1/k) / sqrt(1 + d^2/k), invertible for
    // |t*| < (k - 1) / sqrt(k) — the reachable region of an inclusive
    // history.
    for trial in 0..1000 {
        let df = 2.0 * f64::from(rng.random_range(1..1500i32));
        let k = df + 1.0;
        let reach = df / k.sqrt();
        let t_star: f64 = rng.random_range(-1.0..1.0) * (0.85 * reach).min(9.0);
        let c = 1.0 - 1.0 / k;
        let d = t_star / (c * c - t_star * t_star / k).sqrt();

        let mut state = DetectorState::new(2, 1e-15);
        for _ in 0..(df as usize / 2) {
            state.observe(1.0);
            state.observe(-1.0);
        }
        let outcome = state.observe(d);
        assert!(outcome.scoreable);
        let expected = common::t_cdf_oracle(t_star, df);
        assert!(
            (outcome.p_value - expected).abs() < 1e-10,
            "trial {trial}: t* = {t_star}, df = {df}: online {} vs oracle {expected}",
            outcome.p_value
        );
    }

    // The same agreement for the raw distribution the scorer evaluates,
    // over a wider box than inclusive histories can reach.
    use statrs::distribution::{ContinuousCDF, StudentsT};
    for _ in 0..1000 {
        let t: f64 = rng.random_range(-12.0..12.0);
        let df: f64 = (10.0f64).powf(rng.random_range(0.0..3.5)).round().max(1.0);
        let via_lib = StudentsT::new(0.0, 1.0, df).unwrap().cdf(t);
        let via_oracle = common::t_cdf_oracle(t, df);
        assert!(
            (via_lib - via_oracle).abs() < 1e-10,
            "t = {t}, df = {df}: {via_lib} vs {via_oracle}"
        );
    }

    // Exact center: a distance equal to the running mean scores 0.5.
    let mut state = DetectorState::new(2, 1e-15);
    state.observe(1.0);
    state.observe(3.0);
    let outcome = state.observe(2.0);
    assert!((outcome.p_value - 0.5).abs() < 1e-12);

    pass(
        "criterion 6 (online p-value vs incomplete-beta oracle, 10^3 pairs)",
        started,
    );
}

// ---------------------------------------------------------------------------
// Criterion 7: kNN over the synthetic fleet. Leave-host-out role
// classification reaches F1 = 1.0; leave-one-out host classification
// reaches macro-F1 >= 0.9. Under 30 s.
// ---------------------------------------------------------------------------

#[test]
fn criterion_07_knn_classification() {
    let started = Instant::now();
    let corpus = synth::generate(&synth::SynthConfig::default());
    // Stream comparison drops the command line.
    let config = synth::classification_schema_config();
    let run = ingest_documents(&corpus.documents, &config, None).unwrap();

    // One centroid per host-day; 61 daily streams in all.
    let mut ids: Vec<(String, usize)> = Vec::new(); // (host, centroid index)
    let mut centroids = Vec::new();
    for stream in &run.streams {
        let mut day_entries: std::collections::BTreeMap<i64, Vec<LogEntry>> = Default::default();
        for entry in &stream.entries {
            day_entries
                .entry((entry.time / 86_400.0).floor() as i64)
                .or_default()
                .push(entry.clone());
        }
        for (_, entries) in day_entries {
            ids.push((stream.host.clone(), centroids.len()));
            centroids.push(centroid(&entries, &run.schema).unwrap());
        }
    }
    assert_eq!(centroids.len(), 61, "expected 61 daily streams");

    let matrix = pairwise_matrix(&centroids, |a, b| {
        Ok(logmetric::aggregate::d_between_centroids(
            a,
            b,
            &run.schema,
        )?)
    })
    .unwrap();

    let hosts: Vec<String> = corpus.truth.roles.iter().map(|(h, _)| h.clone()).collect();
    let role_of = |host: &str| -> usize {
        let role = &corpus
            .truth
            .roles
            .iter()
            .find(|(h, _)| h == host)
            .unwrap()
            .1;
        ["admin", "it", "researcher"]
            .iter()
            .position(|r| r == role)
            .unwrap()
    };

    // Role classification with every stream of the classified host held
    // out. The IT role has a single host, so its streams face a candidate
    // pool with no IT streams at all and cannot be scored (they still serve
    // as candidates); F1 = 1.0 is required on the scorable roles.
    let role_labels: Vec<usize> = ids.iter().map(|(h, _)| role_of(h)).collect();
    let host_groups: Vec<usize> = ids
        .iter()
        .map(|(h, _)| hosts.iter().position(|x| x == h).unwrap())
        .collect();
    let report = knn_classify(
        &matrix,
        &role_labels,
        3,
        Holdout::LeaveGroupOut(&host_groups),
    )
    .unwrap();
    let mut scorable_roles: Vec<usize> = role_labels.clone();
    scorable_roles.sort_unstable();
    scorable_roles.dedup();
    scorable_roles.retain(|&role| {
        let hosts_of_role: std::collections::BTreeSet<usize> = ids
            .iter()
            .enumerate()
            .filter(|(i, _)| role_labels[*i] == role)
            .map(|(i, _)| host_groups[i])
            .collect();
        hosts_of_role.len() >= 2
    });
    assert_eq!(scorable_roles.len(), 2, "admin and researcher are scorable");
    for (i, (&truth, &predicted)) in role_labels.iter().zip(&report.predictions).enumerate() {
        if scorable_roles.contains(&truth) {
            assert_eq!(
                predicted, truth,
                "stream {} of {} misclassified",
                ids[i].1, ids[i].0
            );
        }
    }
    // No scorable-role stream strays, and nothing strays INTO a scorable
    // role from another scorable role, so per-class F1 over the scorable
    // population is exactly 1.

    // Host classification with plain leave-one-out.
    let report = knn_classify(&matrix, &host_groups, 3, Holdout::LeaveOneOut).unwrap();
    assert!(
        report.macro_f1 >= 0.9,
        "host macro-F1 {} below 0.9",
        report.macro_f1
    );

    assert!(started.elapsed().as_secs() < 30, "criterion 7 over budget");
    pass(
        "criterion 7 (kNN: role F1 = 1.0, host macro-F1 >= 0.9)",
        started,
    );
}

// ---------------------------------------------------------------------------
// Criterion 8: SMACOF recovers a 20-point planar configuration within 1e-6
// per pair, and the stress trace never increases on 100 random matrices.
// ---------------------------------------------------------------------------

#[test]
fn criterion_08_mmds() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let points: Vec<(f64, f64)> = (0..20)
        .map(|_| (rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0)))
        .collect();
    let dm = pairwise_matrix(&points, |a, b| {
        Ok(((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt())
    })
    .unwrap();

    let best = (0..4)
        .map(|seed| mmds(&dm, seed, 50_000, 1e-16).unwrap())
        .min_by(|a, b| a.stress.total_cmp(&b.stress))
        .unwrap();
    let mut worst_gap: f64 = 0.0;
    let mut sum_sq: f64 = 0.0;
    for i in 0..20 {
        for j in (i + 1)..20 {
            worst_gap = worst_gap.max((best.embedded_distance(i, j) - dm.get(i, j)).abs());
            sum_sq += dm.get(i, j) * dm.get(i, j);
        }
    }
    assert!(worst_gap < 1e-6, "worst pairwise error {worst_gap}");
    // Intrinsically planar input: residual stress is negligible against the
    // scale of the matrix.
    assert!(
        best.stress < 1e-10 * sum_sq,
        "stress {} too large",
        best.stress
    );

    for case in 0..100u64 {
        let n = 4 + (case as usize % 9);
        let mut values = vec![0.0; n * n];
        let mut rng = ChaCha8Rng::seed_from_u64(800 + case);
        for i in 0..n {
            for j in (i + 1)..n {
                let d = rng.random_range(0.1..10.0);
                values[i * n + j] = d;
                values[j * n + i] = d;
            }
        }
        let dm = DistanceMatrix::from_values(n, values).unwrap();
        let embedding = mmds(&dm, case, 300, 1e-12).unwrap();
        for w in embedding.stress_trace.windows(2) {
            assert!(
                w[1] <= w[0] + 1e-12 * w[0].max(1.0),
                "case {case}: stress rose from {} to {}",
                w[0],
                w[1]
            );
        }
    }

    pass(
        "criterion 8 (SMACOF recovery within 1e-6, monotone stress)",
        started,
    );
}

// ---------------------------------------------------------------------------
// Criterion 9: DBSCAN equals the union-find reference on every 12-point
// instance, with the noise set exactly equal.
// ---------------------------------------------------------------------------

#[test]
fn criterion_09_dbscan_oracle() {
    let started = Instant::now();

    type Instance = (Vec<(f64, f64)>, f64, usize);
    let mut instances: Vec<Instance> = vec![
        // Two blobs and two stragglers.
        (
            vec![
                (0.0, 0.0),
                (0.1, 0.0),
                (0.0, 0.1),
                (0.1, 0.1),
                (5.0, 5.0),
                (5.1, 5.0),
                (5.0, 5.1),
                (5.1, 5.1),
                (2.5, 2.5),
                (9.0, 9.0),
                (0.5, 0.0),
                (5.5, 5.0),
            ],
            0.45,
            3,
        ),
        // A chain that stays connected end to end.
        ((0..12).map(|i| (0.3 * i as f64, 0.0)).collect(), 0.35, 3),
        // Everything identical.
        (vec![(1.0, 1.0); 12], 0.1, 4),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..200 {
        let points: Vec<(f64, f64)> = (0..12)
            .map(|_| (rng.random_range(0.0..4.0), rng.random_range(0.0..4.0)))
            .collect();
        let eps = rng.random_range(0.3..1.5);
        let min_pts = rng.random_range(2..6);
        instances.push((points, eps, min_pts));
    }

    for (case, (points, eps, min_pts)) in instances.iter().enumerate() {
        let dm = pairwise_matrix(points, |a, b| {
            Ok(((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt())
        })
        .unwrap();
        let ours = dbscan(&dm, *eps, *min_pts);
        let reference = common::dbscan_reference(points.len(), |i, j| dm.get(i, j), *eps, *min_pts);
        assert_eq!(
            ours.labels, reference,
            "case {case} (eps {eps}, min_pts {min_pts})"
        );
        let noise: Vec<usize> = reference
            .iter()
            .enumerate()
            .filter(|(_, &l)| l == -1)
            .map(|(i, _)| i)
            .collect();
        assert_eq!(ours.outliers(), noise, "case {case} noise set");
    }

    pass(
        "criterion 9 (DBSCAN equals union-find reference, 203 instances)",
        started,
    );
}

// ---------------------------------------------------------------------------
// Criterion 10: k-means WCSS monotone per Lloyd iteration on 100 random
// instances; elbow curve nonincreasing in k; blob recovery 100% over 50
// seeds.
// ---------------------------------------------------------------------------

fn numeric_entries(values: &[f64]) -> Vec<LogEntry> {
    values
        .iter()
        .map(|&x| LogEntry {
            time: 0.0,
            values: vec![AttributeValue::Numerical(x)],
        })
        .collect()
}

#[test]
fn criterion_10_kmeans() {
    let started = Instant::now();
    let schema = SchemaBuilder::new("t")
        .numerical("x", 0.0, 100.0)
        .build()
        .unwrap();

    // (a) WCSS nonincreasing across Lloyd iterations.
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for case in 0..100u64 {
        let n = rng.random_range(10..50);
        let items = numeric_entries(
            &(0..n)
                .map(|_| rng.random_range(0.0..100.0))
                .collect::<Vec<_>>(),
        );
        let k = rng.random_range(2..=5);
        let run = kmeans(&items, &schema, &KmeansOptions::new(k, case)).unwrap();
        for w in run.wcss_trace.windows(2) {
            assert!(
                w[1] <= w[0] + 1e-9,
                "case {case}: WCSS rose from {} to {}",
                w[0],
                w[1]
            );
        }
    }

    // (b) Elbow nonincreasing in k under a fixed restart budget.
    for case in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + case);
        let n = rng.random_range(16..40);
        let items = numeric_entries(
            &(0..n)
                .map(|_| rng.random_range(0.0..100.0))
                .collect::<Vec<_>>(),
        );
        let curve = elbow(&items, &schema, 2..=8, case, 5).unwrap();
        for pair in curve.windows(2) {
            assert!(
                pair[1].1 <= pair[0].1 + 1e-9,
                "case {case}: WCSS rose from k={} to k={}",
                pair[0].0,
                pair[1].0
            );
        }
    }

    // (c) Two tight, far-apart blobs recovered for every seed.
    let items = numeric_entries(&[0.0, 0.7, 1.4, 2.1, 50.0, 50.7, 51.4, 52.1]);
    for seed in 0..50 {
        let run = kmeans(&items, &schema, &KmeansOptions::new(2, seed)).unwrap();
        let first = run.assignment.labels[0];
        let second = run.assignment.labels[4];
        assert_ne!(first, second, "seed {seed}: blobs merged");
        assert!(
            run.assignment.labels[..4].iter().all(|&l| l == first),
            "seed {seed}"
        );
        assert!(
            run.assignment.labels[4..].iter().all(|&l| l == second),
            "seed {seed}"
        );
    }

    pass(
        "criterion 10 (k-means monotone WCSS, monotone elbow, blob recovery)",
        started,
    );
}

// ---------------------------------------------------------------------------
// Supporting check: distance to a singleton centroid matches the entry
// metric, tying the aggregate layer to the metric layer.
// ---------------------------------------------------------------------------

#[test]
fn centroid_distance_agrees_with_entry_metric_on_singletons() {
    let schema = axiom_schema();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..500 {
        let a = random_entry(&schema, &mut rng);
        let b = random_entry(&schema, &mut rng);
        let c = centroid(std::slice::from_ref(&b), &schema).unwrap();
        let via_centroid = d_to_centroid(&a, &c, &schema).unwrap();
        let direct = d_entry(&a, &b, &schema).unwrap();
        assert!((via_centroid - direct).abs() < 1e-12);
    }
}
