//! Soft-signature attack detection: slide an observed attack sequence across
//! a test stream, score each displacement with an online Student-t p-value,
//! and alert when the score drops under a threshold.
//!
//! The cross-correlation here is the displaced stream distance: at each
//! displacement k the sum of the positional entry distances between the
//! signature and the k-shifted window of the test stream. Low sums mean the
//! recent window looks like the attack. Because the signature is a distance
//! template rather than an exact pattern, polymorphic variants (randomized
//! file names and the like) still land close.
//!
//! Scoring is online: each distance is appended to the history and judged
//! against the running sample mean and standard deviation through the CDF of
//! a Student-t distribution with k-1 degrees of freedom. Runs over many
//! (signature, stream) pairs parallelize freely; within one stream the scan
//! is inherently sequential.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};
use thiserror::Error;

use crate::entry::{LogEntry, LogStream};
use crate::metrics::{d_entry, MetricError};
use crate::schema::Schema;

#[derive(Debug, Error)]
pub enum DetectError {
    #[error("signature slice [{start}, {end}) is invalid for a stream of {len} entries")]
    BadSlice {
        start: usize,
        end: usize,
        len: usize,
    },
    #[error("a signature needs at least 2 entries, got {0}")]
    SignatureTooShort(usize),
    #[error("test stream ({test} entries) is shorter than the signature ({sig})")]
    StreamShorterThanSignature { test: usize, sig: usize },
    #[error(transparent)]
    Metric(#[from] MetricError),
}

/// Where a signature was cut from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignatureOrigin {
    pub host: String,
    pub start_index: usize,
    pub end_index: usize,
    pub start_time: f64,
    pub end_time: f64,
}

/// An observed attack sequence: the slice of a log stream from the initial
/// attack vector up to the cut point, used as a behavioral template.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Signature {
    pub entries: Vec<LogEntry>,
    pub origin: SignatureOrigin,
}

impl Signature {
    /// Signature length `n_sig`.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn span_seconds(&self) -> f64 {
        self.origin.end_time - self.origin.start_time
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("signature serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// Cut the entry slice `[start, end)` of a stream into a signature.
///
/// Picking the slice requires manual analysis of the stream; this only does
/// the cutting.
pub fn extract_signature(
    stream: &LogStream,
    start: usize,
    end: usize,
) -> Result<Signature, DetectError> {
    if start >= end || end > stream.entries.len() {
        return Err(DetectError::BadSlice {
            start,
            end,
            len: stream.entries.len(),
        });
    }
    if end - start < 2 {
        return Err(DetectError::SignatureTooShort(end - start));
    }
    let entries = stream.entries[start..end].to_vec();
    let origin = SignatureOrigin {
        host: stream.host.clone(),
        start_index: start,
        end_index: end,
        start_time: entries.first().unwrap().time,
        end_time: entries.last().unwrap().time,
    };
    Ok(Signature { entries, origin })
}

/// Displaced stream distance between a signature and every signature-length
/// window of the test stream.
///
/// Output k ranges over `0 ..= n_test - n_sig`, one sum of positional entry
/// distances per displacement, so the result has `n_test - n_sig + 1`
/// elements, each in `[0, n_sig * sqrt(N)]`.
pub fn cross_correlate(
    sig: &Signature,
    test: &LogStream,
    schema: &Schema,
) -> Result<Vec<f64>, DetectError> {
    let n_sig = sig.len();
    let n_test = test.entries.len();
    if n_test < n_sig {
        return Err(DetectError::StreamShorterThanSignature {
            test: n_test,
            sig: n_sig,
        });
    }
    let mut distances = Vec::with_capacity(n_test - n_sig + 1);
    for k in 0..=(n_test - n_sig) {
        let mut sum = 0.0;
        for (i, sig_entry) in sig.entries.iter().enumerate() {
            sum += d_entry(sig_entry, &test.entries[i + k], schema)?;
        }
        distances.push(sum);
    }
    Ok(distances)
}

/// Online extreme-value scorer over a growing distance history.
///
/// The running mean and sum of squared deviations use the numerically stable
/// single-pass update. The scored distance is part of its own baseline: the
/// history D_k = {d_1, ..., d_k} includes d_k.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectorState {
    count: u64,
    mean: f64,
    /// Running sum of squared deviations from the mean.
    m2: f64,
    warmup_min: u64,
    threshold: f64,
}

/// Outcome of scoring one distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PValueOutcome {
    /// One-sided p-value P(T < t*); 1.0 while the detector cannot score.
    pub p_value: f64,
    /// False during warm-up and while the history has zero variance; no
    /// alert is possible from an unscoreable position.
    pub scoreable: bool,
}

impl DetectorState {
    pub fn new(warmup_min: u64, threshold: f64) -> Self {
        debug_assert!(threshold > 0.0 && threshold <= 1.0);
        DetectorState {
            count: 0,
            mean: 0.0,
            m2: 0.0,
            warmup_min,
            threshold,
        }
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Sample standard deviation of the history; 0 until two points exist.
    pub fn sample_std(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            (self.m2 / (self.count - 1) as f64).sqrt()
        }
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    /// Append a distance to the history, then score it against the updated
    /// running statistics.
    pub fn observe(&mut self, d: f64) -> PValueOutcome {
        self.count += 1;
        let delta = d - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (d - self.mean);

        if self.count < self.warmup_min.max(2) {
            return PValueOutcome {
                p_value: 1.0,
                scoreable: false,
            };
        }
        let s = self.sample_std();
        if s == 0.0 {
            return PValueOutcome {
                p_value: 1.0,
                scoreable: false,
            };
        }
        let t_star = (d - self.mean) / s;
        let df = (self.count - 1) as f64;
        let p = StudentsT::new(0.0, 1.0, df)
            .expect("valid t-distribution parameters")
            .cdf(t_star);
        PValueOutcome {
            p_value: p,
            scoreable: true,
        }
    }
}

/// One detector hit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Alert {
    pub host: String,
    /// Displacement of the matching window in the test stream.
    pub window_start_index: usize,
    /// Timestamp of the first entry of the matching window.
    pub window_time: f64,
    pub distance: f64,
    pub p_value: f64,
}

/// Full per-stream detector output: the distance and p-value traces plus the
/// alerts.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionRun {
    pub host: String,
    pub distances: Vec<f64>,
    pub p_values: Vec<f64>,
    pub alerts: Vec<Alert>,
}

impl DetectionRun {
    pub fn min_p_value(&self) -> Option<f64> {
        self.p_values.iter().copied().min_by(f64::total_cmp)
    }
}

/// Run the online detector: slide the signature across the stream in
/// displacement order, scoring each position only against the history of
/// prior positions, and alert wherever the p-value drops to the threshold or
/// below.
pub fn run_detector(
    sig: &Signature,
    stream: &LogStream,
    schema: &Schema,
    threshold: f64,
    warmup_min: u64,
) -> Result<DetectionRun, DetectError> {
    let distances = cross_correlate(sig, stream, schema)?;
    let mut state = DetectorState::new(warmup_min, threshold);
    let mut p_values = Vec::with_capacity(distances.len());
    let mut alerts = Vec::new();
    for (k, &d) in distances.iter().enumerate() {
        let outcome = state.observe(d);
        p_values.push(outcome.p_value);
        if outcome.scoreable && outcome.p_value <= threshold {
            alerts.push(Alert {
                host: stream.host.clone(),
                window_start_index: k,
                window_time: stream.entries[k].time,
                distance: d,
                p_value: outcome.p_value,
            });
        }
    }
    Ok(DetectionRun {
        host: stream.host.clone(),
        distances,
        p_values,
        alerts,
    })
}

/// Alerts only; see [`run_detector`] for the full traces.
pub fn detect(
    sig: &Signature,
    stream: &LogStream,
    schema: &Schema,
    threshold: f64,
    warmup_min: u64,
) -> Result<Vec<Alert>, DetectError> {
    Ok(run_detector(sig, stream, schema, threshold, warmup_min)?.alerts)
}
