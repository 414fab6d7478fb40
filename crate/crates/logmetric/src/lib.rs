//! A metric space on semi-structured host logs.
//!
//! Host logs (Windows Event Logs and their kin) are nested, non-uniform
//! key/value records; the only comparison they support out of the box is
//! "identical or not". This crate embeds them into a rigorously defined
//! metric space — per-attribute metrics, an l2 entry metric, and stream
//! metrics over entry sequences — and builds the analytics that the
//! embedding unlocks:
//!
//! * **soft-signature detection** ([`detect`]) — slide an observed attack
//!   sequence across a stream and score each window with an online
//!   Student-t p-value; polymorphic variants stay close in the metric;
//! * **stream classification** ([`analytics::knn_classify`]) — represent
//!   streams by centroids, compare them pairwise, and classify hosts or user
//!   roles by k-nearest-neighbors with grouped leave-one-out validation;
//! * **clustering and embedding** ([`analytics`]) — k-means with
//!   inverse-distance seeding and elbow selection, DBSCAN over short
//!   subsequences with outlier labeling, and SMACOF metric MDS down to 2-D
//!   for visualization.
//!
//! # Pipeline
//!
//! ```text
//! raw JSON logs -> flatten -> fit_schema_stats -> standardize -> build_streams
//!                    (ingest)                                      (LogStream)
//!        -> metrics / aggregate / detect / analytics
//! ```
//!
//! # Examples
//!
//! Each major capability has a runnable example:
//!
//! ```bash
//! cargo run --release --example entry_distance        # attribute + entry metrics
//! cargo run --release --example stream_distance       # sequence + interpolated stream metrics
//! cargo run --release --example centroid_summary      # centroids, distance-to-centroid, variance
//! cargo run --release --example soft_signature        # end-to-end ransomware detection
//! cargo run --release --example classify_roles        # kNN role/host classification
//! cargo run --release --example embed_streams         # SMACOF mMDS to 2-D
//! cargo run --release --example cluster_hours         # k-means + elbow over hourly centroids
//! cargo run --release --example cluster_subsequences  # DBSCAN over 7-entry windows
//! ```
//!
//! A thin `logmetric` binary wires the same pipeline into file-in/file-out
//! subcommands (`ingest`, `dist`, `detect`, `cluster-kmeans`,
//! `cluster-dbscan`, `classify`, `embed`, `hist`, `synth`); see the README.

pub mod aggregate;
pub mod analytics;
pub mod cli;
pub mod detect;
pub mod entry;
pub mod ingest;
pub mod io;
pub mod metrics;
pub mod schema;
pub mod synth;

pub use aggregate::{centroid, d_to_centroid, Centroid};
pub use entry::{AttributeValue, LogEntry, LogStream};
pub use ingest::{build_streams, derive_path_fields, fit_schema_stats, flatten, standardize};
pub use metrics::{
    d_categorical, d_entry, d_numerical, d_stream_seq, d_stream_time, d_string, lev,
};
pub use schema::{Schema, SchemaBuilder, SchemaConfig};
