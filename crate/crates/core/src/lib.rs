//! Benchmark toolkit for template-matching odorant classification.
//!
//! An electronic-nose signature is a fixed-length vector of quantized integer
//! sensor levels (72 elements by default). This crate implements the pieces
//! needed to compare decision procedures over such signatures end to end:
//!
//! * [`signature`] — signatures, quantization, and the labeled template
//!   library, including its JSON interchange format.
//! * [`similarity`] — exact-match counting, pair-set Jaccard, Manhattan
//!   distance, and normalized Manhattan similarity.
//! * [`classifier`] — the forced-choice exact-match classifier, the
//!   thresholded nearest neighbor with none-of-the-above rejection, and the
//!   Manhattan-retrofitted variant used to demonstrate their equivalence.
//! * [`noise`] — seeded impulse occlusion, additive offsets, random probes,
//!   and the stream-derivation rule that makes every experiment reproducible.
//! * [`experiment`] — the probe panels and the Monte Carlo benchmark
//!   protocol, with deterministic serializable reports.
//! * [`ingest`] — trial-file parsing, feature extraction, and a synthetic
//!   dataset generator so the suite runs without the public dataset.

pub mod classifier;
pub mod error;
pub mod experiment;
pub mod ingest;
pub mod noise;
pub mod report;
pub mod signature;
pub mod similarity;

pub use classifier::{
    classify_forced_choice, classify_modified_dennler, classify_nn_threshold,
    median_similarity_report, ClassificationOutcome, ClassifierConfig, Decision, Metric,
};
pub use error::{Error, Result};
pub use experiment::{
    run_benchmark, run_fig1a, run_fig1b, run_fig2_critique, BenchmarkConfig, ClassifierKind,
    ExperimentReport, REFERENCE_NN_ACCURACY,
};
pub use noise::{
    additive_offset, impulse_occlude, random_signature, NoiseSpec, OcclusionLevel, SeedSpec,
};
pub use signature::{build_library, quantize, QuantizerConfig, Signature, TemplateLibrary};
pub use similarity::{jaccard_pairset, manhattan, manhattan_similarity, match_count, SimilarityScore};
