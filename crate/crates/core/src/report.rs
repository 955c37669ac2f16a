//! Serialization of reports: full JSON documents plus bar-chart-ready CSV.
//!
//! Every emitter is deterministic: identical reports produce byte-identical
//! text. CSV files start with a `# config:` comment line embedding the
//! resolved configuration and seed, so any output file can be traced back to
//! the invocation that produced it.

use serde::Serialize;

use crate::error::Result;
use crate::experiment::{
    ExperimentReport, MedianCritiqueReport, OffsetProbeReport, RandomProbeReport,
};

/// Pretty JSON with a trailing newline.
pub fn to_json_pretty<T: Serialize>(value: &T) -> Result<String> {
    let mut out = serde_json::to_string_pretty(value)?;
    out.push('\n');
    Ok(out)
}

fn config_comment<T: Serialize>(config: &T) -> String {
    let json = serde_json::to_string(config).expect("config serializes");
    format!("# config: {json}\n")
}

/// Per-simulation accuracy table.
pub fn accuracy_csv(report: &ExperimentReport) -> String {
    let mut out = config_comment(&report.config);
    out.push_str("simulation,accuracy\n");
    for (i, acc) in report.per_simulation_accuracy.iter().enumerate() {
        out.push_str(&format!("{i},{acc}\n"));
    }
    out
}

/// Per-class outcome counts.
pub fn class_counts_csv(report: &ExperimentReport) -> String {
    let mut out = config_comment(&report.config);
    out.push_str("label,correct,misclassified_as_known,rejected\n");
    for class in &report.per_class {
        out.push_str(&format!(
            "{},{},{},{}\n",
            class.label, class.correct, class.misclassified_as_known, class.rejected
        ));
    }
    out
}

/// Bar-chart data: one row per classifier plus the reference value.
pub fn benchmark_plot_csv(reports: &[(&str, &ExperimentReport)]) -> String {
    let mut out = String::new();
    if let Some((_, first)) = reports.first() {
        out.push_str(&config_comment(&first.config));
    }
    out.push_str("classifier,mean_accuracy,std_accuracy\n");
    for (name, report) in reports {
        out.push_str(&format!(
            "{name},{},{}\n",
            report.mean_accuracy, report.std_accuracy
        ));
    }
    if let Some((_, first)) = reports.first() {
        out.push_str(&format!(
            "reference_nn,{},\n",
            first.reference_nn_accuracy
        ));
    }
    out
}

#[derive(Serialize)]
struct RandomProbeConfigEcho<'a> {
    panel: &'a str,
    vector_count: usize,
    base_seed: u64,
    theta: f64,
}

/// Classifier x outcome counts for the random-vector probe.
pub fn random_probe_plot_csv(report: &RandomProbeReport) -> String {
    let mut out = config_comment(&RandomProbeConfigEcho {
        panel: "fig1a",
        vector_count: report.vector_count,
        base_seed: report.base_seed,
        theta: report.theta,
    });
    out.push_str("classifier,outcome,count\n");
    out.push_str(&format!(
        "forced_choice,known,{}\n",
        report.forced_choice.known
    ));
    out.push_str(&format!(
        "forced_choice,none_of_the_above,{}\n",
        report.forced_choice.none_of_the_above
    ));
    out.push_str(&format!("nn_threshold,known,{}\n", report.nn_threshold.known));
    out.push_str(&format!(
        "nn_threshold,none_of_the_above,{}\n",
        report.nn_threshold.none_of_the_above
    ));
    out
}

#[derive(Serialize)]
struct OffsetProbeConfigEcho<'a> {
    panel: &'a str,
    total: usize,
    theta: f64,
}

/// Correct-count table for the +1-offset probe.
pub fn offset_probe_plot_csv(report: &OffsetProbeReport) -> String {
    let mut out = config_comment(&OffsetProbeConfigEcho {
        panel: "fig1b",
        total: report.total,
        theta: report.theta,
    });
    out.push_str("classifier,correct,total\n");
    out.push_str(&format!(
        "forced_choice,{},{}\n",
        report.forced_choice_correct, report.total
    ));
    out.push_str(&format!(
        "nn_threshold,{},{}\n",
        report.nn_threshold_correct, report.total
    ));
    out
}

#[derive(Serialize)]
struct MedianCritiqueConfigEcho<'a> {
    panel: &'a str,
    classes: usize,
}

/// Median-vs-accuracy table for the aggregation critique.
pub fn median_critique_plot_csv(report: &MedianCritiqueReport) -> String {
    let mut out = config_comment(&MedianCritiqueConfigEcho {
        panel: "fig2_critique",
        classes: report.per_class.len(),
    });
    out.push_str("label,median_self_similarity,accuracy\n");
    for class in &report.per_class {
        out.push_str(&format!(
            "{},{},{}\n",
            class.label, class.median_self_similarity, class.accuracy
        ));
    }
    out
}
