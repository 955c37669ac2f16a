//! Probe panels and the Monte Carlo benchmark protocol.
//!
//! Three probes recreate the headline comparisons: random-vector false
//! positives, the +1-offset fragility of exact matching, and the
//! median-aggregation artifact. [`run_benchmark`] runs the full seeded
//! protocol (by default 100 test samples per odorant, 1000 samples per
//! simulation, impulse occlusion drawn per sample from [0.2, 0.8], mean and
//! standard deviation over 100 simulations).

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::classifier::{
    classify_forced_choice, classify_modified_dennler, classify_nn_threshold, ClassifierConfig,
    Decision,
};
use crate::error::{Error, Result};
use crate::noise::{random_signature, stream_domain, NoiseSpec, OcclusionLevel, SeedSpec};
use crate::signature::{Signature, TemplateLibrary};

/// Accuracy reported for the original thresholded nearest-neighbor benchmark
/// on the wind-tunnel templates (8.2%). Shown in reports as a reference value
/// only: it depends on unpublished templates and noise code, so local runs
/// print their own mean next to it.
pub const REFERENCE_NN_ACCURACY: f64 = 0.082;

/// Identifier of the stream-derivation rule embedded in reports.
pub const SEED_SCHEME: &str = "chacha8(mix64-chain: base, domain, simulation, sample) v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassifierKind {
    ForcedChoice,
    NnThreshold,
    ModifiedDennler,
}

impl fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassifierKind::ForcedChoice => write!(f, "forced_choice"),
            ClassifierKind::NnThreshold => write!(f, "nn_threshold"),
            ClassifierKind::ModifiedDennler => write!(f, "modified_dennler"),
        }
    }
}

impl FromStr for ClassifierKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "forced_choice" | "forced-choice" => Ok(ClassifierKind::ForcedChoice),
            "nn" | "nn_threshold" => Ok(ClassifierKind::NnThreshold),
            "modified_dennler" | "modified-dennler" => Ok(ClassifierKind::ModifiedDennler),
            other => Err(Error::Config(format!(
                "unknown classifier `{other}`: expected `forced_choice`, `nn`, or `modified_dennler`"
            ))),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchmarkConfig {
    pub samples_per_odorant: usize,
    pub num_simulations: usize,
    pub noise: NoiseSpec,
    pub classifier: ClassifierKind,
    pub classifier_cfg: ClassifierConfig,
    pub base_seed: u64,
}

impl BenchmarkConfig {
    /// The full protocol: 100 samples per odorant, 100 simulations, impulse
    /// occlusion drawn per sample from [0.2, 0.8].
    pub fn protocol_default(classifier: ClassifierKind, base_seed: u64) -> Self {
        BenchmarkConfig {
            samples_per_odorant: 100,
            num_simulations: 100,
            noise: NoiseSpec::Impulse {
                level: OcclusionLevel::Uniform { lo: 0.2, hi: 0.8 },
            },
            classifier,
            classifier_cfg: ClassifierConfig::default(),
            base_seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples_per_odorant == 0 {
            return Err(Error::Config("samples_per_odorant must be >= 1".into()));
        }
        if self.num_simulations == 0 {
            return Err(Error::Config("num_simulations must be >= 1".into()));
        }
        self.noise.validate()?;
        if !(0.0..=1.0).contains(&self.classifier_cfg.theta) {
            return Err(Error::Config(format!(
                "rejection threshold theta {} outside [0, 1]",
                self.classifier_cfg.theta
            )));
        }
        Ok(())
    }
}

/// Per-class outcome tallies accumulated across all simulations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassCounts {
    pub label: String,
    pub correct: u64,
    pub misclassified_as_known: u64,
    pub rejected: u64,
}

/// Deterministic, serializable record of one benchmark run.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub config: BenchmarkConfig,
    pub seed_scheme: &'static str,
    pub num_templates: usize,
    pub per_simulation_accuracy: Vec<f64>,
    pub mean_accuracy: f64,
    /// Population standard deviation over the per-simulation accuracies.
    pub std_accuracy: f64,
    pub per_class: Vec<ClassCounts>,
    pub reference_nn_accuracy: f64,
}

struct SimResult {
    correct: u64,
    per_class: Vec<(u64, u64, u64)>, // (correct, misclassified_as_known, rejected)
}

fn classify_with(
    kind: ClassifierKind,
    test: &Signature,
    lib: &TemplateLibrary,
    cfg: &ClassifierConfig,
) -> Result<Decision> {
    let outcome = match kind {
        ClassifierKind::ForcedChoice => classify_forced_choice(test, lib)?,
        ClassifierKind::NnThreshold => classify_nn_threshold(test, lib, cfg)?,
        ClassifierKind::ModifiedDennler => classify_modified_dennler(test, lib, cfg)?,
    };
    Ok(outcome.decision)
}

fn run_simulation(
    sim: u64,
    config: &BenchmarkConfig,
    lib: &TemplateLibrary,
) -> Result<SimResult> {
    let spo = config.samples_per_odorant;
    let mut per_class = vec![(0u64, 0u64, 0u64); lib.len()];
    let mut correct_total = 0u64;

    for (o, (label, template)) in lib.templates().iter().enumerate() {
        for i in 0..spo {
            let sample_index = (o * spo + i) as u64;
            let seed = SeedSpec::new(config.base_seed, stream_domain::NOISE)
                .stream(sim, sample_index);
            let corrupted = config.noise.apply(template, &seed)?;
            let decision = classify_with(config.classifier, &corrupted, lib, &config.classifier_cfg)?;
            match decision {
                Decision::Known(ref got) if got == label => {
                    per_class[o].0 += 1;
                    correct_total += 1;
                }
                Decision::Known(_) => per_class[o].1 += 1,
                Decision::NoneOfTheAbove => per_class[o].2 += 1,
            }
        }
    }

    Ok(SimResult {
        correct: correct_total,
        per_class,
    })
}

/// Runs the seeded benchmark protocol.
///
/// Accuracy counts a sample as correct only when the decision equals its true
/// label; rejections and wrong labels are both failures, with rejection
/// counts reported separately so the trade-off stays visible. Simulations may
/// run in parallel; results are merged by simulation index, so the report is
/// byte-identical for any worker count.
pub fn run_benchmark(config: &BenchmarkConfig, lib: &TemplateLibrary) -> Result<ExperimentReport> {
    config.validate()?;

    let sims: Vec<u64> = (0..config.num_simulations as u64).collect();

    #[cfg(feature = "parallel")]
    let results: Result<Vec<SimResult>> = {
        use rayon::prelude::*;
        sims.par_iter()
            .map(|&s| run_simulation(s, config, lib))
            .collect()
    };
    #[cfg(not(feature = "parallel"))]
    let results: Result<Vec<SimResult>> = sims
        .iter()
        .map(|&s| run_simulation(s, config, lib))
        .collect();
    let results = results?;

    let samples_per_sim = (config.samples_per_odorant * lib.len()) as f64;
    let per_simulation_accuracy: Vec<f64> = results
        .iter()
        .map(|r| r.correct as f64 / samples_per_sim)
        .collect();
    let mean_accuracy =
        per_simulation_accuracy.iter().sum::<f64>() / per_simulation_accuracy.len() as f64;
    let variance = per_simulation_accuracy
        .iter()
        .map(|a| (a - mean_accuracy).powi(2))
        .sum::<f64>()
        / per_simulation_accuracy.len() as f64;
    let std_accuracy = variance.sqrt();

    let mut per_class: Vec<ClassCounts> = lib
        .labels()
        .map(|label| ClassCounts {
            label: label.to_string(),
            correct: 0,
            misclassified_as_known: 0,
            rejected: 0,
        })
        .collect();
    for r in &results {
        for (o, &(c, m, rej)) in r.per_class.iter().enumerate() {
            per_class[o].correct += c;
            per_class[o].misclassified_as_known += m;
            per_class[o].rejected += rej;
        }
    }

    Ok(ExperimentReport {
        config: config.clone(),
        seed_scheme: SEED_SCHEME,
        num_templates: lib.len(),
        per_simulation_accuracy,
        mean_accuracy,
        std_accuracy,
        per_class,
        reference_nn_accuracy: REFERENCE_NN_ACCURACY,
    })
}

/// Counts for one classifier over a batch of probe vectors.
#[derive(Debug, Clone, Serialize)]
pub struct ProbeSummary {
    pub known: usize,
    pub none_of_the_above: usize,
    pub reported_similarities: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LabelCount {
    pub label: String,
    pub count: u64,
}

/// Random-vector probe: random inputs vs. forced choice and the thresholded
/// nearest neighbor.
#[derive(Debug, Clone, Serialize)]
pub struct RandomProbeReport {
    pub vector_count: usize,
    pub base_seed: u64,
    pub theta: f64,
    pub forced_choice: ProbeSummary,
    pub nn_threshold: ProbeSummary,
    /// How forced choice spread the random inputs over labels.
    pub forced_choice_label_counts: Vec<LabelCount>,
    /// Largest per-label deviation from uniform in binomial sigma units;
    /// diagnostic only.
    pub chance_uniformity_sigma: f64,
}

/// Generates `count` random signatures and classifies each with forced choice
/// and with the thresholded nearest neighbor (Manhattan, theta 0.75).
pub fn run_fig1a(lib: &TemplateLibrary, count: usize, base_seed: u64) -> Result<RandomProbeReport> {
    if count == 0 {
        return Err(Error::Config("random probe needs count >= 1".into()));
    }
    let cfg = ClassifierConfig::default();
    let mut forced = ProbeSummary {
        known: 0,
        none_of_the_above: 0,
        reported_similarities: Vec::with_capacity(count),
    };
    let mut nn = ProbeSummary {
        known: 0,
        none_of_the_above: 0,
        reported_similarities: Vec::with_capacity(count),
    };
    let mut label_counts: BTreeMap<&str, u64> = lib.labels().map(|l| (l, 0)).collect();

    for i in 0..count {
        let seed = SeedSpec::new(base_seed, stream_domain::RANDOM_VECTOR).stream(0, i as u64);
        let test = random_signature(lib.n(), lib.vmax(), &seed)?;

        let out = classify_forced_choice(&test, lib)?;
        match &out.decision {
            Decision::Known(label) => {
                forced.known += 1;
                *label_counts.get_mut(label.as_str()).expect("library label") += 1;
            }
            Decision::NoneOfTheAbove => forced.none_of_the_above += 1,
        }
        forced.reported_similarities.push(out.reported_similarity.value());

        let out = classify_nn_threshold(&test, lib, &cfg)?;
        match out.decision {
            Decision::Known(_) => nn.known += 1,
            Decision::NoneOfTheAbove => nn.none_of_the_above += 1,
        }
        nn.reported_similarities.push(out.reported_similarity.value());
    }

    let expected = count as f64 / lib.len() as f64;
    let sigma = (count as f64 * (1.0 / lib.len() as f64) * (1.0 - 1.0 / lib.len() as f64)).sqrt();
    let chance_uniformity_sigma = label_counts
        .values()
        .map(|&c| ((c as f64 - expected) / sigma).abs())
        .fold(0.0f64, f64::max);

    Ok(RandomProbeReport {
        vector_count: count,
        base_seed,
        theta: cfg.theta,
        forced_choice: forced,
        nn_threshold: nn,
        forced_choice_label_counts: lib
            .labels()
            .map(|l| LabelCount {
                label: l.to_string(),
                count: label_counts[l],
            })
            .collect(),
        chance_uniformity_sigma,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct OffsetProbeSample {
    pub label: String,
    pub forced_decision: Decision,
    pub forced_reported: f64,
    pub nn_decision: Decision,
    pub nn_reported: f64,
}

/// +1-offset probe: one perturbed copy of each template.
#[derive(Debug, Clone, Serialize)]
pub struct OffsetProbeReport {
    pub total: usize,
    pub theta: f64,
    pub forced_choice_correct: usize,
    pub nn_threshold_correct: usize,
    pub samples: Vec<OffsetProbeSample>,
}

/// Adds +1 to every element of every template and classifies the results with
/// both procedures.
///
/// Requires every library value to sit at or below `vmax - 1` so the offset
/// never saturates; libraries violating that precondition are rejected.
pub fn run_fig1b(lib: &TemplateLibrary) -> Result<OffsetProbeReport> {
    if lib.vmax() == 0 || lib.max_value() > lib.vmax() - 1 {
        return Err(Error::Config(format!(
            "offset probe needs library values <= vmax - 1 (found {} with vmax {})",
            lib.max_value(),
            lib.vmax()
        )));
    }
    let cfg = ClassifierConfig::default();
    let mut samples = Vec::with_capacity(lib.len());
    let mut forced_correct = 0usize;
    let mut nn_correct = 0usize;

    for (label, template) in lib.templates() {
        let test = crate::noise::additive_offset(template, 1);

        let forced = classify_forced_choice(&test, lib)?;
        if forced.decision == Decision::Known(label.clone()) {
            forced_correct += 1;
        }
        let nn = classify_nn_threshold(&test, lib, &cfg)?;
        if nn.decision == Decision::Known(label.clone()) {
            nn_correct += 1;
        }
        samples.push(OffsetProbeSample {
            label: label.clone(),
            forced_decision: forced.decision,
            forced_reported: forced.reported_similarity.value(),
            nn_decision: nn.decision,
            nn_reported: nn.reported_similarity.value(),
        });
    }

    Ok(OffsetProbeReport {
        total: lib.len(),
        theta: cfg.theta,
        forced_choice_correct: forced_correct,
        nn_threshold_correct: nn_correct,
        samples,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct MedianCritiqueClass {
    pub label: String,
    pub sample_count: usize,
    pub correct: usize,
    pub accuracy: f64,
    /// Median of the reported similarity to this class's own template.
    pub median_self_similarity: f64,
    /// Median of the reported similarity to every template, library order.
    pub median_by_template: Vec<f64>,
}

/// Median-aggregation critique: per-class medians of forced-choice score
/// vectors shown next to the actual accuracy.
#[derive(Debug, Clone, Serialize)]
pub struct MedianCritiqueReport {
    pub per_class: Vec<MedianCritiqueClass>,
    pub overall_accuracy: f64,
}

/// Classifies every sample with forced choice and aggregates the per-template
/// medians, making the gap between "median similarity 1.0" and true accuracy
/// explicit.
pub fn run_fig2_critique(
    lib: &TemplateLibrary,
    samples: &BTreeMap<String, Vec<Signature>>,
) -> Result<MedianCritiqueReport> {
    if samples.is_empty() {
        return Err(Error::Config("median critique needs at least one class".into()));
    }
    let labels: Vec<&str> = lib.labels().collect();
    for (label, class_samples) in samples {
        if class_samples.is_empty() {
            return Err(Error::Config(format!(
                "median critique needs at least one sample for '{label}'"
            )));
        }
        if !labels.contains(&label.as_str()) {
            return Err(Error::Config(format!(
                "sample label '{label}' not present in the library"
            )));
        }
    }

    let mut per_class = Vec::with_capacity(samples.len());
    let mut correct_total = 0usize;
    let mut sample_total = 0usize;

    for (label, class_samples) in samples {
        let outcomes = class_samples
            .iter()
            .map(|s| classify_forced_choice(s, lib))
            .collect::<Result<Vec<_>>>()?;
        let medians = crate::classifier::median_similarity_report(&outcomes, lib)?;
        let own_index = labels
            .iter()
            .position(|l| l == label)
            .expect("label checked above");
        let correct = outcomes
            .iter()
            .filter(|o| o.decision.known_label() == Some(label.as_str()))
            .count();
        correct_total += correct;
        sample_total += outcomes.len();
        per_class.push(MedianCritiqueClass {
            label: label.clone(),
            sample_count: outcomes.len(),
            correct,
            accuracy: correct as f64 / outcomes.len() as f64,
            median_self_similarity: medians[own_index].1,
            median_by_template: medians.iter().map(|(_, m)| *m).collect(),
        });
    }

    Ok(MedianCritiqueReport {
        per_class,
        overall_accuracy: correct_total as f64 / sample_total as f64,
    })
}
