//! The three decision procedures under comparison.
//!
//! * [`classify_forced_choice`] — selects the template with the greatest
//!   number of exactly matching values, then reports Jaccard coefficients
//!   between that *selected template* and every template. The winner is
//!   compared with itself, so the reported similarity is always exactly 1.0;
//!   the test vector's actual similarity to any template never appears in the
//!   output. This flaw is deliberate and contract-tested.
//! * [`classify_nn_threshold`] — nearest neighbor under a configurable metric
//!   with a rejection threshold: inputs whose best similarity does not exceed
//!   theta are classified as none-of-the-above.
//! * [`classify_modified_dennler`] — the forced-choice code path retrofitted
//!   with Manhattan-similarity selection and a threshold. Kept as a separate
//!   implementation so its decision equivalence with the thresholded nearest
//!   neighbor is a checkable property rather than a tautology.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::signature::{Signature, TemplateLibrary};
use crate::similarity::{jaccard_pairset, manhattan_similarity, match_count, SimilarityScore};

/// Similarity metric used by the thresholded nearest-neighbor classifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    JaccardPairset,
    ManhattanSimilarity,
}

impl Metric {
    pub fn score(self, a: &Signature, b: &Signature) -> Result<SimilarityScore> {
        match self {
            Metric::JaccardPairset => jaccard_pairset(a, b),
            Metric::ManhattanSimilarity => manhattan_similarity(a, b),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Metric::JaccardPairset => write!(f, "jaccard_pairset"),
            Metric::ManhattanSimilarity => write!(f, "manhattan_similarity"),
        }
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "jaccard" | "jaccard_pairset" => Ok(Metric::JaccardPairset),
            "manhattan" | "manhattan_similarity" => Ok(Metric::ManhattanSimilarity),
            other => Err(Error::Config(format!(
                "unknown metric `{other}`: expected `jaccard` or `manhattan`"
            ))),
        }
    }
}

/// Argmax ties are broken toward the lowest template index; fixed so results
/// are reproducible across platforms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TieBreak {
    LowestIndex,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassifierConfig {
    pub theta: f64,
    pub metric: Metric,
    pub tie_break: TieBreak,
}

impl ClassifierConfig {
    pub fn new(theta: f64, metric: Metric) -> Result<Self> {
        if !(0.0..=1.0).contains(&theta) {
            return Err(Error::Config(format!(
                "rejection threshold theta {theta} outside [0, 1]"
            )));
        }
        Ok(ClassifierConfig {
            theta,
            metric,
            tie_break: TieBreak::LowestIndex,
        })
    }
}

impl Default for ClassifierConfig {
    /// theta 0.75 with Manhattan similarity.
    fn default() -> Self {
        ClassifierConfig {
            theta: 0.75,
            metric: Metric::ManhattanSimilarity,
            tie_break: TieBreak::LowestIndex,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    Known(String),
    NoneOfTheAbove,
}

impl Decision {
    pub fn known_label(&self) -> Option<&str> {
        match self {
            Decision::Known(label) => Some(label),
            Decision::NoneOfTheAbove => None,
        }
    }

    pub fn is_known(&self) -> bool {
        matches!(self, Decision::Known(_))
    }
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Decision::Known(label) => write!(f, "{label}"),
            Decision::NoneOfTheAbove => write!(f, "none_of_the_above"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassificationOutcome {
    pub decision: Decision,
    pub reported_similarity: SimilarityScore,
    /// One entry per library template, in library order.
    pub per_template_scores: Vec<(String, SimilarityScore)>,
    pub selected_index: Option<usize>,
}

/// First strictly-greater value wins, so ties resolve to the lowest index.
fn argmax_lowest_index<T: PartialOrd + Copy>(values: &[T]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Forced-choice exact-match classifier.
///
/// Selects `j* = argmax_j match_count(test, template_j)` and reports the
/// Jaccard coefficients between template `j*` and each template — never
/// between the test vector and anything. If no template shares even a single
/// element with the test vector the input is classified as none-of-the-above
/// (with zero matches everywhere, every pairwise coefficient is exactly 0).
pub fn classify_forced_choice(
    test: &Signature,
    lib: &TemplateLibrary,
) -> Result<ClassificationOutcome> {
    lib.check_compatible(test)?;

    let counts = lib
        .templates()
        .iter()
        .map(|(_, t)| match_count(test, t))
        .collect::<Result<Vec<_>>>()?;
    let best = argmax_lowest_index(&counts);

    if counts[best] == 0 {
        let per_template_scores = lib
            .templates()
            .iter()
            .map(|(label, t)| Ok((label.clone(), jaccard_pairset(test, t)?)))
            .collect::<Result<Vec<_>>>()?;
        return Ok(ClassificationOutcome {
            decision: Decision::NoneOfTheAbove,
            reported_similarity: SimilarityScore::new(0.0),
            per_template_scores,
            selected_index: None,
        });
    }

    let (_, selected) = &lib.templates()[best];
    let per_template_scores = lib
        .templates()
        .iter()
        .map(|(label, t)| Ok((label.clone(), jaccard_pairset(selected, t)?)))
        .collect::<Result<Vec<_>>>()?;
    let reported_similarity = per_template_scores[best].1;

    Ok(ClassificationOutcome {
        decision: Decision::Known(lib.templates()[best].0.clone()),
        reported_similarity,
        per_template_scores,
        selected_index: Some(best),
    })
}

/// Thresholded nearest-neighbor classifier.
///
/// Scores the test vector against every template under the configured metric
/// and accepts the best match only if its similarity strictly exceeds theta;
/// otherwise the input is none-of-the-above. Unlike the forced-choice
/// procedure, the reported similarity is the true test-to-template score.
pub fn classify_nn_threshold(
    test: &Signature,
    lib: &TemplateLibrary,
    cfg: &ClassifierConfig,
) -> Result<ClassificationOutcome> {
    lib.check_compatible(test)?;

    let per_template_scores = lib
        .templates()
        .iter()
        .map(|(label, t)| Ok((label.clone(), cfg.metric.score(test, t)?)))
        .collect::<Result<Vec<_>>>()?;
    let scores: Vec<f64> = per_template_scores.iter().map(|(_, s)| s.value()).collect();
    let best = argmax_lowest_index(&scores);
    let best_score = per_template_scores[best].1;

    let decision = if best_score.value() > cfg.theta {
        Decision::Known(per_template_scores[best].0.clone())
    } else {
        Decision::NoneOfTheAbove
    };
    debug_assert!(
        decision.is_known() || best_score.value() <= cfg.theta,
        "rejection requires the best score to not exceed theta"
    );

    Ok(ClassificationOutcome {
        decision,
        reported_similarity: best_score,
        per_template_scores,
        selected_index: Some(best),
    })
}

/// The forced-choice code path with its selection rule replaced by Manhattan
/// similarity and a detection threshold applied to the winner.
///
/// Decision-identical to [`classify_nn_threshold`] with the Manhattan metric;
/// the `metric` field of `cfg` is ignored.
pub fn classify_modified_dennler(
    test: &Signature,
    lib: &TemplateLibrary,
    cfg: &ClassifierConfig,
) -> Result<ClassificationOutcome> {
    lib.check_compatible(test)?;

    // Selection loop kept in the shape of classify_forced_choice: one running
    // best index, then a per-template report pass.
    let mut best = 0usize;
    let mut best_score = manhattan_similarity(test, &lib.templates()[0].1)?;
    let mut per_template_scores = Vec::with_capacity(lib.len());
    per_template_scores.push((lib.templates()[0].0.clone(), best_score));
    for (i, (label, t)) in lib.templates().iter().enumerate().skip(1) {
        let score = manhattan_similarity(test, t)?;
        per_template_scores.push((label.clone(), score));
        if score.value() > best_score.value() {
            best = i;
            best_score = score;
        }
    }

    let decision = if best_score.value() > cfg.theta {
        Decision::Known(lib.templates()[best].0.clone())
    } else {
        Decision::NoneOfTheAbove
    };

    Ok(ClassificationOutcome {
        decision,
        reported_similarity: best_score,
        per_template_scores,
        selected_index: Some(best),
    })
}

/// Per-template median of the reported score vectors, the aggregation whose
/// headline value hides misclassifications: a class at 60% accuracy still
/// reports a median self-similarity of 1.0.
pub fn median_similarity_report(
    outcomes: &[ClassificationOutcome],
    lib: &TemplateLibrary,
) -> Result<Vec<(String, f64)>> {
    if outcomes.is_empty() {
        return Err(Error::Config(
            "median similarity report needs at least one outcome".into(),
        ));
    }
    for outcome in outcomes {
        if outcome.per_template_scores.len() != lib.len() {
            return Err(Error::Config(format!(
                "outcome scores {} templates, library has {}",
                outcome.per_template_scores.len(),
                lib.len()
            )));
        }
    }

    let mut report = Vec::with_capacity(lib.len());
    for (k, (label, _)) in lib.templates().iter().enumerate() {
        let mut scores: Vec<f64> = outcomes
            .iter()
            .map(|o| o.per_template_scores[k].1.value())
            .collect();
        report.push((label.clone(), median(&mut scores)));
    }
    Ok(report)
}

/// Median with the even-count convention: mean of the two middle values.
fn median(xs: &mut [f64]) -> f64 {
    xs.sort_by(|a, b| a.partial_cmp(b).expect("scores are finite"));
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        (xs[n / 2 - 1] + xs[n / 2]) / 2.0
    }
}


#[cfg(test)]
mod prop_tests {
    use super::*;
    use proptest::prelude::*;

    fn library_and_test(
        n: usize,
        vmax: u16,
        count: usize,
    ) -> impl Strategy<Value = (TemplateLibrary, Signature)> {
        (
            proptest::collection::vec(proptest::collection::vec(0..=vmax, n), count),
            proptest::collection::vec(0..=vmax, n),
        )
            .prop_map(move |(templates, test)| {
                let templates = templates
                    .into_iter()
                    .enumerate()
                    .map(|(i, values)| {
                        (format!("t{i:02}"), Signature::new(values, vmax).unwrap())
                    })
                    .collect();
                (
                    TemplateLibrary::new(templates).unwrap(),
                    Signature::new(test, vmax).unwrap(),
                )
            })
    }

    proptest! {
        // Whenever any template shares at least one element with the test
        // vector, the forced-choice report is exactly 1.0.
        #[test]
        fn forced_choice_flaw_invariant((lib, test) in library_and_test(8, 3, 5)) {
            let max_matches = lib
                .templates()
                .iter()
                .map(|(_, t)| crate::similarity::match_count(&test, t).unwrap())
                .max()
                .unwrap();
            let out = classify_forced_choice(&test, &lib).unwrap();
            if max_matches >= 1 {
                prop_assert!(out.decision.is_known());
                prop_assert_eq!(out.reported_similarity.value(), 1.0);
            } else {
                prop_assert_eq!(out.decision, Decision::NoneOfTheAbove);
            }
        }

        // Exhaustive-by-sampling decision equivalence at small n.
        #[test]
        fn modified_dennler_equals_nn_threshold(
            (lib, test) in library_and_test(6, 3, 4),
            theta in 0.0f64..=1.0,
        ) {
            let cfg = ClassifierConfig::new(theta, Metric::ManhattanSimilarity).unwrap();
            let a = classify_modified_dennler(&test, &lib, &cfg).unwrap();
            let b = classify_nn_threshold(&test, &lib, &cfg).unwrap();
            prop_assert_eq!(a.decision, b.decision);
            prop_assert_eq!(a.reported_similarity, b.reported_similarity);
        }

        // Rejection soundness: a known label implies score strictly above theta.
        #[test]
        fn rejection_soundness(
            (lib, test) in library_and_test(8, 15, 5),
            theta in 0.0f64..=1.0,
        ) {
            let cfg = ClassifierConfig::new(theta, Metric::ManhattanSimilarity).unwrap();
            let out = classify_nn_threshold(&test, &lib, &cfg).unwrap();
            if out.decision.is_known() {
                prop_assert!(out.reported_similarity.value() > theta);
            } else {
                prop_assert!(out.reported_similarity.value() <= theta);
            }
        }
    }
}
