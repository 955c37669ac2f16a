//! Pure metric kernels over signatures.
//!
//! Two families are provided: exact-match counting with its pair-set Jaccard
//! coefficient, and Manhattan (L1) distance with its normalized similarity.
//! The Jaccard coefficient treats a signature as the set of `(index, value)`
//! pairs, so `jaccard_pairset(a, a) == 1.0` exactly and the coefficient is
//! `m / (2n - m)` where `m` is the number of positions with equal values.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::signature::Signature;

/// A similarity value in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct SimilarityScore(f64);

impl SimilarityScore {
    pub(crate) fn new(value: f64) -> Self {
        debug_assert!((0.0..=1.0).contains(&value), "score {value} out of [0, 1]");
        SimilarityScore(value)
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

fn check_lengths(a: &Signature, b: &Signature) -> Result<usize> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(a.len())
}

/// Number of positions where the two signatures hold exactly equal values.
pub fn match_count(a: &Signature, b: &Signature) -> Result<usize> {
    check_lengths(a, b)?;
    Ok(a.values()
        .iter()
        .zip(b.values())
        .filter(|(x, y)| x == y)
        .count())
}

/// Jaccard coefficient over `(index, value)` pair sets: `m / (2n - m)`.
pub fn jaccard_pairset(a: &Signature, b: &Signature) -> Result<SimilarityScore> {
    let n = check_lengths(a, b)?;
    let m = match_count(a, b)?;
    Ok(SimilarityScore::new(m as f64 / (2 * n - m) as f64))
}

/// Manhattan (L1) distance: sum of absolute element-wise differences.
pub fn manhattan(a: &Signature, b: &Signature) -> Result<u64> {
    check_lengths(a, b)?;
    Ok(a.values()
        .iter()
        .zip(b.values())
        .map(|(&x, &y)| (x as i64 - y as i64).unsigned_abs())
        .sum())
}

/// Normalized Manhattan similarity: `1 - d / (n * vmax)`.
///
/// Equals 1 exactly iff the signatures are identical and 0 iff they are
/// maximally distant. Requires a shared level bound; a degenerate `vmax = 0`
/// alphabet admits only the all-zero signature, so the similarity is 1.
pub fn manhattan_similarity(a: &Signature, b: &Signature) -> Result<SimilarityScore> {
    let n = check_lengths(a, b)?;
    if a.vmax() != b.vmax() {
        return Err(Error::VmaxMismatch {
            left: a.vmax(),
            right: b.vmax(),
        });
    }
    if a.vmax() == 0 {
        return Ok(SimilarityScore::new(1.0));
    }
    let d = manhattan(a, b)?;
    Ok(SimilarityScore::new(
        1.0 - d as f64 / (n as f64 * a.vmax() as f64),
    ))
}


#[cfg(test)]
mod prop_tests {
    use super::*;
    use proptest::prelude::*;

    /// Brute-force oracle: materialize both (index, value) pair sets and
    /// compute |intersection| / |union| literally.
    fn jaccard_pairset_oracle(a: &Signature, b: &Signature) -> f64 {
        use std::collections::BTreeSet;
        let set_a: BTreeSet<(usize, u16)> =
            a.values().iter().copied().enumerate().collect();
        let set_b: BTreeSet<(usize, u16)> =
            b.values().iter().copied().enumerate().collect();
        let inter = set_a.intersection(&set_b).count();
        let union = set_a.union(&set_b).count();
        inter as f64 / union as f64
    }

    fn signature_pair(max_n: usize, vmax: u16) -> impl Strategy<Value = (Signature, Signature)> {
        (1..=max_n).prop_flat_map(move |n| {
            (
                proptest::collection::vec(0..=vmax, n),
                proptest::collection::vec(0..=vmax, n),
            )
                .prop_map(move |(a, b)| {
                    (
                        Signature::new(a, vmax).unwrap(),
                        Signature::new(b, vmax).unwrap(),
                    )
                })
        })
    }

    proptest! {
        #[test]
        fn metrics_are_symmetric((a, b) in signature_pair(72, 15)) {
            prop_assert_eq!(match_count(&a, &b).unwrap(), match_count(&b, &a).unwrap());
            prop_assert_eq!(manhattan(&a, &b).unwrap(), manhattan(&b, &a).unwrap());
            prop_assert_eq!(
                jaccard_pairset(&a, &b).unwrap().value(),
                jaccard_pairset(&b, &a).unwrap().value()
            );
            prop_assert_eq!(
                manhattan_similarity(&a, &b).unwrap().value(),
                manhattan_similarity(&b, &a).unwrap().value()
            );
        }

        #[test]
        fn similarities_bounded_and_one_iff_equal((a, b) in signature_pair(72, 15)) {
            let j = jaccard_pairset(&a, &b).unwrap().value();
            let m = manhattan_similarity(&a, &b).unwrap().value();
            prop_assert!((0.0..=1.0).contains(&j));
            prop_assert!((0.0..=1.0).contains(&m));
            prop_assert_eq!(j == 1.0, a == b);
            prop_assert_eq!(m == 1.0, a == b);
            prop_assert_eq!(
                match_count(&a, &b).unwrap() == a.len(),
                a == b
            );
        }

        #[test]
        fn jaccard_matches_pairset_oracle((a, b) in signature_pair(6, 3)) {
            let fast = jaccard_pairset(&a, &b).unwrap().value();
            let slow = jaccard_pairset_oracle(&a, &b);
            prop_assert!((fast - slow).abs() <= 1e-12);
        }

        // Moving one element of b toward a's value never decreases similarity.
        #[test]
        fn manhattan_similarity_monotone_under_single_move(
            (a, b) in signature_pair(72, 15),
            idx in 0usize..72,
        ) {
            let idx = idx % a.len();
            let mut closer = b.values().to_vec();
            let target = a.values()[idx];
            let current = closer[idx];
            closer[idx] = if current < target {
                current + 1
            } else if current > target {
                current - 1
            } else {
                current
            };
            let closer = Signature::new(closer, b.vmax()).unwrap();
            let before = manhattan_similarity(&a, &b).unwrap().value();
            let after = manhattan_similarity(&a, &closer).unwrap().value();
            prop_assert!(after >= before);
        }
    }
}
