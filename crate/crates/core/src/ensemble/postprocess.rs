//! Repetition flip: a sentence nearly identical to a recent one is marked
//! positive, on the theory that repetition is itself the technique.

use std::collections::BTreeMap;

use crate::corpus::Document;
use crate::error::{Error, Result};
use crate::features::cosine;

/// For each retained sentence, compare its embedding against the up-to-
/// `window` preceding retained sentences; a similarity strictly above
/// `lambda` flips the label to positive. Labels only ever move negative →
/// positive. Returns the updated labels and the flipped sentence indices.
pub fn repetition_postprocess(
    document: &Document,
    embeddings: &BTreeMap<usize, Vec<f64>>,
    labels: &BTreeMap<usize, bool>,
    window: usize,
    lambda: f64,
) -> Result<(BTreeMap<usize, bool>, Vec<usize>)> {
    if window == 0 {
        return Err(Error::InvalidInput("repetition window must be at least 1".into()));
    }
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(Error::InvalidInput(format!(
            "repetition lambda must be in (0, 1], got {lambda}"
        )));
    }
    let retained: Vec<usize> = document
        .retained_sentences()
        .map(|s| s.index)
        .collect();
    for index in &retained {
        if !embeddings.contains_key(index) {
            return Err(Error::InvalidInput(format!(
                "no embedding for retained sentence {index} of article {}",
                document.article_id
            )));
        }
        if !labels.contains_key(index) {
            return Err(Error::InvalidInput(format!(
                "no label for retained sentence {index} of article {}",
                document.article_id
            )));
        }
    }

    let mut updated = labels.clone();
    let mut flipped = Vec::new();
    for (rank, index) in retained.iter().enumerate() {
        if updated[index] {
            continue;
        }
        let lo = rank.saturating_sub(window);
        let current = &embeddings[index];
        let mut repeated = false;
        for prev in &retained[lo..rank] {
            if cosine(current, &embeddings[prev])? > lambda {
                repeated = true;
                break;
            }
        }
        if repeated {
            updated.insert(*index, true);
            flipped.push(*index);
        }
    }
    Ok((updated, flipped))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn doc(lines: usize) -> Document {
        let text: Vec<String> = (1..=lines).map(|i| format!("sentence number {i} here")).collect();
        Document::from_text("1", text.join("\n"))
    }

    fn unit(dim: usize, axis: usize) -> Vec<f64> {
        let mut v = vec![0.0; dim];
        v[axis % dim] = 1.0;
        v
    }

    #[test]
    fn near_duplicate_within_window_flips_to_positive() {
        let d = doc(11);
        let mut embeddings = BTreeMap::new();
        for i in 1..=11 {
            embeddings.insert(i, unit(12, i));
        }
        embeddings.insert(11, unit(12, 3)); // sentence 11 repeats sentence 3
        let labels: BTreeMap<usize, bool> = (1..=11).map(|i| (i, false)).collect();
        let (updated, flipped) = repetition_postprocess(&d, &embeddings, &labels, 10, 0.99).unwrap();
        assert!(updated[&11]);
        assert_eq!(flipped, vec![11]);
        assert!((1..=10).all(|i| !updated[&i]));
    }

    #[test]
    fn duplicate_outside_the_window_does_not_flip() {
        let d = doc(11);
        let mut embeddings = BTreeMap::new();
        for i in 1..=11 {
            embeddings.insert(i, unit(12, i));
        }
        embeddings.insert(11, unit(12, 3));
        let labels: BTreeMap<usize, bool> = (1..=11).map(|i| (i, false)).collect();
        // Window 7 → sentence 11 sees sentences 4..=10 only.
        let (updated, flipped) = repetition_postprocess(&d, &embeddings, &labels, 7, 0.99).unwrap();
        assert!(!updated[&11]);
        assert!(flipped.is_empty());
    }

    #[test]
    fn orthogonal_embeddings_change_nothing() {
        let d = doc(5);
        let embeddings: BTreeMap<usize, Vec<f64>> =
            (1..=5).map(|i| (i, unit(5, i - 1))).collect();
        let labels: BTreeMap<usize, bool> = (1..=5).map(|i| (i, i == 2)).collect();
        let (updated, flipped) = repetition_postprocess(&d, &embeddings, &labels, 10, 0.95).unwrap();
        assert_eq!(updated, labels);
        assert!(flipped.is_empty());
    }

    #[test]
    fn first_retained_sentence_never_flips() {
        let d = doc(2);
        let embeddings: BTreeMap<usize, Vec<f64>> = (1..=2).map(|i| (i, unit(3, 0))).collect();
        let labels: BTreeMap<usize, bool> = (1..=2).map(|i| (i, false)).collect();
        let (updated, flipped) = repetition_postprocess(&d, &embeddings, &labels, 10, 0.99).unwrap();
        assert!(!updated[&1]);
        assert!(updated[&2]);
        assert_eq!(flipped, vec![2]);
    }

    #[test]
    fn comparison_is_strictly_greater_than_lambda() {
        let d = doc(2);
        // Identical embeddings → cosine exactly 1.0.
        let embeddings: BTreeMap<usize, Vec<f64>> = (1..=2).map(|i| (i, unit(3, 1))).collect();
        let labels: BTreeMap<usize, bool> = (1..=2).map(|i| (i, false)).collect();
        let (updated, _) = repetition_postprocess(&d, &embeddings, &labels, 10, 1.0).unwrap();
        // cosine 1.0 is not > 1.0
        assert!(!updated[&2]);
    }

    #[test]
    fn skipped_lines_do_not_count_toward_the_window() {
        // Lines: retained, single-token (dropped), retained duplicate.
        let d = Document::from_text("1", "the same words twice\nx\nthe same words twice");
        assert_eq!(d.retained_sentences().count(), 2);
        let mut embeddings = BTreeMap::new();
        embeddings.insert(1, unit(4, 2));
        embeddings.insert(3, unit(4, 2));
        let labels: BTreeMap<usize, bool> = [(1, false), (3, false)].into_iter().collect();
        // Window 1: sentence 3's sole predecessor is retained sentence 1.
        let (updated, flipped) = repetition_postprocess(&d, &embeddings, &labels, 1, 0.9).unwrap();
        assert!(updated[&3]);
        assert_eq!(flipped, vec![3]);
    }

    #[test]
    fn validates_inputs() {
        let d = doc(3);
        let embeddings: BTreeMap<usize, Vec<f64>> = (1..=3).map(|i| (i, unit(3, i))).collect();
        let labels: BTreeMap<usize, bool> = (1..=3).map(|i| (i, false)).collect();
        assert!(repetition_postprocess(&d, &embeddings, &labels, 0, 0.9).is_err());
        assert!(repetition_postprocess(&d, &embeddings, &labels, 5, 0.0).is_err());
        assert!(repetition_postprocess(&d, &embeddings, &labels, 5, 1.5).is_err());
        let mut short = embeddings.clone();
        short.remove(&2);
        assert!(repetition_postprocess(&d, &short, &labels, 5, 0.9).is_err());
        let mut unlabeled = labels.clone();
        unlabeled.remove(&3);
        assert!(repetition_postprocess(&d, &embeddings, &unlabeled, 5, 0.9).is_err());
    }

    proptest! {
        #[test]
        fn postprocess_is_monotone(
            seeds in proptest::collection::vec(0usize..4, 3..12),
            initial in proptest::collection::vec(any::<bool>(), 12),
            lambda_low in 0.1f64..0.5,
            lambda_high in 0.5f64..1.0,
        ) {
            let d = doc(seeds.len());
            let embeddings: BTreeMap<usize, Vec<f64>> = seeds
                .iter()
                .enumerate()
                .map(|(i, &axis)| (i + 1, unit(4, axis)))
                .collect();
            let labels: BTreeMap<usize, bool> = (1..=seeds.len())
                .map(|i| (i, initial[i - 1]))
                .collect();
            let (hi, _) = repetition_postprocess(&d, &embeddings, &labels, 10, lambda_high).unwrap();
            let (lo, _) = repetition_postprocess(&d, &embeddings, &labels, 10, lambda_low).unwrap();
            for (i, was) in &labels {
                // Positives never un-flip.
                if *was {
                    prop_assert!(hi[i] && lo[i]);
                }
                // Lower lambda flips at least as much.
                if hi[i] {
                    prop_assert!(lo[i]);
                }
            }
        }
    }
}
