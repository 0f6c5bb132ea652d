//! Article-level cross-validation folds. Splitting is by article, never by
//! sentence, so no article contributes to both sides of a split.

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::error::{Error, Result};

/// Assignment of every article id to exactly one of `k` folds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldPlan {
    k: usize,
    assignment: BTreeMap<String, usize>,
}

impl FoldPlan {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn fold_of(&self, article_id: &str) -> Option<usize> {
        self.assignment.get(article_id).copied()
    }

    /// Article ids assigned to fold `fold`, in id order.
    pub fn members(&self, fold: usize) -> Vec<&str> {
        self.assignment
            .iter()
            .filter(|(_, &f)| f == fold)
            .map(|(id, _)| id.as_str())
            .collect()
    }

    /// `(held_out, training)` article ids for fold `fold`, both in id order.
    pub fn split(&self, fold: usize) -> (Vec<&str>, Vec<&str>) {
        let mut held = Vec::new();
        let mut train = Vec::new();
        for (id, &f) in &self.assignment {
            if f == fold {
                held.push(id.as_str());
            } else {
                train.push(id.as_str());
            }
        }
        (held, train)
    }

    pub fn article_ids(&self) -> impl Iterator<Item = &str> {
        self.assignment.keys().map(|s| s.as_str())
    }
}

/// Shuffle article ids with a seeded Fisher–Yates pass and deal them round
/// robin into `k` folds. Sorting before the shuffle makes the plan a pure
/// function of `(ids, k, seed)` regardless of input order.
pub fn make_folds(article_ids: &[String], k: usize, seed: u64) -> Result<FoldPlan> {
    if k < 2 {
        return Err(Error::InvalidInput(format!("fold count must be at least 2, got {k}")));
    }
    if k > article_ids.len() {
        return Err(Error::InvalidInput(format!(
            "cannot split {} articles into {k} folds",
            article_ids.len()
        )));
    }
    let mut ids: Vec<String> = article_ids.to_vec();
    ids.sort();
    ids.dedup();
    if ids.len() != article_ids.len() {
        return Err(Error::InvalidInput("duplicate article ids in fold input".into()));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    for i in (1..ids.len()).rev() {
        let j = rng.gen_range(0..=i);
        ids.swap(i, j);
    }
    let assignment = ids
        .into_iter()
        .enumerate()
        .map(|(i, id)| (id, i % k))
        .collect();
    Ok(FoldPlan { k, assignment })
}
