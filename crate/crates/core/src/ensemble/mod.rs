//! Combining predictions: sentence voting, cross-fold pooling, fragment
//! merging, and the repetition postprocess.

use std::collections::BTreeMap;

use crate::corpus::SentenceKey;
use crate::error::{Error, Result};

mod manifest;
mod merge;
mod postprocess;

pub use manifest::{load_manifest, EnsembleManifest, ManifestColumn};
pub use merge::merge_fragments;
pub use postprocess::repetition_postprocess;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VoteMode {
    Majority,
    Relax,
}

impl VoteMode {
    pub fn name(self) -> &'static str {
        match self {
            VoteMode::Majority => "majority",
            VoteMode::Relax => "relax",
        }
    }

    pub fn from_name(name: &str) -> Result<VoteMode> {
        match name {
            "majority" => Ok(VoteMode::Majority),
            "relax" => Ok(VoteMode::Relax),
            other => Err(Error::InvalidInput(format!(
                "unknown vote mode `{other}` (expected `majority` or `relax`)"
            ))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct EnsembleConfig {
    pub mode: VoteMode,
    /// Fraction of positive votes required under [`VoteMode::Relax`].
    pub relax_fraction: f64,
    /// Dev F1 per model id; consulted only to break exact majority ties.
    pub model_dev_f1: BTreeMap<String, f64>,
}

impl EnsembleConfig {
    pub fn majority(model_dev_f1: BTreeMap<String, f64>) -> EnsembleConfig {
        EnsembleConfig { mode: VoteMode::Majority, relax_fraction: 0.5, model_dev_f1 }
    }

    pub fn relax(fraction: f64) -> EnsembleConfig {
        EnsembleConfig {
            mode: VoteMode::Relax,
            relax_fraction: fraction,
            model_dev_f1: BTreeMap::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.mode == VoteMode::Relax && !(self.relax_fraction > 0.0 && self.relax_fraction <= 1.0) {
            return Err(Error::InvalidInput(format!(
                "relax fraction must be in (0, 1], got {}",
                self.relax_fraction
            )));
        }
        for (id, f1) in &self.model_dev_f1 {
            if !f1.is_finite() {
                return Err(Error::InvalidInput(format!("dev F1 for `{id}` is not finite")));
            }
        }
        Ok(())
    }
}

/// Hard labels from every model for every sentence, rectangular by
/// construction: a missing cell is rejected at build time.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionMatrix {
    model_ids: Vec<String>,
    rows: BTreeMap<SentenceKey, Vec<bool>>,
}

impl PredictionMatrix {
    /// Assemble from per-model label maps. Every column must cover exactly
    /// the same sentence keys; gaps are reported, never imputed.
    pub fn from_columns(columns: &[(String, BTreeMap<SentenceKey, bool>)]) -> Result<Self> {
        if columns.is_empty() {
            return Err(Error::InvalidInput("prediction matrix needs at least one model".into()));
        }
        let mut model_ids = Vec::with_capacity(columns.len());
        for (id, _) in columns {
            if model_ids.contains(id) {
                return Err(Error::InvalidInput(format!("duplicate model id `{id}`")));
            }
            model_ids.push(id.clone());
        }
        let reference: Vec<&SentenceKey> = columns[0].1.keys().collect();
        for (id, labels) in &columns[1..] {
            if labels.len() != reference.len() || !reference.iter().all(|k| labels.contains_key(*k)) {
                let missing = reference
                    .iter()
                    .find(|k| !labels.contains_key(**k))
                    .map(|k| format!("`{}` is missing {}:{}", id, k.0, k.1));
                let extra = labels
                    .keys()
                    .find(|k| !columns[0].1.contains_key(*k))
                    .map(|k| format!("`{}` has extra {}:{}", id, k.0, k.1));
                return Err(Error::InvalidInput(format!(
                    "prediction coverage differs across models: {}",
                    missing.or(extra).unwrap_or_else(|| "size mismatch".into())
                )));
            }
        }
        let mut rows: BTreeMap<SentenceKey, Vec<bool>> = BTreeMap::new();
        for key in columns[0].1.keys() {
            let votes = columns.iter().map(|(_, labels)| labels[key]).collect();
            rows.insert(key.clone(), votes);
        }
        Ok(PredictionMatrix { model_ids, rows })
    }

    pub fn model_ids(&self) -> &[String] {
        &self.model_ids
    }

    pub fn model_count(&self) -> usize {
        self.model_ids.len()
    }

    pub fn keys(&self) -> impl Iterator<Item = &SentenceKey> {
        self.rows.keys()
    }

    pub fn votes(&self, key: &SentenceKey) -> Option<&[bool]> {
        self.rows.get(key).map(Vec::as_slice)
    }
}

/// Majority decision over one row. Strict majorities decide directly; an
/// exact tie falls back to the vote of the model with the highest dev F1
/// (F1 ties break toward the lexicographically smallest model id).
pub fn majority_vote(
    votes: &[bool],
    model_ids: &[String],
    model_dev_f1: &BTreeMap<String, f64>,
) -> Result<bool> {
    if votes.is_empty() || votes.len() != model_ids.len() {
        return Err(Error::InvalidInput(format!(
            "{} votes for {} models",
            votes.len(),
            model_ids.len()
        )));
    }
    let positive = votes.iter().filter(|v| **v).count();
    let negative = votes.len() - positive;
    if positive != negative {
        return Ok(positive > negative);
    }
    let mut best: Option<(f64, &String, bool)> = None;
    for (id, vote) in model_ids.iter().zip(votes) {
        let f1 = *model_dev_f1.get(id).ok_or_else(|| {
            Error::InvalidInput(format!("majority tie needs a dev F1 for model `{id}`, none known"))
        })?;
        let better = match &best {
            None => true,
            Some((bf1, bid, _)) => f1 > *bf1 || (f1 == *bf1 && id < *bid),
        };
        if better {
            best = Some((f1, id, *vote));
        }
    }
    Ok(best.expect("non-empty votes").2)
}

/// Relaxed decision: positive iff the positive share reaches `fraction`.
pub fn relax_vote(votes: &[bool], fraction: f64) -> bool {
    if votes.is_empty() {
        return false;
    }
    let positive = votes.iter().filter(|v| **v).count();
    positive as f64 / votes.len() as f64 >= fraction
}

/// Apply the configured vote to every row of the matrix.
pub fn vote_matrix(
    matrix: &PredictionMatrix,
    config: &EnsembleConfig,
) -> Result<BTreeMap<SentenceKey, bool>> {
    config.validate()?;
    let mut out = BTreeMap::new();
    for (key, votes) in &matrix.rows {
        let label = match config.mode {
            VoteMode::Majority => majority_vote(votes, &matrix.model_ids, &config.model_dev_f1)?,
            VoteMode::Relax => relax_vote(votes, config.relax_fraction),
        };
        out.insert(key.clone(), label);
    }
    Ok(out)
}

/// Pool the same model roster across folds into one wide matrix — fold `i`
/// and model `m` become column `fold{i}:{m}` — then vote per row. Per-model
/// dev F1 entries in `config` apply to that model's column in every fold.
pub fn ensemble_plus(
    per_fold: &[Vec<(String, BTreeMap<SentenceKey, bool>)>],
    config: &EnsembleConfig,
) -> Result<(PredictionMatrix, BTreeMap<SentenceKey, bool>)> {
    if per_fold.is_empty() {
        return Err(Error::InvalidInput("no folds to pool".into()));
    }
    let roster: Vec<&String> = per_fold[0].iter().map(|(id, _)| id).collect();
    for (f, fold) in per_fold.iter().enumerate().skip(1) {
        let ids: Vec<&String> = fold.iter().map(|(id, _)| id).collect();
        if ids != roster {
            return Err(Error::InvalidInput(format!(
                "fold {} roster {:?} differs from fold 1 roster {:?}",
                f + 1,
                ids,
                roster
            )));
        }
    }
    let mut columns = Vec::new();
    let mut pooled_config = config.clone();
    for (f, fold) in per_fold.iter().enumerate() {
        for (id, labels) in fold {
            let column_id = format!("fold{}:{id}", f + 1);
            if let Some(f1) = config.model_dev_f1.get(id) {
                pooled_config.model_dev_f1.insert(column_id.clone(), *f1);
            }
            columns.push((column_id, labels.clone()));
        }
    }
    let matrix = PredictionMatrix::from_columns(&columns)?;
    let labels = vote_matrix(&matrix, &pooled_config)?;
    Ok((matrix, labels))
}
