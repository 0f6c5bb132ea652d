//! Scoring: binary precision/recall/F1 for sentence labels, strict-boundary
//! per-technique scores for fragments, and cross-fold aggregation.

use std::collections::BTreeMap;

use crate::corpus::{Fragment, SentenceKey};
use crate::error::{Error, Result};

/// Confusion counts for one binary decision, with the usual derived
/// metrics. Every zero denominator scores 0 rather than faulting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BinaryScore {
    pub true_positives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
}

impl BinaryScore {
    pub fn from_counts(true_positives: usize, false_positives: usize, false_negatives: usize) -> Self {
        BinaryScore { true_positives, false_positives, false_negatives }
    }

    pub fn precision(&self) -> f64 {
        let denom = self.true_positives + self.false_positives;
        if denom == 0 {
            0.0
        } else {
            self.true_positives as f64 / denom as f64
        }
    }

    pub fn recall(&self) -> f64 {
        let denom = self.true_positives + self.false_negatives;
        if denom == 0 {
            0.0
        } else {
            self.true_positives as f64 / denom as f64
        }
    }

    pub fn f1(&self) -> f64 {
        let p = self.precision();
        let r = self.recall();
        if p + r == 0.0 {
            0.0
        } else {
            2.0 * p * r / (p + r)
        }
    }

    /// Pool counts with another score (micro-style aggregation).
    pub fn merge(&self, other: &BinaryScore) -> BinaryScore {
        BinaryScore {
            true_positives: self.true_positives + other.true_positives,
            false_positives: self.false_positives + other.false_positives,
            false_negatives: self.false_negatives + other.false_negatives,
        }
    }
}

/// Score sentence predictions against gold labels. The key sets must match
/// exactly — a prediction file that misses or invents sentences is a bug
/// upstream, not a zero.
pub fn slc_scores(
    predicted: &BTreeMap<SentenceKey, bool>,
    gold: &BTreeMap<SentenceKey, bool>,
) -> Result<BinaryScore> {
    if let Some(key) = gold.keys().find(|k| !predicted.contains_key(*k)) {
        return Err(Error::InvalidInput(format!(
            "no prediction for labeled sentence {}:{}",
            key.0, key.1
        )));
    }
    if let Some(key) = predicted.keys().find(|k| !gold.contains_key(*k)) {
        return Err(Error::InvalidInput(format!(
            "prediction for unlabeled sentence {}:{}",
            key.0, key.1
        )));
    }
    let mut score = BinaryScore::default();
    for (key, &g) in gold {
        match (predicted[key], g) {
            (true, true) => score.true_positives += 1,
            (true, false) => score.false_positives += 1,
            (false, true) => score.false_negatives += 1,
            (false, false) => {}
        }
    }
    Ok(score)
}

/// Per-technique scores plus the macro and micro aggregates.
#[derive(Debug, Clone, PartialEq)]
pub struct SpanScoreReport {
    pub per_technique: BTreeMap<String, BinaryScore>,
    pub micro: BinaryScore,
}

impl SpanScoreReport {
    /// Unweighted mean F1 over every technique present in gold or
    /// predictions, so inventing a technique costs macro score.
    pub fn macro_f1(&self) -> f64 {
        if self.per_technique.is_empty() {
            return 0.0;
        }
        let sum: f64 = self.per_technique.values().map(BinaryScore::f1).sum();
        sum / self.per_technique.len() as f64
    }
}

/// Strict-boundary span scoring: a prediction counts only when an unmatched
/// gold fragment agrees on article, start, end, and technique. Matching is
/// greedy one-to-one in input order, which is optimal under exact equality.
pub fn flc_strict_scores(predicted: &[Fragment], gold: &[Fragment]) -> SpanScoreReport {
    let mut gold_matched = vec![false; gold.len()];
    let mut per_technique: BTreeMap<String, BinaryScore> = BTreeMap::new();
    for technique in gold.iter().chain(predicted).map(|f| &f.technique) {
        per_technique.entry(technique.clone()).or_default();
    }
    for pred in predicted {
        let slot = gold.iter().enumerate().find(|(i, g)| {
            !gold_matched[*i]
                && g.article_id == pred.article_id
                && g.span == pred.span
                && g.technique == pred.technique
        });
        let score = per_technique.get_mut(&pred.technique).expect("pre-seeded");
        match slot {
            Some((i, _)) => {
                gold_matched[i] = true;
                score.true_positives += 1;
            }
            None => score.false_positives += 1,
        }
    }
    for (matched, g) in gold_matched.iter().zip(gold) {
        if !matched {
            per_technique.get_mut(&g.technique).expect("pre-seeded").false_negatives += 1;
        }
    }
    let micro = per_technique
        .values()
        .fold(BinaryScore::default(), |acc, s| acc.merge(s));
    SpanScoreReport { per_technique, micro }
}

/// Per-fold scores next to the pooled-counts aggregate. Pooling sums the
/// confusion counts, so the aggregate F1 is generally *not* the mean of the
/// fold F1s.
#[derive(Debug, Clone, PartialEq)]
pub struct FoldReport {
    pub folds: Vec<BinaryScore>,
    pub pooled: BinaryScore,
}

pub fn score_folds(per_fold: &[BinaryScore]) -> Result<FoldReport> {
    if per_fold.is_empty() {
        return Err(Error::InvalidInput("no folds to aggregate".into()));
    }
    let pooled = per_fold
        .iter()
        .fold(BinaryScore::default(), |acc, s| acc.merge(s));
    Ok(FoldReport { folds: per_fold.to_vec(), pooled })
}

fn metric_rows(technique: &str, score: &BinaryScore) -> String {
    format!(
        "precision\t{technique}\t{}\nrecall\t{technique}\t{}\nf1\t{technique}\t{}\n",
        score.precision(),
        score.recall(),
        score.f1()
    )
}

/// Machine-readable rows: `metric<TAB>technique<TAB>value`. Sentence-level
/// scores use `-` in the technique column.
pub fn binary_score_tsv(score: &BinaryScore) -> String {
    metric_rows("-", score)
}

pub fn span_report_tsv(report: &SpanScoreReport) -> String {
    let mut out = String::new();
    for (technique, score) in &report.per_technique {
        out.push_str(&metric_rows(technique, score));
    }
    out.push_str(&metric_rows("micro", &report.micro));
    out.push_str(&format!("f1\tmacro\t{}\n", report.macro_f1()));
    out
}

/// Human-readable one-liner for a binary score.
pub fn render_binary_score(name: &str, score: &BinaryScore) -> String {
    format!(
        "{name}: P {:.4}  R {:.4}  F1 {:.4}  (tp {}, fp {}, fn {})",
        score.precision(),
        score.recall(),
        score.f1(),
        score.true_positives,
        score.false_positives,
        score.false_negatives
    )
}

/// Human-readable table for a span report.
pub fn render_span_report(report: &SpanScoreReport) -> String {
    let mut out = String::new();
    let width = report
        .per_technique
        .keys()
        .map(|t| t.len())
        .chain(["technique".len()])
        .max()
        .unwrap_or(9);
    out.push_str(&format!(
        "{:width$}  {:>6}  {:>6}  {:>6}  {:>4} {:>4} {:>4}\n",
        "technique", "P", "R", "F1", "tp", "fp", "fn"
    ));
    for (technique, score) in &report.per_technique {
        out.push_str(&format!(
            "{technique:width$}  {:>6.4}  {:>6.4}  {:>6.4}  {:>4} {:>4} {:>4}\n",
            score.precision(),
            score.recall(),
            score.f1(),
            score.true_positives,
            score.false_positives,
            score.false_negatives
        ));
    }
    out.push_str(&format!(
        "{:width$}  {:>6.4}  {:>6.4}  {:>6.4}  {:>4} {:>4} {:>4}\n",
        "micro",
        report.micro.precision(),
        report.micro.recall(),
        report.micro.f1(),
        report.micro.true_positives,
        report.micro.false_positives,
        report.micro.false_negatives
    ));
    out.push_str(&format!("macro F1 {:.4}\n", report.macro_f1()));
    out
}

/// Human-readable table for per-fold scores.
pub fn render_fold_report(report: &FoldReport) -> String {
    let mut out = String::new();
    for (i, fold) in report.folds.iter().enumerate() {
        out.push_str(&render_binary_score(&format!("fold{}", i + 1), fold));
        out.push('\n');
    }
    out.push_str(&render_binary_score("pooled", &report.pooled));
    out.push('\n');
    out
}
