//! Single-stage commands: each one runs a small slice of the pipeline so
//! intermediate artifacts (feature tables, models, prediction files) can be
//! produced, inspected, and recombined without a full run.

use std::collections::BTreeMap;
use std::fmt;
use std::fmt::Write as _;
use std::path::Path;

use propdetect_core::corpus::{decode_bio, encode_bio, load_flc_labels, load_slc_labels, SentenceKey};
use propdetect_core::ensemble::{
    load_manifest, merge_fragments, repetition_postprocess, vote_matrix, EnsembleConfig,
    PredictionMatrix,
};
use propdetect_core::eval::{
    binary_score_tsv, flc_strict_scores, render_binary_score, render_span_report, slc_scores,
    span_report_tsv,
};
use propdetect_core::features::sentence_embedding;
use propdetect_core::models::{
    load_fragment_predictions, load_sentence_predictions, sniff_model, token_features, train_crf,
    write_fragment_predictions, write_sentence_predictions, CrfConfig, CrfExample, CrfModel,
    DecisionRule, LogRegConfig, LogRegModel, ModelKind, SentencePrediction, TokenFeatureConfig,
};
use propdetect_core::seeding::substream_seed;
use propdetect_core::Error;

use crate::config::PipelineConfig;
use crate::pipeline::{assemble_corpus_features, fit_topics, load_inputs, retained_gold};

/// What went wrong, split by whose fault it is: a bad invocation, or a
/// failure inside the run.
#[derive(Debug)]
pub enum StageError {
    /// The command line itself is unusable (missing required setting,
    /// unknown variant name, ...).
    Usage(String),
    /// The run failed; `Error::is_data_error` separates bad inputs from bugs.
    Run(Error),
}

impl fmt::Display for StageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StageError::Usage(msg) => write!(f, "{msg}"),
            StageError::Run(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for StageError {
    fn from(e: Error) -> Self {
        StageError::Run(e)
    }
}

pub type StageResult = Result<String, StageError>;

fn require<'a, T>(value: &'a Option<T>, key: &str) -> Result<&'a T, StageError> {
    value.as_ref().ok_or_else(|| {
        StageError::Usage(format!(
            "this command needs `{key}`; pass --{} or set it in the config file",
            key.replace('_', "-")
        ))
    })
}

/// Load everything the configuration points at and report what was found,
/// without training or predicting anything.
pub fn cmd_ingest(config: &PipelineConfig) -> StageResult {
    config.validate()?;
    let inputs = load_inputs(config)?;
    let ids = inputs.docs.article_ids();
    let total: usize = inputs.docs.iter().map(|d| d.sentences.len()).sum();
    let retained = inputs.docs.retained_keys().len();
    let mut out = String::new();
    let _ = writeln!(
        out,
        "corpus: {} articles, {total} sentences ({retained} retained)",
        ids.len()
    );
    if let Some(path) = &config.slc_labels {
        let gold = load_slc_labels(path, &inputs.docs)?;
        let positives = gold.values().filter(|v| **v).count();
        let _ = writeln!(out, "sentence labels: {} ({positives} positive)", gold.len());
    }
    if let Some(path) = &config.flc_labels {
        let gold = load_flc_labels(path, &inputs.docs)?;
        let techniques: std::collections::BTreeSet<&str> =
            gold.iter().map(|f| f.technique.as_str()).collect();
        let _ = writeln!(out, "fragments: {} across {} techniques", gold.len(), techniques.len());
    }
    if let Some(path) = &config.manifest {
        let manifest = load_manifest(path)?;
        for column in &manifest.columns {
            let preds = load_sentence_predictions(&column.path, &inputs.docs)?;
            let _ = writeln!(out, "manifest column {}: {} predictions", column.model_id, preds.len());
        }
    }
    if let Some(table) = &inputs.embeddings {
        let _ = writeln!(out, "embeddings: {} words, dimension {}", table.len(), table.dimension());
    }
    Ok(out)
}

/// Write the assembled sentence feature table: a schema line, a names line,
/// then one row of values per retained sentence.
pub fn cmd_featurize(config: &PipelineConfig, out_path: &Path) -> StageResult {
    config.validate()?;
    let inputs = load_inputs(config)?;
    let lda = fit_topics(config, &inputs.docs)?;
    let features = assemble_corpus_features(config, &inputs, lda.as_ref())?;
    let Some(first) = features.values().next() else {
        return Err(StageError::Run(Error::InvalidInput(
            "corpus has no retained sentences to featurize".into(),
        )));
    };
    let mut out = String::new();
    let _ = writeln!(out, "schema\t{}", first.schema_id());
    let _ = writeln!(out, "names\t{}", first.names().join(" "));
    for ((article, index), fv) in &features {
        let values: Vec<String> = fv.values().iter().map(f64::to_string).collect();
        let _ = writeln!(out, "{article}\t{index}\t{}", values.join(" "));
    }
    std::fs::write(out_path, &out).map_err(|e| Error::io(out_path, e))?;
    Ok(format!(
        "wrote {} feature rows ({} features each) to {}\n",
        features.len(),
        first.names().len(),
        out_path.display()
    ))
}

/// Train the sentence classifier on every labeled article and save it.
pub fn cmd_train_slc(config: &PipelineConfig, out_model: &Path) -> StageResult {
    config.validate()?;
    let gold_path = require(&config.slc_labels, "slc_labels")?;
    let inputs = load_inputs(config)?;
    let gold = retained_gold(&inputs.docs, &load_slc_labels(gold_path, &inputs.docs)?)?;
    let lda = fit_topics(config, &inputs.docs)?;
    let features = assemble_corpus_features(config, &inputs, lda.as_ref())?;
    let mut x = Vec::new();
    let mut y = Vec::new();
    for (key, fv) in &features {
        x.push(fv.clone());
        y.push(gold[key]);
    }
    let model = crate::pipeline::train_scaled_logreg(&x, &y, &LogRegConfig::default())?;
    model.save(out_model)?;
    Ok(format!(
        "trained sentence model on {} examples, saved to {}\n",
        x.len(),
        out_model.display()
    ))
}

fn parse_variant(name: &str) -> Result<TokenFeatureConfig, StageError> {
    match name {
        "base" => Ok(TokenFeatureConfig::Base),
        "lexical" => Ok(TokenFeatureConfig::Lexical),
        other => Err(StageError::Usage(format!(
            "unknown variant `{other}` (expected `base` or `lexical`)"
        ))),
    }
}

/// Train one fragment tagger variant on the whole labeled corpus.
pub fn cmd_train_flc(config: &PipelineConfig, variant: &str, out_model: &Path) -> StageResult {
    config.validate()?;
    let variant = parse_variant(variant)?;
    let gold_path = require(&config.flc_labels, "flc_labels")?;
    let inputs = load_inputs(config)?;
    let gold = load_flc_labels(gold_path, &inputs.docs)?;
    let techniques: Vec<String> = gold
        .iter()
        .map(|f| f.technique.clone())
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut by_article: BTreeMap<&str, Vec<propdetect_core::corpus::Fragment>> = BTreeMap::new();
    for fragment in &gold {
        by_article.entry(fragment.article_id.as_str()).or_default().push(fragment.clone());
    }
    let mut examples = Vec::new();
    for doc in inputs.docs.iter() {
        let empty = Vec::new();
        let fragments = by_article.get(doc.article_id.as_str()).unwrap_or(&empty);
        for sentence in doc.retained_sentences() {
            examples.push(CrfExample {
                features: token_features(sentence, variant, &inputs.lexicons),
                tags: encode_bio(sentence, fragments).tags,
            });
        }
    }
    let crf_config = CrfConfig {
        seed: substream_seed(config.seed, &format!("crf/full/{}", variant.name())),
        ..CrfConfig::default()
    };
    let model = train_crf(&examples, &techniques, &crf_config)?;
    model.save(out_model)?;
    Ok(format!(
        "trained {} fragment tagger on {} sentences ({} techniques), saved to {}\n",
        variant.name(),
        examples.len(),
        techniques.len(),
        out_model.display()
    ))
}

/// Apply a saved model to the corpus. The file's own header says whether it
/// is a sentence classifier or a fragment tagger, so the output format
/// follows the model, not a flag.
pub fn cmd_predict(config: &PipelineConfig, model_path: &Path, out_path: &Path) -> StageResult {
    config.validate()?;
    let inputs = load_inputs(config)?;
    match sniff_model(model_path)? {
        ModelKind::LogReg => {
            let model = LogRegModel::load(model_path)?;
            let lda = fit_topics(config, &inputs.docs)?;
            let features = assemble_corpus_features(config, &inputs, lda.as_ref())?;
            let tau = config.tau_grid[0];
            let rule = DecisionRule::new(tau)?;
            let mut rows = BTreeMap::new();
            for (key, fv) in &features {
                let prob = model.predict_proba(fv)?;
                rows.insert(key.clone(), SentencePrediction { label: rule.decide(prob), prob });
            }
            write_sentence_predictions(out_path, &rows)?;
            Ok(format!(
                "predicted {} sentences (tau {tau}) to {}\n",
                rows.len(),
                out_path.display()
            ))
        }
        ModelKind::Crf => {
            let model = CrfModel::load(model_path)?;
            // Extract the lexical superset; a base-variant model simply
            // never looks at the extra feature names.
            let mut fragments = Vec::new();
            for doc in inputs.docs.iter() {
                for sentence in doc.retained_sentences() {
                    let feats = token_features(sentence, TokenFeatureConfig::Lexical, &inputs.lexicons);
                    let tags = model.viterbi(&feats);
                    fragments.extend(decode_bio(&tags, sentence, &doc.article_id)?);
                }
            }
            fragments.sort();
            write_fragment_predictions(out_path, &fragments)?;
            Ok(format!("predicted {} fragments to {}\n", fragments.len(), out_path.display()))
        }
    }
}

/// Combine the manifest's prediction columns: a vote for sentence
/// predictions, the span merge for fragment predictions.
pub fn cmd_ensemble(config: &PipelineConfig, task: &str, out_path: &Path) -> StageResult {
    config.validate()?;
    let manifest_path = require(&config.manifest, "manifest")?;
    let inputs = load_inputs(config)?;
    let manifest = load_manifest(manifest_path)?;
    if manifest.columns.is_empty() {
        return Err(StageError::Run(Error::InvalidInput("manifest lists no columns".into())));
    }
    match task {
        "slc" => {
            let mut ensemble_config = EnsembleConfig {
                mode: manifest.mode.unwrap_or(config.mode),
                relax_fraction: manifest.relax_fraction.unwrap_or(config.relax_fraction),
                model_dev_f1: BTreeMap::new(),
            };
            let mut columns = Vec::new();
            for column in &manifest.columns {
                let preds = load_sentence_predictions(&column.path, &inputs.docs)?;
                let labels: BTreeMap<SentenceKey, bool> =
                    preds.into_iter().map(|(k, p)| (k, p.label)).collect();
                if let Some(f1) = column.dev_f1 {
                    ensemble_config.model_dev_f1.insert(column.model_id.clone(), f1);
                }
                columns.push((column.model_id.clone(), labels));
            }
            let matrix = PredictionMatrix::from_columns(&columns)?;
            let voted = vote_matrix(&matrix, &ensemble_config)?;
            let mut rows = BTreeMap::new();
            for (key, &label) in &voted {
                let votes = matrix.votes(key).expect("voted keys come from the matrix");
                let prob = votes.iter().filter(|v| **v).count() as f64 / votes.len() as f64;
                rows.insert(key.clone(), SentencePrediction { label, prob });
            }
            write_sentence_predictions(out_path, &rows)?;
            Ok(format!(
                "voted {} columns ({} mode) over {} sentences to {}\n",
                matrix.model_count(),
                ensemble_config.mode.name(),
                rows.len(),
                out_path.display()
            ))
        }
        "flc" => {
            let mut sources = Vec::new();
            for column in &manifest.columns {
                sources.push(load_fragment_predictions(&column.path, &inputs.docs)?);
            }
            let merged = merge_fragments(&sources);
            write_fragment_predictions(out_path, &merged)?;
            Ok(format!(
                "merged {} fragment sources into {} fragments at {}\n",
                sources.len(),
                merged.len(),
                out_path.display()
            ))
        }
        other => Err(StageError::Usage(format!("unknown task `{other}` (expected `slc` or `flc`)"))),
    }
}

/// Flip repeated near-duplicate sentences to positive in an existing
/// sentence prediction file.
pub fn cmd_postprocess(config: &PipelineConfig, predictions: &Path, out_path: &Path) -> StageResult {
    config.validate()?;
    let inputs = load_inputs(config)?;
    let Some(table) = &inputs.embeddings else {
        return Err(StageError::Usage(
            "postprocess needs `embeddings`; pass --embeddings or set it in the config file".into(),
        ));
    };
    let preds = load_sentence_predictions(predictions, &inputs.docs)?;
    let mut rows = preds.clone();
    let mut flipped_total = 0usize;
    for doc in inputs.docs.iter() {
        let mut embeddings = BTreeMap::new();
        let mut labels = BTreeMap::new();
        for sentence in doc.retained_sentences() {
            let key = (doc.article_id.clone(), sentence.index);
            let Some(pred) = preds.get(&key) else {
                return Err(StageError::Run(Error::InvalidInput(format!(
                    "{} misses a prediction for sentence {}:{}",
                    predictions.display(),
                    key.0,
                    key.1
                ))));
            };
            embeddings.insert(sentence.index, sentence_embedding(sentence, table));
            labels.insert(sentence.index, pred.label);
        }
        let (updated, flipped) =
            repetition_postprocess(doc, &embeddings, &labels, config.window, config.lambda)?;
        flipped_total += flipped.len();
        for (index, label) in updated {
            let key = (doc.article_id.clone(), index);
            let prob = rows[&key].prob;
            rows.insert(key, SentencePrediction { label, prob });
        }
    }
    write_sentence_predictions(out_path, &rows)?;
    Ok(format!(
        "flipped {flipped_total} sentences (window {}, lambda {}) to {}\n",
        config.window, config.lambda, out_path.display()
    ))
}

/// Score a prediction file against a gold file.
pub fn cmd_evaluate(config: &PipelineConfig, task: &str, pred: &Path, gold: &Path) -> StageResult {
    config.validate()?;
    let inputs = load_inputs(config)?;
    match task {
        "slc" => {
            let gold_labels = retained_gold(&inputs.docs, &load_slc_labels(gold, &inputs.docs)?)?;
            let preds = load_sentence_predictions(pred, &inputs.docs)?;
            let labels: BTreeMap<SentenceKey, bool> =
                preds.into_iter().map(|(k, p)| (k, p.label)).collect();
            let score = slc_scores(&labels, &gold_labels)?;
            Ok(format!(
                "{}\n{}",
                render_binary_score("sentence", &score),
                binary_score_tsv(&score)
            ))
        }
        "flc" => {
            let predicted = load_fragment_predictions(pred, &inputs.docs)?;
            let gold_fragments = load_flc_labels(gold, &inputs.docs)?;
            let report = flc_strict_scores(&predicted, &gold_fragments);
            Ok(format!("{}{}", render_span_report(&report), span_report_tsv(&report)))
        }
        other => Err(StageError::Usage(format!("unknown task `{other}` (expected `slc` or `flc`)"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn usage_errors_name_the_missing_key() {
        let config = PipelineConfig {
            features: propdetect_core::features::FeatureToggles {
                embedding: false,
                linguistic: true,
                layout: true,
                topical: false,
            },
            ..PipelineConfig::default()
        };
        let err = cmd_train_slc(&config, Path::new("/tmp/never.model")).unwrap_err();
        match err {
            StageError::Usage(msg) => assert!(msg.contains("slc_labels"), "{msg}"),
            other => panic!("expected usage error, got {other:?}"),
        }
    }

    #[test]
    fn variant_names_are_checked_before_any_work() {
        let config = PipelineConfig::default();
        let err = cmd_train_flc(&config, "fancy", Path::new("/tmp/never.model")).unwrap_err();
        match err {
            StageError::Usage(msg) => assert!(msg.contains("fancy"), "{msg}"),
            other => panic!("expected usage error, got {other:?}"),
        }
    }
}
