//! The two fold experiments: sentence classification with an ensemble over
//! folds and external columns, and fragment tagging with a cross-fold merge.
//!
//! Every run writes its models, prediction files, reports, and the exact
//! configuration used into the output directory; rerunning with the same
//! inputs and seed reproduces every byte.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use propdetect_core::corpus::{
    decode_bio, encode_bio, load_articles, load_flc_labels, load_slc_labels, make_folds,
    DocumentSet, Fragment, SentenceKey,
};
use propdetect_core::ensemble::{
    ensemble_plus, load_manifest, merge_fragments, repetition_postprocess, EnsembleConfig,
};
use propdetect_core::eval::{
    binary_score_tsv, flc_strict_scores, render_binary_score, render_span_report, score_folds,
    slc_scores, span_report_tsv, BinaryScore, SpanScoreReport,
};
use propdetect_core::features::{
    apply_annotations, apply_fallback_tagger, assemble_features, load_annotations,
    load_word_vectors, sentence_embedding, EmbeddingTable, FeatureContext, FeatureVector,
    Lexicons,
};
use propdetect_core::models::{
    token_features, train_crf, train_logreg, write_fragment_predictions,
    write_sentence_predictions, CrfConfig, CrfExample, DecisionRule, LogRegConfig, LogRegModel,
    SentencePrediction, TokenFeatureConfig,
};
use propdetect_core::seeding::substream_seed;
use propdetect_core::topics::{fit_lda, DocumentTopics, LdaModel, LdaParams};
use propdetect_core::{Error, Result};

use crate::config::PipelineConfig;

/// Corpus plus the side inputs every stage shares.
pub struct LoadedInputs {
    pub docs: DocumentSet,
    pub lexicons: Lexicons,
    pub embeddings: Option<EmbeddingTable>,
}

/// Load articles, lexicons, annotations (sidecar first, heuristic fallback
/// for the gaps), and word vectors when configured or required.
pub fn load_inputs(config: &PipelineConfig) -> Result<LoadedInputs> {
    let mut docs = load_articles(&config.corpus_dir)?;
    let mut lexicons = Lexicons::default();
    if let Some(path) = &config.sentiment_lexicon {
        lexicons.load_sentiment(path)?;
    }
    if let Some(path) = &config.emotion_lexicon {
        lexicons.load_emotion(path)?;
    }
    if let Some(path) = &config.loaded_words {
        lexicons.load_loaded_words(path)?;
    }
    if let Some(path) = &config.senses {
        lexicons.load_senses(path)?;
    }
    if let Some(path) = &config.annotations {
        let table = load_annotations(path)?;
        apply_annotations(&mut docs, &table)?;
    }
    apply_fallback_tagger(&mut docs);
    let needs_embeddings = config.features.embedding || config.postprocess;
    let embeddings = match &config.embeddings {
        Some(path) => Some(load_word_vectors(path)?),
        None if needs_embeddings => {
            return Err(Error::InvalidInput(
                "embedding features (or the repetition postprocess) are enabled but no embeddings file is configured"
                    .into(),
            ));
        }
        None => None,
    };
    Ok(LoadedInputs { docs, lexicons, embeddings })
}

/// Fit the topic model when topical features are on.
pub fn fit_topics(config: &PipelineConfig, docs: &DocumentSet) -> Result<Option<LdaModel>> {
    if !config.features.topical {
        return Ok(None);
    }
    let params = LdaParams::with_topics(config.lda_topics, config.seed);
    Ok(Some(fit_lda(docs, &params)?))
}

/// Feature vectors for every retained sentence in the corpus.
pub fn assemble_corpus_features(
    config: &PipelineConfig,
    inputs: &LoadedInputs,
    lda: Option<&LdaModel>,
) -> Result<BTreeMap<SentenceKey, FeatureVector>> {
    let mut features = BTreeMap::new();
    for doc in inputs.docs.iter() {
        let topics = match (config.features.topical, lda) {
            (true, Some(model)) => Some(DocumentTopics::compute(doc, model)),
            (true, None) => {
                return Err(Error::InvalidInput(
                    "topical features enabled but no topic model fitted".into(),
                ));
            }
            (false, _) => None,
        };
        for sentence in doc.retained_sentences() {
            let topical = match &topics {
                Some(t) => Some(propdetect_core::topics::topical_features_from(t, sentence.index)?),
                None => None,
            };
            let fv = assemble_features(
                sentence,
                doc,
                &config.features,
                FeatureContext {
                    lexicons: &inputs.lexicons,
                    embeddings: inputs.embeddings.as_ref(),
                    topical,
                },
            )?;
            features.insert((doc.article_id.clone(), sentence.index), fv);
        }
    }
    Ok(features)
}

fn ensure_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Train the sentence classifier on standardized copies of the feature
/// vectors, then fold the per-column affine scaling back into raw-space
/// weights. Plain gradient descent stalls when column magnitudes differ by
/// orders of magnitude (a readability score next to a 0/1 lexicon flag);
/// optimizing on unit-scale columns fixes the conditioning while the
/// returned model still consumes raw feature vectors.
pub(crate) fn train_scaled_logreg(
    features: &[FeatureVector],
    labels: &[bool],
    config: &LogRegConfig,
) -> Result<LogRegModel> {
    if features.is_empty() || features.iter().any(|fv| fv.schema_id() != features[0].schema_id())
    {
        // Let the trainer raise its own empty-input or schema error.
        return train_logreg(features, labels, config);
    }
    let schema = features[0].schema_id().to_string();
    let names = features[0].names().to_vec();
    let d = names.len();
    let n = features.len() as f64;

    let mut mean = vec![0.0; d];
    for fv in features {
        for (m, &v) in mean.iter_mut().zip(fv.values()) {
            *m += v;
        }
    }
    for m in &mut mean {
        *m /= n;
    }
    let mut scale = vec![0.0; d];
    for fv in features {
        for (s, (&v, m)) in scale.iter_mut().zip(fv.values().iter().zip(&mean)) {
            *s += (v - m) * (v - m);
        }
    }
    for s in &mut scale {
        let sd = (*s / n).sqrt();
        *s = if sd > 0.0 { sd } else { 1.0 };
    }

    let mut standardized = Vec::with_capacity(features.len());
    for fv in features {
        let values: Vec<f64> = fv
            .values()
            .iter()
            .zip(mean.iter().zip(&scale))
            .map(|(&v, (m, s))| (v - m) / s)
            .collect();
        standardized.push(FeatureVector::from_parts(schema.clone(), names.clone(), values)?);
    }
    let mut model = train_logreg(&standardized, labels, config)?;

    // w_raw = w/σ and b_raw = b − Σ w·μ/σ give the identical decision
    // function over unstandardized inputs.
    let params = model.param_vector();
    let mut raw = Vec::with_capacity(d + 1);
    let mut bias = params[d];
    for j in 0..d {
        raw.push(params[j] / scale[j]);
        bias -= params[j] * mean[j] / scale[j];
    }
    raw.push(bias);
    model.set_param_vector(&raw)?;
    Ok(model)
}

/// Split a fold's training articles into a sub-train set and an internal
/// dev set (last fifth, at least one article) used only to pick τ.
pub(crate) fn carve_internal_dev<'a>(train: &'a [&'a str]) -> (&'a [&'a str], &'a [&'a str]) {
    let n_dev = (train.len() / 5).max(1).min(train.len());
    let cut = train.len() - n_dev;
    let (sub, dev) = train.split_at(cut);
    if sub.is_empty() {
        (dev, dev)
    } else {
        (sub, dev)
    }
}

/// Gold labels restricted to retained sentences; every retained sentence
/// must be labeled, and labels on filtered sentences are dropped with a
/// warning (they carry no features and are never predicted).
pub(crate) fn retained_gold(
    docs: &DocumentSet,
    gold: &BTreeMap<SentenceKey, bool>,
) -> Result<BTreeMap<SentenceKey, bool>> {
    let mut kept = BTreeMap::new();
    for key in docs.retained_keys() {
        match gold.get(&key) {
            Some(&label) => {
                kept.insert(key, label);
            }
            None => {
                return Err(Error::InvalidInput(format!(
                    "no gold label for retained sentence {}:{}",
                    key.0, key.1
                )));
            }
        }
    }
    let dropped = gold.len() - kept.len();
    if dropped > 0 {
        log::warn!("{dropped} gold labels sit on filtered sentences; ignored");
    }
    Ok(kept)
}

pub struct SlcOutcome {
    pub fold_taus: Vec<f64>,
    pub fold_scores: Vec<BinaryScore>,
    pub heldout: BinaryScore,
    pub ensemble_columns: usize,
    pub ensemble: BinaryScore,
    pub final_score: BinaryScore,
    pub flipped: usize,
    pub report_path: PathBuf,
}

pub fn run_slc(config: &PipelineConfig) -> Result<SlcOutcome> {
    config.validate()?;
    let gold_path = config
        .slc_labels
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("run-slc needs slc_labels".into()))?;
    let inputs = load_inputs(config)?;
    let gold = retained_gold(&inputs.docs, &load_slc_labels(gold_path, &inputs.docs)?)?;

    let models_dir = config.out_dir.join("models");
    let preds_dir = config.out_dir.join("preds");
    let reports_dir = config.out_dir.join("reports");
    for dir in [&models_dir, &preds_dir, &reports_dir] {
        ensure_dir(dir)?;
    }

    let lda = fit_topics(config, &inputs.docs)?;
    if let Some(model) = &lda {
        model.save(&models_dir.join("lda.model"))?;
    }
    let features = assemble_corpus_features(config, &inputs, lda.as_ref())?;

    let ids = inputs.docs.article_ids();
    let plan = make_folds(&ids, config.slc_folds, substream_seed(config.seed, "folds/slc"))?;

    let mut fold_taus = Vec::new();
    let mut fold_scores = Vec::new();
    let mut heldout_preds: BTreeMap<SentenceKey, bool> = BTreeMap::new();
    let mut native_columns: Vec<BTreeMap<SentenceKey, bool>> = Vec::new();
    let mut native_f1: Vec<f64> = Vec::new();

    for fold in 0..plan.k() {
        let (held, train) = plan.split(fold);
        let (sub_train, dev) = carve_internal_dev(&train);

        let mut train_x = Vec::new();
        let mut train_y = Vec::new();
        for (key, fv) in &features {
            if sub_train.contains(&key.0.as_str()) {
                train_x.push(fv.clone());
                train_y.push(gold[key]);
            }
        }
        let model = train_scaled_logreg(&train_x, &train_y, &LogRegConfig::default())?;
        model.save(&models_dir.join(format!("slc_fold{}.model", fold + 1)))?;

        // Pick τ by F1 on the internal dev articles; grid order wins ties.
        let mut dev_probs = Vec::new();
        for (key, fv) in &features {
            if dev.contains(&key.0.as_str()) {
                dev_probs.push((model.predict_proba(fv)?, gold[key]));
            }
        }
        let mut best: Option<(f64, f64)> = None; // (f1, tau)
        for &tau in &config.tau_grid {
            let rule = DecisionRule::new(tau)?;
            let mut score = BinaryScore::default();
            for &(prob, label) in &dev_probs {
                match (rule.decide(prob), label) {
                    (true, true) => score.true_positives += 1,
                    (true, false) => score.false_positives += 1,
                    (false, true) => score.false_negatives += 1,
                    (false, false) => {}
                }
            }
            let f1 = score.f1();
            if best.map_or(true, |(bf, _)| f1 > bf) {
                best = Some((f1, tau));
            }
        }
        let (dev_f1, tau) = best.expect("non-empty tau grid");
        let rule = DecisionRule::new(tau)?;
        fold_taus.push(tau);
        native_f1.push(dev_f1);

        // Predict the whole corpus with this fold's model: the full column
        // feeds the pooled ensemble, the held-out slice is scored honestly.
        let mut full = BTreeMap::new();
        let mut column = BTreeMap::new();
        for (key, fv) in &features {
            let prob = model.predict_proba(fv)?;
            let label = rule.decide(prob);
            full.insert(key.clone(), SentencePrediction { label, prob });
            column.insert(key.clone(), label);
        }
        write_sentence_predictions(
            &preds_dir.join(format!("slc_fold{}_native.tsv", fold + 1)),
            &full,
        )?;

        let mut held_pred = BTreeMap::new();
        let mut held_gold = BTreeMap::new();
        for (key, &label) in &gold {
            if held.contains(&key.0.as_str()) {
                held_pred.insert(key.clone(), column[key]);
                held_gold.insert(key.clone(), label);
            }
        }
        fold_scores.push(slc_scores(&held_pred, &held_gold)?);
        heldout_preds.extend(held_pred);
        native_columns.push(column);
    }

    // Cross-validated predictions: each sentence predicted by the one fold
    // that held its article out.
    let heldout_score = slc_scores(&heldout_preds, &gold)?;
    {
        let mut rows = BTreeMap::new();
        for (key, &label) in &heldout_preds {
            rows.insert(key.clone(), SentencePrediction { label, prob: if label { 1.0 } else { 0.0 } });
        }
        write_sentence_predictions(&preds_dir.join("slc_heldout.tsv"), &rows)?;
    }

    // Pool the per-fold roster (native + any external columns) into one
    // wide ensemble.
    let mut ensemble_config = EnsembleConfig {
        mode: config.mode,
        relax_fraction: config.relax_fraction,
        model_dev_f1: BTreeMap::new(),
    };
    for (fold, f1) in native_f1.iter().enumerate() {
        ensemble_config
            .model_dev_f1
            .insert(format!("fold{}:native", fold + 1), *f1);
    }
    let mut externals: Vec<(String, BTreeMap<SentenceKey, bool>)> = Vec::new();
    if let Some(manifest_path) = &config.manifest {
        let manifest = load_manifest(manifest_path)?;
        if let Some(mode) = manifest.mode {
            ensemble_config.mode = mode;
        }
        if let Some(fraction) = manifest.relax_fraction {
            ensemble_config.relax_fraction = fraction;
        }
        for column in &manifest.columns {
            let preds =
                propdetect_core::models::load_sentence_predictions(&column.path, &inputs.docs)?;
            let labels: BTreeMap<SentenceKey, bool> =
                preds.into_iter().map(|(k, p)| (k, p.label)).collect();
            if let Some(f1) = column.dev_f1 {
                ensemble_config.model_dev_f1.insert(column.model_id.clone(), f1);
            }
            externals.push((column.model_id.clone(), labels));
        }
    }
    let per_fold: Vec<Vec<(String, BTreeMap<SentenceKey, bool>)>> = native_columns
        .iter()
        .map(|native| {
            let mut roster = vec![("native".to_string(), native.clone())];
            roster.extend(externals.iter().cloned());
            roster
        })
        .collect();
    let (matrix, ensemble_labels) = ensemble_plus(&per_fold, &ensemble_config)?;
    let ensemble_columns = matrix.model_count();
    let vote_fraction = |key: &SentenceKey| {
        let votes = matrix.votes(key).expect("matrix covers all keys");
        votes.iter().filter(|v| **v).count() as f64 / votes.len() as f64
    };
    {
        let mut rows = BTreeMap::new();
        for (key, &label) in &ensemble_labels {
            rows.insert(key.clone(), SentencePrediction { label, prob: vote_fraction(key) });
        }
        write_sentence_predictions(&preds_dir.join("slc_ensemble.tsv"), &rows)?;
    }
    let ensemble_score = slc_scores(&ensemble_labels, &gold)?;

    // Optional repetition postprocess on top of the ensemble output.
    let mut final_labels = ensemble_labels.clone();
    let mut flipped_total = 0usize;
    if config.postprocess {
        let table = inputs.embeddings.as_ref().expect("validated in load_inputs");
        for doc in inputs.docs.iter() {
            let mut embeddings = BTreeMap::new();
            let mut labels = BTreeMap::new();
            for sentence in doc.retained_sentences() {
                let key = (doc.article_id.clone(), sentence.index);
                embeddings.insert(sentence.index, sentence_embedding(sentence, table));
                labels.insert(sentence.index, final_labels[&key]);
            }
            let (updated, flipped) =
                repetition_postprocess(doc, &embeddings, &labels, config.window, config.lambda)?;
            flipped_total += flipped.len();
            for (index, label) in updated {
                final_labels.insert((doc.article_id.clone(), index), label);
            }
        }
    }
    {
        let mut rows = BTreeMap::new();
        for (key, &label) in &final_labels {
            rows.insert(key.clone(), SentencePrediction { label, prob: vote_fraction(key) });
        }
        write_sentence_predictions(&preds_dir.join("slc_final.tsv"), &rows)?;
    }
    let final_score = slc_scores(&final_labels, &gold)?;

    // Reports and the canonical config echo.
    let fold_report = score_folds(&fold_scores)?;
    let mut text = String::new();
    text.push_str(&format!(
        "sentence-level run: {} articles, {} labeled sentences, {} folds, seed {}\n",
        ids.len(),
        gold.len(),
        plan.k(),
        config.seed
    ));
    for (i, (score, tau)) in fold_scores.iter().zip(&fold_taus).enumerate() {
        text.push_str(&format!(
            "{} [tau {tau}]\n",
            render_binary_score(&format!("fold{}", i + 1), score)
        ));
    }
    text.push_str(&format!("{}\n", render_binary_score("pooled held-out", &fold_report.pooled)));
    text.push_str(&format!("{}\n", render_binary_score("held-out", &heldout_score)));
    text.push_str(&format!(
        "ensemble: {} columns, mode {}{}\n",
        ensemble_columns,
        ensemble_config.mode.name(),
        if ensemble_config.mode == propdetect_core::ensemble::VoteMode::Relax {
            format!(" (fraction {})", ensemble_config.relax_fraction)
        } else {
            String::new()
        }
    ));
    text.push_str(&format!("{}\n", render_binary_score("ensemble", &ensemble_score)));
    if config.postprocess {
        text.push_str(&format!(
            "postprocess: flipped {flipped_total} sentences (window {}, lambda {})\n",
            config.window, config.lambda
        ));
    }
    text.push_str(&format!("{}\n", render_binary_score("final", &final_score)));
    let report_path = reports_dir.join("slc_report.txt");
    write_text(&report_path, &text)?;
    write_text(&reports_dir.join("slc_heldout.tsv"), &binary_score_tsv(&heldout_score))?;
    write_text(&reports_dir.join("slc_final.tsv"), &binary_score_tsv(&final_score))?;
    write_text(&config.out_dir.join("config_used.txt"), &config.canonical_string())?;

    Ok(SlcOutcome {
        fold_taus,
        fold_scores,
        heldout: heldout_score,
        ensemble_columns,
        ensemble: ensemble_score,
        final_score,
        flipped: flipped_total,
        report_path,
    })
}

pub struct FlcOutcome {
    pub sources: usize,
    pub merged_count: usize,
    pub report: SpanScoreReport,
    pub report_path: PathBuf,
}

pub fn run_flc(config: &PipelineConfig) -> Result<FlcOutcome> {
    config.validate()?;
    let gold_path = config
        .flc_labels
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("run-flc needs flc_labels".into()))?;
    let inputs = load_inputs(config)?;
    let gold = load_flc_labels(gold_path, &inputs.docs)?;
    let techniques: Vec<String> = gold
        .iter()
        .map(|f| f.technique.clone())
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut by_article: BTreeMap<&str, Vec<Fragment>> = BTreeMap::new();
    for fragment in &gold {
        by_article
            .entry(fragment.article_id.as_str())
            .or_default()
            .push(fragment.clone());
    }

    let models_dir = config.out_dir.join("models");
    let preds_dir = config.out_dir.join("preds");
    let reports_dir = config.out_dir.join("reports");
    for dir in [&models_dir, &preds_dir, &reports_dir] {
        ensure_dir(dir)?;
    }

    let ids = inputs.docs.article_ids();
    let plan = make_folds(&ids, config.flc_folds, substream_seed(config.seed, "folds/flc"))?;
    let variants = [TokenFeatureConfig::Base, TokenFeatureConfig::Lexical];

    let mut sources: Vec<Vec<Fragment>> = Vec::new();
    let mut source_lines = Vec::new();
    for fold in 0..plan.k() {
        let (held, train) = plan.split(fold);
        for variant in variants {
            let mut examples = Vec::new();
            for id in &train {
                let doc = inputs.docs.get(id).expect("fold ids come from the corpus");
                let empty = Vec::new();
                let fragments = by_article.get(id).unwrap_or(&empty);
                for sentence in doc.retained_sentences() {
                    let tags = encode_bio(sentence, fragments);
                    examples.push(CrfExample {
                        features: token_features(sentence, variant, &inputs.lexicons),
                        tags: tags.tags,
                    });
                }
            }
            let crf_config = CrfConfig {
                seed: substream_seed(
                    config.seed,
                    &format!("crf/fold{}/{}", fold + 1, variant.name()),
                ),
                ..CrfConfig::default()
            };
            let model = train_crf(&examples, &techniques, &crf_config)?;
            model.save(&models_dir.join(format!("flc_fold{}_{}.model", fold + 1, variant.name())))?;

            let mut decoded = Vec::new();
            for id in &held {
                let doc = inputs.docs.get(id).expect("fold ids come from the corpus");
                for sentence in doc.retained_sentences() {
                    let feats = token_features(sentence, variant, &inputs.lexicons);
                    let tags = model.viterbi(&feats);
                    decoded.extend(decode_bio(&tags, sentence, id)?);
                }
            }
            decoded.sort();
            write_fragment_predictions(
                &preds_dir.join(format!("flc_fold{}_{}.tsv", fold + 1, variant.name())),
                &decoded,
            )?;

            // Honest per-source score: this source only ever saw its own
            // held-out articles, so score it against that slice of gold.
            let held_gold: Vec<Fragment> = gold
                .iter()
                .filter(|f| held.contains(&f.article_id.as_str()))
                .cloned()
                .collect();
            let micro = flc_strict_scores(&decoded, &held_gold).micro;
            source_lines.push(format!(
                "{}",
                render_binary_score(&format!("fold{} {}", fold + 1, variant.name()), &micro)
            ));
            sources.push(decoded);
        }
    }

    let merged = merge_fragments(&sources);
    write_fragment_predictions(&preds_dir.join("flc_merged.tsv"), &merged)?;
    let report = flc_strict_scores(&merged, &gold);

    let mut text = String::new();
    text.push_str(&format!(
        "fragment-level run: {} articles, {} gold fragments, {} folds × {} variants = {} sources, seed {}\n",
        ids.len(),
        gold.len(),
        plan.k(),
        variants.len(),
        sources.len(),
        config.seed
    ));
    for line in &source_lines {
        text.push_str(line);
        text.push('\n');
    }
    text.push_str(&format!("merged: {} fragments\n", merged.len()));
    text.push_str(&render_span_report(&report));
    let report_path = reports_dir.join("flc_report.txt");
    write_text(&report_path, &text)?;
    write_text(&reports_dir.join("flc_report.tsv"), &span_report_tsv(&report))?;
    write_text(&config.out_dir.join("config_used.txt"), &config.canonical_string())?;

    Ok(FlcOutcome {
        sources: sources.len(),
        merged_count: merged.len(),
        report,
        report_path,
    })
}
