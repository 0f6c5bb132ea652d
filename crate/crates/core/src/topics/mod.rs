//! A small LDA topic model, trained by collapsed Gibbs sampling, whose only
//! job is to say which topic dominates a sentence, its neighbours, and its
//! article. Those agreements become three binary features.
//!
//! Documents are preprocessed the same way at train and inference time:
//! lowercase, drop tokens shorter than three chars, drop stopwords; the
//! training vocabulary additionally drops corpus hapaxes (count < 2).

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::Path;

use rand::Rng;
use rand_chacha::ChaCha20Rng;

use crate::corpus::{Document, DocumentSet, Sentence};
use crate::error::{Error, Result};
use crate::features::FeatureVector;
use crate::seeding::substream;

/// Common English function words excluded from topic modelling.
pub const STOPWORDS: [&str; 105] = [
    "about", "above", "after", "again", "against", "all", "and", "any", "are", "because", "been",
    "before", "being", "below", "between", "both", "but", "can", "did", "does", "doing", "down",
    "during", "each", "few", "for", "from", "further", "had", "has", "have", "having", "her",
    "here", "hers", "herself", "him", "himself", "his", "how", "into", "its", "itself", "just",
    "more", "most", "myself", "nor", "not", "now", "off", "once", "only", "other", "our", "ours",
    "ourselves", "out", "over", "own", "same", "she", "should", "some", "such", "than", "that",
    "the", "their", "theirs", "them", "themselves", "then", "there", "these", "they", "this",
    "those", "through", "too", "under", "until", "very", "was", "were", "what", "when", "where",
    "which", "while", "who", "whom", "why", "will", "with", "would", "you", "your", "yours",
    "yourself", "yourselves", "could", "might", "must", "shall",
];

/// Lowercase, drop short tokens and stopwords. Applied before both training
/// and inference.
pub fn prepare_tokens<'a, I: IntoIterator<Item = &'a str>>(tokens: I) -> Vec<String> {
    tokens
        .into_iter()
        .map(str::to_lowercase)
        .filter(|t| t.chars().count() >= 3 && !STOPWORDS.contains(&t.as_str()))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LdaParams {
    pub topics: usize,
    pub alpha: f64,
    pub beta: f64,
    /// Gibbs sweeps over the whole corpus during training.
    pub iterations: usize,
    /// Gibbs sweeps per document at inference time.
    pub inference_passes: usize,
    pub seed: u64,
}

impl LdaParams {
    /// The defaults used by the pipeline: `alpha = 50 / K`, `beta = 0.01`,
    /// 500 training sweeps, 50 inference passes.
    pub fn with_topics(topics: usize, seed: u64) -> Self {
        LdaParams {
            topics,
            alpha: 50.0 / topics as f64,
            beta: 0.01,
            iterations: 500,
            inference_passes: 50,
            seed,
        }
    }
}

/// Trained topic-word statistics, frozen after fitting.
#[derive(Debug, Clone, PartialEq)]
pub struct LdaModel {
    topics: usize,
    alpha: f64,
    beta: f64,
    seed: u64,
    inference_passes: usize,
    vocab: Vec<String>,
    vocab_index: HashMap<String, usize>,
    /// topics × vocab, row-major.
    topic_word: Vec<u32>,
    topic_totals: Vec<u32>,
}

/// Per-topic membership weights for one piece of text; they sum to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct TopicProportions {
    pub weights: Vec<f64>,
}

impl TopicProportions {
    /// Index of the largest weight, lowest index on ties.
    pub fn dominant_topic(&self) -> usize {
        let mut best = 0;
        for (i, w) in self.weights.iter().enumerate() {
            if *w > self.weights[best] {
                best = i;
            }
        }
        best
    }
}

/// Fit on a whole corpus: each article's retained sentences form one
/// training document.
pub fn fit_lda(documents: &DocumentSet, params: &LdaParams) -> Result<LdaModel> {
    let docs: Vec<Vec<String>> = documents.iter().map(article_tokens).collect();
    fit_lda_tokens(&docs, params)
}

fn article_tokens(doc: &Document) -> Vec<String> {
    doc.retained_sentences()
        .flat_map(|s| s.tokens.iter().map(|t| t.text.as_str()))
        .map(str::to_string)
        .collect()
}

/// Fit on raw token documents. Preprocessing and the hapax filter happen
/// here, so callers pass tokens as they appear in text.
pub fn fit_lda_tokens(documents: &[Vec<String>], params: &LdaParams) -> Result<LdaModel> {
    if params.topics < 2 {
        return Err(Error::InvalidInput(format!(
            "topic count must be at least 2, got {}",
            params.topics
        )));
    }
    if !(params.alpha > 0.0) || !(params.beta > 0.0) {
        return Err(Error::InvalidInput("alpha and beta must be positive".into()));
    }
    let prepared: Vec<Vec<String>> = documents
        .iter()
        .map(|d| prepare_tokens(d.iter().map(String::as_str)))
        .collect();
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for doc in &prepared {
        for tok in doc {
            *counts.entry(tok).or_default() += 1;
        }
    }
    let vocab: Vec<String> = counts
        .iter()
        .filter(|(_, &c)| c >= 2)
        .map(|(t, _)| t.to_string())
        .collect(); // BTreeMap iteration: already sorted
    if vocab.is_empty() {
        return Err(Error::InvalidInput(
            "topic model vocabulary is empty after preprocessing; corpus too small or too sparse".into(),
        ));
    }
    let vocab_index: HashMap<String, usize> =
        vocab.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
    let docs_ids: Vec<Vec<usize>> = prepared
        .iter()
        .map(|d| d.iter().filter_map(|t| vocab_index.get(t).copied()).collect())
        .collect();

    let k = params.topics;
    let v = vocab.len();
    let mut topic_word = vec![0u32; k * v];
    let mut topic_totals = vec![0u32; k];
    let mut doc_topic: Vec<Vec<u32>> = docs_ids.iter().map(|_| vec![0u32; k]).collect();
    let mut rng = substream(params.seed, "lda/train");

    // Uniform random initial assignments.
    let mut z: Vec<Vec<usize>> = Vec::with_capacity(docs_ids.len());
    for (d, ids) in docs_ids.iter().enumerate() {
        let mut zd = Vec::with_capacity(ids.len());
        for &w in ids {
            let t = rng.gen_range(0..k);
            topic_word[t * v + w] += 1;
            topic_totals[t] += 1;
            doc_topic[d][t] += 1;
            zd.push(t);
        }
        z.push(zd);
    }

    let vbeta = v as f64 * params.beta;
    let mut weights = vec![0.0f64; k];
    for _ in 0..params.iterations {
        for (d, ids) in docs_ids.iter().enumerate() {
            for (i, &w) in ids.iter().enumerate() {
                let old = z[d][i];
                topic_word[old * v + w] -= 1;
                topic_totals[old] -= 1;
                doc_topic[d][old] -= 1;
                for (t, wt) in weights.iter_mut().enumerate() {
                    *wt = (f64::from(doc_topic[d][t]) + params.alpha)
                        * (f64::from(topic_word[t * v + w]) + params.beta)
                        / (f64::from(topic_totals[t]) + vbeta);
                }
                let new = sample_index(&weights, &mut rng);
                z[d][i] = new;
                topic_word[new * v + w] += 1;
                topic_totals[new] += 1;
                doc_topic[d][new] += 1;
            }
        }
    }

    debug_assert_eq!(
        topic_totals.iter().map(|&c| u64::from(c)).sum::<u64>(),
        docs_ids.iter().map(|d| d.len() as u64).sum::<u64>()
    );
    Ok(LdaModel {
        topics: k,
        alpha: params.alpha,
        beta: params.beta,
        seed: params.seed,
        inference_passes: params.inference_passes,
        vocab,
        vocab_index,
        topic_word,
        topic_totals,
    })
}

/// Draw an index proportional to non-negative `weights`.
fn sample_index(weights: &[f64], rng: &mut ChaCha20Rng) -> usize {
    let total: f64 = weights.iter().sum();
    let mut u = rng.gen::<f64>() * total;
    for (i, w) in weights.iter().enumerate() {
        u -= w;
        if u <= 0.0 {
            return i;
        }
    }
    weights.len() - 1
}

impl LdaModel {
    pub fn topics(&self) -> usize {
        self.topics
    }

    pub fn vocab_len(&self) -> usize {
        self.vocab.len()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Topic proportions for a token list, via Gibbs sweeps against the
    /// frozen topic-word counts. Texts with no in-vocabulary token get the
    /// uniform distribution. Deterministic per input: the sampler is
    /// re-seeded from the model seed on every call.
    pub fn infer(&self, tokens: &[String]) -> TopicProportions {
        let prepared = prepare_tokens(tokens.iter().map(String::as_str));
        let ids: Vec<usize> = prepared
            .iter()
            .filter_map(|t| self.vocab_index.get(t).copied())
            .collect();
        let k = self.topics;
        if ids.is_empty() {
            return TopicProportions {
                weights: vec![1.0 / k as f64; k],
            };
        }
        let v = self.vocab.len();
        let vbeta = v as f64 * self.beta;
        let mut rng = substream(self.seed, "lda/infer");
        let mut local = vec![0u32; k];
        let mut z: Vec<usize> = ids
            .iter()
            .map(|_| {
                let t = rng.gen_range(0..k);
                local[t] += 1;
                t
            })
            .collect();
        let mut weights = vec![0.0f64; k];
        for _ in 0..self.inference_passes {
            for (i, &w) in ids.iter().enumerate() {
                let old = z[i];
                local[old] -= 1;
                for (t, wt) in weights.iter_mut().enumerate() {
                    *wt = (f64::from(local[t]) + self.alpha)
                        * (f64::from(self.topic_word[t * v + w]) + self.beta)
                        / (f64::from(self.topic_totals[t]) + vbeta);
                }
                let new = sample_index(&weights, &mut rng);
                z[i] = new;
                local[new] += 1;
            }
        }
        let n = ids.len() as f64;
        let denom = n + k as f64 * self.alpha;
        TopicProportions {
            weights: local
                .iter()
                .map(|&c| (f64::from(c) + self.alpha) / denom)
                .collect(),
        }
    }

    /// Plain-text persistence; loading reproduces the file byte for byte.
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut out = String::new();
        out.push_str("propdetect-lda v1\n");
        out.push_str(&format!("k\t{}\n", self.topics));
        out.push_str(&format!("alpha\t{}\n", self.alpha));
        out.push_str(&format!("beta\t{}\n", self.beta));
        out.push_str(&format!("seed\t{}\n", self.seed));
        out.push_str(&format!("passes\t{}\n", self.inference_passes));
        out.push_str(&format!("vocab\t{}\n", self.vocab.len()));
        for t in &self.vocab {
            out.push_str(&format!("v\t{t}\n"));
        }
        for t in 0..self.topics {
            let row: Vec<String> = self.topic_word[t * self.vocab.len()..(t + 1) * self.vocab.len()]
                .iter()
                .map(u32::to_string)
                .collect();
            out.push_str(&format!("row\t{}\t{}\n", t, row.join(" ")));
        }
        fs::write(path, out).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut lines = content.lines().enumerate();
        let mut next = |what: &str| {
            lines
                .next()
                .ok_or_else(|| Error::parse(path, 0, format!("missing {what}")))
        };
        let (_, magic) = next("header")?;
        if magic != "propdetect-lda v1" {
            return Err(Error::parse(path, 1, "not a topic model file"));
        }
        let mut field = |name: &str| -> Result<String> {
            let (lineno, line) = next(name)?;
            let (key, value) = line
                .split_once('\t')
                .ok_or_else(|| Error::parse(path, lineno + 1, format!("expected `{name}<TAB>value`")))?;
            if key != name {
                return Err(Error::parse(path, lineno + 1, format!("expected field `{name}`, got `{key}`")));
            }
            Ok(value.to_string())
        };
        let parse_err = |lineno: usize, what: &str| Error::parse(path, lineno, what.to_string());
        let topics: usize = field("k")?.parse().map_err(|_| parse_err(2, "bad k"))?;
        let alpha: f64 = field("alpha")?.parse().map_err(|_| parse_err(3, "bad alpha"))?;
        let beta: f64 = field("beta")?.parse().map_err(|_| parse_err(4, "bad beta"))?;
        let seed: u64 = field("seed")?.parse().map_err(|_| parse_err(5, "bad seed"))?;
        let inference_passes: usize = field("passes")?.parse().map_err(|_| parse_err(6, "bad passes"))?;
        let vocab_len: usize = field("vocab")?.parse().map_err(|_| parse_err(7, "bad vocab size"))?;
        let mut vocab = Vec::with_capacity(vocab_len);
        for _ in 0..vocab_len {
            let (lineno, line) = next("vocab entry")?;
            let Some(token) = line.strip_prefix("v\t") else {
                return Err(Error::parse(path, lineno + 1, "expected `v<TAB>token`"));
            };
            vocab.push(token.to_string());
        }
        let mut topic_word = vec![0u32; topics * vocab_len];
        for t in 0..topics {
            let (lineno, line) = next("count row")?;
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 3 || fields[0] != "row" {
                return Err(Error::parse(path, lineno + 1, "expected `row<TAB>t<TAB>counts`"));
            }
            let row_idx: usize = fields[1]
                .parse()
                .map_err(|_| Error::parse(path, lineno + 1, "bad row index"))?;
            if row_idx != t {
                return Err(Error::parse(path, lineno + 1, format!("expected row {t}, got {row_idx}")));
            }
            let values: Vec<&str> = fields[2].split(' ').collect();
            if values.len() != vocab_len {
                return Err(Error::parse(
                    path,
                    lineno + 1,
                    format!("row has {} counts, expected {vocab_len}", values.len()),
                ));
            }
            for (w, val) in values.iter().enumerate() {
                topic_word[t * vocab_len + w] = val
                    .parse()
                    .map_err(|_| Error::parse(path, lineno + 1, format!("bad count `{val}`")))?;
            }
        }
        let topic_totals: Vec<u32> = (0..topics)
            .map(|t| topic_word[t * vocab_len..(t + 1) * vocab_len].iter().sum())
            .collect();
        let vocab_index = vocab.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        Ok(LdaModel {
            topics,
            alpha,
            beta,
            seed,
            inference_passes,
            vocab,
            vocab_index,
            topic_word,
            topic_totals,
        })
    }
}

/// Dominant topics for an article and each of its retained sentences,
/// computed once so per-sentence feature extraction is a lookup.
#[derive(Debug, Clone)]
pub struct DocumentTopics {
    pub article_topic: usize,
    /// sentence index → dominant topic, retained sentences only.
    pub sentence_topics: BTreeMap<usize, usize>,
}

impl DocumentTopics {
    pub fn compute(document: &Document, model: &LdaModel) -> Self {
        let article_topic = model.infer(&article_tokens(document)).dominant_topic();
        let sentence_topics = document
            .retained_sentences()
            .map(|s| {
                let toks: Vec<String> = s.tokens.iter().map(|t| t.text.clone()).collect();
                (s.index, model.infer(&toks).dominant_topic())
            })
            .collect();
        DocumentTopics {
            article_topic,
            sentence_topics,
        }
    }
}

/// The three topical agreement bits for one sentence: does its dominant
/// topic match the article's, the next retained sentence's, the previous
/// one's? Missing neighbours count as disagreement.
pub fn topical_features_from(topics: &DocumentTopics, sentence_index: usize) -> Result<FeatureVector> {
    let Some(&own) = topics.sentence_topics.get(&sentence_index) else {
        return Err(Error::InvalidInput(format!(
            "no topic computed for sentence {sentence_index}; is it retained?"
        )));
    };
    let prev = topics
        .sentence_topics
        .range(..sentence_index)
        .next_back()
        .map(|(_, &t)| t);
    let next = topics
        .sentence_topics
        .range(sentence_index + 1..)
        .next()
        .map(|(_, &t)| t);
    let mut fv = FeatureVector::new("topic");
    fv.push("topic.match_article", f64::from(own == topics.article_topic));
    fv.push("topic.match_next", f64::from(next == Some(own)));
    fv.push("topic.match_prev", f64::from(prev == Some(own)));
    Ok(fv)
}

/// Convenience wrapper when only one sentence is needed.
pub fn topical_features(
    sentence: &Sentence,
    document: &Document,
    model: &LdaModel,
) -> Result<FeatureVector> {
    let topics = DocumentTopics::compute(document, model);
    topical_features_from(&topics, sentence.index)
}
