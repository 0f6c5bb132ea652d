//! Sentence feature extraction.
//!
//! Each extractor turns a sentence (plus whatever resources it needs) into a
//! named block of real-valued features. [`assemble_features`] concatenates
//! the enabled blocks in a fixed order — embedding, linguistic, layout,
//! topical — and stamps the result with a schema id so that models refuse
//! vectors built under a different configuration.

mod annotate;
mod embedding;
mod extract;
mod lexicons;

pub use annotate::{apply_annotations, apply_fallback_tagger, load_annotations, AnnotationTable};
pub use embedding::{cosine, load_word_vectors, sentence_embedding, EmbeddingTable};
pub use extract::{
    char_features, emotion_features, layout_features, loaded_word_features, multi_meaning_features,
    pos_ner_features, readability_features, sentiment_features, syllable_count, COARSE_POS_TAGS,
    SELECTED_NER_TAGS,
};
pub use lexicons::{Emotion, Lexicons};

use crate::corpus::{Document, Sentence};
use crate::error::{Error, Result};

/// Ordered, named, finite feature values. Equality of `schema_id` implies an
/// identical name list in identical order.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    schema_id: String,
    names: Vec<String>,
    values: Vec<f64>,
}

impl FeatureVector {
    pub fn new(schema_id: impl Into<String>) -> Self {
        FeatureVector {
            schema_id: schema_id.into(),
            names: Vec::new(),
            values: Vec::new(),
        }
    }

    /// Append one feature. Names must be unique and values finite; both are
    /// library bugs when violated, not data errors.
    pub fn push(&mut self, name: impl Into<String>, value: f64) {
        let name = name.into();
        debug_assert!(
            !self.names.contains(&name),
            "duplicate feature name `{name}`"
        );
        assert!(value.is_finite(), "non-finite value for feature `{name}`");
        self.names.push(name);
        self.values.push(value);
    }

    /// Append every feature of `block`, keeping its names.
    pub fn extend_from(&mut self, block: FeatureVector) {
        for (name, value) in block.names.into_iter().zip(block.values) {
            self.push(name, value);
        }
    }

    pub fn schema_id(&self) -> &str {
        &self.schema_id
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Value by name, mostly for tests.
    pub fn get(&self, name: &str) -> Option<f64> {
        self.names.iter().position(|n| n == name).map(|i| self.values[i])
    }

    /// Rebuild from parallel slices (used when reading feature files).
    pub fn from_parts(schema_id: impl Into<String>, names: Vec<String>, values: Vec<f64>) -> Result<Self> {
        if names.len() != values.len() {
            return Err(Error::DimensionMismatch {
                expected: names.len(),
                actual: values.len(),
            });
        }
        let mut fv = FeatureVector::new(schema_id);
        for (n, v) in names.into_iter().zip(values) {
            if !v.is_finite() {
                return Err(Error::InvalidInput(format!("non-finite value for feature `{n}`")));
            }
            fv.push(n, v);
        }
        Ok(fv)
    }
}

/// Which feature families go into the assembled vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FeatureToggles {
    pub embedding: bool,
    pub linguistic: bool,
    pub layout: bool,
    pub topical: bool,
}

impl Default for FeatureToggles {
    fn default() -> Self {
        FeatureToggles {
            embedding: true,
            linguistic: true,
            layout: true,
            topical: true,
        }
    }
}

impl FeatureToggles {
    /// Stable schema identifier. `embedding_dim` is 0 when embeddings are
    /// disabled; any other toggle contributes a fixed feature list, so the
    /// id pins the exact vector layout.
    pub fn schema_id(&self, embedding_dim: usize) -> String {
        let dim = if self.embedding { embedding_dim } else { 0 };
        format!(
            "v1:emb={}:ling={}:layout={}:topic={}",
            dim,
            u8::from(self.linguistic),
            u8::from(self.layout),
            u8::from(self.topical)
        )
    }
}

/// Everything `assemble_features` needs besides the sentence itself.
pub struct FeatureContext<'a> {
    pub lexicons: &'a Lexicons,
    pub embeddings: Option<&'a EmbeddingTable>,
    /// Precomputed topical block for this sentence, when topical features
    /// are enabled (they come from the topics module, which sits above).
    pub topical: Option<FeatureVector>,
}

/// Concatenate the enabled feature blocks for one retained sentence.
pub fn assemble_features(
    sentence: &Sentence,
    document: &Document,
    toggles: &FeatureToggles,
    ctx: FeatureContext<'_>,
) -> Result<FeatureVector> {
    if !sentence.retained {
        return Err(Error::InvalidInput(format!(
            "sentence {} of article `{}` is filtered; no features for it",
            sentence.index, document.article_id
        )));
    }
    let dim = ctx.embeddings.map_or(0, |t| t.dimension());
    let mut fv = FeatureVector::new(toggles.schema_id(dim));
    if toggles.embedding {
        let table = ctx.embeddings.ok_or_else(|| {
            Error::InvalidInput("embedding features enabled but no word vectors loaded".into())
        })?;
        for (i, v) in sentence_embedding(sentence, table).iter().enumerate() {
            fv.push(format!("emb.{i}"), *v);
        }
    }
    if toggles.linguistic {
        fv.extend_from(char_features(sentence));
        fv.extend_from(readability_features(sentence));
        fv.extend_from(sentiment_features(sentence, ctx.lexicons));
        fv.extend_from(emotion_features(sentence, ctx.lexicons));
        fv.extend_from(loaded_word_features(sentence, ctx.lexicons));
        fv.extend_from(multi_meaning_features(sentence, ctx.lexicons));
        fv.extend_from(pos_ner_features(sentence));
    }
    if toggles.layout {
        fv.extend_from(layout_features(sentence, document)?);
    }
    if toggles.topical {
        let block = ctx.topical.ok_or_else(|| {
            Error::InvalidInput("topical features enabled but no topic block supplied".into())
        })?;
        fv.extend_from(block);
    }
    Ok(fv)
}
