//! Articles, sentences, tokens, and labelled fragments.
//!
//! Offsets are always counted in Unicode scalar values (`char`s), never
//! bytes, and spans are end-exclusive. An article file holds one sentence per
//! line; the 1-based line number is the sentence index and is never
//! renumbered, so indices stay aligned with external label files even when a
//! line is too short to be used for training.

mod bio;
mod folds;
mod labels;
mod tokenize;

pub use bio::{decode_bio, encode_bio, BioTag, TagSequence};
pub use folds::{make_folds, FoldPlan};
pub use labels::{
    load_flc_labels, load_slc_labels, write_flc_labels, write_slc_labels, LABEL_NEGATIVE,
    LABEL_POSITIVE,
};
pub use tokenize::tokenize;

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// Identifies one sentence across the whole corpus: `(article_id, index)`.
pub type SentenceKey = (String, usize);

/// Half-open range of char offsets, end-exclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    /// True when the two spans share at least one offset.
    pub fn overlaps(&self, other: &Span) -> bool {
        self.start < other.end && other.start < self.end
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub text: String,
    /// Offsets relative to the article text, not the sentence.
    pub span: Span,
    /// Coarse part-of-speech tag, when annotations were attached.
    pub pos: Option<String>,
    /// Named-entity tag, when annotations were attached.
    pub ner: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    /// 1-based line number in the article file. Stable across filtering.
    pub index: usize,
    /// Char span of the line within the article text, newline excluded.
    pub span: Span,
    pub tokens: Vec<Token>,
    /// False for sentences with fewer than two tokens; those are kept for
    /// indexing but excluded from training, prediction, and layout ranks.
    pub retained: bool,
}

/// One labelled propaganda fragment: a typed char span inside an article.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fragment {
    pub article_id: String,
    pub span: Span,
    pub technique: String,
}

impl Fragment {
    pub fn new(article_id: impl Into<String>, start: usize, end: usize, technique: impl Into<String>) -> Self {
        Fragment {
            article_id: article_id.into(),
            span: Span::new(start, end),
            technique: technique.into(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Document {
    pub article_id: String,
    /// Raw file contents, undecorated: offsets index into this as chars.
    pub text: String,
    pub sentences: Vec<Sentence>,
}

impl Document {
    /// Parse article text into indexed sentences. Line 1 is the title.
    pub fn from_text(article_id: impl Into<String>, text: impl Into<String>) -> Self {
        let article_id = article_id.into();
        let text = text.into();
        let mut sentences = Vec::new();
        let mut line_start = 0usize; // char offset
        let mut offset = 0usize;
        let mut line_text = String::new();
        let mut index = 1usize;
        for ch in text.chars() {
            if ch == '\n' {
                sentences.push(Self::make_sentence(index, line_start, &line_text));
                index += 1;
                line_text.clear();
                line_start = offset + 1;
            } else {
                line_text.push(ch);
            }
            offset += 1;
        }
        if !line_text.is_empty() {
            sentences.push(Self::make_sentence(index, line_start, &line_text));
        }
        Document {
            article_id,
            text,
            sentences,
        }
    }

    fn make_sentence(index: usize, line_start: usize, line: &str) -> Sentence {
        let mut tokens = tokenize(line);
        for tok in &mut tokens {
            tok.span.start += line_start;
            tok.span.end += line_start;
        }
        let retained = tokens.len() > 1;
        Sentence {
            index,
            span: Span::new(line_start, line_start + line.chars().count()),
            tokens,
            retained,
        }
    }

    /// Total length of the article in chars.
    pub fn char_len(&self) -> usize {
        self.text.chars().count()
    }

    pub fn sentence(&self, index: usize) -> Option<&Sentence> {
        // Indices are dense 1-based line numbers.
        self.sentences.get(index.checked_sub(1)?)
    }

    /// Sentences that take part in training and prediction, in order.
    pub fn retained_sentences(&self) -> impl Iterator<Item = &Sentence> {
        self.sentences.iter().filter(|s| s.retained)
    }

    /// 1-based rank of a retained sentence among retained sentences, and the
    /// retained total. `None` when the sentence is missing or filtered.
    pub fn retained_rank(&self, index: usize) -> Option<(usize, usize)> {
        let total = self.retained_sentences().count();
        let mut rank = 0;
        for s in self.retained_sentences() {
            rank += 1;
            if s.index == index {
                return Some((rank, total));
            }
        }
        None
    }
}

/// A corpus of articles with unique ids, iterated in id order.
#[derive(Debug, Clone, Default)]
pub struct DocumentSet {
    docs: Vec<Document>,
    by_id: HashMap<String, usize>,
}

impl DocumentSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, doc: Document) -> Result<()> {
        if self.by_id.contains_key(&doc.article_id) {
            return Err(Error::InvalidInput(format!(
                "duplicate article id `{}`",
                doc.article_id
            )));
        }
        self.by_id.insert(doc.article_id.clone(), self.docs.len());
        self.docs.push(doc);
        // Keep iteration in id order regardless of insertion order.
        self.docs.sort_by(|a, b| a.article_id.cmp(&b.article_id));
        self.by_id = self
            .docs
            .iter()
            .enumerate()
            .map(|(i, d)| (d.article_id.clone(), i))
            .collect();
        Ok(())
    }

    pub fn get(&self, article_id: &str) -> Option<&Document> {
        self.by_id.get(article_id).map(|&i| &self.docs[i])
    }

    pub fn get_mut(&mut self, article_id: &str) -> Option<&mut Document> {
        self.by_id.get(article_id).map(|&i| &mut self.docs[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = &Document> {
        self.docs.iter()
    }

    pub fn iter_mut(&mut self) -> impl Iterator<Item = &mut Document> {
        self.docs.iter_mut()
    }

    pub fn article_ids(&self) -> Vec<String> {
        self.docs.iter().map(|d| d.article_id.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }

    /// Keys of all retained sentences, in (article, index) order.
    pub fn retained_keys(&self) -> Vec<SentenceKey> {
        let mut keys = Vec::new();
        for doc in self.iter() {
            for s in doc.retained_sentences() {
                keys.push((doc.article_id.clone(), s.index));
            }
        }
        keys
    }
}

/// Load every `article<ID>.txt` under `dir`. Files must be UTF-8 with LF
/// line endings; other files in the directory are ignored.
pub fn load_articles(dir: &Path) -> Result<DocumentSet> {
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut named = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        let name = entry.file_name();
        let Some(name) = name.to_str() else { continue };
        let Some(id) = article_id_from_name(name) else {
            continue;
        };
        named.push((id.to_string(), entry.path()));
    }
    named.sort();
    let mut set = DocumentSet::new();
    for (id, path) in named {
        let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        set.insert(Document::from_text(id, text))?;
    }
    if set.is_empty() {
        return Err(Error::InvalidInput(format!(
            "no article<ID>.txt files found in {}",
            dir.display()
        )));
    }
    Ok(set)
}

fn article_id_from_name(name: &str) -> Option<&str> {
    let stem = name.strip_prefix("article")?.strip_suffix(".txt")?;
    if stem.is_empty() || !stem.chars().all(|c| c.is_alphanumeric()) {
        return None;
    }
    Some(stem)
}

/// The chars of `text` in `[start, end)`.
pub fn slice_chars(text: &str, span: Span) -> String {
    text.chars().skip(span.start).take(span.len()).collect()
}
