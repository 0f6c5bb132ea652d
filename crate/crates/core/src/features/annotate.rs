//! POS/NER token annotations. The real tags come from a sidecar file
//! produced by an external tagger over the same tokenization; for corpora
//! without one, a crude fallback tagger can fill in tags so the POS/NER
//! feature blocks stay meaningful enough to exercise the pipeline.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use crate::corpus::DocumentSet;
use crate::error::{Error, Result};

/// Parsed sidecar rows, grouped per sentence:
/// `(article_id, sentence_index) -> [(token_index, pos, ner)]`.
/// Token indices are 0-based; `ner` may be `-` for "no entity".
#[derive(Debug, Default)]
pub struct AnnotationTable {
    rows: HashMap<(String, usize), Vec<(usize, String, String)>>,
}

impl AnnotationTable {
    pub fn len(&self) -> usize {
        self.rows.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// Read `article_id TAB sentence_index TAB token_index TAB token TAB pos TAB ner`.
pub fn load_annotations(path: &Path) -> Result<AnnotationTable> {
    let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut table = AnnotationTable::default();
    for (lineno, line) in content.lines().enumerate() {
        let lineno = lineno + 1;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 6 {
            return Err(Error::parse(
                path,
                lineno,
                format!("expected 6 tab-separated fields, got {}", fields.len()),
            ));
        }
        let sentence_index: usize = fields[1]
            .parse()
            .map_err(|_| Error::parse(path, lineno, format!("bad sentence index `{}`", fields[1])))?;
        let token_index: usize = fields[2]
            .parse()
            .map_err(|_| Error::parse(path, lineno, format!("bad token index `{}`", fields[2])))?;
        table
            .rows
            .entry((fields[0].to_string(), sentence_index))
            .or_default()
            .push((token_index, fields[4].to_string(), fields[5].to_string()));
    }
    Ok(table)
}

/// Attach annotations to the tokens they address. Rows for articles or
/// sentences outside `documents` are ignored (a sidecar may cover a larger
/// corpus); a token index beyond the sentence is an error because it means
/// the sidecar was built over a different tokenization.
pub fn apply_annotations(documents: &mut DocumentSet, table: &AnnotationTable) -> Result<()> {
    for ((article_id, sentence_index), rows) in &table.rows {
        let Some(doc) = documents.get_mut(article_id) else { continue };
        let n_tokens;
        {
            let Some(sentence) = doc.sentence(*sentence_index) else { continue };
            n_tokens = sentence.tokens.len();
        }
        for (token_index, pos, ner) in rows {
            if *token_index >= n_tokens {
                return Err(Error::InvalidInput(format!(
                    "annotation for article `{article_id}` sentence {sentence_index} token {token_index} \
                     is out of range ({n_tokens} tokens); was the sidecar built on the same tokenization?"
                )));
            }
            let sentence = &mut doc.sentences[*sentence_index - 1];
            let token = &mut sentence.tokens[*token_index];
            token.pos = Some(pos.clone());
            token.ner = if ner == "-" || ner.is_empty() { None } else { Some(ner.clone()) };
        }
    }
    Ok(())
}

/// Heuristic tagger for corpora without a sidecar. Deliberately simple:
/// punctuation-only tokens are PUNCT, digit-only tokens are NUM, capitalised
/// non-initial tokens are PROPN and tagged PERSON, everything else is NOUN.
/// Only fills gaps — tokens that already carry tags keep them.
pub fn apply_fallback_tagger(documents: &mut DocumentSet) {
    for doc in documents.iter_mut() {
        for sentence in &mut doc.sentences {
            for (i, token) in sentence.tokens.iter_mut().enumerate() {
                if token.pos.is_some() {
                    continue;
                }
                let (pos, ner) = fallback_tags(&token.text, i);
                token.pos = Some(pos.to_string());
                token.ner = ner.map(str::to_string);
            }
        }
    }
}

fn fallback_tags(text: &str, token_index: usize) -> (&'static str, Option<&'static str>) {
    if !text.chars().any(|c| c.is_alphanumeric()) {
        ("PUNCT", None)
    } else if text.chars().all(|c| c.is_ascii_digit()) {
        ("NUM", None)
    } else if token_index > 0 && text.chars().next().is_some_and(|c| c.is_uppercase()) {
        ("PROPN", Some("PERSON"))
    } else {
        ("NOUN", None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Document;

    fn corpus() -> DocumentSet {
        let mut set = DocumentSet::new();
        set.insert(Document::from_text("9", "Some Title\nJohn met Mary yesterday !\n")).unwrap();
        set
    }

    #[test]
    fn sidecar_rows_attach_to_tokens() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("anno.tsv");
        fs::write(
            &path,
            "9\t2\t0\tJohn\tPROPN\tPERSON\n9\t2\t1\tmet\tVERB\t-\n9\t2\t4\t!\tPUNCT\t-\n",
        )
        .unwrap();
        let table = load_annotations(&path).unwrap();
        assert_eq!(table.len(), 3);
        let mut docs = corpus();
        apply_annotations(&mut docs, &table).unwrap();
        let s = docs.get("9").unwrap().sentence(2).unwrap();
        assert_eq!(s.tokens[0].pos.as_deref(), Some("PROPN"));
        assert_eq!(s.tokens[0].ner.as_deref(), Some("PERSON"));
        assert_eq!(s.tokens[1].pos.as_deref(), Some("VERB"));
        assert_eq!(s.tokens[1].ner, None);
        assert_eq!(s.tokens[2].pos, None); // untouched
    }

    #[test]
    fn rows_for_unknown_articles_are_ignored() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("anno.tsv");
        fs::write(&path, "404\t1\t0\tword\tNOUN\t-\n9\t99\t0\tword\tNOUN\t-\n").unwrap();
        let table = load_annotations(&path).unwrap();
        let mut docs = corpus();
        apply_annotations(&mut docs, &table).unwrap();
    }

    #[test]
    fn out_of_range_token_index_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("anno.tsv");
        fs::write(&path, "9\t2\t50\tword\tNOUN\t-\n").unwrap();
        let table = load_annotations(&path).unwrap();
        let mut docs = corpus();
        assert!(apply_annotations(&mut docs, &table).is_err());
    }

    #[test]
    fn fallback_tagger_fills_only_gaps() {
        let mut docs = corpus();
        {
            let doc = docs.get_mut("9").unwrap();
            doc.sentences[1].tokens[0].pos = Some("X".to_string());
        }
        apply_fallback_tagger(&mut docs);
        let s = docs.get("9").unwrap().sentence(2).unwrap();
        assert_eq!(s.tokens[0].pos.as_deref(), Some("X")); // preserved
        assert_eq!(s.tokens[2].pos.as_deref(), Some("PROPN")); // "Mary", non-initial cap
        assert_eq!(s.tokens[2].ner.as_deref(), Some("PERSON"));
        assert_eq!(s.tokens[3].pos.as_deref(), Some("NOUN")); // "yesterday"
        assert_eq!(s.tokens[4].pos.as_deref(), Some("PUNCT")); // "!"
        // Sentence-initial capitalised token is not guessed as a name.
        let title = docs.get("9").unwrap().sentence(1).unwrap();
        assert_eq!(title.tokens[0].pos.as_deref(), Some("NOUN"));
    }
}
