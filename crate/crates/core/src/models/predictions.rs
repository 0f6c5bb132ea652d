//! Prediction files: the interchange format between models and the ensemble.
//!
//! Sentence predictions are `article<TAB>sentence<TAB>label<TAB>prob` rows;
//! fragment predictions reuse the span-label TSV layout. Both readers
//! validate against a document set so a stale file fails loudly instead of
//! silently scoring zero.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use crate::corpus::{DocumentSet, Fragment, SentenceKey, LABEL_NEGATIVE, LABEL_POSITIVE};
use crate::error::{Error, Result};

/// One model's verdict on one sentence.
#[derive(Debug, Clone, PartialEq)]
pub struct SentencePrediction {
    pub label: bool,
    pub prob: f64,
}

/// Read sentence predictions, checking each row names a real retained
/// sentence and each probability is a finite value in `[0, 1]`.
pub fn load_sentence_predictions(
    path: &Path,
    docs: &DocumentSet,
) -> Result<BTreeMap<SentenceKey, SentencePrediction>> {
    let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut out = BTreeMap::new();
    for (lineno, line) in content.lines().enumerate() {
        let n = lineno + 1;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 4 {
            return Err(Error::parse(path, n, format!("expected 4 fields, got {}", fields.len())));
        }
        let article = fields[0].to_string();
        let index: usize = fields[1]
            .parse()
            .map_err(|_| Error::parse(path, n, format!("bad sentence index `{}`", fields[1])))?;
        let doc = docs
            .get(&article)
            .ok_or_else(|| Error::parse(path, n, format!("unknown article `{article}`")))?;
        if doc.sentence(index).is_none() {
            return Err(Error::parse(path, n, format!("article `{article}` has no sentence {index}")));
        }
        let label = match fields[2] {
            LABEL_POSITIVE => true,
            LABEL_NEGATIVE => false,
            other => return Err(Error::parse(path, n, format!("bad label `{other}`"))),
        };
        let prob: f64 = fields[3]
            .parse()
            .map_err(|_| Error::parse(path, n, format!("bad probability `{}`", fields[3])))?;
        if !prob.is_finite() || !(0.0..=1.0).contains(&prob) {
            return Err(Error::parse(path, n, format!("probability {prob} outside [0, 1]")));
        }
        if out.insert((article.clone(), index), SentencePrediction { label, prob }).is_some() {
            return Err(Error::parse(path, n, format!("duplicate prediction for {article}:{index}")));
        }
    }
    Ok(out)
}

/// Write sentence predictions sorted by key, probabilities in shortest
/// round-trip form so save/load/save is byte-stable.
pub fn write_sentence_predictions(
    path: &Path,
    predictions: &BTreeMap<SentenceKey, SentencePrediction>,
) -> Result<()> {
    let mut out = String::new();
    for ((article, index), p) in predictions {
        let label = if p.label { LABEL_POSITIVE } else { LABEL_NEGATIVE };
        out.push_str(&format!("{article}\t{index}\t{label}\t{}\n", p.prob));
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Read fragment predictions; format and validation match the span-label
/// reader, so offsets are checked against the documents.
pub fn load_fragment_predictions(path: &Path, docs: &DocumentSet) -> Result<Vec<Fragment>> {
    crate::corpus::load_flc_labels(path, docs)
}

pub fn write_fragment_predictions(path: &Path, fragments: &[Fragment]) -> Result<()> {
    crate::corpus::write_flc_labels(path, fragments)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Document;

    fn docs() -> DocumentSet {
        let mut set = DocumentSet::default();
        set.insert(Document::from_text("7", "Down with it all\n\nShort one here"))
            .unwrap();
        set
    }

    fn write(dir: &tempfile::TempDir, name: &str, body: &str) -> std::path::PathBuf {
        let path = dir.path().join(name);
        fs::write(&path, body).unwrap();
        path
    }

    #[test]
    fn round_trips_sentence_predictions() {
        let dir = tempfile::tempdir().unwrap();
        let mut preds = BTreeMap::new();
        preds.insert(("7".to_string(), 1), SentencePrediction { label: true, prob: 0.75 });
        preds.insert(("7".to_string(), 3), SentencePrediction { label: false, prob: 0.125 });
        let p1 = dir.path().join("a.tsv");
        write_sentence_predictions(&p1, &preds).unwrap();
        let loaded = load_sentence_predictions(&p1, &docs()).unwrap();
        assert_eq!(loaded, preds);
        let p2 = dir.path().join("b.tsv");
        write_sentence_predictions(&p2, &loaded).unwrap();
        assert_eq!(fs::read(&p1).unwrap(), fs::read(&p2).unwrap());
    }

    #[test]
    fn rejects_bad_probability_rows() {
        let dir = tempfile::tempdir().unwrap();
        let d = docs();
        for bad in ["1.5", "-0.1", "NaN", "inf", "x"] {
            let path = write(&dir, "bad.tsv", &format!("7\t1\tpropaganda\t{bad}\n"));
            assert!(load_sentence_predictions(&path, &d).is_err(), "accepted prob {bad}");
        }
    }

    #[test]
    fn rejects_unknown_sentences_labels_and_duplicates() {
        let dir = tempfile::tempdir().unwrap();
        let d = docs();
        let unknown_article = write(&dir, "u1.tsv", "9\t1\tpropaganda\t0.5\n");
        assert!(load_sentence_predictions(&unknown_article, &d).is_err());
        let unknown_sentence = write(&dir, "u2.tsv", "7\t4\tpropaganda\t0.5\n");
        assert!(load_sentence_predictions(&unknown_sentence, &d).is_err());
        let bad_label = write(&dir, "u3.tsv", "7\t1\tmaybe\t0.5\n");
        assert!(load_sentence_predictions(&bad_label, &d).is_err());
        let duplicate = write(&dir, "u4.tsv", "7\t1\tpropaganda\t0.5\n7\t1\tnon-propaganda\t0.4\n");
        assert!(load_sentence_predictions(&duplicate, &d).is_err());
        let ragged = write(&dir, "u5.tsv", "7\t1\tpropaganda\n");
        assert!(load_sentence_predictions(&ragged, &d).is_err());
    }

    #[test]
    fn blank_lines_are_skipped() {
        let dir = tempfile::tempdir().unwrap();
        let path = write(&dir, "p.tsv", "7\t1\tpropaganda\t0.9\n\n7\t3\tnon-propaganda\t0.2\n");
        let loaded = load_sentence_predictions(&path, &docs()).unwrap();
        assert_eq!(loaded.len(), 2);
    }

    #[test]
    fn fragment_predictions_share_span_validation() {
        let dir = tempfile::tempdir().unwrap();
        let d = docs();
        let ok = write(&dir, "f.tsv", "7\tLoaded_Language\t0\t4\n");
        let frags = load_fragment_predictions(&ok, &d).unwrap();
        assert_eq!(frags, vec![Fragment::new("7", 0, 4, "Loaded_Language")]);
        let oob = write(&dir, "g.tsv", "7\tLoaded_Language\t0\t9999\n");
        assert!(load_fragment_predictions(&oob, &d).is_err());
    }
}
