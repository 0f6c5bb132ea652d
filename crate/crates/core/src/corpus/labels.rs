//! Tab-separated label files for both tasks.
//!
//! Fragment labels: `article_id TAB technique TAB start TAB end`, offsets in
//! chars, end-exclusive. Sentence labels: `article_id TAB sentence_index TAB
//! label` with the labels spelled `propaganda` / `non-propaganda`.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use super::{DocumentSet, Fragment, SentenceKey, Span};
use crate::error::{Error, Result};

pub const LABEL_POSITIVE: &str = "propaganda";
pub const LABEL_NEGATIVE: &str = "non-propaganda";

/// Read fragment labels and check each against the corpus: the article must
/// exist and the span must fit inside it. Duplicate rows are kept.
pub fn load_flc_labels(path: &Path, documents: &DocumentSet) -> Result<Vec<Fragment>> {
    let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut fragments = Vec::new();
    for (lineno, line) in content.lines().enumerate() {
        let lineno = lineno + 1;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 4 {
            return Err(Error::parse(path, lineno, format!("expected 4 tab-separated fields, got {}", fields.len())));
        }
        let article_id = fields[0];
        let technique = fields[1];
        let start: usize = fields[2]
            .parse()
            .map_err(|_| Error::parse(path, lineno, format!("bad start offset `{}`", fields[2])))?;
        let end: usize = fields[3]
            .parse()
            .map_err(|_| Error::parse(path, lineno, format!("bad end offset `{}`", fields[3])))?;
        if technique.is_empty() {
            return Err(Error::parse(path, lineno, "empty technique name"));
        }
        if start >= end {
            return Err(Error::parse(path, lineno, format!("empty span {start}..{end}")));
        }
        let Some(doc) = documents.get(article_id) else {
            return Err(Error::parse(path, lineno, format!("unknown article id `{article_id}`")));
        };
        let len = doc.char_len();
        if end > len {
            return Err(Error::parse(
                path,
                lineno,
                format!("span {start}..{end} exceeds article length {len} chars"),
            ));
        }
        fragments.push(Fragment {
            article_id: article_id.to_string(),
            span: Span::new(start, end),
            technique: technique.to_string(),
        });
    }
    Ok(fragments)
}

/// Write fragments sorted by (article, start, end, technique).
pub fn write_flc_labels(path: &Path, fragments: &[Fragment]) -> Result<()> {
    let mut sorted: Vec<&Fragment> = fragments.iter().collect();
    sorted.sort();
    let mut out = String::new();
    for f in sorted {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\n",
            f.article_id, f.technique, f.span.start, f.span.end
        ));
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Read sentence labels. Articles and sentence indices must exist in the
/// corpus; a repeated (article, index) pair is an error.
pub fn load_slc_labels(path: &Path, documents: &DocumentSet) -> Result<BTreeMap<SentenceKey, bool>> {
    let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut labels = BTreeMap::new();
    for (lineno, line) in content.lines().enumerate() {
        let lineno = lineno + 1;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(Error::parse(path, lineno, format!("expected 3 tab-separated fields, got {}", fields.len())));
        }
        let article_id = fields[0];
        let index: usize = fields[1]
            .parse()
            .map_err(|_| Error::parse(path, lineno, format!("bad sentence index `{}`", fields[1])))?;
        let value = match fields[2] {
            LABEL_POSITIVE => true,
            LABEL_NEGATIVE => false,
            other => {
                return Err(Error::parse(path, lineno, format!("unknown label `{other}`")));
            }
        };
        let Some(doc) = documents.get(article_id) else {
            return Err(Error::parse(path, lineno, format!("unknown article id `{article_id}`")));
        };
        if doc.sentence(index).is_none() {
            return Err(Error::parse(
                path,
                lineno,
                format!("article `{article_id}` has no sentence {index}"),
            ));
        }
        if labels.insert((article_id.to_string(), index), value).is_some() {
            return Err(Error::parse(
                path,
                lineno,
                format!("duplicate label for article `{article_id}` sentence {index}"),
            ));
        }
    }
    Ok(labels)
}

/// Write sentence labels in key order.
pub fn write_slc_labels(path: &Path, labels: &BTreeMap<SentenceKey, bool>) -> Result<()> {
    let mut out = String::new();
    for ((article_id, index), &value) in labels {
        let word = if value { LABEL_POSITIVE } else { LABEL_NEGATIVE };
        out.push_str(&format!("{article_id}\t{index}\t{word}\n"));
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Document;

    fn corpus() -> DocumentSet {
        let mut set = DocumentSet::new();
        set.insert(Document::from_text("111", "Big title here\nsecond sentence text\n")).unwrap();
        set.insert(Document::from_text("222", "Other title\nbody line\n")).unwrap();
        set
    }

    #[test]
    fn flc_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("labels.tsv");
        let docs = corpus();
        let frags = vec![
            Fragment::new("222", 0, 5, "Slogans"),
            Fragment::new("111", 4, 9, "Loaded_Language"),
        ];
        write_flc_labels(&path, &frags).unwrap();
        let loaded = load_flc_labels(&path, &docs).unwrap();
        // Writer sorts; both fragments come back.
        assert_eq!(loaded.len(), 2);
        assert_eq!(loaded[0], frags[1]);
        assert_eq!(loaded[1], frags[0]);
    }

    #[test]
    fn flc_rejects_bad_rows() {
        let dir = tempfile::tempdir().unwrap();
        let docs = corpus();
        let cases = [
            "111\tSlogans\t5\t5",           // empty span
            "111\tSlogans\t9\t4",           // inverted
            "111\tSlogans\t0\t9999",        // outside article
            "999\tSlogans\t0\t4",           // unknown article
            "111\tSlogans\t0",              // missing field
            "111\t\t0\t4",                  // empty technique
            "111\tSlogans\tzero\t4",        // non-numeric
        ];
        for (i, row) in cases.iter().enumerate() {
            let path = dir.path().join(format!("bad{i}.tsv"));
            fs::write(&path, format!("{row}\n")).unwrap();
            assert!(load_flc_labels(&path, &docs).is_err(), "case {i} should fail: {row}");
        }
    }

    #[test]
    fn flc_keeps_duplicate_rows() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("dup.tsv");
        fs::write(&path, "111\tSlogans\t0\t3\n111\tSlogans\t0\t3\n").unwrap();
        let loaded = load_flc_labels(&path, &corpus()).unwrap();
        assert_eq!(loaded.len(), 2);
    }

    #[test]
    fn slc_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("slc.tsv");
        let mut labels = BTreeMap::new();
        labels.insert(("111".to_string(), 1), true);
        labels.insert(("111".to_string(), 2), false);
        labels.insert(("222".to_string(), 1), false);
        write_slc_labels(&path, &labels).unwrap();
        let loaded = load_slc_labels(&path, &corpus()).unwrap();
        assert_eq!(loaded, labels);
    }

    #[test]
    fn slc_rejects_bad_rows() {
        let dir = tempfile::tempdir().unwrap();
        let docs = corpus();
        let cases = [
            "111\t1\tmaybe",                       // unknown label
            "111\t9\tpropaganda",                  // no such sentence
            "999\t1\tpropaganda",                  // no such article
            "111\t1\tpropaganda\textra",           // field count
            "111\t1\tpropaganda\n111\t1\tnon-propaganda", // duplicate key
            "111\tone\tpropaganda",                // bad index
        ];
        for (i, row) in cases.iter().enumerate() {
            let path = dir.path().join(format!("bad{i}.tsv"));
            fs::write(&path, format!("{row}\n")).unwrap();
            assert!(load_slc_labels(&path, &docs).is_err(), "case {i} should fail: {row}");
        }
    }

    #[test]
    fn offsets_validate_in_chars() {
        // Article text with multibyte chars: char length is what matters.
        let mut docs = DocumentSet::new();
        docs.insert(Document::from_text("5", "смысл статьи\n")).unwrap(); // 12 chars
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("l.tsv");
        fs::write(&path, "5\tLoaded_Language\t6\t12\n").unwrap();
        let loaded = load_flc_labels(&path, &docs).unwrap();
        assert_eq!(loaded[0].span, Span::new(6, 12));
    }
}
