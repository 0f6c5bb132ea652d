//! The individual feature extractors. Each returns a named block; names are
//! prefixed by block (`char.`, `read.`, ...) so concatenation never collides.
//!
//! All counts are plain occurrence counts over the sentence's tokens, and
//! every ratio guards its denominator: a zero denominator yields 0.

use super::lexicons::{Emotion, Lexicons};
use super::FeatureVector;
use crate::corpus::{Document, Sentence};
use crate::error::{Error, Result};

/// Coarse part-of-speech inventory. Tags outside this list count as `X`.
pub const COARSE_POS_TAGS: [&str; 17] = [
    "ADJ", "ADP", "ADV", "AUX", "CCONJ", "DET", "INTJ", "NOUN", "NUM", "PART", "PRON", "PROPN",
    "PUNCT", "SCONJ", "SYM", "VERB", "X",
];

/// Entity types that get their own counter; all other NER tags are ignored.
pub const SELECTED_NER_TAGS: [&str; 10] = [
    "PERSON", "NORP", "FAC", "ORG", "GPE", "LOC", "EVENT", "WORK_OF_ART", "LAW", "LANGUAGE",
];

fn ratio(count: usize, denom: usize) -> f64 {
    if denom == 0 {
        0.0
    } else {
        count as f64 / denom as f64
    }
}

/// Character-level counts: question/exclamation marks, capitalised and
/// all-caps tokens, each also as a fraction of the token count.
pub fn char_features(sentence: &Sentence) -> FeatureVector {
    let n = sentence.tokens.len();
    let mut question = 0;
    let mut exclamation = 0;
    let mut first_cap = 0;
    let mut all_cap = 0;
    for tok in &sentence.tokens {
        question += tok.text.chars().filter(|&c| c == '?').count();
        exclamation += tok.text.chars().filter(|&c| c == '!').count();
        if tok.text.chars().next().is_some_and(char::is_uppercase) {
            first_cap += 1;
        }
        if is_all_caps(&tok.text) {
            all_cap += 1;
        }
    }
    let mut fv = FeatureVector::new("char");
    fv.push("char.question_count", question as f64);
    fv.push("char.exclamation_count", exclamation as f64);
    fv.push("char.first_cap_count", first_cap as f64);
    fv.push("char.all_cap_count", all_cap as f64);
    fv.push("char.question_ratio", ratio(question, n));
    fv.push("char.exclamation_ratio", ratio(exclamation, n));
    fv.push("char.first_cap_ratio", ratio(first_cap, n));
    fv.push("char.all_cap_ratio", ratio(all_cap, n));
    fv
}

/// A shouted token: at least two chars, has letters, and no lowercase ones.
fn is_all_caps(text: &str) -> bool {
    text.chars().count() >= 2
        && text.chars().any(char::is_alphabetic)
        && text.chars().filter(|c| c.is_alphabetic()).all(char::is_uppercase)
}

/// Vowel-group syllable counter: maximal runs of `aeiouy` count one each, a
/// trailing `e` gives one back, and every word has at least one syllable.
pub fn syllable_count(word: &str) -> usize {
    let lower = word.to_lowercase();
    let is_vowel = |c: char| matches!(c, 'a' | 'e' | 'i' | 'o' | 'u' | 'y');
    let mut groups = 0;
    let mut in_group = false;
    for c in lower.chars() {
        if is_vowel(c) {
            if !in_group {
                groups += 1;
            }
            in_group = true;
        } else {
            in_group = false;
        }
    }
    if lower.ends_with('e') && groups > 0 {
        groups -= 1;
    }
    groups.max(1)
}

/// Reading-ease and grade-level scores over the sentence's word tokens
/// (tokens containing at least one alphanumeric char), treating the
/// sentence as a one-sentence text.
pub fn readability_features(sentence: &Sentence) -> FeatureVector {
    let words: Vec<&str> = sentence
        .tokens
        .iter()
        .map(|t| t.text.as_str())
        .filter(|t| t.chars().any(char::is_alphanumeric))
        .collect();
    let w = words.len();
    let mut fv = FeatureVector::new("read");
    if w == 0 {
        for name in [
            "read.flesch_ease",
            "read.fk_grade",
            "read.word_count",
            "read.mean_word_len",
            "read.polysyllable_ratio",
        ] {
            fv.push(name, 0.0);
        }
        return fv;
    }
    let syllables: usize = words.iter().map(|word| syllable_count(word)).sum();
    let poly = words.iter().filter(|word| syllable_count(word) >= 3).count();
    let wf = w as f64;
    let spw = syllables as f64 / wf;
    let flesch = 206.835 - 1.015 * wf - 84.6 * spw;
    let fk = 0.39 * wf + 11.8 * spw - 15.59;
    let mean_len = words.iter().map(|word| word.chars().count()).sum::<usize>() as f64 / wf;
    fv.push("read.flesch_ease", flesch);
    fv.push("read.fk_grade", fk);
    fv.push("read.word_count", wf);
    fv.push("read.mean_word_len", mean_len);
    fv.push("read.polysyllable_ratio", poly as f64 / wf);
    fv
}

/// Polarity aggregates over lexicon hits: positive and negative mass, their
/// maxima, a length-damped compound score, and how much of the sentence the
/// lexicon covers at all.
pub fn sentiment_features(sentence: &Sentence, lexicons: &Lexicons) -> FeatureVector {
    let n = sentence.tokens.len();
    let mut sum_pos = 0.0;
    let mut sum_neg = 0.0;
    let mut max_pos = 0.0f64;
    let mut max_neg = 0.0f64;
    let mut matched = 0usize;
    for tok in &sentence.tokens {
        if let Some(score) = lexicons.polarity(&tok.text.to_lowercase()) {
            matched += 1;
            if score > 0.0 {
                sum_pos += score;
                max_pos = max_pos.max(score);
            } else if score < 0.0 {
                sum_neg += -score;
                max_neg = max_neg.max(-score);
            }
        }
    }
    let compound = (sum_pos - sum_neg) / (1.0 + n as f64);
    let mut fv = FeatureVector::new("sent");
    fv.push("sent.sum_pos", sum_pos);
    fv.push("sent.sum_neg", sum_neg);
    fv.push("sent.max_pos", max_pos);
    fv.push("sent.max_neg", max_neg);
    fv.push("sent.compound", compound);
    fv.push("sent.matched_count", matched as f64);
    fv.push("sent.subjectivity", ratio(matched, n));
    fv
}

/// Per-emotion token counts and ratios, in the fixed emotion order.
pub fn emotion_features(sentence: &Sentence, lexicons: &Lexicons) -> FeatureVector {
    let n = sentence.tokens.len();
    let mut counts = [0usize; Emotion::ALL.len()];
    for tok in &sentence.tokens {
        for e in lexicons.emotions_of(&tok.text.to_lowercase()) {
            counts[Emotion::ALL.iter().position(|x| x == e).unwrap()] += 1;
        }
    }
    let mut fv = FeatureVector::new("emo");
    for (e, &c) in Emotion::ALL.iter().zip(&counts) {
        fv.push(format!("emo.{}_count", e.name()), c as f64);
    }
    for (e, &c) in Emotion::ALL.iter().zip(&counts) {
        fv.push(format!("emo.{}_ratio", e.name()), ratio(c, n));
    }
    fv
}

/// Occurrences of loaded-language phrases (case-insensitive token-sequence
/// matches), as a count and a presence flag.
pub fn loaded_word_features(sentence: &Sentence, lexicons: &Lexicons) -> FeatureVector {
    let lower: Vec<String> = sentence.tokens.iter().map(|t| t.text.to_lowercase()).collect();
    let count = lexicons.loaded_occurrences(&lower).len();
    let mut fv = FeatureVector::new("loaded");
    fv.push("loaded.count", count as f64);
    fv.push("loaded.present", f64::from(count > 0));
    fv
}

/// Word-sense ambiguity: summed and mean sense counts looked up by
/// (lowercased token, coarse POS). Unknown pairs contribute 0.
pub fn multi_meaning_features(sentence: &Sentence, lexicons: &Lexicons) -> FeatureVector {
    let n = sentence.tokens.len();
    let mut sum = 0u64;
    for tok in &sentence.tokens {
        let pos = tok.pos.as_deref().unwrap_or("");
        sum += u64::from(lexicons.sense_count(&tok.text.to_lowercase(), pos));
    }
    let mut fv = FeatureVector::new("senses");
    fv.push("senses.sum", sum as f64);
    fv.push("senses.mean", if n == 0 { 0.0 } else { sum as f64 / n as f64 });
    fv
}

/// Counts per coarse POS tag (unknown tags pool into `X`) and per selected
/// entity type, plus the total of the selected entity counts. Logs a warning
/// when the sentence carries no annotations at all instead of failing.
pub fn pos_ner_features(sentence: &Sentence) -> FeatureVector {
    let mut pos_counts = [0usize; COARSE_POS_TAGS.len()];
    let mut ner_counts = [0usize; SELECTED_NER_TAGS.len()];
    let mut any_annotation = false;
    for tok in &sentence.tokens {
        if let Some(pos) = &tok.pos {
            any_annotation = true;
            let idx = COARSE_POS_TAGS
                .iter()
                .position(|t| t == pos)
                .unwrap_or(COARSE_POS_TAGS.len() - 1); // X
            pos_counts[idx] += 1;
        }
        if let Some(ner) = &tok.ner {
            any_annotation = true;
            if let Some(idx) = SELECTED_NER_TAGS.iter().position(|t| t == ner) {
                ner_counts[idx] += 1;
            }
        }
    }
    if !sentence.tokens.is_empty() && !any_annotation {
        log::warn!(
            "sentence {} has no POS/NER annotations; its tag features are all zero",
            sentence.index
        );
    }
    let mut fv = FeatureVector::new("tags");
    for (tag, &c) in COARSE_POS_TAGS.iter().zip(&pos_counts) {
        fv.push(format!("pos.{tag}"), c as f64);
    }
    for (tag, &c) in SELECTED_NER_TAGS.iter().zip(&ner_counts) {
        fv.push(format!("ner.{tag}"), c as f64);
    }
    fv.push("ner.entity_total", ner_counts.iter().sum::<usize>() as f64);
    fv
}

/// Where the sentence sits in its article (one-hot over FIRST / TOP / MIDDLE
/// / BOTTOM / LAST, by rank among retained sentences) and how long it is
/// (one-hot over seven token-count bins).
pub fn layout_features(sentence: &Sentence, document: &Document) -> Result<FeatureVector> {
    let Some((rank, total)) = document.retained_rank(sentence.index) else {
        return Err(Error::InvalidInput(format!(
            "sentence {} of article `{}` is not a retained sentence",
            sentence.index, document.article_id
        )));
    };
    let mut position = [0.0f64; 5]; // first, top, middle, bottom, last
    if rank == 1 {
        position[0] = 1.0;
    } else if rank == total {
        position[4] = 1.0;
    } else {
        let r = rank as f64 / total as f64;
        if r < 0.3 {
            position[1] = 1.0;
        } else if r <= 0.7 {
            position[2] = 1.0;
        } else {
            position[3] = 1.0;
        }
    }
    let l = sentence.tokens.len();
    let bin = match l {
        0..=2 => 0,
        3..=4 => 1,
        5..=8 => 2,
        9..=20 => 3,
        21..=40 => 4,
        41..=60 => 5,
        _ => 6,
    };
    let mut fv = FeatureVector::new("layout");
    for (i, name) in ["first", "top", "middle", "bottom", "last"].iter().enumerate() {
        fv.push(format!("layout.pos_{name}"), position[i]);
    }
    for (i, name) in ["le2", "3_4", "5_8", "9_20", "21_40", "41_60", "gt60"].iter().enumerate() {
        fv.push(format!("layout.len_{name}"), f64::from(bin == i));
    }
    Ok(fv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Document;

    fn sentence(text: &str) -> Sentence {
        Document::from_text("t", text).sentences[0].clone()
    }

    #[test]
    fn char_counts_on_a_slogan() {
        let fv = char_features(&sentence("BUILD THE WALL!"));
        assert_eq!(fv.get("char.exclamation_count"), Some(1.0));
        assert_eq!(fv.get("char.question_count"), Some(0.0));
        assert_eq!(fv.get("char.all_cap_count"), Some(3.0));
        assert_eq!(fv.get("char.first_cap_count"), Some(3.0));
        // 4 tokens once "!" splits off.
        assert_eq!(fv.get("char.all_cap_ratio"), Some(0.75));
    }

    #[test]
    fn all_caps_needs_letters_and_length() {
        assert!(is_all_caps("WALL"));
        assert!(is_all_caps("U.S."));
        assert!(!is_all_caps("W"));
        assert!(!is_all_caps("Wall"));
        assert!(!is_all_caps("2024"));
        assert!(!is_all_caps("!!"));
    }

    #[test]
    fn syllable_goldens() {
        let cases = [
            ("the", 1),
            ("cat", 1),
            ("over", 2),
            ("made", 1),
            ("hello", 2),
            ("beautiful", 3),
            ("rhythm", 1),
            ("monkeys", 2),
            ("syllable", 2),
            ("2024", 1),
            ("a", 1),
        ];
        for (word, expected) in cases {
            assert_eq!(syllable_count(word), expected, "word {word}");
        }
    }

    #[test]
    fn readability_on_a_known_sentence() {
        // 10 words, 14 syllables under the heuristic, hand-checked:
        // 1+1+1+2+1+1+1+2+2+2.
        let s = sentence("the cat ran over my hill with super angry monkeys");
        let fv = readability_features(&s);
        assert_eq!(fv.get("read.word_count"), Some(10.0));
        let flesch = fv.get("read.flesch_ease").unwrap();
        // 206.835 - 1.015*10 - 84.6*1.4
        assert!((flesch - 78.245).abs() < 1e-9, "flesch {flesch}");
        let fk = fv.get("read.fk_grade").unwrap();
        // 0.39*10 + 11.8*1.4 - 15.59
        assert!((fk - 4.83).abs() < 1e-9, "fk {fk}");
        assert_eq!(fv.get("read.polysyllable_ratio"), Some(0.0));
    }

    #[test]
    fn readability_ignores_punctuation_tokens() {
        let with = readability_features(&sentence("good day !"));
        let without = readability_features(&sentence("good day"));
        assert_eq!(with.get("read.word_count"), without.get("read.word_count"));
        assert_eq!(with.get("read.flesch_ease"), without.get("read.flesch_ease"));
    }

    #[test]
    fn readability_of_empty_sentence_is_all_zero() {
        let fv = readability_features(&sentence("?!"));
        assert_eq!(fv.get("read.flesch_ease"), Some(0.0));
        assert_eq!(fv.get("read.word_count"), Some(0.0));
    }

    fn test_lexicons() -> Lexicons {
        let dir = tempfile::tempdir().unwrap();
        let mut lex = Lexicons::default();
        let sent = dir.path().join("sent.tsv");
        std::fs::write(&sent, "good\t0.7\nbad\t-0.6\nfine\t0.1\n").unwrap();
        lex.load_sentiment(&sent).unwrap();
        let emo = dir.path().join("emo.tsv");
        std::fs::write(&emo, "bad\tanger\t1\nbad\tdisgust\t1\ngood\tjoy\t1\n").unwrap();
        lex.load_emotion(&emo).unwrap();
        let loaded = dir.path().join("loaded.txt");
        std::fs::write(&loaded, "sell out\ntraitor\n").unwrap();
        lex.load_loaded_words(&loaded).unwrap();
        let senses = dir.path().join("senses.tsv");
        std::fs::write(&senses, "bank\tNOUN\t10\nrun\tVERB\t30\n").unwrap();
        lex.load_senses(&senses).unwrap();
        lex
    }

    #[test]
    fn sentiment_aggregates() {
        let lex = test_lexicons();
        // 4 tokens: good(+0.7) good(+0.7) bad(-0.6) day(unmatched)
        let fv = sentiment_features(&sentence("Good good bad day"), &lex);
        assert!((fv.get("sent.sum_pos").unwrap() - 1.4).abs() < 1e-12);
        assert!((fv.get("sent.sum_neg").unwrap() - 0.6).abs() < 1e-12);
        assert_eq!(fv.get("sent.max_pos"), Some(0.7));
        assert_eq!(fv.get("sent.max_neg"), Some(0.6));
        let compound = fv.get("sent.compound").unwrap();
        assert!((compound - (1.4 - 0.6) / 5.0).abs() < 1e-12);
        assert_eq!(fv.get("sent.matched_count"), Some(3.0));
        assert_eq!(fv.get("sent.subjectivity"), Some(0.75));
    }

    #[test]
    fn sentiment_without_lexicon_is_zero() {
        let fv = sentiment_features(&sentence("whatever words"), &Lexicons::default());
        for name in fv.names() {
            assert_eq!(fv.get(name), Some(0.0), "{name}");
        }
    }

    #[test]
    fn emotion_counts_and_ratios() {
        let lex = test_lexicons();
        let fv = emotion_features(&sentence("bad bad good stuff"), &lex);
        assert_eq!(fv.get("emo.anger_count"), Some(2.0));
        assert_eq!(fv.get("emo.disgust_count"), Some(2.0));
        assert_eq!(fv.get("emo.joy_count"), Some(1.0));
        assert_eq!(fv.get("emo.sadness_count"), Some(0.0));
        assert_eq!(fv.get("emo.anger_ratio"), Some(0.5));
        assert_eq!(fv.get("emo.joy_ratio"), Some(0.25));
    }

    #[test]
    fn loaded_phrase_occurrences() {
        let lex = test_lexicons();
        let fv = loaded_word_features(&sentence("They Sell Out the traitor"), &lex);
        assert_eq!(fv.get("loaded.count"), Some(2.0));
        assert_eq!(fv.get("loaded.present"), Some(1.0));
        let none = loaded_word_features(&sentence("nothing here"), &lex);
        assert_eq!(none.get("loaded.count"), Some(0.0));
        assert_eq!(none.get("loaded.present"), Some(0.0));
    }

    #[test]
    fn sense_counts_need_matching_pos() {
        let lex = test_lexicons();
        let mut s = sentence("bank run today");
        s.tokens[0].pos = Some("NOUN".to_string());
        s.tokens[1].pos = Some("VERB".to_string());
        let fv = multi_meaning_features(&s, &lex);
        assert_eq!(fv.get("senses.sum"), Some(40.0));
        assert!((fv.get("senses.mean").unwrap() - 40.0 / 3.0).abs() < 1e-12);
        // Without POS tags nothing matches.
        let bare = multi_meaning_features(&sentence("bank run today"), &lex);
        assert_eq!(bare.get("senses.sum"), Some(0.0));
    }

    #[test]
    fn pos_and_ner_counts() {
        let mut s = sentence("John hit the ball");
        s.tokens[0].pos = Some("PROPN".into());
        s.tokens[0].ner = Some("PERSON".into());
        s.tokens[1].pos = Some("VERB".into());
        s.tokens[2].pos = Some("DET".into());
        s.tokens[3].pos = Some("WEIRD".into()); // pools into X
        s.tokens[3].ner = Some("CARDINAL".into()); // outside selection: ignored
        let fv = pos_ner_features(&s);
        assert_eq!(fv.get("pos.PROPN"), Some(1.0));
        assert_eq!(fv.get("pos.VERB"), Some(1.0));
        assert_eq!(fv.get("pos.DET"), Some(1.0));
        assert_eq!(fv.get("pos.X"), Some(1.0));
        assert_eq!(fv.get("ner.PERSON"), Some(1.0));
        assert_eq!(fv.get("ner.entity_total"), Some(1.0));
        assert_eq!(fv.len(), 17 + 10 + 1);
    }

    fn article_with_retained(n: usize) -> Document {
        let lines: Vec<String> = (0..n).map(|i| format!("sentence number {i} words")).collect();
        Document::from_text("a", lines.join("\n"))
    }

    #[test]
    fn layout_position_categories() {
        let doc = article_with_retained(10);
        let pick = |idx: usize| {
            let fv = layout_features(doc.sentence(idx).unwrap(), &doc).unwrap();
            ["first", "top", "middle", "bottom", "last"]
                .iter()
                .find(|n| fv.get(&format!("layout.pos_{n}")) == Some(1.0))
                .unwrap()
                .to_string()
        };
        assert_eq!(pick(1), "first");
        assert_eq!(pick(2), "top");      // 2/10 = 0.2
        assert_eq!(pick(3), "middle");   // 3/10 = 0.3 is inclusive
        assert_eq!(pick(7), "middle");   // 0.7 inclusive
        assert_eq!(pick(8), "bottom");   // 0.8
        assert_eq!(pick(10), "last");
    }

    #[test]
    fn layout_rank_ignores_filtered_lines() {
        // Line 2 is filtered; line 3 is the 2nd of 3 retained -> 2/3 middle.
        let doc = Document::from_text("a", "first line here\nshort\nmiddle line here\nlast line here");
        let fv = layout_features(doc.sentence(3).unwrap(), &doc).unwrap();
        assert_eq!(fv.get("layout.pos_middle"), Some(1.0));
        assert!(layout_features(doc.sentence(2).unwrap(), &doc).is_err());
    }

    #[test]
    fn layout_length_bins() {
        let doc = article_with_retained(3);
        let cases: [(String, &str); 4] = [
            ("two words".into(), "le2"),
            ("now three words".into(), "3_4"),
            ("a b c d e f g h".into(), "5_8"),
            ((0..25).map(|i| format!("w{i}")).collect::<Vec<_>>().join(" "), "21_40"),
        ];
        for (text, expected) in cases {
            let mut s = doc.sentence(2).unwrap().clone();
            let parsed = Document::from_text("x", text.as_str());
            s.tokens = parsed.sentences[0].tokens.clone();
            let fv = layout_features(&s, &doc).unwrap();
            assert_eq!(fv.get(&format!("layout.len_{expected}")), Some(1.0), "`{text}`");
        }
    }

    #[test]
    fn two_sentence_article_is_first_and_last() {
        let doc = article_with_retained(2);
        let first = layout_features(doc.sentence(1).unwrap(), &doc).unwrap();
        let last = layout_features(doc.sentence(2).unwrap(), &doc).unwrap();
        assert_eq!(first.get("layout.pos_first"), Some(1.0));
        assert_eq!(last.get("layout.pos_last"), Some(1.0));
    }
}
