//! Per-token binary features for span tagging.
//!
//! Each token becomes a small set of feature-name strings; the tagger treats
//! every distinct name as one binary weight column. The base set covers the
//! word identity, a window of neighbours, shape, POS and NER. The lexical
//! variant adds sentiment polarity and loaded-phrase membership, which is
//! the only place the two span models differ.

use crate::corpus::Sentence;
use crate::features::Lexicons;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenFeatureConfig {
    /// Word identity, neighbour window, shape, POS, NER.
    Base,
    /// Everything in `Base` plus sentiment polarity and loaded-phrase flags.
    Lexical,
}

impl TokenFeatureConfig {
    pub fn name(self) -> &'static str {
        match self {
            TokenFeatureConfig::Base => "base",
            TokenFeatureConfig::Lexical => "lexical",
        }
    }
}

fn shape_of(text: &str) -> &'static str {
    let mut has_upper = false;
    let mut has_lower = false;
    let mut has_digit = false;
    let mut has_other = false;
    for c in text.chars() {
        if c.is_uppercase() {
            has_upper = true;
        } else if c.is_lowercase() {
            has_lower = true;
        } else if c.is_ascii_digit() {
            has_digit = true;
        } else {
            has_other = true;
        }
    }
    match (has_upper, has_lower, has_digit, has_other) {
        (true, false, false, false) => "upper",
        (false, true, false, false) => "lower",
        (true, true, false, false) => {
            if text.chars().next().map_or(false, char::is_uppercase) {
                "title"
            } else {
                "mixed"
            }
        }
        (false, false, true, false) => "digit",
        (false, false, false, true) => "punct",
        (false, false, false, false) => "empty",
        _ => "mixed",
    }
}

/// Feature names for every token of `sentence`, in token order.
pub fn token_features(
    sentence: &Sentence,
    config: TokenFeatureConfig,
    lexicons: &Lexicons,
) -> Vec<Vec<String>> {
    let lowered: Vec<String> = sentence
        .tokens
        .iter()
        .map(|t| t.text.to_lowercase())
        .collect();
    let loaded = if config == TokenFeatureConfig::Lexical {
        lexicons.loaded_occurrences(&lowered)
    } else {
        Vec::new()
    };
    let mut in_loaded = vec![false; sentence.tokens.len()];
    for &(start, len) in &loaded {
        for flag in in_loaded.iter_mut().skip(start).take(len) {
            *flag = true;
        }
    }

    sentence
        .tokens
        .iter()
        .enumerate()
        .map(|(i, token)| {
            let mut names = Vec::with_capacity(12);
            names.push(format!("w={}", lowered[i]));
            if i > 0 {
                names.push(format!("w[-1]={}", lowered[i - 1]));
            } else {
                names.push("w[-1]=<s>".to_string());
            }
            match lowered.get(i + 1) {
                Some(next) => names.push(format!("w[+1]={next}")),
                None => names.push("w[+1]=</s>".to_string()),
            }
            names.push(format!("shape={}", shape_of(&token.text)));
            if token.text.chars().all(|c| !c.is_alphanumeric()) && !token.text.is_empty() {
                names.push("punct".to_string());
            }
            if let Some(pos) = &token.pos {
                names.push(format!("pos={pos}"));
            }
            if let Some(ner) = &token.ner {
                names.push(format!("ner={ner}"));
            }
            if config == TokenFeatureConfig::Lexical {
                match lexicons.polarity(&lowered[i]) {
                    Some(p) if p > 0.0 => names.push("pol=+".to_string()),
                    Some(p) if p < 0.0 => names.push("pol=-".to_string()),
                    _ => {}
                }
                if in_loaded[i] {
                    names.push("loaded".to_string());
                }
            }
            names
        })
        .collect()
}
