//! File-backed lexical resources: token polarity scores, emotion
//! associations, loaded-language phrases, and word-sense counts.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// The five emotion categories tracked by the emotion lexicon.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Emotion {
    Sadness,
    Joy,
    Fear,
    Disgust,
    Anger,
}

impl Emotion {
    pub const ALL: [Emotion; 5] = [
        Emotion::Sadness,
        Emotion::Joy,
        Emotion::Fear,
        Emotion::Disgust,
        Emotion::Anger,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Emotion::Sadness => "sadness",
            Emotion::Joy => "joy",
            Emotion::Fear => "fear",
            Emotion::Disgust => "disgust",
            Emotion::Anger => "anger",
        }
    }

    pub fn from_name(name: &str) -> Option<Emotion> {
        Emotion::ALL.iter().copied().find(|e| e.name() == name)
    }
}

/// All lexical resources in one bundle. Missing resources are empty maps, so
/// the extractors always run; they just produce zeros.
#[derive(Debug, Clone, Default)]
pub struct Lexicons {
    sentiment: HashMap<String, f64>,
    emotions: HashMap<String, Vec<Emotion>>,
    /// Lowercased, tokenized (on whitespace) phrases.
    loaded_phrases: Vec<Vec<String>>,
    senses: HashMap<(String, String), u32>,
}

impl Lexicons {
    /// `token TAB score` with score in [-1, 1]. Later rows win on repeats.
    pub fn load_sentiment(&mut self, path: &Path) -> Result<()> {
        let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        for (lineno, line) in content.lines().enumerate() {
            let lineno = lineno + 1;
            if line.is_empty() {
                continue;
            }
            let Some((token, score)) = line.split_once('\t') else {
                return Err(Error::parse(path, lineno, "expected `token<TAB>score`"));
            };
            let score: f64 = score
                .parse()
                .map_err(|_| Error::parse(path, lineno, format!("bad score `{score}`")))?;
            if !score.is_finite() || !(-1.0..=1.0).contains(&score) {
                return Err(Error::parse(path, lineno, format!("score {score} outside [-1, 1]")));
            }
            self.sentiment.insert(token.to_lowercase(), score);
        }
        Ok(())
    }

    /// `token TAB emotion TAB flag`, flag 0 or 1; rows with flag 0 are
    /// association absences and are skipped.
    pub fn load_emotion(&mut self, path: &Path) -> Result<()> {
        let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        for (lineno, line) in content.lines().enumerate() {
            let lineno = lineno + 1;
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 3 {
                return Err(Error::parse(path, lineno, "expected `token<TAB>emotion<TAB>0|1`"));
            }
            let Some(emotion) = Emotion::from_name(fields[1]) else {
                return Err(Error::parse(path, lineno, format!("unknown emotion `{}`", fields[1])));
            };
            match fields[2] {
                "0" => continue,
                "1" => {}
                other => {
                    return Err(Error::parse(path, lineno, format!("bad flag `{other}`")));
                }
            }
            let entry = self.emotions.entry(fields[0].to_lowercase()).or_default();
            if !entry.contains(&emotion) {
                entry.push(emotion);
            }
        }
        Ok(())
    }

    /// One phrase per line; matched case-insensitively as a token sequence.
    pub fn load_loaded_words(&mut self, path: &Path) -> Result<()> {
        let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        for line in content.lines() {
            let tokens: Vec<String> = line.split_whitespace().map(|t| t.to_lowercase()).collect();
            if !tokens.is_empty() {
                self.loaded_phrases.push(tokens);
            }
        }
        Ok(())
    }

    /// `lemma TAB pos TAB count` — number of senses listed for the pair.
    pub fn load_senses(&mut self, path: &Path) -> Result<()> {
        let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        for (lineno, line) in content.lines().enumerate() {
            let lineno = lineno + 1;
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 3 {
                return Err(Error::parse(path, lineno, "expected `lemma<TAB>pos<TAB>count`"));
            }
            let count: u32 = fields[2]
                .parse()
                .map_err(|_| Error::parse(path, lineno, format!("bad sense count `{}`", fields[2])))?;
            self.senses
                .insert((fields[0].to_lowercase(), fields[1].to_string()), count);
        }
        Ok(())
    }

    pub fn polarity(&self, token_lower: &str) -> Option<f64> {
        self.sentiment.get(token_lower).copied()
    }

    pub fn emotions_of(&self, token_lower: &str) -> &[Emotion] {
        self.emotions.get(token_lower).map_or(&[], |v| v.as_slice())
    }

    pub fn sense_count(&self, lemma_lower: &str, pos: &str) -> u32 {
        self.senses
            .get(&(lemma_lower.to_string(), pos.to_string()))
            .copied()
            .unwrap_or(0)
    }

    pub fn has_sentiment_entries(&self) -> bool {
        !self.sentiment.is_empty()
    }

    /// Every occurrence of every loaded phrase in `tokens_lower`, as
    /// `(start_token, phrase_len)`. Occurrences of different phrases may
    /// overlap; each is reported.
    pub fn loaded_occurrences(&self, tokens_lower: &[String]) -> Vec<(usize, usize)> {
        let mut hits = Vec::new();
        for phrase in &self.loaded_phrases {
            if phrase.len() > tokens_lower.len() {
                continue;
            }
            for start in 0..=(tokens_lower.len() - phrase.len()) {
                if tokens_lower[start..start + phrase.len()] == phrase[..] {
                    hits.push((start, phrase.len()));
                }
            }
        }
        hits.sort();
        hits
    }
}
