//! BIO tags over sentence tokens, and the two codecs between char-span
//! fragments and tag sequences.
//!
//! Encoding projects possibly-overlapping fragments onto a single tag layer:
//! fragments are ranked by earliest start (ties: longest first), each claims
//! the tokens it intersects, and later fragments touching a claimed token are
//! dropped. Fragments snap outward to whole tokens.
//!
//! Decoding is tolerant: an `I-t` without a compatible predecessor is read as
//! `B-t`, so any tag sequence decodes to a valid fragment list.

use std::fmt;
use std::str::FromStr;

use super::{Fragment, Sentence, Span};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BioTag {
    Outside,
    Begin(String),
    Inside(String),
}

impl BioTag {
    pub fn technique(&self) -> Option<&str> {
        match self {
            BioTag::Outside => None,
            BioTag::Begin(t) | BioTag::Inside(t) => Some(t),
        }
    }
}

impl fmt::Display for BioTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BioTag::Outside => write!(f, "O"),
            BioTag::Begin(t) => write!(f, "B-{t}"),
            BioTag::Inside(t) => write!(f, "I-{t}"),
        }
    }
}

impl FromStr for BioTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "O" {
            return Ok(BioTag::Outside);
        }
        if let Some(t) = s.strip_prefix("B-") {
            if !t.is_empty() {
                return Ok(BioTag::Begin(t.to_string()));
            }
        }
        if let Some(t) = s.strip_prefix("I-") {
            if !t.is_empty() {
                return Ok(BioTag::Inside(t.to_string()));
            }
        }
        Err(Error::InvalidInput(format!("unknown BIO tag `{s}`")))
    }
}

/// The tags for one sentence, one per token.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TagSequence {
    pub tags: Vec<BioTag>,
}

impl TagSequence {
    pub fn new(tags: Vec<BioTag>) -> Self {
        TagSequence { tags }
    }

    pub fn len(&self) -> usize {
        self.tags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tags.is_empty()
    }
}

/// Project `fragments` onto the tokens of `sentence`. Fragments that do not
/// intersect any token (or lose every token to an earlier fragment) vanish.
pub fn encode_bio(sentence: &Sentence, fragments: &[Fragment]) -> TagSequence {
    let mut tags = vec![BioTag::Outside; sentence.tokens.len()];
    // Token index range each candidate covers, in priority order.
    let mut ranked: Vec<(&Fragment, usize, usize)> = fragments
        .iter()
        .filter_map(|f| token_range(sentence, &f.span).map(|(a, b)| (f, a, b)))
        .collect();
    ranked.sort_by(|(fa, ..), (fb, ..)| {
        fa.span
            .start
            .cmp(&fb.span.start)
            .then(fb.span.end.cmp(&fa.span.end))
    });
    let mut claimed = vec![false; sentence.tokens.len()];
    for (frag, first, last) in ranked {
        if (first..=last).any(|i| claimed[i]) {
            continue;
        }
        for i in first..=last {
            claimed[i] = true;
            tags[i] = if i == first {
                BioTag::Begin(frag.technique.clone())
            } else {
                BioTag::Inside(frag.technique.clone())
            };
        }
    }
    TagSequence::new(tags)
}

/// First and last token index intersecting `span`, if any.
fn token_range(sentence: &Sentence, span: &Span) -> Option<(usize, usize)> {
    let mut first = None;
    let mut last = None;
    for (i, tok) in sentence.tokens.iter().enumerate() {
        if tok.span.overlaps(span) {
            if first.is_none() {
                first = Some(i);
            }
            last = Some(i);
        }
    }
    Some((first?, last?))
}

/// Read fragments back out of a tag sequence. Spans cover whole tokens.
pub fn decode_bio(tags: &TagSequence, sentence: &Sentence, article_id: &str) -> Result<Vec<Fragment>> {
    if tags.len() != sentence.tokens.len() {
        return Err(Error::InvalidInput(format!(
            "tag sequence length {} does not match {} tokens",
            tags.len(),
            sentence.tokens.len()
        )));
    }
    let mut fragments = Vec::new();
    let mut open: Option<(String, usize, usize)> = None; // technique, first, last token
    for (i, tag) in tags.tags.iter().enumerate() {
        match tag {
            BioTag::Outside => {
                close(&mut open, sentence, article_id, &mut fragments);
            }
            BioTag::Begin(t) => {
                close(&mut open, sentence, article_id, &mut fragments);
                open = Some((t.clone(), i, i));
            }
            BioTag::Inside(t) => match &mut open {
                Some((cur, _, last)) if cur == t => *last = i,
                _ => {
                    // Orphan I-tag: treat as a fragment start.
                    close(&mut open, sentence, article_id, &mut fragments);
                    open = Some((t.clone(), i, i));
                }
            },
        }
    }
    close(&mut open, sentence, article_id, &mut fragments);
    Ok(fragments)
}

fn close(
    open: &mut Option<(String, usize, usize)>,
    sentence: &Sentence,
    article_id: &str,
    out: &mut Vec<Fragment>,
) {
    if let Some((technique, first, last)) = open.take() {
        out.push(Fragment {
            article_id: article_id.to_string(),
            span: Span::new(sentence.tokens[first].span.start, sentence.tokens[last].span.end),
            technique,
        });
    }
}
