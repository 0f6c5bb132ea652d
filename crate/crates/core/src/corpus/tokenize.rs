//! Whitespace tokenizer with punctuation splitting.
//!
//! Rules, applied per whitespace-separated chunk:
//!  * leading non-alphanumeric chars split off as single-char tokens;
//!  * trailing non-alphanumeric chars split off the same way, except that a
//!    trailing period stays attached when the remaining core still contains
//!    a period ("U.S." survives; "wins." splits);
//!  * what remains is one token.
//!
//! Spans are char offsets into the input, end-exclusive, and the tokens of a
//! line always cover exactly the non-whitespace chars in order.

use super::{Span, Token};

pub fn tokenize(text: &str) -> Vec<Token> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        if chars[i].is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        while i < chars.len() && !chars[i].is_whitespace() {
            i += 1;
        }
        split_chunk(&chars, start, i, &mut tokens);
    }
    tokens
}

fn split_chunk(chars: &[char], start: usize, end: usize, out: &mut Vec<Token>) {
    let mut l = start;
    let mut r = end;
    while l < r && !chars[l].is_alphanumeric() {
        out.push(make_token(chars, l, l + 1));
        l += 1;
    }
    let mut trailing = Vec::new();
    while r > l && !chars[r - 1].is_alphanumeric() {
        if chars[r - 1] == '.' && chars[l..r - 1].contains(&'.') {
            // Keep the final period of an abbreviation attached.
            break;
        }
        trailing.push(Span::new(r - 1, r));
        r -= 1;
    }
    if l < r {
        out.push(make_token(chars, l, r));
    }
    for span in trailing.into_iter().rev() {
        out.push(make_token(chars, span.start, span.end));
    }
}

fn make_token(chars: &[char], start: usize, end: usize) -> Token {
    Token {
        text: chars[start..end].iter().collect(),
        span: Span::new(start, end),
        pos: None,
        ner: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn texts(input: &str) -> Vec<String> {
        tokenize(input).into_iter().map(|t| t.text).collect()
    }

    #[test]
    fn splits_trailing_punctuation() {
        assert_eq!(texts("BUILD THE WALL!"), vec!["BUILD", "THE", "WALL", "!"]);
        let toks = tokenize("BUILD THE WALL!");
        assert_eq!(toks[3].span, Span::new(14, 15));
        assert_eq!(toks[2].span, Span::new(10, 14));
    }

    #[test]
    fn keeps_abbreviation_periods() {
        assert_eq!(texts("U.S. wins."), vec!["U.S.", "wins", "."]);
        assert_eq!(texts("e.g. etc."), vec!["e.g.", "etc", "."]);
    }

    #[test]
    fn splits_leading_punctuation() {
        assert_eq!(texts("\"quoted\" text"), vec!["\"", "quoted", "\"", "text"]);
        assert_eq!(texts("(see note)."), vec!["(", "see", "note", ")", "."]);
    }

    #[test]
    fn empty_and_whitespace_only() {
        assert_eq!(texts(""), Vec::<String>::new());
        assert_eq!(texts("   \t "), Vec::<String>::new());
    }

    #[test]
    fn pure_punctuation_chunks_split_per_char() {
        assert_eq!(texts("?!"), vec!["?", "!"]);
        assert_eq!(texts("..."), vec![".", ".", "."]);
    }

    #[test]
    fn interior_punctuation_stays_attached() {
        assert_eq!(texts("mother-in-law's house"), vec!["mother-in-law's", "house"]);
        assert_eq!(texts("don't stop"), vec!["don't", "stop"]);
    }

    #[test]
    fn unicode_chunks_keep_char_offsets() {
        let toks = tokenize("«привет» мир!");
        let texts: Vec<&str> = toks.iter().map(|t| t.text.as_str()).collect();
        assert_eq!(texts, vec!["«", "привет", "»", "мир", "!"]);
        assert_eq!(toks[1].span, Span::new(1, 7));
        assert_eq!(toks[4].span, Span::new(12, 13));
    }

    #[test]
    fn numbers_tokenize_like_words() {
        assert_eq!(texts("in 2024, 3.5% rose"), vec!["in", "2024", ",", "3.5", "%", "rose"]);
    }

    proptest! {
        /// Tokens tile the non-whitespace chars: in order, non-overlapping,
        /// and rereading each span gives back the token text.
        #[test]
        fn spans_reconstruct_input(s in "[ a-zA-Z.!?\"'()\\-éю0-9]{0,60}") {
            let chars: Vec<char> = s.chars().collect();
            let toks = tokenize(&s);
            let mut covered = vec![false; chars.len()];
            let mut last_end = 0;
            for t in &toks {
                prop_assert!(t.span.start >= last_end);
                prop_assert!(t.span.start < t.span.end);
                prop_assert!(t.span.end <= chars.len());
                let reread: String = chars[t.span.start..t.span.end].iter().collect();
                prop_assert_eq!(&reread, &t.text);
                for c in t.span.start..t.span.end {
                    prop_assert!(!covered[c]);
                    covered[c] = true;
                }
                last_end = t.span.end;
            }
            for (i, ch) in chars.iter().enumerate() {
                prop_assert_eq!(covered[i], !ch.is_whitespace());
            }
        }
    }
}
