//! Combining per-model fragment predictions into one span set.
//!
//! Three rules, applied in order:
//! 1. Fragments with an identical span are collapsed to one fragment whose
//!    label is the plurality label; each model counts once per label there,
//!    and label ties go to the earliest model in input order (then to the
//!    lexicographically smallest label). A span emitted by any model
//!    survives — voting picks the label, not existence.
//! 2. Overlapping fragments with the *same* label collapse to the widest
//!    member, iterated to a fixpoint so chains resolve deterministically;
//!    width ties keep the earlier start.
//! 3. Overlapping fragments with *different* labels all stay.

use std::collections::{BTreeMap, BTreeSet};

use crate::corpus::Fragment;

/// Merge per-model fragment lists (outer index = model, in priority order)
/// into a single list, sorted canonically.
pub fn merge_fragments(fragment_sets: &[Vec<Fragment>]) -> Vec<Fragment> {
    // (article, start, end) → label → (vote count, earliest model index).
    type SpanKey = (String, usize, usize);
    let mut votes: BTreeMap<SpanKey, BTreeMap<String, (usize, usize)>> = BTreeMap::new();
    for (model, fragments) in fragment_sets.iter().enumerate() {
        // A model repeating the same (span, label) still votes once.
        let mut seen: BTreeSet<(SpanKey, String)> = BTreeSet::new();
        for fragment in fragments {
            let key = (
                fragment.article_id.clone(),
                fragment.span.start,
                fragment.span.end,
            );
            if !seen.insert((key.clone(), fragment.technique.clone())) {
                continue;
            }
            let entry = votes
                .entry(key)
                .or_default()
                .entry(fragment.technique.clone())
                .or_insert((0, model));
            entry.0 += 1;
        }
    }

    // Rule 1: one fragment per span, plurality label.
    let mut merged: Vec<Fragment> = Vec::with_capacity(votes.len());
    for ((article, start, end), labels) in &votes {
        let winner = labels
            .iter()
            .max_by(|(la, (ca, ma)), (lb, (cb, mb))| {
                // More votes wins; then the earlier model; then the smaller
                // label (max_by keeps the later-compared-greater element, so
                // order the comparisons accordingly).
                ca.cmp(cb)
                    .then(mb.cmp(ma))
                    .then(lb.cmp(la))
            })
            .map(|(label, _)| label.clone())
            .expect("non-empty label map");
        merged.push(Fragment::new(article.clone(), *start, *end, winner));
    }

    // Rule 2: same-label overlaps collapse to the widest member, repeated
    // until no such pair remains. Fragments are kept sorted, and the first
    // offending pair in scan order is resolved each round, which makes the
    // fixpoint deterministic.
    merged.sort();
    'restart: loop {
        for i in 0..merged.len() {
            for j in (i + 1)..merged.len() {
                let (a, b) = (&merged[i], &merged[j]);
                if a.article_id != b.article_id {
                    break; // sorted by article first
                }
                if b.span.start >= a.span.end {
                    break; // sorted by start; no later j can overlap a
                }
                if a.technique != b.technique || !a.span.overlaps(&b.span) {
                    continue;
                }
                let wa = a.span.end - a.span.start;
                let wb = b.span.end - b.span.start;
                // Keep the wider; on equal width the earlier start, which is
                // `a` (sort order puts equal starts together, and equal
                // start + equal width means equal span — impossible here).
                let drop = if wb > wa { i } else { j };
                merged.remove(drop);
                continue 'restart;
            }
        }
        break;
    }
    merged
}
