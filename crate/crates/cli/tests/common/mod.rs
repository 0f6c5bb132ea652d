//! Deterministic synthetic mini-corpus for the acceptance suite.
//!
//! Twenty articles of fifteen lines each. Propaganda sentences are marked by
//! planted loaded words, Loaded_Language fragments by two planted lowercase
//! words, Slogans fragments by planted all-caps token runs, and five
//! articles repeat one sentence verbatim a few lines later to exercise the
//! repetition postprocess. Gold labels are derived from the parsed tokens,
//! so they are correct by construction.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::PathBuf;

use propdetect_core::corpus::{
    load_articles, write_flc_labels, write_slc_labels, DocumentSet, Fragment, SentenceKey,
};
use propdetect_core::models::{write_sentence_predictions, SentencePrediction};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;

pub const NEUTRAL: &[&str] = &[
    "council", "river", "market", "garden", "harvest", "bridge", "signal", "journey", "window",
    "mountain", "village", "story", "evening", "morning", "travel", "letter", "answer", "silver",
    "stone", "meadow", "orchard", "lantern", "harbor", "quiet", "record", "weather", "border",
    "museum", "road", "winter",
];
pub const LOADED: &[&str] = &["tyranny", "treachery", "menace", "scourge", "betrayal", "puppet"];
pub const PLANTED_WORDS: &[&str] = &["venom", "vitriol"];
pub const PLANTED_SHOUTS: &[&str] = &["FREEDOM NOW", "TAKE BACK CONTROL", "WAKE UP"];

pub struct Synthetic {
    pub root: tempfile::TempDir,
    pub corpus_dir: PathBuf,
    pub slc_labels: PathBuf,
    pub flc_labels: PathBuf,
    pub loaded_words: PathBuf,
    pub sentiment: PathBuf,
    pub embeddings: PathBuf,
    pub manifest: PathBuf,
    pub docs: DocumentSet,
    pub slc_gold: BTreeMap<SentenceKey, bool>,
    pub flc_gold: Vec<Fragment>,
    /// Line indices of the planted verbatim repeats, per article.
    pub duplicates: Vec<SentenceKey>,
}

fn pick<'a>(rng: &mut ChaCha20Rng, pool: &[&'a str]) -> &'a str {
    pool[rng.gen_range(0..pool.len())]
}

fn neutral_words(rng: &mut ChaCha20Rng, n: usize) -> Vec<String> {
    (0..n).map(|_| pick(rng, NEUTRAL).to_string()).collect()
}

fn sentence_from(words: Vec<String>) -> String {
    format!("{}.", words.join(" "))
}

fn neutral_sentence(rng: &mut ChaCha20Rng) -> String {
    let n = rng.gen_range(5..9);
    sentence_from(neutral_words(rng, n))
}

/// A sentence with one planted marker inserted at a random interior slot.
fn planted_sentence(rng: &mut ChaCha20Rng, marker: &str) -> String {
    let n = rng.gen_range(5..8);
    let mut words = neutral_words(rng, n);
    let slot = rng.gen_range(1..words.len());
    words.insert(slot, marker.to_string());
    sentence_from(words)
}

fn title(rng: &mut ChaCha20Rng) -> String {
    (0..3)
        .map(|_| {
            let w = pick(rng, NEUTRAL);
            let mut c = w.chars();
            match c.next() {
                Some(first) => first.to_uppercase().collect::<String>() + c.as_str(),
                None => String::new(),
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn is_shout(token: &str) -> bool {
    token.len() >= 2 && token.chars().all(|c| c.is_ascii_uppercase())
}

pub fn build(seed: u64) -> Synthetic {
    let root = tempfile::tempdir().unwrap();
    let corpus_dir = root.path().join("corpus");
    fs::create_dir(&corpus_dir).unwrap();
    let mut rng = ChaCha20Rng::seed_from_u64(seed);

    let mut duplicates = Vec::new();
    for a in 1..=20 {
        let id = format!("{a:02}");
        let mut lines: Vec<String> = Vec::new();
        let plant = |rng: &mut ChaCha20Rng, pool: &[&str]| {
            let marker = pick(rng, pool);
            planted_sentence(rng, marker)
        };
        lines.push(title(&mut rng)); // 1
        lines.push(String::new()); // 2: blank, filtered
        lines.push(plant(&mut rng, PLANTED_WORDS)); // 3
        lines.push(plant(&mut rng, LOADED)); // 4
        lines.push(plant(&mut rng, PLANTED_SHOUTS)); // 5
        lines.push("Hm".to_string()); // 6: one token, filtered
        lines.push(plant(&mut rng, LOADED)); // 7
        lines.push(neutral_sentence(&mut rng)); // 8: repeat source
        lines.push(plant(&mut rng, PLANTED_WORDS)); // 9
        lines.push(plant(&mut rng, LOADED)); // 10
        lines.push(neutral_sentence(&mut rng)); // 11
        lines.push(plant(&mut rng, PLANTED_SHOUTS)); // 12
        lines.push(plant(&mut rng, LOADED)); // 13
        if a <= 5 {
            lines.push(lines[7].clone()); // 14: verbatim repeat of line 8
            duplicates.push((id.clone(), 14));
        } else {
            lines.push(neutral_sentence(&mut rng));
        }
        lines.push(neutral_sentence(&mut rng)); // 15
        fs::write(corpus_dir.join(format!("article{id}.txt")), lines.join("\n")).unwrap();
    }

    let docs = load_articles(&corpus_dir).unwrap();

    // Gold labels come from the parsed tokens, not from replaying the
    // generator, so offsets are exact by construction.
    let loaded: BTreeSet<&str> = LOADED.iter().copied().collect();
    let planted: BTreeSet<&str> = PLANTED_WORDS.iter().copied().collect();
    let mut slc_gold = BTreeMap::new();
    let mut flc_gold = Vec::new();
    for doc in docs.iter() {
        for sentence in doc.retained_sentences() {
            let propaganda = sentence
                .tokens
                .iter()
                .any(|t| loaded.contains(t.text.to_lowercase().as_str()));
            slc_gold.insert((doc.article_id.clone(), sentence.index), propaganda);
            for token in &sentence.tokens {
                if planted.contains(token.text.to_lowercase().as_str()) {
                    flc_gold.push(Fragment::new(
                        &doc.article_id,
                        token.span.start,
                        token.span.end,
                        "Loaded_Language",
                    ));
                }
            }
            let mut i = 0;
            while i < sentence.tokens.len() {
                if is_shout(&sentence.tokens[i].text) {
                    let mut j = i;
                    while j + 1 < sentence.tokens.len() && is_shout(&sentence.tokens[j + 1].text) {
                        j += 1;
                    }
                    flc_gold.push(Fragment::new(
                        &doc.article_id,
                        sentence.tokens[i].span.start,
                        sentence.tokens[j].span.end,
                        "Slogans",
                    ));
                    i = j + 1;
                } else {
                    i += 1;
                }
            }
        }
    }
    flc_gold.sort();

    let slc_labels = root.path().join("slc_gold.tsv");
    write_slc_labels(&slc_labels, &slc_gold).unwrap();
    let flc_labels = root.path().join("flc_gold.tsv");
    write_flc_labels(&flc_labels, &flc_gold).unwrap();

    let loaded_words = root.path().join("loaded_words.txt");
    fs::write(&loaded_words, LOADED.join("\n")).unwrap();
    let sentiment = root.path().join("sentiment.tsv");
    fs::write(
        &sentiment,
        "good\t0.8\nnoble\t0.6\nbad\t-0.7\nawful\t-0.9\ngarden\t0.2\nwinter\t-0.1\n",
    )
    .unwrap();

    // One vector per distinct token text; exact-case lookup.
    let mut words: BTreeSet<String> = BTreeSet::new();
    for doc in docs.iter() {
        for sentence in &doc.sentences {
            for token in &sentence.tokens {
                words.insert(token.text.clone());
            }
        }
    }
    let embeddings = root.path().join("embeddings.txt");
    let mut table = String::new();
    for word in &words {
        let parts: Vec<String> = (0..16)
            .map(|_| format!("{:.6}", rng.gen_range(-1.0f64..1.0)))
            .collect();
        table.push_str(&format!("{word} {}\n", parts.join(" ")));
    }
    fs::write(&embeddings, table).unwrap();

    // Two external prediction columns: gold with seeded label noise.
    let external = |name: &str, noise: f64, rng: &mut ChaCha20Rng| -> PathBuf {
        let mut preds = BTreeMap::new();
        for (key, &gold) in &slc_gold {
            let label = if rng.gen::<f64>() < noise { !gold } else { gold };
            preds.insert(
                key.clone(),
                SentencePrediction { label, prob: if label { 0.9 } else { 0.1 } },
            );
        }
        let path = root.path().join(format!("{name}.tsv"));
        write_sentence_predictions(&path, &preds).unwrap();
        path
    };
    external("ext1", 0.08, &mut rng);
    external("ext2", 0.18, &mut rng);
    let manifest = root.path().join("ensemble.manifest");
    fs::write(
        &manifest,
        "# external sentence prediction columns\ncolumn\text1\t0.9\text1.tsv\ncolumn\text2\t0.8\text2.tsv\n",
    )
    .unwrap();

    Synthetic {
        corpus_dir,
        slc_labels,
        flc_labels,
        loaded_words,
        sentiment,
        embeddings,
        manifest,
        docs,
        slc_gold,
        flc_gold,
        duplicates,
        root,
    }
}
