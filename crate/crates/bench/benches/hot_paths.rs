//! Benchmarks for the paths that dominate a full run: CRF training and
//! decoding, span merging, token feature extraction, sentence-model
//! training, and topic fitting.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use propdetect_core::corpus::{Document, Fragment};
use propdetect_core::ensemble::merge_fragments;
use propdetect_core::features::{FeatureVector, Lexicons};
use propdetect_core::models::{
    token_features, train_crf, train_logreg, CrfConfig, CrfExample, CrfModel, LogRegConfig,
    TagSet, TokenFeatureConfig,
};
use propdetect_core::topics::{fit_lda_tokens, LdaParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

const TECHNIQUES: [&str; 5] =
    ["Loaded_Language", "Name_Calling", "Repetition", "Doubt", "Slogans"];

fn random_token_features(
    rng: &mut ChaCha20Rng,
    pool: &[String],
    tokens: usize,
) -> Vec<Vec<String>> {
    (0..tokens)
        .map(|_| (0..3).map(|_| pool[rng.gen_range(0..pool.len())].clone()).collect())
        .collect()
}

fn bench_viterbi(c: &mut Criterion) {
    let mut rng = ChaCha20Rng::seed_from_u64(1);
    let pool: Vec<String> = (0..200).map(|i| format!("w{i}")).collect();
    let tag_set = TagSet::from_techniques(&TECHNIQUES);
    let t = tag_set.len();
    let f = pool.len();
    let emission: Vec<f64> = (0..f * t).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let start: Vec<f64> = (0..t).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let trans: Vec<f64> = (0..t * t).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let model = CrfModel::from_parts(tag_set, pool.clone(), emission, start, trans, 1e-3).unwrap();
    let features = random_token_features(&mut rng, &pool, 30);
    c.bench_function("viterbi_30_tokens_11_tags", |b| {
        b.iter(|| model.viterbi(black_box(&features)))
    });
}

fn bench_train_crf(c: &mut Criterion) {
    let mut rng = ChaCha20Rng::seed_from_u64(2);
    let pool: Vec<String> = (0..80).map(|i| format!("w{i}")).collect();
    let examples: Vec<CrfExample> = (0..20)
        .map(|_| {
            let doc = Document::from_text(
                "b",
                "alpha beta gamma delta epsilon zeta eta theta iota kappa",
            );
            let sentence = doc.retained_sentences().next().unwrap();
            let fragment = Fragment::new(
                "b",
                sentence.tokens[2].span.start,
                sentence.tokens[4].span.end,
                TECHNIQUES[rng.gen_range(0..TECHNIQUES.len())],
            );
            let tags = propdetect_core::corpus::encode_bio(sentence, &[fragment]).tags;
            CrfExample { features: random_token_features(&mut rng, &pool, tags.len()), tags }
        })
        .collect();
    let config = CrfConfig { epochs: 10, ..CrfConfig::default() };
    c.bench_function("train_crf_20_sequences_10_epochs", |b| {
        b.iter(|| train_crf(black_box(&examples), &TECHNIQUES, &config).unwrap())
    });
}

fn bench_merge_fragments(c: &mut Criterion) {
    let mut rng = ChaCha20Rng::seed_from_u64(3);
    let sources: Vec<Vec<Fragment>> = (0..3)
        .map(|_| {
            (0..300)
                .map(|_| {
                    let article = format!("{:02}", rng.gen_range(1..=20));
                    let s = rng.gen_range(0..2000);
                    let e = s + rng.gen_range(5..=60);
                    Fragment::new(article, s, e, TECHNIQUES[rng.gen_range(0..TECHNIQUES.len())])
                })
                .collect()
        })
        .collect();
    c.bench_function("merge_fragments_3x300", |b| {
        b.iter(|| merge_fragments(black_box(&sources)))
    });
}

fn bench_token_features(c: &mut Criterion) {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("loaded.txt");
    std::fs::write(&path, "scourge\nutter betrayal\npuppet\n").unwrap();
    let mut lexicons = Lexicons::default();
    lexicons.load_loaded_words(&path).unwrap();
    let doc = Document::from_text(
        "b",
        "The council met on Tuesday to discuss the harbor works, and the mayor \
         called the plan an utter betrayal of every honest family in the village.",
    );
    let sentence = doc.retained_sentences().next().unwrap();
    c.bench_function("token_features_lexical_28_tokens", |b| {
        b.iter(|| token_features(black_box(sentence), TokenFeatureConfig::Lexical, &lexicons))
    });
}

fn bench_train_logreg(c: &mut Criterion) {
    let mut rng = ChaCha20Rng::seed_from_u64(4);
    let mut features = Vec::new();
    let mut labels = Vec::new();
    for i in 0..500 {
        let mut fv = FeatureVector::new("bench");
        for d in 0..40 {
            fv.push(format!("x{d}"), rng.gen_range(-1.0..1.0));
        }
        features.push(fv);
        labels.push(i % 3 == 0);
    }
    let config = LogRegConfig { epochs: 50, ..LogRegConfig::default() };
    c.bench_function("train_logreg_500x40_50_epochs", |b| {
        b.iter(|| train_logreg(black_box(&features), &labels, &config).unwrap())
    });
}

fn bench_fit_lda(c: &mut Criterion) {
    let mut rng = ChaCha20Rng::seed_from_u64(5);
    let vocab: Vec<String> = (0..400).map(|i| format!("word{i:03}")).collect();
    let docs: Vec<Vec<String>> = (0..100)
        .map(|_| (0..30).map(|_| vocab[rng.gen_range(0..vocab.len())].clone()).collect())
        .collect();
    let params = LdaParams {
        topics: 5,
        alpha: 0.5,
        beta: 0.01,
        iterations: 100,
        inference_passes: 10,
        seed: 9,
    };
    c.bench_function("fit_lda_100_docs_5_topics_100_sweeps", |b| {
        b.iter(|| fit_lda_tokens(black_box(&docs), &params).unwrap())
    });
}

criterion_group!(
    benches,
    bench_viterbi,
    bench_train_crf,
    bench_merge_fragments,
    bench_token_features,
    bench_train_logreg,
    bench_fit_lda
);
criterion_main!(benches);
