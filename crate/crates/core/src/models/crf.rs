//! Linear-chain CRF over BIO tags with binary token features.
//!
//! Parameters are emission weights (feature × tag), a start-transition row,
//! and a tag × tag transition matrix. Structurally impossible transitions —
//! anything entering `I-t` from a tag that is not `B-t`/`I-t`, including the
//! start of the sentence — are pinned to a large negative constant and stay
//! frozen: they take no gradient and pay no penalty. That keeps every decoded
//! sequence well-formed without a separate repair pass.
//!
//! Training maximises the conditional log-likelihood minus an L2 penalty by
//! full-batch gradient ascent with a halving step size. Inference is Viterbi
//! with ties broken toward the lowest tag index (`O` is index 0).

use std::collections::{BTreeSet, HashMap};
use std::fs;
use std::path::Path;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;

use super::MODEL_MAGIC;
use crate::corpus::{BioTag, TagSequence};
use crate::error::{Error, Result};

/// Score pinned on impossible transitions. Large enough that `exp` of any
/// path through one underflows to zero, small enough to keep sums finite.
pub const INVALID_TRANSITION_SCORE: f64 = -10_000.0;

/// The decoding tag inventory: `O` first, then `B-t`, `I-t` for each
/// technique in sorted order.
#[derive(Debug, Clone, PartialEq)]
pub struct TagSet {
    tags: Vec<BioTag>,
    index: HashMap<BioTag, usize>,
}

impl TagSet {
    pub fn from_techniques<S: AsRef<str>>(techniques: &[S]) -> TagSet {
        let unique: BTreeSet<&str> = techniques.iter().map(AsRef::as_ref).collect();
        let mut tags = vec![BioTag::Outside];
        for t in unique {
            tags.push(BioTag::Begin(t.to_string()));
            tags.push(BioTag::Inside(t.to_string()));
        }
        let index = tags.iter().cloned().enumerate().map(|(i, t)| (t, i)).collect();
        TagSet { tags, index }
    }

    pub fn tags(&self) -> &[BioTag] {
        &self.tags
    }

    pub fn len(&self) -> usize {
        self.tags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tags.is_empty()
    }

    pub fn index_of(&self, tag: &BioTag) -> Option<usize> {
        self.index.get(tag).copied()
    }
}

/// Can `next` follow `prev` in a well-formed BIO sequence?
pub fn transition_valid(prev: &BioTag, next: &BioTag) -> bool {
    match next {
        BioTag::Inside(t) => matches!(prev, BioTag::Begin(s) | BioTag::Inside(s) if s == t),
        _ => true,
    }
}

/// Can a sequence open with `tag`?
pub fn start_valid(tag: &BioTag) -> bool {
    !matches!(tag, BioTag::Inside(_))
}

/// One training sequence: per-token active feature names plus gold tags.
#[derive(Debug, Clone)]
pub struct CrfExample {
    pub features: Vec<Vec<String>>,
    pub tags: Vec<BioTag>,
}

#[derive(Debug, Clone, Copy)]
pub struct CrfConfig {
    pub l2: f64,
    pub epochs: usize,
    pub learning_rate: f64,
    /// Seeds the small random initialisation; training is deterministic
    /// given the seed and the example order.
    pub seed: u64,
}

impl Default for CrfConfig {
    fn default() -> Self {
        CrfConfig {
            l2: 1e-3,
            epochs: 100,
            learning_rate: 0.1,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrfModel {
    tag_set: TagSet,
    feature_names: Vec<String>,
    feature_index: HashMap<String, usize>,
    /// feature × tag, row-major.
    emission: Vec<f64>,
    /// Score of opening with each tag.
    start: Vec<f64>,
    /// prev × next, row-major.
    trans: Vec<f64>,
    l2: f64,
}

fn logsumexp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Fit a model on `examples` with the tag inventory derived from
/// `techniques`. Gold sequences must be well-formed BIO over that inventory.
pub fn train_crf<S: AsRef<str>>(
    examples: &[CrfExample],
    techniques: &[S],
    config: &CrfConfig,
) -> Result<CrfModel> {
    let tag_set = TagSet::from_techniques(techniques);
    if examples.is_empty() {
        return Err(Error::InvalidInput("no training sequences".into()));
    }
    if config.l2 < 0.0 {
        return Err(Error::InvalidInput(format!("l2 strength must be non-negative, got {}", config.l2)));
    }
    for (i, ex) in examples.iter().enumerate() {
        if ex.features.len() != ex.tags.len() {
            return Err(Error::InvalidInput(format!(
                "sequence {i}: {} feature sets but {} tags",
                ex.features.len(),
                ex.tags.len()
            )));
        }
        if ex.tags.is_empty() {
            return Err(Error::InvalidInput(format!("sequence {i} is empty")));
        }
        for tag in &ex.tags {
            if tag_set.index_of(tag).is_none() {
                return Err(Error::InvalidInput(format!(
                    "sequence {i} uses tag `{tag}` outside the declared techniques"
                )));
            }
        }
        if !start_valid(&ex.tags[0])
            || ex.tags.windows(2).any(|w| !transition_valid(&w[0], &w[1]))
        {
            return Err(Error::InvalidInput(format!(
                "sequence {i} is not well-formed BIO (an I-tag lacks its B-tag)"
            )));
        }
    }

    let names: BTreeSet<&str> = examples
        .iter()
        .flat_map(|ex| ex.features.iter())
        .flat_map(|fs| fs.iter().map(String::as_str))
        .collect();
    let feature_names: Vec<String> = names.into_iter().map(str::to_string).collect();
    let feature_index: HashMap<String, usize> = feature_names
        .iter()
        .enumerate()
        .map(|(i, n)| (n.clone(), i))
        .collect();

    let t = tag_set.len();
    let f = feature_names.len();
    let mut rng = ChaCha20Rng::seed_from_u64(config.seed);
    let draw = |rng: &mut ChaCha20Rng| rng.gen_range(-0.01..0.01);
    let mut emission = Vec::with_capacity(f * t);
    for _ in 0..f * t {
        emission.push(draw(&mut rng));
    }
    let mut start = Vec::with_capacity(t);
    for ti in 0..t {
        let v = draw(&mut rng);
        start.push(if start_valid(&tag_set.tags[ti]) { v } else { INVALID_TRANSITION_SCORE });
    }
    let mut trans = Vec::with_capacity(t * t);
    for p in 0..t {
        for n in 0..t {
            let v = draw(&mut rng);
            trans.push(if transition_valid(&tag_set.tags[p], &tag_set.tags[n]) {
                v
            } else {
                INVALID_TRANSITION_SCORE
            });
        }
    }

    let mut model = CrfModel {
        tag_set,
        feature_names,
        feature_index,
        emission,
        start,
        trans,
        l2: config.l2,
    };

    // Pre-index the examples once.
    let indexed: Vec<IndexedExample> = examples.iter().map(|ex| model.index_example(ex).unwrap()).collect();

    let mut obj = model.objective_indexed(&indexed);
    for _ in 0..config.epochs {
        let grad = model.gradient_indexed(&indexed);
        let params = model.param_vector();
        // Backtracking line search, restarted from the configured step each
        // epoch (see train_logreg).
        let mut lr = config.learning_rate;
        loop {
            let stepped: Vec<f64> = params.iter().zip(&grad).map(|(p, g)| p + lr * g).collect();
            let mut candidate = model.clone();
            candidate.set_param_vector(&stepped)?;
            let new_obj = candidate.objective_indexed(&indexed);
            if new_obj >= obj {
                model = candidate;
                obj = new_obj;
                break;
            }
            lr /= 2.0;
            if lr < 1e-12 {
                return Ok(model);
            }
        }
    }
    Ok(model)
}

/// An example with features resolved to ids and tags to indices.
struct IndexedExample {
    features: Vec<Vec<usize>>,
    tags: Vec<usize>,
}

impl CrfModel {
    /// Assemble a model from explicit parts; mainly for tests and oracle
    /// comparisons. Invalid transition slots are overwritten with the frozen
    /// constant regardless of the supplied values.
    pub fn from_parts(
        tag_set: TagSet,
        feature_names: Vec<String>,
        emission: Vec<f64>,
        start: Vec<f64>,
        trans: Vec<f64>,
        l2: f64,
    ) -> Result<CrfModel> {
        let t = tag_set.len();
        let f = feature_names.len();
        if emission.len() != f * t || start.len() != t || trans.len() != t * t {
            return Err(Error::InvalidInput(format!(
                "parameter shapes do not match {f} features × {t} tags"
            )));
        }
        let feature_index = feature_names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), i))
            .collect();
        let mut model = CrfModel {
            tag_set,
            feature_names,
            feature_index,
            emission,
            start,
            trans,
            l2,
        };
        model.freeze_invalid();
        Ok(model)
    }

    fn freeze_invalid(&mut self) {
        let t = self.tag_set.len();
        for ti in 0..t {
            if !start_valid(&self.tag_set.tags[ti]) {
                self.start[ti] = INVALID_TRANSITION_SCORE;
            }
        }
        for p in 0..t {
            for n in 0..t {
                if !transition_valid(&self.tag_set.tags[p], &self.tag_set.tags[n]) {
                    self.trans[p * t + n] = INVALID_TRANSITION_SCORE;
                }
            }
        }
    }

    pub fn tag_set(&self) -> &TagSet {
        &self.tag_set
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn l2(&self) -> f64 {
        self.l2
    }

    fn index_example(&self, ex: &CrfExample) -> Result<IndexedExample> {
        let features = ex
            .features
            .iter()
            .map(|fs| {
                fs.iter()
                    .filter_map(|n| self.feature_index.get(n).copied())
                    .collect()
            })
            .collect();
        let tags = ex
            .tags
            .iter()
            .map(|tag| {
                self.tag_set
                    .index_of(tag)
                    .ok_or_else(|| Error::InvalidInput(format!("tag `{tag}` is outside the model's tag set")))
            })
            .collect::<Result<Vec<usize>>>()?;
        Ok(IndexedExample { features, tags })
    }

    /// Unknown feature names contribute nothing, matching decode behaviour.
    fn token_feature_ids(&self, features: &[Vec<String>]) -> Vec<Vec<usize>> {
        features
            .iter()
            .map(|fs| {
                fs.iter()
                    .filter_map(|n| self.feature_index.get(n).copied())
                    .collect()
            })
            .collect()
    }

    fn emit_scores(&self, ids: &[Vec<usize>]) -> Vec<Vec<f64>> {
        let t = self.tag_set.len();
        ids.iter()
            .map(|fs| {
                let mut row = vec![0.0; t];
                for &fid in fs {
                    for (ti, r) in row.iter_mut().enumerate() {
                        *r += self.emission[fid * t + ti];
                    }
                }
                row
            })
            .collect()
    }

    fn forward(&self, emit: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let t = self.tag_set.len();
        let n = emit.len();
        let mut alpha = vec![vec![0.0; t]; n];
        for ti in 0..t {
            alpha[0][ti] = self.start[ti] + emit[0][ti];
        }
        let mut scratch = vec![0.0; t];
        for i in 1..n {
            for ti in 0..t {
                for (p, s) in scratch.iter_mut().enumerate() {
                    *s = alpha[i - 1][p] + self.trans[p * t + ti];
                }
                alpha[i][ti] = emit[i][ti] + logsumexp(&scratch);
            }
        }
        alpha
    }

    fn backward(&self, emit: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let t = self.tag_set.len();
        let n = emit.len();
        let mut beta = vec![vec![0.0; t]; n];
        let mut scratch = vec![0.0; t];
        for i in (0..n - 1).rev() {
            for p in 0..t {
                for (ti, s) in scratch.iter_mut().enumerate() {
                    *s = self.trans[p * t + ti] + emit[i + 1][ti] + beta[i + 1][ti];
                }
                beta[i][p] = logsumexp(&scratch);
            }
        }
        beta
    }

    /// Log of the partition function over all tag sequences.
    pub fn log_partition(&self, features: &[Vec<String>]) -> f64 {
        if features.is_empty() {
            return 0.0;
        }
        let ids = self.token_feature_ids(features);
        let emit = self.emit_scores(&ids);
        let alpha = self.forward(&emit);
        logsumexp(alpha.last().unwrap())
    }

    /// Unnormalised path score of `tags` for `features`.
    pub fn sequence_score(&self, features: &[Vec<String>], tags: &TagSequence) -> Result<f64> {
        if features.len() != tags.len() {
            return Err(Error::InvalidInput(format!(
                "{} feature sets but {} tags",
                features.len(),
                tags.len()
            )));
        }
        if features.is_empty() {
            return Ok(0.0);
        }
        let t = self.tag_set.len();
        let ids = self.token_feature_ids(features);
        let emit = self.emit_scores(&ids);
        let tag_ids: Vec<usize> = tags
            .tags
            .iter()
            .map(|tag| {
                self.tag_set
                    .index_of(tag)
                    .ok_or_else(|| Error::InvalidInput(format!("tag `{tag}` is outside the model's tag set")))
            })
            .collect::<Result<_>>()?;
        let mut score = self.start[tag_ids[0]] + emit[0][tag_ids[0]];
        for i in 1..tag_ids.len() {
            score += self.trans[tag_ids[i - 1] * t + tag_ids[i]] + emit[i][tag_ids[i]];
        }
        Ok(score)
    }

    /// Conditional log-likelihood of the gold tags given the features.
    pub fn log_likelihood(&self, example: &CrfExample) -> Result<f64> {
        let score = self.sequence_score(&example.features, &TagSequence::new(example.tags.clone()))?;
        Ok(score - self.log_partition(&example.features))
    }

    /// Sum of log-likelihoods minus the L2 penalty on free parameters.
    pub fn objective(&self, examples: &[CrfExample]) -> Result<f64> {
        let indexed: Vec<IndexedExample> = examples
            .iter()
            .map(|ex| self.index_example(ex))
            .collect::<Result<_>>()?;
        Ok(self.objective_indexed(&indexed))
    }

    fn objective_indexed(&self, examples: &[IndexedExample]) -> f64 {
        let t = self.tag_set.len();
        let mut total = 0.0;
        for ex in examples {
            let emit = self.emit_scores(&ex.features);
            let mut gold = self.start[ex.tags[0]] + emit[0][ex.tags[0]];
            for i in 1..ex.tags.len() {
                gold += self.trans[ex.tags[i - 1] * t + ex.tags[i]] + emit[i][ex.tags[i]];
            }
            let alpha = self.forward(&emit);
            total += gold - logsumexp(alpha.last().unwrap());
        }
        total - 0.5 * self.l2 * self.free_norm_sq()
    }

    fn free_norm_sq(&self) -> f64 {
        let t = self.tag_set.len();
        let mut sum: f64 = self.emission.iter().map(|w| w * w).sum();
        for ti in 0..t {
            if start_valid(&self.tag_set.tags[ti]) {
                sum += self.start[ti] * self.start[ti];
            }
        }
        for p in 0..t {
            for n in 0..t {
                if transition_valid(&self.tag_set.tags[p], &self.tag_set.tags[n]) {
                    sum += self.trans[p * t + n] * self.trans[p * t + n];
                }
            }
        }
        sum
    }

    /// Gradient of [`objective`](Self::objective), aligned with
    /// [`param_vector`](Self::param_vector).
    pub fn objective_gradient(&self, examples: &[CrfExample]) -> Result<Vec<f64>> {
        let indexed: Vec<IndexedExample> = examples
            .iter()
            .map(|ex| self.index_example(ex))
            .collect::<Result<_>>()?;
        Ok(self.gradient_indexed(&indexed))
    }

    fn gradient_indexed(&self, examples: &[IndexedExample]) -> Vec<f64> {
        let t = self.tag_set.len();
        let f = self.feature_names.len();
        let mut g_emission = vec![0.0; f * t];
        let mut g_start = vec![0.0; t];
        let mut g_trans = vec![0.0; t * t];

        for ex in examples {
            let n = ex.tags.len();
            let emit = self.emit_scores(&ex.features);
            let alpha = self.forward(&emit);
            let beta = self.backward(&emit);
            let logz = logsumexp(alpha.last().unwrap());

            // Gold counts.
            g_start[ex.tags[0]] += 1.0;
            for i in 0..n {
                for &fid in &ex.features[i] {
                    g_emission[fid * t + ex.tags[i]] += 1.0;
                }
                if i > 0 {
                    g_trans[ex.tags[i - 1] * t + ex.tags[i]] += 1.0;
                }
            }
            // Expected counts under the model.
            for i in 0..n {
                for ti in 0..t {
                    let m = (alpha[i][ti] + beta[i][ti] - logz).exp();
                    if i == 0 {
                        g_start[ti] -= m;
                    }
                    for &fid in &ex.features[i] {
                        g_emission[fid * t + ti] -= m;
                    }
                }
            }
            for i in 1..n {
                for p in 0..t {
                    for ti in 0..t {
                        let m = (alpha[i - 1][p] + self.trans[p * t + ti] + emit[i][ti] + beta[i][ti]
                            - logz)
                            .exp();
                        g_trans[p * t + ti] -= m;
                    }
                }
            }
        }

        // L2 on free parameters; frozen slots take no gradient at all.
        for (g, w) in g_emission.iter_mut().zip(&self.emission) {
            *g -= self.l2 * w;
        }
        let mut grad = g_emission;
        for ti in 0..t {
            if start_valid(&self.tag_set.tags[ti]) {
                grad.push(g_start[ti] - self.l2 * self.start[ti]);
            }
        }
        for p in 0..t {
            for n in 0..t {
                if transition_valid(&self.tag_set.tags[p], &self.tag_set.tags[n]) {
                    grad.push(g_trans[p * t + n] - self.l2 * self.trans[p * t + n]);
                }
            }
        }
        grad
    }

    /// Free parameters flattened: emissions, valid start entries, valid
    /// transition entries, in fixed order. Frozen slots are excluded.
    pub fn param_vector(&self) -> Vec<f64> {
        let t = self.tag_set.len();
        let mut v = self.emission.clone();
        for ti in 0..t {
            if start_valid(&self.tag_set.tags[ti]) {
                v.push(self.start[ti]);
            }
        }
        for p in 0..t {
            for n in 0..t {
                if transition_valid(&self.tag_set.tags[p], &self.tag_set.tags[n]) {
                    v.push(self.trans[p * t + n]);
                }
            }
        }
        v
    }

    pub fn set_param_vector(&mut self, params: &[f64]) -> Result<()> {
        let expected = self.param_vector().len();
        if params.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                actual: params.len(),
            });
        }
        let t = self.tag_set.len();
        let mut it = params.iter();
        for w in self.emission.iter_mut() {
            *w = *it.next().unwrap();
        }
        for ti in 0..t {
            if start_valid(&self.tag_set.tags[ti]) {
                self.start[ti] = *it.next().unwrap();
            }
        }
        for p in 0..t {
            for n in 0..t {
                if transition_valid(&self.tag_set.tags[p], &self.tag_set.tags[n]) {
                    self.trans[p * t + n] = *it.next().unwrap();
                }
            }
        }
        Ok(())
    }

    /// Highest-scoring tag sequence. Ties prefer the lowest tag index, both
    /// for predecessors and for the final tag, so decoding is deterministic.
    pub fn viterbi(&self, features: &[Vec<String>]) -> TagSequence {
        let n = features.len();
        if n == 0 {
            return TagSequence::new(Vec::new());
        }
        let t = self.tag_set.len();
        let ids = self.token_feature_ids(features);
        let emit = self.emit_scores(&ids);
        let mut dp = vec![vec![0.0; t]; n];
        let mut bp = vec![vec![0usize; t]; n];
        for ti in 0..t {
            dp[0][ti] = self.start[ti] + emit[0][ti];
        }
        for i in 1..n {
            for ti in 0..t {
                let mut best_p = 0;
                let mut best = dp[i - 1][0] + self.trans[ti];
                for p in 1..t {
                    let s = dp[i - 1][p] + self.trans[p * t + ti];
                    if s > best {
                        best = s;
                        best_p = p;
                    }
                }
                dp[i][ti] = best + emit[i][ti];
                bp[i][ti] = best_p;
            }
        }
        let mut last = 0;
        for ti in 1..t {
            if dp[n - 1][ti] > dp[n - 1][last] {
                last = ti;
            }
        }
        let mut path = vec![0usize; n];
        path[n - 1] = last;
        for i in (1..n).rev() {
            path[i - 1] = bp[i][path[i]];
        }
        TagSequence::new(path.into_iter().map(|assigned| self.tag_set.tags[assigned].clone()).collect())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let t = self.tag_set.len();
        let mut out = String::new();
        out.push_str(MODEL_MAGIC);
        out.push('\n');
        out.push_str("type\tcrf\n");
        out.push_str(&format!("l2\t{}\n", self.l2));
        out.push_str(&format!("tags\t{t}\n"));
        for tag in self.tag_set.tags() {
            out.push_str(&format!("t\t{tag}\n"));
        }
        out.push_str(&format!("start\t{}\n", join_floats(&self.start)));
        for p in 0..t {
            out.push_str(&format!("trans\t{p}\t{}\n", join_floats(&self.trans[p * t..(p + 1) * t])));
        }
        out.push_str(&format!("features\t{}\n", self.feature_names.len()));
        for (i, name) in self.feature_names.iter().enumerate() {
            out.push_str(&format!("f\t{name}\t{}\n", join_floats(&self.emission[i * t..(i + 1) * t])));
        }
        fs::write(path, out).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut lines = content.lines().enumerate();
        let mut take = |what: &str| {
            lines
                .next()
                .ok_or_else(|| Error::parse(path, 0, format!("missing {what}")))
        };
        let (_, magic) = take("magic")?;
        if magic != MODEL_MAGIC {
            return Err(Error::parse(path, 1, "not a model file"));
        }
        let (_, kind) = take("type")?;
        if kind != "type\tcrf" {
            return Err(Error::parse(path, 2, "not a crf model"));
        }
        let field = |line: (usize, &str), name: &str| -> Result<String> {
            let (lineno, text) = line;
            let Some((key, value)) = text.split_once('\t') else {
                return Err(Error::parse(path, lineno + 1, "expected `key<TAB>value`"));
            };
            if key != name {
                return Err(Error::parse(path, lineno + 1, format!("expected `{name}`, got `{key}`")));
            }
            Ok(value.to_string())
        };
        let l2: f64 = field(take("l2")?, "l2")?
            .parse()
            .map_err(|_| Error::parse(path, 3, "bad l2"))?;
        let tag_count: usize = field(take("tags")?, "tags")?
            .parse()
            .map_err(|_| Error::parse(path, 4, "bad tag count"))?;
        let mut tags = Vec::with_capacity(tag_count);
        for _ in 0..tag_count {
            let value = field(take("tag")?, "t")?;
            tags.push(value.parse::<BioTag>()?);
        }
        let start = parse_floats(&field(take("start")?, "start")?, tag_count, path)?;
        let mut trans = Vec::with_capacity(tag_count * tag_count);
        for p in 0..tag_count {
            let (lineno, line) = take("trans row")?;
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 3 || fields[0] != "trans" || fields[1] != p.to_string() {
                return Err(Error::parse(path, lineno + 1, format!("expected `trans<TAB>{p}<TAB>row`")));
            }
            trans.extend(parse_floats(fields[2], tag_count, path)?);
        }
        let feat_count: usize = field(take("features")?, "features")?
            .parse()
            .map_err(|_| Error::parse(path, 0, "bad feature count"))?;
        let mut feature_names = Vec::with_capacity(feat_count);
        let mut emission = Vec::with_capacity(feat_count * tag_count);
        for _ in 0..feat_count {
            let (lineno, line) = take("feature row")?;
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 3 || fields[0] != "f" {
                return Err(Error::parse(path, lineno + 1, "expected `f<TAB>name<TAB>weights`"));
            }
            feature_names.push(fields[1].to_string());
            emission.extend(parse_floats(fields[2], tag_count, path)?);
        }
        let index = tags.iter().cloned().enumerate().map(|(i, tag)| (tag, i)).collect();
        let tag_set = TagSet { tags, index };
        CrfModel::from_parts(tag_set, feature_names, emission, start, trans, l2)
    }
}

fn join_floats(xs: &[f64]) -> String {
    xs.iter().map(f64::to_string).collect::<Vec<_>>().join(" ")
}

fn parse_floats(s: &str, expected: usize, path: &Path) -> Result<Vec<f64>> {
    let values: Vec<f64> = s
        .split(' ')
        .map(|v| v.parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::InvalidInput(format!("{}: bad float row", path.display())))?;
    if values.len() != expected {
        return Err(Error::InvalidInput(format!(
            "{}: row has {} values, expected {expected}",
            path.display(),
            values.len()
        )));
    }
    Ok(values)
}
