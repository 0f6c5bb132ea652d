//! L2-regularised logistic regression, trained by full-batch gradient
//! descent from a zero initialisation. The loss is convex, so there is no
//! seed: two trainings on the same data produce identical models.
//!
//! The step size self-tunes: whenever a step would increase the objective it
//! is halved and retried, which makes the default learning rate safe on any
//! feature scale.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use super::MODEL_MAGIC;
use crate::error::{Error, Result};
use crate::features::FeatureVector;

#[derive(Debug, Clone, Copy)]
pub struct LogRegConfig {
    pub l2: f64,
    pub epochs: usize,
    pub learning_rate: f64,
}

impl Default for LogRegConfig {
    fn default() -> Self {
        LogRegConfig {
            l2: 1e-3,
            epochs: 200,
            learning_rate: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogRegModel {
    schema_id: String,
    feature_names: Vec<String>,
    weights: Vec<f64>,
    bias: f64,
    l2: f64,
}

/// Threshold rule for turning probabilities into labels: positive iff
/// `p >= tau`. The boundary itself counts as positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecisionRule {
    tau: f64,
}

/// Candidate thresholds, tried in this order; ties in dev F1 keep the
/// earliest entry.
pub const DEFAULT_TAU_GRID: [f64; 3] = [0.50, 0.40, 0.35];

impl DecisionRule {
    pub fn new(tau: f64) -> Result<Self> {
        if !(tau > 0.0 && tau < 1.0) {
            return Err(Error::InvalidInput(format!("threshold must lie in (0, 1), got {tau}")));
        }
        Ok(DecisionRule { tau })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn decide(&self, probability: f64) -> bool {
        probability >= self.tau
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Fit a model. Requires at least one example of each class and a uniform
/// feature schema across examples.
pub fn train_logreg(
    features: &[FeatureVector],
    labels: &[bool],
    config: &LogRegConfig,
) -> Result<LogRegModel> {
    if features.len() != labels.len() {
        return Err(Error::InvalidInput(format!(
            "{} feature vectors but {} labels",
            features.len(),
            labels.len()
        )));
    }
    if features.is_empty() {
        return Err(Error::InvalidInput("no training examples".into()));
    }
    if labels.iter().all(|&l| l) || labels.iter().all(|&l| !l) {
        return Err(Error::InvalidInput("training data contains only one class".into()));
    }
    if config.l2 < 0.0 {
        return Err(Error::InvalidInput(format!("l2 strength must be non-negative, got {}", config.l2)));
    }
    let schema = features[0].schema_id();
    for fv in features {
        if fv.schema_id() != schema {
            return Err(Error::SchemaMismatch {
                expected: schema.to_string(),
                actual: fv.schema_id().to_string(),
            });
        }
    }

    let mut model = LogRegModel {
        schema_id: schema.to_string(),
        feature_names: features[0].names().to_vec(),
        weights: vec![0.0; features[0].len()],
        bias: 0.0,
        l2: config.l2,
    };
    let mut loss = model.objective(features, labels)?;
    for _ in 0..config.epochs {
        let grad = model.objective_gradient(features, labels)?;
        let params = model.param_vector();
        // Backtracking line search: start each epoch at the configured step
        // and halve until the loss stops increasing, so one badly scaled
        // early epoch cannot pin every later epoch to a microscopic step.
        let mut lr = config.learning_rate;
        loop {
            let stepped: Vec<f64> = params.iter().zip(&grad).map(|(p, g)| p - lr * g).collect();
            let mut candidate = model.clone();
            candidate.set_param_vector(&stepped)?;
            let new_loss = candidate.objective(features, labels)?;
            if new_loss <= loss {
                model = candidate;
                loss = new_loss;
                break;
            }
            lr /= 2.0;
            if lr < 1e-12 {
                // No step along this gradient helps; we are at numerical
                // convergence.
                return Ok(model);
            }
        }
    }
    Ok(model)
}

impl LogRegModel {
    pub fn schema_id(&self) -> &str {
        &self.schema_id
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn l2(&self) -> f64 {
        self.l2
    }

    fn check_schema(&self, fv: &FeatureVector) -> Result<()> {
        if fv.schema_id() != self.schema_id {
            return Err(Error::SchemaMismatch {
                expected: self.schema_id.clone(),
                actual: fv.schema_id().to_string(),
            });
        }
        Ok(())
    }

    /// P(positive) for one sentence's features.
    pub fn predict_proba(&self, fv: &FeatureVector) -> Result<f64> {
        self.check_schema(fv)?;
        let z: f64 = self
            .weights
            .iter()
            .zip(fv.values())
            .map(|(w, x)| w * x)
            .sum::<f64>()
            + self.bias;
        Ok(sigmoid(z))
    }

    /// Mean cross-entropy plus `l2/2 * ||w||^2`; the bias is unpenalised.
    pub fn objective(&self, features: &[FeatureVector], labels: &[bool]) -> Result<f64> {
        let mut total = 0.0;
        for (fv, &y) in features.iter().zip(labels) {
            self.check_schema(fv)?;
            let z: f64 = self
                .weights
                .iter()
                .zip(fv.values())
                .map(|(w, x)| w * x)
                .sum::<f64>()
                + self.bias;
            // Stable form of -[y ln p + (1-y) ln (1-p)].
            total += z.max(0.0) - z * f64::from(y) + (-z.abs()).exp().ln_1p();
        }
        let penalty = 0.5 * self.l2 * self.weights.iter().map(|w| w * w).sum::<f64>();
        Ok(total / features.len() as f64 + penalty)
    }

    /// Gradient of [`objective`](Self::objective) in `param_vector` layout
    /// (weights then bias).
    pub fn objective_gradient(&self, features: &[FeatureVector], labels: &[bool]) -> Result<Vec<f64>> {
        let n = features.len() as f64;
        let mut gw = vec![0.0; self.weights.len()];
        let mut gb = 0.0;
        for (fv, &y) in features.iter().zip(labels) {
            self.check_schema(fv)?;
            let z: f64 = self
                .weights
                .iter()
                .zip(fv.values())
                .map(|(w, x)| w * x)
                .sum::<f64>()
                + self.bias;
            let coef = (sigmoid(z) - f64::from(y)) / n;
            for (g, x) in gw.iter_mut().zip(fv.values()) {
                *g += coef * x;
            }
            gb += coef;
        }
        for (g, w) in gw.iter_mut().zip(&self.weights) {
            *g += self.l2 * w;
        }
        gw.push(gb);
        Ok(gw)
    }

    /// Free parameters as one flat vector: weights, then the bias.
    pub fn param_vector(&self) -> Vec<f64> {
        let mut v = self.weights.clone();
        v.push(self.bias);
        v
    }

    pub fn set_param_vector(&mut self, params: &[f64]) -> Result<()> {
        if params.len() != self.weights.len() + 1 {
            return Err(Error::DimensionMismatch {
                expected: self.weights.len() + 1,
                actual: params.len(),
            });
        }
        self.weights.copy_from_slice(&params[..params.len() - 1]);
        self.bias = params[params.len() - 1];
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut out = String::new();
        out.push_str(MODEL_MAGIC);
        out.push('\n');
        out.push_str("type\tlogreg\n");
        out.push_str(&format!("schema\t{}\n", self.schema_id));
        out.push_str(&format!("l2\t{}\n", self.l2));
        out.push_str(&format!("bias\t{}\n", self.bias));
        out.push_str(&format!("features\t{}\n", self.feature_names.len()));
        for (name, w) in self.feature_names.iter().zip(&self.weights) {
            out.push_str(&format!("f\t{name}\t{w}\n"));
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
        if kind != "type\tlogreg" {
            return Err(Error::parse(path, 2, "not a logreg model"));
        }
        let mut header: BTreeMap<String, String> = BTreeMap::new();
        for name in ["schema", "l2", "bias", "features"] {
            let (lineno, line) = take(name)?;
            let Some((key, value)) = line.split_once('\t') else {
                return Err(Error::parse(path, lineno + 1, "expected `key<TAB>value`"));
            };
            if key != name {
                return Err(Error::parse(path, lineno + 1, format!("expected `{name}`, got `{key}`")));
            }
            header.insert(key.to_string(), value.to_string());
        }
        let l2: f64 = header["l2"].parse().map_err(|_| Error::parse(path, 4, "bad l2"))?;
        let bias: f64 = header["bias"].parse().map_err(|_| Error::parse(path, 5, "bad bias"))?;
        let count: usize = header["features"].parse().map_err(|_| Error::parse(path, 6, "bad feature count"))?;
        let mut feature_names = Vec::with_capacity(count);
        let mut weights = Vec::with_capacity(count);
        for _ in 0..count {
            let (lineno, line) = take("feature row")?;
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 3 || fields[0] != "f" {
                return Err(Error::parse(path, lineno + 1, "expected `f<TAB>name<TAB>weight`"));
            }
            feature_names.push(fields[1].to_string());
            weights.push(
                fields[2]
                    .parse()
                    .map_err(|_| Error::parse(path, lineno + 1, format!("bad weight `{}`", fields[2])))?,
            );
        }
        Ok(LogRegModel {
            schema_id: header["schema"].clone(),
            feature_names,
            weights,
            bias,
            l2,
        })
    }
}
