//! Pre-trained word vectors in the usual space-separated text format, plus
//! the sentence pooling and cosine helper the pipeline needs.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use crate::corpus::Sentence;
use crate::error::{Error, Result};

/// Word → vector table with one fixed dimension.
#[derive(Debug, Clone)]
pub struct EmbeddingTable {
    dimension: usize,
    vectors: HashMap<String, Vec<f64>>,
}

impl EmbeddingTable {
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn get(&self, token: &str) -> Option<&[f64]> {
        self.vectors.get(token).map(Vec::as_slice)
    }
}

/// Load `token v1 .. vd` rows. An optional first line `<count> <dim>` (two
/// integer fields) is treated as a header. Every row must agree on the
/// dimension; a repeated token keeps the last row.
pub fn load_word_vectors(path: &Path) -> Result<EmbeddingTable> {
    let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut dimension: Option<usize> = None;
    let mut vectors = HashMap::new();
    for (lineno, line) in content.lines().enumerate() {
        let lineno = lineno + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if lineno == 1 && fields.len() == 2 {
            if let (Ok(_count), Ok(dim)) = (fields[0].parse::<usize>(), fields[1].parse::<usize>()) {
                if dim == 0 {
                    return Err(Error::parse(path, lineno, "header declares dimension 0"));
                }
                dimension = Some(dim);
                continue;
            }
        }
        if fields.len() < 2 {
            return Err(Error::parse(path, lineno, "expected `token v1 .. vd`"));
        }
        let token = fields[0];
        let values: Vec<f64> = fields[1..]
            .iter()
            .map(|f| f.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::parse(path, lineno, "non-numeric vector component"))?;
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::parse(path, lineno, "non-finite vector component"));
        }
        match dimension {
            None => dimension = Some(values.len()),
            Some(d) if d != values.len() => {
                return Err(Error::parse(
                    path,
                    lineno,
                    format!("vector has {} components, expected {d}", values.len()),
                ));
            }
            Some(_) => {}
        }
        vectors.insert(token.to_string(), values);
    }
    match dimension {
        Some(dimension) if !vectors.is_empty() => Ok(EmbeddingTable { dimension, vectors }),
        _ => Err(Error::InvalidInput(format!(
            "{}: no vectors found",
            path.display()
        ))),
    }
}

/// Sum of the vectors of tokens found in the table, matched on the exact
/// token text. Sentences with no match pool to the zero vector.
pub fn sentence_embedding(sentence: &Sentence, table: &EmbeddingTable) -> Vec<f64> {
    let mut acc = vec![0.0; table.dimension()];
    for tok in &sentence.tokens {
        if let Some(v) = table.get(&tok.text) {
            for (a, x) in acc.iter_mut().zip(v) {
                *a += x;
            }
        }
    }
    acc
}

/// Cosine similarity; 0 when either vector has zero norm.
pub fn cosine(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            actual: b.len(),
        });
    }
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return Ok(0.0);
    }
    Ok(dot / (na * nb))
}
