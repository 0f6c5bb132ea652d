//! Trainable models and their on-disk formats.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::error::{Error, Result};

mod crf;
mod logreg;
mod predictions;
mod token_features;

pub use crf::{
    start_valid, train_crf, transition_valid, CrfConfig, CrfExample, CrfModel, TagSet,
    INVALID_TRANSITION_SCORE,
};
pub use logreg::{train_logreg, DecisionRule, LogRegConfig, LogRegModel, DEFAULT_TAU_GRID};
pub use predictions::{
    load_fragment_predictions, load_sentence_predictions, write_fragment_predictions,
    write_sentence_predictions, SentencePrediction,
};
pub use token_features::{token_features, TokenFeatureConfig};

/// First line of every saved model file.
pub const MODEL_MAGIC: &str = "propdetect-model v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    LogReg,
    Crf,
}

/// Identify a saved model file from its header without loading it.
pub fn sniff_model(path: &Path) -> Result<ModelKind> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = BufReader::new(file);
    let mut magic = String::new();
    let mut kind = String::new();
    reader.read_line(&mut magic).map_err(|e| Error::io(path, e))?;
    reader.read_line(&mut kind).map_err(|e| Error::io(path, e))?;
    if magic.trim_end_matches('\n') != MODEL_MAGIC {
        return Err(Error::parse(path, 1, "not a model file"));
    }
    match kind.trim_end_matches('\n') {
        "type\tlogreg" => Ok(ModelKind::LogReg),
        "type\tcrf" => Ok(ModelKind::Crf),
        other => Err(Error::parse(path, 2, format!("unknown model type `{other}`"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    #[test]
    fn sniffs_both_model_kinds() {
        let dir = tempfile::tempdir().unwrap();
        let lr = dir.path().join("lr.model");
        fs::write(&lr, format!("{MODEL_MAGIC}\ntype\tlogreg\nrest\n")).unwrap();
        assert_eq!(sniff_model(&lr).unwrap(), ModelKind::LogReg);
        let crf = dir.path().join("crf.model");
        fs::write(&crf, format!("{MODEL_MAGIC}\ntype\tcrf\nrest\n")).unwrap();
        assert_eq!(sniff_model(&crf).unwrap(), ModelKind::Crf);
    }

    #[test]
    fn rejects_foreign_files() {
        let dir = tempfile::tempdir().unwrap();
        let other = dir.path().join("x.model");
        fs::write(&other, "something else\ntype\tlogreg\n").unwrap();
        assert!(sniff_model(&other).is_err());
        let badkind = dir.path().join("y.model");
        fs::write(&badkind, format!("{MODEL_MAGIC}\ntype\tmystery\n")).unwrap();
        assert!(sniff_model(&badkind).is_err());
    }
}
