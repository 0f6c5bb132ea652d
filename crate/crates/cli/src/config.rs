//! Run configuration: one flat key=value file, overridable field by field
//! (command-line flags reuse the same setter), written back verbatim next to
//! every run's outputs so an experiment is reproducible from its artifacts.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use propdetect_core::ensemble::VoteMode;
use propdetect_core::features::FeatureToggles;
use propdetect_core::models::DEFAULT_TAU_GRID;
use propdetect_core::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub corpus_dir: PathBuf,
    pub slc_labels: Option<PathBuf>,
    pub flc_labels: Option<PathBuf>,
    pub sentiment_lexicon: Option<PathBuf>,
    pub emotion_lexicon: Option<PathBuf>,
    pub loaded_words: Option<PathBuf>,
    pub senses: Option<PathBuf>,
    pub annotations: Option<PathBuf>,
    pub embeddings: Option<PathBuf>,
    pub manifest: Option<PathBuf>,
    pub out_dir: PathBuf,
    pub features: FeatureToggles,
    pub tau_grid: Vec<f64>,
    pub mode: VoteMode,
    pub relax_fraction: f64,
    pub postprocess: bool,
    pub window: usize,
    pub lambda: f64,
    pub slc_folds: usize,
    pub flc_folds: usize,
    pub lda_topics: usize,
    pub seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            corpus_dir: PathBuf::from("corpus"),
            slc_labels: None,
            flc_labels: None,
            sentiment_lexicon: None,
            emotion_lexicon: None,
            loaded_words: None,
            senses: None,
            annotations: None,
            embeddings: None,
            manifest: None,
            out_dir: PathBuf::from("out"),
            features: FeatureToggles::default(),
            tau_grid: DEFAULT_TAU_GRID.to_vec(),
            mode: VoteMode::Relax,
            relax_fraction: 0.3,
            postprocess: false,
            window: 10,
            lambda: 0.99,
            slc_folds: 5,
            flc_folds: 3,
            lda_topics: 10,
            seed: 0,
        }
    }
}

fn parse_bool(value: &str) -> Result<bool> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        other => Err(Error::InvalidInput(format!("expected true or false, got `{other}`"))),
    }
}

fn parse_features(value: &str) -> Result<FeatureToggles> {
    let mut toggles = FeatureToggles {
        embedding: false,
        linguistic: false,
        layout: false,
        topical: false,
    };
    if value == "none" {
        return Ok(toggles);
    }
    for name in value.split(',') {
        match name.trim() {
            "embedding" => toggles.embedding = true,
            "linguistic" => toggles.linguistic = true,
            "layout" => toggles.layout = true,
            "topical" => toggles.topical = true,
            other => {
                return Err(Error::InvalidInput(format!(
                    "unknown feature family `{other}` (expected embedding, linguistic, layout, topical, or none)"
                )));
            }
        }
    }
    Ok(toggles)
}

fn features_string(toggles: &FeatureToggles) -> String {
    let mut names = Vec::new();
    if toggles.embedding {
        names.push("embedding");
    }
    if toggles.linguistic {
        names.push("linguistic");
    }
    if toggles.layout {
        names.push("layout");
    }
    if toggles.topical {
        names.push("topical");
    }
    if names.is_empty() {
        "none".to_string()
    } else {
        names.join(",")
    }
}

impl PipelineConfig {
    /// Read a config file. Relative paths inside the file resolve against
    /// the file's own directory.
    pub fn load(path: &Path) -> Result<PipelineConfig> {
        let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        let mut config = PipelineConfig::default();
        for (lineno, raw) in content.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::parse(path, lineno + 1, "expected `key=value`"));
            };
            config
                .set(key.trim(), value.trim(), base)
                .map_err(|e| Error::parse(path, lineno + 1, e.to_string()))?;
        }
        Ok(config)
    }

    /// Apply one `key=value` pair; `base` anchors relative paths. Used for
    /// both file lines and command-line overrides, so the two can never
    /// drift apart.
    pub fn set(&mut self, key: &str, value: &str, base: &Path) -> Result<()> {
        let path = |v: &str| -> PathBuf { base.join(v) };
        match key {
            "corpus_dir" => self.corpus_dir = path(value),
            "slc_labels" => self.slc_labels = Some(path(value)),
            "flc_labels" => self.flc_labels = Some(path(value)),
            "sentiment_lexicon" => self.sentiment_lexicon = Some(path(value)),
            "emotion_lexicon" => self.emotion_lexicon = Some(path(value)),
            "loaded_words" => self.loaded_words = Some(path(value)),
            "senses" => self.senses = Some(path(value)),
            "annotations" => self.annotations = Some(path(value)),
            "embeddings" => self.embeddings = Some(path(value)),
            "manifest" => self.manifest = Some(path(value)),
            "out_dir" => self.out_dir = path(value),
            "features" => self.features = parse_features(value)?,
            "tau_grid" => {
                let grid: std::result::Result<Vec<f64>, _> =
                    value.split(',').map(|v| v.trim().parse::<f64>()).collect();
                self.tau_grid =
                    grid.map_err(|_| Error::InvalidInput(format!("bad tau grid `{value}`")))?;
            }
            "mode" => self.mode = VoteMode::from_name(value)?,
            "relax_fraction" => {
                self.relax_fraction = value
                    .parse()
                    .map_err(|_| Error::InvalidInput(format!("bad relax_fraction `{value}`")))?;
            }
            "postprocess" => self.postprocess = parse_bool(value)?,
            "window" => {
                self.window = value
                    .parse()
                    .map_err(|_| Error::InvalidInput(format!("bad window `{value}`")))?;
            }
            "lambda" => {
                self.lambda = value
                    .parse()
                    .map_err(|_| Error::InvalidInput(format!("bad lambda `{value}`")))?;
            }
            "slc_folds" => {
                self.slc_folds = value
                    .parse()
                    .map_err(|_| Error::InvalidInput(format!("bad slc_folds `{value}`")))?;
            }
            "flc_folds" => {
                self.flc_folds = value
                    .parse()
                    .map_err(|_| Error::InvalidInput(format!("bad flc_folds `{value}`")))?;
            }
            "lda_topics" => {
                self.lda_topics = value
                    .parse()
                    .map_err(|_| Error::InvalidInput(format!("bad lda_topics `{value}`")))?;
            }
            "seed" => {
                self.seed = value
                    .parse()
                    .map_err(|_| Error::InvalidInput(format!("bad seed `{value}`")))?;
            }
            other => {
                return Err(Error::InvalidInput(format!("unknown config key `{other}`")));
            }
        }
        Ok(())
    }

    /// Structural sanity; path existence is checked separately at run start.
    pub fn validate(&self) -> Result<()> {
        if self.slc_folds < 2 || self.flc_folds < 2 {
            return Err(Error::InvalidInput(format!(
                "fold counts must be at least 2 (slc_folds {}, flc_folds {})",
                self.slc_folds, self.flc_folds
            )));
        }
        if self.tau_grid.is_empty() {
            return Err(Error::InvalidInput("tau grid must not be empty".into()));
        }
        for tau in &self.tau_grid {
            if !(*tau > 0.0 && *tau < 1.0) {
                return Err(Error::InvalidInput(format!("threshold {tau} outside (0, 1)")));
            }
        }
        if self.mode == VoteMode::Relax && !(self.relax_fraction > 0.0 && self.relax_fraction <= 1.0)
        {
            return Err(Error::InvalidInput(format!(
                "relax_fraction must be in (0, 1], got {}",
                self.relax_fraction
            )));
        }
        if self.postprocess {
            if self.window == 0 {
                return Err(Error::InvalidInput("window must be at least 1".into()));
            }
            if !(self.lambda > 0.0 && self.lambda <= 1.0) {
                return Err(Error::InvalidInput(format!(
                    "lambda must be in (0, 1], got {}",
                    self.lambda
                )));
            }
        }
        if self.lda_topics < 2 {
            return Err(Error::InvalidInput(format!(
                "lda_topics must be at least 2, got {}",
                self.lda_topics
            )));
        }
        Ok(())
    }

    /// The full effective configuration in file syntax, keys in a fixed
    /// order. Loading the output reproduces this config exactly (given the
    /// same base directory), and identical configs produce identical bytes.
    pub fn canonical_string(&self) -> String {
        let mut out = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(out, "{k}={v}");
        };
        kv("corpus_dir", self.corpus_dir.display().to_string());
        for (key, value) in [
            ("slc_labels", &self.slc_labels),
            ("flc_labels", &self.flc_labels),
            ("sentiment_lexicon", &self.sentiment_lexicon),
            ("emotion_lexicon", &self.emotion_lexicon),
            ("loaded_words", &self.loaded_words),
            ("senses", &self.senses),
            ("annotations", &self.annotations),
            ("embeddings", &self.embeddings),
            ("manifest", &self.manifest),
        ] {
            if let Some(p) = value {
                kv(key, p.display().to_string());
            }
        }
        kv("out_dir", self.out_dir.display().to_string());
        kv("features", features_string(&self.features));
        kv(
            "tau_grid",
            self.tau_grid
                .iter()
                .map(f64::to_string)
                .collect::<Vec<_>>()
                .join(","),
        );
        kv("mode", self.mode.name().to_string());
        kv("relax_fraction", self.relax_fraction.to_string());
        kv("postprocess", self.postprocess.to_string());
        kv("window", self.window.to_string());
        kv("lambda", self.lambda.to_string());
        kv("slc_folds", self.slc_folds.to_string());
        kv("flc_folds", self.flc_folds.to_string());
        kv("lda_topics", self.lda_topics.to_string());
        kv("seed", self.seed.to_string());
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_the_published_configuration() {
        let c = PipelineConfig::default();
        assert_eq!(c.tau_grid, vec![0.50, 0.40, 0.35]);
        assert_eq!(c.mode, VoteMode::Relax);
        assert_eq!(c.relax_fraction, 0.3);
        assert!(!c.postprocess);
        assert_eq!((c.window, c.slc_folds, c.flc_folds), (10, 5, 3));
        assert_eq!(c.lambda, 0.99);
        assert!(c.validate().is_ok());
    }

    #[test]
    fn loads_a_file_with_relative_paths() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.conf");
        fs::write(
            &path,
            "# experiment\ncorpus_dir=data/articles\nslc_labels=data/slc.tsv\nseed=7\nmode=majority\ntau_grid=0.4,0.35\nfeatures=linguistic,layout\n",
        )
        .unwrap();
        let c = PipelineConfig::load(&path).unwrap();
        assert_eq!(c.corpus_dir, dir.path().join("data/articles"));
        assert_eq!(c.slc_labels, Some(dir.path().join("data/slc.tsv")));
        assert_eq!(c.seed, 7);
        assert_eq!(c.mode, VoteMode::Majority);
        assert_eq!(c.tau_grid, vec![0.4, 0.35]);
        assert!(!c.features.embedding && c.features.linguistic && c.features.layout);
        assert!(!c.features.topical);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        let dir = tempfile::tempdir().unwrap();
        for bad in [
            "mystery=1\n",
            "seed=abc\n",
            "mode=consensus\n",
            "features=vibes\n",
            "postprocess=yes\n",
            "tau_grid=\n",
            "no equals sign\n",
        ] {
            let path = dir.path().join("bad.conf");
            fs::write(&path, bad).unwrap();
            assert!(PipelineConfig::load(&path).is_err(), "accepted {bad:?}");
        }
    }

    #[test]
    fn validation_bounds() {
        let mut c = PipelineConfig::default();
        c.slc_folds = 1;
        assert!(c.validate().is_err());
        let mut c = PipelineConfig::default();
        c.tau_grid = vec![1.0];
        assert!(c.validate().is_err());
        let mut c = PipelineConfig::default();
        c.relax_fraction = 0.0;
        assert!(c.validate().is_err());
        let mut c = PipelineConfig::default();
        c.postprocess = true;
        c.lambda = 1.5;
        assert!(c.validate().is_err());
        c.lambda = 0.95;
        assert!(c.validate().is_ok());
    }

    #[test]
    fn canonical_string_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = PipelineConfig::default();
        // Anchor the defaulted paths too, so reloading against a different
        // base cannot change them.
        c.set("corpus_dir", "articles", dir.path()).unwrap();
        c.set("out_dir", "out", dir.path()).unwrap();
        c.set("slc_labels", "gold.tsv", dir.path()).unwrap();
        c.set("seed", "99", dir.path()).unwrap();
        c.set("features", "none", dir.path()).unwrap();
        let text = c.canonical_string();
        let path = dir.path().join("echo.conf");
        fs::write(&path, &text).unwrap();
        // Canonical paths are absolute already; reload against any base.
        let reloaded = PipelineConfig::load(&path).unwrap();
        assert_eq!(reloaded, c);
        assert_eq!(reloaded.canonical_string(), text);
    }
}
