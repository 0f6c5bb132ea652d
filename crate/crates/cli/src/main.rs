//! `propdetect`: train, combine, and score propaganda detectors over a
//! directory of plain-text articles.
//!
//! Exit codes: 0 success, 1 usage error, 2 bad input data, 3 internal error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use propdetect_cli::config::PipelineConfig;
use propdetect_cli::pipeline::{run_flc, run_slc};
use propdetect_cli::stages::{
    cmd_ensemble, cmd_evaluate, cmd_featurize, cmd_ingest, cmd_postprocess, cmd_predict,
    cmd_train_flc, cmd_train_slc, StageError,
};

#[derive(Parser)]
#[command(
    name = "propdetect",
    about = "Sentence- and fragment-level propaganda detection pipeline",
    version
)]
struct Cli {
    #[command(flatten)]
    overrides: Overrides,
    #[command(subcommand)]
    command: Command,
}

/// Every setting can come from a config file, a flag, or both; flags win.
#[derive(Args)]
struct Overrides {
    /// Config file with key=value lines; relative paths resolve against it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory of article{id}.txt files.
    #[arg(long, global = true)]
    corpus_dir: Option<String>,
    /// Gold sentence labels (article, index, label).
    #[arg(long, global = true)]
    slc_labels: Option<String>,
    /// Gold fragments (article, technique, start, end).
    #[arg(long, global = true)]
    flc_labels: Option<String>,
    /// Word polarity lexicon.
    #[arg(long, global = true)]
    sentiment_lexicon: Option<String>,
    /// Word emotion/affect lexicon.
    #[arg(long, global = true)]
    emotion_lexicon: Option<String>,
    /// Loaded-phrase list, one phrase per line.
    #[arg(long, global = true)]
    loaded_words: Option<String>,
    /// Word sense counts.
    #[arg(long, global = true)]
    senses: Option<String>,
    /// Token annotations (POS/NER) sidecar.
    #[arg(long, global = true)]
    annotations: Option<String>,
    /// Word vectors, one `word v1 v2 ...` per line.
    #[arg(long, global = true)]
    embeddings: Option<String>,
    /// Ensemble manifest listing external prediction columns.
    #[arg(long, global = true)]
    manifest: Option<String>,
    /// Output directory for models, predictions, and reports.
    #[arg(long, global = true)]
    out_dir: Option<String>,
    /// Feature families: comma list of embedding,linguistic,layout,topical or `none`.
    #[arg(long, global = true)]
    features: Option<String>,
    /// Decision threshold grid, comma-separated, tried in order.
    #[arg(long = "tau", global = true)]
    tau_grid: Option<String>,
    /// Vote mode: majority or relax.
    #[arg(long, global = true)]
    mode: Option<String>,
    /// Positive-vote fraction required under relax voting.
    #[arg(long, global = true)]
    relax_fraction: Option<String>,
    /// Flip repeated near-duplicate sentences to positive (true/false).
    #[arg(long, global = true)]
    postprocess: Option<String>,
    /// How many earlier retained sentences the repetition check looks back.
    #[arg(long, global = true)]
    window: Option<String>,
    /// Cosine similarity a repetition must exceed.
    #[arg(long, global = true)]
    lambda: Option<String>,
    /// Article folds for the sentence task.
    #[arg(long, global = true)]
    slc_folds: Option<String>,
    /// Article folds for the fragment task.
    #[arg(long, global = true)]
    flc_folds: Option<String>,
    /// Topic count for the topical features.
    #[arg(long, global = true)]
    lda_topics: Option<String>,
    /// Master seed; every random choice derives from it.
    #[arg(long, global = true)]
    seed: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Load the corpus and side files, report counts, change nothing.
    Ingest,
    /// Write the assembled sentence feature table.
    Featurize {
        #[arg(long)]
        out: PathBuf,
    },
    /// Train the sentence classifier on all labeled articles.
    TrainSlc {
        #[arg(long)]
        out_model: PathBuf,
    },
    /// Train one fragment tagger variant (base or lexical) on all articles.
    TrainFlc {
        #[arg(long)]
        variant: String,
        #[arg(long)]
        out_model: PathBuf,
    },
    /// Apply a saved model; the file header picks the output format.
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Combine the manifest's prediction columns (vote or span merge).
    Ensemble {
        /// slc or flc.
        #[arg(long)]
        task: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Flip repeated near-duplicates in a sentence prediction file.
    Postprocess {
        #[arg(long)]
        predictions: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score predictions against gold.
    Evaluate {
        /// slc or flc.
        #[arg(long)]
        task: String,
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        gold: PathBuf,
    },
    /// Full sentence-level experiment: folds, thresholds, ensemble, report.
    RunSlc,
    /// Full fragment-level experiment: folds, two taggers, merge, report.
    RunFlc,
}

fn resolve_config(overrides: &Overrides) -> Result<PipelineConfig, StageError> {
    let mut config = match &overrides.config {
        Some(path) => PipelineConfig::load(path)?,
        None => PipelineConfig::default(),
    };
    let cwd = std::env::current_dir()
        .map_err(|e| StageError::Run(propdetect_core::Error::io(Path::new("."), e)))?;
    let flags: [(&str, &Option<String>); 21] = [
        ("corpus_dir", &overrides.corpus_dir),
        ("slc_labels", &overrides.slc_labels),
        ("flc_labels", &overrides.flc_labels),
        ("sentiment_lexicon", &overrides.sentiment_lexicon),
        ("emotion_lexicon", &overrides.emotion_lexicon),
        ("loaded_words", &overrides.loaded_words),
        ("senses", &overrides.senses),
        ("annotations", &overrides.annotations),
        ("embeddings", &overrides.embeddings),
        ("manifest", &overrides.manifest),
        ("out_dir", &overrides.out_dir),
        ("features", &overrides.features),
        ("tau_grid", &overrides.tau_grid),
        ("mode", &overrides.mode),
        ("relax_fraction", &overrides.relax_fraction),
        ("postprocess", &overrides.postprocess),
        ("window", &overrides.window),
        ("lambda", &overrides.lambda),
        ("slc_folds", &overrides.slc_folds),
        ("flc_folds", &overrides.flc_folds),
        ("lda_topics", &overrides.lda_topics),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            config
                .set(key, v, &cwd)
                .map_err(|e| StageError::Usage(format!("--{}: {e}", key.replace('_', "-"))))?;
        }
    }
    if let Some(v) = &overrides.seed {
        config
            .set("seed", v, &cwd)
            .map_err(|e| StageError::Usage(format!("--seed: {e}")))?;
    }
    Ok(config)
}

fn dispatch(cli: &Cli) -> Result<String, StageError> {
    let config = resolve_config(&cli.overrides)?;
    match &cli.command {
        Command::Ingest => cmd_ingest(&config),
        Command::Featurize { out } => cmd_featurize(&config, out),
        Command::TrainSlc { out_model } => cmd_train_slc(&config, out_model),
        Command::TrainFlc { variant, out_model } => cmd_train_flc(&config, variant, out_model),
        Command::Predict { model, out } => cmd_predict(&config, model, out),
        Command::Ensemble { task, out } => cmd_ensemble(&config, task, out),
        Command::Postprocess { predictions, out } => cmd_postprocess(&config, predictions, out),
        Command::Evaluate { task, pred, gold } => cmd_evaluate(&config, task, pred, gold),
        Command::RunSlc => {
            let outcome = run_slc(&config)?;
            std::fs::read_to_string(&outcome.report_path)
                .map_err(|e| StageError::Run(propdetect_core::Error::io(&outcome.report_path, e)))
        }
        Command::RunFlc => {
            let outcome = run_flc(&config)?;
            std::fs::read_to_string(&outcome.report_path)
                .map_err(|e| StageError::Run(propdetect_core::Error::io(&outcome.report_path, e)))
        }
    }
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap renders its own message (including --help/--version,
            // which are not errors).
            let code = if e.exit_code() == 0 { 0 } else { 1 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match dispatch(&cli) {
        Ok(summary) => {
            print!("{summary}");
            ExitCode::SUCCESS
        }
        Err(StageError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(StageError::Run(e)) => {
            eprintln!("error: {e}");
            if e.is_data_error() {
                ExitCode::from(2)
            } else {
                ExitCode::from(3)
            }
        }
    }
}
