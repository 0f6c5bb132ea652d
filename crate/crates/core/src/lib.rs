//! Detection of propaganda in news articles at two granularities: whole
//! sentences (binary classification) and typed character spans (sequence
//! tagging over a BIO encoding).
//!
//! The crate is organised as a pipeline of small, file-friendly pieces:
//!
//! * [`corpus`] — article loading, tokenization, label files, BIO codecs,
//!   cross-validation folds.
//! * [`features`] — sentence feature extraction from lexicons, layout,
//!   readability, and pre-trained word vectors.
//! * [`topics`] — a small collapsed-Gibbs LDA used for topical features.
//! * [`models`] — L2 logistic regression and a linear-chain CRF, both with
//!   plain-text persistence.
//! * [`ensemble`] — voting across prediction columns, fragment merging, and
//!   the repetition post-processing step.
//! * [`eval`] — binary and strict span-level scoring.
//!
//! Every step is deterministic given a seed: randomness flows through named
//! substreams (see [`seeding`]) and collections with stable iteration order.

pub mod corpus;
pub mod ensemble;
pub mod error;
pub mod eval;
pub mod features;
pub mod models;
pub mod seeding;
pub mod topics;

pub use error::{Error, Result};
