//! Pipeline orchestration for the propaganda-detection experiments: config
//! handling, the fold-based runners, and the single-stage commands that the
//! `propdetect` binary dispatches to.

pub mod config;
pub mod pipeline;
pub mod stages;
