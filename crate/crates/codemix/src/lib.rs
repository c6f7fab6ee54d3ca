//! File formats, run configuration and commands around `codemix-core`.

pub mod bpe_files;
pub mod commands;
pub mod config;
pub mod error;
pub mod jsonl;
pub mod langmodel;
pub mod manifest;
pub mod model_file;
pub mod report;
pub mod resources;
pub mod soft_labels;

pub use error::{Error, Result};
