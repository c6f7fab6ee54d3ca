//! Detection of code-mixed messages: English text carrying embedded words or
//! phrases from a second ("local") language.
//!
//! The pipeline turns each message into a fixed-schema feature vector built
//! from four tokenizers (English, local and multilingual BPE plus a plain
//! whitespace split), a per-word character n-gram language detector and a
//! contextual soft label, then classifies it with a tree ensemble.
//!
//! This crate is `no_std` (it needs `alloc`). File formats, configuration
//! and the command line live in the `codemix` crate.
#![no_std]
#![deny(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod analysis;
pub mod corpus;
pub mod ensemble;
pub mod error;
pub mod eval;
pub mod features;
pub mod langdetect;
mod math;
pub mod tokenize;

pub use error::{Error, Result};
