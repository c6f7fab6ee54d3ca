//! Versioned JSON files holding character n-gram counts.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use codemix_core::langdetect::NgramModel;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const LANGMODEL_FORMAT: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
pub struct LangModelFile {
    pub format_version: u32,
    pub language: String,
    pub n_range: (usize, usize),
    /// One table per order, lowest first.
    pub counts: Vec<BTreeMap<String, u64>>,
}

impl From<&NgramModel> for LangModelFile {
    fn from(m: &NgramModel) -> Self {
        LangModelFile {
            format_version: LANGMODEL_FORMAT,
            language: m.language().to_string(),
            n_range: m.n_range(),
            counts: m.counts().to_vec(),
        }
    }
}

pub fn save_langmodel(path: &Path, m: &NgramModel) -> Result<()> {
    let json = serde_json::to_string(&LangModelFile::from(m)).expect("counts serialize");
    fs::write(path, json + "\n").map_err(Error::io(path))
}

pub fn load_langmodel(path: &Path) -> Result<NgramModel> {
    let text = fs::read_to_string(path).map_err(Error::io(path))?;
    let f: LangModelFile = serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        message: e.to_string(),
    })?;
    if f.format_version != LANGMODEL_FORMAT {
        return Err(Error::FormatVersion {
            path: path.to_path_buf(),
            expected: LANGMODEL_FORMAT,
            found: f.format_version,
        });
    }
    NgramModel::from_counts(f.language, f.n_range, f.counts).map_err(Error::core("langdetect"))
}

/// Word list file: whitespace-separated words, `#` lines ignored.
pub fn read_word_list(path: &Path) -> Result<Vec<String>> {
    let text = fs::read_to_string(path).map_err(Error::io(path))?;
    Ok(text
        .lines()
        .filter(|l| !l.trim_start().starts_with('#'))
        .flat_map(str::split_whitespace)
        .map(String::from)
        .collect())
}
