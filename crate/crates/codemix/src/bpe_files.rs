//! `vocab.json` (token to id) and `merges.txt` (one merge per line, rank
//! order, optional `#` comment on the first line).

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use codemix_core::tokenize::{BpeTokenizer, MergeTable};

use crate::error::{Error, Result};

pub fn parse_merges(text: &str, path: &Path) -> Result<Vec<(String, String)>> {
    let mut merges = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 && line.starts_with('#') {
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split(' ');
        match (parts.next(), parts.next(), parts.next()) {
            (Some(a), Some(b), None) if !a.is_empty() && !b.is_empty() => {
                merges.push((a.to_string(), b.to_string()))
            }
            _ => {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line: i + 1,
                    message: format!("expected two space-separated symbols, got `{line}`"),
                })
            }
        }
    }
    Ok(merges)
}

pub fn parse_vocab(text: &str, path: &Path) -> Result<BTreeMap<String, u32>> {
    serde_json::from_str(text).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        message: e.to_string(),
    })
}

pub fn load_merge_table(vocab: &Path, merges: &Path) -> Result<MergeTable> {
    let v = fs::read_to_string(vocab).map_err(Error::io(vocab))?;
    let m = fs::read_to_string(merges).map_err(Error::io(merges))?;
    MergeTable::new(parse_merges(&m, merges)?, parse_vocab(&v, vocab)?)
        .map_err(Error::core("tokenize"))
}

pub fn load_bpe(name: &str, vocab: &Path, merges: &Path) -> Result<BpeTokenizer> {
    Ok(BpeTokenizer::new(name, load_merge_table(vocab, merges)?))
}
