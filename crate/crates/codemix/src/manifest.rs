//! Run manifests: resolved config, seed and input checksums.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(Error::io(path))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

pub fn digest(path: &Path) -> Result<FileDigest> {
    Ok(FileDigest {
        path: path.display().to_string(),
        sha256: sha256_file(path)?,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub seed: u64,
    pub feature_schema_version: u32,
    pub config: RunConfig,
    pub files: BTreeMap<String, FileDigest>,
}

impl Manifest {
    pub fn new(command: &str, cfg: &RunConfig) -> Self {
        Manifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            seed: cfg.seed,
            feature_schema_version: codemix_core::features::SCHEMA_V1,
            config: cfg.clone(),
            files: BTreeMap::new(),
        }
    }

    /// Records the checksum of every file the run read.
    pub fn with_files<'a>(
        mut self,
        files: impl IntoIterator<Item = (&'a str, &'a Path)>,
    ) -> Result<Self> {
        for (name, path) in files {
            self.files.insert(name.to_string(), digest(path)?);
        }
        Ok(self)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string_pretty(self).expect("manifests serialize");
        fs::write(path, json + "\n").map_err(Error::io(path))
    }
}
