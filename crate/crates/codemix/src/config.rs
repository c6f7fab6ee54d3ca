//! TOML run configuration. Relative paths resolve against the config
//! file's directory; command-line flags override file values.

use std::fs;
use std::path::{Path, PathBuf};

use codemix_core::ensemble::{AdaBoostConfig, GradientBoostConfig, TrainConfig};
use codemix_core::eval::PipelineConfig;
use codemix_core::features::FeatureSelection;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TokenizerPaths {
    pub vocab: PathBuf,
    pub merges: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResourcesConfig {
    pub english: TokenizerPaths,
    pub local: TokenizerPaths,
    pub multilingual: TokenizerPaths,
    pub english_langmodel: PathBuf,
    pub local_langmodel: PathBuf,
}

/// Local-language resources swapped in for zero-shot evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetConfig {
    pub local: TokenizerPaths,
    pub local_langmodel: PathBuf,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataConfig {
    pub train: Option<PathBuf>,
    pub test: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum PipelineKind {
    #[default]
    Elmict,
    RandomForest,
    Adaboost,
    GradientBoosting,
    WhitespaceRf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisConfig {
    pub min_topic_fraction: f64,
    pub top_terms: usize,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            min_topic_fraction: codemix_core::analysis::DEFAULT_MIN_TOPIC_FRACTION,
            top_terms: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthSection {
    pub english_lexicon: PathBuf,
    pub local_lexicon: PathBuf,
    #[serde(default = "default_n_messages")]
    pub n_messages: usize,
    #[serde(default = "default_mix_rate")]
    pub mix_rate: f64,
    #[serde(default = "default_span")]
    pub span_len_range: (usize, usize),
    #[serde(default)]
    pub id_prefix: Option<String>,
    #[serde(default)]
    pub community: Option<String>,
}

fn default_n_messages() -> usize {
    100
}
fn default_mix_rate() -> f64 {
    0.3
}
fn default_span() -> (usize, usize) {
    (1, 3)
}
fn default_seed() -> u64 {
    42
}
fn default_folds() -> usize {
    5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_folds")]
    pub folds: usize,
    /// Drop messages with fewer whitespace tokens before training or
    /// evaluation.
    #[serde(default)]
    pub min_tokens: Option<usize>,
    /// Constant soft label; used when no soft-label file is given.
    #[serde(default)]
    pub stub_soft_label: Option<f64>,
    #[serde(default)]
    pub soft_labels: Option<PathBuf>,
    #[serde(default)]
    pub pipeline: PipelineKind,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub data: DataConfig,
    #[serde(default)]
    pub resources: Option<ResourcesConfig>,
    #[serde(default)]
    pub target: Option<TargetConfig>,
    #[serde(default)]
    pub forest: TrainConfig,
    #[serde(default)]
    pub adaboost: AdaBoostConfig,
    #[serde(default)]
    pub gradient_boosting: GradientBoostConfig,
    #[serde(default)]
    pub analysis: AnalysisConfig,
    #[serde(default)]
    pub synth: Option<SynthSection>,
}

impl Default for RunConfig {
    fn default() -> Self {
        toml::from_str("").expect("empty config parses")
    }
}

fn rebase(base: &Path, p: &mut PathBuf) {
    if p.is_relative() {
        *p = base.join(&*p);
    }
}

fn rebase_tok(base: &Path, t: &mut TokenizerPaths) {
    rebase(base, &mut t.vocab);
    rebase(base, &mut t.merges);
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|_| Error::MissingPath {
            what: "config file".into(),
            path: path.to_path_buf(),
        })?;
        let mut cfg = Self::parse(&text)?;
        cfg.rebase(path.parent().unwrap_or(Path::new(".")));
        Ok(cfg)
    }

    /// Makes every relative path relative to `base`.
    pub fn rebase(&mut self, base: &Path) {
        for p in [&mut self.soft_labels, &mut self.output_dir, &mut self.data.train, &mut self.data.test]
            .into_iter()
            .flatten()
        {
            rebase(base, p);
        }
        if let Some(r) = &mut self.resources {
            rebase_tok(base, &mut r.english);
            rebase_tok(base, &mut r.local);
            rebase_tok(base, &mut r.multilingual);
            rebase(base, &mut r.english_langmodel);
            rebase(base, &mut r.local_langmodel);
        }
        if let Some(t) = &mut self.target {
            rebase_tok(base, &mut t.local);
            rebase(base, &mut t.local_langmodel);
        }
        if let Some(s) = &mut self.synth {
            rebase(base, &mut s.english_lexicon);
            rebase(base, &mut s.local_lexicon);
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.folds < 1 {
            return Err(Error::Config("folds must be at least 1".into()));
        }
        if let Some(c) = self.stub_soft_label {
            if !(0.0..=1.0).contains(&c) {
                return Err(Error::Config(format!("stub_soft_label {c} outside [0, 1]")));
            }
        }
        if !(0.0..=1.0).contains(&self.analysis.min_topic_fraction) {
            return Err(Error::Config("analysis.min_topic_fraction outside [0, 1]".into()));
        }
        Ok(())
    }

    pub fn resources(&self) -> Result<&ResourcesConfig> {
        self.resources
            .as_ref()
            .ok_or_else(|| Error::Config("missing [resources] section".into()))
    }

    pub fn target(&self) -> Result<&TargetConfig> {
        self.target
            .as_ref()
            .ok_or_else(|| Error::Config("missing [target] section".into()))
    }

    /// Pipeline for train/eval commands, seeded with the run seed.
    pub fn pipeline_config(&self) -> PipelineConfig {
        use codemix_core::eval::Scheme;
        let forest = TrainConfig {
            seed: self.seed,
            ..self.forest.clone()
        };
        let (name, scheme, features) = match self.pipeline {
            PipelineKind::Elmict => ("ELMICT", Scheme::RandomForest(forest), FeatureSelection::All),
            PipelineKind::RandomForest => (
                "Random Forest",
                Scheme::RandomForest(forest),
                FeatureSelection::Tokenizers,
            ),
            PipelineKind::Adaboost => (
                "Adaptive Boosting",
                Scheme::AdaBoost(self.adaboost.clone()),
                FeatureSelection::Tokenizers,
            ),
            PipelineKind::GradientBoosting => (
                "Gradient Boosting",
                Scheme::GradientBoost(self.gradient_boosting.clone()),
                FeatureSelection::Tokenizers,
            ),
            PipelineKind::WhitespaceRf => (
                "Whitespace-only RF",
                Scheme::RandomForest(forest),
                FeatureSelection::Whitespace,
            ),
        };
        PipelineConfig {
            name: name.into(),
            scheme,
            features,
        }
    }

    /// Every scheme of the comparison table, with configured
    /// hyperparameters; ELMICT last.
    pub fn comparison(&self) -> Vec<PipelineConfig> {
        [
            PipelineKind::RandomForest,
            PipelineKind::Adaboost,
            PipelineKind::GradientBoosting,
            PipelineKind::WhitespaceRf,
            PipelineKind::Elmict,
        ]
        .into_iter()
        .map(|k| {
            RunConfig {
                pipeline: k,
                ..self.clone()
            }
            .pipeline_config()
        })
        .collect()
    }
}

/// Fails with the first listed path that does not exist.
pub fn preflight<'a>(paths: impl IntoIterator<Item = (&'a str, &'a Path)>) -> Result<()> {
    for (what, path) in paths {
        if !path.is_file() {
            return Err(Error::MissingPath {
                what: what.to_string(),
                path: path.to_path_buf(),
            });
        }
    }
    Ok(())
}

impl ResourcesConfig {
    pub fn paths(&self) -> Vec<(&'static str, &Path)> {
        vec![
            ("english vocab", self.english.vocab.as_path()),
            ("english merges", self.english.merges.as_path()),
            ("local vocab", self.local.vocab.as_path()),
            ("local merges", self.local.merges.as_path()),
            ("multilingual vocab", self.multilingual.vocab.as_path()),
            ("multilingual merges", self.multilingual.merges.as_path()),
            ("english langmodel", self.english_langmodel.as_path()),
            ("local langmodel", self.local_langmodel.as_path()),
        ]
    }
}

impl TargetConfig {
    pub fn paths(&self) -> Vec<(&'static str, &Path)> {
        vec![
            ("target local vocab", self.local.vocab.as_path()),
            ("target local merges", self.local.merges.as_path()),
            ("target local langmodel", self.local_langmodel.as_path()),
        ]
    }
}
