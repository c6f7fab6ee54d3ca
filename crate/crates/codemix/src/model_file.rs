//! `model.json`: a trained ensemble with its input contract.

use std::fs;
use std::path::Path;

use codemix_core::ensemble::{
    AdaBoostConfig, AdaBoostModel, DecisionTree, ForestModel, GradientBoostConfig,
    GradientBoostModel, InputSpec, Model, RegressionTree, TrainConfig,
};
use codemix_core::eval::TrainedPipeline;
use codemix_core::features::FeatureSchema;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MODEL_FORMAT: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "algorithm", rename_all = "snake_case")]
pub enum ModelBody {
    RandomForest {
        config: TrainConfig,
        trees: Vec<DecisionTree>,
    },
    Adaboost {
        config: AdaBoostConfig,
        alphas: Vec<f64>,
        trees: Vec<DecisionTree>,
    },
    GradientBoosting {
        config: GradientBoostConfig,
        init: f64,
        trees: Vec<RegressionTree>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub format_version: u32,
    pub name: String,
    pub seed: u64,
    #[serde(flatten)]
    pub body: ModelBody,
    pub feature_schema_version: u32,
    pub feature_columns: Vec<String>,
    pub training_ids: Vec<String>,
    pub local_language: String,
}

impl ModelFile {
    pub fn from_trained(t: &TrainedPipeline, seed: u64) -> Self {
        let schema = FeatureSchema::v1();
        let input = t.model.input();
        let body = match &t.model {
            Model::Forest(m) => ModelBody::RandomForest {
                config: m.config.clone(),
                trees: m.trees.clone(),
            },
            Model::AdaBoost(m) => ModelBody::Adaboost {
                config: m.config.clone(),
                alphas: m.alphas.clone(),
                trees: m.stumps.clone(),
            },
            Model::GradientBoost(m) => ModelBody::GradientBoosting {
                config: m.config.clone(),
                init: m.init,
                trees: m.trees.clone(),
            },
        };
        ModelFile {
            format_version: MODEL_FORMAT,
            name: t.name.clone(),
            seed,
            body,
            feature_schema_version: input.schema_version,
            feature_columns: input.columns.iter().map(|&c| schema.names[c].clone()).collect(),
            training_ids: t.training_ids.clone(),
            local_language: t.local_language.clone(),
        }
    }

    pub fn into_trained(self) -> Result<TrainedPipeline> {
        let schema = FeatureSchema::v1();
        if self.feature_schema_version != schema.version {
            return Err(Error::Core {
                stage: "ensemble",
                source: codemix_core::Error::SchemaMismatch {
                    expected: schema.version,
                    found: self.feature_schema_version,
                },
            });
        }
        let columns = self
            .feature_columns
            .iter()
            .map(|n| {
                schema
                    .index_of(n)
                    .ok_or_else(|| Error::Config(format!("model uses unknown feature `{n}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        let input = InputSpec {
            schema_version: self.feature_schema_version,
            columns,
        };
        let model = match self.body {
            ModelBody::RandomForest { config, trees } => Model::Forest(ForestModel {
                trees,
                config,
                input,
            }),
            ModelBody::Adaboost {
                config,
                alphas,
                trees,
            } => Model::AdaBoost(AdaBoostModel {
                stumps: trees,
                alphas,
                config,
                input,
            }),
            ModelBody::GradientBoosting {
                config,
                init,
                trees,
            } => Model::GradientBoost(GradientBoostModel {
                init,
                trees,
                config,
                input,
            }),
        };
        Ok(TrainedPipeline {
            name: self.name,
            model,
            training_ids: self.training_ids,
            local_language: self.local_language,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("model files serialize") + "\n"
    }

    pub fn from_json(text: &str, path: &Path) -> Result<Self> {
        let parse = |e: serde_json::Error| Error::Parse {
            path: path.to_path_buf(),
            line: e.line(),
            message: e.to_string(),
        };
        let raw: serde_json::Value = serde_json::from_str(text).map_err(parse)?;
        let version = raw.get("format_version").and_then(|v| v.as_u64());
        if version != Some(MODEL_FORMAT as u64) {
            return Err(Error::FormatVersion {
                path: path.to_path_buf(),
                expected: MODEL_FORMAT,
                found: version.unwrap_or(0) as u32,
            });
        }
        serde_json::from_value(raw).map_err(parse)
    }
}

pub fn save_model(path: &Path, t: &TrainedPipeline, seed: u64) -> Result<()> {
    fs::write(path, ModelFile::from_trained(t, seed).to_json()).map_err(Error::io(path))
}

pub fn load_model(path: &Path) -> Result<TrainedPipeline> {
    let text = fs::read_to_string(path).map_err(Error::io(path))?;
    ModelFile::from_json(&text, path)?.into_trained()
}
