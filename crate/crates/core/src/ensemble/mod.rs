//! Tree ensembles over feature vectors: a Random Forest (the main
//! classifier) and AdaBoost / Gradient Boosting baselines.

mod boost;
mod forest;
pub mod tree;

use alloc::vec::Vec;

pub use boost::{
    train_adaboost, train_adaboost_traced, train_gboost, train_gboost_traced, AdaBoostConfig,
    AdaBoostModel, BoostTrace, GradientBoostConfig, GradientBoostModel,
};
pub use forest::{train_forest, train_forest_on, FeaturesPerSplit, ForestModel, TrainConfig};
pub use tree::{ClassCounts, DecisionTree, Node, RegressionTree, Tree};

use crate::error::{Error, Result};
use crate::features::FeatureVector;

/// Probability at or above which a message is labeled code-mixed.
pub const DECISION_THRESHOLD: f64 = 0.5;

pub fn decide(probability: f64) -> u8 {
    (probability >= DECISION_THRESHOLD) as u8
}

/// Rows projected onto `columns`, sorted by message id, with their labels.
#[derive(Debug, Clone)]
pub(crate) struct TrainingSet {
    pub rows: Vec<Vec<f64>>,
    pub labels: Vec<u8>,
    pub schema_version: u32,
}

impl TrainingSet {
    /// Validates inputs and orders rows canonically by message id so that
    /// results do not depend on input order.
    pub fn new(x: &[FeatureVector], y: &[u8], columns: &[usize]) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::LengthMismatch {
                left: x.len(),
                right: y.len(),
            });
        }
        if x.len() < 2 {
            return Err(Error::InvalidArgument(
                "need at least two training vectors".into(),
            ));
        }
        if let Some(&bad) = y.iter().find(|&&l| l > 1) {
            return Err(Error::InvalidArgument(alloc::format!("label {bad} is not binary")));
        }
        if !y.contains(&0) || !y.contains(&1) {
            return Err(Error::SingleClass);
        }
        let schema_version = x[0].schema_version;
        let width = x[0].values.len();
        for v in x {
            if v.schema_version != schema_version {
                return Err(Error::SchemaMismatch {
                    expected: schema_version,
                    found: v.schema_version,
                });
            }
            if v.values.len() != width {
                return Err(Error::WrongWidth {
                    expected: width,
                    found: v.values.len(),
                });
            }
        }
        if let Some(&c) = columns.iter().find(|&&c| c >= width) {
            return Err(Error::InvalidArgument(alloc::format!(
                "column {c} out of range for width {width}"
            )));
        }
        let mut order: Vec<usize> = (0..x.len()).collect();
        order.sort_by(|&a, &b| x[a].message_id.cmp(&x[b].message_id));
        Ok(TrainingSet {
            rows: order
                .iter()
                .map(|&i| columns.iter().map(|&c| x[i].values[c]).collect())
                .collect(),
            labels: order.iter().map(|&i| y[i]).collect(),
            schema_version,
        })
    }
}

/// Schema version and column projection shared by every model kind.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct InputSpec {
    pub schema_version: u32,
    pub columns: Vec<usize>,
}

impl InputSpec {
    pub fn project(&self, x: &FeatureVector) -> Result<Vec<f64>> {
        if x.schema_version != self.schema_version {
            return Err(Error::SchemaMismatch {
                expected: self.schema_version,
                found: x.schema_version,
            });
        }
        if let Some(&c) = self.columns.iter().find(|&&c| c >= x.values.len()) {
            return Err(Error::WrongWidth {
                expected: c + 1,
                found: x.values.len(),
            });
        }
        Ok(self.columns.iter().map(|&c| x.values[c]).collect())
    }
}

/// Any trained ensemble.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Forest(ForestModel),
    AdaBoost(AdaBoostModel),
    GradientBoost(GradientBoostModel),
}

impl Model {
    pub fn algorithm(&self) -> &'static str {
        match self {
            Model::Forest(_) => "random_forest",
            Model::AdaBoost(_) => "adaboost",
            Model::GradientBoost(_) => "gradient_boosting",
        }
    }

    pub fn input(&self) -> &InputSpec {
        match self {
            Model::Forest(m) => &m.input,
            Model::AdaBoost(m) => &m.input,
            Model::GradientBoost(m) => &m.input,
        }
    }

    pub fn predict_proba(&self, x: &FeatureVector) -> Result<f64> {
        match self {
            Model::Forest(m) => m.predict_proba(x),
            Model::AdaBoost(m) => m.predict_proba(x),
            Model::GradientBoost(m) => m.predict_proba(x),
        }
    }

    pub fn predict(&self, x: &FeatureVector) -> Result<u8> {
        self.predict_proba(x).map(decide)
    }
}
