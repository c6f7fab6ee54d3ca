use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::tree::{grow_classifier, DecisionTree, GrowParams};
use super::{InputSpec, TrainingSet};
use crate::error::{Error, Result};
use crate::features::FeatureVector;
use crate::math;

/// How many candidate features each split examines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum FeaturesPerSplit {
    /// `ceil(sqrt(d))`.
    #[default]
    Sqrt,
    All,
    Count(usize),
}

impl FeaturesPerSplit {
    pub fn resolve(&self, d: usize) -> usize {
        match *self {
            FeaturesPerSplit::Sqrt => (math::ceil(math::sqrt(d as f64)) as usize).clamp(1, d.max(1)),
            FeaturesPerSplit::All => d,
            FeaturesPerSplit::Count(k) => k,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct TrainConfig {
    pub n_trees: usize,
    pub max_depth: usize,
    pub min_samples_split: usize,
    pub features_per_split: FeaturesPerSplit,
    pub bootstrap: bool,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            n_trees: 100,
            max_depth: 8,
            min_samples_split: 2,
            features_per_split: FeaturesPerSplit::Sqrt,
            bootstrap: true,
            seed: 0,
        }
    }
}

impl TrainConfig {
    fn validate(&self, d: usize) -> Result<()> {
        if self.n_trees == 0 || self.max_depth == 0 || self.min_samples_split == 0 {
            return Err(Error::InvalidArgument(
                "n_trees, max_depth and min_samples_split must be at least 1".into(),
            ));
        }
        let k = self.features_per_split.resolve(d);
        if k == 0 || k > d {
            return Err(Error::InvalidArgument(alloc::format!(
                "features_per_split {k} must be in [1, {d}]"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ForestModel {
    pub trees: Vec<DecisionTree>,
    pub config: TrainConfig,
    pub input: InputSpec,
}

impl ForestModel {
    /// Mean positive-class leaf fraction over trees, on a projected row.
    pub fn predict_row(&self, row: &[f64]) -> f64 {
        let sum: f64 = self
            .trees
            .iter()
            .map(|t| t.leaf(row).positive_fraction())
            .sum();
        sum / self.trees.len() as f64
    }

    pub fn predict_proba(&self, x: &FeatureVector) -> Result<f64> {
        Ok(self.predict_row(&self.input.project(x)?))
    }

    pub fn seed(&self) -> u64 {
        self.config.seed
    }
}

/// Random Forest on every feature column.
pub fn train_forest(x: &[FeatureVector], y: &[u8], cfg: &TrainConfig) -> Result<ForestModel> {
    let width = x.first().map_or(0, |v| v.values.len());
    let columns: Vec<usize> = (0..width).collect();
    train_forest_on(x, y, cfg, &columns)
}

/// Random Forest on a subset of columns.
///
/// Tree `i` draws its bootstrap sample and per-node feature subsets from a
/// ChaCha stream seeded with `seed + i`, so trees are independent of each
/// other and of build order.
pub fn train_forest_on(
    x: &[FeatureVector],
    y: &[u8],
    cfg: &TrainConfig,
    columns: &[usize],
) -> Result<ForestModel> {
    let set = TrainingSet::new(x, y, columns)?;
    let d = columns.len();
    cfg.validate(d)?;
    let params = GrowParams {
        max_depth: cfg.max_depth,
        min_samples_split: cfg.min_samples_split,
        features_per_split: cfg.features_per_split.resolve(d),
    };
    let n = set.rows.len();
    let trees = (0..cfg.n_trees)
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(t as u64));
            let samples: Vec<usize> = if cfg.bootstrap {
                (0..n).map(|_| rng.random_range(0..n)).collect()
            } else {
                (0..n).collect()
            };
            grow_classifier(&set.rows, &set.labels, samples, params, Some(&mut rng))
        })
        .collect();
    Ok(ForestModel {
        trees,
        config: cfg.clone(),
        input: InputSpec {
            schema_version: set.schema_version,
            columns: columns.to_vec(),
        },
    })
}
