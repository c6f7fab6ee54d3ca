use alloc::vec::Vec;

use super::tree::{grow_with, DecisionTree, RegressionTree, Variance, WeightedGini};
use super::{InputSpec, TrainingSet};
use crate::error::{Error, Result};
use crate::features::FeatureVector;
use crate::math;

/// Error floor used for the round weight when a learner is perfect.
const MIN_ERROR: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct AdaBoostConfig {
    pub rounds: usize,
    pub stump_depth: usize,
}

impl Default for AdaBoostConfig {
    fn default() -> Self {
        AdaBoostConfig {
            rounds: 50,
            stump_depth: 1,
        }
    }
}

/// Discrete two-class AdaBoost.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AdaBoostModel {
    pub stumps: Vec<DecisionTree>,
    pub alphas: Vec<f64>,
    pub config: AdaBoostConfig,
    pub input: InputSpec,
}

fn vote(tree: &DecisionTree, row: &[f64]) -> f64 {
    let leaf = tree.leaf(row);
    if leaf.positive > leaf.negative {
        1.0
    } else {
        -1.0
    }
}

impl AdaBoostModel {
    /// Weighted vote margin `sum alpha_t h_t(x)` with `h` in {-1, +1}.
    pub fn margin(&self, row: &[f64]) -> f64 {
        self.stumps
            .iter()
            .zip(&self.alphas)
            .map(|(t, a)| a * vote(t, row))
            .sum()
    }

    /// `sigmoid(2 * margin)`; 0.5 for an empty model.
    pub fn predict_row(&self, row: &[f64]) -> f64 {
        math::sigmoid(2.0 * self.margin(row))
    }

    pub fn predict_proba(&self, x: &FeatureVector) -> Result<f64> {
        Ok(self.predict_row(&self.input.project(x)?))
    }
}

/// Per-round training diagnostics.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BoostTrace {
    /// Weighted error of each AdaBoost round, including a stopping round.
    pub errors: Vec<f64>,
    /// Sum of AdaBoost sample weights after each round's renormalization.
    pub weight_sums: Vec<f64>,
    /// Mean training log-loss before any round, then after each round.
    pub losses: Vec<f64>,
}

pub fn train_adaboost(
    x: &[FeatureVector],
    y: &[u8],
    cfg: &AdaBoostConfig,
    columns: &[usize],
) -> Result<AdaBoostModel> {
    train_adaboost_traced(x, y, cfg, columns).map(|(m, _)| m)
}

/// AdaBoost with `alpha = ln((1 - eps) / eps) / 2`. Stops early when a
/// round's weighted error reaches 0.5 (that learner is dropped) or 0 (that
/// learner is kept with the error floored at 1e-10).
pub fn train_adaboost_traced(
    x: &[FeatureVector],
    y: &[u8],
    cfg: &AdaBoostConfig,
    columns: &[usize],
) -> Result<(AdaBoostModel, BoostTrace)> {
    if cfg.stump_depth == 0 {
        return Err(Error::InvalidArgument("stump_depth must be at least 1".into()));
    }
    let set = TrainingSet::new(x, y, columns)?;
    let n = set.rows.len();
    let sign: Vec<f64> = set.labels.iter().map(|&l| if l == 1 { 1.0 } else { -1.0 }).collect();
    let mut w = alloc::vec![1.0 / n as f64; n];
    let mut model = AdaBoostModel {
        stumps: Vec::new(),
        alphas: Vec::new(),
        config: cfg.clone(),
        input: InputSpec {
            schema_version: set.schema_version,
            columns: columns.to_vec(),
        },
    };
    let mut trace = BoostTrace::default();

    for _ in 0..cfg.rounds {
        let criterion = WeightedGini {
            y: &set.labels,
            w: &w,
        };
        let stump = grow_with(&set.rows, (0..n).collect(), &criterion, cfg.stump_depth, 2);
        let votes: Vec<f64> = set.rows.iter().map(|r| vote(&stump, r)).collect();
        let error: f64 = (0..n).filter(|&i| votes[i] != sign[i]).map(|i| w[i]).sum();
        trace.errors.push(error);
        if error >= 0.5 {
            break;
        }
        let clamped = error.max(MIN_ERROR);
        let alpha = 0.5 * math::ln((1.0 - clamped) / clamped);
        for i in 0..n {
            w[i] *= math::exp(-alpha * sign[i] * votes[i]);
        }
        let total: f64 = w.iter().sum();
        for wi in &mut w {
            *wi /= total;
        }
        trace.weight_sums.push(w.iter().sum());
        model.stumps.push(stump);
        model.alphas.push(alpha);
        if error == 0.0 {
            break;
        }
    }
    Ok((model, trace))
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct GradientBoostConfig {
    pub rounds: usize,
    pub learning_rate: f64,
    pub tree_depth: usize,
    pub min_samples_split: usize,
}

impl Default for GradientBoostConfig {
    fn default() -> Self {
        GradientBoostConfig {
            rounds: 100,
            learning_rate: 0.1,
            tree_depth: 3,
            min_samples_split: 2,
        }
    }
}

/// Logistic-loss gradient boosting.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GradientBoostModel {
    /// Log-odds of the training base rate.
    pub init: f64,
    pub trees: Vec<RegressionTree>,
    pub config: GradientBoostConfig,
    pub input: InputSpec,
}

impl GradientBoostModel {
    pub fn raw_score(&self, row: &[f64]) -> f64 {
        self.init
            + self.config.learning_rate * self.trees.iter().map(|t| *t.leaf(row)).sum::<f64>()
    }

    pub fn predict_row(&self, row: &[f64]) -> f64 {
        math::sigmoid(self.raw_score(row))
    }

    pub fn predict_proba(&self, x: &FeatureVector) -> Result<f64> {
        Ok(self.predict_row(&self.input.project(x)?))
    }
}

fn mean_log_loss(labels: &[u8], raw: &[f64]) -> f64 {
    let total: f64 = labels
        .iter()
        .zip(raw)
        .map(|(&l, &f)| {
            let p = math::sigmoid(f).clamp(1e-15, 1.0 - 1e-15);
            if l == 1 {
                -math::ln(p)
            } else {
                -math::ln(1.0 - p)
            }
        })
        .sum();
    total / labels.len() as f64
}

pub fn train_gboost(
    x: &[FeatureVector],
    y: &[u8],
    cfg: &GradientBoostConfig,
    columns: &[usize],
) -> Result<GradientBoostModel> {
    train_gboost_traced(x, y, cfg, columns).map(|(m, _)| m)
}

/// Each round fits a regression tree to the residuals `y - p` and sets leaf
/// values to the Newton step `sum(y - p) / sum(p (1 - p))`.
pub fn train_gboost_traced(
    x: &[FeatureVector],
    y: &[u8],
    cfg: &GradientBoostConfig,
    columns: &[usize],
) -> Result<(GradientBoostModel, BoostTrace)> {
    if !cfg.learning_rate.is_finite() || cfg.learning_rate < 0.0 {
        return Err(Error::InvalidArgument(alloc::format!(
            "learning_rate {} must be finite and non-negative",
            cfg.learning_rate
        )));
    }
    if cfg.tree_depth == 0 {
        return Err(Error::InvalidArgument("tree_depth must be at least 1".into()));
    }
    let set = TrainingSet::new(x, y, columns)?;
    let n = set.rows.len();
    let positives = set.labels.iter().filter(|&&l| l == 1).count() as f64;
    let base = positives / n as f64;
    let init = math::ln(base / (1.0 - base));
    let mut raw = alloc::vec![init; n];
    let mut model = GradientBoostModel {
        init,
        trees: Vec::new(),
        config: cfg.clone(),
        input: InputSpec {
            schema_version: set.schema_version,
            columns: columns.to_vec(),
        },
    };
    let mut trace = BoostTrace::default();
    trace.losses.push(mean_log_loss(&set.labels, &raw));

    for _ in 0..cfg.rounds {
        let prob: Vec<f64> = raw.iter().map(|&f| math::sigmoid(f)).collect();
        let residual: Vec<f64> = set
            .labels
            .iter()
            .zip(&prob)
            .map(|(&l, &p)| l as f64 - p)
            .collect();
        let criterion = Variance {
            target: &residual,
            leaf_value: |samples: &[usize]| {
                let num: f64 = samples.iter().map(|&i| residual[i]).sum();
                let den: f64 = samples.iter().map(|&i| prob[i] * (1.0 - prob[i])).sum();
                if den <= 1e-12 {
                    0.0
                } else {
                    num / den
                }
            },
        };
        let tree = grow_with(
            &set.rows,
            (0..n).collect(),
            &criterion,
            cfg.tree_depth,
            cfg.min_samples_split,
        );
        for (f, row) in raw.iter_mut().zip(&set.rows) {
            *f += cfg.learning_rate * tree.leaf(row);
        }
        trace.losses.push(mean_log_loss(&set.labels, &raw));
        model.trees.push(tree);
    }
    Ok((model, trace))
}
