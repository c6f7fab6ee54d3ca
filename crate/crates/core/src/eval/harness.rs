use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::metrics::{evaluate, Metrics};
use crate::corpus::{stratified_kfold, Dataset};
use crate::ensemble::{
    train_adaboost, train_forest_on, train_gboost, AdaBoostConfig, GradientBoostConfig, Model,
    TrainConfig,
};
use crate::error::{Error, Result};
use crate::features::{assemble_all, ContextualScorer, FeatureSchema, FeatureSelection, FeatureVector, Resources};
use crate::math;

/// Which ensemble a pipeline trains.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Scheme {
    RandomForest(TrainConfig),
    AdaBoost(AdaBoostConfig),
    GradientBoost(GradientBoostConfig),
}

/// A named classifier plus the feature columns it sees.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PipelineConfig {
    pub name: String,
    pub scheme: Scheme,
    pub features: FeatureSelection,
}

impl PipelineConfig {
    /// Random Forest over the full schema: tokenizers, language evidence
    /// and the soft label.
    pub fn elmict(seed: u64) -> Self {
        PipelineConfig {
            name: "ELMICT".into(),
            scheme: Scheme::RandomForest(TrainConfig {
                seed,
                ..TrainConfig::default()
            }),
            features: FeatureSelection::All,
        }
    }

    /// Random Forest on the whitespace tokenizer block only.
    pub fn whitespace_ablation(seed: u64) -> Self {
        PipelineConfig {
            name: "Whitespace-only RF".into(),
            scheme: Scheme::RandomForest(TrainConfig {
                seed,
                ..TrainConfig::default()
            }),
            features: FeatureSelection::Whitespace,
        }
    }

    /// Tokenizer-feature baselines: Random Forest, AdaBoost, Gradient
    /// Boosting.
    pub fn tokenizer_baselines(seed: u64) -> Vec<Self> {
        alloc::vec![
            PipelineConfig {
                name: "Random Forest".into(),
                scheme: Scheme::RandomForest(TrainConfig {
                    seed,
                    ..TrainConfig::default()
                }),
                features: FeatureSelection::Tokenizers,
            },
            PipelineConfig {
                name: "Adaptive Boosting".into(),
                scheme: Scheme::AdaBoost(AdaBoostConfig::default()),
                features: FeatureSelection::Tokenizers,
            },
            PipelineConfig {
                name: "Gradient Boosting".into(),
                scheme: Scheme::GradientBoost(GradientBoostConfig::default()),
                features: FeatureSelection::Tokenizers,
            },
        ]
    }

    /// Every scheme of the comparison table, ELMICT last.
    pub fn comparison(seed: u64) -> Vec<Self> {
        let mut all = Self::tokenizer_baselines(seed);
        all.push(Self::whitespace_ablation(seed));
        all.push(Self::elmict(seed));
        all
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        if let Scheme::RandomForest(cfg) = &mut self.scheme {
            cfg.seed = seed;
        }
        self
    }
}

/// Trains the configured ensemble on assembled vectors.
pub fn fit(vectors: &[FeatureVector], labels: &[u8], cfg: &PipelineConfig) -> Result<Model> {
    let schema = FeatureSchema::v1();
    let columns = cfg.features.columns(&schema)?;
    Ok(match &cfg.scheme {
        Scheme::RandomForest(c) => Model::Forest(train_forest_on(vectors, labels, c, &columns)?),
        Scheme::AdaBoost(c) => Model::AdaBoost(train_adaboost(vectors, labels, c, &columns)?),
        Scheme::GradientBoost(c) => {
            Model::GradientBoost(train_gboost(vectors, labels, c, &columns)?)
        }
    })
}

/// A trained model with what it was trained on.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedPipeline {
    pub name: String,
    pub model: Model,
    /// Sorted ids of the training messages.
    pub training_ids: Vec<String>,
    /// Local language of the training resources.
    pub local_language: String,
}

pub fn train_pipeline(
    d: &Dataset,
    cfg: &PipelineConfig,
    resources: &Resources,
    scorer: &dyn ContextualScorer,
) -> Result<TrainedPipeline> {
    let labels = d.labels()?;
    let vectors = assemble_all(d.messages(), resources, scorer)?;
    let model = fit(&vectors, &labels, cfg)?;
    let mut training_ids: Vec<String> = d.messages().iter().map(|m| m.id.clone()).collect();
    training_ids.sort();
    Ok(TrainedPipeline {
        name: cfg.name.clone(),
        model,
        training_ids,
        local_language: resources.local_tag().to_string(),
    })
}

/// Mean and sample standard deviation per metric.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MeanStd {
    pub acc: (f64, f64),
    pub f1_macro: (f64, f64),
    pub auc: (f64, f64),
}

impl MeanStd {
    pub fn from_folds(folds: &[Metrics]) -> Self {
        let col = |f: fn(&Metrics) -> f64| {
            let v: Vec<f64> = folds.iter().map(f).collect();
            math::mean_std(&v)
        };
        MeanStd {
            acc: col(|m| m.acc),
            f1_macro: col(|m| m.f1_macro),
            auc: col(|m| m.auc),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EvalReport {
    pub acc: f64,
    pub f1_macro: f64,
    pub auc: f64,
    pub per_fold: Option<Vec<Metrics>>,
    pub mean_std: Option<MeanStd>,
}

impl EvalReport {
    pub fn single(m: Metrics) -> Self {
        EvalReport {
            acc: m.acc,
            f1_macro: m.f1_macro,
            auc: m.auc,
            per_fold: None,
            mean_std: None,
        }
    }

    /// Headline metrics are the fold means.
    pub fn from_folds(folds: Vec<Metrics>) -> Self {
        let ms = MeanStd::from_folds(&folds);
        EvalReport {
            acc: ms.acc.0,
            f1_macro: ms.f1_macro.0,
            auc: ms.auc.0,
            per_fold: Some(folds),
            mean_std: Some(ms),
        }
    }
}

/// Stratified k-fold cross-validation of one pipeline.
pub fn crossval(
    d: &Dataset,
    cfg: &PipelineConfig,
    resources: &Resources,
    scorer: &dyn ContextualScorer,
    k: usize,
    seed: u64,
) -> Result<EvalReport> {
    let mut reports = crossval_many(d, core::slice::from_ref(cfg), resources, scorer, k, seed)?;
    Ok(reports.remove(0))
}

/// Cross-validates several pipelines on the same folds, assembling
/// features once. Forest seeds are replaced by `seed`.
pub fn crossval_many(
    d: &Dataset,
    cfgs: &[PipelineConfig],
    resources: &Resources,
    scorer: &dyn ContextualScorer,
    k: usize,
    seed: u64,
) -> Result<Vec<EvalReport>> {
    let labels = d.labels()?;
    let plan = stratified_kfold(d, k, seed)?;
    let vectors = assemble_all(d.messages(), resources, scorer)?;
    cfgs.iter()
        .map(|cfg| {
            let cfg = cfg.clone().with_seed(seed);
            let folds = (0..k)
                .map(|fold| {
                    let train = plan.train_indices(fold);
                    let test = plan.test_indices(fold);
                    let pick = |idx: &[usize]| -> (Vec<FeatureVector>, Vec<u8>) {
                        (
                            idx.iter().map(|&i| vectors[i].clone()).collect(),
                            idx.iter().map(|&i| labels[i]).collect(),
                        )
                    };
                    let (tx, ty) = pick(&train);
                    let (ex, ey) = pick(&test);
                    let model = fit(&tx, &ty, &cfg)?;
                    let probs = ex
                        .iter()
                        .map(|v| model.predict_proba(v))
                        .collect::<Result<Vec<f64>>>()?;
                    evaluate(&ey, &probs)
                })
                .collect::<Result<Vec<Metrics>>>()?;
            Ok(EvalReport::from_folds(folds))
        })
        .collect()
}

/// Scores a trained pipeline on a test set disjoint from its training ids.
pub fn holdout_eval(
    trained: &TrainedPipeline,
    test: &Dataset,
    resources: &Resources,
    scorer: &dyn ContextualScorer,
) -> Result<EvalReport> {
    let train_ids: BTreeSet<&str> = trained.training_ids.iter().map(String::as_str).collect();
    if let Some(m) = test.messages().iter().find(|m| train_ids.contains(m.id.as_str())) {
        return Err(Error::TrainTestOverlap(m.id.clone()));
    }
    let labels = test.labels()?;
    let probs = test
        .messages()
        .iter()
        .map(|m| {
            let v = crate::features::assemble_features(m, resources, scorer)?;
            trained.model.predict_proba(&v)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(EvalReport::single(evaluate(&labels, &probs)?))
}

/// Applies a model trained with one local language to test data of another,
/// with the local tokenizer and n-gram model swapped in `target`.
pub fn zero_shot_eval(
    trained: &TrainedPipeline,
    test: &Dataset,
    target: &Resources,
    scorer: &dyn ContextualScorer,
) -> Result<EvalReport> {
    if target.local_tag() == trained.local_language {
        return Err(Error::InvalidArgument(alloc::format!(
            "zero-shot target language `{}` equals the training language",
            target.local_tag()
        )));
    }
    holdout_eval(trained, test, target, scorer)
}
