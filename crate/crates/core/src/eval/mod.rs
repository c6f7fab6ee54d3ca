//! Metrics, evaluation harnesses and annotator agreement.

mod agreement;
mod harness;
mod metrics;

pub use agreement::{krippendorff_alpha, AgreementTable};
pub use harness::{
    crossval, crossval_many, fit, holdout_eval, train_pipeline, zero_shot_eval, EvalReport,
    MeanStd, PipelineConfig, Scheme, TrainedPipeline,
};
pub use metrics::{accuracy, evaluate, macro_f1, macro_f1_detail, roc_auc, MacroF1, Metrics};
