//! Random labeling splits, rank-based AUC and the cross-validation harness.

mod auc;
mod experiment;
mod split;

pub use auc::{auc, mann_whitney_auc, per_class_auc};
pub use experiment::{
    run_experiment, CellSummary, EvalReport, ExperimentConfig, FoldRecord, MethodResult,
};
pub use split::{sample_split, split_hash, train_size, MAX_SPLIT_ATTEMPTS};
