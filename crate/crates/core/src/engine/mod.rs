//! Self-training with optional prior-regularized confidence.

pub mod config;
pub mod confidence;
pub mod filter;
pub mod pseudo;
pub mod run;

pub use config::{CalibrationArm, NoiseFilter, SelfTrainConfig, Strategy};
pub use confidence::{regularize_confidence, RegularizedConfidence};
pub use filter::{mahalanobis_filter, FilterOutcome, MahalanobisModel};
pub use pseudo::{curriculum_count, curriculum_fraction, curriculum_threshold, pseudo_label, PseudoLabel, PseudoLabelSet};
pub use run::{
    build_fold_prior, run_self_training, FoldPrior, IterationRecord, MetricScores, RunReport, RunTimings,
    SelfTrainOutcome, Termination,
};
