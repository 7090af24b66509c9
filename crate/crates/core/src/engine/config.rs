use serde::{Deserialize, Serialize};

use crate::density::EstimatorKind;
use crate::error::{CastError, Result};
use crate::evaluation::MetricKind;
use crate::selection::DEFAULT_REPEATS;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Fixed threshold.
    #[default]
    Fpl,
    /// Curriculum: admit the top 20%, 40%, ... of scored rows.
    Cpl,
    /// Threshold zero: every unlabeled row is admitted.
    Naive,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Strategy::Fpl, Strategy::Cpl, Strategy::Naive];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Fpl => "fpl",
            Strategy::Cpl => "cpl",
            Strategy::Naive => "naive",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseFilter {
    #[default]
    None,
    Mahalanobis,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CalibrationArm {
    #[default]
    None,
    Temperature,
    Histogram,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SelfTrainConfig {
    pub strategy: Strategy,
    pub tau: f64,
    pub curriculum_step: f64,
    pub alpha: f64,
    pub use_cast: bool,
    pub estimator: EstimatorKind,
    pub noise_filter: NoiseFilter,
    pub metric: MetricKind,
    pub max_iterations: usize,
    pub calibration: CalibrationArm,
    pub feature_selection: bool,
    pub selection_repeats: usize,
}

impl Default for SelfTrainConfig {
    fn default() -> Self {
        Self {
            strategy: Strategy::Fpl,
            tau: 0.6,
            curriculum_step: 0.2,
            alpha: 0.5,
            use_cast: false,
            estimator: EstimatorKind::EmpiricalLikelihood,
            noise_filter: NoiseFilter::None,
            metric: MetricKind::Accuracy,
            max_iterations: 50,
            calibration: CalibrationArm::None,
            feature_selection: true,
            selection_repeats: DEFAULT_REPEATS,
        }
    }
}

impl SelfTrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0 && self.tau < 1.0) {
            return Err(CastError::Config(format!("tau {} not in (0, 1)", self.tau)));
        }
        if !(self.curriculum_step > 0.0 && self.curriculum_step <= 1.0) {
            return Err(CastError::Config(format!(
                "curriculum_step {} not in (0, 1]",
                self.curriculum_step
            )));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(CastError::Config(format!("alpha {} not in [0, 1]", self.alpha)));
        }
        if self.use_cast && self.feature_selection && self.selection_repeats == 0 {
            return Err(CastError::Config("selection_repeats must be >= 1".into()));
        }
        Ok(())
    }

    /// Admission threshold used by the fixed-threshold strategies.
    pub fn fixed_tau(&self) -> Option<f64> {
        match self.strategy {
            Strategy::Fpl => Some(self.tau),
            Strategy::Naive => Some(0.0),
            Strategy::Cpl => None,
        }
    }
}
