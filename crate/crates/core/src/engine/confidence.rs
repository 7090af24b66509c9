use serde::{Deserialize, Serialize};

use crate::error::{CastError, Result};

/// A confidence vector together with its prior-regularized counterpart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularizedConfidence {
    pub c: Vec<f64>,
    pub gamma: Vec<f64>,
    pub alpha: f64,
    pub c_r: Vec<f64>,
}

/// `c_r = alpha * (gamma ∘ c) + (1 - alpha) * c`, without renormalization.
pub fn regularize_confidence(c: &[f64], gamma: &[f64], alpha: f64) -> Result<RegularizedConfidence> {
    if c.len() != gamma.len() {
        return Err(CastError::DimensionMismatch {
            expected: c.len(),
            actual: gamma.len(),
        });
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(CastError::InvalidInput(format!("alpha {alpha} not in [0, 1]")));
    }
    Ok(RegularizedConfidence {
        c: c.to_vec(),
        gamma: gamma.to_vec(),
        alpha,
        c_r: blend(c, gamma, alpha),
    })
}

pub(crate) fn blend(c: &[f64], gamma: &[f64], alpha: f64) -> Vec<f64> {
    c.iter()
        .zip(gamma)
        .map(|(&cj, &gj)| alpha * (gj * cj) + (1.0 - alpha) * cj)
        .collect()
}
