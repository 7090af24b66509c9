use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{CastError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    F1,
    #[default]
    Accuracy,
    BalancedAccuracy,
}

impl MetricKind {
    pub const ALL: [MetricKind; 3] = [MetricKind::F1, MetricKind::Accuracy, MetricKind::BalancedAccuracy];

    pub fn name(self) -> &'static str {
        match self {
            MetricKind::F1 => "f1",
            MetricKind::Accuracy => "accuracy",
            MetricKind::BalancedAccuracy => "balanced_accuracy",
        }
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn f1_for(pred: &[usize], truth: &[usize], class: usize) -> f64 {
    let mut tp = 0;
    let mut fp = 0;
    let mut fn_ = 0;
    for (&p, &t) in pred.iter().zip(truth) {
        match (p == class, t == class) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            _ => {}
        }
    }
    let precision = ratio(tp, tp + fp);
    let recall = ratio(tp, tp + fn_);
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

/// Score predictions against ground truth.
///
/// F1 is the class-1 F1 when only classes 0 and 1 occur, macro-F1 over the
/// classes seen in either vector otherwise. Balanced accuracy averages recall
/// over the classes present in `truth`.
pub fn metric(pred: &[usize], truth: &[usize], kind: MetricKind) -> Result<f64> {
    if pred.len() != truth.len() {
        return Err(CastError::DimensionMismatch {
            expected: truth.len(),
            actual: pred.len(),
        });
    }
    if truth.is_empty() {
        return Err(CastError::InvalidInput("metric of an empty sample".into()));
    }
    Ok(match kind {
        MetricKind::Accuracy => ratio(pred.iter().zip(truth).filter(|(p, t)| p == t).count(), truth.len()),
        MetricKind::BalancedAccuracy => {
            let classes: BTreeSet<usize> = truth.iter().copied().collect();
            let recalls: f64 = classes
                .iter()
                .map(|&c| {
                    let support = truth.iter().filter(|&&t| t == c).count();
                    let hit = pred.iter().zip(truth).filter(|&(&p, &t)| t == c && p == c).count();
                    ratio(hit, support)
                })
                .sum();
            recalls / classes.len() as f64
        }
        MetricKind::F1 => {
            let classes: BTreeSet<usize> = truth.iter().chain(pred).copied().collect();
            if classes.iter().all(|&c| c <= 1) {
                f1_for(pred, truth, 1)
            } else {
                classes.iter().map(|&c| f1_for(pred, truth, c)).sum::<f64>() / classes.len() as f64
            }
        }
    })
}
