use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::classifier::argmax;
use crate::error::{CastError, Result};

/// Slack for products like `3 * 0.2 = 0.6000000000000001` before `ceil`.
const COUNT_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PseudoLabel {
    /// Dataset row id.
    pub row: usize,
    pub class: usize,
    /// The score the admission test saw (max of the operative vector).
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PseudoLabelSet {
    pub iteration: usize,
    pub threshold: f64,
    pub entries: Vec<PseudoLabel>,
}

impl PseudoLabelSet {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn rows(&self) -> Vec<usize> {
        self.entries.iter().map(|e| e.row).collect()
    }

    pub fn class_histogram(&self, n_classes: usize) -> Vec<usize> {
        let mut h = vec![0; n_classes];
        for e in &self.entries {
            h[e.class] += 1;
        }
        h
    }

    /// Same rows with the same classes (scores ignored).
    pub fn same_labels(&self, other: &PseudoLabelSet) -> bool {
        self.entries.len() == other.entries.len()
            && self
                .entries
                .iter()
                .zip(&other.entries)
                .all(|(a, b)| a.row == b.row && a.class == b.class)
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["iteration", "row_id", "class", "score"])?;
        for e in &self.entries {
            w.write_record([
                self.iteration.to_string(),
                e.row.to_string(),
                e.class.to_string(),
                e.score.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Argmax (ties to the lowest index) if the top score reaches `tau`.
pub fn pseudo_label(scores: &[f64], tau: f64) -> Option<usize> {
    if scores.is_empty() {
        return None;
    }
    let k = argmax(scores);
    (scores[k] >= tau).then_some(k)
}

/// Number of rows a curriculum step of `fraction` must admit.
pub fn curriculum_count(fraction: f64, n: usize) -> usize {
    ((fraction * n as f64 - COUNT_EPS).ceil().max(1.0) as usize).min(n)
}

/// Score of the `ceil(fraction * U)`-th largest entry.
pub fn curriculum_threshold(scores: &[f64], fraction: f64) -> Result<f64> {
    if scores.is_empty() {
        return Err(CastError::InvalidInput("curriculum threshold of no scores".into()));
    }
    if !(fraction > 0.0 && fraction <= 1.0 + COUNT_EPS) {
        return Err(CastError::InvalidInput(format!("curriculum fraction {fraction} not in (0, 1]")));
    }
    let mut sorted = scores.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    Ok(sorted[curriculum_count(fraction.min(1.0), sorted.len()) - 1])
}

/// Curriculum fraction at 1-based `iteration`, clamped to 1.
pub fn curriculum_fraction(step: f64, iteration: usize) -> f64 {
    let f = step * iteration as f64;
    if f >= 1.0 - COUNT_EPS {
        1.0
    } else {
        f
    }
}
