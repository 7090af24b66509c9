//! Expected calibration error and the post-hoc calibration baselines:
//! temperature scaling and histogram binning.

use ndarray::{Array2, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::classifier::argmax;
use crate::error::{CastError, Result};

pub const DEFAULT_BINS: usize = 10;
pub const T_MIN: f64 = 0.05;
pub const T_MAX: f64 = 20.0;
const LOG_FLOOR: f64 = 1e-12;

/// Zero-based index of the interval `((b-1)/M, b/M]` holding `conf`.
/// Zero goes to the first bin.
pub fn bin_index(conf: f64, m: usize) -> usize {
    let mf = m as f64;
    let mut k = ((conf * mf).ceil() as usize).clamp(1, m);
    // `conf * M` can land a hair above an edge (0.3 * 10 = 3.0000000000000004)
    while k > 1 && conf <= (k - 1) as f64 / mf {
        k -= 1;
    }
    while k < m && conf > k as f64 / mf {
        k += 1;
    }
    k - 1
}

pub fn ece(confidences: &[f64], correct: &[bool], m: usize) -> Result<f64> {
    if confidences.is_empty() {
        return Err(CastError::InvalidInput("ece of an empty sample".into()));
    }
    if confidences.len() != correct.len() {
        return Err(CastError::DimensionMismatch {
            expected: confidences.len(),
            actual: correct.len(),
        });
    }
    if m == 0 {
        return Err(CastError::InvalidInput("ece needs at least one bin".into()));
    }
    let mut count = vec![0usize; m];
    let mut hits = vec![0usize; m];
    let mut conf_sum = vec![0.0; m];
    for (&c, &ok) in confidences.iter().zip(correct) {
        let b = bin_index(c, m);
        count[b] += 1;
        hits[b] += usize::from(ok);
        conf_sum[b] += c;
    }
    let n = confidences.len() as f64;
    Ok((0..m)
        .filter(|&b| count[b] > 0)
        .map(|b| {
            let k = count[b] as f64;
            (k / n) * (hits[b] as f64 / k - conf_sum[b] / k).abs()
        })
        .sum())
}

/// ECE of the predicted-class confidence of each probability row.
pub fn ece_of_probs(probs: ArrayView2<'_, f64>, labels: &[usize], m: usize) -> Result<f64> {
    let (conf, correct) = confidence_and_correct(probs, labels)?;
    ece(&conf, &correct, m)
}

fn confidence_and_correct(probs: ArrayView2<'_, f64>, labels: &[usize]) -> Result<(Vec<f64>, Vec<bool>)> {
    if probs.nrows() != labels.len() {
        return Err(CastError::DimensionMismatch {
            expected: probs.nrows(),
            actual: labels.len(),
        });
    }
    Ok(probs
        .rows()
        .into_iter()
        .zip(labels)
        .map(|(r, &y)| {
            let r = r.to_vec();
            let k = argmax(&r);
            (r[k], k == y)
        })
        .unzip())
}

/// `softmax(log p / T)` with probabilities floored before the log. `T = 1`
/// returns the input unchanged.
pub fn temperature_scale(p: &[f64], t: f64) -> Vec<f64> {
    if t == 1.0 {
        return p.to_vec();
    }
    let logits: Vec<f64> = p.iter().map(|&v| v.max(LOG_FLOOR).ln() / t).collect();
    crate::classifier::gbdt::softmax(&logits)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CalibrationKind {
    Temperature { temperature: f64 },
    /// Validation accuracy per bin; `None` for bins that saw no samples.
    Histogram { accuracies: Vec<Option<f64>> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationMap {
    pub kind: CalibrationKind,
    pub fit_ece: f64,
}

impl CalibrationMap {
    pub fn apply(&self, p: &[f64]) -> Vec<f64> {
        match &self.kind {
            CalibrationKind::Temperature { temperature } => temperature_scale(p, *temperature),
            CalibrationKind::Histogram { accuracies } => {
                let k = argmax(p);
                let conf = p[k];
                let Some(acc) = accuracies[bin_index(conf, accuracies.len())] else {
                    return p.to_vec();
                };
                let rest = 1.0 - conf;
                let n_other = p.len() - 1;
                p.iter()
                    .enumerate()
                    .map(|(j, &v)| {
                        if j == k {
                            acc
                        } else if rest > 0.0 {
                            v / rest * (1.0 - acc)
                        } else {
                            (1.0 - acc) / n_other as f64
                        }
                    })
                    .collect()
            }
        }
    }

    pub fn apply_matrix(&self, probs: ArrayView2<'_, f64>) -> Array2<f64> {
        let mut out = probs.to_owned();
        for mut row in out.rows_mut() {
            let v = self.apply(&row.to_vec());
            row.iter_mut().zip(v).for_each(|(dst, src)| *dst = src);
        }
        out
    }
}

/// Fit a single temperature on validation probabilities by golden-section
/// search over `[0.05, 20]` minimizing ECE. `T = 1` is also evaluated and kept
/// when the search does not beat it.
pub fn fit_temperature(val_probs: ArrayView2<'_, f64>, val_labels: &[usize]) -> Result<CalibrationMap> {
    if val_labels.is_empty() {
        return Err(CastError::InvalidInput("empty validation set".into()));
    }
    if val_labels.iter().all(|&y| y == val_labels[0]) {
        return Err(CastError::SingleClass(val_labels[0]));
    }
    let objective = |t: f64| -> Result<f64> {
        let scaled = CalibrationMap {
            kind: CalibrationKind::Temperature { temperature: t },
            fit_ece: 0.0,
        }
        .apply_matrix(val_probs);
        ece_of_probs(scaled.view(), val_labels, DEFAULT_BINS)
    };

    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (T_MIN, T_MAX);
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let mut fc = objective(c)?;
    let mut fd = objective(d)?;
    while b - a > 1e-4 {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = objective(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = objective(d)?;
        }
    }
    let (mut best_t, mut best) = if fc <= fd { (c, fc) } else { (d, fd) };
    let at_one = objective(1.0)?;
    if at_one <= best {
        best_t = 1.0;
        best = at_one;
    }
    Ok(CalibrationMap {
        kind: CalibrationKind::Temperature { temperature: best_t },
        fit_ece: best,
    })
}

/// Per-bin validation accuracy of the predicted class.
pub fn fit_histogram_binning(val_max_probs: &[f64], val_correct: &[bool], m: usize) -> Result<CalibrationMap> {
    if val_max_probs.is_empty() {
        return Err(CastError::InvalidInput("empty validation set".into()));
    }
    let mut count = vec![0usize; m];
    let mut hits = vec![0usize; m];
    for (&c, &ok) in val_max_probs.iter().zip(val_correct) {
        let b = bin_index(c, m);
        count[b] += 1;
        hits[b] += usize::from(ok);
    }
    let accuracies: Vec<Option<f64>> = (0..m)
        .map(|b| (count[b] > 0).then(|| hits[b] as f64 / count[b] as f64))
        .collect();
    let mapped: Vec<f64> = val_max_probs
        .iter()
        .map(|&c| accuracies[bin_index(c, m)].unwrap_or(c))
        .collect();
    let fit_ece = ece(&mapped, val_correct, m)?;
    Ok(CalibrationMap {
        kind: CalibrationKind::Histogram { accuracies },
        fit_ece,
    })
}

/// Histogram binning fitted directly from validation probability rows.
pub fn fit_histogram_from_probs(val_probs: ArrayView2<'_, f64>, val_labels: &[usize]) -> Result<CalibrationMap> {
    let (conf, correct) = confidence_and_correct(val_probs, val_labels)?;
    fit_histogram_binning(&conf, &correct, DEFAULT_BINS)
}
