//! L2-regularized multinomial logistic regression trained by full-batch
//! gradient descent on standardized features.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};
use serde::{Deserialize, Serialize};

use super::gbdt::softmax;
use crate::error::{CastError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LogisticParams {
    pub l2: f64,
    pub iterations: usize,
    pub step_size: f64,
}

impl Default for LogisticParams {
    fn default() -> Self {
        Self {
            l2: 1e-3,
            iterations: 300,
            step_size: 0.5,
        }
    }
}

impl LogisticParams {
    pub fn validate(&self) -> Result<()> {
        if self.l2 < 0.0 {
            return Err(CastError::Classifier(format!("l2 {} must be >= 0", self.l2)));
        }
        if !(self.step_size > 0.0) {
            return Err(CastError::Classifier("step_size must be > 0".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticModel {
    pub n_classes: usize,
    pub mean: Array1<f64>,
    pub scale: Array1<f64>,
    /// `n_classes x n_features`
    pub weights: Array2<f64>,
    pub bias: Array1<f64>,
}

impl LogisticModel {
    /// A model with all-zero parameters (predicts the uniform distribution).
    pub fn zeros(n_features: usize, n_classes: usize) -> Self {
        Self {
            n_classes,
            mean: Array1::zeros(n_features),
            scale: Array1::ones(n_features),
            weights: Array2::zeros((n_classes, n_features)),
            bias: Array1::zeros(n_classes),
        }
    }

    pub fn n_features(&self) -> usize {
        self.mean.len()
    }

    fn logits(&self, row: ArrayView1<'_, f64>) -> Vec<f64> {
        let z = (&row - &self.mean) / &self.scale;
        (0..self.n_classes)
            .map(|k| self.weights.row(k).dot(&z) + self.bias[k])
            .collect()
    }

    pub fn predict_row(&self, row: ArrayView1<'_, f64>) -> Vec<f64> {
        softmax(&self.logits(row))
    }
}

/// Fit and return the model together with the training objective recorded
/// before every update and after the last one.
pub fn fit_logistic_with_history(
    params: &LogisticParams,
    x: ArrayView2<'_, f64>,
    y: &[usize],
    n_classes: usize,
    sample_weights: &[f64],
) -> Result<(LogisticModel, Vec<f64>)> {
    params.validate()?;
    let (n, m) = x.dim();
    let total_w: f64 = sample_weights.iter().sum();
    let mut mean = Array1::<f64>::zeros(m);
    for (row, &w) in x.rows().into_iter().zip(sample_weights) {
        mean.scaled_add(w / total_w, &row);
    }
    let mut var = Array1::<f64>::zeros(m);
    for (row, &w) in x.rows().into_iter().zip(sample_weights) {
        let d = &row - &mean;
        var.scaled_add(w / total_w, &(&d * &d));
    }
    let scale = var.mapv(|v| if v > 1e-24 { v.sqrt() } else { 1.0 });
    let z = (&x - &mean) / &scale;

    let mut model = LogisticModel {
        n_classes,
        mean,
        scale,
        weights: Array2::zeros((n_classes, m)),
        bias: Array1::zeros(n_classes),
    };
    let mut history = Vec::with_capacity(params.iterations + 1);
    for _ in 0..params.iterations {
        let (loss, gw, gb) = objective(params, &model, &z, y, sample_weights, total_w, n);
        history.push(loss);
        model.weights.scaled_add(-params.step_size, &gw);
        model.bias.scaled_add(-params.step_size, &gb);
    }
    history.push(objective(params, &model, &z, y, sample_weights, total_w, n).0);
    Ok((model, history))
}

fn objective(
    params: &LogisticParams,
    model: &LogisticModel,
    z: &Array2<f64>,
    y: &[usize],
    w: &[f64],
    total_w: f64,
    n: usize,
) -> (f64, Array2<f64>, Array1<f64>) {
    let k = model.n_classes;
    let mut gw = Array2::<f64>::zeros(model.weights.dim());
    let mut gb = Array1::<f64>::zeros(k);
    let mut loss = 0.0;
    for i in 0..n {
        let zi = z.row(i);
        let logits: Vec<f64> = (0..k)
            .map(|c| model.weights.row(c).dot(&zi) + model.bias[c])
            .collect();
        let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lse = max + logits.iter().map(|v| (v - max).exp()).sum::<f64>().ln();
        loss += w[i] * (lse - logits[y[i]]);
        let p = softmax(&logits);
        for c in 0..k {
            let d = w[i] * (p[c] - if c == y[i] { 1.0 } else { 0.0 }) / total_w;
            gw.row_mut(c).scaled_add(d, &zi);
            gb[c] += d;
        }
    }
    let reg = 0.5 * params.l2 * model.weights.iter().map(|v| v * v).sum::<f64>();
    gw.scaled_add(params.l2, &model.weights);
    (loss / total_w + reg, gw, gb)
}
