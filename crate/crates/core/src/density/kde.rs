//! Per-class product-kernel density estimator over mixed feature types.
//!
//! Continuous features use a Gaussian kernel with a rule-of-thumb bandwidth
//! `1.06 * sd * n^(-1/5)`; categorical features use the Aitchison-Aitken
//! kernel, which puts mass `1 - lambda` on the observed category and
//! `lambda / (card - 1)` on each other category.

use std::f64::consts::PI;

use ndarray::{Array2, ArrayView1};
use serde::{Deserialize, Serialize};

use crate::data::TabularDataset;
use crate::error::{CastError, Result};

pub const SD_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum KernelParam {
    Gaussian { bandwidth: f64 },
    AitchisonAitken { lambda: f64, cardinality: usize },
}

impl KernelParam {
    pub fn eval(&self, x: f64, xi: f64) -> f64 {
        match *self {
            KernelParam::Gaussian { bandwidth: h } => {
                let u = (x - xi) / h;
                (-0.5 * u * u).exp() / (h * (2.0 * PI).sqrt())
            }
            KernelParam::AitchisonAitken {
                lambda,
                cardinality,
            } => {
                if x == xi {
                    1.0 - lambda
                } else {
                    lambda / (cardinality as f64 - 1.0)
                }
            }
        }
    }
}

/// Training points and kernel settings for one class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassKernel {
    /// `n_j x d` matrix over the selected features.
    pub points: Array2<f64>,
    /// One kernel per selected feature.
    pub kernels: Vec<KernelParam>,
}

impl ClassKernel {
    pub fn density(&self, x: &[f64]) -> f64 {
        let n = self.points.nrows();
        let mut sum = 0.0;
        for p in self.points.rows() {
            let mut prod = 1.0;
            for ((k, &xv), &pv) in self.kernels.iter().zip(x).zip(p.iter()) {
                prod *= k.eval(xv, pv);
            }
            sum += prod;
        }
        sum / n as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KdeModel {
    pub selected: Vec<usize>,
    pub classes: Vec<ClassKernel>,
}

impl KdeModel {
    /// Per-class densities at a full feature row.
    pub fn gamma(&self, row: ArrayView1<'_, f64>) -> Vec<f64> {
        let x: Vec<f64> = self.selected.iter().map(|&f| row[f]).collect();
        self.classes.iter().map(|c| c.density(&x)).collect()
    }

    /// Multiply every Gaussian bandwidth by `factor`.
    pub fn scale_bandwidths(&mut self, factor: f64) {
        for c in &mut self.classes {
            for k in &mut c.kernels {
                if let KernelParam::Gaussian { bandwidth } = k {
                    *bandwidth *= factor;
                }
            }
        }
    }
}

fn sample_sd(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (ss / (n - 1.0)).sqrt()
}

/// Fit one product-kernel estimator per class on a fully labeled dataset,
/// restricted to the `selected` feature columns.
pub fn fit_kde(labeled: &TabularDataset, selected: &[usize]) -> Result<KdeModel> {
    if selected.is_empty() {
        return Err(CastError::Density("no features selected".into()));
    }
    let rows: Vec<usize> = (0..labeled.n_rows()).collect();
    let by_class = labeled.rows_by_class(&rows);
    let d = selected.len();
    let mut classes = Vec::with_capacity(by_class.len());
    for (c, members) in by_class.iter().enumerate() {
        let n_j = members.len();
        if n_j < 2 {
            return Err(CastError::Density(format!(
                "class {c} has {n_j} labeled samples; kernel density needs at least 2 \
                 (use the empirical-likelihood estimator instead)"
            )));
        }
        let points = Array2::from_shape_fn((n_j, d), |(i, k)| labeled.value(members[i], selected[k]));
        let kernels = selected
            .iter()
            .enumerate()
            .map(|(k, &f)| match labeled.schema()[f].cardinality {
                Some(card) => {
                    let rule = (n_j as f64).powf(-2.0 / (d as f64 + 4.0));
                    KernelParam::AitchisonAitken {
                        lambda: rule.min((card as f64 - 1.0) / card as f64),
                        cardinality: card,
                    }
                }
                None => {
                    let col: Vec<f64> = points.column(k).to_vec();
                    let sd = sample_sd(&col).max(SD_FLOOR);
                    KernelParam::Gaussian {
                        bandwidth: 1.06 * sd * (n_j as f64).powf(-0.2),
                    }
                }
            })
            .collect();
        classes.push(ClassKernel { points, kernels });
    }
    Ok(KdeModel {
        selected: selected.to_vec(),
        classes,
    })
}
