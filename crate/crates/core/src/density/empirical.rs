//! Empirical likelihood under class-conditional feature independence.
//!
//! Continuous features are cut into 10 equal-width bins spanning the
//! labeled-training range (queries outside clamp to the edge bins);
//! categorical features use their own categories. Per class and feature,
//! `P(x_k | y_j) = (count + 1) / (n_j + bins)`, and the prior of a sample is
//! the sum of the per-feature log-probabilities.

use ndarray::ArrayView1;
use serde::{Deserialize, Serialize};

use crate::data::TabularDataset;
use crate::error::{CastError, Result};

pub const N_BINS: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Discretizer {
    EqualWidth { min: f64, max: f64 },
    Categories { cardinality: usize },
}

impl Discretizer {
    pub fn n_bins(&self) -> usize {
        match self {
            Discretizer::EqualWidth { .. } => N_BINS,
            Discretizer::Categories { cardinality } => *cardinality,
        }
    }

    pub fn bin(&self, x: f64) -> usize {
        match *self {
            Discretizer::EqualWidth { min, max } => {
                let width = (max - min) / N_BINS as f64;
                if width <= 0.0 {
                    return if x > max { N_BINS - 1 } else { 0 };
                }
                let b = ((x - min) / width).floor();
                if b < 0.0 {
                    0
                } else {
                    (b as usize).min(N_BINS - 1)
                }
            }
            Discretizer::Categories { cardinality } => (x as usize).min(cardinality - 1),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalModel {
    pub selected: Vec<usize>,
    /// One discretizer per selected feature.
    pub discretizers: Vec<Discretizer>,
    /// `probs[class][feature][bin]`, each inner table sums to 1.
    pub probs: Vec<Vec<Vec<f64>>>,
}

impl EmpiricalModel {
    /// Smoothed `P(x_k | y_j)` for selected-feature position `k`.
    pub fn feature_prob(&self, class: usize, k: usize, x: f64) -> f64 {
        self.probs[class][k][self.discretizers[k].bin(x)]
    }

    /// Per-class log-likelihoods at a full feature row.
    pub fn gamma(&self, row: ArrayView1<'_, f64>) -> Vec<f64> {
        (0..self.probs.len())
            .map(|c| {
                self.selected
                    .iter()
                    .enumerate()
                    .map(|(k, &f)| self.feature_prob(c, k, row[f]).ln())
                    .sum()
            })
            .collect()
    }
}

pub fn fit_empirical_likelihood(labeled: &TabularDataset, selected: &[usize]) -> Result<EmpiricalModel> {
    if selected.is_empty() {
        return Err(CastError::Density("no features selected".into()));
    }
    let n = labeled.n_rows();
    let rows: Vec<usize> = (0..n).collect();
    let by_class = labeled.rows_by_class(&rows);
    if let Some(c) = by_class.iter().position(Vec::is_empty) {
        return Err(CastError::Density(format!("class {c} has no labeled samples")));
    }

    let discretizers: Vec<Discretizer> = selected
        .iter()
        .map(|&f| match labeled.schema()[f].cardinality {
            Some(cardinality) => Discretizer::Categories { cardinality },
            None => {
                let col = labeled.features().column(f).to_owned();
                let min = col.iter().cloned().fold(f64::INFINITY, f64::min);
                let max = col.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                Discretizer::EqualWidth { min, max }
            }
        })
        .collect();

    let probs = by_class
        .iter()
        .map(|members| {
            let n_j = members.len() as f64;
            selected
                .iter()
                .zip(&discretizers)
                .map(|(&f, disc)| {
                    let bins = disc.n_bins();
                    let mut counts = vec![0usize; bins];
                    for &r in members {
                        counts[disc.bin(labeled.value(r, f))] += 1;
                    }
                    counts
                        .into_iter()
                        .map(|c| (c as f64 + 1.0) / (n_j + bins as f64))
                        .collect()
                })
                .collect()
        })
        .collect();

    Ok(EmpiricalModel {
        selected: selected.to_vec(),
        discretizers,
        probs,
    })
}
