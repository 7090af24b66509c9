use std::path::Path;

use ndarray::Array2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{DensityModel, EstimatorKind};
use crate::data::TabularDataset;
use crate::error::{CastError, Result};

/// Cached per-class priors over an unlabeled pool: raw estimator output and
/// its column-wise min-max scaling into `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriorMatrix {
    /// Dataset row id of each matrix row.
    pub row_ids: Vec<usize>,
    /// `U x N`; log-likelihoods for the empirical estimator.
    pub raw: Array2<f64>,
    pub scaled: Array2<f64>,
    pub estimator: EstimatorKind,
}

/// Min-max scale each column independently; a constant column becomes all 1.
pub fn min_max_columns(raw: &Array2<f64>) -> Array2<f64> {
    let mut out = raw.clone();
    for mut col in out.columns_mut() {
        let min = col.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = col.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let span = max - min;
        if span > 0.0 && span.is_finite() {
            col.mapv_inplace(|v| ((v - min) / span).clamp(0.0, 1.0));
        } else {
            col.fill(1.0);
        }
    }
    out
}

impl PriorMatrix {
    pub fn from_raw(row_ids: Vec<usize>, raw: Array2<f64>, estimator: EstimatorKind) -> Result<Self> {
        if raw.nrows() == 0 {
            return Err(CastError::Density("empty unlabeled pool".into()));
        }
        if raw.nrows() != row_ids.len() {
            return Err(CastError::DimensionMismatch {
                expected: row_ids.len(),
                actual: raw.nrows(),
            });
        }
        let scaled = min_max_columns(&raw);
        Ok(Self {
            row_ids,
            raw,
            scaled,
            estimator,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.row_ids.len()
    }

    pub fn n_classes(&self) -> usize {
        self.raw.ncols()
    }

    /// Scaled prior row for the `i`-th pool entry.
    pub fn gamma(&self, i: usize) -> &[f64] {
        self.scaled.row(i).to_slice().expect("standard layout")
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["row_id", "class", "raw", "scaled"])?;
        for (i, &id) in self.row_ids.iter().enumerate() {
            for c in 0..self.n_classes() {
                w.write_record([
                    id.to_string(),
                    c.to_string(),
                    self.raw[[i, c]].to_string(),
                    self.scaled[[i, c]].to_string(),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// Evaluate `model` at the given rows of `ds` and cache the scaled priors.
pub fn build_prior_matrix(model: &DensityModel, ds: &TabularDataset, rows: &[usize]) -> Result<PriorMatrix> {
    if rows.is_empty() {
        return Err(CastError::Density("empty unlabeled pool".into()));
    }
    let n = model.n_classes();
    let gammas: Vec<Vec<f64>> = rows.par_iter().map(|&r| model.gamma(ds.row(r))).collect();
    let raw = Array2::from_shape_fn((rows.len(), n), |(i, c)| gammas[i][c]);
    PriorMatrix::from_raw(rows.to_vec(), raw, model.kind())
}
