//! Per-class Mahalanobis distance filter for pseudo-label candidates.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::pseudo::PseudoLabelSet;
use crate::data::TabularDataset;

pub const QUANTILE: f64 = 0.975;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum FilterOutcome {
    Applied { removed: usize },
    Disabled { reason: String },
}

/// Class-wise Gaussian fit used to score candidates.
pub struct MahalanobisModel {
    means: Vec<DVector<f64>>,
    factors: Vec<nalgebra::Cholesky<f64, nalgebra::Dyn>>,
    pub cutoff: f64,
}

impl MahalanobisModel {
    /// Fit on the `labeled` rows of `ds`. Returns the reason when the filter
    /// cannot be used.
    pub fn fit(ds: &TabularDataset, labeled: &[usize]) -> std::result::Result<Self, String> {
        let d = ds.n_features();
        let by_class = ds.rows_by_class(labeled);
        let mut means = Vec::with_capacity(by_class.len());
        let mut factors = Vec::with_capacity(by_class.len());
        for (c, rows) in by_class.iter().enumerate() {
            if rows.len() < d + 2 {
                return Err(format!(
                    "class {c} has {} labeled rows; the filter needs at least {}",
                    rows.len(),
                    d + 2
                ));
            }
            let n = rows.len() as f64;
            let x = DMatrix::from_fn(rows.len(), d, |i, k| ds.value(rows[i], k));
            let mu = DVector::from_fn(d, |k, _| x.column(k).sum() / n);
            let mut cov = DMatrix::<f64>::zeros(d, d);
            for i in 0..rows.len() {
                let diff = x.row(i).transpose() - &mu;
                cov += &diff * diff.transpose();
            }
            cov /= n - 1.0;
            let eps = 1e-6 * cov.trace() / d as f64;
            for k in 0..d {
                cov[(k, k)] += eps;
            }
            let chol = nalgebra::Cholesky::new(cov)
                .ok_or_else(|| format!("class {c} covariance is singular after ridge"))?;
            means.push(mu);
            factors.push(chol);
        }
        let chi = ChiSquared::new(d as f64).map_err(|e| e.to_string())?;
        Ok(Self {
            means,
            factors,
            cutoff: chi.inverse_cdf(QUANTILE),
        })
    }

    pub fn squared_distance(&self, class: usize, x: &[f64]) -> f64 {
        let diff = DVector::from_column_slice(x) - &self.means[class];
        let sol = self.factors[class].solve(&diff);
        diff.dot(&sol)
    }

    pub fn keep(&self, class: usize, x: &[f64]) -> bool {
        self.squared_distance(class, x) <= self.cutoff
    }
}

/// Drop candidates farther than the chi-square cutoff from their assigned
/// class. When the filter cannot be fitted the candidates pass unchanged.
pub fn mahalanobis_filter(
    candidates: &PseudoLabelSet,
    ds: &TabularDataset,
    labeled: &[usize],
) -> (PseudoLabelSet, FilterOutcome) {
    match MahalanobisModel::fit(ds, labeled) {
        Ok(model) => {
            let mut out = candidates.clone();
            out.entries
                .retain(|e| model.keep(e.class, &ds.row(e.row).to_vec()));
            let removed = candidates.len() - out.len();
            (out, FilterOutcome::Applied { removed })
        }
        Err(reason) => {
            log::warn!("mahalanobis filter disabled: {reason}");
            (candidates.clone(), FilterOutcome::Disabled { reason })
        }
    }
}
