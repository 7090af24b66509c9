//! Per-class prior knowledge: density estimators fitted on labeled rows and
//! the cached, min-max scaled prior matrix over the unlabeled pool.

pub mod empirical;
pub mod kde;
pub mod prior;

use ndarray::ArrayView1;
use serde::{Deserialize, Serialize};

use crate::data::TabularDataset;
use crate::error::Result;

pub use empirical::{fit_empirical_likelihood, EmpiricalModel};
pub use kde::{fit_kde, KdeModel};
pub use prior::{build_prior_matrix, min_max_columns, PriorMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorKind {
    Kde,
    #[default]
    EmpiricalLikelihood,
}

impl EstimatorKind {
    pub fn name(self) -> &'static str {
        match self {
            EstimatorKind::Kde => "kde",
            EstimatorKind::EmpiricalLikelihood => "empirical_likelihood",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DensityModel {
    Kde(KdeModel),
    EmpiricalLikelihood(EmpiricalModel),
}

impl DensityModel {
    pub fn fit(kind: EstimatorKind, labeled: &TabularDataset, selected: &[usize]) -> Result<Self> {
        Ok(match kind {
            EstimatorKind::Kde => DensityModel::Kde(fit_kde(labeled, selected)?),
            EstimatorKind::EmpiricalLikelihood => {
                DensityModel::EmpiricalLikelihood(fit_empirical_likelihood(labeled, selected)?)
            }
        })
    }

    pub fn kind(&self) -> EstimatorKind {
        match self {
            DensityModel::Kde(_) => EstimatorKind::Kde,
            DensityModel::EmpiricalLikelihood(_) => EstimatorKind::EmpiricalLikelihood,
        }
    }

    pub fn n_classes(&self) -> usize {
        match self {
            DensityModel::Kde(m) => m.classes.len(),
            DensityModel::EmpiricalLikelihood(m) => m.probs.len(),
        }
    }

    pub fn selected(&self) -> &[usize] {
        match self {
            DensityModel::Kde(m) => &m.selected,
            DensityModel::EmpiricalLikelihood(m) => &m.selected,
        }
    }

    /// Raw per-class prior at a full feature row (densities for KDE,
    /// log-likelihoods for the empirical estimator).
    pub fn gamma(&self, row: ArrayView1<'_, f64>) -> Vec<f64> {
        match self {
            DensityModel::Kde(m) => m.gamma(row),
            DensityModel::EmpiricalLikelihood(m) => m.gamma(row),
        }
    }
}
