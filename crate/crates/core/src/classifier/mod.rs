//! Probabilistic base classifiers with a uniform fit / predict contract.
//!
//! Every self-training round trains a fresh model from a [`ClassifierSpec`];
//! fitting is deterministic given the spec (including its seed) and the data.

pub mod gbdt;
pub mod logistic;

use std::path::Path;

use ndarray::{Array2, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::error::{CastError, Result};
use gbdt::{fit_gbdt, GbdtModel, GbdtParams};
use logistic::{fit_logistic_with_history, LogisticModel, LogisticParams};

pub const MODEL_FORMAT_VERSION: u32 = 1;

/// Index of the largest entry; ties resolve to the lowest index.
pub fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate().skip(1) {
        if x > v[best] {
            best = i;
        }
    }
    best
}

/// Anything that maps feature rows to class-probability vectors.
pub trait ProbabilisticClassifier {
    fn n_classes(&self) -> usize;
    fn n_features(&self) -> usize;
    /// One simplex row per input row.
    fn predict_proba(&self, x: ArrayView2<'_, f64>) -> Result<Array2<f64>>;

    fn predict(&self, x: ArrayView2<'_, f64>) -> Result<Vec<usize>> {
        let p = self.predict_proba(x)?;
        Ok(p.rows()
            .into_iter()
            .map(|r| argmax(r.as_slice().expect("standard layout")))
            .collect())
    }
}

/// Something that trains classifiers from scratch.
pub trait Learner: Sync {
    type Model: ProbabilisticClassifier + Send + Sync;

    fn fit(
        &self,
        x: ArrayView2<'_, f64>,
        y: &[usize],
        n_classes: usize,
        sample_weights: Option<&[f64]>,
    ) -> Result<Self::Model>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassifierKind {
    #[default]
    Gbdt,
    Logistic,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct ClassifierSpec {
    pub kind: ClassifierKind,
    pub gbdt: GbdtParams,
    pub logistic: LogisticParams,
    pub seed: u64,
}

impl ClassifierSpec {
    pub fn gbdt(params: GbdtParams, seed: u64) -> Self {
        Self {
            kind: ClassifierKind::Gbdt,
            gbdt: params,
            seed,
            ..Default::default()
        }
    }

    pub fn logistic(params: LogisticParams) -> Self {
        Self {
            kind: ClassifierKind::Logistic,
            logistic: params,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            ClassifierKind::Gbdt => self.gbdt.validate(),
            ClassifierKind::Logistic => self.logistic.validate(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelState {
    Gbdt(GbdtModel),
    Logistic(LogisticModel),
}

/// A trained classifier. Immutable once fitted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedClassifier {
    pub format_version: u32,
    pub spec: ClassifierSpec,
    pub n_classes: usize,
    pub n_features: usize,
    pub state: ModelState,
}

fn check_training_data(
    x: ArrayView2<'_, f64>,
    y: &[usize],
    n_classes: usize,
    sample_weights: Option<&[f64]>,
) -> Result<Vec<f64>> {
    if x.nrows() != y.len() {
        return Err(CastError::DimensionMismatch {
            expected: x.nrows(),
            actual: y.len(),
        });
    }
    if y.is_empty() {
        return Err(CastError::Classifier("no training rows".into()));
    }
    if n_classes < 2 {
        return Err(CastError::Classifier("need at least two classes".into()));
    }
    if let Some(&bad) = y.iter().find(|&&c| c >= n_classes) {
        return Err(CastError::Classifier(format!("label {bad} >= {n_classes}")));
    }
    if y.iter().all(|&c| c == y[0]) {
        return Err(CastError::SingleClass(y[0]));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(CastError::Classifier("non-finite feature value".into()));
    }
    let w = match sample_weights {
        Some(w) if w.len() != y.len() => {
            return Err(CastError::DimensionMismatch {
                expected: y.len(),
                actual: w.len(),
            })
        }
        Some(w) if w.iter().any(|v| !(v.is_finite() && *v >= 0.0)) => {
            return Err(CastError::Classifier("sample weights must be finite and >= 0".into()))
        }
        Some(w) => w.to_vec(),
        None => vec![1.0; y.len()],
    };
    if w.iter().sum::<f64>() <= 0.0 {
        return Err(CastError::Classifier("sample weights sum to zero".into()));
    }
    Ok(w)
}

impl ClassifierSpec {
    pub fn fit(
        &self,
        x: ArrayView2<'_, f64>,
        y: &[usize],
        n_classes: usize,
        sample_weights: Option<&[f64]>,
    ) -> Result<FittedClassifier> {
        self.validate()?;
        let w = check_training_data(x, y, n_classes, sample_weights)?;
        let state = match self.kind {
            ClassifierKind::Gbdt => {
                ModelState::Gbdt(fit_gbdt(&self.gbdt, self.seed, x, y, n_classes, &w)?)
            }
            ClassifierKind::Logistic => {
                ModelState::Logistic(fit_logistic_with_history(&self.logistic, x, y, n_classes, &w)?.0)
            }
        };
        Ok(FittedClassifier {
            format_version: MODEL_FORMAT_VERSION,
            spec: self.clone(),
            n_classes,
            n_features: x.ncols(),
            state,
        })
    }
}

impl Learner for ClassifierSpec {
    type Model = FittedClassifier;

    fn fit(
        &self,
        x: ArrayView2<'_, f64>,
        y: &[usize],
        n_classes: usize,
        sample_weights: Option<&[f64]>,
    ) -> Result<FittedClassifier> {
        ClassifierSpec::fit(self, x, y, n_classes, sample_weights)
    }
}

impl FittedClassifier {
    /// Impurity-gain importances per feature (gbdt only).
    pub fn feature_importances(&self) -> Option<&[f64]> {
        match &self.state {
            ModelState::Gbdt(m) => Some(&m.importances),
            ModelState::Logistic(_) => None,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let model: FittedClassifier = serde_json::from_str(text)?;
        if model.format_version != MODEL_FORMAT_VERSION {
            return Err(CastError::Classifier(format!(
                "unsupported model format version {}",
                model.format_version
            )));
        }
        Ok(model)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

impl ProbabilisticClassifier for FittedClassifier {
    fn n_classes(&self) -> usize {
        self.n_classes
    }

    fn n_features(&self) -> usize {
        self.n_features
    }

    fn predict_proba(&self, x: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        if x.ncols() != self.n_features {
            return Err(CastError::DimensionMismatch {
                expected: self.n_features,
                actual: x.ncols(),
            });
        }
        let mut out = Array2::zeros((x.nrows(), self.n_classes));
        for (i, row) in x.rows().into_iter().enumerate() {
            let p = match &self.state {
                ModelState::Gbdt(m) => m.predict_row(row),
                ModelState::Logistic(m) => m.predict_row(row),
            };
            for (k, v) in p.into_iter().enumerate() {
                out[[i, k]] = v;
            }
        }
        Ok(out)
    }
}
