use ndarray::{Array2, ArrayView1, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use super::schema::{validate_schema, FeatureSchema};
use crate::error::{CastError, Result};

/// Label encodings kept by the CSV loader so encoded values can be mapped
/// back to the original strings.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Encoding {
    /// Category strings per feature column, in code order. Empty for
    /// continuous columns.
    pub categories: Vec<Vec<String>>,
    /// Class label strings in class-index order.
    pub classes: Vec<String>,
}

impl Encoding {
    pub fn decode_category(&self, column: usize, code: usize) -> Option<&str> {
        self.categories.get(column)?.get(code).map(String::as_str)
    }

    pub fn decode_class(&self, class: usize) -> Option<&str> {
        self.classes.get(class).map(String::as_str)
    }
}

/// Schema-typed feature matrix with optional labels.
///
/// Categorical cells hold their integer code as an exactly representable
/// `f64` so every classifier sees a single numeric matrix; use
/// [`TabularDataset::code`] to read them back as integers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TabularDataset {
    features: Array2<f64>,
    labels: Vec<Option<usize>>,
    schema: Vec<FeatureSchema>,
    n_classes: usize,
    #[serde(default)]
    encoding: Option<Encoding>,
}

impl TabularDataset {
    pub fn new(
        features: Array2<f64>,
        labels: Vec<Option<usize>>,
        schema: Vec<FeatureSchema>,
        n_classes: usize,
    ) -> Result<Self> {
        let (n, m) = features.dim();
        if labels.len() != n {
            return Err(CastError::DimensionMismatch {
                expected: n,
                actual: labels.len(),
            });
        }
        if schema.len() != m {
            return Err(CastError::Schema(format!(
                "{} schema entries for {} columns",
                schema.len(),
                m
            )));
        }
        validate_schema(&schema)?;
        if n_classes < 2 {
            return Err(CastError::InvalidInput(format!(
                "need at least 2 classes, got {n_classes}"
            )));
        }
        if let Some(((r, c), v)) = features.indexed_iter().find(|(_, v)| !v.is_finite()) {
            return Err(CastError::InvalidInput(format!(
                "non-finite value {v} at row {r}, column {c}"
            )));
        }
        for f in &schema {
            if let Some(card) = f.cardinality {
                let col = features.column(f.index);
                if let Some(v) = col
                    .iter()
                    .find(|&&v| v < 0.0 || v.fract() != 0.0 || v >= card as f64)
                {
                    return Err(CastError::InvalidInput(format!(
                        "feature '{}' holds code {v} outside 0..{card}",
                        f.name
                    )));
                }
            }
        }
        if let Some(l) = labels.iter().flatten().find(|&&l| l >= n_classes) {
            return Err(CastError::InvalidInput(format!(
                "label {l} out of range for {n_classes} classes"
            )));
        }
        Ok(Self {
            features,
            labels,
            schema,
            n_classes,
            encoding: None,
        })
    }

    /// Convenience constructor for fully labeled, all-continuous data.
    pub fn from_continuous(features: Array2<f64>, labels: Vec<usize>, n_classes: usize) -> Result<Self> {
        let schema = (0..features.ncols())
            .map(|i| FeatureSchema::continuous(format!("x{i}"), i))
            .collect();
        Self::new(features, labels.into_iter().map(Some).collect(), schema, n_classes)
    }

    pub fn with_encoding(mut self, encoding: Encoding) -> Self {
        self.encoding = Some(encoding);
        self
    }

    pub fn n_rows(&self) -> usize {
        self.features.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.features.ncols()
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn features(&self) -> ArrayView2<'_, f64> {
        self.features.view()
    }

    pub fn row(&self, i: usize) -> ArrayView1<'_, f64> {
        self.features.row(i)
    }

    pub fn value(&self, row: usize, col: usize) -> f64 {
        self.features[[row, col]]
    }

    /// Categorical code of a cell. Only meaningful for categorical columns.
    pub fn code(&self, row: usize, col: usize) -> u32 {
        self.features[[row, col]] as u32
    }

    pub fn labels(&self) -> &[Option<usize>] {
        &self.labels
    }

    pub fn label(&self, row: usize) -> Option<usize> {
        self.labels[row]
    }

    pub fn schema(&self) -> &[FeatureSchema] {
        &self.schema
    }

    pub fn encoding(&self) -> Option<&Encoding> {
        self.encoding.as_ref()
    }

    pub fn is_fully_labeled(&self) -> bool {
        self.labels.iter().all(Option::is_some)
    }

    /// Labels of the given rows; errors if any of them is unlabeled.
    pub fn labels_of(&self, rows: &[usize]) -> Result<Vec<usize>> {
        rows.iter()
            .map(|&r| {
                self.labels[r]
                    .ok_or_else(|| CastError::InvalidInput(format!("row {r} has no label")))
            })
            .collect()
    }

    /// Feature matrix of the given rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Array2<f64> {
        self.features.select(Axis(0), rows)
    }

    /// A new dataset made of the given rows (labels and schema carried over).
    pub fn subset(&self, rows: &[usize]) -> TabularDataset {
        TabularDataset {
            features: self.select_rows(rows),
            labels: rows.iter().map(|&r| self.labels[r]).collect(),
            schema: self.schema.clone(),
            n_classes: self.n_classes,
            encoding: self.encoding.clone(),
        }
    }

    /// Replace the feature matrix, keeping labels and schema. Used by the
    /// corruption protocol; values are re-validated.
    pub fn with_features(&self, features: Array2<f64>) -> Result<TabularDataset> {
        let mut ds = TabularDataset::new(
            features,
            self.labels.clone(),
            self.schema.clone(),
            self.n_classes,
        )?;
        ds.encoding = self.encoding.clone();
        Ok(ds)
    }

    /// Row indices grouped by class label (unlabeled rows are skipped).
    pub fn rows_by_class(&self, rows: &[usize]) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.n_classes];
        for &r in rows {
            if let Some(l) = self.labels[r] {
                out[l].push(r);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn rejects_nan() {
        let x = array![[1.0, f64::NAN]];
        assert!(TabularDataset::from_continuous(x, vec![0], 2).is_err());
    }

    #[test]
    fn rejects_code_beyond_cardinality() {
        let x = array![[0.0], [2.0]];
        let schema = vec![FeatureSchema::categorical("c", 0, 2)];
        let err = TabularDataset::new(x, vec![Some(0), Some(1)], schema, 2);
        assert!(err.is_err());
    }

    #[test]
    fn rejects_label_out_of_range() {
        let x = array![[0.0], [1.0]];
        assert!(TabularDataset::from_continuous(x, vec![0, 2], 2).is_err());
    }

    #[test]
    fn subset_keeps_order() {
        let x = array![[0.0], [1.0], [2.0]];
        let ds = TabularDataset::from_continuous(x, vec![0, 1, 0], 2).unwrap();
        let s = ds.subset(&[2, 0]);
        assert_eq!(s.value(0, 0), 2.0);
        assert_eq!(s.labels(), &[Some(0), Some(0)]);
    }
}
