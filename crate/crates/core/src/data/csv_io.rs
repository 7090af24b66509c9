//! CSV + JSON-schema ingestion.
//!
//! Categorical strings (and the target) are label-encoded in order of first
//! appearance. Missing cells (empty, `?` or `NA`) are imputed: continuous
//! columns by the mean of their observed values, categorical columns by
//! their most frequent code (lowest code on ties). A missing target leaves
//! the row unlabeled.

use std::collections::HashMap;
use std::io::Read;
use std::path::Path;

use ndarray::Array2;

use super::dataset::{Encoding, TabularDataset};
use super::schema::{FeatureKind, FeatureSchema, SchemaFile};
use crate::error::{CastError, Result};

pub fn is_missing(cell: &str) -> bool {
    matches!(cell, "" | "?" | "NA")
}

pub fn read_schema_file(path: impl AsRef<Path>) -> Result<SchemaFile> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| CastError::Load(format!("cannot read schema {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CastError::Schema(format!("invalid schema file {}: {e}", path.display())))
}

/// Load a CSV file described by a schema file.
pub fn load_csv(path: impl AsRef<Path>, schema_path: impl AsRef<Path>) -> Result<TabularDataset> {
    let schema = read_schema_file(schema_path)?;
    let path = path.as_ref();
    let file = std::fs::File::open(path)
        .map_err(|e| CastError::Load(format!("cannot open {}: {e}", path.display())))?;
    load_csv_reader(file, &schema)
}

#[derive(Default)]
struct LabelEncoder {
    codes: HashMap<String, usize>,
    values: Vec<String>,
}

impl LabelEncoder {
    fn encode(&mut self, s: &str) -> usize {
        if let Some(&c) = self.codes.get(s) {
            return c;
        }
        let c = self.values.len();
        self.codes.insert(s.to_string(), c);
        self.values.push(s.to_string());
        c
    }
}

pub fn load_csv_reader<R: Read>(reader: R, schema: &SchemaFile) -> Result<TabularDataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| CastError::Load(format!("cannot read header: {e}")))?
        .clone();
    if headers.is_empty() {
        return Err(CastError::Load("empty file".into()));
    }

    // map header positions onto schema features / target
    let mut feature_pos = vec![None; schema.features.len()];
    let mut target_pos = None;
    for (pos, h) in headers.iter().enumerate() {
        if h == schema.target {
            target_pos = Some(pos);
        } else if let Some(i) = schema.features.iter().position(|f| f.name == h) {
            if feature_pos[i].is_some() {
                return Err(CastError::Load(format!("duplicate column '{h}'")));
            }
            feature_pos[i] = Some(pos);
        } else {
            return Err(CastError::Load(format!("unknown column '{h}' not in schema")));
        }
    }
    let target_pos = target_pos.ok_or_else(|| {
        CastError::Load(format!("target column '{}' missing from header", schema.target))
    })?;
    let feature_pos: Vec<usize> = feature_pos
        .into_iter()
        .zip(&schema.features)
        .map(|(p, f)| p.ok_or_else(|| CastError::Load(format!("column '{}' missing from header", f.name))))
        .collect::<Result<_>>()?;

    let m = schema.features.len();
    let mut encoders: Vec<LabelEncoder> = (0..m).map(|_| LabelEncoder::default()).collect();
    let mut target_encoder = LabelEncoder::default();
    let mut cells: Vec<Option<f64>> = Vec::new();
    let mut labels = Vec::new();

    for (line, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| CastError::Load(format!("row {}: {e}", line + 1)))?;
        for (j, f) in schema.features.iter().enumerate() {
            let cell = record.get(feature_pos[j]).unwrap_or("");
            if is_missing(cell) {
                cells.push(None);
                continue;
            }
            let v = match f.kind {
                FeatureKind::Continuous => {
                    let v: f64 = cell.parse().map_err(|_| {
                        CastError::Load(format!(
                            "row {}: non-numeric value '{cell}' in continuous column '{}'",
                            line + 1,
                            f.name
                        ))
                    })?;
                    if !v.is_finite() {
                        return Err(CastError::Load(format!(
                            "row {}: non-finite value in column '{}'",
                            line + 1,
                            f.name
                        )));
                    }
                    v
                }
                FeatureKind::Categorical => encoders[j].encode(cell) as f64,
            };
            cells.push(Some(v));
        }
        let t = record.get(target_pos).unwrap_or("");
        labels.push(if is_missing(t) { None } else { Some(target_encoder.encode(t)) });
    }

    let n = labels.len();
    if n == 0 {
        return Err(CastError::Load("file has a header but no data rows".into()));
    }

    let mut features = Array2::<f64>::zeros((n, m));
    let mut feature_schema = Vec::with_capacity(m);
    for (j, f) in schema.features.iter().enumerate() {
        let column: Vec<Option<f64>> = (0..n).map(|i| cells[i * m + j]).collect();
        let fill = match f.kind {
            FeatureKind::Continuous => column_mean(&column),
            FeatureKind::Categorical => column_mode(&column, encoders[j].values.len()),
        }
        .ok_or_else(|| CastError::Load(format!("column '{}' has no observed values", f.name)))?;
        for (i, v) in column.iter().enumerate() {
            features[[i, j]] = v.unwrap_or(fill);
        }
        feature_schema.push(match f.kind {
            FeatureKind::Continuous => FeatureSchema::continuous(&f.name, j),
            FeatureKind::Categorical => {
                let observed = encoders[j].values.len();
                let card = match f.cardinality {
                    Some(c) if c < observed => {
                        return Err(CastError::Load(format!(
                            "column '{}' has {observed} categories but declares {c}",
                            f.name
                        )))
                    }
                    Some(c) => c,
                    None => observed.max(2),
                };
                FeatureSchema::categorical(&f.name, j, card)
            }
        });
    }

    let n_classes = target_encoder.values.len();
    if n_classes < 2 {
        return Err(CastError::Load(format!(
            "target '{}' has {n_classes} observed classes; need at least 2",
            schema.target
        )));
    }
    let encoding = Encoding {
        categories: encoders.into_iter().map(|e| e.values).collect(),
        classes: target_encoder.values,
    };
    Ok(TabularDataset::new(features, labels, feature_schema, n_classes)?.with_encoding(encoding))
}

fn column_mean(column: &[Option<f64>]) -> Option<f64> {
    let observed: Vec<f64> = column.iter().flatten().copied().collect();
    if observed.is_empty() {
        return None;
    }
    Some(observed.iter().sum::<f64>() / observed.len() as f64)
}

fn column_mode(column: &[Option<f64>], n_codes: usize) -> Option<f64> {
    let mut counts = vec![0usize; n_codes];
    for v in column.iter().flatten() {
        counts[*v as usize] += 1;
    }
    // max_by_key keeps the last maximum; iterate in reverse to prefer the lowest code
    counts
        .iter()
        .enumerate()
        .rev()
        .filter(|(_, &c)| c > 0)
        .max_by_key(|(_, &c)| c)
        .map(|(code, _)| code as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn schema() -> SchemaFile {
        serde_json::from_str(
            r#"{"target":"y","features":[
                {"name":"c","kind":"categorical"},
                {"name":"x","kind":"continuous"}]}"#,
        )
        .unwrap()
    }

    #[test]
    fn first_appearance_encoding() {
        let csv = "c,x,y\na,1.0,yes\nb,2.0,no\na,3.0,yes\n";
        let ds = load_csv_reader(csv.as_bytes(), &schema()).unwrap();
        let codes: Vec<u32> = (0..3).map(|i| ds.code(i, 0)).collect();
        assert_eq!(codes, vec![0, 1, 0]);
        assert_eq!(ds.labels(), &[Some(0), Some(1), Some(0)]);
        assert_eq!(ds.encoding().unwrap().decode_category(0, 1), Some("b"));
    }

    #[test]
    fn mean_imputation() {
        let csv = "c,x,y\na,1.0,p\na,,q\nb,3.0,p\n";
        let ds = load_csv_reader(csv.as_bytes(), &schema()).unwrap();
        let col: Vec<f64> = (0..3).map(|i| ds.value(i, 1)).collect();
        assert_eq!(col, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn mode_imputation_and_missing_markers() {
        let csv = "c,x,y\nb,1,p\na,NA,q\na,2,?\n?,4,p\n";
        let ds = load_csv_reader(csv.as_bytes(), &schema()).unwrap();
        // codes: b=0, a=1; mode is a
        assert_eq!(ds.code(3, 0), 1);
        assert_eq!(ds.value(1, 1), 7.0 / 3.0);
        assert_eq!(ds.label(2), None);
    }

    #[test]
    fn header_mismatch_is_error() {
        let csv = "c,z,y\na,1,p\nb,2,q\n";
        let err = load_csv_reader(csv.as_bytes(), &schema()).unwrap_err();
        assert!(err.to_string().contains("unknown column 'z'"));
    }

    #[test]
    fn non_numeric_continuous_is_error() {
        let csv = "c,x,y\na,abc,p\nb,2,q\n";
        assert!(load_csv_reader(csv.as_bytes(), &schema()).is_err());
    }

    #[test]
    fn empty_file_is_error() {
        assert!(load_csv_reader("".as_bytes(), &schema()).is_err());
        assert!(load_csv_reader("c,x,y\n".as_bytes(), &schema()).is_err());
    }

    #[test]
    fn declared_cardinality_too_small() {
        let s: SchemaFile = serde_json::from_str(
            r#"{"target":"y","features":[{"name":"c","kind":"categorical","cardinality":2},{"name":"x","kind":"continuous"}]}"#,
        )
        .unwrap();
        let csv = "c,x,y\na,1,p\nb,2,q\nc,3,p\n";
        assert!(load_csv_reader(csv.as_bytes(), &s).is_err());
    }
}
