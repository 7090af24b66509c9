use serde::{Deserialize, Serialize};

use crate::error::{CastError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureKind {
    Categorical,
    Continuous,
}

/// One column of a dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSchema {
    pub name: String,
    pub kind: FeatureKind,
    /// Number of categories; `None` for continuous features.
    pub cardinality: Option<usize>,
    pub index: usize,
}

impl FeatureSchema {
    pub fn continuous(name: impl Into<String>, index: usize) -> Self {
        Self {
            name: name.into(),
            kind: FeatureKind::Continuous,
            cardinality: None,
            index,
        }
    }

    pub fn categorical(name: impl Into<String>, index: usize, cardinality: usize) -> Self {
        Self {
            name: name.into(),
            kind: FeatureKind::Categorical,
            cardinality: Some(cardinality),
            index,
        }
    }

    pub fn is_categorical(&self) -> bool {
        self.kind == FeatureKind::Categorical
    }
}

/// Check that a schema list is well formed: indices are a permutation of
/// `0..m`, names are unique and categorical cardinalities are at least 2.
pub fn validate_schema(schema: &[FeatureSchema]) -> Result<()> {
    let m = schema.len();
    let mut seen = vec![false; m];
    for f in schema {
        if f.index >= m || seen[f.index] {
            return Err(CastError::Schema(format!(
                "feature '{}' has invalid or duplicate index {}",
                f.name, f.index
            )));
        }
        seen[f.index] = true;
        match (f.kind, f.cardinality) {
            (FeatureKind::Categorical, Some(c)) if c >= 2 => {}
            (FeatureKind::Categorical, c) => {
                return Err(CastError::Schema(format!(
                    "categorical feature '{}' needs cardinality >= 2, got {:?}",
                    f.name, c
                )))
            }
            (FeatureKind::Continuous, None) => {}
            (FeatureKind::Continuous, Some(_)) => {
                return Err(CastError::Schema(format!(
                    "continuous feature '{}' must not declare a cardinality",
                    f.name
                )))
            }
        }
    }
    let mut names: Vec<&str> = schema.iter().map(|f| f.name.as_str()).collect();
    names.sort_unstable();
    if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
        return Err(CastError::Schema(format!("duplicate feature name '{}'", w[0])));
    }
    Ok(())
}

/// Schema file layout: `{target, features: [{name, kind, cardinality?}]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemaFile {
    pub target: String,
    pub features: Vec<SchemaFileFeature>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemaFileFeature {
    pub name: String,
    pub kind: FeatureKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cardinality: Option<usize>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicate_index() {
        let s = vec![
            FeatureSchema::continuous("a", 0),
            FeatureSchema::continuous("b", 0),
        ];
        assert!(validate_schema(&s).is_err());
    }

    #[test]
    fn rejects_unary_categorical() {
        let s = vec![FeatureSchema::categorical("a", 0, 1)];
        assert!(validate_schema(&s).is_err());
    }

    #[test]
    fn parses_schema_file() {
        let text = r#"{"target":"y","features":[{"name":"a","kind":"categorical","cardinality":3},{"name":"b","kind":"continuous"}]}"#;
        let f: SchemaFile = serde_json::from_str(text).unwrap();
        assert_eq!(f.features[0].cardinality, Some(3));
        assert_eq!(f.features[1].kind, FeatureKind::Continuous);
    }
}
