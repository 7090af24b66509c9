//! Dataset schema, ingestion, splitting and feature corruption.

mod corrupt;
mod csv_io;
mod dataset;
mod schema;
mod split;
pub mod synthetic;

pub use corrupt::corrupt_features;
pub use csv_io::{is_missing, load_csv, load_csv_reader, read_schema_file};
pub use dataset::{Encoding, TabularDataset};
pub use schema::{validate_schema, FeatureKind, FeatureSchema, SchemaFile, SchemaFileFeature};
pub use split::{make_split, Fold, SplitPlan, N_FOLDS, TEST_FRACTION};
pub use synthetic::Bundled;
