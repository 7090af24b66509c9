//! Load a CSV with a JSON schema (mixed feature kinds, missing cells,
//! unlabeled rows) and self-train on it.

use std::fmt::Write as _;

use cast_core::classifier::ClassifierSpec;
use cast_core::data::{load_csv, make_split};
use cast_core::engine::{run_self_training, SelfTrainConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> cast_core::Result<()> {
    let dir = std::env::temp_dir().join("cast-csv-example");
    std::fs::create_dir_all(&dir)?;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut csv = String::from("width,height,colour,label\n");
    for i in 0..600 {
        let good = i % 2 == 0;
        let width: f64 = rng.random_range(0.0..1.0) + if good { 1.0 } else { 0.0 };
        let height: f64 = rng.random_range(0.0..2.0);
        let colour = if rng.random_bool(if good { 0.7 } else { 0.3 }) { "red" } else { "blue" };
        let width = if rng.random_bool(0.02) { "NA".to_string() } else { format!("{width:.4}") };
        let label = if good { "good" } else { "bad" };
        writeln!(csv, "{width},{height:.4},{colour},{label}").unwrap();
    }
    std::fs::write(dir.join("data.csv"), csv)?;
    std::fs::write(
        dir.join("schema.json"),
        r#"{"target": "label", "features": [
            {"name": "width", "kind": "continuous"},
            {"name": "height", "kind": "continuous"},
            {"name": "colour", "kind": "categorical", "cardinality": 2}]}"#,
    )?;

    let ds = load_csv(dir.join("data.csv"), dir.join("schema.json"))?;
    println!("{} rows, {} features, {} classes", ds.n_rows(), ds.n_features(), ds.n_classes());
    let split = make_split(&ds, 0.1, 0)?;
    let cfg = SelfTrainConfig {
        use_cast: true,
        ..SelfTrainConfig::default()
    };
    let out = run_self_training(&ds, &split, 0, &ClassifierSpec::default(), &cfg, None)?;
    println!(
        "test accuracy {:.4} (supervised {:.4}) after {} rounds",
        out.report.test_scores_of_best.accuracy,
        out.report.test_scores_supervised.accuracy,
        out.report.iterations.len() - 1
    );
    Ok(())
}
