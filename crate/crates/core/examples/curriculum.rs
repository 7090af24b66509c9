//! Curriculum pseudo-labeling: the admitted share grows by a fifth of the
//! unlabeled pool per round until the whole pool is used.

use cast_core::classifier::ClassifierSpec;
use cast_core::data::make_split;
use cast_core::data::synthetic::Bundled;
use cast_core::engine::{run_self_training, SelfTrainConfig, Strategy};

fn main() -> cast_core::Result<()> {
    let ds = Bundled::Rings.generate(1000, 2024)?;
    let split = make_split(&ds, 0.1, 1)?;
    let unlabeled = split.folds[0].unlabeled().len();
    let cfg = SelfTrainConfig {
        strategy: Strategy::Cpl,
        use_cast: true,
        ..SelfTrainConfig::default()
    };
    let out = run_self_training(&ds, &split, 0, &ClassifierSpec::default(), &cfg, None)?;
    println!("unlabeled pool: {unlabeled} rows");
    for it in out.report.iterations.iter().skip(1) {
        println!(
            "round {}: threshold {:.4}, admitted {} {:?}, validation {:.4}",
            it.iteration,
            it.threshold.unwrap_or(f64::NAN),
            it.n_pseudo,
            it.class_histogram,
            it.validation
        );
    }
    println!("stop: {:?}", out.report.termination);
    Ok(())
}
