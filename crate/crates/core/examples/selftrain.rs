//! Self-train on the noisiest blob benchmark with raw and prior-regularized
//! confidence and compare the iteration traces.

use cast_core::classifier::ClassifierSpec;
use cast_core::data::make_split;
use cast_core::data::synthetic::Bundled;
use cast_core::engine::{run_self_training, SelfTrainConfig, Strategy};

fn main() -> cast_core::Result<()> {
    let ds = Bundled::BlobsHigh.generate(1000, 2024)?;
    let split = make_split(&ds, 0.1, 0)?;
    let learner = ClassifierSpec::default();

    for use_cast in [false, true] {
        let cfg = SelfTrainConfig {
            strategy: Strategy::Fpl,
            use_cast,
            alpha: 0.4,
            ..SelfTrainConfig::default()
        };
        let out = run_self_training(&ds, &split, 0, &learner, &cfg, None)?;
        let r = &out.report;
        println!("use_cast = {use_cast}");
        for it in &r.iterations {
            println!(
                "  iter {:>2}  admitted {:>4}  validation {:.4}",
                it.iteration, it.n_pseudo, it.validation
            );
        }
        println!(
            "  best iteration {} -> test accuracy {:.4} (supervised {:.4}), stop: {:?}\n",
            r.best_iteration, r.test_scores_of_best.accuracy, r.test_scores_supervised.accuracy, r.termination
        );
    }
    Ok(())
}
