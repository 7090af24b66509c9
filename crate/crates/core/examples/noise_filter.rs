//! Naive self-training (every unlabeled row admitted) with and without the
//! Mahalanobis filter on a corrupted copy of the blob benchmark.

use cast_core::classifier::ClassifierSpec;
use cast_core::data::synthetic::Bundled;
use cast_core::data::{corrupt_features, make_split};
use cast_core::engine::{run_self_training, FilterOutcome, NoiseFilter, SelfTrainConfig, Strategy};

fn main() -> cast_core::Result<()> {
    let clean = Bundled::BlobsMid.generate(1000, 2024)?;
    let split = make_split(&clean, 0.1, 0)?;
    let train = &split.folds[0].train;
    let ds = corrupt_features(&clean, train, train, 0.5, 11)?;

    for filter in [NoiseFilter::None, NoiseFilter::Mahalanobis] {
        let cfg = SelfTrainConfig {
            strategy: Strategy::Naive,
            noise_filter: filter,
            ..SelfTrainConfig::default()
        };
        let out = run_self_training(&ds, &split, 0, &ClassifierSpec::default(), &cfg, None)?;
        println!("{filter:?}: test accuracy {:.4}", out.report.test_scores_of_best.accuracy);
        for it in out.report.iterations.iter().skip(1) {
            match &it.filter {
                Some(FilterOutcome::Applied { removed }) => {
                    println!("  iter {}: kept {}, removed {removed}", it.iteration, it.n_pseudo)
                }
                Some(FilterOutcome::Disabled { reason }) => println!("  iter {}: filter off ({reason})", it.iteration),
                None => println!("  iter {}: admitted {}", it.iteration, it.n_pseudo),
            }
        }
    }
    Ok(())
}
