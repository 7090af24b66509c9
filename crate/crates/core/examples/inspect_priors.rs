//! Fit both density priors on one fold, then check how pseudo-label accuracy
//! varies with the prior of the assigned class.

use cast_core::classifier::ClassifierSpec;
use cast_core::data::make_split;
use cast_core::data::synthetic::Bundled;
use cast_core::density::EstimatorKind;
use cast_core::engine::{build_fold_prior, run_self_training, SelfTrainConfig};
use cast_core::evaluation::density_reliability_curve;

fn main() -> cast_core::Result<()> {
    let ds = Bundled::Informative20.generate(1000, 2024)?;
    let split = make_split(&ds, 0.1, 0)?;
    let fold = &split.folds[0];
    let truth: Vec<usize> = ds.labels().iter().map(|l| l.unwrap_or(0)).collect();

    let naive = SelfTrainConfig {
        max_iterations: 1,
        ..SelfTrainConfig::default()
    };
    let out = run_self_training(&ds, &split, 0, &ClassifierSpec::default(), &naive, None)?;
    let Some(pseudo) = out.pseudo_labels.first() else {
        println!("no pseudo-labels admitted");
        return Ok(());
    };

    for estimator in [EstimatorKind::EmpiricalLikelihood, EstimatorKind::Kde] {
        let prior = build_fold_prior(&ds, fold, 0, split.seed, estimator, true, 20)?;
        let names: Vec<&str> = prior
            .selection
            .selected_idx
            .iter()
            .map(|&i| ds.schema()[i].name.as_str())
            .collect();
        println!("{}: selected [{}]", estimator.name(), names.join(", "));
        for b in density_reliability_curve(pseudo, &prior.matrix, &truth, 4)? {
            println!(
                "  quartile {} (prior {:.3}..{:.3}): {}/{} correct = {:.3}",
                b.bucket + 1,
                b.gamma_min,
                b.gamma_max,
                b.correct,
                b.count,
                b.accuracy
            );
        }
    }
    Ok(())
}
