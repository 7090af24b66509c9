//! Relative improvement of the prior-regularized arm over the baseline as the
//! labeled share grows, with and without feature corruption.

use cast_core::data::synthetic::Bundled;
use cast_core::engine::Strategy;
use cast_core::evaluation::{run_grid, Arm, DatasetSpec, ExperimentGrid};

fn main() -> cast_core::Result<()> {
    for corruption in [None, Some(0.5)] {
        let grid = ExperimentGrid {
            datasets: vec![DatasetSpec::bundled(Bundled::BlobsMid)],
            strategies: vec![Strategy::Fpl],
            labeled_fractions: vec![0.05, 0.1, 0.2, 0.4],
            seeds: (0..3).collect(),
            corruption,
            ..ExperimentGrid::default()
        };
        let res = run_grid(&grid)?;
        println!("corruption {corruption:?}");
        for (i, c) in res.cells.iter().enumerate() {
            if c.arm == Arm::CastEl {
                println!(
                    "  labeled {:>4.2}: {:.4}  ({:+.2}% vs baseline)",
                    c.labeled_fraction,
                    c.mean,
                    100.0 * res.relative_improvement[i].unwrap_or(f64::NAN)
                );
            }
        }
    }
    Ok(())
}
