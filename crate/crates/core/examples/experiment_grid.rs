//! A reduced experiment grid: three blob noise levels, baseline against the
//! empirical-likelihood prior, five seeds. Tables land in the directory given
//! as the first argument (default: a temp dir).

use std::path::PathBuf;

use cast_core::data::synthetic::Bundled;
use cast_core::evaluation::{run_grid, Arm, DatasetSpec, ExperimentGrid};
use cast_core::engine::Strategy;

fn main() -> cast_core::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("cast-grid"));
    let grid = ExperimentGrid {
        datasets: Bundled::NOISE_SUITE.into_iter().map(DatasetSpec::bundled).collect(),
        strategies: vec![Strategy::Fpl],
        arms: vec![Arm::Baseline, Arm::Ts, Arm::CastEl],
        seeds: (0..5).collect(),
        ..ExperimentGrid::default()
    };
    let res = run_grid(&grid)?;
    for (i, c) in res.cells.iter().enumerate() {
        println!(
            "{:<11} {:<9} {:.4} +- {:.4}  rank {:.1}  vs baseline {:+.2}%",
            c.dataset,
            c.arm.name(),
            c.mean,
            c.std,
            res.ranks[i].unwrap_or(f64::NAN),
            100.0 * res.relative_improvement[i].unwrap_or(f64::NAN)
        );
    }
    for (arm, r) in &res.mean_rank {
        println!("mean rank {:<9} {r:.2}", arm.name());
    }
    res.write(&out)?;
    println!("tables written to {}", out.display());
    Ok(())
}
