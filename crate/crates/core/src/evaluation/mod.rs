//! Metrics, density-reliability analysis and the experiment grid.

pub mod grid;
pub mod metrics;
pub mod reliability;

pub use grid::{
    alpha_grid, average_ranks, mean_std, run_grid, run_seed, Arm, CellResult, DatasetSpec, ExperimentGrid, FoldResult,
    GridResult, SeedRun,
};
pub use metrics::{metric, MetricKind};
pub use reliability::{density_reliability_curve, ReliabilityBin};
