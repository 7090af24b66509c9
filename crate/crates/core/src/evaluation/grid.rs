//! Experiment matrix: datasets x labeled fractions x strategies x arms x
//! seeds, each cell cross-validated with a per-fold alpha search for the
//! prior-regularized arms.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::MetricKind;
use crate::classifier::{ClassifierKind, ClassifierSpec};
use crate::data::synthetic::{Bundled, DEFAULT_DATA_SEED, DEFAULT_ROWS};
use crate::data::{corrupt_features, load_csv, make_split, SplitPlan, TabularDataset};
use crate::density::EstimatorKind;
use crate::engine::{build_fold_prior, run_self_training, CalibrationArm, SelfTrainConfig, Strategy};
use crate::error::{CastError, Result};
use crate::rng::{derive_seed, TAG_CORRUPT};

pub const ALPHA_STEPS: usize = 8;
pub const ALPHA_MIN: f64 = 0.2;
pub const ALPHA_MAX: f64 = 0.75;

/// Eight evenly spaced values from 0.2 to 0.75 inclusive.
pub fn alpha_grid() -> Vec<f64> {
    (0..ALPHA_STEPS)
        .map(|i| ALPHA_MIN + (ALPHA_MAX - ALPHA_MIN) * i as f64 / (ALPHA_STEPS - 1) as f64)
        .collect()
}

/// Rayon pool sized by `CAST_THREADS` (unset or 0 means one per core).
pub fn worker_pool() -> Result<rayon::ThreadPool> {
    let threads = match std::env::var("CAST_THREADS") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map_err(|_| CastError::Config(format!("CAST_THREADS must be a non-negative integer, got '{v}'")))?,
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CastError::Config(e.to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Arm {
    /// Raw classifier confidence.
    Baseline,
    /// Temperature-scaled confidence.
    Ts,
    /// Histogram-binned confidence.
    Hb,
    CastKde,
    CastEl,
}

impl Arm {
    pub const ALL: [Arm; 5] = [Arm::Baseline, Arm::Ts, Arm::Hb, Arm::CastKde, Arm::CastEl];

    pub fn name(self) -> &'static str {
        match self {
            Arm::Baseline => "baseline",
            Arm::Ts => "ts",
            Arm::Hb => "hb",
            Arm::CastKde => "cast_kde",
            Arm::CastEl => "cast_el",
        }
    }

    pub fn estimator(self) -> Option<EstimatorKind> {
        match self {
            Arm::CastKde => Some(EstimatorKind::Kde),
            Arm::CastEl => Some(EstimatorKind::EmpiricalLikelihood),
            _ => None,
        }
    }

    /// Engine settings for this arm on top of `base`.
    pub fn configure(self, base: &SelfTrainConfig, strategy: Strategy) -> SelfTrainConfig {
        let mut cfg = base.clone();
        cfg.strategy = strategy;
        cfg.use_cast = self.estimator().is_some();
        if let Some(e) = self.estimator() {
            cfg.estimator = e;
        }
        cfg.calibration = match self {
            Arm::Ts => CalibrationArm::Temperature,
            Arm::Hb => CalibrationArm::Histogram,
            _ => CalibrationArm::None,
        };
        cfg
    }
}

/// A bundled generator by name, or a CSV file with its schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSpec {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rows: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data_seed: Option<u64>,
}

impl DatasetSpec {
    pub fn bundled(b: Bundled) -> Self {
        Self {
            name: b.name().to_string(),
            csv: None,
            schema: None,
            rows: None,
            data_seed: None,
        }
    }

    pub fn load(&self) -> Result<TabularDataset> {
        match (&self.csv, &self.schema) {
            (Some(csv), Some(schema)) => load_csv(csv, schema),
            (None, None) => Bundled::from_name(&self.name)?.generate(
                self.rows.unwrap_or(DEFAULT_ROWS),
                self.data_seed.unwrap_or(DEFAULT_DATA_SEED),
            ),
            _ => Err(CastError::Config(format!(
                "dataset '{}': csv and schema must be given together",
                self.name
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentGrid {
    pub datasets: Vec<DatasetSpec>,
    pub strategies: Vec<Strategy>,
    pub arms: Vec<Arm>,
    pub alphas: Vec<f64>,
    pub labeled_fractions: Vec<f64>,
    pub seeds: Vec<u64>,
    /// Fraction of features replaced in every fold-training row.
    pub corruption: Option<f64>,
    pub classifier: ClassifierSpec,
    /// Shared engine settings; strategy, alpha, prior and calibration are set
    /// per cell.
    pub engine: SelfTrainConfig,
}

impl Default for ExperimentGrid {
    fn default() -> Self {
        Self {
            datasets: Bundled::NOISE_SUITE.into_iter().map(DatasetSpec::bundled).collect(),
            strategies: vec![Strategy::Fpl, Strategy::Cpl],
            arms: vec![Arm::Baseline, Arm::CastEl],
            alphas: alpha_grid(),
            labeled_fractions: vec![0.1],
            seeds: (0..10).collect(),
            corruption: None,
            classifier: ClassifierSpec::default(),
            engine: SelfTrainConfig::default(),
        }
    }
}

impl ExperimentGrid {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(CastError::Config(m.to_string()));
        if self.datasets.is_empty() {
            return bad("grid needs at least one dataset");
        }
        if self.strategies.is_empty() || self.arms.is_empty() {
            return bad("grid needs at least one strategy and one arm");
        }
        if self.seeds.is_empty() {
            return bad("grid needs at least one seed");
        }
        if self.alphas.is_empty() || self.alphas.iter().any(|a| !(0.0..=1.0).contains(a)) {
            return bad("alphas must be a non-empty list of values in [0, 1]");
        }
        if self.labeled_fractions.is_empty() || self.labeled_fractions.iter().any(|f| !(*f > 0.0 && *f <= 1.0)) {
            return bad("labeled_fractions must be a non-empty list of values in (0, 1]");
        }
        if let Some(r) = self.corruption {
            if !(r > 0.0 && r <= 1.0) {
                return bad("corruption ratio must be in (0, 1]");
            }
        }
        self.classifier.validate()?;
        self.engine.validate()
    }

    pub fn metric(&self) -> MetricKind {
        self.engine.metric
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub fold: usize,
    /// Winning alpha for prior-regularized arms.
    pub alpha: Option<f64>,
    pub validation: f64,
    pub test: f64,
    pub best_iteration: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedRun {
    pub seed: u64,
    /// Mean test metric over folds; `None` when the run failed.
    pub test: Option<f64>,
    pub folds: Vec<FoldResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub wall_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub dataset: String,
    pub model: String,
    pub strategy: Strategy,
    pub arm: Arm,
    pub labeled_fraction: f64,
    pub metric: MetricKind,
    pub runs: Vec<SeedRun>,
    /// Over successful seeds; NaN when none succeeded.
    pub mean: f64,
    pub std: f64,
    pub n_ok: usize,
    pub wall_ms: f64,
}

impl CellResult {
    pub fn id(&self) -> String {
        format!(
            "{}_{}_{}_{}_lf{}",
            self.dataset,
            self.model,
            self.strategy.name(),
            self.arm.name(),
            self.labeled_fraction
        )
    }

    /// Key shared by the arms that compete in one ranking row.
    fn row_key(&self) -> (String, String, Strategy, u64) {
        (
            self.dataset.clone(),
            self.model.clone(),
            self.strategy,
            self.labeled_fraction.to_bits(),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridResult {
    pub grid: ExperimentGrid,
    pub cells: Vec<CellResult>,
    /// Rank of each cell within its (dataset, model, strategy, fraction) row;
    /// 1 is best, ties averaged. Same order as `cells`.
    pub ranks: Vec<Option<f64>>,
    /// Relative change of the cell mean against the baseline arm of its row.
    pub relative_improvement: Vec<Option<f64>>,
    pub mean_rank: BTreeMap<Arm, f64>,
    /// Winning alpha counts over every fold of every prior-regularized run.
    pub alpha_histogram: Vec<(f64, usize)>,
    pub wall_ms_per_arm: BTreeMap<Arm, f64>,
    pub wall_ms: f64,
}

/// Ranks with ties averaged; higher value ranks first.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let std = if values.len() > 1 {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    (mean, std)
}

struct Job {
    dataset: usize,
    fraction: f64,
    strategy: Strategy,
    arm: Arm,
    seed: u64,
}

/// One seed of one cell: all folds, alpha search included.
pub fn run_seed(
    ds: &TabularDataset,
    grid: &ExperimentGrid,
    fraction: f64,
    strategy: Strategy,
    arm: Arm,
    seed: u64,
) -> Result<Vec<FoldResult>> {
    let split = make_split(ds, fraction, seed)?;
    let cfg = arm.configure(&grid.engine, strategy);
    let mut folds = Vec::with_capacity(split.folds.len());
    for f in 0..split.folds.len() {
        let corrupted;
        let fold_ds = match grid.corruption {
            Some(ratio) => {
                let train = &split.folds[f].train;
                corrupted = corrupt_features(ds, train, train, ratio, derive_seed(seed, &[TAG_CORRUPT, f as u64]))?;
                &corrupted
            }
            None => ds,
        };
        folds.push(run_fold(fold_ds, &split, f, grid, &cfg)?);
    }
    Ok(folds)
}

fn run_fold(
    ds: &TabularDataset,
    split: &SplitPlan,
    fold: usize,
    grid: &ExperimentGrid,
    cfg: &SelfTrainConfig,
) -> Result<FoldResult> {
    if !cfg.use_cast {
        let out = run_self_training(ds, split, fold, &grid.classifier, cfg, None)?;
        return Ok(FoldResult {
            fold,
            alpha: None,
            validation: out.report.best_validation,
            test: out.report.test_metric_of_best,
            best_iteration: out.report.best_iteration,
        });
    }
    let prior = build_fold_prior(
        ds,
        &split.folds[fold],
        fold,
        split.seed,
        cfg.estimator,
        cfg.feature_selection,
        cfg.selection_repeats,
    )?;
    let mut best: Option<FoldResult> = None;
    for &alpha in &grid.alphas {
        let mut c = cfg.clone();
        c.alpha = alpha;
        let out = run_self_training(ds, split, fold, &grid.classifier, &c, Some(&prior))?;
        let cand = FoldResult {
            fold,
            alpha: Some(alpha),
            validation: out.report.best_validation,
            test: out.report.test_metric_of_best,
            best_iteration: out.report.best_iteration,
        };
        let better = match &best {
            None => true,
            Some(b) => {
                cand.validation > b.validation
                    || (cand.validation == b.validation && alpha < b.alpha.unwrap_or(f64::INFINITY))
            }
        };
        if better {
            best = Some(cand);
        }
    }
    Ok(best.expect("alpha grid is non-empty"))
}

fn model_name(spec: &ClassifierSpec) -> &'static str {
    match spec.kind {
        ClassifierKind::Gbdt => "gbdt",
        ClassifierKind::Logistic => "logistic",
    }
}

pub fn run_grid(grid: &ExperimentGrid) -> Result<GridResult> {
    grid.validate()?;
    let start = Instant::now();
    let datasets: Vec<TabularDataset> = grid.datasets.iter().map(DatasetSpec::load).collect::<Result<_>>()?;

    let mut jobs = Vec::new();
    for d in 0..datasets.len() {
        for &fraction in &grid.labeled_fractions {
            for &strategy in &grid.strategies {
                for &arm in &grid.arms {
                    for &seed in &grid.seeds {
                        jobs.push(Job {
                            dataset: d,
                            fraction,
                            strategy,
                            arm,
                            seed,
                        });
                    }
                }
            }
        }
    }

    let pool = worker_pool()?;
    let runs: Vec<SeedRun> = pool.install(|| {
        jobs.par_iter()
            .map(|job| {
                let t = Instant::now();
                let res = run_seed(&datasets[job.dataset], grid, job.fraction, job.strategy, job.arm, job.seed);
                let wall_ms = t.elapsed().as_secs_f64() * 1e3;
                match res {
                    Ok(folds) => SeedRun {
                        seed: job.seed,
                        test: Some(folds.iter().map(|f| f.test).sum::<f64>() / folds.len() as f64),
                        folds,
                        error: None,
                        wall_ms,
                    },
                    Err(e) => {
                        log::warn!(
                            "{} / {} / {} / seed {}: {e}",
                            grid.datasets[job.dataset].name,
                            job.strategy.name(),
                            job.arm.name(),
                            job.seed
                        );
                        SeedRun {
                            seed: job.seed,
                            test: None,
                            folds: Vec::new(),
                            error: Some(e.to_string()),
                            wall_ms,
                        }
                    }
                }
            })
            .collect()
    });

    let n_seeds = grid.seeds.len();
    let cells: Vec<CellResult> = jobs
        .chunks(n_seeds)
        .zip(runs.chunks(n_seeds))
        .map(|(js, rs)| {
            let ok: Vec<f64> = rs.iter().filter_map(|r| r.test).collect();
            let (mean, std) = mean_std(&ok);
            CellResult {
                dataset: grid.datasets[js[0].dataset].name.clone(),
                model: model_name(&grid.classifier).to_string(),
                strategy: js[0].strategy,
                arm: js[0].arm,
                labeled_fraction: js[0].fraction,
                metric: grid.metric(),
                runs: rs.to_vec(),
                mean,
                std,
                n_ok: ok.len(),
                wall_ms: rs.iter().map(|r| r.wall_ms).sum(),
            }
        })
        .collect();
    Ok(aggregate(grid.clone(), cells, start.elapsed().as_secs_f64() * 1e3))
}

fn aggregate(grid: ExperimentGrid, cells: Vec<CellResult>, wall_ms: f64) -> GridResult {
    let mut rows: BTreeMap<(String, String, Strategy, u64), Vec<usize>> = BTreeMap::new();
    for (i, c) in cells.iter().enumerate() {
        rows.entry(c.row_key()).or_default().push(i);
    }
    let mut ranks = vec![None; cells.len()];
    let mut relative_improvement = vec![None; cells.len()];
    let mut rank_sums: BTreeMap<Arm, (f64, usize)> = BTreeMap::new();
    for members in rows.values() {
        let scored: Vec<usize> = members.iter().copied().filter(|&i| !cells[i].mean.is_nan()).collect();
        let r = average_ranks(&scored.iter().map(|&i| cells[i].mean).collect::<Vec<_>>());
        for (&i, rank) in scored.iter().zip(r) {
            ranks[i] = Some(rank);
            let e = rank_sums.entry(cells[i].arm).or_default();
            e.0 += rank;
            e.1 += 1;
        }
        let base = members
            .iter()
            .find(|&&i| cells[i].arm == Arm::Baseline)
            .map(|&i| cells[i].mean)
            .filter(|m| !m.is_nan() && *m != 0.0);
        if let Some(b) = base {
            for &i in &scored {
                relative_improvement[i] = Some((cells[i].mean - b) / b);
            }
        }
    }
    let mean_rank = rank_sums.into_iter().map(|(a, (s, n))| (a, s / n as f64)).collect();

    let mut alpha_histogram: Vec<(f64, usize)> = grid.alphas.iter().map(|&a| (a, 0)).collect();
    for c in &cells {
        for run in &c.runs {
            for f in &run.folds {
                if let Some(a) = f.alpha {
                    if let Some(slot) = alpha_histogram.iter_mut().find(|(v, _)| *v == a) {
                        slot.1 += 1;
                    }
                }
            }
        }
    }
    let mut wall_ms_per_arm = BTreeMap::new();
    for c in &cells {
        *wall_ms_per_arm.entry(c.arm).or_insert(0.0) += c.wall_ms;
    }
    GridResult {
        grid,
        cells,
        ranks,
        relative_improvement,
        mean_rank,
        alpha_histogram,
        wall_ms_per_arm,
        wall_ms,
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

impl GridResult {
    /// Fraction of alpha winners at or below `limit`.
    pub fn alpha_share_at_most(&self, limit: f64) -> Option<f64> {
        let total: usize = self.alpha_histogram.iter().map(|h| h.1).sum();
        (total > 0).then(|| {
            self.alpha_histogram
                .iter()
                .filter(|h| h.0 <= limit + 1e-12)
                .map(|h| h.1)
                .sum::<usize>() as f64
                / total as f64
        })
    }

    pub fn cell(&self, dataset: &str, strategy: Strategy, arm: Arm) -> Option<&CellResult> {
        self.cells
            .iter()
            .find(|c| c.dataset == dataset && c.strategy == strategy && c.arm == arm)
    }

    /// Per-cell JSON under `cells/` plus the aggregated CSV tables.
    pub fn write(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        let cell_dir = dir.join("cells");
        std::fs::create_dir_all(&cell_dir)?;
        for c in &self.cells {
            std::fs::write(cell_dir.join(format!("{}.json", c.id())), serde_json::to_string_pretty(c)?)?;
        }

        let mut w = csv::Writer::from_path(dir.join("results.csv"))?;
        w.write_record([
            "dataset",
            "model",
            "strategy",
            "arm",
            "labeled_fraction",
            "metric",
            "mean",
            "std",
            "rank",
            "relative_improvement",
            "n_runs",
            "wall_ms",
        ])?;
        for (i, c) in self.cells.iter().enumerate() {
            w.write_record([
                c.dataset.clone(),
                c.model.clone(),
                c.strategy.name().to_string(),
                c.arm.name().to_string(),
                c.labeled_fraction.to_string(),
                c.metric.name().to_string(),
                c.mean.to_string(),
                c.std.to_string(),
                fmt_opt(self.ranks[i]),
                fmt_opt(self.relative_improvement[i]),
                c.n_ok.to_string(),
                format!("{:.1}", c.wall_ms),
            ])?;
        }
        w.flush()?;

        let mut w = csv::Writer::from_path(dir.join("mean_ranks.csv"))?;
        w.write_record(["arm", "mean_rank", "wall_ms"])?;
        for (arm, r) in &self.mean_rank {
            w.write_record([
                arm.name().to_string(),
                r.to_string(),
                format!("{:.1}", self.wall_ms_per_arm.get(arm).copied().unwrap_or(0.0)),
            ])?;
        }
        w.flush()?;

        let mut w = csv::Writer::from_path(dir.join("alpha_histogram.csv"))?;
        w.write_record(["alpha", "count"])?;
        for (a, n) in &self.alpha_histogram {
            w.write_record([a.to_string(), n.to_string()])?;
        }
        w.flush()?;

        // plot-ready: one line per (dataset, strategy, arm) across fractions
        let mut w = csv::Writer::from_path(dir.join("relative_improvement.csv"))?;
        w.write_record(["dataset", "strategy", "arm", "labeled_fraction", "relative_improvement"])?;
        for (i, c) in self.cells.iter().enumerate() {
            if let Some(r) = self.relative_improvement[i] {
                w.write_record([
                    c.dataset.clone(),
                    c.strategy.name().to_string(),
                    c.arm.name().to_string(),
                    c.labeled_fraction.to_string(),
                    r.to_string(),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_grid_endpoints() {
        let g = alpha_grid();
        assert_eq!(g.len(), 8);
        assert_eq!(g[0], 0.2);
        assert!((g[7] - 0.75).abs() < 1e-15);
        for w in g.windows(2) {
            assert!((w[1] - w[0] - 0.55 / 7.0).abs() < 1e-12);
        }
    }

    #[test]
    fn ranks_average_ties() {
        assert_eq!(average_ranks(&[0.9, 0.8, 0.9, 0.7]), vec![1.5, 3.0, 1.5, 4.0]);
        assert_eq!(average_ranks(&[0.5, 0.5, 0.5]), vec![2.0, 2.0, 2.0]);
    }
}
