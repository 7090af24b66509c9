//! Confidence surfaces over a 2-D blob pair, with and without the density
//! prior applied.

use std::fs;
use std::path::Path;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::classifier::{ClassifierSpec, ProbabilisticClassifier};
use crate::data::synthetic::blobs;
use crate::data::{Fold, SplitPlan};
use crate::density::{DensityModel, EstimatorKind};
use crate::engine::confidence::blend;
use crate::engine::{run_self_training, SelfTrainConfig, Strategy};
use crate::error::{CastError, Result};

const TRAIN_ROWS: usize = 1000;
const LABELED_ROWS: usize = 100;
const HOLDOUT_ROWS: usize = 200;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BlobConfig {
    pub seed: u64,
    pub strategy: Strategy,
    /// Train the surface model with the regularized confidence.
    pub use_cast: bool,
    pub alpha: f64,
    /// Grid points per axis.
    pub resolution: usize,
    /// Grid covers `[-extent, extent]` on both axes.
    pub extent: f64,
    pub max_iterations: usize,
}

impl Default for BlobConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            strategy: Strategy::Fpl,
            use_cast: true,
            alpha: 0.5,
            resolution: 61,
            extent: 6.0,
            max_iterations: 50,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSurface {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    /// Row-major over `(y, x)`: index `iy * xs.len() + ix`.
    pub naive: Vec<f64>,
    pub cast: Vec<f64>,
    pub labeled_points: Vec<(f64, f64, usize)>,
    pub alpha: f64,
}

impl GridSurface {
    pub fn index(&self, ix: usize, iy: usize) -> usize {
        iy * self.xs.len() + ix
    }

    /// Index of the grid cell nearest to `(x, y)`.
    pub fn nearest(&self, x: f64, y: f64) -> usize {
        let near = |v: &[f64], t: f64| {
            (0..v.len())
                .min_by(|&a, &b| (v[a] - t).abs().total_cmp(&(v[b] - t).abs()))
                .unwrap_or(0)
        };
        self.index(near(&self.xs, x), near(&self.ys, y))
    }

    /// Writes `grid.csv` (x, y, naive_score, cast_score) and `labeled.csv`.
    pub fn write_csv(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir)?;
        let mut w = csv::Writer::from_path(dir.join("grid.csv"))?;
        w.write_record(["x", "y", "naive_score", "cast_score"])?;
        for (iy, y) in self.ys.iter().enumerate() {
            for (ix, x) in self.xs.iter().enumerate() {
                let i = self.index(ix, iy);
                w.write_record([x.to_string(), y.to_string(), self.naive[i].to_string(), self.cast[i].to_string()])?;
            }
        }
        w.flush()?;
        let mut w = csv::Writer::from_path(dir.join("labeled.csv"))?;
        w.write_record(["x", "y", "class"])?;
        for (x, y, c) in &self.labeled_points {
            w.write_record([x.to_string(), y.to_string(), c.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Self-train the built-in gbdt on unit-variance blobs (100 of 1000 training
/// rows labeled) and score a regular grid with the final model's raw and
/// regularized maximum confidence.
///
/// The KDE prior is scaled with the minimum and maximum over the unlabeled
/// pool; grid cells outside that range are clamped into `[0, 1]`.
pub fn blob_surface(cfg: &BlobConfig) -> Result<GridSurface> {
    if cfg.resolution < 2 {
        return Err(CastError::InvalidInput("resolution must be at least 2".into()));
    }
    if !(cfg.extent > 0.0) {
        return Err(CastError::InvalidInput("extent must be positive".into()));
    }
    let ds = blobs(TRAIN_ROWS + 2 * HOLDOUT_ROWS, 1.0, cfg.seed)?;
    let split = SplitPlan {
        test_idx: (TRAIN_ROWS + HOLDOUT_ROWS..TRAIN_ROWS + 2 * HOLDOUT_ROWS).collect(),
        folds: vec![Fold {
            train: (0..TRAIN_ROWS).collect(),
            val: (TRAIN_ROWS..TRAIN_ROWS + HOLDOUT_ROWS).collect(),
            labeled: (0..LABELED_ROWS).collect(),
        }],
        labeled_fraction: LABELED_ROWS as f64 / TRAIN_ROWS as f64,
        seed: cfg.seed,
    };
    let st = SelfTrainConfig {
        strategy: cfg.strategy,
        alpha: cfg.alpha,
        use_cast: cfg.use_cast,
        estimator: EstimatorKind::Kde,
        feature_selection: false,
        max_iterations: cfg.max_iterations,
        ..SelfTrainConfig::default()
    };
    let learner = ClassifierSpec {
        seed: cfg.seed,
        ..ClassifierSpec::default()
    };
    let outcome = run_self_training(&ds, &split, 0, &learner, &st, None)?;

    let labeled = ds.subset(&split.folds[0].labeled);
    let density = DensityModel::fit(EstimatorKind::Kde, &labeled, &[0, 1])?;
    let pool = split.folds[0].unlabeled();
    let (lo, hi) = pool_range(&density, &ds.select_rows(&pool));

    let step = 2.0 * cfg.extent / (cfg.resolution - 1) as f64;
    let axis: Vec<f64> = (0..cfg.resolution).map(|i| -cfg.extent + i as f64 * step).collect();
    let mut cells = Array2::zeros((cfg.resolution * cfg.resolution, 2));
    for (iy, y) in axis.iter().enumerate() {
        for (ix, x) in axis.iter().enumerate() {
            let i = iy * cfg.resolution + ix;
            cells[[i, 0]] = *x;
            cells[[i, 1]] = *y;
        }
    }
    let probs = outcome.best_model.predict_proba(cells.view())?;
    let mut naive = Vec::with_capacity(cells.nrows());
    let mut cast = Vec::with_capacity(cells.nrows());
    for (i, p) in probs.rows().into_iter().enumerate() {
        let c = p.to_vec();
        let gamma: Vec<f64> = density
            .gamma(cells.row(i))
            .iter()
            .enumerate()
            .map(|(k, g)| scale(*g, lo[k], hi[k]))
            .collect();
        let c_r = blend(&c, &gamma, cfg.alpha);
        naive.push(c.iter().cloned().fold(f64::NEG_INFINITY, f64::max));
        cast.push(c_r.iter().cloned().fold(f64::NEG_INFINITY, f64::max));
    }
    let labeled_points = split.folds[0]
        .labeled
        .iter()
        .map(|&r| (ds.value(r, 0), ds.value(r, 1), ds.label(r).unwrap_or(0)))
        .collect();
    Ok(GridSurface {
        xs: axis.clone(),
        ys: axis,
        naive,
        cast,
        labeled_points,
        alpha: cfg.alpha,
    })
}

fn pool_range(density: &DensityModel, rows: &Array2<f64>) -> (Vec<f64>, Vec<f64>) {
    let n = density.n_classes();
    let mut lo = vec![f64::INFINITY; n];
    let mut hi = vec![f64::NEG_INFINITY; n];
    for row in rows.rows() {
        let g = density.gamma(row);
        for k in 0..n {
            lo[k] = lo[k].min(g[k]);
            hi[k] = hi[k].max(g[k]);
        }
    }
    (lo, hi)
}

fn scale(g: f64, lo: f64, hi: f64) -> f64 {
    let span = hi - lo;
    if span > 0.0 && span.is_finite() {
        ((g - lo) / span).clamp(0.0, 1.0)
    } else {
        1.0
    }
}
