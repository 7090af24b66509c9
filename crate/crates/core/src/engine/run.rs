//! The self-training loop for one cross-validation fold.

use std::path::Path;
use std::time::Instant;

use ndarray::{Array2, ArrayView2};
use serde::{Deserialize, Serialize};

use super::config::{CalibrationArm, NoiseFilter, SelfTrainConfig, Strategy};
use super::confidence::blend;
use super::filter::{mahalanobis_filter, FilterOutcome};
use super::pseudo::{curriculum_fraction, curriculum_threshold, PseudoLabel, PseudoLabelSet};
use crate::calibration::{fit_histogram_from_probs, fit_temperature, CalibrationMap};
use crate::classifier::gbdt::GbdtParams;
use crate::classifier::{argmax, Learner, ProbabilisticClassifier};
use crate::data::{Fold, SplitPlan, TabularDataset};
use crate::density::{build_prior_matrix, DensityModel, EstimatorKind, PriorMatrix};
use crate::error::{CastError, Result};
use crate::evaluation::{metric, MetricKind};
use crate::rng::{derive_seed, TAG_SELECTION};
use crate::selection::{select_features, SelectionResult};

/// Everything cached before the loop starts: the selected features, the
/// fitted estimator and its prior matrix over the fold's unlabeled pool.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldPrior {
    pub selection: SelectionResult,
    pub density: DensityModel,
    pub matrix: PriorMatrix,
}

/// Select features, fit the density estimator on the fold's labeled rows and
/// evaluate it over the fold's unlabeled rows.
pub fn build_fold_prior(
    ds: &TabularDataset,
    fold: &Fold,
    fold_index: usize,
    seed: u64,
    estimator: EstimatorKind,
    feature_selection: bool,
    selection_repeats: usize,
) -> Result<FoldPrior> {
    let labeled = ds.subset(&fold.labeled);
    let selection = if feature_selection {
        let sel_seed = derive_seed(seed, &[TAG_SELECTION, fold_index as u64]);
        select_features(&labeled, selection_repeats, sel_seed, &GbdtParams::default())?
    } else {
        SelectionResult::all(ds.n_features())
    };
    let density = DensityModel::fit(estimator, &labeled, &selection.selected_idx)?;
    let matrix = build_prior_matrix(&density, ds, &fold.unlabeled())?;
    Ok(FoldPrior {
        selection,
        density,
        matrix,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// `max_iterations` is zero: only the supervised model was trained.
    SupervisedOnly,
    /// Validation metric fell below the previous iteration's.
    ValidationDecrease,
    /// The curriculum reached 100% of the pool.
    ScheduleComplete,
    /// The admitted set equals the one the current model was trained on, so
    /// every further round would repeat it.
    FixedPoint,
    /// Pseudo-labeled training set held a single class.
    DegenerateLabels,
    MaxIterations,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricScores {
    pub f1: f64,
    pub accuracy: f64,
    pub balanced_accuracy: f64,
}

impl MetricScores {
    pub fn compute(pred: &[usize], truth: &[usize]) -> Result<Self> {
        Ok(Self {
            f1: metric(pred, truth, MetricKind::F1)?,
            accuracy: metric(pred, truth, MetricKind::Accuracy)?,
            balanced_accuracy: metric(pred, truth, MetricKind::BalancedAccuracy)?,
        })
    }

    pub fn get(&self, kind: MetricKind) -> f64 {
        match kind {
            MetricKind::F1 => self.f1,
            MetricKind::Accuracy => self.accuracy,
            MetricKind::BalancedAccuracy => self.balanced_accuracy,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    /// Admission threshold on the operative score (`None` for iteration 0).
    pub threshold: Option<f64>,
    pub n_pseudo: usize,
    pub class_histogram: Vec<usize>,
    pub validation: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub filter: Option<FilterOutcome>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub calibration: Option<CalibrationMap>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RunTimings {
    pub prior_ms: f64,
    /// Wall time per iteration record, same order as `iterations`.
    pub iteration_ms: Vec<f64>,
    pub total_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub fold: usize,
    pub seed: u64,
    pub config: SelfTrainConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub selected_features: Option<Vec<usize>>,
    pub iterations: Vec<IterationRecord>,
    pub best_iteration: usize,
    pub best_validation: f64,
    pub test_metric_of_best: f64,
    pub test_scores_of_best: MetricScores,
    pub test_scores_supervised: MetricScores,
    pub termination: Termination,
    /// Set when the loop ended on a degenerate pseudo-labeled set.
    pub flagged: bool,
    pub timings: RunTimings,
}

impl RunReport {
    /// Copy with every timing field zeroed, for reproducibility checks.
    pub fn without_timings(&self) -> RunReport {
        let mut r = self.clone();
        r.timings = RunTimings {
            prior_ms: 0.0,
            iteration_ms: vec![0.0; r.timings.iteration_ms.len()],
            total_ms: 0.0,
        };
        r
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }
}

pub struct SelfTrainOutcome<M> {
    pub report: RunReport,
    pub best_model: M,
    /// Admitted set of every completed iteration (1-based order).
    pub pseudo_labels: Vec<PseudoLabelSet>,
    pub prior: Option<FoldPrior>,
}

fn predictions<M: ProbabilisticClassifier>(model: &M, x: ArrayView2<'_, f64>) -> Result<Vec<usize>> {
    model.predict(x)
}

fn fit_calibration(arm: CalibrationArm, val_probs: ArrayView2<'_, f64>, y_val: &[usize]) -> Option<CalibrationMap> {
    let fitted = match arm {
        CalibrationArm::None => return None,
        CalibrationArm::Temperature => fit_temperature(val_probs, y_val),
        CalibrationArm::Histogram => fit_histogram_from_probs(val_probs, y_val),
    };
    match fitted {
        Ok(m) => Some(m),
        Err(e) => {
            log::warn!("calibration skipped this iteration: {e}");
            None
        }
    }
}

/// Run self-training on fold `fold_index` of `split`.
///
/// With `cfg.use_cast` the prior is taken from `prior` when given (it must
/// cover exactly the fold's unlabeled rows) and built otherwise.
pub fn run_self_training<L: Learner>(
    ds: &TabularDataset,
    split: &SplitPlan,
    fold_index: usize,
    learner: &L,
    cfg: &SelfTrainConfig,
    prior: Option<&FoldPrior>,
) -> Result<SelfTrainOutcome<L::Model>>
where
    L::Model: Clone,
{
    cfg.validate()?;
    let start = Instant::now();
    let fold = split
        .folds
        .get(fold_index)
        .ok_or_else(|| CastError::InvalidInput(format!("fold {fold_index} out of range")))?;
    let n_classes = ds.n_classes();
    let unlabeled = fold.unlabeled();

    let prior_start = Instant::now();
    let prior: Option<FoldPrior> = if cfg.use_cast {
        let p = match prior {
            Some(p) => p.clone(),
            None => build_fold_prior(
                ds,
                fold,
                fold_index,
                split.seed,
                cfg.estimator,
                cfg.feature_selection,
                cfg.selection_repeats,
            )?,
        };
        if p.matrix.row_ids != unlabeled {
            return Err(CastError::InvalidInput(
                "prior matrix rows do not match the fold's unlabeled pool".into(),
            ));
        }
        Some(p)
    } else {
        None
    };
    let prior_ms = prior_start.elapsed().as_secs_f64() * 1e3;

    let x_l = ds.select_rows(&fold.labeled);
    let y_l = ds.labels_of(&fold.labeled)?;
    let x_u = ds.select_rows(&unlabeled);
    let x_val = ds.select_rows(&fold.val);
    let y_val = ds.labels_of(&fold.val)?;
    let x_test = ds.select_rows(&split.test_idx);
    let y_test = ds.labels_of(&split.test_idx)?;

    let validate = |m: &L::Model| -> Result<f64> { metric(&predictions(m, x_val.view())?, &y_val, cfg.metric) };

    let t0 = Instant::now();
    let supervised = learner.fit(x_l.view(), &y_l, n_classes, None)?;
    let val0 = validate(&supervised)?;
    let test_scores_supervised = MetricScores::compute(&predictions(&supervised, x_test.view())?, &y_test)?;
    let mut iterations = vec![IterationRecord {
        iteration: 0,
        threshold: None,
        n_pseudo: 0,
        class_histogram: vec![0; n_classes],
        validation: val0,
        filter: None,
        calibration: None,
    }];
    let mut iteration_ms = vec![t0.elapsed().as_secs_f64() * 1e3];

    let mut best = supervised.clone();
    let mut best_iteration = 0;
    let mut best_validation = val0;
    let mut prev_validation = val0;
    let mut current = supervised;
    let mut trained_on = PseudoLabelSet::default();
    let mut pseudo_labels = Vec::new();
    let mut flagged = false;
    let mut termination = if cfg.max_iterations == 0 {
        Termination::SupervisedOnly
    } else {
        Termination::MaxIterations
    };

    for t in 1..=cfg.max_iterations {
        let ti = Instant::now();
        let mut probs = current.predict_proba(x_u.view())?;
        let calibration = fit_calibration(cfg.calibration, current.predict_proba(x_val.view())?.view(), &y_val);
        if let Some(map) = &calibration {
            probs = map.apply_matrix(probs.view());
        }
        let scores: Array2<f64> = match (&prior, cfg.use_cast) {
            (Some(p), true) => {
                let mut s = probs;
                for (i, mut row) in s.rows_mut().into_iter().enumerate() {
                    let r = blend(&row.to_vec(), p.matrix.gamma(i), cfg.alpha);
                    row.iter_mut().zip(r).for_each(|(d, v)| *d = v);
                }
                s
            }
            _ => probs,
        };
        let top: Vec<(usize, f64)> = scores
            .rows()
            .into_iter()
            .map(|r| {
                let v = r.to_vec();
                let k = argmax(&v);
                (k, v[k])
            })
            .collect();

        let (threshold, fraction) = match cfg.fixed_tau() {
            Some(tau) => (tau, None),
            None => {
                let f = curriculum_fraction(cfg.curriculum_step, t);
                let maxes: Vec<f64> = top.iter().map(|&(_, s)| s).collect();
                (curriculum_threshold(&maxes, f)?, Some(f))
            }
        };
        let candidates = PseudoLabelSet {
            iteration: t,
            threshold,
            entries: top
                .iter()
                .enumerate()
                .filter(|(_, &(_, s))| s >= threshold)
                .map(|(i, &(class, score))| PseudoLabel {
                    row: unlabeled[i],
                    class,
                    score,
                })
                .collect(),
        };
        let (admitted, filter) = match cfg.noise_filter {
            NoiseFilter::None => (candidates, None),
            NoiseFilter::Mahalanobis => {
                let (kept, outcome) = mahalanobis_filter(&candidates, ds, &fold.labeled);
                (kept, Some(outcome))
            }
        };

        if cfg.strategy != Strategy::Cpl && admitted.same_labels(&trained_on) {
            termination = Termination::FixedPoint;
            break;
        }

        let rows_tilde: Vec<usize> = fold.labeled.iter().copied().chain(admitted.rows()).collect();
        let x_tilde = ds.select_rows(&rows_tilde);
        let y_tilde: Vec<usize> = y_l.iter().copied().chain(admitted.entries.iter().map(|e| e.class)).collect();
        if y_tilde.iter().all(|&c| c == y_tilde[0]) {
            log::warn!("iteration {t}: pseudo-labeled training set holds a single class; stopping");
            flagged = true;
            termination = Termination::DegenerateLabels;
            break;
        }
        let model = learner.fit(x_tilde.view(), &y_tilde, n_classes, None)?;
        let validation = validate(&model)?;
        iterations.push(IterationRecord {
            iteration: t,
            threshold: Some(threshold),
            n_pseudo: admitted.len(),
            class_histogram: admitted.class_histogram(n_classes),
            validation,
            filter,
            calibration,
        });
        iteration_ms.push(ti.elapsed().as_secs_f64() * 1e3);
        if validation > best_validation {
            best = model.clone();
            best_iteration = t;
            best_validation = validation;
        }
        current = model;
        trained_on = admitted.clone();
        pseudo_labels.push(admitted);

        match cfg.strategy {
            Strategy::Fpl | Strategy::Naive if validation < prev_validation => {
                termination = Termination::ValidationDecrease;
                break;
            }
            Strategy::Cpl if fraction == Some(1.0) => {
                termination = Termination::ScheduleComplete;
                break;
            }
            _ => {}
        }
        prev_validation = validation;
    }

    let test_scores_of_best = MetricScores::compute(&predictions(&best, x_test.view())?, &y_test)?;
    let report = RunReport {
        fold: fold_index,
        seed: split.seed,
        config: cfg.clone(),
        selected_features: prior.as_ref().map(|p| p.selection.selected_idx.clone()),
        iterations,
        best_iteration,
        best_validation,
        test_metric_of_best: test_scores_of_best.get(cfg.metric),
        test_scores_of_best,
        test_scores_supervised,
        termination,
        flagged,
        timings: RunTimings {
            prior_ms,
            iteration_ms,
            total_ms: start.elapsed().as_secs_f64() * 1e3,
        },
    };
    Ok(SelfTrainOutcome {
        report,
        best_model: best,
        pseudo_labels,
        prior,
    })
}
