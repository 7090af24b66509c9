//! Shadow-feature importance test for picking the features the density
//! estimators see.
//!
//! Each repeat appends a permuted copy of every column, fits a gbdt on the
//! widened matrix and scores a hit for each real feature whose gain
//! importance strictly beats the best shadow. Features with at least
//! `ceil(R / 2)` hits are kept.

use ndarray::{concatenate, Array2, Axis};
use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifier::gbdt::{fit_gbdt, GbdtParams};
use crate::data::TabularDataset;
use crate::error::{CastError, Result};
use crate::rng::{derive_seed, name_tag, rng_for, TAG_SELECTION};

pub const DEFAULT_REPEATS: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionResult {
    pub selected_idx: Vec<usize>,
    pub hit_counts: Vec<usize>,
    pub mean_importance: Vec<f64>,
    pub repeats: usize,
    pub seed: u64,
    pub used_fallback: bool,
}

impl SelectionResult {
    /// Keep every feature; used when selection is switched off.
    pub fn all(m: usize) -> Self {
        Self {
            selected_idx: (0..m).collect(),
            hit_counts: vec![0; m],
            mean_importance: vec![0.0; m],
            repeats: 0,
            seed: 0,
            used_fallback: false,
        }
    }
}

pub fn select_features(
    labeled: &TabularDataset,
    repeats: usize,
    seed: u64,
    params: &GbdtParams,
) -> Result<SelectionResult> {
    let m = labeled.n_features();
    if m == 0 {
        return Err(CastError::InvalidInput("dataset has no features".into()));
    }
    if repeats == 0 {
        return Err(CastError::InvalidInput("selection repeats must be >= 1".into()));
    }
    let rows: Vec<usize> = (0..labeled.n_rows()).collect();
    let y = labeled.labels_of(&rows)?;
    let x = labeled.features();
    let weights = vec![1.0; y.len()];

    let per_repeat: Vec<(Vec<bool>, Vec<f64>)> = (0..repeats)
        .into_par_iter()
        .map(|rep| {
            let mut shadow = Array2::zeros(x.dim());
            for (f, feat) in labeled.schema().iter().enumerate() {
                let mut rng = rng_for(seed, &[TAG_SELECTION, rep as u64, name_tag(&feat.name)]);
                let mut perm = rows.clone();
                perm.shuffle(&mut rng);
                for (i, &src) in perm.iter().enumerate() {
                    shadow[[i, f]] = x[[src, f]];
                }
            }
            let wide = concatenate(Axis(1), &[x, shadow.view()]).expect("same row count");
            let model_seed = derive_seed(seed, &[TAG_SELECTION, rep as u64]);
            let model = fit_gbdt(params, model_seed, wide.view(), &y, labeled.n_classes(), &weights)?;
            let imp = &model.importances;
            let shadow_max = imp[m..].iter().cloned().fold(0.0, f64::max);
            let hits = imp[..m].iter().map(|&v| v > shadow_max).collect();
            Ok((hits, imp[..m].to_vec()))
        })
        .collect::<Result<_>>()?;

    let mut hit_counts = vec![0usize; m];
    let mut mean_importance = vec![0.0; m];
    for (hits, imp) in &per_repeat {
        for f in 0..m {
            hit_counts[f] += usize::from(hits[f]);
            mean_importance[f] += imp[f] / repeats as f64;
        }
    }
    let needed = repeats.div_ceil(2);
    let mut selected_idx: Vec<usize> = (0..m).filter(|&f| hit_counts[f] >= needed).collect();
    let used_fallback = selected_idx.is_empty();
    if used_fallback {
        let k = (m as f64).sqrt().ceil() as usize;
        let names = labeled.schema();
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| {
            mean_importance[b]
                .total_cmp(&mean_importance[a])
                .then_with(|| names[a].name.cmp(&names[b].name))
        });
        selected_idx = order[..k].to_vec();
        selected_idx.sort_unstable();
    }
    Ok(SelectionResult {
        selected_idx,
        hit_counts,
        mean_importance,
        repeats,
        seed,
        used_fallback,
    })
}
