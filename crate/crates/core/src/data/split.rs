//! Test holdout, cross-validation folds and labeled-subset sampling.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::dataset::TabularDataset;
use crate::error::{CastError, Result};
use crate::rng::{rng_for, TAG_FOLDS, TAG_LABELED, TAG_TEST_HOLDOUT};

pub const TEST_FRACTION: f64 = 0.2;
pub const N_FOLDS: usize = 3;

/// One cross-validation fold. `labeled` is a subset of `train`; the rest of
/// `train` is the unlabeled pool.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fold {
    pub train: Vec<usize>,
    pub val: Vec<usize>,
    pub labeled: Vec<usize>,
}

impl Fold {
    /// Train rows that are not in the labeled subset, ascending.
    pub fn unlabeled(&self) -> Vec<usize> {
        let mut lab = self.labeled.clone();
        lab.sort_unstable();
        self.train
            .iter()
            .copied()
            .filter(|r| lab.binary_search(r).is_err())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitPlan {
    pub test_idx: Vec<usize>,
    pub folds: Vec<Fold>,
    pub labeled_fraction: f64,
    pub seed: u64,
}

/// Split `total` items over groups proportionally to `sizes` with the
/// largest-remainder rule (ties go to the lower group index).
pub(crate) fn allocate(total: usize, sizes: &[usize]) -> Vec<usize> {
    let sum: usize = sizes.iter().sum();
    if sum == 0 {
        return vec![0; sizes.len()];
    }
    let total = total.min(sum);
    let quotas: Vec<f64> = sizes
        .iter()
        .map(|&s| total as f64 * s as f64 / sum as f64)
        .collect();
    let mut alloc: Vec<usize> = quotas
        .iter()
        .zip(sizes)
        .map(|(q, &s)| (q.floor() as usize).min(s))
        .collect();
    let mut order: Vec<usize> = (0..sizes.len()).collect();
    order.sort_by(|&a, &b| {
        let fa = quotas[a] - quotas[a].floor();
        let fb = quotas[b] - quotas[b].floor();
        fb.partial_cmp(&fa).unwrap().then(a.cmp(&b))
    });
    let mut left = total - alloc.iter().sum::<usize>();
    while left > 0 {
        let mut progressed = false;
        for &g in &order {
            if left == 0 {
                break;
            }
            if alloc[g] < sizes[g] {
                alloc[g] += 1;
                left -= 1;
                progressed = true;
            }
        }
        if !progressed {
            break;
        }
    }
    alloc
}

/// Build the evaluation split: a stratified 20% test holdout, three
/// stratified folds over the remainder, and a stratified labeled subset of
/// each fold's training rows.
pub fn make_split(ds: &TabularDataset, labeled_fraction: f64, seed: u64) -> Result<SplitPlan> {
    if !(labeled_fraction > 0.0 && labeled_fraction <= 1.0) {
        return Err(CastError::Split(format!(
            "labeled fraction {labeled_fraction} not in (0, 1]"
        )));
    }
    let n = ds.n_rows();
    if n < 10 {
        return Err(CastError::Split(format!("need at least 10 rows, got {n}")));
    }
    if !ds.is_fully_labeled() {
        return Err(CastError::Split("benchmark splits need every row labeled".into()));
    }
    let all: Vec<usize> = (0..n).collect();
    let by_class = ds.rows_by_class(&all);
    for (c, rows) in by_class.iter().enumerate() {
        if !rows.is_empty() && rows.len() < N_FOLDS {
            let name = ds
                .encoding()
                .and_then(|e| e.decode_class(c))
                .map(|s| format!("'{s}' ({c})"))
                .unwrap_or_else(|| c.to_string());
            return Err(CastError::Split(format!(
                "class {name} has {} rows, fewer than {N_FOLDS} folds",
                rows.len()
            )));
        }
    }

    let mut rng = rng_for(seed, &[TAG_TEST_HOLDOUT]);
    let mut shuffled: Vec<Vec<usize>> = by_class.clone();
    for rows in &mut shuffled {
        rows.shuffle(&mut rng);
    }
    let sizes: Vec<usize> = shuffled.iter().map(Vec::len).collect();
    let n_test = (TEST_FRACTION * n as f64).round() as usize;
    let test_alloc = allocate(n_test, &sizes);

    let mut test_idx = Vec::with_capacity(n_test);
    let mut rest_by_class = Vec::with_capacity(shuffled.len());
    for (rows, &k) in shuffled.iter().zip(&test_alloc) {
        test_idx.extend_from_slice(&rows[..k]);
        rest_by_class.push(rows[k..].to_vec());
    }
    test_idx.sort_unstable();

    // deal each class round-robin into folds, continuing the counter across
    // classes so that fold sizes differ by at most one
    let mut rng = rng_for(seed, &[TAG_FOLDS]);
    let mut fold_members: Vec<Vec<usize>> = vec![Vec::new(); N_FOLDS];
    let mut counter = 0usize;
    for rows in &mut rest_by_class {
        rows.shuffle(&mut rng);
        for &r in rows.iter() {
            fold_members[counter % N_FOLDS].push(r);
            counter += 1;
        }
    }
    for f in &mut fold_members {
        f.sort_unstable();
    }

    let mut folds = Vec::with_capacity(N_FOLDS);
    for k in 0..N_FOLDS {
        let val = fold_members[k].clone();
        let mut train: Vec<usize> = (0..N_FOLDS)
            .filter(|&j| j != k)
            .flat_map(|j| fold_members[j].iter().copied())
            .collect();
        train.sort_unstable();
        let labeled = sample_labeled(ds, &train, labeled_fraction, seed, k as u64);
        folds.push(Fold { train, val, labeled });
    }

    Ok(SplitPlan {
        test_idx,
        folds,
        labeled_fraction,
        seed,
    })
}

fn sample_labeled(
    ds: &TabularDataset,
    train: &[usize],
    fraction: f64,
    seed: u64,
    fold: u64,
) -> Vec<usize> {
    let mut by_class = ds.rows_by_class(train);
    let sizes: Vec<usize> = by_class.iter().map(Vec::len).collect();
    let target = ((fraction * train.len() as f64).round() as usize).clamp(1, train.len());
    let mut alloc = allocate(target, &sizes);

    // make sure every class present in train gets at least one labeled row
    let present = sizes.iter().filter(|&&s| s > 0).count();
    if target >= present {
        for c in 0..alloc.len() {
            if sizes[c] > 0 && alloc[c] == 0 {
                let donor = (0..alloc.len())
                    .filter(|&d| alloc[d] > 1)
                    .max_by_key(|&d| (alloc[d], std::cmp::Reverse(d)));
                if let Some(d) = donor {
                    alloc[d] -= 1;
                    alloc[c] = 1;
                }
            }
        }
    }

    let mut rng = rng_for(seed, &[TAG_LABELED, fold]);
    let mut labeled = Vec::with_capacity(target);
    for (rows, &k) in by_class.iter_mut().zip(&alloc) {
        rows.shuffle(&mut rng);
        labeled.extend_from_slice(&rows[..k]);
    }
    labeled.sort_unstable();
    labeled
}
