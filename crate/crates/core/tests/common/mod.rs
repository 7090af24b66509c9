#![allow(dead_code)]

use std::sync::atomic::{AtomicUsize, Ordering};

use cast_core::classifier::{Learner, ProbabilisticClassifier};
use cast_core::data::TabularDataset;
use cast_core::Result;
use ndarray::{Array2, ArrayView2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Rows `[score, true_label, u]` with `score` and `u` uniform on `[0, 1)`.
pub fn scripted_dataset(n: usize, seed: u64) -> TabularDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = Array2::zeros((n, 3));
    let mut y = Vec::with_capacity(n);
    for i in 0..n {
        let label = i % 2;
        x[[i, 0]] = rng.random_range(0.0..1.0);
        x[[i, 1]] = label as f64;
        x[[i, 2]] = rng.random_range(0.0..1.0);
        y.push(label);
    }
    TabularDataset::from_continuous(x, y, 2).unwrap()
}

/// Learner whose k-th fit returns a model that is right on a `quality[k]`
/// share of rows (those with `u < quality[k]`), ignoring its training data.
/// Confidence of the predicted class is `0.505 + 0.49 * clamp(score + drift * k)`.
pub struct ScriptedLearner {
    pub quality: Vec<f64>,
    pub drift: f64,
    pub calls: AtomicUsize,
}

impl ScriptedLearner {
    pub fn new(quality: Vec<f64>, drift: f64) -> Self {
        Self {
            quality,
            drift,
            calls: AtomicUsize::new(0),
        }
    }

    pub fn fits(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }
}

#[derive(Clone)]
pub struct ScriptedModel {
    pub k: usize,
    quality: f64,
    drift: f64,
}

impl ProbabilisticClassifier for ScriptedModel {
    fn n_classes(&self) -> usize {
        2
    }

    fn n_features(&self) -> usize {
        3
    }

    fn predict_proba(&self, x: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        let mut out = Array2::zeros((x.nrows(), 2));
        for (i, row) in x.rows().into_iter().enumerate() {
            let truth = row[1] as usize;
            let pred = if row[2] < self.quality { truth } else { 1 - truth };
            let s = (row[0] + self.drift * self.k as f64).clamp(0.0, 1.0);
            let conf = 0.505 + 0.49 * s;
            out[[i, pred]] = conf;
            out[[i, 1 - pred]] = 1.0 - conf;
        }
        Ok(out)
    }
}

impl Learner for ScriptedLearner {
    type Model = ScriptedModel;

    fn fit(&self, _x: ArrayView2<'_, f64>, _y: &[usize], _n: usize, _w: Option<&[f64]>) -> Result<ScriptedModel> {
        let k = self.calls.fetch_add(1, Ordering::SeqCst);
        let quality = self.quality[k.min(self.quality.len() - 1)];
        Ok(ScriptedModel {
            k,
            quality,
            drift: self.drift,
        })
    }
}
