//! Histogram gradient-boosted regression trees on the softmax loss.
//!
//! Binary problems use a single raw score with a logistic link; problems
//! with `N > 2` classes grow one tree per class per round. Trees are fitted
//! to first/second-order loss derivatives (Newton leaves with L2 shrinkage),
//! and every accepted split adds its gain to the feature's importance.

use ndarray::{ArrayView1, ArrayView2};
use rand::seq::index::sample;
use serde::{Deserialize, Serialize};

use crate::error::{CastError, Result};
use crate::rng::{rng_for, TAG_CLASSIFIER};

const HESS_FLOOR: f64 = 1e-16;
const PROB_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GbdtParams {
    pub n_trees: usize,
    pub max_depth: usize,
    pub learning_rate: f64,
    /// Minimum total sample weight in each child of a split.
    pub min_leaf: f64,
    /// Row fraction drawn (without replacement) for each boosting round.
    pub subsample: f64,
    /// L2 penalty on leaf values.
    pub lambda: f64,
    pub max_bins: usize,
}

impl Default for GbdtParams {
    fn default() -> Self {
        Self {
            n_trees: 100,
            max_depth: 4,
            learning_rate: 0.1,
            min_leaf: 5.0,
            subsample: 1.0,
            lambda: 1.0,
            max_bins: 64,
        }
    }
}

impl GbdtParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(CastError::Classifier(msg));
        if self.n_trees == 0 {
            return bad("n_trees must be >= 1".into());
        }
        if self.max_depth == 0 {
            return bad("max_depth must be >= 1".into());
        }
        if !(self.learning_rate > 0.0 && self.learning_rate <= 1.0) {
            return bad(format!("learning_rate {} not in (0, 1]", self.learning_rate));
        }
        if !(self.subsample > 0.0 && self.subsample <= 1.0) {
            return bad(format!("subsample {} not in (0, 1]", self.subsample));
        }
        if self.min_leaf < 0.0 || self.lambda < 0.0 {
            return bad("min_leaf and lambda must be non-negative".into());
        }
        if self.max_bins < 2 {
            return bad("max_bins must be >= 2".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        value: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

impl Tree {
    pub fn predict(&self, row: ArrayView1<'_, f64>) -> f64 {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                Node::Leaf { value } => return value,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => i = if row[feature] <= threshold { left } else { right },
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GbdtModel {
    pub n_classes: usize,
    pub n_features: usize,
    /// One entry per raw-score output (1 for binary, `N` otherwise).
    pub base_score: Vec<f64>,
    /// `trees[round][output]`; leaf values already include the learning rate.
    pub trees: Vec<Vec<Tree>>,
    pub importances: Vec<f64>,
}

impl GbdtModel {
    pub fn raw_scores(&self, row: ArrayView1<'_, f64>) -> Vec<f64> {
        let mut f = self.base_score.clone();
        for round in &self.trees {
            for (k, tree) in round.iter().enumerate() {
                f[k] += tree.predict(row);
            }
        }
        f
    }

    pub fn predict_row(&self, row: ArrayView1<'_, f64>) -> Vec<f64> {
        raw_to_proba(&self.raw_scores(row), self.n_classes)
    }
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

pub fn softmax(raw: &[f64]) -> Vec<f64> {
    let max = raw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = raw.iter().map(|v| (v - max).exp()).collect();
    let s: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / s).collect()
}

/// Class probabilities from raw scores: logistic link for a single output,
/// softmax otherwise.
pub fn raw_to_proba(raw: &[f64], n_classes: usize) -> Vec<f64> {
    if n_classes == 2 && raw.len() == 1 {
        let p1 = sigmoid(raw[0]);
        vec![1.0 - p1, p1]
    } else {
        softmax(raw)
    }
}

/// Cross-entropy of the softmax (or logistic) link at raw scores `raw`.
pub fn softmax_loss(raw: &[f64], label: usize, n_classes: usize) -> f64 {
    if raw.len() == 1 {
        // log(1 + e^{-z}) for the positive class, log(1 + e^{z}) otherwise
        let z = if label == 1 { raw[0] } else { -raw[0] };
        (-z).max(0.0) + (1.0 + (-z.abs()).exp()).ln()
    } else {
        let max = raw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lse = max + raw.iter().map(|v| (v - max).exp()).sum::<f64>().ln();
        debug_assert!(label < n_classes);
        lse - raw[label]
    }
}

/// Gradient and (diagonal) Hessian of [`softmax_loss`] with respect to the
/// raw scores.
pub fn softmax_grad_hess(raw: &[f64], label: usize, n_classes: usize) -> (Vec<f64>, Vec<f64>) {
    if raw.len() == 1 {
        let p = sigmoid(raw[0]);
        let y = if label == 1 { 1.0 } else { 0.0 };
        (vec![p - y], vec![(p * (1.0 - p)).max(HESS_FLOOR)])
    } else {
        let p = softmax(raw);
        let g = (0..n_classes)
            .map(|k| p[k] - if k == label { 1.0 } else { 0.0 })
            .collect();
        let h = p.iter().map(|pk| (pk * (1.0 - pk)).max(HESS_FLOOR)).collect();
        (g, h)
    }
}

/// Per-feature split thresholds and binned training data.
struct Binned {
    thresholds: Vec<Vec<f64>>,
    /// Column-major bin codes: `bins[f][row]`.
    bins: Vec<Vec<u16>>,
}

fn bin_features(x: ArrayView2<'_, f64>, w: &[f64], max_bins: usize) -> Binned {
    let m = x.ncols();
    let mut thresholds = Vec::with_capacity(m);
    let mut bins = Vec::with_capacity(m);
    for f in 0..m {
        let col = x.column(f);
        // unique values with their total weight
        let mut pairs: Vec<(f64, f64)> = col.iter().copied().zip(w.iter().copied()).collect();
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let mut uniq: Vec<(f64, f64)> = Vec::new();
        for (v, wt) in pairs {
            match uniq.last_mut() {
                Some(last) if last.0 == v => last.1 += wt,
                _ => uniq.push((v, wt)),
            }
        }
        let mut cuts: Vec<usize> = Vec::new();
        if uniq.len() <= max_bins {
            cuts.extend(0..uniq.len().saturating_sub(1));
        } else {
            // weighted quantile cut points
            let total: f64 = uniq.iter().map(|u| u.1).sum();
            let mut acc = 0.0;
            let mut next = 1usize;
            for (i, u) in uniq.iter().enumerate().take(uniq.len() - 1) {
                acc += u.1;
                if acc >= total * next as f64 / max_bins as f64 {
                    cuts.push(i);
                    while next < max_bins && acc >= total * next as f64 / max_bins as f64 {
                        next += 1;
                    }
                }
            }
        }
        let t: Vec<f64> = cuts
            .iter()
            .map(|&i| 0.5 * (uniq[i].0 + uniq[i + 1].0))
            .collect();
        let b: Vec<u16> = col
            .iter()
            .map(|&v| t.partition_point(|&th| th < v) as u16)
            .collect();
        thresholds.push(t);
        bins.push(b);
    }
    Binned { thresholds, bins }
}

struct TreeBuilder<'a> {
    binned: &'a Binned,
    grad: &'a [f64],
    hess: &'a [f64],
    weight: &'a [f64],
    params: &'a GbdtParams,
    nodes: Vec<Node>,
    importances: &'a mut [f64],
}

#[derive(Clone, Copy, Default)]
struct Stat {
    g: f64,
    h: f64,
    w: f64,
}

impl TreeBuilder<'_> {
    fn leaf_value(&self, s: Stat) -> f64 {
        -s.g / (s.h + self.params.lambda) * self.params.learning_rate
    }

    fn score(&self, s: Stat) -> f64 {
        s.g * s.g / (s.h + self.params.lambda)
    }

    fn build(&mut self, rows: &[usize], depth: usize) -> usize {
        let total = rows.iter().fold(Stat::default(), |mut s, &r| {
            s.g += self.grad[r];
            s.h += self.hess[r];
            s.w += self.weight[r];
            s
        });
        let id = self.nodes.len();
        self.nodes.push(Node::Leaf {
            value: self.leaf_value(total),
        });
        if depth >= self.params.max_depth || total.w < 2.0 * self.params.min_leaf {
            return id;
        }

        let parent = self.score(total);
        let mut best: Option<(f64, usize, usize)> = None; // gain, feature, bin
        let mut hist: Vec<Stat> = Vec::new();
        for (f, th) in self.binned.thresholds.iter().enumerate() {
            if th.is_empty() {
                continue;
            }
            hist.clear();
            hist.resize(th.len() + 1, Stat::default());
            let codes = &self.binned.bins[f];
            for &r in rows {
                let s = &mut hist[codes[r] as usize];
                s.g += self.grad[r];
                s.h += self.hess[r];
                s.w += self.weight[r];
            }
            let mut left = Stat::default();
            for (b, s) in hist.iter().enumerate().take(th.len()) {
                left.g += s.g;
                left.h += s.h;
                left.w += s.w;
                let right = Stat {
                    g: total.g - left.g,
                    h: total.h - left.h,
                    w: total.w - left.w,
                };
                if left.w < self.params.min_leaf || right.w < self.params.min_leaf {
                    continue;
                }
                if left.w <= 0.0 || right.w <= 0.0 {
                    continue;
                }
                let gain = self.score(left) + self.score(right) - parent;
                if gain > 1e-12 && best.is_none_or(|(g, _, _)| gain > g) {
                    best = Some((gain, f, b));
                }
            }
        }

        let Some((gain, feature, bin)) = best else {
            return id;
        };
        self.importances[feature] += gain;
        let codes = &self.binned.bins[feature];
        let (l_rows, r_rows): (Vec<usize>, Vec<usize>) =
            rows.iter().partition(|&&r| (codes[r] as usize) <= bin);
        let left = self.build(&l_rows, depth + 1);
        let right = self.build(&r_rows, depth + 1);
        self.nodes[id] = Node::Split {
            feature,
            threshold: self.binned.thresholds[feature][bin],
            left,
            right,
        };
        id
    }
}

pub fn fit_gbdt(
    params: &GbdtParams,
    seed: u64,
    x: ArrayView2<'_, f64>,
    y: &[usize],
    n_classes: usize,
    weights: &[f64],
) -> Result<GbdtModel> {
    params.validate()?;
    let (n, m) = x.dim();
    let n_out = if n_classes == 2 { 1 } else { n_classes };

    // initial raw score from weighted class frequencies
    let mut class_w = vec![0.0; n_classes];
    for (&c, &w) in y.iter().zip(weights) {
        class_w[c] += w;
    }
    let total_w: f64 = class_w.iter().sum();
    let base_score: Vec<f64> = if n_out == 1 {
        let p = (class_w[1] / total_w).clamp(PROB_FLOOR, 1.0 - PROB_FLOOR);
        vec![(p / (1.0 - p)).ln()]
    } else {
        class_w
            .iter()
            .map(|&cw| (cw / total_w).max(PROB_FLOOR).ln())
            .collect()
    };

    let binned = bin_features(x, weights, params.max_bins);
    let mut raw: Vec<Vec<f64>> = vec![base_score.clone(); n];
    let mut importances = vec![0.0; m];
    let mut trees = Vec::with_capacity(params.n_trees);
    let mut rng = rng_for(seed, &[TAG_CLASSIFIER]);
    let all_rows: Vec<usize> = (0..n).collect();
    let mut grad = vec![vec![0.0; n]; n_out];
    let mut hess = vec![vec![0.0; n]; n_out];

    for _ in 0..params.n_trees {
        for i in 0..n {
            let (g, h) = softmax_grad_hess(&raw[i], y[i], n_classes);
            for k in 0..n_out {
                grad[k][i] = weights[i] * g[k];
                hess[k][i] = weights[i] * h[k];
            }
        }
        let rows: Vec<usize> = if params.subsample < 1.0 {
            let k = ((params.subsample * n as f64).round() as usize).max(1);
            let mut s = sample(&mut rng, n, k).into_vec();
            s.sort_unstable();
            s
        } else {
            all_rows.clone()
        };

        let mut round = Vec::with_capacity(n_out);
        for k in 0..n_out {
            let mut builder = TreeBuilder {
                binned: &binned,
                grad: &grad[k],
                hess: &hess[k],
                weight: weights,
                params,
                nodes: Vec::new(),
                importances: &mut importances,
            };
            builder.build(&rows, 0);
            let tree = Tree {
                nodes: builder.nodes,
            };
            for (i, r) in raw.iter_mut().enumerate() {
                r[k] += tree.predict(x.row(i));
            }
            round.push(tree);
        }
        trees.push(round);
    }

    Ok(GbdtModel {
        n_classes,
        n_features: m,
        base_score,
        trees,
        importances,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;
    use rand::Rng;

    /// Central finite-difference check of the loss derivative.
    fn check_gradient(n_classes: usize, seed: u64) {
        let mut rng = rng_for(seed, &[99]);
        let n_out = if n_classes == 2 { 1 } else { n_classes };
        for _ in 0..20 {
            let raw: Vec<f64> = (0..n_out).map(|_| rng.random_range(-3.0..3.0)).collect();
            let label = rng.random_range(0..n_classes);
            let (g, _) = softmax_grad_hess(&raw, label, n_classes);
            for k in 0..n_out {
                let eps = 1e-6;
                let mut up = raw.clone();
                up[k] += eps;
                let mut dn = raw.clone();
                dn[k] -= eps;
                let fd = (softmax_loss(&up, label, n_classes) - softmax_loss(&dn, label, n_classes))
                    / (2.0 * eps);
                let rel = (fd - g[k]).abs() / g[k].abs().max(1e-3);
                assert!(rel < 1e-5, "k={k} fd={fd} analytic={} rel={rel}", g[k]);
            }
        }
    }

    #[test]
    fn gradient_matches_finite_differences_binary() {
        check_gradient(2, 1);
    }

    #[test]
    fn gradient_matches_finite_differences_multiclass() {
        check_gradient(4, 2);
    }

    #[test]
    fn thresholds_respect_bins() {
        let x = Array2::from_shape_vec((5, 1), vec![3.0, 1.0, 2.0, 2.0, 5.0]).unwrap();
        let b = bin_features(x.view(), &[1.0; 5], 64);
        assert_eq!(b.thresholds[0], vec![1.5, 2.5, 4.0]);
        assert_eq!(b.bins[0], vec![2, 0, 1, 1, 3]);
    }

    #[test]
    fn quantile_binning_caps_bin_count() {
        let x = Array2::from_shape_fn((1000, 1), |(i, _)| i as f64);
        let b = bin_features(x.view(), &vec![1.0; 1000], 16);
        assert!(b.thresholds[0].len() <= 15);
        assert!(b.thresholds[0].len() >= 12);
    }

    #[test]
    fn invalid_params_rejected() {
        let p = GbdtParams {
            n_trees: 0,
            ..Default::default()
        };
        assert!(p.validate().is_err());
        let p = GbdtParams {
            learning_rate: 1.5,
            ..Default::default()
        };
        assert!(p.validate().is_err());
    }
}
