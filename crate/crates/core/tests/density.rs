use cast_core::data::{FeatureSchema, TabularDataset};
use cast_core::density::kde::KernelParam;
use cast_core::density::{
    build_prior_matrix, fit_empirical_likelihood, fit_kde, min_max_columns, DensityModel, EstimatorKind,
    PriorMatrix,
};
use ndarray::{Array1, Array2};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Mixed dataset: two continuous columns, one categorical column with 3 levels.
fn mixed(n: usize, seed: u64) -> TabularDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = Array2::zeros((n, 3));
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let y = i % 2;
        x[[i, 0]] = rng.random_range(-1.0..1.0) + 2.0 * y as f64;
        x[[i, 1]] = rng.random_range(0.0..3.0);
        x[[i, 2]] = rng.random_range(0..3) as f64;
        labels.push(Some(y));
    }
    let schema = vec![
        FeatureSchema::continuous("a", 0),
        FeatureSchema::continuous("b", 1),
        FeatureSchema::categorical("c", 2, 3),
    ];
    TabularDataset::new(x, labels, schema, 2).unwrap()
}

/// Direct summation from the kernel definitions, recomputing every bandwidth
/// and smoothing parameter from the raw class samples.
fn brute_force_kde(ds: &TabularDataset, selected: &[usize], class: usize, q: &[f64]) -> f64 {
    let members: Vec<usize> = (0..ds.n_rows()).filter(|&r| ds.label(r) == Some(class)).collect();
    let n = members.len() as f64;
    let d = selected.len() as f64;
    let mut total = 0.0;
    for &r in &members {
        let mut prod = 1.0;
        for (k, &f) in selected.iter().enumerate() {
            let xi = ds.value(r, f);
            match ds.schema()[f].cardinality {
                Some(card) => {
                    let card = card as f64;
                    let lambda = n.powf(-2.0 / (d + 4.0)).min((card - 1.0) / card);
                    prod *= if q[k] == xi { 1.0 - lambda } else { lambda / (card - 1.0) };
                }
                None => {
                    let vals: Vec<f64> = members.iter().map(|&m| ds.value(m, f)).collect();
                    let mean = vals.iter().sum::<f64>() / n;
                    let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
                    let h = 1.06 * var.sqrt().max(1e-6) * n.powf(-0.2);
                    let u = (q[k] - xi) / h;
                    prod *= (-u * u / 2.0).exp() / (h * (2.0 * std::f64::consts::PI).sqrt());
                }
            }
        }
        total += prod;
    }
    total / n
}

#[test]
fn kde_matches_direct_summation_at_random_queries() {
    let ds = mixed(40, 1);
    let selected = [0, 1, 2];
    let model = fit_kde(&ds, &selected).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..50 {
        let q = [
            rng.random_range(-2.0..4.0),
            rng.random_range(-1.0..4.0),
            rng.random_range(0..3) as f64,
        ];
        let got = model.gamma(Array1::from(q.to_vec()).view());
        for c in 0..2 {
            let want = brute_force_kde(&ds, &selected, c, &q);
            assert!((got[c] - want).abs() <= 1e-12 * want.max(1.0), "{} vs {}", got[c], want);
        }
    }
}

#[test]
fn five_point_class_matches_kernel_sum() {
    let x = Array2::from_shape_vec((10, 1), vec![0.1, 5.0, 0.7, 5.5, 1.3, 6.1, 0.2, 4.9, 2.0, 5.2]).unwrap();
    let ds = TabularDataset::from_continuous(x, (0..10).map(|i| i % 2).collect(), 2).unwrap();
    let model = fit_kde(&ds, &[0]).unwrap();
    for q in [-1.0, 0.0, 0.45, 1.7, 3.3] {
        let got = model.gamma(Array1::from(vec![q]).view());
        for c in 0..2 {
            let want = brute_force_kde(&ds, &[0], c, &[q]);
            assert!((got[c] - want).abs() < 1e-12);
        }
    }
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

#[test]
fn one_dimensional_kde_integrates_to_one() {
    let ds = mixed(30, 4);
    let model = fit_kde(&ds, &[0]).unwrap();
    for (c, ck) in model.classes.iter().enumerate() {
        let KernelParam::Gaussian { bandwidth: h } = ck.kernels[0] else {
            panic!("expected gaussian")
        };
        let col = ck.points.column(0);
        let lo = col.iter().cloned().fold(f64::INFINITY, f64::min) - 10.0 * h;
        let hi = col.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + 10.0 * h;
        let total = simpson(|x| model.classes[c].density(&[x]), lo, hi, 20_000);
        assert!((total - 1.0).abs() < 1e-3, "class {c}: {total}");
    }
}

#[test]
fn doubling_bandwidth_never_raises_density_at_training_points() {
    let ds = mixed(30, 5);
    let selected = [0, 1];
    let narrow = fit_kde(&ds, &selected).unwrap();
    let mut wide = narrow.clone();
    wide.scale_bandwidths(2.0);
    for r in 0..ds.n_rows() {
        let c = ds.label(r).unwrap();
        let a = narrow.gamma(ds.row(r))[c];
        let b = wide.gamma(ds.row(r))[c];
        assert!(b <= a + 1e-15, "row {r}: {b} > {a}");
    }
}

#[test]
fn kde_nonnegative() {
    let ds = mixed(20, 6);
    let model = fit_kde(&ds, &[0, 1, 2]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..200 {
        let q = Array1::from(vec![rng.random_range(-50.0..50.0), rng.random_range(-50.0..50.0), 1.0]);
        assert!(model.gamma(q.view()).iter().all(|&v| v >= 0.0));
    }
}

/// Six rows, two classes, one binary categorical and one continuous feature.
#[test]
fn empirical_likelihood_hand_count() {
    let x = Array2::from_shape_vec(
        (6, 2),
        vec![
            1.0, 0.0, //
            1.0, 1.0, //
            1.0, 5.0, //
            0.0, 10.0, //
            0.0, 2.5, //
            1.0, 9.9,
        ],
    )
    .unwrap();
    let schema = vec![FeatureSchema::categorical("b", 0, 2), FeatureSchema::continuous("v", 1)];
    let labels = vec![Some(0), Some(0), Some(0), Some(0), Some(1), Some(1)];
    let ds = TabularDataset::new(x, labels, schema, 2).unwrap();
    let m = fit_empirical_likelihood(&ds, &[0, 1]).unwrap();

    // class 0: b = [1,1,1,0] -> P(b=1) = 4/6, P(b=0) = 2/6
    assert_eq!(m.feature_prob(0, 0, 1.0), 4.0 / 6.0);
    assert_eq!(m.feature_prob(0, 0, 0.0), 2.0 / 6.0);
    // class 1: b = [0,1] -> 2/4 each
    assert_eq!(m.feature_prob(1, 0, 1.0), 2.0 / 4.0);
    // v bins of width 1 over [0, 10]; class 0 values fall in bins 0, 1, 5, 9
    assert_eq!(m.feature_prob(0, 1, 0.5), 2.0 / 14.0);
    assert_eq!(m.feature_prob(0, 1, 3.0), 1.0 / 14.0);
    assert_eq!(m.feature_prob(0, 1, 10.0), 2.0 / 14.0);
    // class 1 values 2.5 and 9.9 -> bins 2 and 9
    assert_eq!(m.feature_prob(1, 1, 2.2), 2.0 / 12.0);
    assert_eq!(m.feature_prob(1, 1, -4.0), 1.0 / 12.0);

    let q = Array1::from(vec![1.0, 5.2]);
    let g = m.gamma(q.view());
    assert_eq!(g[0], (4.0f64 / 6.0).ln() + (2.0f64 / 14.0).ln());
    assert_eq!(g[1], (2.0f64 / 4.0).ln() + (1.0f64 / 12.0).ln());
}

#[test]
fn prior_matrix_is_scaled_per_class() {
    let ds = mixed(60, 7);
    let labeled: Vec<usize> = (0..20).collect();
    let pool: Vec<usize> = (20..60).collect();
    for kind in [EstimatorKind::Kde, EstimatorKind::EmpiricalLikelihood] {
        let model = DensityModel::fit(kind, &ds.subset(&labeled), &[0, 1, 2]).unwrap();
        let p = build_prior_matrix(&model, &ds, &pool).unwrap();
        assert_eq!(p.raw.dim(), (40, 2));
        for col in p.scaled.columns() {
            let min = col.iter().cloned().fold(f64::INFINITY, f64::min);
            let max = col.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            assert_eq!((min, max), (0.0, 1.0));
        }
    }
}

#[test]
fn prior_csv_export() {
    let p = PriorMatrix::from_raw(
        vec![3, 8],
        Array2::from_shape_vec((2, 2), vec![1.0, -2.0, 3.0, -1.0]).unwrap(),
        EstimatorKind::EmpiricalLikelihood,
    )
    .unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("priors.csv");
    p.write_csv(&path).unwrap();
    let text = std::fs::read_to_string(path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "row_id,class,raw,scaled");
    assert_eq!(lines.len(), 5);
    assert_eq!(lines[4], "8,1,-1,1");
}

proptest! {
    #[test]
    fn scaling_is_monotone(col in prop::collection::vec(-1e6f64..1e6, 2..40)) {
        let raw = Array2::from_shape_vec((col.len(), 1), col.clone()).unwrap();
        let s = min_max_columns(&raw);
        for i in 0..col.len() {
            prop_assert!((0.0..=1.0).contains(&s[[i, 0]]));
            for j in 0..col.len() {
                if col[i] < col[j] {
                    prop_assert!(s[[i, 0]] < s[[j, 0]]);
                }
            }
        }
    }

    #[test]
    fn prior_matrix_follows_row_permutation(seed in 0u64..1000) {
        let ds = mixed(50, 11);
        let labeled: Vec<usize> = (0..16).collect();
        let model = DensityModel::fit(EstimatorKind::Kde, &ds.subset(&labeled), &[0, 1, 2]).unwrap();
        let pool: Vec<usize> = (16..50).collect();
        let mut shuffled = pool.clone();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rand::seq::SliceRandom::shuffle(shuffled.as_mut_slice(), &mut rng);
        let a = build_prior_matrix(&model, &ds, &pool).unwrap();
        let b = build_prior_matrix(&model, &ds, &shuffled).unwrap();
        for (i, id) in shuffled.iter().enumerate() {
            let j = id - 16;
            prop_assert_eq!(a.scaled.row(j), b.scaled.row(i));
            prop_assert_eq!(a.raw.row(j), b.raw.row(i));
        }
    }
}
