use rand::seq::index::sample;
use rand::Rng;

use super::dataset::TabularDataset;
use crate::error::{CastError, Result};
use crate::rng::{rng_for, TAG_CORRUPT};

/// Replace a fixed fraction of features in each targeted row with draws from
/// the empirical marginal of that feature.
///
/// For every row in `rows`, `floor(ratio * m)` distinct features are picked
/// uniformly (fresh per row). Each picked cell takes the value of that
/// feature in a uniformly chosen row of `marginal_rows`, so replacements
/// always come from the observed training values.
pub fn corrupt_features(
    ds: &TabularDataset,
    rows: &[usize],
    marginal_rows: &[usize],
    ratio: f64,
    seed: u64,
) -> Result<TabularDataset> {
    if !(ratio > 0.0 && ratio <= 1.0) {
        return Err(CastError::InvalidInput(format!("corruption ratio {ratio} not in (0, 1]")));
    }
    let m = ds.n_features();
    let k = (ratio * m as f64).floor() as usize;
    if k == 0 {
        return Err(CastError::InvalidInput(format!(
            "corruption ratio {ratio} selects no feature out of {m}"
        )));
    }
    if marginal_rows.is_empty() {
        return Err(CastError::InvalidInput("no rows to draw marginals from".into()));
    }
    let mut x = ds.features().to_owned();
    let mut rng = rng_for(seed, &[TAG_CORRUPT]);
    for &r in rows {
        for col in sample(&mut rng, m, k).into_iter() {
            let donor = marginal_rows[rng.random_range(0..marginal_rows.len())];
            x[[r, col]] = ds.value(donor, col);
        }
    }
    ds.with_features(x)
}
