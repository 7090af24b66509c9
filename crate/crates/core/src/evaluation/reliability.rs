use serde::{Deserialize, Serialize};

use crate::density::PriorMatrix;
use crate::engine::PseudoLabelSet;
use crate::error::{CastError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReliabilityBin {
    /// 0 holds the lowest prior values.
    pub bucket: usize,
    pub count: usize,
    pub correct: usize,
    pub accuracy: f64,
    pub gamma_min: f64,
    pub gamma_max: f64,
}

/// Pseudo-label accuracy per density bucket.
///
/// Admitted rows are ordered by the scaled prior of their assigned class and
/// cut into `buckets` near-equal groups. `truth` is indexed by dataset row id.
pub fn density_reliability_curve(
    pseudo: &PseudoLabelSet,
    prior: &PriorMatrix,
    truth: &[usize],
    buckets: usize,
) -> Result<Vec<ReliabilityBin>> {
    if buckets == 0 {
        return Err(CastError::InvalidInput("need at least one bucket".into()));
    }
    if pseudo.len() < buckets {
        return Err(CastError::InvalidInput(format!(
            "{} pseudo-labels cannot fill {buckets} buckets",
            pseudo.len()
        )));
    }
    let mut scored: Vec<(f64, usize, bool)> = pseudo
        .entries
        .iter()
        .map(|e| {
            let i = prior
                .row_ids
                .binary_search(&e.row)
                .map_err(|_| CastError::InvalidInput(format!("row {} is not in the prior matrix", e.row)))?;
            let t = *truth
                .get(e.row)
                .ok_or_else(|| CastError::InvalidInput(format!("no ground truth for row {}", e.row)))?;
            Ok((prior.scaled[[i, e.class]], e.row, t == e.class))
        })
        .collect::<Result<_>>()?;
    scored.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let n = scored.len();
    Ok((0..buckets)
        .map(|b| {
            let part = &scored[b * n / buckets..(b + 1) * n / buckets];
            let correct = part.iter().filter(|s| s.2).count();
            ReliabilityBin {
                bucket: b,
                count: part.len(),
                correct,
                accuracy: correct as f64 / part.len() as f64,
                gamma_min: part.first().map_or(0.0, |s| s.0),
                gamma_max: part.last().map_or(0.0, |s| s.0),
            }
        })
        .collect())
}
