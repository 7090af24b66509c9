//! Fisher information of the class-mixing estimate carried by unlabeled
//! samples, restricted to high- or low-density regions, for 1-D two-class
//! mixtures.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::quadrature::adaptive_simpson;
use crate::error::{CastError, Result};

pub const ABS_TOL: f64 = 1e-8;
const SCAN_POINTS: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Density1D {
    Gaussian { mean: f64, sd: f64 },
    Uniform { lo: f64, hi: f64 },
}

impl Density1D {
    pub fn pdf(&self, x: f64) -> f64 {
        match *self {
            Density1D::Gaussian { mean, sd } => {
                let z = (x - mean) / sd;
                (-0.5 * z * z).exp() / (sd * (2.0 * PI).sqrt())
            }
            Density1D::Uniform { lo, hi } => {
                if x >= lo && x <= hi {
                    1.0 / (hi - lo)
                } else {
                    0.0
                }
            }
        }
    }

    pub fn peak(&self) -> f64 {
        match *self {
            Density1D::Gaussian { sd, .. } => 1.0 / (sd * (2.0 * PI).sqrt()),
            Density1D::Uniform { lo, hi } => 1.0 / (hi - lo),
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Density1D::Gaussian { mean, sd } if mean.is_finite() && sd > 0.0 && sd.is_finite() => Ok(()),
            Density1D::Uniform { lo, hi } if lo.is_finite() && hi.is_finite() && hi > lo => Ok(()),
            d => Err(CastError::InvalidInput(format!("invalid density {d:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    All,
    /// Where either class density exceeds the high threshold.
    High,
    /// Where both class densities are below the low threshold.
    Low,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MixtureSpec {
    pub d1: Density1D,
    pub d2: Density1D,
    pub p_hat: f64,
    /// Defaults to half the larger density peak.
    pub theta_high: Option<f64>,
    /// Defaults to 5% of the larger density peak.
    pub theta_low: Option<f64>,
}

impl Default for MixtureSpec {
    fn default() -> Self {
        Self {
            d1: Density1D::Gaussian { mean: 0.0, sd: 1.0 },
            d2: Density1D::Gaussian { mean: 4.0, sd: 1.0 },
            p_hat: 0.5,
            theta_high: None,
            theta_low: None,
        }
    }
}

impl MixtureSpec {
    pub fn gaussians(mu1: f64, mu2: f64, sd: f64, p_hat: f64) -> Self {
        Self {
            d1: Density1D::Gaussian { mean: mu1, sd },
            d2: Density1D::Gaussian { mean: mu2, sd },
            p_hat,
            theta_high: None,
            theta_low: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.d1.validate()?;
        self.d2.validate()?;
        if !(self.p_hat > 0.0 && self.p_hat < 1.0) {
            return Err(CastError::InvalidInput(format!("p_hat {} not in (0, 1)", self.p_hat)));
        }
        let (hi, lo) = self.thresholds();
        if !(lo >= 0.0 && hi >= 0.0 && lo <= hi) {
            return Err(CastError::InvalidInput(format!(
                "thresholds must satisfy 0 <= theta_low ({lo}) <= theta_high ({hi})"
            )));
        }
        Ok(())
    }

    /// `(theta_high, theta_low)` with defaults filled in.
    pub fn thresholds(&self) -> (f64, f64) {
        let peak = self.d1.peak().max(self.d2.peak());
        (
            self.theta_high.unwrap_or(0.5 * peak),
            self.theta_low.unwrap_or(0.05 * peak),
        )
    }

    /// Swap the class roles and the mixing estimate.
    pub fn mirrored(&self) -> Self {
        Self {
            d1: self.d2,
            d2: self.d1,
            p_hat: 1.0 - self.p_hat,
            ..self.clone()
        }
    }

    pub fn integrand(&self, x: f64) -> f64 {
        let a = self.d1.pdf(x);
        let b = self.d2.pdf(x);
        let den = self.p_hat * a + (1.0 - self.p_hat) * b;
        if den > 0.0 {
            (a - b) * (a - b) / den
        } else {
            0.0
        }
    }

    pub fn in_region(&self, region: Region, x: f64) -> bool {
        let (hi, lo) = self.thresholds();
        let (a, b) = (self.d1.pdf(x), self.d2.pdf(x));
        match region {
            Region::All => true,
            Region::High => a > hi || b > hi,
            Region::Low => a < lo && b < lo,
        }
    }

    /// Integration range: eight of the widest standard deviations around the
    /// Gaussian means, widened to cover uniform supports.
    pub fn domain(&self) -> (f64, f64) {
        let sd_max = [self.d1, self.d2]
            .iter()
            .filter_map(|d| match d {
                Density1D::Gaussian { sd, .. } => Some(*sd),
                _ => None,
            })
            .fold(0.0, f64::max);
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for d in [self.d1, self.d2] {
            let (a, b) = match d {
                Density1D::Gaussian { mean, .. } => (mean - 8.0 * sd_max, mean + 8.0 * sd_max),
                Density1D::Uniform { lo, hi } => (lo, hi),
            };
            lo = lo.min(a);
            hi = hi.max(b);
        }
        (lo, hi)
    }

    /// Points where the integrand or the region indicators may jump.
    fn breakpoints(&self) -> Vec<f64> {
        let (lo, hi) = self.domain();
        let mut pts = vec![lo, hi];
        for d in [self.d1, self.d2] {
            if let Density1D::Uniform { lo: a, hi: b } = d {
                pts.extend([a, b]);
            }
        }
        let (th, tl) = self.thresholds();
        for d in [self.d1, self.d2] {
            if !matches!(d, Density1D::Gaussian { .. }) {
                continue;
            }
            for theta in [th, tl] {
                let g = |x: f64| d.pdf(x) - theta;
                let h = (hi - lo) / SCAN_POINTS as f64;
                let mut x0 = lo;
                let mut g0 = g(x0);
                for i in 1..=SCAN_POINTS {
                    let x1 = lo + i as f64 * h;
                    let g1 = g(x1);
                    if (g0 < 0.0) != (g1 < 0.0) {
                        pts.push(bisect(&g, x0, x1));
                    }
                    x0 = x1;
                    g0 = g1;
                }
            }
        }
        pts.retain(|p| *p >= lo && *p <= hi);
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }
}

fn bisect(g: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let ga = g(a) < 0.0;
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m == a || m == b {
            break;
        }
        if (g(m) < 0.0) == ga {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

pub fn fisher_information(spec: &MixtureSpec, region: Region) -> Result<f64> {
    fisher_information_tol(spec, region, ABS_TOL)
}

/// As [`fisher_information`] with an explicit absolute tolerance.
pub fn fisher_information_tol(spec: &MixtureSpec, region: Region, tol: f64) -> Result<f64> {
    spec.validate()?;
    let pts = spec.breakpoints();
    let pieces: Vec<(f64, f64)> = pts
        .windows(2)
        .map(|w| (w[0], w[1]))
        .filter(|&(a, b)| b > a && spec.in_region(region, 0.5 * (a + b)))
        .collect();
    if pieces.is_empty() {
        return Ok(0.0);
    }
    let piece_tol = tol / pieces.len() as f64;
    let mut total = 0.0;
    for (a, b) in pieces {
        // evaluate strictly inside the piece so boundary values never leak in
        let f = |x: f64| {
            if x <= a || x >= b {
                spec.integrand(x.clamp(a + (b - a) * 1e-12, b - (b - a) * 1e-12))
            } else {
                spec.integrand(x)
            }
        };
        match adaptive_simpson(&f, a, b, piece_tol) {
            Ok(v) => total += v,
            Err(CastError::Quadrature { partial }) => {
                return Err(CastError::Quadrature { partial: total + partial })
            }
            Err(e) => return Err(e),
        }
    }
    Ok(total)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorollaryReport {
    pub spec: MixtureSpec,
    pub theta_high: f64,
    pub theta_low: f64,
    pub i_all: f64,
    pub i_high: f64,
    pub i_low: f64,
    /// `i_high > i_low`.
    pub holds: bool,
    /// Both region integrals vanish: the densities carry no information.
    pub zero_information: bool,
    /// Largest `min(D1, D2)` over the high region (small when the classes
    /// barely overlap where they are dense).
    pub high_region_max_min_density: f64,
    /// Largest `|D1 - D2|` over the low region (small when sparse regions
    /// cannot tell the classes apart).
    pub low_region_max_abs_diff: f64,
}

pub fn corollary_check(spec: &MixtureSpec) -> Result<CorollaryReport> {
    spec.validate()?;
    let i_all = fisher_information(spec, Region::All)?;
    let i_high = fisher_information(spec, Region::High)?;
    let i_low = fisher_information(spec, Region::Low)?;
    let (theta_high, theta_low) = spec.thresholds();
    let (lo, hi) = spec.domain();
    let n = 20_000;
    let mut high_diag: f64 = 0.0;
    let mut low_diag: f64 = 0.0;
    for i in 0..=n {
        let x = lo + (hi - lo) * i as f64 / n as f64;
        let (a, b) = (spec.d1.pdf(x), spec.d2.pdf(x));
        if spec.in_region(Region::High, x) {
            high_diag = high_diag.max(a.min(b));
        }
        if spec.in_region(Region::Low, x) {
            low_diag = low_diag.max((a - b).abs());
        }
    }
    Ok(CorollaryReport {
        spec: spec.clone(),
        theta_high,
        theta_low,
        i_all,
        i_high,
        i_low,
        holds: i_high > i_low,
        zero_information: i_high == 0.0 && i_low == 0.0,
        high_region_max_min_density: high_diag,
        low_region_max_abs_diff: low_diag,
    })
}
