//! Desk-scale synthetic benchmarks bundled with the toolkit.

use ndarray::Array2;
use rand::Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use super::dataset::TabularDataset;
use super::schema::FeatureSchema;
use crate::error::{CastError, Result};
use crate::rng::{rng_for, TAG_SYNTHETIC};

/// Generation seed used for bundled datasets unless overridden. Experiment
/// seeds vary the split, not the data.
pub const DEFAULT_DATA_SEED: u64 = 2024;
pub const DEFAULT_ROWS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Bundled {
    /// Two isotropic 2-D Gaussian blobs, small spread.
    BlobsLow,
    BlobsMid,
    BlobsHigh,
    /// Two noisy concentric rings.
    Rings,
    /// 20 features (2 categorical), 5 of them informative.
    Informative20,
}

impl Bundled {
    pub const ALL: [Bundled; 5] = [
        Bundled::BlobsLow,
        Bundled::BlobsMid,
        Bundled::BlobsHigh,
        Bundled::Rings,
        Bundled::Informative20,
    ];

    /// Blob configurations ordered from least to most noisy.
    pub const NOISE_SUITE: [Bundled; 3] = [Bundled::BlobsLow, Bundled::BlobsMid, Bundled::BlobsHigh];

    pub fn name(self) -> &'static str {
        match self {
            Bundled::BlobsLow => "blobs-low",
            Bundled::BlobsMid => "blobs-mid",
            Bundled::BlobsHigh => "blobs-high",
            Bundled::Rings => "rings",
            Bundled::Informative20 => "informative20",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|b| b.name() == name)
            .ok_or_else(|| CastError::Config(format!("unknown bundled dataset '{name}'")))
    }

    pub fn generate(self, n: usize, seed: u64) -> Result<TabularDataset> {
        match self {
            Bundled::BlobsLow => blobs(n, 1.5, seed),
            Bundled::BlobsMid => blobs(n, 2.25, seed),
            Bundled::BlobsHigh => blobs(n, 3.0, seed),
            Bundled::Rings => rings(n, 0.35, seed),
            Bundled::Informative20 => informative20(n, seed),
        }
    }
}

/// Two 2-D Gaussian blobs centred at `-(2, 2)` and `+(2, 2)` with standard
/// deviation `std`; balanced classes, class 0 at the negative centre.
pub fn blobs(n: usize, std: f64, seed: u64) -> Result<TabularDataset> {
    let mut rng = rng_for(seed, &[TAG_SYNTHETIC, 1]);
    let noise = Normal::new(0.0, std).map_err(|e| CastError::InvalidInput(e.to_string()))?;
    let mut x = Array2::zeros((n, 2));
    let mut y = Vec::with_capacity(n);
    for i in 0..n {
        let class = i % 2;
        let centre = if class == 0 { -2.0 } else { 2.0 };
        x[[i, 0]] = centre + noise.sample(&mut rng);
        x[[i, 1]] = centre + noise.sample(&mut rng);
        y.push(class);
    }
    TabularDataset::from_continuous(x, y, 2)
}

/// Inner ring of radius 1 (class 0) and outer ring of radius 2.5 (class 1)
/// with Gaussian radial noise.
pub fn rings(n: usize, noise: f64, seed: u64) -> Result<TabularDataset> {
    let mut rng = rng_for(seed, &[TAG_SYNTHETIC, 2]);
    let jitter = Normal::new(0.0, noise).map_err(|e| CastError::InvalidInput(e.to_string()))?;
    let mut x = Array2::zeros((n, 2));
    let mut y = Vec::with_capacity(n);
    for i in 0..n {
        let class = i % 2;
        let radius = if class == 0 { 1.0 } else { 2.5 } + jitter.sample(&mut rng);
        let angle = rng.random_range(0.0..std::f64::consts::TAU);
        x[[i, 0]] = radius * angle.cos();
        x[[i, 1]] = radius * angle.sin();
        y.push(class);
    }
    TabularDataset::from_continuous(x, y, 2)
}

/// Binary task with 18 continuous and 2 categorical features. Continuous
/// features 0..4 shift with the class; categorical feature 18 (4 levels)
/// is class-dependent; the rest is noise.
pub fn informative20(n: usize, seed: u64) -> Result<TabularDataset> {
    let mut rng = rng_for(seed, &[TAG_SYNTHETIC, 3]);
    let m = 20;
    let mut x = Array2::zeros((n, m));
    let mut y = Vec::with_capacity(n);
    for i in 0..n {
        let class = i % 2;
        let sign = if class == 0 { -1.0 } else { 1.0 };
        for j in 0..18 {
            let z: f64 = StandardNormal.sample(&mut rng);
            x[[i, j]] = if j < 4 { z * 1.5 + sign * 0.9 } else { z };
        }
        // informative categorical: classes favour opposite halves of the levels
        let favoured = rng.random_bool(0.7);
        let half = if (class == 0) == favoured { 0.0 } else { 2.0 };
        x[[i, 18]] = half + f64::from(u8::from(rng.random_bool(0.5)));
        x[[i, 19]] = f64::from(rng.random_range(0..3u8));
        y.push(class);
    }
    let mut schema: Vec<FeatureSchema> = (0..18)
        .map(|j| FeatureSchema::continuous(format!("x{j}"), j))
        .collect();
    schema.push(FeatureSchema::categorical("cat_informative", 18, 4));
    schema.push(FeatureSchema::categorical("cat_noise", 19, 3));
    TabularDataset::new(x, y.into_iter().map(Some).collect(), schema, 2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for b in Bundled::ALL {
            assert_eq!(Bundled::from_name(b.name()).unwrap(), b);
        }
        assert!(Bundled::from_name("nope").is_err());
    }

    #[test]
    fn generators_are_deterministic_and_balanced() {
        for b in Bundled::ALL {
            let a = b.generate(200, 5).unwrap();
            assert_eq!(a, b.generate(200, 5).unwrap());
            let ones = a.labels().iter().filter(|l| **l == Some(1)).count();
            assert_eq!(ones, 100);
        }
    }
}
