//! Synthetic edge/cloud prediction pairs with a tunable edge-model quality.
//!
//! For every input a true class distribution `t ~ Dirichlet(c·1)` is drawn,
//! the label is sampled from `t`, and both models see `t` through Gaussian
//! logit noise:
//!
//! ```text
//! cloud = softmax(ln t + σ_cloud z)
//! edge  = softmax((ln t + σ_edge z') / T)
//! ```
//!
//! `T < 1` makes the edge model overconfident. Inputs are i.i.d., so any split
//! into calibration and test data is exchangeable.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::conformal::CalibrationPair;
use crate::error::{Error, Result};
use crate::simplex::ProbVec;

const LOG_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SyntheticConfig {
    pub k: usize,
    pub n: usize,
    pub seed: u64,
    /// Symmetric Dirichlet concentration of the true distributions.
    pub concentration: f64,
    pub cloud_noise: f64,
    pub edge_noise: f64,
    pub edge_temperature: f64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        SyntheticConfig {
            k: 3,
            n: 1000,
            seed: 0,
            concentration: 1.0,
            cloud_noise: 0.2,
            edge_noise: 1.0,
            edge_temperature: 1.0,
        }
    }
}

impl SyntheticConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(Error::TooFewClasses { got: self.k });
        }
        if self.n < 1 {
            return Err(Error::InvalidArgument("n must be at least 1".into()));
        }
        if !(self.concentration > 0.0 && self.concentration.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "concentration must be positive, got {}",
                self.concentration
            )));
        }
        if !(self.cloud_noise >= 0.0 && self.cloud_noise.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "cloud noise must be non-negative, got {}",
                self.cloud_noise
            )));
        }
        if !(self.edge_noise >= self.cloud_noise && self.edge_noise.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "edge noise {} must be at least the cloud noise {}",
                self.edge_noise, self.cloud_noise
            )));
        }
        if !(self.edge_temperature > 0.0 && self.edge_temperature.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "edge temperature must be positive, got {}",
                self.edge_temperature
            )));
        }
        Ok(())
    }
}

fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|z| (z - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

fn sample_pair(
    config: &SyntheticConfig,
    gamma: &Gamma<f64>,
    index: usize,
) -> Result<CalibrationPair> {
    let k = config.k;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(index as u64);

    let draws: Vec<f64> = (0..k).map(|_| gamma.sample(&mut rng)).collect();
    let total: f64 = draws.iter().sum();
    let truth: Vec<f64> = if total > 0.0 {
        draws.iter().map(|g| g / total).collect()
    } else {
        vec![1.0 / k as f64; k]
    };

    let u: f64 = rng.random();
    let mut label = k - 1;
    let mut acc = 0.0;
    for (c, &p) in truth.iter().enumerate() {
        acc += p;
        if u < acc {
            label = c;
            break;
        }
    }

    let log_truth: Vec<f64> = truth.iter().map(|t| t.max(LOG_FLOOR).ln()).collect();
    let cloud_logits: Vec<f64> = log_truth
        .iter()
        .map(|l| {
            let z: f64 = StandardNormal.sample(&mut rng);
            l + config.cloud_noise * z
        })
        .collect();
    let edge_logits: Vec<f64> = log_truth
        .iter()
        .map(|l| {
            let z: f64 = StandardNormal.sample(&mut rng);
            (l + config.edge_noise * z) / config.edge_temperature
        })
        .collect();

    CalibrationPair::new(
        format!("s{}-{index}", config.seed),
        ProbVec::new(&softmax(&edge_logits))?,
        ProbVec::new(&softmax(&cloud_logits))?,
        Some(label),
    )
}

/// Deterministic per seed; sample `i` uses its own ChaCha stream, so the
/// result does not depend on thread scheduling.
pub fn generate(config: &SyntheticConfig) -> Result<Vec<CalibrationPair>> {
    config.validate()?;
    let gamma =
        Gamma::new(config.concentration, 1.0).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    (0..config.n)
        .into_par_iter()
        .map(|i| sample_pair(config, &gamma, i))
        .collect()
}
