//! Points on the probability simplex.
//!
//! [`ProbVec`] is the validated distribution type used everywhere else.
//! [`enumerate_grid`] and [`sample_uniform`] produce the two discrete
//! representations of the simplex used to approximate credal sets: the
//! regular lattice `{n / N : Σ n = N}` in lexicographic order, and i.i.d.
//! uniform draws from the flat Dirichlet.
//!
//! All stochastic functions use `ChaCha8Rng` seeded with `seed_from_u64`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Entries in `[-NEGATIVE_CLAMP, 0)` are treated as floating-point noise and
/// clamped to zero.
pub const NEGATIVE_CLAMP: f64 = 1e-9;

const RENORMALIZE_SLACK: f64 = 1e-13;

/// Default cap on the number of grid points.
pub const DEFAULT_GRID_CAP: u128 = 10_000_000;

/// A probability distribution over `K >= 2` classes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ProbVec(Vec<f64>);

impl ProbVec {
    /// Validates and renormalizes `values`.
    pub fn new(values: &[f64]) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::TooFewClasses { got: values.len() });
        }
        let mut probs = Vec::with_capacity(values.len());
        for (index, &v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite { index });
            }
            if v < -NEGATIVE_CLAMP {
                return Err(Error::NegativeMass { index, value: v });
            }
            probs.push(v.max(0.0));
        }
        let sum: f64 = probs.iter().sum();
        if sum.is_nan() || sum <= 0.0 || !sum.is_finite() {
            return Err(Error::ZeroMass { sum });
        }
        // Vectors already normalized to rounding precision are kept
        // bit-for-bit so that construction is idempotent.
        if (sum - 1.0).abs() > RENORMALIZE_SLACK {
            for p in &mut probs {
                *p /= sum;
            }
        }
        Ok(ProbVec(probs))
    }

    /// The uniform distribution over `k` classes.
    pub fn uniform(k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::TooFewClasses { got: k });
        }
        Ok(ProbVec(vec![1.0 / k as f64; k]))
    }

    /// The point mass on class `class`.
    pub fn one_hot(k: usize, class: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::TooFewClasses { got: k });
        }
        if class >= k {
            return Err(Error::LabelOutOfRange { label: class, k });
        }
        let mut probs = vec![0.0; k];
        probs[class] = 1.0;
        Ok(ProbVec(probs))
    }

    pub fn k(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    /// Largest probability.
    pub fn max_prob(&self) -> f64 {
        self.0.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Index of the largest probability, smallest index on ties.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, &p) in self.0.iter().enumerate().skip(1) {
            if p > self.0[best] {
                best = i;
            }
        }
        best
    }

    pub(crate) fn check_same_k(&self, other: &ProbVec) -> Result<()> {
        if self.k() != other.k() {
            return Err(Error::DimensionMismatch {
                left: self.k(),
                right: other.k(),
            });
        }
        Ok(())
    }
}

impl TryFrom<Vec<f64>> for ProbVec {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        ProbVec::new(&values)
    }
}

impl From<ProbVec> for Vec<f64> {
    fn from(p: ProbVec) -> Self {
        p.0
    }
}

impl AsRef<[f64]> for ProbVec {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// Alias used by callers that mirror the operation names.
pub fn make_probvec(values: &[f64]) -> Result<ProbVec> {
    ProbVec::new(values)
}

/// `binomial(n + k - 1, k - 1)`, saturating at `u128::MAX`.
pub fn grid_size(k: usize, resolution: usize) -> u128 {
    binomial((resolution + k - 1) as u128, (k - 1) as u128)
}

fn binomial(n: u128, r: u128) -> u128 {
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        // acc * (n - i) / (i + 1) stays integral at every step.
        acc = match acc.checked_mul(n - i) {
            Some(v) => v / (i + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// The regular lattice on the simplex at resolution `N`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexGrid {
    pub k: usize,
    pub resolution: usize,
    pub points: Vec<ProbVec>,
}

/// Enumerates `{(n_1/N, ..., n_K/N) : Σ n_i = N}` in lexicographic order of
/// `(n_1, ..., n_K)`, refusing grids larger than [`DEFAULT_GRID_CAP`].
pub fn enumerate_grid(k: usize, resolution: usize) -> Result<SimplexGrid> {
    enumerate_grid_with_cap(k, resolution, DEFAULT_GRID_CAP)
}

pub fn enumerate_grid_with_cap(k: usize, resolution: usize, cap: u128) -> Result<SimplexGrid> {
    if k < 2 {
        return Err(Error::TooFewClasses { got: k });
    }
    if resolution < 1 {
        return Err(Error::InvalidArgument(
            "grid resolution must be at least 1".into(),
        ));
    }
    let count = grid_size(k, resolution);
    if count > cap {
        return Err(Error::ResourceLimit {
            requested: count,
            cap,
        });
    }

    let n = resolution as f64;
    let mut points = Vec::with_capacity(count as usize);
    let mut parts = vec![0usize; k];
    parts[k - 1] = resolution;
    loop {
        points.push(ProbVec(parts.iter().map(|&c| c as f64 / n).collect()));
        // Successor: move one unit into the rightmost non-final slot that
        // has mass to its right, then pile the remaining suffix mass last.
        let mut suffix = parts[k - 1];
        let mut bump = None;
        for i in (0..k - 1).rev() {
            if suffix > 0 {
                bump = Some(i);
                break;
            }
            suffix += parts[i];
        }
        let Some(i) = bump else { break };
        parts[i] += 1;
        for p in &mut parts[i + 1..] {
            *p = 0;
        }
        parts[k - 1] = suffix - 1;
    }
    debug_assert_eq!(points.len() as u128, count);
    Ok(SimplexGrid {
        k,
        resolution,
        points,
    })
}

/// Uniform draws from the simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexSample {
    pub k: usize,
    pub seed: u64,
    pub points: Vec<ProbVec>,
}

/// `M` i.i.d. uniform points: normalized i.i.d. standard-exponential vectors.
pub fn sample_uniform(k: usize, m: usize, seed: u64) -> Result<SimplexSample> {
    if k < 2 {
        return Err(Error::TooFewClasses { got: k });
    }
    if m < 1 {
        return Err(Error::InvalidArgument(
            "sample count must be at least 1".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(m);
    let mut buf = vec![0.0; k];
    while points.len() < m {
        let mut sum = 0.0;
        for x in &mut buf {
            let e: f64 = Exp1.sample(&mut rng);
            *x = e;
            sum += e;
        }
        if sum <= 0.0 {
            continue;
        }
        points.push(ProbVec(buf.iter().map(|x| x / sum).collect()));
    }
    Ok(SimplexSample { k, seed, points })
}

/// Shannon entropy in nats, with `0 ln 0 = 0`.
pub fn shannon_entropy(q: &ProbVec) -> f64 {
    -q.0.iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| p * p.ln())
        .sum::<f64>()
}
