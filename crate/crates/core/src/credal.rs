//! Run-time phase: the credal set `Γ(x) = {q : D(q ‖ p(·|x)) ≤ γ}`.
//!
//! Exact membership ([`CredalSet::contains`]) evaluates the divergence
//! directly. Bounds, volume and the decision rules work on a discrete
//! representation of the simplex (a lattice or uniform Monte-Carlo draws)
//! filtered by membership; the center is always a member.
//!
//! Sampled bounds understate the true per-class interval by up to the
//! representation's spacing.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::conformal::ThresholdArtifact;
use crate::divergence::{DivergenceSpec, Kernel};
use crate::error::{Error, Result};
use crate::simplex::{enumerate_grid, sample_uniform, ProbVec};

/// Default lattice resolution for `K <= 4`.
pub const DEFAULT_GRID_RESOLUTION: usize = 100;
/// Default Monte-Carlo sample count for `K > 4`.
pub const DEFAULT_MC_SAMPLES: usize = 200_000;

/// Discrete stand-in for the simplex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Representation {
    Grid { resolution: usize },
    MonteCarlo { samples: usize, seed: u64 },
}

impl Representation {
    /// Lattice at resolution 100 for `K <= 4`, otherwise 200 000 seeded draws.
    pub fn default_for(k: usize, seed: u64) -> Self {
        if k <= 4 {
            Representation::Grid {
                resolution: DEFAULT_GRID_RESOLUTION,
            }
        } else {
            Representation::MonteCarlo {
                samples: DEFAULT_MC_SAMPLES,
                seed,
            }
        }
    }

    pub fn points(&self, k: usize) -> Result<Vec<ProbVec>> {
        match *self {
            Representation::Grid { resolution } => Ok(enumerate_grid(k, resolution)?.points),
            Representation::MonteCarlo { samples, seed } => {
                Ok(sample_uniform(k, samples, seed)?.points)
            }
        }
    }
}

/// Representation points with the divergence factors that depend only on
/// the candidate member, computed once and shared by every set built from
/// this builder.
#[derive(Debug)]
struct PreparedPoints {
    k: usize,
    points: Vec<ProbVec>,
    factors: Vec<f64>,
}

/// Builds credal sets for one `(K, divergence, representation)` triple.
#[derive(Debug, Clone)]
pub struct CredalBuilder {
    spec: DivergenceSpec,
    kernel: Kernel,
    representation: Representation,
    prepared: Arc<PreparedPoints>,
}

impl CredalBuilder {
    pub fn new(k: usize, spec: DivergenceSpec, representation: Representation) -> Result<Self> {
        spec.validate()?;
        let kernel = spec.kernel();
        let points = representation.points(k)?;
        let factors = points
            .iter()
            .flat_map(|p| p.as_slice().iter().map(|&x| kernel.first_factor(x)))
            .collect();
        Ok(CredalBuilder {
            spec,
            kernel,
            representation,
            prepared: Arc::new(PreparedPoints { k, points, factors }),
        })
    }

    pub fn k(&self) -> usize {
        self.prepared.k
    }

    pub fn divergence(&self) -> &DivergenceSpec {
        &self.spec
    }

    pub fn representation(&self) -> Representation {
        self.representation
    }

    pub fn point_count(&self) -> usize {
        self.prepared.points.len()
    }

    /// The set of radius `gamma` around `center`.
    pub fn build(&self, center: &ProbVec, gamma: f64) -> Result<CredalSet> {
        if center.k() != self.k() {
            return Err(Error::ConfigMismatch(format!(
                "credal builder is for K = {}, center has K = {}",
                self.k(),
                center.k()
            )));
        }
        if gamma.is_nan() || gamma < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "gamma must be non-negative, got {gamma}"
            )));
        }
        let k = self.k();
        let prep = &self.prepared;
        let c = center.as_slice();
        let second: Vec<f64> = c.iter().map(|&x| self.kernel.second_factor(x)).collect();

        let hits: Vec<u32> = if gamma == f64::INFINITY {
            (0..prep.points.len() as u32).collect()
        } else {
            prep.points
                .par_iter()
                .enumerate()
                .filter_map(|(i, q)| {
                    let first = &prep.factors[i * k..(i + 1) * k];
                    let d = self.kernel.eval_prepared(q.as_slice(), first, c, &second);
                    (d <= gamma).then_some(i as u32)
                })
                .collect()
        };
        let center_in_points = hits
            .iter()
            .any(|&i| prep.points[i as usize].as_slice() == c);

        Ok(CredalSet {
            center: center.clone(),
            gamma,
            divergence: self.spec,
            representation: self.representation,
            prepared: Arc::clone(&self.prepared),
            hits,
            inject_center: !center_in_points,
        })
    }

    /// The set for `center` at the artifact's radius, after checking the
    /// artifact matches this builder.
    pub fn build_from_artifact(
        &self,
        center: &ProbVec,
        artifact: &ThresholdArtifact,
    ) -> Result<CredalSet> {
        artifact.check_compatible(center.k(), Some(&self.spec))?;
        self.build(center, artifact.gamma)
    }
}

/// A credal set with its members materialized on the representation.
#[derive(Debug, Clone)]
pub struct CredalSet {
    center: ProbVec,
    gamma: f64,
    divergence: DivergenceSpec,
    representation: Representation,
    prepared: Arc<PreparedPoints>,
    hits: Vec<u32>,
    inject_center: bool,
}

impl CredalSet {
    pub fn center(&self) -> &ProbVec {
        &self.center
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn divergence(&self) -> &DivergenceSpec {
        &self.divergence
    }

    pub fn representation(&self) -> Representation {
        self.representation
    }

    /// The center (when it is not itself a representation point) followed by
    /// the member points in representation order.
    pub fn members(&self) -> impl Iterator<Item = &ProbVec> + '_ {
        self.inject_center
            .then_some(&self.center)
            .into_iter()
            .chain(self.hits.iter().map(|&i| &self.prepared.points[i as usize]))
    }

    pub fn member_count(&self) -> usize {
        self.hits.len() + usize::from(self.inject_center)
    }

    /// Exact membership test `D(q ‖ center) ≤ γ`.
    pub fn contains(&self, q: &ProbVec) -> Result<bool> {
        q.check_same_k(&self.center)?;
        let d = self
            .divergence
            .kernel()
            .eval(q.as_slice(), self.center.as_slice());
        Ok(d <= self.gamma)
    }

    /// Fraction of representation points inside the set, an estimate of the
    /// normalized volume `|Γ(x)| / |P|`. The injected center is not counted.
    pub fn inefficiency(&self) -> f64 {
        self.hits.len() as f64 / self.prepared.points.len() as f64
    }

    pub fn bounds(&self) -> CredalBounds {
        let k = self.center.k();
        let mut lower = vec![f64::INFINITY; k];
        let mut upper = vec![f64::NEG_INFINITY; k];
        for q in self.members() {
            for (y, &v) in q.as_slice().iter().enumerate() {
                lower[y] = lower[y].min(v);
                upper[y] = upper[y].max(v);
            }
        }
        CredalBounds { lower, upper }
    }
}

/// Builds `Γ(x)` for one edge prediction. Prefer [`CredalBuilder`] when many
/// sets share a representation.
pub fn build_credal_set(
    edge: &ProbVec,
    artifact: &ThresholdArtifact,
    representation: Representation,
) -> Result<CredalSet> {
    artifact.validate()?;
    artifact.check_compatible(edge.k(), None)?;
    CredalBuilder::new(artifact.k, artifact.divergence, representation)?
        .build_from_artifact(edge, artifact)
}

pub fn contains(set: &CredalSet, q: &ProbVec) -> Result<bool> {
    set.contains(q)
}

pub fn credal_bounds(set: &CredalSet) -> CredalBounds {
    set.bounds()
}

pub fn inefficiency(set: &CredalSet) -> f64 {
    set.inefficiency()
}

/// Per-class lower and upper probabilities over a credal set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CredalBounds {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

/// Slack allowed on `Σ lower <= 1 <= Σ upper`.
const BOUNDS_SLACK: f64 = 1e-9;

impl CredalBounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        let b = CredalBounds { lower, upper };
        b.validate()?;
        Ok(b)
    }

    pub fn k(&self) -> usize {
        self.lower.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.lower.len() != self.upper.len() {
            return Err(Error::InvalidBounds(format!(
                "{} lower vs {} upper entries",
                self.lower.len(),
                self.upper.len()
            )));
        }
        if self.lower.len() < 2 {
            return Err(Error::TooFewClasses {
                got: self.lower.len(),
            });
        }
        for (y, (&l, &u)) in self.lower.iter().zip(&self.upper).enumerate() {
            if !(0.0..=1.0).contains(&l) || !(0.0..=1.0).contains(&u) || l > u {
                return Err(Error::InvalidBounds(format!(
                    "class {y}: need 0 <= lower <= upper <= 1, got [{l}, {u}]"
                )));
            }
        }
        let sl: f64 = self.lower.iter().sum();
        let su: f64 = self.upper.iter().sum();
        if sl > 1.0 + BOUNDS_SLACK || su < 1.0 - BOUNDS_SLACK {
            return Err(Error::InvalidBounds(format!(
                "need sum(lower) <= 1 <= sum(upper), got {sl} and {su}"
            )));
        }
        Ok(())
    }
}
