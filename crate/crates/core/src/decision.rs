//! Collapsing a credal set to one predictive distribution.
//!
//! The intersection probability places every class at the same relative
//! position `β` inside its `[lower, upper]` interval, with `β` chosen so the
//! result sums to one:
//!
//! ```text
//! β = (1 − Σ lower) / Σ (upper − lower),   q*_y = lower_y + β (upper_y − lower_y)
//! ```
//!
//! The max-entropy and ensemble rules are the two alternatives it is compared
//! against; both operate on the sampled members.

use serde::{Deserialize, Serialize};

use crate::credal::{CredalBounds, CredalSet};
use crate::error::Result;
use crate::simplex::{shannon_entropy, ProbVec};

/// Below this total interval width the set is treated as a singleton.
pub const DEGENERATE_WIDTH: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    Intersection,
    MaxEntropy,
    Ensemble,
}

impl Rule {
    pub const ALL: [Rule; 3] = [Rule::Intersection, Rule::MaxEntropy, Rule::Ensemble];

    pub fn name(&self) -> &'static str {
        match self {
            Rule::Intersection => "intersection",
            Rule::MaxEntropy => "max_entropy",
            Rule::Ensemble => "ensemble",
        }
    }

    /// Applies the rule to a materialized set.
    pub fn apply(&self, set: &CredalSet) -> Result<DecisionOutput> {
        match self {
            Rule::Intersection => intersection_probability(&set.bounds()),
            Rule::MaxEntropy => Ok(max_entropy_member(set)),
            Rule::Ensemble => Ok(ensemble_member(set)),
        }
    }
}

impl std::fmt::Display for Rule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Rule {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "intersection" => Ok(Rule::Intersection),
            "max_entropy" | "max-entropy" => Ok(Rule::MaxEntropy),
            "ensemble" => Ok(Rule::Ensemble),
            other => Err(format!("unknown decision rule '{other}'")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionOutput {
    pub distribution: ProbVec,
    /// Relative interval position; only set by the intersection rule.
    pub beta: Option<f64>,
    pub rule: Rule,
    pub hard_label: usize,
}

impl DecisionOutput {
    fn new(distribution: ProbVec, beta: Option<f64>, rule: Rule) -> Self {
        let hard_label = hard_decision(&distribution);
        DecisionOutput {
            distribution,
            beta,
            rule,
            hard_label,
        }
    }
}

pub fn intersection_probability(bounds: &CredalBounds) -> Result<DecisionOutput> {
    bounds.validate()?;
    let width: f64 = bounds
        .lower
        .iter()
        .zip(&bounds.upper)
        .map(|(l, u)| u - l)
        .sum();
    let (q, beta) = if width > DEGENERATE_WIDTH {
        let lower_sum: f64 = bounds.lower.iter().sum();
        let beta = ((1.0 - lower_sum) / width).clamp(0.0, 1.0);
        let q: Vec<f64> = bounds
            .lower
            .iter()
            .zip(&bounds.upper)
            .map(|(l, u)| l + beta * (u - l))
            .collect();
        (q, beta)
    } else {
        (bounds.lower.clone(), 0.0)
    };
    Ok(DecisionOutput::new(
        ProbVec::new(&q)?,
        Some(beta),
        Rule::Intersection,
    ))
}

/// The member of largest Shannon entropy; ties go to the lexicographically
/// smallest member.
pub fn max_entropy_member(set: &CredalSet) -> DecisionOutput {
    let mut best: Option<(&ProbVec, f64)> = None;
    for q in set.members() {
        let h = shannon_entropy(q);
        best = match best {
            Some((b, bh)) if bh > h || (bh == h && b.as_slice() <= q.as_slice()) => Some((b, bh)),
            _ => Some((q, h)),
        };
    }
    // members() always yields at least the center
    let (q, _) = best.expect("credal set has no members");
    DecisionOutput::new(q.clone(), None, Rule::MaxEntropy)
}

/// Coordinate-wise mean of the members.
pub fn ensemble_member(set: &CredalSet) -> DecisionOutput {
    let k = set.center().k();
    let mut acc = vec![0.0; k];
    let mut n = 0usize;
    for q in set.members() {
        for (a, &v) in acc.iter_mut().zip(q.as_slice()) {
            *a += v;
        }
        n += 1;
    }
    for a in &mut acc {
        *a /= n as f64;
    }
    let q = ProbVec::new(&acc).expect("mean of distributions is a distribution");
    DecisionOutput::new(q, None, Rule::Ensemble)
}

/// Argmax class, smallest index on ties.
pub fn hard_decision(q: &ProbVec) -> usize {
    q.argmax()
}
