//! Offline phase: nonconformity scores on cloud-labelled calibration data and
//! the split-conformal radius.
//!
//! Each calibration input `x_i` carries the edge prediction `p(·|x_i)` and the
//! cloud soft label `p*(·|x_i)`. Its score is `s_i = D(p*(·|x_i) ‖ p(·|x_i))`.
//! The radius `γ` is the `⌈(1 + n)(1 − ε)⌉`-th smallest score, or `+∞` when
//! that rank exceeds `n`. Under exchangeability of calibration and test
//! inputs this yields `Pr[p*(·|x) ∈ Γ(x)] ≥ 1 − ε`.

use chrono::{SecondsFormat, Utc};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::divergence::{divergence, DivergenceSpec};
use crate::error::{Error, Result};
use crate::simplex::ProbVec;

/// One input of the calibration or test set.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationPair {
    pub x_id: String,
    pub edge: ProbVec,
    pub cloud: ProbVec,
    /// Ground-truth class, only used by the metrics.
    pub label: Option<usize>,
}

impl CalibrationPair {
    pub fn new(
        x_id: impl Into<String>,
        edge: ProbVec,
        cloud: ProbVec,
        label: Option<usize>,
    ) -> Result<Self> {
        edge.check_same_k(&cloud)?;
        if let Some(label) = label {
            if label >= edge.k() {
                return Err(Error::LabelOutOfRange { label, k: edge.k() });
            }
        }
        Ok(CalibrationPair {
            x_id: x_id.into(),
            edge,
            cloud,
            label,
        })
    }

    pub fn k(&self) -> usize {
        self.edge.k()
    }

    /// `D(cloud ‖ edge)`.
    pub fn score(&self, spec: &DivergenceSpec) -> Result<f64> {
        divergence(spec, &self.cloud, &self.edge)
    }
}

/// Calibration scores sorted ascending, with the configuration that
/// produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreSet {
    scores: Vec<f64>,
    k: usize,
    divergence: DivergenceSpec,
}

impl ScoreSet {
    /// Wraps precomputed scores (sorted here) for a `k`-class problem.
    pub fn from_scores(mut scores: Vec<f64>, k: usize, divergence: DivergenceSpec) -> Result<Self> {
        if scores.is_empty() {
            return Err(Error::EmptyCalibrationSet);
        }
        if let Some(bad) = scores.iter().find(|s| s.is_nan() || **s < 0.0) {
            return Err(Error::InvalidArgument(format!(
                "scores must be non-negative, got {bad}"
            )));
        }
        scores.sort_by(f64::total_cmp);
        Ok(ScoreSet {
            scores,
            k,
            divergence,
        })
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn n_cal(&self) -> usize {
        self.scores.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn divergence(&self) -> &DivergenceSpec {
        &self.divergence
    }
}

/// Scores every pair as `D(cloud ‖ edge)`.
pub fn score_pairs(pairs: &[CalibrationPair], spec: &DivergenceSpec) -> Result<ScoreSet> {
    let first = pairs.first().ok_or(Error::EmptyCalibrationSet)?;
    spec.validate()?;
    let k = first.k();
    if let Some(p) = pairs.iter().find(|p| p.k() != k) {
        return Err(Error::DimensionMismatch {
            left: k,
            right: p.k(),
        });
    }
    let scores = pairs
        .par_iter()
        .map(|p| p.score(spec))
        .collect::<Result<Vec<_>>>()?;
    ScoreSet::from_scores(scores, k, *spec)
}

/// `⌈(1 + n)(1 − ε)⌉`. Products within `1e-9` of an integer are snapped to it
/// so that decimal inputs such as `ε = 0.1` give the intended rank.
pub fn conformal_rank(n_cal: usize, epsilon: f64) -> Result<usize> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidEpsilon(epsilon));
    }
    let x = (1 + n_cal) as f64 * (1.0 - epsilon);
    let nearest = x.round();
    let rank = if (x - nearest).abs() < 1e-9 {
        nearest
    } else {
        x.ceil()
    };
    Ok((rank as usize).max(1))
}

/// The radius threshold together with its provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdArtifact {
    #[serde(with = "crate::ext_real")]
    pub gamma: f64,
    pub epsilon: f64,
    pub n_cal: usize,
    pub rank: usize,
    pub divergence: DivergenceSpec,
    #[serde(rename = "K")]
    pub k: usize,
    pub created_at: String,
}

impl ThresholdArtifact {
    pub fn is_full_simplex(&self) -> bool {
        self.gamma == f64::INFINITY
    }

    pub fn with_created_at(mut self, created_at: impl Into<String>) -> Self {
        self.created_at = created_at.into();
        self
    }

    /// Rejects use with data of a different class count or with a different
    /// divergence than the one calibrated.
    pub fn check_compatible(&self, k: usize, spec: Option<&DivergenceSpec>) -> Result<()> {
        if k != self.k {
            return Err(Error::ConfigMismatch(format!(
                "artifact was calibrated for K = {}, data has K = {k}",
                self.k
            )));
        }
        if let Some(spec) = spec {
            if spec != &self.divergence {
                return Err(Error::ConfigMismatch(format!(
                    "artifact divergence {:?} differs from requested {:?}",
                    self.divergence, spec
                )));
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::InvalidEpsilon(self.epsilon));
        }
        if self.gamma.is_nan() || self.gamma < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "gamma must be non-negative, got {}",
                self.gamma
            )));
        }
        if self.k < 2 {
            return Err(Error::TooFewClasses { got: self.k });
        }
        self.divergence.validate()
    }
}

/// Current time in RFC 3339, second precision.
pub fn timestamp_now() -> String {
    Utc::now().to_rfc3339_opts(SecondsFormat::Secs, true)
}

/// Split-conformal threshold; `+∞` when the rank exceeds `n_cal`.
pub fn conformal_threshold(scores: &ScoreSet, epsilon: f64) -> Result<ThresholdArtifact> {
    let n_cal = scores.n_cal();
    let rank = conformal_rank(n_cal, epsilon)?;
    let gamma = if rank <= n_cal {
        scores.scores[rank - 1]
    } else {
        f64::INFINITY
    };
    Ok(ThresholdArtifact {
        gamma,
        epsilon,
        n_cal,
        rank,
        divergence: scores.divergence,
        k: scores.k,
        created_at: timestamp_now(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pv(v: &[f64]) -> ProbVec {
        ProbVec::new(v).unwrap()
    }

    fn scores(v: Vec<f64>) -> ScoreSet {
        ScoreSet::from_scores(v, 3, DivergenceSpec::kl()).unwrap()
    }

    /// Sort a copy, find the smallest integer `r` with `r >= (n+1)(1-ε)` by
    /// counting up, and index.
    fn sort_oracle(raw: &[f64], epsilon: f64) -> f64 {
        let mut v = raw.to_vec();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let target = (raw.len() + 1) as f64 * (1.0 - epsilon);
        let mut r = 0usize;
        while (r as f64) < target - 1e-9 {
            r += 1;
        }
        if r > v.len() {
            f64::INFINITY
        } else {
            v[r - 1]
        }
    }

    #[test]
    fn identical_pair_scores_zero() {
        let p = pv(&[0.2, 0.3, 0.5]);
        let pair = CalibrationPair::new("a", p.clone(), p, None).unwrap();
        let s = score_pairs(&[pair], &DivergenceSpec::kl()).unwrap();
        assert_eq!(s.scores(), &[0.0]);
    }

    #[test]
    fn scores_are_sorted() {
        let s = scores(vec![0.3, 0.1, 0.2]);
        assert_eq!(s.scores(), &[0.1, 0.2, 0.3]);
    }

    #[test]
    fn score_argument_order_is_cloud_then_edge() {
        let pair =
            CalibrationPair::new("a", pv(&[0.5, 0.3, 0.2]), pv(&[0.7, 0.2, 0.1]), None).unwrap();
        let s = score_pairs(&[pair], &DivergenceSpec::kl()).unwrap();
        let expected = 0.7 * 1.4f64.ln() + 0.2 * (2.0f64 / 3.0).ln() + 0.1 * 0.5f64.ln();
        assert!((s.scores()[0] - expected).abs() < 1e-15);
    }

    #[test]
    fn score_errors() {
        assert_eq!(
            score_pairs(&[], &DivergenceSpec::kl()),
            Err(Error::EmptyCalibrationSet)
        );
        let a = CalibrationPair::new("a", pv(&[0.5, 0.5]), pv(&[0.5, 0.5]), None).unwrap();
        let b =
            CalibrationPair::new("b", pv(&[0.2, 0.3, 0.5]), pv(&[0.2, 0.3, 0.5]), None).unwrap();
        assert!(matches!(
            score_pairs(&[a, b], &DivergenceSpec::kl()),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(CalibrationPair::new("c", pv(&[0.5, 0.5]), pv(&[0.2, 0.3, 0.5]), None).is_err());
        assert!(CalibrationPair::new("c", pv(&[0.5, 0.5]), pv(&[0.5, 0.5]), Some(2)).is_err());
    }

    #[test]
    fn threshold_examples() {
        let s = scores((1..=9).map(|i| i as f64 / 10.0).collect());
        let t = conformal_threshold(&s, 0.1).unwrap();
        assert_eq!(t.rank, 9);
        assert_eq!(t.gamma, 0.9);

        let t = conformal_threshold(&scores(vec![0.1, 0.2, 0.3, 0.4]), 0.1).unwrap();
        assert_eq!(t.rank, 5);
        assert_eq!(t.gamma, f64::INFINITY);
        assert!(t.is_full_simplex());

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let raw: Vec<f64> = (0..99).map(|_| rng.random::<f64>()).collect();
        let t = conformal_threshold(&scores(raw.clone()), 0.1).unwrap();
        assert_eq!(t.rank, 90);
        assert_eq!(t.gamma, sort_oracle(&raw, 0.1));
    }

    #[test]
    fn invalid_epsilon() {
        let s = scores(vec![0.1]);
        for eps in [0.0, 1.0, -0.5, f64::NAN] {
            assert!(matches!(
                conformal_threshold(&s, eps),
                Err(Error::InvalidEpsilon(_))
            ));
        }
    }

    #[test]
    fn threshold_matches_sort_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..1000 {
            let n = rng.random_range(1..300);
            let raw: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 3.0).collect();
            let eps = rng.random_range(0.005..0.995);
            let t = conformal_threshold(&scores(raw.clone()), eps).unwrap();
            assert_eq!(t.gamma, sort_oracle(&raw, eps));
        }
    }

    #[test]
    fn monotone_in_epsilon() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let s = scores((0..200).map(|_| rng.random::<f64>()).collect());
        let mut prev = f64::INFINITY;
        for i in 1..100 {
            let g = conformal_threshold(&s, i as f64 / 100.0).unwrap().gamma;
            assert!(g <= prev);
            prev = g;
        }
    }

    #[test]
    fn ties_do_not_reduce_coverage() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let n_cal = 50;
        let eps = 0.2;
        let trials = 4000;
        let mut covered = 0;
        for _ in 0..trials {
            let draw = |rng: &mut ChaCha8Rng| rng.random_range(0..5) as f64;
            let raw: Vec<f64> = (0..n_cal).map(|_| draw(&mut rng)).collect();
            let g = conformal_threshold(&scores(raw), eps).unwrap().gamma;
            if draw(&mut rng) <= g {
                covered += 1;
            }
        }
        assert!(covered as f64 / trials as f64 >= 1.0 - eps);
    }

    #[test]
    fn exchangeable_coverage_simulation() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let trials = 2000;
        let mut covered = 0;
        for _ in 0..trials {
            let raw: Vec<f64> = (0..100).map(|_| -rng.random::<f64>().ln()).collect();
            let g = conformal_threshold(&scores(raw), 0.1).unwrap().gamma;
            if -rng.random::<f64>().ln() <= g {
                covered += 1;
            }
        }
        let rate = covered as f64 / trials as f64;
        assert!((0.895..=0.93).contains(&rate), "coverage {rate}");
    }

    #[test]
    fn infinite_scores_sort_last() {
        let s = scores(vec![f64::INFINITY, 0.5, 0.1]);
        assert_eq!(s.scores(), &[0.1, 0.5, f64::INFINITY]);
        assert!(ScoreSet::from_scores(vec![-1.0], 2, DivergenceSpec::kl()).is_err());
    }

    #[test]
    fn artifact_json_shape() {
        let t = conformal_threshold(&scores(vec![0.1, 0.2]), 0.5)
            .unwrap()
            .with_created_at("2026-01-01T00:00:00Z");
        let v: serde_json::Value = serde_json::to_value(&t).unwrap();
        assert_eq!(v["K"], 3);
        assert_eq!(v["rank"], 2);
        assert_eq!(v["divergence"]["family"], "alpha");
        let inf = ThresholdArtifact {
            gamma: f64::INFINITY,
            ..t.clone()
        };
        let s = serde_json::to_string(&inf).unwrap();
        assert!(s.contains(r#""gamma":"inf""#));
        let back: ThresholdArtifact = serde_json::from_str(&s).unwrap();
        assert_eq!(back, inf);
    }

    #[test]
    fn compatibility_checks() {
        let t = conformal_threshold(&scores(vec![0.1]), 0.5).unwrap();
        assert!(t.check_compatible(3, Some(&DivergenceSpec::kl())).is_ok());
        assert!(matches!(
            t.check_compatible(4, None),
            Err(Error::ConfigMismatch(_))
        ));
        let other = DivergenceSpec::alpha(2.0).unwrap();
        assert!(matches!(
            t.check_compatible(3, Some(&other)),
            Err(Error::ConfigMismatch(_))
        ));
    }
}
