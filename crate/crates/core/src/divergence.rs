//! α-divergences between distributions on the simplex.
//!
//! For `f(t) = (t^α - 1) / (α(α - 1))` the f-divergence
//! `D(q1 ‖ q2) = E_{q2}[f(q1 / q2)]` has the closed form
//!
//! ```text
//! D_α(q1 ‖ q2) = (Σ_y q1_y^α q2_y^(1-α) - 1) / (α(α - 1))
//! ```
//!
//! with the limits `α → 1` (KL(q1 ‖ q2)) and `α → 0` (KL(q2 ‖ q1))
//! evaluated by dedicated branches.
//!
//! Zero handling: entries of the second argument below the floor `δ` are
//! raised to `δ` wherever the second argument enters a denominator (the
//! `α > 0` branches), without renormalization. This keeps scores finite when
//! the edge model emits hard zeros. For `α <= 0` the first argument is the
//! one in the denominator and zeros there yield `+∞`.
//!
//! Every branch is expressed as `finish(Σ_y term(a_y, b_y))` where `a_y` only
//! depends on the first argument and `b_y` only on the second. Batch membership
//! scans in [`crate::credal`] precompute the factors but run the same
//! arithmetic, so they agree with [`divergence`] bit for bit.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simplex::ProbVec;

/// Default mass floor applied to the second argument.
pub const DEFAULT_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Alpha,
}

/// The divergence used for scoring and for credal-set membership.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DivergenceSpec {
    pub family: Family,
    pub alpha: f64,
    pub floor: f64,
}

impl Default for DivergenceSpec {
    fn default() -> Self {
        Self::kl()
    }
}

/// How each branch combines per-class factors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Kernel {
    /// `Σ q1 ln q1 - q1 ln max(q2, δ)`
    Kl { floor: f64 },
    /// `Σ q2 ln q2 - q2 ln q1`
    ReverseKl,
    /// `(Σ q1^α max(q2, δ)^(1-α) - 1) / (α(α-1))` (floor only for α > 0)
    Power { alpha: f64, floor: f64 },
}

impl DivergenceSpec {
    pub fn new(alpha: f64, floor: f64) -> Result<Self> {
        let spec = DivergenceSpec {
            family: Family::Alpha,
            alpha,
            floor,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// KL divergence (`α = 1`) with the default floor.
    pub fn kl() -> Self {
        DivergenceSpec {
            family: Family::Alpha,
            alpha: 1.0,
            floor: DEFAULT_FLOOR,
        }
    }

    pub fn alpha(alpha: f64) -> Result<Self> {
        Self::new(alpha, DEFAULT_FLOOR)
    }

    pub fn with_alpha(self, alpha: f64) -> Self {
        DivergenceSpec { alpha, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.alpha.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "alpha must be finite, got {}",
                self.alpha
            )));
        }
        if !(self.floor > 0.0 && self.floor <= 1e-6) {
            return Err(Error::InvalidArgument(format!(
                "divergence floor must lie in (0, 1e-6], got {}",
                self.floor
            )));
        }
        Ok(())
    }

    pub(crate) fn kernel(&self) -> Kernel {
        if self.alpha == 1.0 {
            Kernel::Kl { floor: self.floor }
        } else if self.alpha == 0.0 {
            Kernel::ReverseKl
        } else {
            Kernel::Power {
                alpha: self.alpha,
                floor: self.floor,
            }
        }
    }
}

impl Kernel {
    /// Factor contributed by the first argument's coordinate.
    #[inline]
    pub(crate) fn first_factor(&self, q1: f64) -> f64 {
        match *self {
            Kernel::Kl { .. } => {
                if q1 > 0.0 {
                    q1 * q1.ln()
                } else {
                    0.0
                }
            }
            Kernel::ReverseKl => q1.ln(),
            Kernel::Power { alpha, .. } => q1.powf(alpha),
        }
    }

    /// Factor contributed by the second argument's coordinate.
    #[inline]
    pub(crate) fn second_factor(&self, q2: f64) -> f64 {
        match *self {
            Kernel::Kl { floor } => q2.max(floor).ln(),
            Kernel::ReverseKl => {
                if q2 > 0.0 {
                    q2 * q2.ln()
                } else {
                    0.0
                }
            }
            Kernel::Power { alpha, floor } => {
                let q2 = if alpha > 0.0 { q2.max(floor) } else { q2 };
                q2.powf(1.0 - alpha)
            }
        }
    }

    #[inline]
    pub(crate) fn term(&self, q1: f64, a: f64, q2: f64, b: f64) -> f64 {
        match *self {
            Kernel::Kl { .. } => {
                if q1 > 0.0 {
                    a - q1 * b
                } else {
                    0.0
                }
            }
            Kernel::ReverseKl => {
                if q2 > 0.0 {
                    b - q2 * a
                } else {
                    0.0
                }
            }
            Kernel::Power { .. } => a * b,
        }
    }

    #[inline]
    pub(crate) fn finish(&self, sum: f64) -> f64 {
        let value = match *self {
            Kernel::Kl { .. } | Kernel::ReverseKl => sum,
            Kernel::Power { alpha, .. } => (sum - 1.0) / (alpha * (alpha - 1.0)),
        };
        // Rounding can leave values like -1e-17 near the minimum.
        if value.is_nan() {
            f64::INFINITY
        } else {
            value.max(0.0)
        }
    }

    /// Full evaluation from raw coordinates.
    #[inline]
    pub(crate) fn eval(&self, q1: &[f64], q2: &[f64]) -> f64 {
        if q1 == q2 {
            return 0.0;
        }
        let mut sum = 0.0;
        for (&x, &y) in q1.iter().zip(q2) {
            sum += self.term(x, self.first_factor(x), y, self.second_factor(y));
        }
        self.finish(sum)
    }

    /// Same as [`Kernel::eval`] with `first`/`second` holding the
    /// precomputed factors of `q1`/`q2`.
    #[inline]
    pub(crate) fn eval_prepared(
        &self,
        q1: &[f64],
        first: &[f64],
        q2: &[f64],
        second: &[f64],
    ) -> f64 {
        if q1 == q2 {
            return 0.0;
        }
        let mut sum = 0.0;
        for y in 0..q1.len() {
            sum += self.term(q1[y], first[y], q2[y], second[y]);
        }
        self.finish(sum)
    }
}

/// `D_α(q1 ‖ q2)`; may be `+∞` only when `α <= 0` and `q1` has zeros where
/// `q2` has mass.
pub fn divergence(spec: &DivergenceSpec, q1: &ProbVec, q2: &ProbVec) -> Result<f64> {
    q1.check_same_k(q2)?;
    Ok(spec.kernel().eval(q1.as_slice(), q2.as_slice()))
}

/// The divergence at each `α` in `alphas`, keeping the floor of `spec`.
pub fn divergence_profile(
    spec: &DivergenceSpec,
    q1: &ProbVec,
    q2: &ProbVec,
    alphas: &[f64],
) -> Result<Vec<f64>> {
    q1.check_same_k(q2)?;
    alphas
        .iter()
        .map(|&alpha| {
            let s = spec.with_alpha(alpha);
            s.validate()?;
            Ok(s.kernel().eval(q1.as_slice(), q2.as_slice()))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pv(v: &[f64]) -> ProbVec {
        ProbVec::new(v).unwrap()
    }

    /// `E_{z~q2}[f(q1(z)/q2(z))]` summed term by term.
    fn expectation_oracle(alpha: f64, q1: &[f64], q2: &[f64]) -> f64 {
        let f = |t: f64| (t.powf(alpha) - 1.0) / (alpha * (alpha - 1.0));
        q1.iter().zip(q2).map(|(&a, &b)| b * f(a / b)).sum()
    }

    fn random_interior(rng: &mut ChaCha8Rng, k: usize) -> ProbVec {
        let raw: Vec<f64> = (0..k).map(|_| 0.05 + rng.random::<f64>()).collect();
        pv(&raw)
    }

    #[test]
    fn kl_examples() {
        let kl = DivergenceSpec::kl();
        let p = pv(&[0.3, 0.7]);
        assert_eq!(divergence(&kl, &p, &p).unwrap(), 0.0);

        let q1 = pv(&[0.7, 0.2, 0.1]);
        let q2 = pv(&[0.5, 0.3, 0.2]);
        let expected = 0.7 * 1.4f64.ln() + 0.2 * (2.0f64 / 3.0).ln() + 0.1 * 0.5f64.ln();
        let d = divergence(&kl, &q1, &q2).unwrap();
        assert!((d - expected).abs() < 1e-15);
        assert!((d - 0.0851).abs() < 5e-5);
    }

    #[test]
    fn alpha_two_example() {
        let spec = DivergenceSpec::alpha(2.0).unwrap();
        let d = divergence(&spec, &pv(&[0.5, 0.5]), &pv(&[0.25, 0.75])).unwrap();
        assert!((d - 1.0 / 6.0).abs() < 1e-15, "{d}");
    }

    #[test]
    fn reverse_kl_branch() {
        let spec = DivergenceSpec::alpha(0.0).unwrap();
        let q1 = pv(&[0.7, 0.2, 0.1]);
        let q2 = pv(&[0.5, 0.3, 0.2]);
        let forward = divergence(&DivergenceSpec::kl(), &q2, &q1).unwrap();
        assert_eq!(divergence(&spec, &q1, &q2).unwrap(), forward);
        // Zero in the first argument under mass of the second.
        let d = divergence(&spec, &pv(&[1.0, 0.0]), &pv(&[0.5, 0.5])).unwrap();
        assert_eq!(d, f64::INFINITY);
    }

    #[test]
    fn dimension_mismatch() {
        let r = divergence(
            &DivergenceSpec::kl(),
            &pv(&[0.5, 0.5]),
            &pv(&[0.2, 0.3, 0.5]),
        );
        assert_eq!(r, Err(Error::DimensionMismatch { left: 2, right: 3 }));
    }

    #[test]
    fn floor_keeps_scores_finite() {
        let q1 = pv(&[0.5, 0.5]);
        let q2 = pv(&[1.0, 0.0]);
        for alpha in [1.0, 2.0, 4.0] {
            let d = divergence(&DivergenceSpec::alpha(alpha).unwrap(), &q1, &q2).unwrap();
            assert!(d.is_finite() && d > 1.0, "alpha {alpha}: {d}");
        }
        // KL with floored zero is 0.5 ln(0.5/1) + 0.5 ln(0.5/1e-12).
        let d = divergence(&DivergenceSpec::kl(), &q1, &q2).unwrap();
        let expected = 0.5 * 0.5f64.ln() + 0.5 * (0.5f64 / 1e-12).ln();
        assert!((d - expected).abs() < 1e-12);
    }

    #[test]
    fn invalid_specs() {
        assert!(DivergenceSpec::new(1.0, 0.0).is_err());
        assert!(DivergenceSpec::new(1.0, 1e-3).is_err());
        assert!(DivergenceSpec::new(f64::NAN, 1e-12).is_err());
    }

    #[test]
    fn serializes_as_documented() {
        let s = serde_json::to_string(&DivergenceSpec::alpha(2.0).unwrap()).unwrap();
        assert_eq!(s, r#"{"family":"alpha","alpha":2.0,"floor":1e-12}"#);
    }

    #[test]
    fn profile_examples() {
        let kl = DivergenceSpec::kl();
        let p = pv(&[0.2, 0.8]);
        assert_eq!(divergence_profile(&kl, &p, &p, &[1.0]).unwrap(), vec![0.0]);

        let q1 = pv(&[0.7, 0.2, 0.1]);
        let q2 = pv(&[0.5, 0.3, 0.2]);
        let klv = divergence(&kl, &q1, &q2).unwrap();
        let near = divergence_profile(&kl, &q1, &q2, &[1.0 - 1e-4, 1.0 + 1e-4]).unwrap();
        for d in near {
            assert!((d - klv).abs() < 1e-6, "{d} vs {klv}");
        }
        let vals = divergence_profile(&kl, &q1, &q2, &[0.5, 1.0, 2.0, 4.0]).unwrap();
        assert!(vals.iter().all(|d| d.is_finite() && *d > 0.0));
    }

    #[test]
    fn nonnegative_on_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for alpha in [0.5, 1.0, 2.0, 4.0] {
            let spec = DivergenceSpec::alpha(alpha).unwrap();
            for _ in 0..10_000 {
                let k = rng.random_range(2..6);
                let a: Vec<f64> = (0..k).map(|_| rng.random::<f64>()).collect();
                let b: Vec<f64> = (0..k).map(|_| rng.random::<f64>()).collect();
                let d = divergence(&spec, &pv(&a), &pv(&b)).unwrap();
                assert!(d >= 0.0);
            }
        }
    }

    #[test]
    fn closed_form_matches_expectation() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for alpha in [0.5, 2.0, 4.0, -1.0, 1.5] {
            let spec = DivergenceSpec::alpha(alpha).unwrap();
            for _ in 0..2000 {
                let q1 = random_interior(&mut rng, 4);
                let q2 = random_interior(&mut rng, 4);
                let d = divergence(&spec, &q1, &q2).unwrap();
                let o = expectation_oracle(alpha, q1.as_slice(), q2.as_slice());
                assert!((d - o).abs() < 1e-12, "alpha {alpha}: {d} vs {o}");
            }
        }
    }

    #[test]
    fn identity_and_asymmetry() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for alpha in [0.0, 0.5, 1.0, 2.0, 4.0] {
            let spec = DivergenceSpec::alpha(alpha).unwrap();
            for _ in 0..200 {
                let q = random_interior(&mut rng, 5);
                assert_eq!(divergence(&spec, &q, &q).unwrap(), 0.0);
            }
        }
        let kl = DivergenceSpec::kl();
        let a = pv(&[0.9, 0.1]);
        let b = pv(&[0.5, 0.5]);
        assert_ne!(
            divergence(&kl, &a, &b).unwrap(),
            divergence(&kl, &b, &a).unwrap()
        );
    }
}
