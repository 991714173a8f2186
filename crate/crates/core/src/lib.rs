//! Conformal credal sets around an edge classifier's predictions.
//!
//! Offline, calibration inputs scored by `D(cloud ‖ edge)` give a radius `γ`
//! ([`conformal`]). At run time the ball `{q : D(q ‖ edge) ≤ γ}` on the
//! simplex ([`credal`]) contains the cloud prediction with probability at
//! least `1 − ε`, and is collapsed to one distribution by a decision rule
//! ([`decision`]). [`metrics`] scores coverage, set size and calibration;
//! [`laplace`] is a Bayesian baseline and [`synth`] generates test data.

pub mod conformal;
pub mod credal;
pub mod decision;
pub mod divergence;
pub mod error;
pub mod ext_real;
pub mod laplace;
pub mod metrics;
pub mod simplex;
pub mod synth;

pub use conformal::{
    conformal_threshold, score_pairs, CalibrationPair, ScoreSet, ThresholdArtifact,
};
pub use credal::{build_credal_set, CredalBounds, CredalBuilder, CredalSet, Representation};
pub use decision::{hard_decision, intersection_probability, DecisionOutput, Rule};
pub use divergence::{divergence, DivergenceSpec};
pub use error::{Error, Result};
pub use laplace::LaplaceModel;
pub use metrics::{ece, evaluate, EceReport, EvalReport};
pub use simplex::{make_probvec, ProbVec};
pub use synth::{generate, SyntheticConfig};
