//! Coverage, inefficiency, accuracy and expected calibration error.
//!
//! ECE bins confidence `r = max_y q_y` into `((m−1)/M, m/M]` (with `r = 0`
//! in the first bin) and sums `|B_m|/n · |acc(B_m) − conf(B_m)|`. Empty
//! bins contribute nothing and report zero confidence and accuracy.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::conformal::{CalibrationPair, ThresholdArtifact};
use crate::credal::{CredalBuilder, Representation};
use crate::decision::{hard_decision, Rule};
use crate::divergence::divergence;
use crate::error::{Error, Result};
use crate::simplex::ProbVec;

pub const DEFAULT_BINS: usize = 10;

/// Reliability-bin detail and the resulting ECE.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EceReport {
    pub bins: usize,
    pub bin_counts: Vec<usize>,
    pub bin_conf: Vec<f64>,
    pub bin_acc: Vec<f64>,
    pub ece: f64,
}

impl EceReport {
    pub fn n(&self) -> usize {
        self.bin_counts.iter().sum()
    }

    /// `bin,count,conf,acc` rows, bins numbered from 1.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("bin,count,conf,acc\n");
        for m in 0..self.bins {
            out.push_str(&format!(
                "{},{},{},{}\n",
                m + 1,
                self.bin_counts[m],
                self.bin_conf[m],
                self.bin_acc[m]
            ));
        }
        out
    }
}

/// Bin index in `0..bins` for confidence `r`.
fn bin_index(r: f64, bins: usize) -> usize {
    let x = r * bins as f64;
    let nearest = x.round();
    // Snap r = m/M onto its closed right edge despite rounding in r * M.
    let upper = if (x - nearest).abs() < 1e-9 {
        nearest
    } else {
        x.ceil()
    };
    (upper as usize).clamp(1, bins) - 1
}

pub fn ece(predictions: &[(ProbVec, usize)], bins: usize) -> Result<EceReport> {
    if predictions.is_empty() {
        return Err(Error::EmptyInput);
    }
    if bins < 1 {
        return Err(Error::InvalidArgument("ECE needs at least one bin".into()));
    }
    let mut counts = vec![0usize; bins];
    let mut conf_sum = vec![0.0; bins];
    let mut hits = vec![0usize; bins];
    for (q, label) in predictions {
        if *label >= q.k() {
            return Err(Error::LabelOutOfRange {
                label: *label,
                k: q.k(),
            });
        }
        let r = q.max_prob();
        let m = bin_index(r, bins);
        counts[m] += 1;
        conf_sum[m] += r;
        if hard_decision(q) == *label {
            hits[m] += 1;
        }
    }
    let n = predictions.len() as f64;
    let mut bin_conf = vec![0.0; bins];
    let mut bin_acc = vec![0.0; bins];
    let mut total = 0.0;
    for m in 0..bins {
        if counts[m] == 0 {
            continue;
        }
        let c = counts[m] as f64;
        bin_conf[m] = conf_sum[m] / c;
        bin_acc[m] = hits[m] as f64 / c;
        total += c / n * (bin_acc[m] - bin_conf[m]).abs();
    }
    Ok(EceReport {
        bins,
        bin_counts: counts,
        bin_conf,
        bin_acc,
        ece: total,
    })
}

fn check_pairs(pairs: &[CalibrationPair], artifact: &ThresholdArtifact) -> Result<()> {
    let first = pairs.first().ok_or(Error::EmptyInput)?;
    artifact.validate()?;
    artifact.check_compatible(first.k(), None)?;
    if let Some(p) = pairs.iter().find(|p| p.k() != artifact.k) {
        return Err(Error::ConfigMismatch(format!(
            "record {} has K = {}, artifact has K = {}",
            p.x_id,
            p.k(),
            artifact.k
        )));
    }
    Ok(())
}

/// Fraction of pairs whose cloud distribution lies in the credal set of the
/// edge prediction, tested exactly via `D(cloud ‖ edge) ≤ γ`.
pub fn coverage_rate(pairs: &[CalibrationPair], artifact: &ThresholdArtifact) -> Result<f64> {
    check_pairs(pairs, artifact)?;
    let covered = pairs
        .par_iter()
        .map(|p| divergence(&artifact.divergence, &p.cloud, &p.edge).map(|d| d <= artifact.gamma))
        .collect::<Result<Vec<bool>>>()?
        .into_iter()
        .filter(|&c| c)
        .count();
    Ok(covered as f64 / pairs.len() as f64)
}

/// Aggregates of one evaluation run, with the configuration echoed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub n_test: usize,
    pub coverage: f64,
    pub inefficiency_mean: f64,
    pub accuracy: f64,
    pub ece: EceReport,
    /// Metrics of the raw edge predictions on the same inputs.
    pub edge_accuracy: f64,
    pub edge_ece: f64,
    pub rule: Rule,
    pub epsilon: f64,
    #[serde(with = "crate::ext_real")]
    pub gamma: f64,
    pub alpha: f64,
    pub floor: f64,
    pub bins: usize,
    pub representation: Representation,
}

pub fn evaluate(
    pairs: &[CalibrationPair],
    artifact: &ThresholdArtifact,
    rule: Rule,
    representation: Representation,
    bins: usize,
) -> Result<EvalReport> {
    let mut reports = evaluate_rules(pairs, artifact, &[rule], representation, bins)?;
    Ok(reports.remove(0))
}

/// Evaluates several decision rules on one pass over the credal sets.
pub fn evaluate_rules(
    pairs: &[CalibrationPair],
    artifact: &ThresholdArtifact,
    rules: &[Rule],
    representation: Representation,
    bins: usize,
) -> Result<Vec<EvalReport>> {
    check_pairs(pairs, artifact)?;
    if rules.is_empty() {
        return Err(Error::InvalidArgument("no decision rules requested".into()));
    }
    let labels = pairs
        .iter()
        .map(|p| {
            p.label.ok_or_else(|| Error::MissingLabel {
                x_id: p.x_id.clone(),
            })
        })
        .collect::<Result<Vec<usize>>>()?;
    let builder = CredalBuilder::new(artifact.k, artifact.divergence, representation)?;

    struct PerInput {
        covered: bool,
        inefficiency: f64,
        decisions: Vec<ProbVec>,
    }
    let per_input = pairs
        .par_iter()
        .map(|p| {
            let set = builder.build_from_artifact(&p.edge, artifact)?;
            let covered = set.contains(&p.cloud)?;
            let decisions = rules
                .iter()
                .map(|r| r.apply(&set).map(|d| d.distribution))
                .collect::<Result<Vec<_>>>()?;
            Ok(PerInput {
                covered,
                inefficiency: set.inefficiency(),
                decisions,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let n = pairs.len() as f64;
    let coverage = per_input.iter().filter(|r| r.covered).count() as f64 / n;
    let inefficiency_mean = per_input.iter().map(|r| r.inefficiency).sum::<f64>() / n;
    let edge_preds: Vec<(ProbVec, usize)> = pairs
        .iter()
        .zip(&labels)
        .map(|(p, &y)| (p.edge.clone(), y))
        .collect();
    let edge = ece(&edge_preds, bins)?;
    let edge_accuracy = accuracy(&edge_preds);

    rules
        .iter()
        .enumerate()
        .map(|(i, &rule)| {
            let preds: Vec<(ProbVec, usize)> = per_input
                .iter()
                .zip(&labels)
                .map(|(r, &y)| (r.decisions[i].clone(), y))
                .collect();
            Ok(EvalReport {
                n_test: pairs.len(),
                coverage,
                inefficiency_mean,
                accuracy: accuracy(&preds),
                ece: ece(&preds, bins)?,
                edge_accuracy,
                edge_ece: edge.ece,
                rule,
                epsilon: artifact.epsilon,
                gamma: artifact.gamma,
                alpha: artifact.divergence.alpha,
                floor: artifact.divergence.floor,
                bins,
                representation,
            })
        })
        .collect()
}

/// Fraction of predictions whose argmax equals the label.
pub fn accuracy(predictions: &[(ProbVec, usize)]) -> f64 {
    if predictions.is_empty() {
        return 0.0;
    }
    let hits = predictions
        .iter()
        .filter(|(q, y)| hard_decision(q) == *y)
        .count();
    hits as f64 / predictions.len() as f64
}
