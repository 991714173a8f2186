//! Grid sweeps over miscoverage rate, divergence order, seed and rule.

use std::path::{Path, PathBuf};

use cdci_core::metrics::{evaluate_rules, DEFAULT_BINS};
use cdci_core::synth::{generate, SyntheticConfig};
use cdci_core::{
    conformal_threshold, score_pairs, CalibrationPair, DivergenceSpec, Representation, Rule,
};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::records::{read_json, read_pairs, write_atomic};

/// Where the calibration and test pairs come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepData {
    /// Fresh synthetic pairs per seed; the first `n_cal` calibrate.
    Synthetic {
        #[serde(default)]
        config: SyntheticConfig,
        n_cal: usize,
        n_test: usize,
    },
    /// Fixed files; the seed only drives Monte Carlo representations.
    Files { calibration: PathBuf, test: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub epsilons: Vec<f64>,
    pub alphas: Vec<f64>,
    pub seeds: Vec<u64>,
    pub rules: Vec<Rule>,
    /// Output CSV; relative paths are resolved against the spec file.
    pub output: PathBuf,
    pub data: SweepData,
    #[serde(default)]
    pub representation: Option<Representation>,
    #[serde(default = "default_bins")]
    pub bins: usize,
    #[serde(default = "default_floor")]
    pub floor: f64,
}

fn default_bins() -> usize {
    DEFAULT_BINS
}

fn default_floor() -> f64 {
    cdci_core::divergence::DEFAULT_FLOOR
}

impl SweepSpec {
    pub fn validate(&self) -> CliResult<()> {
        for (name, empty) in [
            ("epsilons", self.epsilons.is_empty()),
            ("alphas", self.alphas.is_empty()),
            ("seeds", self.seeds.is_empty()),
            ("rules", self.rules.is_empty()),
        ] {
            if empty {
                return Err(CliError::Config(format!("sweep list '{name}' is empty")));
            }
        }
        if let SweepData::Synthetic { n_cal, n_test, .. } = &self.data {
            if *n_cal == 0 || *n_test == 0 {
                return Err(CliError::Config("n_cal and n_test must be positive".into()));
            }
        }
        Ok(())
    }
}

/// One line of the long-form sweep table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub epsilon: f64,
    pub alpha: f64,
    pub rule: Rule,
    pub seed: u64,
    pub coverage: Option<f64>,
    pub inefficiency: Option<f64>,
    pub ece: Option<f64>,
    pub accuracy: Option<f64>,
    pub error: String,
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

/// Runs every configuration in memory and returns the rows.
pub fn run_sweep(spec: &SweepSpec, base_dir: &Path) -> CliResult<Vec<SweepRow>> {
    spec.validate()?;
    let files = match &spec.data {
        SweepData::Files { calibration, test } => Some((
            read_pairs(&resolve(base_dir, calibration))?,
            read_pairs(&resolve(base_dir, test))?,
        )),
        SweepData::Synthetic { .. } => None,
    };

    let mut rows = Vec::new();
    for &seed in &spec.seeds {
        let owned;
        let (cal, test): (&[CalibrationPair], &[CalibrationPair]) = match (&spec.data, &files) {
            (_, Some((c, t))) => (c, t),
            (
                SweepData::Synthetic {
                    config,
                    n_cal,
                    n_test,
                },
                None,
            ) => {
                let cfg = SyntheticConfig {
                    n: n_cal + n_test,
                    seed,
                    ..config.clone()
                };
                owned = generate(&cfg)?;
                owned.split_at(*n_cal)
            }
            (SweepData::Files { .. }, None) => unreachable!("files are loaded above"),
        };
        let k = cal[0].k();
        let representation = match spec.representation {
            Some(Representation::MonteCarlo { samples, .. }) => {
                Representation::MonteCarlo { samples, seed }
            }
            Some(r) => r,
            None => Representation::default_for(k, seed),
        };
        for &epsilon in &spec.epsilons {
            for &alpha in &spec.alphas {
                let result = DivergenceSpec::new(alpha, spec.floor)
                    .and_then(|div| score_pairs(cal, &div))
                    .and_then(|scores| conformal_threshold(&scores, epsilon))
                    .and_then(|art| {
                        evaluate_rules(test, &art, &spec.rules, representation, spec.bins)
                    });
                match result {
                    Ok(reports) => rows.extend(reports.into_iter().map(|r| SweepRow {
                        epsilon,
                        alpha,
                        rule: r.rule,
                        seed,
                        coverage: Some(r.coverage),
                        inefficiency: Some(r.inefficiency_mean),
                        ece: Some(r.ece.ece),
                        accuracy: Some(r.accuracy),
                        error: String::new(),
                    })),
                    Err(e) => rows.extend(spec.rules.iter().map(|&rule| SweepRow {
                        epsilon,
                        alpha,
                        rule,
                        seed,
                        coverage: None,
                        inefficiency: None,
                        ece: None,
                        accuracy: None,
                        error: e.to_string(),
                    })),
                }
            }
        }
    }
    Ok(rows)
}

pub fn rows_to_csv(rows: &[SweepRow]) -> CliResult<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)
            .map_err(|e| CliError::Data(e.to_string()))?;
    }
    w.into_inner().map_err(|e| CliError::Data(e.to_string()))
}

/// Loads the spec, runs it and writes the CSV. Fails only when every row
/// failed.
pub fn cmd_sweep(spec_path: &Path) -> CliResult<Vec<SweepRow>> {
    let spec: SweepSpec = read_json(spec_path)?;
    let base = spec_path.parent().unwrap_or(Path::new("."));
    let rows = run_sweep(&spec, base)?;
    write_atomic(&resolve(base, &spec.output), &rows_to_csv(&rows)?)?;
    let failed = rows.iter().filter(|r| !r.error.is_empty()).count();
    if failed == rows.len() {
        return Err(CliError::Data(format!("all {failed} sweep rows failed")));
    }
    if failed > 0 {
        eprintln!("warning: {failed} of {} sweep rows failed", rows.len());
    }
    Ok(rows)
}
