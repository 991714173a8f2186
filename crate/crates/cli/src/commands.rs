//! The `calibrate`, `predict`, `evaluate` and `synth` commands.

use std::path::{Path, PathBuf};

use cdci_core::conformal::timestamp_now;
use cdci_core::metrics::{evaluate, DEFAULT_BINS};
use cdci_core::synth::{generate, SyntheticConfig};
use cdci_core::{
    conformal_threshold, score_pairs, CredalBuilder, DivergenceSpec, EvalReport, Representation,
    Rule, ThresholdArtifact,
};
use chrono::{DateTime, SecondsFormat};
use clap::Args;

use crate::error::{CliError, CliResult};
use crate::records::{
    read_edges, read_json, read_pairs, write_atomic, write_json, write_jsonl, CredalSummary,
    PairRecord,
};

/// Simplex representation flags shared by `predict` and `evaluate`.
#[derive(Debug, Clone, Default, Args)]
pub struct RepresentationArgs {
    /// Lattice resolution N (default 100 for K <= 4).
    #[arg(long, conflicts_with = "mc")]
    pub grid: Option<usize>,
    /// Number of uniform Monte Carlo points (default 200000 for K > 4).
    #[arg(long)]
    pub mc: Option<usize>,
    /// Seed of the Monte Carlo points.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl RepresentationArgs {
    pub fn resolve(&self, k: usize) -> Representation {
        match (self.grid, self.mc) {
            (Some(resolution), _) => Representation::Grid { resolution },
            (None, Some(samples)) => Representation::MonteCarlo {
                samples,
                seed: self.seed,
            },
            (None, None) => Representation::default_for(k, self.seed),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct CalibrateArgs {
    /// Calibration pairs (JSONL with edge and cloud vectors).
    pub pairs: PathBuf,
    /// Target miscoverage rate.
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    /// Order of the alpha-divergence (1 = KL).
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    /// Floor applied to denominators of the divergence.
    #[arg(long, default_value_t = cdci_core::divergence::DEFAULT_FLOOR)]
    pub floor: f64,
    /// Output artifact path.
    #[arg(long)]
    pub out: PathBuf,
    /// Timestamp recorded in the artifact. Defaults to SOURCE_DATE_EPOCH
    /// when set, otherwise the current time.
    #[arg(long)]
    pub created_at: Option<String>,
}

/// `--created-at`, then `SOURCE_DATE_EPOCH`, then the clock.
pub fn resolve_created_at(flag: Option<&str>) -> CliResult<String> {
    if let Some(s) = flag {
        return Ok(s.to_string());
    }
    match std::env::var("SOURCE_DATE_EPOCH") {
        Ok(v) => {
            let secs: i64 = v.trim().parse().map_err(|_| {
                CliError::Config(format!("SOURCE_DATE_EPOCH is not an integer: {v}"))
            })?;
            let t = DateTime::from_timestamp(secs, 0)
                .ok_or_else(|| CliError::Config(format!("SOURCE_DATE_EPOCH out of range: {v}")))?;
            Ok(t.to_rfc3339_opts(SecondsFormat::Secs, true))
        }
        Err(_) => Ok(timestamp_now()),
    }
}

pub fn cmd_calibrate(args: &CalibrateArgs) -> CliResult<ThresholdArtifact> {
    let spec = DivergenceSpec::new(args.alpha, args.floor)?;
    if !(args.epsilon > 0.0 && args.epsilon < 1.0) {
        return Err(cdci_core::Error::InvalidEpsilon(args.epsilon).into());
    }
    let created_at = resolve_created_at(args.created_at.as_deref())?;
    let pairs = read_pairs(&args.pairs)?;
    let scores = score_pairs(&pairs, &spec)?;
    let artifact = conformal_threshold(&scores, args.epsilon)?.with_created_at(created_at);
    write_json(&args.out, &artifact)?;
    println!(
        "n_cal={} rank={} gamma={}",
        artifact.n_cal,
        artifact.rank,
        format_gamma(artifact.gamma)
    );
    if artifact.is_full_simplex() {
        eprintln!(
            "warning: rank {} exceeds n_cal = {}; the credal set is the whole simplex",
            artifact.rank, artifact.n_cal
        );
    }
    Ok(artifact)
}

fn format_gamma(gamma: f64) -> String {
    if gamma.is_infinite() {
        "inf".into()
    } else {
        gamma.to_string()
    }
}

pub fn load_artifact(path: &Path) -> CliResult<ThresholdArtifact> {
    let artifact: ThresholdArtifact = read_json(path)?;
    artifact.validate()?;
    Ok(artifact)
}

#[derive(Debug, Clone, Args)]
pub struct PredictArgs {
    /// Inputs (JSONL; only the edge vectors are used).
    pub edges: PathBuf,
    #[arg(long)]
    pub artifact: PathBuf,
    /// Decision rule: intersection, max_entropy or ensemble.
    #[arg(long, default_value = "intersection")]
    pub rule: Rule,
    #[command(flatten)]
    pub representation: RepresentationArgs,
    /// Output summaries (JSONL).
    #[arg(long)]
    pub out: PathBuf,
}

pub fn cmd_predict(args: &PredictArgs) -> CliResult<Vec<CredalSummary>> {
    let artifact = load_artifact(&args.artifact)?;
    let edges = read_edges(&args.edges)?;
    for (_, edge) in &edges {
        artifact.check_compatible(edge.k(), None)?;
    }
    let builder = CredalBuilder::new(
        artifact.k,
        artifact.divergence,
        args.representation.resolve(artifact.k),
    )?;
    let summaries = edges
        .into_iter()
        .map(|(x_id, edge)| {
            let set = builder.build_from_artifact(&edge, &artifact)?;
            let decision = args.rule.apply(&set)?;
            Ok(CredalSummary::new(
                x_id,
                set.gamma(),
                set.bounds(),
                set.inefficiency(),
                set.member_count(),
                decision,
            ))
        })
        .collect::<cdci_core::Result<Vec<_>>>()?;
    write_jsonl(&args.out, &summaries)?;
    Ok(summaries)
}

#[derive(Debug, Clone, Args)]
pub struct EvaluateArgs {
    /// Test pairs (JSONL with edge, cloud and label).
    pub pairs: PathBuf,
    #[arg(long)]
    pub artifact: PathBuf,
    #[arg(long, default_value = "intersection")]
    pub rule: Rule,
    /// Number of ECE bins.
    #[arg(long, default_value_t = DEFAULT_BINS)]
    pub bins: usize,
    #[command(flatten)]
    pub representation: RepresentationArgs,
    /// Output report (JSON).
    #[arg(long)]
    pub out: PathBuf,
    /// Reliability-diagram CSV; defaults to the report path with a
    /// `.reliability.csv` extension.
    #[arg(long)]
    pub reliability: Option<PathBuf>,
}

impl EvaluateArgs {
    pub fn reliability_path(&self) -> PathBuf {
        self.reliability
            .clone()
            .unwrap_or_else(|| self.out.with_extension("reliability.csv"))
    }
}

pub fn cmd_evaluate(args: &EvaluateArgs) -> CliResult<EvalReport> {
    let artifact = load_artifact(&args.artifact)?;
    let pairs = read_pairs(&args.pairs)?;
    let report = evaluate(
        &pairs,
        &artifact,
        args.rule,
        args.representation.resolve(artifact.k),
        args.bins,
    )?;
    write_json(&args.out, &report)?;
    write_atomic(&args.reliability_path(), report.ece.to_csv().as_bytes())?;
    println!(
        "coverage={} inefficiency={} accuracy={} ece={} edge_ece={}",
        report.coverage, report.inefficiency_mean, report.accuracy, report.ece.ece, report.edge_ece
    );
    Ok(report)
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Dirichlet concentration of the true class distributions.
    #[arg(long, default_value_t = 1.0)]
    pub concentration: f64,
    /// Logit noise of the cloud model.
    #[arg(long, default_value_t = 0.2)]
    pub cloud_noise: f64,
    /// Logit noise of the edge model (at least the cloud noise).
    #[arg(long, default_value_t = 1.0)]
    pub edge_noise: f64,
    /// Edge softmax temperature; below 1 makes the edge overconfident.
    #[arg(long, default_value_t = 1.0)]
    pub temperature: f64,
    #[arg(long)]
    pub out: PathBuf,
}

impl SynthArgs {
    pub fn config(&self) -> SyntheticConfig {
        SyntheticConfig {
            k: self.k,
            n: self.n,
            seed: self.seed,
            concentration: self.concentration,
            cloud_noise: self.cloud_noise,
            edge_noise: self.edge_noise,
            edge_temperature: self.temperature,
        }
    }
}

pub fn cmd_synth(args: &SynthArgs) -> CliResult<usize> {
    let pairs = generate(&args.config())?;
    let records: Vec<PairRecord> = pairs.iter().map(PairRecord::from).collect();
    write_jsonl(&args.out, &records)?;
    Ok(records.len())
}
