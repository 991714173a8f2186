//! JSONL record formats and atomic file output.

use std::fs;
use std::io::Write;
use std::path::Path;

use cdci_core::{CalibrationPair, CredalBounds, DecisionOutput, ProbVec, Rule};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// One input as stored on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairRecord {
    pub x_id: String,
    pub edge: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cloud: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<usize>,
}

impl From<&CalibrationPair> for PairRecord {
    fn from(p: &CalibrationPair) -> Self {
        PairRecord {
            x_id: p.x_id.clone(),
            edge: p.edge.as_slice().to_vec(),
            cloud: Some(p.cloud.as_slice().to_vec()),
            label: p.label,
        }
    }
}

/// A parsed record with its 1-based line number.
#[derive(Debug, Clone)]
pub struct Located<T> {
    pub line: usize,
    pub value: T,
}

fn line_error(path: &Path, line: usize, msg: impl std::fmt::Display) -> CliError {
    CliError::Data(format!("{}:{line}: {msg}", path.display()))
}

/// Reads one JSON object per non-blank line.
pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> CliResult<Vec<Located<T>>> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        if raw.trim().is_empty() {
            continue;
        }
        let value = serde_json::from_str(raw).map_err(|e| line_error(path, i + 1, e))?;
        out.push(Located { line: i + 1, value });
    }
    Ok(out)
}

pub fn read_pair_records(path: &Path) -> CliResult<Vec<Located<PairRecord>>> {
    let records = read_jsonl::<PairRecord>(path)?;
    if records.is_empty() {
        return Err(CliError::Data(format!("{}: no records", path.display())));
    }
    Ok(records)
}

/// Edge vectors only; cloud and label are ignored.
pub fn read_edges(path: &Path) -> CliResult<Vec<(String, ProbVec)>> {
    read_pair_records(path)?
        .into_iter()
        .map(|r| {
            let edge = ProbVec::new(&r.value.edge)
                .map_err(|e| line_error(path, r.line, format!("edge: {e}")))?;
            Ok((r.value.x_id, edge))
        })
        .collect()
}

/// Records that must carry a cloud vector; labels are kept when present,
/// and all records must share one class count.
pub fn read_pairs(path: &Path) -> CliResult<Vec<CalibrationPair>> {
    let records = read_pair_records(path)?;
    let mut pairs = Vec::with_capacity(records.len());
    for r in records {
        let rec = r.value;
        let at = |msg: String| line_error(path, r.line, msg);
        let edge = ProbVec::new(&rec.edge).map_err(|e| at(format!("edge: {e}")))?;
        let cloud = rec
            .cloud
            .ok_or_else(|| at(format!("record {} has no cloud vector", rec.x_id)))?;
        let cloud = ProbVec::new(&cloud).map_err(|e| at(format!("cloud: {e}")))?;
        let pair = CalibrationPair::new(rec.x_id, edge, cloud, rec.label)
            .map_err(|e| at(e.to_string()))?;
        if let Some(first) = pairs.first() {
            let first: &CalibrationPair = first;
            if first.k() != pair.k() {
                return Err(at(format!(
                    "{} classes, earlier records have {}",
                    pair.k(),
                    first.k()
                )));
            }
        }
        pairs.push(pair);
    }
    Ok(pairs)
}

/// Writes `contents` to a temporary file next to `path` and renames it
/// into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> CliResult<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(path, e))?;
    tmp.write_all(contents).map_err(|e| CliError::io(path, e))?;
    tmp.as_file()
        .sync_all()
        .map_err(|e| CliError::io(path, e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}

pub fn write_jsonl<T: Serialize>(path: &Path, items: &[T]) -> CliResult<()> {
    let mut buf = Vec::new();
    for item in items {
        serde_json::to_writer(&mut buf, item).map_err(|e| CliError::Data(e.to_string()))?;
        buf.push(b'\n');
    }
    write_atomic(path, &buf)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut buf = serde_json::to_vec_pretty(value).map_err(|e| CliError::Data(e.to_string()))?;
    buf.push(b'\n');
    write_atomic(path, &buf)
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

/// Per-input output of `predict`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CredalSummary {
    pub x_id: String,
    #[serde(with = "cdci_core::ext_real")]
    pub gamma: f64,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub inefficiency: f64,
    pub member_count: usize,
    pub rule: Rule,
    pub distribution: ProbVec,
    pub beta: Option<f64>,
    pub hard_label: usize,
}

impl CredalSummary {
    pub fn new(
        x_id: String,
        gamma: f64,
        bounds: CredalBounds,
        inefficiency: f64,
        member_count: usize,
        decision: DecisionOutput,
    ) -> Self {
        CredalSummary {
            x_id,
            gamma,
            lower: bounds.lower,
            upper: bounds.upper,
            inefficiency,
            member_count,
            rule: decision.rule,
            distribution: decision.distribution,
            beta: decision.beta,
            hard_label: decision.hard_label,
        }
    }
}
