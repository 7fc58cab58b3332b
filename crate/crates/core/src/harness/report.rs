use std::collections::BTreeMap;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{HarnessError, Result};
use crate::{Tolerances, C64};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Norms {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub commutator: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub quasi: Option<f64>,
}

/// One trial's outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub suite: String,
    pub seed: u64,
    pub dims: [usize; 2],
    pub function: String,
    pub ensemble: String,
    pub trial_index: usize,
    pub residuals: BTreeMap<String, f64>,
    pub limits: BTreeMap<String, f64>,
    pub norms: Norms,
    /// Smallest headroom over all checks: `limit − residual` for identities,
    /// `g − lhs + slack` for bound checks. Nonnegative iff every check held.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub margin: Option<f64>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub max_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub min_margin: Option<f64>,
    pub passed: usize,
    pub total: usize,
    /// Largest quasi norm seen; for the probe suite, the sup ratio.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub max_quasi: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportHeader {
    pub suite: String,
    pub seed: u64,
    pub dims: [usize; 2],
    pub function: String,
    pub ensemble: String,
    pub trials: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub eps_grid: Option<Vec<C64>>,
    pub tolerances: Tolerances,
    pub version: String,
    pub generator_id: String,
    pub aggregate: Aggregate,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "snake_case")]
enum Line {
    Header(ReportHeader),
    Trial(TrialRecord),
    Timing { wall_clock_seconds: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub header: ReportHeader,
    pub trials: Vec<TrialRecord>,
    pub wall_clock_seconds: f64,
}

fn fold_max(acc: Option<f64>, x: f64) -> Option<f64> {
    Some(acc.map_or(x, |a| a.max(x)))
}

/// Aggregates as a pure function of the trial records.
pub fn aggregate(trials: &[TrialRecord]) -> Aggregate {
    let max_residual = trials
        .iter()
        .flat_map(|t| t.residuals.values().copied())
        .fold(0.0, f64::max);
    let min_margin = trials
        .iter()
        .filter_map(|t| t.margin)
        .fold(None, |acc: Option<f64>, m| Some(acc.map_or(m, |a| a.min(m))));
    let max_quasi = trials.iter().filter_map(|t| t.norms.quasi).fold(None, fold_max);
    Aggregate {
        max_residual,
        min_margin,
        passed: trials.iter().filter(|t| t.pass).count(),
        total: trials.len(),
        max_quasi,
    }
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.header.pass
    }

    /// Header and trial lines. Identical for identical configurations.
    pub fn deterministic_lines(&self) -> Result<Vec<String>> {
        let mut out = Vec::with_capacity(self.trials.len() + 1);
        out.push(serde_json::to_string(&Line::Header(self.header.clone()))?);
        for t in &self.trials {
            out.push(serde_json::to_string(&Line::Trial(t.clone()))?);
        }
        Ok(out)
    }

    pub fn to_jsonl(&self) -> Result<String> {
        let mut lines = self.deterministic_lines()?;
        lines.push(serde_json::to_string(&Line::Timing { wall_clock_seconds: self.wall_clock_seconds })?);
        let mut s = lines.join("\n");
        s.push('\n');
        Ok(s)
    }
}

/// Writes the report next to `path` and renames it into place, so a failed
/// write never leaves a partial file behind.
pub fn emit_report(report: &VerificationReport, path: &Path) -> Result<()> {
    let body = report.to_jsonl()?;
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(body.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| HarnessError::Io(e.error))?;
    Ok(())
}

/// Parses an emitted report and checks it against its own header.
pub fn read_report(path: &Path) -> Result<VerificationReport> {
    let reader = BufReader::new(fs::File::open(path)?);
    let mut header = None;
    let mut trials = Vec::new();
    let mut wall_clock_seconds = None;
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<Line>(&line)? {
            Line::Header(h) if header.is_none() => header = Some(h),
            Line::Trial(t) => trials.push(t),
            Line::Timing { wall_clock_seconds: s } => wall_clock_seconds = Some(s),
            Line::Header(_) => return Err(HarnessError::Malformed("more than one header".into())),
        }
    }
    let header = header.ok_or_else(|| HarnessError::Malformed("no header line".into()))?;
    if trials.len() != header.trials {
        return Err(HarnessError::Malformed(format!(
            "header announces {} trials, found {}",
            header.trials,
            trials.len()
        )));
    }
    Ok(VerificationReport {
        header,
        trials,
        wall_clock_seconds: wall_clock_seconds.unwrap_or(0.0),
    })
}
