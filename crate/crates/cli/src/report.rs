//! Report documents written by the commands. Field names are part of the
//! stable output format; `docs/report.schema.json` describes them.

use std::io::{self, Write};

use benfordnet::ego::{Bin, EgoReport, EgoSummary};
use benfordnet::{ClassificationThresholds, ConformanceReport, DIGITS};
use serde::{Deserialize, Serialize};

use crate::config::{Format, VerdictThresholds};

pub const ANALYZE_SCHEMA: &str = "benfordnet/analyze/v1";
pub const VALIDATE_SCHEMA: &str = "benfordnet/validate/v1";
pub const EGO_SCHEMA: &str = "benfordnet/ego/v1";
pub const MANIFEST_SCHEMA: &str = "benfordnet/manifest/v1";

/// Per-digit CSV header.
pub const DIGITS_CSV_HEADER: &str = "digit,observed,expected,deviation_pct";

/// Record counts from reading the input.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceStats {
    /// Edges (edge lists) or data rows (CSV) read.
    pub records: u64,
    /// Malformed records dropped in skip mode.
    pub skipped: u64,
    /// CSV rows removed by a zero-row filter.
    pub filtered: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesReport {
    pub label: String,
    /// Empty CSV cells, not counted anywhere else.
    pub missing: u64,
    #[serde(flatten)]
    pub report: ConformanceReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyzeOutput {
    pub schema: String,
    pub input: String,
    pub format: Format,
    pub source: SourceStats,
    pub reports: Vec<SeriesReport>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Warn,
    Fail,
}

impl Verdict {
    /// PASS when r > pass, WARN when warn < r <= pass, FAIL otherwise
    /// (including an undefined r).
    pub fn from_r(r: Option<f64>, t: &VerdictThresholds) -> Verdict {
        match r {
            Some(r) if r > t.pass => Verdict::Pass,
            Some(r) if r > t.warn => Verdict::Warn,
            _ => Verdict::Fail,
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Warn => "WARN",
            Verdict::Fail => "FAIL",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidateColumn {
    pub label: String,
    pub verdict: Verdict,
    pub missing: u64,
    /// `null` when the column had no nonzero values.
    pub report: Option<ConformanceReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidateOutput {
    pub schema: String,
    pub input: String,
    pub verdicts: VerdictThresholds,
    pub source: SourceStats,
    pub columns: Vec<ValidateColumn>,
    pub failed: u64,
}

/// One line of the `ego` JSON-lines output.
#[allow(clippy::large_enum_variant)]
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "snake_case")]
pub enum EgoLine {
    Ego(EgoRecord),
    Summary(SummaryRecord),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EgoRecord {
    pub user: u64,
    pub ego_size: u64,
    pub missing: u64,
    pub bin: Bin,
    pub pearson_r: Option<f64>,
    pub counts: [u64; DIGITS],
    pub excluded_zero: u64,
    pub report: Option<ConformanceReport>,
}

impl From<&EgoReport> for EgoRecord {
    fn from(r: &EgoReport) -> Self {
        EgoRecord {
            user: r.user,
            ego_size: r.ego_size,
            missing: r.missing,
            bin: r.bin,
            pearson_r: r.pearson_r(),
            counts: *r.hist.counts(),
            excluded_zero: r.hist.excluded_zero(),
            report: r.report.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRecord {
    pub schema: String,
    pub input: String,
    pub thresholds: ClassificationThresholds,
    #[serde(flatten)]
    pub summary: EgoSummary,
}

/// Sidecar written next to every generated fixture.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema: String,
    pub format: Format,
    pub seed: u64,
    pub rng: String,
    /// Generator parameters (a generator spec or a graph plan summary).
    pub spec: serde_json::Value,
    pub records: u64,
    pub sha256: String,
    /// Graph fixtures: ids of the injected botnet-band egos.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub bot_users: Vec<u64>,
}

pub const RNG_DESCRIPTION: &str =
    "ChaCha8 (rand_chacha), seed_from_u64(seed), stream 0 values / stream 1 auxiliary";

/// Writes `digit,observed,expected,deviation_pct` with one row per digit.
/// Floats use the shortest representation that round-trips.
pub fn write_digits_csv<W: Write>(mut out: W, report: &ConformanceReport) -> io::Result<()> {
    writeln!(out, "{DIGITS_CSV_HEADER}")?;
    for d in 0..DIGITS {
        writeln!(
            out,
            "{},{},{},{}",
            d + 1,
            report.observed[d],
            report.expected[d],
            report.deviation_pct[d]
        )?;
    }
    Ok(())
}
