//! Run reports and their JSON, CSV and plot-data renderings.
//!
//! The JSON report holds no timings, so identical configurations give
//! byte-identical files; wall-clock times go to a separate sidecar.
//!
//! CSV files (one per analysis with sweeps) have the columns `l,R,re,im,abs`,
//! one row per scale and correlator. Plot-data files (also per analysis) are
//! tab-separated `series, log_r, log_abs` rows with natural logarithms;
//! points with a zero value are omitted.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::config::{OutputFormat, RunConfig};
use crate::limit::{CcrCheck, CommutatorResult, LimitState, WeylSeries};
use crate::scaling::weighted::WeightedExponents;
use crate::scaling::{ScalingReport, Threshold};
use crate::ssb::{BogoliubovCheck, CanonicalPair, Dispersion, GapCheck, GapFilter, ProjectorReport};
use crate::{Error, Result};

/// Identifier of the report layout; bumped on incompatible changes.
pub const SCHEMA_ID: &str = "fluctlab.run-report.v1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
pub struct RunReport {
    pub schema: String,
    /// The resolved configuration, defaults included.
    pub config: RunConfig,
    pub results: Vec<AnalysisResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum AnalysisResult {
    ScalingSweep(SweepResult),
    Qmode(QmodeResult),
    CumulantRoundtrip(CumulantResult),
    LimitState(LimitResult),
    SsbBound(SsbResult),
    Projector(ProjectorReport),
    GapCheck(GapResult),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
pub struct SweepResult {
    /// Exponent used for every order (`γ` for weighted sweeps).
    pub alpha: f64,
    /// Set when the exponent came from bisection.
    pub bisected_alpha: Option<f64>,
    pub weighted: Vec<WeightedExponents>,
    pub sweeps: Vec<ScalingReport>,
    /// Predicted 2-point limit at `α = n/2` for an integrable state.
    pub reference: Option<LimitReference>,
    /// Order-by-order consequences of square integrability.
    pub threshold: Option<Threshold>,
    pub oracle: Vec<OracleComparison>,
}

/// `Ŵ(q) ∫ f̂(k) f̂(-k) dk` against the largest-`R` value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
pub struct LimitReference {
    pub spectral_weight: f64,
    pub window_norm: f64,
    pub value: f64,
    pub relative_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
pub struct OracleComparison {
    pub order: usize,
    pub r: f64,
    pub spectral: f64,
    pub position: f64,
    pub relative_difference: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
pub struct QmodePoint {
    pub q: f64,
    pub reference: LimitReference,
    pub report: ScalingReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
pub struct QmodeResult {
    pub balanced: Vec<QmodePoint>,
    pub unbalanced: Vec<ScalingReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
pub struct PairingCount {
    pub pairs: usize,
    pub enumerated: u64,
    pub double_factorial: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
pub struct CumulantResult {
    pub order: usize,
    pub labels: usize,
    pub seed: u64,
    /// Largest entry change after cumulants → moments → cumulants.
    pub roundtrip_error: f64,
    pub pairing_counts: Vec<PairingCount>,
    /// Largest cumulant of order >= 3 of a quasi-free moment table.
    pub gaussian_higher_cumulant: f64,
    /// Largest deviation of its order-2 cumulants from the covariance.
    pub gaussian_two_point_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
pub struct WeylPoint {
    pub variance: f64,
    pub terms: usize,
    pub series: WeylSeries,
    pub within_bound: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
pub struct CcrEntry {
    pub i: usize,
    pub j: usize,
    pub check: CcrCheck,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
pub struct CommutatorEntry {
    pub label: String,
    pub criterion: CommutatorResult,
    pub sweep: ScalingReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
pub struct LimitResult {
    pub state: Option<LimitState>,
    pub observable_weyl: Vec<WeylSeries>,
    pub weyl: Vec<WeylPoint>,
    pub ccr: Vec<CcrEntry>,
    pub commutators: Vec<CommutatorEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
pub struct SsbResult {
    pub autocorrelation_a: ScalingReport,
    pub autocorrelation_q: ScalingReport,
    pub double_commutator: ScalingReport,
    pub bogoliubov: Vec<BogoliubovCheck>,
    pub bogoliubov_holds: bool,
    pub canonical: CanonicalPair,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
pub struct FilterCheck {
    pub filter: GapFilter,
    pub check: GapCheck,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
pub struct GapResult {
    pub r: f64,
    pub gapless: Vec<FilterCheck>,
    /// `(max - min)/max |estimate|` over the filters without a gap.
    pub relative_variation: f64,
    pub gapped_dispersion: Option<Dispersion>,
    pub gapped: Vec<FilterCheck>,
}

impl AnalysisResult {
    pub fn kind_name(&self) -> &'static str {
        match self {
            AnalysisResult::ScalingSweep(_) => "scaling-sweep",
            AnalysisResult::Qmode(_) => "qmode",
            AnalysisResult::CumulantRoundtrip(_) => "cumulant-roundtrip",
            AnalysisResult::LimitState(_) => "limit-state",
            AnalysisResult::SsbBound(_) => "ssb-bound",
            AnalysisResult::Projector(_) => "projector",
            AnalysisResult::GapCheck(_) => "gap-check",
        }
    }

    /// Every sweep in the result, in report order.
    pub fn sweeps(&self) -> Vec<&ScalingReport> {
        match self {
            AnalysisResult::ScalingSweep(s) => s.sweeps.iter().collect(),
            AnalysisResult::Qmode(q) => q.balanced.iter().map(|p| &p.report).chain(&q.unbalanced).collect(),
            AnalysisResult::LimitState(l) => l.commutators.iter().map(|c| &c.sweep).collect(),
            AnalysisResult::SsbBound(s) => vec![&s.autocorrelation_a, &s.autocorrelation_q, &s.double_commutator],
            AnalysisResult::Projector(p) => vec![&p.report],
            AnalysisResult::CumulantRoundtrip(_) | AnalysisResult::GapCheck(_) => Vec::new(),
        }
    }
}

/// Wall-clock times, kept out of the report for determinism.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub total_seconds: f64,
    pub analyses: Vec<AnalysisTiming>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisTiming {
    pub index: usize,
    pub kind: String,
    pub seconds: f64,
}

impl RunReport {
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)
            .map_err(|e| Error::Consistency(format!("report is not serializable: {e}")))?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let report: RunReport =
            serde_json::from_str(text).map_err(|e| Error::Config(format!("invalid report: {e}")))?;
        if report.schema != SCHEMA_ID {
            return Err(Error::Config(format!("report schema {} is not {SCHEMA_ID}", report.schema)));
        }
        Ok(report)
    }
}

/// `l,R,re,im,abs` rows for every sweep of one analysis.
pub fn csv_text(result: &AnalysisResult) -> String {
    let mut out = String::from("l,R,re,im,abs\n");
    for rep in result.sweeps() {
        for v in &rep.values {
            let _ = writeln!(out, "{},{},{},{},{}", rep.order, v.r, v.value.re, v.value.im, v.value.norm());
        }
    }
    out
}

/// `series, log_r, log_abs` rows for every sweep of one analysis.
pub fn plot_text(result: &AnalysisResult) -> String {
    let mut out = String::from("series\tlog_r\tlog_abs\n");
    for rep in result.sweeps() {
        for v in &rep.values {
            let m = v.value.norm();
            if m > 0.0 {
                let _ = writeln!(out, "{}\t{}\t{}", rep.label, v.r.ln(), m.ln());
            }
        }
    }
    out
}

fn write(path: PathBuf, text: &str) -> Result<PathBuf> {
    std::fs::write(&path, text).map_err(|source| Error::Io { path: path.display().to_string(), source })?;
    Ok(path)
}

/// Writes one format into `dir` and returns the files written.
pub fn emit(report: &RunReport, format: OutputFormat, dir: &Path, stem: &str) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|source| Error::Io { path: dir.display().to_string(), source })?;
    match format {
        OutputFormat::Json => Ok(vec![write(dir.join(format!("{stem}.json")), &report.to_json()?)?]),
        OutputFormat::Csv | OutputFormat::PlotData => {
            let mut files = Vec::new();
            for (i, r) in report.results.iter().enumerate() {
                if r.sweeps().is_empty() {
                    continue;
                }
                let (ext, text) = match format {
                    OutputFormat::Csv => ("csv", csv_text(r)),
                    _ => ("plot.tsv", plot_text(r)),
                };
                files.push(write(dir.join(format!("{stem}.{i}-{}.{ext}", r.kind_name())), &text)?);
            }
            Ok(files)
        }
    }
}

pub fn emit_timings(timings: &Timings, dir: &Path, stem: &str) -> Result<PathBuf> {
    let text = serde_json::to_string_pretty(timings).expect("timings serialize");
    write(dir.join(format!("{stem}.timings.json")), &(text + "\n"))
}

