//! Structured run reports.

use coinwalk::oracle::CertificationRecord;
use coinwalk::teleport::{MeasurementBranch, TeleportRun};
use coinwalk::{Complex64, GraphSpec, Placement, TransferReport};
use serde::Serialize;

use crate::config::RunConfig;
use crate::trace::TraceRow;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_pass(pass: bool) -> Self {
        if pass {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ProtocolReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub config: RunConfig,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    /// Normalized input actually used.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<Vec<Complex64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transfer: Option<TransferSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub teleport: Option<TeleportSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certify: Option<CertifySection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verify: Option<VerifySection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<TraceRow>>,
    pub verdict: Verdict,
}

impl ProtocolReport {
    pub fn new(config: RunConfig) -> Self {
        ProtocolReport {
            tool: "coinwalk",
            version: env!("CARGO_PKG_VERSION"),
            config,
            warnings: Vec::new(),
            input: None,
            transfer: None,
            teleport: None,
            certify: None,
            verify: None,
            trace: None,
            verdict: Verdict::Fail,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TransferSection {
    pub case: String,
    pub arena: GraphSpec,
    pub start: i64,
    pub target: i64,
    pub steps: usize,
    /// Non-identity coin operators, the same information as the schedule tables.
    pub placements: Vec<Placement>,
    pub recovery: [String; 2],
    pub fidelity: f64,
    /// Largest entrywise gap between the sparse trace and the dense oracle.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_deviation: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certification: Option<CertificationRecord>,
}

impl TransferSection {
    pub fn from_report(r: &TransferReport, oracle_deviation: Option<f64>) -> Self {
        let p = &r.plan;
        TransferSection {
            case: p.case_tag.as_str().to_string(),
            arena: p.arena,
            start: p.start,
            target: p.target,
            steps: p.step_count(),
            placements: p.placements(),
            recovery: [p.recovery.0.name(), p.recovery.1.name()],
            fidelity: r.fidelity,
            oracle_deviation,
            certification: p.certification.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BranchRow {
    pub position: i64,
    pub position_support: Vec<i64>,
    pub coin1: i64,
    pub probability: f64,
    pub correction: String,
    pub post_coin2: Vec<Complex64>,
    pub corrected: Vec<Complex64>,
    pub fidelity: f64,
}

impl From<&MeasurementBranch> for BranchRow {
    fn from(b: &MeasurementBranch) -> Self {
        BranchRow {
            position: b.position_outcome,
            position_support: b.position_support.clone(),
            coin1: b.coin1_outcome,
            probability: b.probability,
            correction: b.correction.name(),
            post_coin2: b.post_coin2.clone(),
            corrected: b.corrected.clone(),
            fidelity: b.fidelity,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TeleportSection {
    pub protocol: String,
    pub arena: GraphSpec,
    pub steps: usize,
    pub position_support: Vec<i64>,
    pub branches: Vec<BranchRow>,
    pub total_probability: f64,
    pub min_fidelity: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sampled: Option<BranchRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_deviation: Option<f64>,
}

impl TeleportSection {
    pub fn from_run(run: &TeleportRun, oracle_deviation: Option<f64>) -> Self {
        TeleportSection {
            protocol: run.plan.kind.to_string(),
            arena: run.plan.arena,
            steps: run.plan.step_count(),
            position_support: run.pre_measurement.positions().into_iter().collect(),
            branches: run.branches.iter().map(BranchRow::from).collect(),
            total_probability: run.total_probability(),
            min_fidelity: run.min_fidelity(),
            sampled: None,
            oracle_deviation,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CertifyEntry {
    pub target: i64,
    pub case: String,
    pub steps: usize,
    pub placements: Vec<Placement>,
    pub recovery: [String; 2],
    pub record: CertificationRecord,
}

#[derive(Debug, Clone, Serialize)]
pub struct CertifySection {
    pub arena: GraphSpec,
    pub entries: Vec<CertifyEntry>,
    pub feasible: Vec<i64>,
    pub infeasible: Vec<i64>,
    /// Targets for which no schedule could be built at all.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub unplanned: Vec<UnplannedTarget>,
}

#[derive(Debug, Clone, Serialize)]
pub struct UnplannedTarget {
    pub target: i64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub criterion: u8,
    pub label: String,
    pub passed: bool,
    /// Worst fidelity, probability error or deviation seen by the check.
    pub metric: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CriterionSummary {
    pub id: u8,
    pub title: &'static str,
    pub checks: usize,
    pub failed: usize,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifySection {
    pub criteria: Vec<CriterionSummary>,
    pub failures: Vec<CheckResult>,
    pub notes: Vec<String>,
}
