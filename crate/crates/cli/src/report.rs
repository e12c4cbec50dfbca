use bellscope_core::{
    BoundOrdering, ChshEstimate, ChshReport, CorrelationEstimate, PartitionReport, ScanReport, SettingPair,
};
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;

pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Top-level JSON document written by `chsh`, `verify` and `simulate`.
/// `generated_at` is the only field that varies between identical runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportEnvelope {
    pub artifact_version: String,
    pub generated_at: String,
    pub config: ExperimentConfig,
    pub results: Results,
}

impl ReportEnvelope {
    pub fn new(config: ExperimentConfig, results: Results) -> Self {
        ReportEnvelope {
            artifact_version: ARTIFACT_VERSION.to_string(),
            generated_at: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true),
            config,
            results,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum Results {
    Chsh(ChshResult),
    Verify(VerifySummary),
    Simulate(SimulateResult),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChshResult {
    /// `evaluate`, `min` or `max`.
    pub mode: String,
    pub report: ChshReport,
    pub model_kind: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    /// Largest observed deviation from the checked property.
    pub deviation: f64,
    pub tolerance: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Su2Row {
    pub state: String,
    pub axis: String,
    pub max_deviation: f64,
    pub expected_invariant: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifySummary {
    pub passed: bool,
    pub checks: Vec<CheckResult>,
    pub bounds: BoundOrdering,
    pub su2_table: Vec<Su2Row>,
}

impl VerifySummary {
    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairSummary {
    pub pair: SettingPair,
    pub correlation: CorrelationEstimate,
    pub analytic_correlation: f64,
    pub alice_plus_frequency: f64,
    pub bob_plus_frequency: f64,
    pub partition_by_alice: PartitionReport,
    pub partition_by_bob: PartitionReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateResult {
    pub n_per_pair: usize,
    pub seed: u64,
    pub pairs: Vec<PairSummary>,
    pub chsh: ChshEstimate,
    pub analytic_chsh: f64,
    pub conservation_scan: ScanReport,
    pub violating_trials: u64,
    pub ensemble_csv: String,
    pub ensemble_json: String,
}
