//! The audit report and its text and JSON renderings.

mod text;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{build_unit_graphs, DependencyGraph};
use crate::heuristics::{Severity, Warning};
use crate::model::{ContractKind, ParseDiagnostic, SourceUnit};

pub use text::render_text;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContractSummary {
    pub name: String,
    pub kind: ContractKind,
    pub functions: usize,
    pub state_vars: usize,
    pub events: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditReport {
    #[serde(rename = "version")]
    pub tool_version: String,
    #[serde(rename = "source")]
    pub source_path: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generated_at: Option<String>,
    pub contracts: Vec<ContractSummary>,
    pub graphs: Vec<DependencyGraph>,
    pub warnings: Vec<Warning>,
    pub diagnostics: Vec<ParseDiagnostic>,
}

impl AuditReport {
    /// Bundles a parsed unit with its sorted warnings. `generated_at` stays
    /// `None` unless a timestamp is passed.
    pub fn new(unit: &SourceUnit, warnings: Vec<Warning>, generated_at: Option<String>) -> Self {
        Self {
            tool_version: TOOL_VERSION.to_string(),
            source_path: unit.path.clone(),
            generated_at,
            contracts: unit
                .contracts
                .iter()
                .map(|c| ContractSummary {
                    name: c.name.clone(),
                    kind: c.kind,
                    functions: c.functions.len(),
                    state_vars: c.state_vars.len(),
                    events: c.events.len(),
                })
                .collect(),
            graphs: build_unit_graphs(unit),
            warnings,
            diagnostics: unit.diagnostics.clone(),
        }
    }

    pub fn graph(&self, contract: &str) -> Option<&DependencyGraph> {
        self.graphs.iter().find(|g| g.contract_name == contract)
    }

    pub fn count(&self, severity: Severity) -> usize {
        self.warnings.iter().filter(|w| w.severity == severity).count()
    }
}

/// Pretty JSON with a trailing newline; key order follows the struct.
pub fn serialize_json(report: &AuditReport) -> String {
    let mut out = serde_json::to_string_pretty(report).expect("report serializes");
    out.push('\n');
    out
}

/// Several reports as one pretty JSON array, LF-terminated.
pub fn serialize_json_array(reports: &[AuditReport]) -> String {
    let mut out = serde_json::to_string_pretty(reports).expect("reports serialize");
    out.push('\n');
    out
}

pub fn deserialize_json(text: &str) -> Result<AuditReport> {
    serde_json::from_str(text).map_err(|e| Error::Report(e.to_string()))
}

/// Which findings make the process fail.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum FailOn {
    #[default]
    None,
    Warning,
    High,
}

impl FromStr for FailOn {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "none" => Ok(FailOn::None),
            "warning" => Ok(FailOn::Warning),
            "high" => Ok(FailOn::High),
            _ => Err(format!("expected none, warning or high, got `{s}`")),
        }
    }
}

impl fmt::Display for FailOn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FailOn::None => "none",
            FailOn::Warning => "warning",
            FailOn::High => "high",
        })
    }
}

/// 1 when the policy is triggered, 0 otherwise.
pub fn exit_code(report: &AuditReport, fail_on: FailOn) -> i32 {
    let triggered = match fail_on {
        FailOn::None => false,
        FailOn::Warning => !report.warnings.is_empty(),
        FailOn::High => report.warnings.iter().any(|w| w.severity == Severity::High),
    };
    i32::from(triggered)
}
