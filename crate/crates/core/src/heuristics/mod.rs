//! Keyword heuristics over the structural model.
//!
//! Every detector is a pure function of one contract (plus the unit for
//! inheritance lookups) and returns unsorted warnings; [`run_all`] merges
//! and orders them.

pub mod config;
mod detectors;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frontend::inherited_state_vars;
use crate::graph::{callable_node_ids, node_id, NodeKind};
use crate::model::{ContractDef, FunctionDef, SourceUnit};

pub use config::{KeywordConfig, KeywordPair};
pub use detectors::{
    detect_complex_calculation, detect_external_dependency, detect_legacy_signature_mismatch,
    detect_missing_exit_validation, detect_naming_ambiguity, detect_price_lag, detect_stake_asymmetry,
    detect_supply_hooks, detect_unchecked_low_level, detect_unprotected_entry, PairKind,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum DetectorId {
    #[serde(rename = "D1_stake_asymmetry")]
    D1,
    #[serde(rename = "D2_missing_exit_validation")]
    D2,
    #[serde(rename = "D3_unprotected_entry")]
    D3,
    #[serde(rename = "D4_price_lag")]
    D4,
    #[serde(rename = "D5_external_dependency")]
    D5,
    #[serde(rename = "D6_supply_hooks")]
    D6,
    #[serde(rename = "D7_complex_calculation")]
    D7,
    #[serde(rename = "D8_unchecked_low_level")]
    D8,
    #[serde(rename = "D9_naming_ambiguity")]
    D9,
    #[serde(rename = "D10_legacy_signature")]
    D10,
    #[serde(rename = "D11_collateral_logic")]
    D11,
    #[serde(rename = "D12_point_system")]
    D12,
}

impl DetectorId {
    pub const ALL: [DetectorId; 12] = [
        DetectorId::D1,
        DetectorId::D2,
        DetectorId::D3,
        DetectorId::D4,
        DetectorId::D5,
        DetectorId::D6,
        DetectorId::D7,
        DetectorId::D8,
        DetectorId::D9,
        DetectorId::D10,
        DetectorId::D11,
        DetectorId::D12,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DetectorId::D1 => "D1_stake_asymmetry",
            DetectorId::D2 => "D2_missing_exit_validation",
            DetectorId::D3 => "D3_unprotected_entry",
            DetectorId::D4 => "D4_price_lag",
            DetectorId::D5 => "D5_external_dependency",
            DetectorId::D6 => "D6_supply_hooks",
            DetectorId::D7 => "D7_complex_calculation",
            DetectorId::D8 => "D8_unchecked_low_level",
            DetectorId::D9 => "D9_naming_ambiguity",
            DetectorId::D10 => "D10_legacy_signature",
            DetectorId::D11 => "D11_collateral_logic",
            DetectorId::D12 => "D12_point_system",
        }
    }

    /// `D4` for `D4_price_lag`.
    pub fn short(self) -> &'static str {
        self.as_str().split('_').next().unwrap_or_default()
    }

    pub fn category(self) -> Category {
        match self {
            DetectorId::D5 | DetectorId::D6 | DetectorId::D11 => Category::ExternalDependencyStateIntegrity,
            DetectorId::D1 | DetectorId::D2 | DetectorId::D4 | DetectorId::D12 => Category::TransactionalEconomic,
            DetectorId::D3 | DetectorId::D7 | DetectorId::D8 => Category::ComputationalOperational,
            DetectorId::D9 | DetectorId::D10 => Category::SemanticMaintenance,
        }
    }

    pub fn default_severity(self) -> Severity {
        match self {
            DetectorId::D2 | DetectorId::D3 | DetectorId::D4 | DetectorId::D6 | DetectorId::D8 => Severity::High,
            DetectorId::D7 => Severity::Info,
            _ => Severity::Medium,
        }
    }
}

impl fmt::Display for DetectorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DetectorId {
    type Err = Error;

    /// Accepts the full id (`D4_price_lag`) or its short form (`D4`, `d4`).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        DetectorId::ALL
            .into_iter()
            .find(|d| d.as_str() == s || d.short().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownDetector(s.to_string()))
    }
}

/// Parses a comma-separated detector list; an empty string selects nothing.
pub fn parse_detector_list(list: &str) -> Result<BTreeSet<DetectorId>> {
    list.split(',').map(str::trim).filter(|s| !s.is_empty()).map(DetectorId::from_str).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    ExternalDependencyStateIntegrity,
    TransactionalEconomic,
    ComputationalOperational,
    SemanticMaintenance,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Severity {
    Info,
    Medium,
    High,
}

impl Severity {
    pub fn as_str(self) -> &'static str {
        match self {
            Severity::Info => "info",
            Severity::Medium => "medium",
            Severity::High => "high",
        }
    }
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Warning {
    pub detector: DetectorId,
    pub category: Category,
    pub severity: Severity,
    pub contract: String,
    pub function: Option<String>,
    pub line: usize,
    pub message: String,
    pub related_symbols: Vec<String>,
    pub related_nodes: Vec<String>,
}

impl Warning {
    pub fn new(detector: DetectorId, contract: &str, function: Option<&str>, line: usize, message: String) -> Self {
        Self {
            detector,
            category: detector.category(),
            severity: detector.default_severity(),
            contract: contract.to_string(),
            function: function.map(str::to_string),
            line,
            message,
            related_symbols: Vec::new(),
            related_nodes: Vec::new(),
        }
    }

    pub fn with_severity(mut self, severity: Severity) -> Self {
        self.severity = severity;
        self
    }

    pub fn with_symbols(mut self, symbols: impl IntoIterator<Item = String>) -> Self {
        self.related_symbols = symbols.into_iter().collect();
        self
    }

    pub fn with_nodes(mut self, nodes: impl IntoIterator<Item = String>) -> Self {
        self.related_nodes = nodes.into_iter().collect();
        self
    }
}

/// Case-insensitive substring match against lowercase keywords.
pub fn matches_any(name: &str, keywords: &[String]) -> bool {
    let name = name.to_lowercase();
    keywords.iter().any(|k| name.contains(k.as_str()))
}

/// One contract with what detectors need from its surroundings.
pub struct Context<'a> {
    pub unit: &'a SourceUnit,
    pub contract: &'a ContractDef,
    /// Own state variables plus those inherited from parsed ancestors.
    pub state: BTreeSet<String>,
    ids: Vec<String>,
}

impl<'a> Context<'a> {
    pub fn new(unit: &'a SourceUnit, contract: &'a ContractDef) -> Self {
        let state = contract
            .state_vars
            .iter()
            .map(|v| v.name.clone())
            .chain(inherited_state_vars(unit, contract).into_iter().map(|v| v.name))
            .collect();
        Self { unit, contract, state, ids: callable_node_ids(contract) }
    }

    /// Graph node id of a callable of this contract.
    pub fn fn_id(&self, f: &FunctionDef) -> String {
        self.contract
            .callables()
            .position(|g| std::ptr::eq(g, f))
            .map(|i| self.ids[i].clone())
            .unwrap_or_else(|| node_id(&self.contract.name, NodeKind::Function, &f.name))
    }

    pub fn state_id(&self, name: &str) -> String {
        node_id(&self.contract.name, NodeKind::StateVar, name)
    }

    pub fn contract_id(&self) -> String {
        node_id(&self.contract.name, NodeKind::Contract, &self.contract.name)
    }

    pub fn warning(&self, detector: DetectorId, f: Option<&FunctionDef>, line: usize, message: String) -> Warning {
        let w = Warning::new(detector, &self.contract.name, f.map(|f| f.name.as_str()), line, message);
        match f {
            Some(f) => w.with_nodes([self.fn_id(f)]),
            None => w,
        }
    }
}

fn sort_key(w: &Warning) -> (&str, usize, DetectorId, &str, Option<&str>) {
    (&w.contract, w.line, w.detector, &w.message, w.function.as_deref())
}

/// Sorts by (contract, line, detector, message) and drops exact duplicates.
pub fn sort_warnings(warnings: &mut Vec<Warning>) {
    warnings.sort_by(|a, b| sort_key(a).cmp(&sort_key(b)));
    warnings.dedup();
}

/// Runs the `enabled` detectors over every contract of `unit`. D10 runs only
/// when a baseline is given.
pub fn run_all(
    unit: &SourceUnit,
    cfg: &KeywordConfig,
    baseline: Option<&SourceUnit>,
    enabled: &BTreeSet<DetectorId>,
) -> Result<Vec<Warning>> {
    cfg.validate()?;
    let mut out = Vec::new();
    for contract in &unit.contracts {
        let cx = Context::new(unit, contract);
        for &d in enabled {
            let found = match d {
                DetectorId::D1 => detect_stake_asymmetry(&cx, cfg, PairKind::Stake),
                DetectorId::D2 => detect_missing_exit_validation(&cx, cfg),
                DetectorId::D3 => detect_unprotected_entry(&cx),
                DetectorId::D4 => detect_price_lag(&cx, cfg),
                DetectorId::D5 => detect_external_dependency(&cx),
                DetectorId::D6 => detect_supply_hooks(&cx),
                DetectorId::D7 => detect_complex_calculation(&cx, cfg),
                DetectorId::D8 => detect_unchecked_low_level(&cx),
                DetectorId::D9 => detect_naming_ambiguity(&cx, cfg),
                DetectorId::D10 => Vec::new(),
                DetectorId::D11 => detect_stake_asymmetry(&cx, cfg, PairKind::Collateral),
                DetectorId::D12 => detect_stake_asymmetry(&cx, cfg, PairKind::Points),
            };
            out.extend(found);
        }
    }
    if let (Some(base), true) = (baseline, enabled.contains(&DetectorId::D10)) {
        out.extend(detect_legacy_signature_mismatch(unit, base, cfg));
    }
    sort_warnings(&mut out);
    Ok(out)
}

/// Every detector.
pub fn all_detectors() -> BTreeSet<DetectorId> {
    DetectorId::ALL.into_iter().collect()
}
