use std::collections::BTreeSet;

use crate::error::Result;
use crate::frontend::parse_source;
use crate::heuristics::{all_detectors, run_all, DetectorId, KeywordConfig};
use crate::model::SourceUnit;
use crate::report::AuditReport;

#[derive(Clone, Debug)]
pub struct AnalysisOptions {
    pub config: KeywordConfig,
    pub detectors: BTreeSet<DetectorId>,
    /// Stored in the report as `generated_at` when set.
    pub generated_at: Option<String>,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self { config: KeywordConfig::default(), detectors: all_detectors(), generated_at: None }
    }
}

/// Parse, detect and bundle one source file.
pub fn analyze(source: &str, path: &str, baseline: Option<&SourceUnit>, opts: &AnalysisOptions) -> Result<AuditReport> {
    let unit = parse_source(source, path);
    analyze_unit(&unit, baseline, opts)
}

pub fn analyze_unit(unit: &SourceUnit, baseline: Option<&SourceUnit>, opts: &AnalysisOptions) -> Result<AuditReport> {
    let warnings = run_all(unit, &opts.config, baseline, &opts.detectors)?;
    Ok(AuditReport::new(unit, warnings, opts.generated_at.clone()))
}
