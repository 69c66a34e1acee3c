//! Structural analysis of Solidity sources: a tolerant frontend, a typed
//! dependency graph per contract, keyword heuristics for business-logic
//! flaws, and report serialization.

pub mod error;
pub mod frontend;
pub mod graph;
pub mod heuristics;
pub mod model;
pub mod pipeline;
pub mod report;

pub use error::{Error, Result};
pub use frontend::{parse_source, resolve_access_sets, strip_noise};
pub use graph::{
    build_graph, build_unit_graphs, export_dot, export_unit_dot, subgraph_for_warning, DependencyGraph, EdgeKind,
    GraphEdge, GraphNode, NodeKind,
};
pub use heuristics::{
    all_detectors, parse_detector_list, run_all, Category, DetectorId, KeywordConfig, KeywordPair, Severity, Warning,
};
pub use model::*;
pub use pipeline::{analyze, analyze_unit, AnalysisOptions};
pub use report::{
    deserialize_json, exit_code, render_text, serialize_json, serialize_json_array, AuditReport, ContractSummary,
    FailOn, TOOL_VERSION,
};
