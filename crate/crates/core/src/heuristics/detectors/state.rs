//! Critical state fed from outside the contract, and unguarded supply hooks.

use std::collections::{BTreeMap, BTreeSet};

use crate::frontend::function_statements;
use crate::heuristics::{Context, DetectorId, Warning};
use crate::model::{CallKind, StatementKind};

/// Substrings marking a state variable as a critical economic parameter.
pub const CRITICAL_NAMES: &[&str] = &["supply", "fee", "price", "rate"];

fn is_critical(name: &str) -> bool {
    let name = name.to_lowercase();
    CRITICAL_NAMES.iter().any(|k| name.contains(k))
}

pub fn detect_external_dependency(cx: &Context<'_>) -> Vec<Warning> {
    let mut out = Vec::new();
    for f in cx.contract.callables().filter(|f| f.implemented) {
        let stmts = function_statements(f);
        let guarded: BTreeSet<&str> = stmts
            .iter()
            .filter(|s| matches!(s.stmt.kind, StatementKind::Require | StatementKind::Assert | StatementKind::If))
            .flat_map(|s| s.facts.reads.iter().map(String::as_str))
            .collect();
        // Names assigned from an external call earlier in the function,
        // with the callees that produced them.
        let mut tainted: BTreeMap<String, String> = BTreeMap::new();
        let mut flagged: BTreeSet<String> = BTreeSet::new();
        for s in &stmts {
            let external: Vec<&str> =
                s.stmt.calls.iter().filter(|c| c.kind != CallKind::Internal).map(|c| c.callee.as_str()).collect();
            for a in &s.facts.assignments {
                if !s.is_state(&cx.state, &a.target) || !is_critical(&a.target) || guarded.contains(a.target.as_str()) {
                    continue;
                }
                let via: Vec<&String> = a.rhs_idents.iter().filter(|x| tainted.contains_key(*x)).collect();
                if external.is_empty() && via.is_empty() {
                    continue;
                }
                if !flagged.insert(a.target.clone()) {
                    continue;
                }
                let source = if external.is_empty() {
                    via.iter().map(|v| format!("{v} = {}", tainted[*v])).collect::<Vec<_>>().join(", ")
                } else {
                    external.join(", ")
                };
                let msg = format!(
                    "External Dependency: {} in {} is calculated from external contracts without adequate checks (via {source})",
                    a.target, f.name
                );
                let mut symbols = vec![a.target.clone()];
                for sym in external
                    .iter()
                    .map(|c| c.to_string())
                    .chain(via.iter().flat_map(|v| [v.to_string(), tainted[*v].clone()]))
                {
                    if !symbols.contains(&sym) {
                        symbols.push(sym);
                    }
                }
                out.push(
                    cx.warning(DetectorId::D5, Some(f), s.stmt.line, msg)
                        .with_symbols(symbols)
                        .with_nodes([cx.fn_id(f), cx.state_id(&a.target)]),
                );
            }
            if !external.is_empty() {
                let origin = external.join(", ");
                let names =
                    s.facts.written().map(str::to_string).chain(s.facts.declared.iter().map(|(n, _)| n.clone()));
                for name in names {
                    tainted.insert(name, origin.clone());
                }
            }
        }
    }
    out
}

pub fn detect_supply_hooks(cx: &Context<'_>) -> Vec<Warning> {
    let mut out = Vec::new();
    for f in cx.contract.functions.iter().filter(|f| f.implemented) {
        let name = f.name.to_lowercase();
        if !(name.contains("mint") || name.contains("burn")) || !f.modifiers.is_empty() {
            continue;
        }
        if f.flat_statements().iter().any(|s| s.kind == StatementKind::Require) {
            continue;
        }
        let supply: Vec<&String> = f.writes.iter().filter(|v| v.to_lowercase().contains("supply")).collect();
        if supply.is_empty() {
            continue;
        }
        let list = supply.iter().map(|v| v.as_str()).collect::<Vec<_>>().join(", ");
        let msg = format!(
            "Supply Manipulation Hook: {} changes {list} without modifiers or require checks, allowing arbitrary burns or mints",
            f.name
        );
        let nodes = std::iter::once(cx.fn_id(f)).chain(supply.iter().map(|v| cx.state_id(v))).collect::<Vec<_>>();
        out.push(
            cx.warning(DetectorId::D6, Some(f), f.line_span.start, msg)
                .with_symbols(supply.into_iter().cloned())
                .with_nodes(nodes),
        );
    }
    out
}
