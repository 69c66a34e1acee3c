//! Price update versus transfer ordering within one function.

use crate::graph::function_node_id;
use crate::heuristics::{matches_any, Context, DetectorId, KeywordConfig, Warning};
use crate::model::CallSite;

/// Call sites of `f` whose final segment matches `keywords`, each with the
/// index of its statement in the flattened body.
fn matching_calls<'a>(stmts: &[&'a crate::model::Statement], keywords: &[String]) -> Vec<(usize, &'a CallSite)> {
    stmts
        .iter()
        .enumerate()
        .flat_map(|(i, s)| s.calls.iter().map(move |c| (i, c)))
        .filter(|(_, c)| matches_any(c.final_segment(), keywords))
        .collect()
}

/// Statements strictly between positions `a` and `b` of the flattened body.
pub(crate) fn distance(a: usize, b: usize) -> usize {
    a.abs_diff(b).saturating_sub(1)
}

pub fn detect_price_lag(cx: &Context<'_>, cfg: &KeywordConfig) -> Vec<Warning> {
    let mut out = Vec::new();
    for f in cx.contract.callables().filter(|f| f.implemented) {
        let stmts = f.flat_statements();
        let prices = matching_calls(&stmts, &cfg.price_names);
        let transfers = matching_calls(&stmts, &cfg.transfer_names);
        for &(pi, cp) in &prices {
            for &(ti, ct) in &transfers {
                let d = distance(pi, ti);
                let precedes = ct.offset < cp.offset;
                if !precedes && d <= cfg.max_distance {
                    continue;
                }
                let detail = if precedes {
                    format!(
                        "{} (line {}) runs before {} (line {}), {d} statements apart",
                        ct.callee, ct.line, cp.callee, cp.line
                    )
                } else {
                    format!(
                        "{d} statements between {} (line {}) and {} (line {}) exceed the limit of {}",
                        cp.callee, cp.line, ct.callee, ct.line, cfg.max_distance
                    )
                };
                let msg = format!(
                    "Potential Price-Lag Vulnerability: Excessive logic gap between price update and transfer in {}: {detail}; flag intermediate operations for 'Flash Loan' or 'Price Manipulation' risk",
                    f.name
                );
                let mut nodes = vec![cx.fn_id(f)];
                if cp.receiver().is_none() {
                    nodes.extend(function_node_id(cx.contract, cp.final_segment()));
                }
                out.push(
                    cx.warning(DetectorId::D4, Some(f), ct.line, msg)
                        .with_symbols([cp.callee.clone(), ct.callee.clone()])
                        .with_nodes(nodes),
                );
            }
        }
    }
    out
}
