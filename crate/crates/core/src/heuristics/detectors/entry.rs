//! Public entry points that feed parameters into state without an `only*`
//! modifier and are not reached from other code in the inheritance family.

use std::collections::BTreeSet;

use crate::frontend::function_statements;
use crate::heuristics::{Context, DetectorId, Warning};
use crate::model::{CallSite, ContractDef, FunctionDef, Visibility};

fn targets(call: &CallSite, name: &str) -> bool {
    call.final_segment() == name && matches!(call.receiver(), None | Some("this") | Some("super"))
}

/// True when any function or modifier of `family` other than `f` calls `f.name`.
fn invoked_elsewhere(family: &[&ContractDef], f: &FunctionDef) -> bool {
    family.iter().any(|c| {
        c.callables().filter(|g| !std::ptr::eq(*g, f)).any(|g| g.calls.iter().any(|call| targets(call, &f.name)))
            || c.modifiers.iter().any(|m| m.calls.iter().any(|call| targets(call, &f.name)))
    })
}

/// State variables written by statements whose assignment right-hand side,
/// index expression or mutation operands mention `param`.
fn state_fed_by(f: &FunctionDef, param: &str, state: &BTreeSet<String>) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for s in function_statements(f) {
        for a in &s.facts.assignments {
            if s.is_state(state, &a.target)
                && (a.rhs_idents.iter().any(|x| x == param) || a.lhs_idents.iter().any(|x| x == param))
            {
                out.insert(a.target.clone());
            }
        }
        if s.facts.reads.iter().any(|x| x == param) {
            for m in &s.facts.mutations {
                if s.is_state(state, m) {
                    out.insert(m.clone());
                }
            }
        }
    }
    out
}

pub fn detect_unprotected_entry(cx: &Context<'_>) -> Vec<Warning> {
    let mut family: Vec<&ContractDef> = vec![cx.contract];
    family.extend(cx.unit.ancestors(&cx.contract.name));
    family.extend(cx.unit.descendants(&cx.contract.name));

    let mut out = Vec::new();
    for f in &cx.contract.functions {
        let exposed = matches!(f.visibility, Visibility::Public | Visibility::External | Visibility::Default);
        if !f.implemented || !exposed || f.has_modifier_containing("only") || invoked_elsewhere(&family, f) {
            continue;
        }
        for p in f.params.iter().filter(|p| !p.name.is_empty()) {
            let vars = state_fed_by(f, &p.name, &cx.state);
            if vars.is_empty() {
                continue;
            }
            let msg = format!(
                "Potential Vulnerability: Unprotected external function {} manipulates state via param {}",
                f.name, p.name
            );
            let nodes = std::iter::once(cx.fn_id(f)).chain(vars.iter().map(|v| cx.state_id(v))).collect::<Vec<_>>();
            out.push(
                cx.warning(DetectorId::D3, Some(f), f.line_span.start, msg)
                    .with_symbols(std::iter::once(p.name.clone()).chain(vars))
                    .with_nodes(nodes),
            );
        }
    }
    out
}
