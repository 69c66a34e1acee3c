//! Solidity frontend: noise stripping, structural parsing and
//! variable-function mapping.

pub mod access;
pub mod lexer;
pub mod parser;

use std::collections::BTreeSet;

use crate::model::{CallKind, ContractDef, ContractKind, DiagnosticSeverity, ParseDiagnostic, SourceUnit, StateVarDef};

pub use access::{
    function_statements, resolve_access_sets, scoped_statements, statement_facts, Assignment, ScopedStatement,
    StatementFacts,
};
pub use lexer::{strip_noise, strip_noise_with_diagnostics};

/// Parses `source` into a fully resolved [`SourceUnit`]. Never fails: every
/// problem is recorded in `diagnostics`.
pub fn parse_source(source: &str, path: &str) -> SourceUnit {
    let stripped = strip_noise_with_diagnostics(source);
    let tokens = lexer::tokenize(&stripped.text);
    let mut unit = SourceUnit { path: path.to_string(), ..Default::default() };
    let mut p = parser::Parser::new(&stripped.text, source, tokens);
    p.parse_unit(&mut unit);

    let mut diagnostics = stripped.diagnostics;
    diagnostics.extend(p.diagnostics);
    if !diagnostics.iter().any(|d| d.severity == DiagnosticSeverity::Error) {
        if let Some(line) = unbalanced_brace_line(&stripped.text) {
            diagnostics.push(ParseDiagnostic::error(line, "unbalanced braces"));
        }
    }
    unit.diagnostics = diagnostics;

    refine_library_calls(&mut unit);
    report_unresolved_parents(&mut unit);

    let resolved: Vec<ContractDef> = unit
        .contracts
        .iter()
        .map(|c| {
            let inherited = inherited_state_vars(&unit, c);
            resolve_access_sets(c, &inherited)
        })
        .collect();
    unit.contracts = resolved;
    unit.diagnostics.sort_by_key(|d| d.line);
    unit
}

/// Line of the first `}` without an opener, else of the last unclosed `{`.
fn unbalanced_brace_line(code: &str) -> Option<usize> {
    let mut open = Vec::new();
    let mut line = 1;
    for c in code.chars() {
        match c {
            '\n' => line += 1,
            '{' => open.push(line),
            '}' if open.pop().is_none() => return Some(line),
            _ => {}
        }
    }
    open.pop()
}

/// Calls through a library declared in the unit (`Lib.f()`, or `x.f()` with
/// `using Lib for ...` when `Lib` defines `f`) stay inside the contract's
/// own code.
fn refine_library_calls(unit: &mut SourceUnit) {
    let libraries: Vec<(String, BTreeSet<String>)> = unit
        .contracts
        .iter()
        .filter(|c| c.kind == ContractKind::Library)
        .map(|c| (c.name.clone(), c.functions.iter().map(|f| f.name.clone()).collect()))
        .collect();
    if libraries.is_empty() {
        return;
    }
    for c in &mut unit.contracts {
        let using: Vec<&BTreeSet<String>> =
            libraries.iter().filter(|(name, _)| c.using_for.contains(name)).map(|(_, fns)| fns).collect();
        let refine = |call: &mut crate::model::CallSite| {
            if call.kind != CallKind::ExternalMember {
                return;
            }
            let receiver = call.receiver().unwrap_or("");
            let final_segment = call.final_segment().to_string();
            if libraries.iter().any(|(name, _)| name == receiver)
                || using.iter().any(|fns| fns.contains(&final_segment))
            {
                call.kind = CallKind::Internal;
            }
        };
        let bodies = c.functions.iter_mut().chain(c.constructor.iter_mut());
        for f in bodies {
            f.calls.iter_mut().for_each(refine);
            refine_statements(&mut f.body, &refine);
        }
        for m in &mut c.modifiers {
            m.calls.iter_mut().for_each(refine);
            refine_statements(&mut m.body, &refine);
        }
    }
}

fn refine_statements(stmts: &mut [crate::model::Statement], refine: &impl Fn(&mut crate::model::CallSite)) {
    for s in stmts {
        s.calls.iter_mut().for_each(refine);
        refine_statements(&mut s.children, refine);
    }
}

fn report_unresolved_parents(unit: &mut SourceUnit) {
    let known: BTreeSet<&str> = unit.contracts.iter().map(|c| c.name.as_str()).collect();
    let mut diags = Vec::new();
    for c in &unit.contracts {
        for parent in &c.inherits {
            if !known.contains(parent.as_str()) {
                diags.push(ParseDiagnostic::warning(
                    c.line_span.start,
                    format!("base contract `{}` of `{}` is not defined in this file", parent, c.name),
                ));
            }
        }
    }
    unit.diagnostics.extend(diags);
}

/// State variables declared by parsed ancestors, nearest first, without
/// names the contract redeclares.
pub fn inherited_state_vars(unit: &SourceUnit, contract: &ContractDef) -> Vec<StateVarDef> {
    let own: BTreeSet<&str> = contract.state_vars.iter().map(|v| v.name.as_str()).collect();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for a in unit.ancestors(&contract.name) {
        for v in &a.state_vars {
            if !own.contains(v.name.as_str()) && seen.insert(v.name.clone()) {
                out.push(v.clone());
            }
        }
    }
    out
}
