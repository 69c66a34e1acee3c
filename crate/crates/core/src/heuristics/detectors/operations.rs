use crate::frontend::lexer::{tokenize, TokenKind};
use crate::heuristics::{Context, DetectorId, KeywordConfig, Warning};
use crate::model::{CallKind, FunctionDef, Statement, StatementKind};

const ARITHMETIC: &[&str] = &["+", "-", "*", "/", "%", "**", "+=", "-=", "*=", "/=", "%="];
const SAFE_MATH: &[&str] = &["mul", "div", "add", "sub"];

/// Arithmetic operators plus `.mul(`/`.div(`/`.add(`/`.sub(` calls in `text`.
pub fn arithmetic_count(text: &str) -> usize {
    let toks = tokenize(text);
    let t = |i: usize| toks.get(i).map(|k| k.text(text)).unwrap_or("");
    (0..toks.len())
        .filter(|&i| match toks[i].kind {
            TokenKind::Punct => ARITHMETIC.contains(&t(i)),
            TokenKind::Ident => SAFE_MATH.contains(&t(i)) && i > 0 && t(i - 1) == "." && t(i + 1) == "(",
            _ => false,
        })
        .count()
}

pub fn detect_complex_calculation(cx: &Context<'_>, cfg: &KeywordConfig) -> Vec<Warning> {
    let mut out = Vec::new();
    for f in cx.contract.callables().filter(|f| f.writes.len() >= 2) {
        let writes = f.writes.iter().cloned().collect::<Vec<_>>();
        for s in f.flat_statements() {
            let n = arithmetic_count(&s.text);
            if n <= cfg.complexity_threshold {
                continue;
            }
            let msg = format!(
                "Complex Calculation: statement with {n} arithmetic operations in {} which updates {} state variables ({}); audit manually for tampered results",
                f.name,
                writes.len(),
                writes.join(", ")
            );
            let nodes = std::iter::once(cx.fn_id(f)).chain(writes.iter().map(|v| cx.state_id(v))).collect::<Vec<_>>();
            out.push(cx.warning(DetectorId::D7, Some(f), s.line, msg).with_symbols(writes.clone()).with_nodes(nodes));
        }
    }
    out
}

/// Low-level calls whose failure is silent unless the result is checked.
const UNCHECKED_CALLS: &[&str] = &["call", "delegatecall", "staticcall", "send"];

fn unchecked_in<'a>(stmts: &'a [Statement], in_try: bool, out: &mut Vec<&'a crate::model::CallSite>) {
    for s in stmts {
        let discarded = matches!(s.kind, StatementKind::Call | StatementKind::Other);
        if discarded && !in_try {
            out.extend(
                s.calls.iter().filter(|c| c.kind == CallKind::LowLevel && UNCHECKED_CALLS.contains(&c.final_segment())),
            );
        }
        unchecked_in(&s.children, in_try || s.kind == StatementKind::TryCatch, out);
    }
}

pub fn detect_unchecked_low_level(cx: &Context<'_>) -> Vec<Warning> {
    let mut out = Vec::new();
    for f in cx.contract.callables() {
        let mut calls = Vec::new();
        unchecked_in(&f.body, false, &mut calls);
        for c in calls {
            out.push(unchecked_warning(cx, f, c));
        }
    }
    out
}

fn unchecked_warning(cx: &Context<'_>, f: &FunctionDef, c: &crate::model::CallSite) -> Warning {
    let msg = format!(
        "Unchecked Low-Level Call: the result of {} in {} is discarded, so a failed call cannot preserve the logical validity of state reversions",
        c.callee, f.name
    );
    cx.warning(DetectorId::D8, Some(f), c.line, msg).with_symbols([c.callee.clone()])
}
