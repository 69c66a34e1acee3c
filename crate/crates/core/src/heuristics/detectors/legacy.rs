//! Signature drift between a baseline version of the unit and the current one.

use std::collections::{BTreeMap, BTreeSet};

use crate::heuristics::{matches_any, Context, DetectorId, KeywordConfig, Severity, Warning};
use crate::model::{ContractDef, ContractKind, FunctionDef, SourceUnit};

/// Canonical spelling of a parameter type: `uint` is `uint256`, `int` is
/// `int256`, `byte` is `bytes1`, `payable` and whitespace are dropped.
pub fn normalize_type(t: &str) -> String {
    let mut out = String::new();
    let mut word = String::new();
    let flush = |word: &mut String, out: &mut String| {
        match word.as_str() {
            "uint" => out.push_str("uint256"),
            "int" => out.push_str("int256"),
            "byte" => out.push_str("bytes1"),
            "payable" => {}
            w => out.push_str(w),
        }
        word.clear();
    };
    for ch in t.chars() {
        if ch.is_ascii_alphanumeric() || ch == '_' || ch == '$' {
            word.push(ch);
        } else {
            flush(&mut word, &mut out);
            if !ch.is_whitespace() {
                out.push(ch);
            }
        }
    }
    flush(&mut word, &mut out);
    out
}

pub fn signature(f: &FunctionDef) -> String {
    let params: Vec<String> = f.params.iter().map(|p| normalize_type(&p.type_name)).collect();
    format!("{}({})", f.name, params.join(","))
}

fn by_name(c: &ContractDef) -> BTreeMap<&str, Vec<&FunctionDef>> {
    let mut map: BTreeMap<&str, Vec<&FunctionDef>> = BTreeMap::new();
    for f in &c.functions {
        map.entry(f.name.as_str()).or_default().push(f);
    }
    map
}

/// Baseline contracts paired with their current counterpart: same name, or
/// the only concrete contract on each side when it was renamed.
fn pairs<'a>(current: &'a SourceUnit, baseline: &'a SourceUnit) -> Vec<(&'a ContractDef, &'a ContractDef)> {
    let concrete = |u: &'a SourceUnit| -> Vec<&'a ContractDef> {
        u.contracts.iter().filter(|c| c.kind == ContractKind::Contract).collect()
    };
    let mut out = Vec::new();
    for b in &baseline.contracts {
        if let Some(c) = current.contract(&b.name) {
            out.push((c, b));
        }
    }
    if out.is_empty() {
        if let ([c], [b]) = (&concrete(current)[..], &concrete(baseline)[..]) {
            out.push((*c, *b));
        }
    }
    out
}

pub fn detect_legacy_signature_mismatch(
    current: &SourceUnit,
    baseline: &SourceUnit,
    cfg: &KeywordConfig,
) -> Vec<Warning> {
    let mut out = Vec::new();
    for (cur, base) in pairs(current, baseline) {
        let cx = Context::new(current, cur);
        let now = by_name(cur);
        for (name, old) in by_name(base) {
            let old_sigs: BTreeSet<String> = old.iter().map(|f| signature(f)).collect();
            let Some(new) = now.get(name) else {
                let financial = matches_any(name, &cfg.exit_names)
                    || matches_any(name, &cfg.stake_names)
                    || matches_any(name, &cfg.unstake_names);
                if financial {
                    let sigs = old_sigs.iter().cloned().collect::<Vec<_>>().join(", ");
                    let msg = format!(
                        "Removed financial function: {sigs} exists in the baseline but not in the current version of {}",
                        cur.name
                    );
                    out.push(
                        cx.warning(DetectorId::D10, None, cur.line_span.start, msg)
                            .with_severity(Severity::High)
                            .with_symbols([name.to_string()])
                            .with_nodes([cx.contract_id()]),
                    );
                }
                continue;
            };
            let new_sigs: BTreeSet<String> = new.iter().map(|f| signature(f)).collect();
            let mut changes = Vec::new();
            if old_sigs != new_sigs {
                let join = |s: &BTreeSet<String>| s.iter().cloned().collect::<Vec<_>>().join(", ");
                changes.push(format!("parameters changed from {} to {}", join(&old_sigs), join(&new_sigs)));
            }
            if let ([o], [n]) = (&old[..], &new[..]) {
                if o.mutability != n.mutability {
                    changes.push(format!(
                        "mutability changed from {} to {}",
                        o.mutability.as_str(),
                        n.mutability.as_str()
                    ));
                }
            }
            if changes.is_empty() {
                continue;
            }
            let f = new[0];
            let msg = format!(
                "Legacy Signature Mismatch: {name} {} relative to the baseline; it may inherit outdated logic or parameters",
                changes.join("; ")
            );
            out.push(cx.warning(DetectorId::D10, Some(f), f.line_span.start, msg).with_symbols([name.to_string()]));
        }
    }
    out
}
