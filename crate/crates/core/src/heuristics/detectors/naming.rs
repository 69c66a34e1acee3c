//! Confusable declared identifiers.

use std::collections::BTreeMap;

use crate::graph::{node_id, NodeKind};
use crate::heuristics::config::SIMILARITY_MIN_LEN;
use crate::heuristics::{Context, DetectorId, KeywordConfig, Severity, Warning};

/// Why two names are confusable, or `None`.
pub fn classify_pair(a: &str, b: &str, threshold: usize) -> Option<(Severity, &'static str)> {
    if a == b {
        return None;
    }
    let (la, lb) = (a.to_lowercase(), b.to_lowercase());
    if la == lb {
        return Some((Severity::Medium, "differ only in letter case"));
    }
    if la.trim_matches('_') == lb.trim_matches('_') {
        return Some((Severity::Info, "differ only by underscores"));
    }
    let long_enough = a.chars().count() >= SIMILARITY_MIN_LEN && b.chars().count() >= SIMILARITY_MIN_LEN;
    if long_enough && la.chars().next() == lb.chars().next() && strsim::levenshtein(&la, &lb) <= threshold {
        return Some((Severity::Medium, "are nearly identical"));
    }
    None
}

pub fn detect_naming_ambiguity(cx: &Context<'_>, cfg: &KeywordConfig) -> Vec<Warning> {
    let c = cx.contract;
    // name -> (line, node id), first declaration wins
    let mut names: BTreeMap<&str, (usize, String)> = BTreeMap::new();
    for v in &c.state_vars {
        names.entry(&v.name).or_insert((v.line, cx.state_id(&v.name)));
    }
    for f in c.functions.iter().filter(|f| !f.name.is_empty() && f.name != "fallback" && f.name != "receive") {
        names.entry(&f.name).or_insert_with(|| (f.line_span.start, cx.fn_id(f)));
    }
    for m in &c.modifiers {
        names.entry(&m.name).or_insert_with(|| (m.line_span.start, node_id(&c.name, NodeKind::Modifier, &m.name)));
    }
    let list: Vec<(&str, &(usize, String))> = names.iter().map(|(k, v)| (*k, v)).collect();

    let mut out = Vec::new();
    for (i, (a, (line_a, id_a))) in list.iter().enumerate() {
        for (b, (line_b, id_b)) in &list[i + 1..] {
            let Some((severity, reason)) = classify_pair(a, b, cfg.similarity_threshold) else { continue };
            let msg = format!("Naming Ambiguity: {a} and {b} {reason}, which could result in unwitting substitution");
            out.push(
                Warning::new(DetectorId::D9, &c.name, None, (*line_a).max(*line_b), msg)
                    .with_severity(severity)
                    .with_symbols([a.to_string(), b.to_string()])
                    .with_nodes([id_a.clone(), id_b.clone()]),
            );
        }
    }
    out
}
