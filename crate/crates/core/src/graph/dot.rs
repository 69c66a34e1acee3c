//! DOT export.
//!
//! Nodes are written under their short label so edges read like the source
//! (`placeBid -> highestBid`); the full node id travels in the `id`
//! attribute. Labels that collide inside one graph get a `_<kind>` suffix.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use super::{DependencyGraph, EdgeKind, GraphNode, NodeKind};

const KEYWORDS: &[&str] = &["node", "edge", "graph", "digraph", "subgraph", "strict"];

fn is_bare_id(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !KEYWORDS.contains(&s.to_ascii_lowercase().as_str())
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            _ => out.push(c),
        }
    }
    out.push('"');
    out
}

fn dot_id(s: &str) -> String {
    if is_bare_id(s) {
        s.to_string()
    } else {
        quote(s)
    }
}

fn shape(kind: NodeKind) -> &'static str {
    match kind {
        NodeKind::Contract => "box",
        NodeKind::Function | NodeKind::Constructor => "ellipse",
        NodeKind::Conditional => "diamond",
        NodeKind::Loop => "hexagon",
        NodeKind::StateVar => "cylinder",
        NodeKind::Event => "note",
        NodeKind::ExternalBoundary => "doubleoctagon",
        NodeKind::Modifier => "octagon",
        NodeKind::Struct => "tab",
    }
}

fn edge_attrs(kind: EdgeKind) -> &'static str {
    match kind {
        EdgeKind::DataWrite => "style=solid",
        EdgeKind::DataRead => "style=dashed",
        EdgeKind::Initialization => "style=bold",
        EdgeKind::SystemicCall => "style=dotted",
        EdgeKind::InputDependency => "style=solid, arrowhead=empty",
        EdgeKind::Emits => "style=solid, arrowhead=vee",
        EdgeKind::GuardedBy => "style=solid, arrowhead=odiamond",
        EdgeKind::Contains => "style=solid, arrowhead=none",
    }
}

fn base_name(node: &GraphNode, nodes: &BTreeMap<&str, &GraphNode>) -> String {
    match node.kind {
        NodeKind::Loop | NodeKind::Conditional => {
            let (parent, rest) = node.id.rsplit_once('.').unwrap_or(("", ""));
            let parent = parent.rsplit_once('.').map(|(p, _)| p).unwrap_or(parent);
            let owner = nodes.get(parent).map(|n| n.label.as_str()).unwrap_or("fn");
            format!("{owner}_{}_{rest}", node.kind.as_str())
        }
        _ => node.label.clone(),
    }
}

/// Short DOT names for every node, unique within the graph.
fn short_names(graph: &DependencyGraph) -> BTreeMap<&str, String> {
    let by_id: BTreeMap<&str, &GraphNode> = graph.nodes.iter().map(|n| (n.id.as_str(), n)).collect();
    let bases: Vec<String> = graph.nodes.iter().map(|n| base_name(n, &by_id)).collect();
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for b in &bases {
        *counts.entry(b.as_str()).or_default() += 1;
    }
    let mut taken: BTreeSet<String> = BTreeSet::new();
    let mut out = BTreeMap::new();
    for (node, base) in graph.nodes.iter().zip(&bases) {
        let mut name = if counts[base.as_str()] > 1 { format!("{base}_{}", node.kind.as_str()) } else { base.clone() };
        if taken.contains(&name) {
            let mut n = 2;
            while taken.contains(&format!("{name}_{n}")) {
                n += 1;
            }
            name = format!("{name}_{n}");
        }
        taken.insert(name.clone());
        out.insert(node.id.as_str(), name);
    }
    out
}

/// One `digraph` for the contract graph, LF-terminated.
pub fn export_dot(graph: &DependencyGraph) -> String {
    let names = short_names(graph);
    let mut out = String::new();
    let _ = writeln!(out, "digraph {} {{", dot_id(&graph.contract_name));
    out.push_str("  rankdir=LR;\n");
    for n in &graph.nodes {
        let bold = if n.kind == NodeKind::Constructor { ", style=bold" } else { "" };
        let _ = writeln!(
            out,
            "  {} [id={}, label={}, shape={}{}];",
            dot_id(&names[n.id.as_str()]),
            quote(&n.id),
            quote(&n.label),
            shape(n.kind),
            bold
        );
    }
    for e in &graph.edges {
        let label = match &e.label {
            Some(l) => format!(", label={}", quote(l)),
            None => String::new(),
        };
        let _ = writeln!(
            out,
            "  {} -> {} [kind={}, {}{}];",
            dot_id(&names[e.from.as_str()]),
            dot_id(&names[e.to.as_str()]),
            e.kind.as_str(),
            edge_attrs(e.kind),
            label
        );
    }
    out.push_str("}\n");
    out
}

/// All graphs of a unit, one `digraph` each, separated by a blank line.
pub fn export_unit_dot(graphs: &[DependencyGraph]) -> String {
    graphs.iter().map(export_dot).collect::<Vec<_>>().join("\n")
}
