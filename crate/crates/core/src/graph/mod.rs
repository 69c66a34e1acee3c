//! Typed functional-dependency graph of one contract.
//!
//! Node ids are `<contract>.<kind>.<name>`; overloaded functions get a `#N`
//! suffix from the second declaration on, and loop/conditional nodes hang
//! off their function id as `<function id>.<kind>.<ordinal>`.

mod dot;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frontend::function_statements;
use crate::model::{CallKind, ContractDef, FunctionDef, SourceUnit, Statement, StatementKind};

pub use dot::{export_dot, export_unit_dot};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    Contract,
    Function,
    Constructor,
    Modifier,
    StateVar,
    Event,
    Struct,
    Loop,
    Conditional,
    ExternalBoundary,
}

impl NodeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            NodeKind::Contract => "contract",
            NodeKind::Function => "function",
            NodeKind::Constructor => "constructor",
            NodeKind::Modifier => "modifier",
            NodeKind::StateVar => "state_var",
            NodeKind::Event => "event",
            NodeKind::Struct => "struct",
            NodeKind::Loop => "loop",
            NodeKind::Conditional => "conditional",
            NodeKind::ExternalBoundary => "external_boundary",
        }
    }
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeKind {
    DataWrite,
    DataRead,
    InputDependency,
    Initialization,
    SystemicCall,
    Emits,
    GuardedBy,
    Contains,
}

impl EdgeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EdgeKind::DataWrite => "data_write",
            EdgeKind::DataRead => "data_read",
            EdgeKind::InputDependency => "input_dependency",
            EdgeKind::Initialization => "initialization",
            EdgeKind::SystemicCall => "systemic_call",
            EdgeKind::Emits => "emits",
            EdgeKind::GuardedBy => "guarded_by",
            EdgeKind::Contains => "contains",
        }
    }
}

impl fmt::Display for EdgeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphNode {
    pub id: String,
    pub kind: NodeKind,
    pub label: String,
    pub line: usize,
    /// Nesting depth of the statement subtree, loop and conditional nodes only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GraphEdge {
    pub from: String,
    pub to: String,
    pub kind: EdgeKind,
    pub line: usize,
    /// Callee text on systemic_call edges.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl GraphEdge {
    fn sort_key(&self) -> (&str, EdgeKind, &str, usize, Option<&str>) {
        (&self.from, self.kind, &self.to, self.line, self.label.as_deref())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DependencyGraph {
    #[serde(rename = "contract")]
    pub contract_name: String,
    pub nodes: Vec<GraphNode>,
    pub edges: Vec<GraphEdge>,
}

impl DependencyGraph {
    pub fn node(&self, id: &str) -> Option<&GraphNode> {
        self.nodes.iter().find(|n| n.id == id)
    }

    pub fn contains_node(&self, id: &str) -> bool {
        self.node(id).is_some()
    }

    pub fn edges_of_kind(&self, kind: EdgeKind) -> impl Iterator<Item = &GraphEdge> {
        self.edges.iter().filter(move |e| e.kind == kind)
    }

    fn finish(&mut self) {
        self.nodes.sort_by(|a, b| a.id.cmp(&b.id));
        self.nodes.dedup_by(|a, b| a.id == b.id);
        self.edges.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
        self.edges.dedup();
    }
}

pub fn node_id(contract: &str, kind: NodeKind, name: &str) -> String {
    format!("{contract}.{}.{name}", kind.as_str())
}

/// Node ids of `contract.callables()`, in the same order.
pub fn callable_node_ids(contract: &ContractDef) -> Vec<String> {
    let mut seen: BTreeMap<&str, usize> = BTreeMap::new();
    contract
        .callables()
        .map(|f| {
            if f.is_constructor() {
                return node_id(&contract.name, NodeKind::Constructor, "constructor");
            }
            let n = seen.entry(f.name.as_str()).or_insert(0);
            *n += 1;
            if *n == 1 {
                node_id(&contract.name, NodeKind::Function, &f.name)
            } else {
                node_id(&contract.name, NodeKind::Function, &format!("{}#{}", f.name, n))
            }
        })
        .collect()
}

/// Node id of the first callable named `name`.
pub fn function_node_id(contract: &ContractDef, name: &str) -> Option<String> {
    contract.callables().zip(callable_node_ids(contract)).find(|(f, _)| f.name == name).map(|(_, id)| id)
}

pub fn boundary_id(contract: &str) -> String {
    node_id(contract, NodeKind::ExternalBoundary, "external")
}

/// Graph of a contract without ancestors in view. Inherited members that the
/// contract references still get nodes, placed at the referencing line.
pub fn build_graph(contract: &ContractDef) -> DependencyGraph {
    build_graph_with(contract, &[])
}

/// One graph per contract of the unit, with ancestors resolved by name.
pub fn build_unit_graphs(unit: &SourceUnit) -> Vec<DependencyGraph> {
    unit.contracts.iter().map(|c| build_graph_with(c, &unit.ancestors(&c.name))).collect()
}

fn type_base(type_name: &str) -> &str {
    let base = type_name.split('[').next().unwrap_or(type_name).trim();
    base.rsplit('.').next().unwrap_or(base)
}

fn emitted_event(stmt: &Statement) -> Option<&str> {
    let rest = stmt.text.strip_prefix("emit")?.trim_start();
    let name = rest.split('(').next()?.trim();
    let name = name.rsplit('.').next().unwrap_or(name);
    (!name.is_empty()).then_some(name)
}

fn subtree_depth(stmt: &Statement) -> usize {
    1 + stmt.children.iter().filter(|c| c.kind.is_compound()).map(subtree_depth).max().unwrap_or(0)
}

struct Builder<'a> {
    contract: &'a ContractDef,
    ancestors: &'a [&'a ContractDef],
    graph: DependencyGraph,
}

impl Builder<'_> {
    fn add_node(&mut self, kind: NodeKind, name: &str, line: usize) -> String {
        let id = node_id(&self.contract.name, kind, name);
        self.graph.nodes.push(GraphNode { id: id.clone(), kind, label: name.to_string(), line, depth: None });
        id
    }

    fn edge(&mut self, from: &str, to: &str, kind: EdgeKind, line: usize, label: Option<String>) {
        self.graph.edges.push(GraphEdge { from: from.to_string(), to: to.to_string(), kind, line, label });
    }

    fn member_line<T>(
        &self,
        find: impl Fn(&ContractDef) -> Option<&T>,
        line_of: impl Fn(&T) -> usize,
        fallback: usize,
    ) -> Option<usize> {
        std::iter::once(self.contract)
            .chain(self.ancestors.iter().copied())
            .find_map(|c| find(c).map(&line_of))
            .or(if fallback > 0 { Some(fallback) } else { None })
    }

    fn state_var(&mut self, name: &str, fallback: usize) -> String {
        let line = self.member_line(|c| c.state_var(name), |v| v.line, fallback).unwrap_or(fallback);
        self.add_node(NodeKind::StateVar, name, line)
    }

    fn callable(&mut self, f: &FunctionDef, id: &str, call_targets: &BTreeMap<String, Vec<(usize, String)>>) {
        let c = self.contract;
        let state: BTreeSet<String> = f.writes.iter().chain(&f.reads).cloned().collect();
        let stmts = function_statements(f);
        let first_line = |pick: &dyn Fn(&crate::frontend::ScopedStatement<'_>) -> bool| {
            stmts.iter().find(|s| pick(s)).map(|s| s.stmt.line).unwrap_or(f.line_span.start)
        };

        for v in &f.writes {
            let line = first_line(&|s| s.state_writes(&state).any(|n| n == v));
            let to = self.state_var(v, line);
            self.edge(id, &to, EdgeKind::DataWrite, line, None);
            if f.is_constructor() {
                self.edge(id, &to, EdgeKind::Initialization, line, None);
            }
        }
        for v in &f.reads {
            let line = first_line(&|s| s.state_reads(&state).any(|n| n == v));
            let to = self.state_var(v, line);
            self.edge(id, &to, EdgeKind::DataRead, line, None);
            if !f.writes.contains(v) {
                self.edge(&to, id, EdgeKind::InputDependency, f.line_span.start, None);
            }
        }

        for p in &f.params {
            let base = type_base(&p.type_name);
            if let Some(line) = self.member_line(|c| c.structs.iter().find(|s| s.name == base), |s| s.line, 0) {
                let from = self.add_node(NodeKind::Struct, base, line);
                self.edge(&from, id, EdgeKind::InputDependency, f.line_span.start, None);
            }
        }

        for m in &f.modifiers {
            if let Some(line) =
                self.member_line(|c| c.modifiers.iter().find(|d| d.name == m.name), |d| d.line_span.start, 0)
            {
                let to = self.add_node(NodeKind::Modifier, &m.name, line);
                self.edge(id, &to, EdgeKind::GuardedBy, f.line_span.start, None);
            }
        }

        for call in &f.calls {
            match call.kind {
                CallKind::LowLevel | CallKind::ExternalMember => {
                    let to = boundary_id(&c.name);
                    self.edge(id, &to, EdgeKind::SystemicCall, call.line, Some(call.callee.clone()));
                }
                CallKind::Internal if f.is_constructor() => {
                    let name = call.final_segment();
                    if let Some(candidates) = call_targets.get(name) {
                        let target =
                            candidates.iter().find(|(arity, _)| *arity == call.arg_count).unwrap_or(&candidates[0]);
                        let to = target.1.clone();
                        self.edge(id, &to, EdgeKind::Initialization, call.line, None);
                    }
                }
                CallKind::Internal => {}
            }
        }

        for s in &stmts {
            if s.stmt.kind != StatementKind::Emit {
                continue;
            }
            if let Some(name) = emitted_event(s.stmt) {
                let line = self
                    .member_line(|c| c.events.iter().find(|e| e.name == name), |e| e.line, s.stmt.line)
                    .unwrap_or(s.stmt.line);
                let to = self.add_node(NodeKind::Event, name, line);
                self.edge(id, &to, EdgeKind::Emits, s.stmt.line, None);
            }
        }

        let mut ordinal = 0;
        for stmt in &f.body {
            let kind = match stmt.kind {
                StatementKind::Loop => NodeKind::Loop,
                StatementKind::If => NodeKind::Conditional,
                _ => continue,
            };
            ordinal += 1;
            let node = format!("{id}.{}.{ordinal}", kind.as_str());
            self.graph.nodes.push(GraphNode {
                id: node.clone(),
                kind,
                label: format!("{} {ordinal}", kind.as_str()),
                line: stmt.line,
                depth: Some(subtree_depth(stmt)),
            });
            self.edge(id, &node, EdgeKind::Contains, stmt.line, None);
        }
    }
}

fn build_graph_with(contract: &ContractDef, ancestors: &[&ContractDef]) -> DependencyGraph {
    let mut b = Builder {
        contract,
        ancestors,
        graph: DependencyGraph { contract_name: contract.name.clone(), ..Default::default() },
    };
    b.add_node(NodeKind::Contract, &contract.name, contract.line_span.start);
    for v in &contract.state_vars {
        b.add_node(NodeKind::StateVar, &v.name, v.line);
    }
    for e in &contract.events {
        b.add_node(NodeKind::Event, &e.name, e.line);
    }
    for s in &contract.structs {
        b.add_node(NodeKind::Struct, &s.name, s.line);
    }
    for m in &contract.modifiers {
        b.add_node(NodeKind::Modifier, &m.name, m.line_span.start);
    }

    let ids = callable_node_ids(contract);
    let mut call_targets: BTreeMap<String, Vec<(usize, String)>> = BTreeMap::new();
    for (f, id) in contract.callables().zip(&ids) {
        let kind = if f.is_constructor() { NodeKind::Constructor } else { NodeKind::Function };
        b.graph.nodes.push(GraphNode {
            id: id.clone(),
            kind,
            label: f.name.clone(),
            line: f.line_span.start,
            depth: None,
        });
        if !f.is_constructor() {
            call_targets.entry(f.name.clone()).or_default().push((f.params.len(), id.clone()));
        }
    }
    for (f, id) in contract.callables().zip(&ids) {
        b.callable(f, id, &call_targets);
    }
    if b.graph.edges.iter().any(|e| e.kind == EdgeKind::SystemicCall) {
        b.add_node(NodeKind::ExternalBoundary, "external", contract.line_span.start);
    }
    // Inherited members keep the first line seen; own declarations win.
    let mut graph = b.graph;
    let mut first: BTreeMap<String, usize> = BTreeMap::new();
    for (i, n) in graph.nodes.iter().enumerate() {
        first.entry(n.id.clone()).or_insert(i);
    }
    let keep: BTreeSet<usize> = first.into_values().collect();
    graph.nodes = graph.nodes.into_iter().enumerate().filter(|(i, _)| keep.contains(i)).map(|(_, n)| n).collect();
    graph.finish();
    graph
}

/// Induced subgraph on `node_ids` plus their one-hop neighbours.
pub fn subgraph_for_warning(graph: &DependencyGraph, node_ids: &[String]) -> Result<DependencyGraph> {
    for id in node_ids {
        if !graph.contains_node(id) {
            return Err(Error::UnknownNode(id.clone()));
        }
    }
    let seeds: BTreeSet<&str> = node_ids.iter().map(String::as_str).collect();
    let mut keep = seeds.clone();
    for e in &graph.edges {
        if seeds.contains(e.from.as_str()) {
            keep.insert(&e.to);
        }
        if seeds.contains(e.to.as_str()) {
            keep.insert(&e.from);
        }
    }
    Ok(DependencyGraph {
        contract_name: graph.contract_name.clone(),
        nodes: graph.nodes.iter().filter(|n| keep.contains(n.id.as_str())).cloned().collect(),
        edges: graph
            .edges
            .iter()
            .filter(|e| keep.contains(e.from.as_str()) && keep.contains(e.to.as_str()))
            .cloned()
            .collect(),
    })
}
