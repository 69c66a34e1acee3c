//! Structured inventory of a Solidity source unit.
//!
//! Everything here is plain data produced by the frontend. Values are
//! immutable once [`crate::parse_source`] returns and can be shared freely
//! between threads.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

/// 1-based inclusive line range.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LineSpan {
    pub start: usize,
    pub end: usize,
}

impl LineSpan {
    pub fn new(start: usize, end: usize) -> Self {
        Self { start, end: end.max(start) }
    }

    pub fn contains(&self, line: usize) -> bool {
        self.start <= line && line <= self.end
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SourceUnit {
    pub path: String,
    pub pragmas: Vec<String>,
    pub imports: Vec<ImportRef>,
    pub contracts: Vec<ContractDef>,
    pub diagnostics: Vec<ParseDiagnostic>,
}

impl SourceUnit {
    pub fn contract(&self, name: &str) -> Option<&ContractDef> {
        self.contracts.iter().find(|c| c.name == name)
    }

    pub fn has_errors(&self) -> bool {
        self.diagnostics.iter().any(|d| d.severity == DiagnosticSeverity::Error)
    }

    /// Parsed ancestors of `name`, nearest first (depth-first over the
    /// `is` list, each contract once, cycles ignored).
    pub fn ancestors(&self, name: &str) -> Vec<&ContractDef> {
        let mut out: Vec<&ContractDef> = Vec::new();
        let mut stack: Vec<&str> = vec![name];
        let mut seen: BTreeSet<&str> = BTreeSet::from([name]);
        while let Some(current) = stack.pop() {
            let Some(c) = self.contract(current) else { continue };
            for parent in c.inherits.iter().rev() {
                if seen.insert(parent.as_str()) {
                    if let Some(p) = self.contract(parent) {
                        out.push(p);
                        stack.push(parent.as_str());
                    }
                }
            }
        }
        out
    }

    /// Parsed contracts that inherit from `name`, directly or not.
    pub fn descendants(&self, name: &str) -> Vec<&ContractDef> {
        self.contracts
            .iter()
            .filter(|c| c.name != name && self.ancestors(&c.name).iter().any(|a| a.name == name))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImportRef {
    pub path: String,
    pub line: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContractKind {
    Contract,
    Interface,
    Library,
}

impl ContractKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ContractKind::Contract => "contract",
            ContractKind::Interface => "interface",
            ContractKind::Library => "library",
        }
    }
}

impl fmt::Display for ContractKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContractDef {
    pub name: String,
    pub kind: ContractKind,
    pub is_abstract: bool,
    pub inherits: Vec<String>,
    pub state_vars: Vec<StateVarDef>,
    pub functions: Vec<FunctionDef>,
    pub modifiers: Vec<ModifierDef>,
    pub events: Vec<EventDef>,
    pub structs: Vec<StructDef>,
    pub constructor: Option<FunctionDef>,
    /// `using X for Y;` directives, library name only.
    pub using_for: Vec<String>,
    pub line_span: LineSpan,
}

impl ContractDef {
    pub fn new(name: impl Into<String>, kind: ContractKind, line: usize) -> Self {
        Self {
            name: name.into(),
            kind,
            is_abstract: false,
            inherits: Vec::new(),
            state_vars: Vec::new(),
            functions: Vec::new(),
            modifiers: Vec::new(),
            events: Vec::new(),
            structs: Vec::new(),
            constructor: None,
            using_for: Vec::new(),
            line_span: LineSpan::new(line, line),
        }
    }

    pub fn state_var(&self, name: &str) -> Option<&StateVarDef> {
        self.state_vars.iter().find(|v| v.name == name)
    }

    pub fn function(&self, name: &str) -> Option<&FunctionDef> {
        self.functions.iter().find(|f| f.name == name)
    }

    /// Regular functions followed by the constructor, if any.
    pub fn callables(&self) -> impl Iterator<Item = &FunctionDef> {
        self.functions.iter().chain(self.constructor.iter())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Visibility {
    Public,
    External,
    Internal,
    Private,
    Default,
}

impl Visibility {
    pub fn is_entry_point(self) -> bool {
        matches!(self, Visibility::Public | Visibility::External)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateVarDef {
    pub name: String,
    pub type_name: String,
    pub visibility: Visibility,
    pub is_constant: bool,
    pub is_immutable: bool,
    pub line: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mutability {
    None,
    View,
    Pure,
    Payable,
}

impl Mutability {
    pub fn as_str(self) -> &'static str {
        match self {
            Mutability::None => "nonpayable",
            Mutability::View => "view",
            Mutability::Pure => "pure",
            Mutability::Payable => "payable",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParamDef {
    /// Type text without data location, whitespace-normalized.
    pub type_name: String,
    /// Empty for unnamed parameters.
    pub name: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModifierInvocation {
    pub name: String,
    /// Raw argument text between the parentheses, `None` when written without them.
    pub args: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctionDef {
    pub name: String,
    pub visibility: Visibility,
    pub mutability: Mutability,
    pub is_virtual: bool,
    pub modifiers: Vec<ModifierInvocation>,
    pub params: Vec<ParamDef>,
    pub returns: Vec<ParamDef>,
    /// `false` for declarations terminated by `;`.
    pub implemented: bool,
    pub body: Vec<Statement>,
    pub line_span: LineSpan,
    pub writes: BTreeSet<String>,
    pub reads: BTreeSet<String>,
    pub calls: Vec<CallSite>,
}

impl FunctionDef {
    pub fn new(name: impl Into<String>, line: usize) -> Self {
        Self {
            name: name.into(),
            visibility: Visibility::Default,
            mutability: Mutability::None,
            is_virtual: false,
            modifiers: Vec::new(),
            params: Vec::new(),
            returns: Vec::new(),
            implemented: false,
            body: Vec::new(),
            line_span: LineSpan::new(line, line),
            writes: BTreeSet::new(),
            reads: BTreeSet::new(),
            calls: Vec::new(),
        }
    }

    pub fn is_constructor(&self) -> bool {
        self.name == "constructor"
    }

    /// Body statements in source order, each statement before its children.
    pub fn flat_statements(&self) -> Vec<&Statement> {
        flatten(&self.body)
    }

    pub fn has_modifier_containing(&self, needle: &str) -> bool {
        let needle = needle.to_ascii_lowercase();
        self.modifiers.iter().any(|m| m.name.to_ascii_lowercase().contains(&needle))
    }
}

pub fn flatten(stmts: &[Statement]) -> Vec<&Statement> {
    fn walk<'a>(stmts: &'a [Statement], out: &mut Vec<&'a Statement>) {
        for s in stmts {
            out.push(s);
            walk(&s.children, out);
        }
    }
    let mut out = Vec::new();
    walk(stmts, &mut out);
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModifierDef {
    pub name: String,
    pub params: Vec<ParamDef>,
    pub body: Vec<Statement>,
    pub line_span: LineSpan,
    pub writes: BTreeSet<String>,
    pub reads: BTreeSet<String>,
    pub calls: Vec<CallSite>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EventDef {
    pub name: String,
    pub params: Vec<ParamDef>,
    pub line: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructDef {
    pub name: String,
    pub fields: Vec<ParamDef>,
    pub line: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StatementKind {
    Assignment,
    Require,
    Assert,
    Revert,
    If,
    Loop,
    Emit,
    Call,
    Return,
    TryCatch,
    Other,
}

impl StatementKind {
    pub fn is_compound(self) -> bool {
        matches!(self, StatementKind::If | StatementKind::Loop | StatementKind::TryCatch)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Statement {
    pub kind: StatementKind,
    pub line: usize,
    /// Comment-free source text. For compound statements this is the header
    /// only (`if (...)`, `for (...)`, `try ...`); bodies live in `children`.
    pub text: String,
    pub children: Vec<Statement>,
    /// Call sites in this statement's own text, excluding children.
    pub calls: Vec<CallSite>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CallKind {
    Internal,
    ExternalMember,
    LowLevel,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CallSite {
    /// Dotted callee text with whitespace removed, e.g. `token.transfer`.
    pub callee: String,
    pub kind: CallKind,
    pub line: usize,
    pub arg_count: usize,
    /// Byte offset of the callee name in the source; orders calls on one line.
    pub offset: usize,
}

impl CallSite {
    pub fn final_segment(&self) -> &str {
        self.callee.rsplit('.').next().unwrap_or(&self.callee)
    }

    /// Everything before the final segment, if the callee is dotted.
    pub fn receiver(&self) -> Option<&str> {
        self.callee.rsplit_once('.').map(|(r, _)| r)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiagnosticSeverity {
    Warning,
    Error,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseDiagnostic {
    pub line: usize,
    pub severity: DiagnosticSeverity,
    pub message: String,
}

impl ParseDiagnostic {
    pub fn warning(line: usize, message: impl Into<String>) -> Self {
        Self { line, severity: DiagnosticSeverity::Warning, message: message.into() }
    }

    pub fn error(line: usize, message: impl Into<String>) -> Self {
        Self { line, severity: DiagnosticSeverity::Error, message: message.into() }
    }
}
