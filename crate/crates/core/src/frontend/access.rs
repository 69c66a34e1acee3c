//! Variable-function mapping: which state variables each function writes
//! and reads.
//!
//! Writes are assignment targets (`=`, compound assignment), increment and
//! decrement operands, `delete` operands and `.push`/`.pop` receivers, each
//! reduced to its leftmost identifier so `balances[a].amount += 1` writes
//! `balances`. Every other appearance of a state-variable name is a read.
//! Locals and parameters shadow state variables from the statement after
//! their declaration until the end of the enclosing block.

use std::collections::BTreeSet;

use crate::frontend::lexer::{tokenize, Token, TokenKind};
use crate::frontend::parser::{bracket_partners, ASSIGNMENT_OPS};
use crate::model::{ContractDef, FunctionDef, ModifierDef, StateVarDef, Statement, StatementKind};

const DATA_LOCATIONS: &[&str] = &["memory", "storage", "calldata"];

/// Leading words that rule out a declaration.
const STATEMENT_WORDS: &[&str] = &[
    "return", "delete", "emit", "revert", "require", "assert", "if", "for", "while", "do", "try", "else", "new",
    "throw", "break", "continue", "_",
];

/// One assignment operator occurrence inside a statement.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assignment {
    /// Leftmost identifier of the assigned expression.
    pub target: String,
    pub op: String,
    /// Non-member identifiers left of the operator other than the target
    /// (index expressions, mostly).
    pub lhs_idents: Vec<String>,
    /// Non-member identifiers right of the operator.
    pub rhs_idents: Vec<String>,
}

/// Token-level facts about a single statement's own text.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StatementFacts {
    /// Local variables declared by this statement.
    pub declared: Vec<(String, String)>,
    pub assignments: Vec<Assignment>,
    /// Leftmost identifiers mutated by `++`, `--`, `delete`, `.push`, `.pop`.
    pub mutations: Vec<String>,
    /// Non-member identifiers that are neither write targets nor declared names.
    pub reads: Vec<String>,
}

impl StatementFacts {
    pub fn written(&self) -> impl Iterator<Item = &str> {
        self.assignments.iter().map(|a| a.target.as_str()).chain(self.mutations.iter().map(String::as_str))
    }
}

struct Segment<'a> {
    src: &'a str,
    toks: &'a [Token],
    partners: &'a [Option<usize>],
}

impl<'a> Segment<'a> {
    fn text(&self, i: usize) -> &'a str {
        self.toks.get(i).map_or("", |t| t.text(self.src))
    }

    fn is_ident(&self, i: usize) -> bool {
        self.toks.get(i).is_some_and(|t| t.kind == TokenKind::Ident)
    }

    fn close(&self, i: usize) -> Option<usize> {
        self.partners.get(i).copied().flatten().filter(|&c| c > i)
    }

    fn open(&self, i: usize) -> Option<usize> {
        self.partners.get(i).copied().flatten().filter(|&o| o < i)
    }

    /// A non-member identifier: not preceded by `.`.
    fn is_free_ident(&self, i: usize) -> bool {
        self.is_ident(i) && (i == 0 || self.text(i - 1) != ".")
    }

    /// Walks an access chain backwards from `i` (`a.b[c](d)`) to its
    /// leftmost identifier.
    fn chain_root(&self, mut i: usize, lower: usize) -> Option<usize> {
        loop {
            if i < lower {
                return None;
            }
            match self.text(i) {
                "]" | ")" => {
                    let o = self.open(i)?;
                    if o == 0 || o <= lower {
                        return None;
                    }
                    i = o - 1;
                }
                _ if self.is_ident(i) => {
                    if i >= lower + 2 && self.text(i - 1) == "." {
                        i -= 2;
                    } else {
                        return Some(i);
                    }
                }
                _ => return None,
            }
        }
    }

    /// End (exclusive) of a type expression starting at `i`, if one is there.
    fn type_end(&self, i: usize, end: usize) -> Option<usize> {
        let first = self.text(i);
        if !self.is_ident(i) || STATEMENT_WORDS.contains(&first) {
            return None;
        }
        let mut k = i + 1;
        if first == "mapping" {
            if self.text(k) != "(" {
                return None;
            }
            k = self.close(k)? + 1;
        } else {
            while k + 1 < end && self.text(k) == "." && self.is_ident(k + 1) {
                k += 2;
            }
            if first == "address" && self.text(k) == "payable" {
                k += 1;
            }
        }
        while k < end && self.text(k) == "[" {
            k = self.close(k)? + 1;
        }
        Some(k)
    }

    /// `Type [location] name` at `i..end`, followed by the end or `=`.
    fn declaration(&self, i: usize, end: usize) -> Option<(usize, usize)> {
        let type_end = self.type_end(i, end)?;
        let mut k = type_end;
        if DATA_LOCATIONS.contains(&self.text(k)) {
            k += 1;
        }
        if k < end && self.is_ident(k) && (k + 1 == end || self.text(k + 1) == "=") && k > i {
            Some((type_end, k))
        } else {
            None
        }
    }

    fn type_text(&self, a: usize, b: usize) -> String {
        let mut out = String::new();
        for k in a..b {
            let word = self.is_ident(k);
            if word && !out.is_empty() && out.ends_with(|c: char| c.is_ascii_alphanumeric() || c == '_') {
                out.push(' ');
            }
            out.push_str(self.text(k));
        }
        out
    }

    /// Facts for tokens `a..b` treated as one expression statement.
    fn analyze(&self, a: usize, b: usize, facts: &mut StatementFacts) {
        if a >= b {
            return;
        }
        let mut targets: BTreeSet<usize> = BTreeSet::new();
        let mut declared_at: BTreeSet<usize> = BTreeSet::new();

        // declarations
        let mut ops = Vec::new();
        let mut k = a;
        while k < b {
            let t = self.text(k);
            if ASSIGNMENT_OPS.contains(&t) {
                ops.push(k);
            }
            k = match t {
                "(" | "[" | "{" => self.close(k).map_or(k + 1, |c| c + 1),
                _ => k + 1,
            };
        }
        let lhs_end = ops.first().copied().unwrap_or(b);
        let mut is_declaration = false;
        if self.text(a) == "(" && self.close(a) == Some(lhs_end.saturating_sub(1)) && !ops.is_empty() {
            // tuple: `(a, b) = ...` or `(bool ok, ) = ...`
            let close = lhs_end - 1;
            let mut seg = a + 1;
            for e in (a + 1..=close).filter(|&e| e == close || self.text(e) == ",") {
                if let Some((te, name)) = self.declaration(seg, e) {
                    facts.declared.push((self.text(name).to_string(), self.type_text(seg, te)));
                    declared_at.extend(seg..=name);
                    is_declaration = true;
                } else if let Some(root) = (seg..e).find(|&x| self.is_ident(x)) {
                    targets.insert(root);
                }
                seg = e + 1;
            }
            if is_declaration {
                // mixed tuples do not exist; the non-declared slots were blanks
                targets.clear();
            }
        } else if let Some((te, name)) = self.declaration(a, lhs_end) {
            facts.declared.push((self.text(name).to_string(), self.type_text(a, te)));
            declared_at.extend(a..=name);
            is_declaration = true;
        } else if !ops.is_empty() {
            if let Some(root) = (a..lhs_end).find(|&x| self.is_ident(x)) {
                targets.insert(root);
            }
        }
        // chained `x = y = z`: every segment but the last is assigned
        for w in ops.windows(2) {
            if let Some(root) = (w[0] + 1..w[1]).find(|&x| self.is_ident(x)) {
                targets.insert(root);
            }
        }

        if !is_declaration {
            for (n, &op) in ops.iter().enumerate() {
                let lhs_start = if n == 0 { a } else { ops[n - 1] + 1 };
                let rhs_end = ops.get(n + 1).copied().unwrap_or(b);
                let lhs_targets: Vec<usize> = targets.range(lhs_start..op).copied().collect();
                let lhs_idents: Vec<String> = (lhs_start..op)
                    .filter(|x| !lhs_targets.contains(x) && self.is_free_ident(*x))
                    .map(|x| self.text(x).to_string())
                    .collect();
                let rhs_idents: Vec<String> =
                    (op + 1..rhs_end).filter(|&x| self.is_free_ident(x)).map(|x| self.text(x).to_string()).collect();
                for target in lhs_targets {
                    facts.assignments.push(Assignment {
                        target: self.text(target).to_string(),
                        op: self.text(op).to_string(),
                        lhs_idents: lhs_idents.clone(),
                        rhs_idents: rhs_idents.clone(),
                    });
                }
            }
        }

        // mutations
        let mut mutated: BTreeSet<usize> = BTreeSet::new();
        for k in a..b {
            match self.text(k) {
                "delete" if self.is_ident(k + 1) && k + 1 < b => {
                    mutated.insert(k + 1);
                }
                "++" | "--" => {
                    let prefix = k + 1 < b
                        && self.is_ident(k + 1)
                        && (k == a || !(self.is_ident(k - 1) || matches!(self.text(k - 1), ")" | "]")));
                    if prefix {
                        mutated.insert(k + 1);
                    } else if k > a {
                        if let Some(root) = self.chain_root(k - 1, a) {
                            mutated.insert(root);
                        }
                    }
                }
                "." if k > a && k + 2 < b && matches!(self.text(k + 1), "push" | "pop") && self.text(k + 2) == "(" => {
                    if let Some(root) = self.chain_root(k - 1, a) {
                        mutated.insert(root);
                    }
                }
                _ => {}
            }
        }
        for &m in &mutated {
            if !targets.contains(&m) {
                facts.mutations.push(self.text(m).to_string());
            }
        }

        for x in a..b {
            if self.is_free_ident(x) && !targets.contains(&x) && !mutated.contains(&x) && !declared_at.contains(&x) {
                facts.reads.push(self.text(x).to_string());
            }
        }
    }
}

/// Token-level facts for one statement (its header only, for compound kinds).
pub fn statement_facts(stmt: &Statement) -> StatementFacts {
    let src = stmt.text.as_str();
    let toks = tokenize(src);
    let partners = bracket_partners(src, &toks);
    let seg = Segment { src, toks: &toks, partners: &partners };
    let mut facts = StatementFacts::default();
    let mut n = toks.len();
    if seg.text(n.wrapping_sub(1)) == ";" {
        n -= 1;
    }
    match stmt.kind {
        StatementKind::Loop if seg.text(0) == "for" => {
            // for (init; cond; post)
            if let Some(close) = seg.close(1) {
                let mut start = 2;
                for k in 2..=close {
                    if k == close || seg.text(k) == ";" {
                        seg.analyze(start, k, &mut facts);
                        start = k + 1;
                    }
                }
            }
        }
        StatementKind::If | StatementKind::Loop => {
            // `if (...)`, `while (...)`, `do while (...)`: pure conditions
            let open = (0..n).find(|&k| seg.text(k) == "(").unwrap_or(n);
            seg.analyze(open, n, &mut facts);
        }
        StatementKind::TryCatch => seg.analyze(1, n, &mut facts),
        _ => seg.analyze(0, n, &mut facts),
    }
    facts
}

/// A body statement with its own facts and the locals visible at that
/// point (parameters, returns and earlier declarations in enclosing blocks).
#[derive(Clone, Debug)]
pub struct ScopedStatement<'a> {
    pub stmt: &'a Statement,
    pub facts: StatementFacts,
    /// 0 for top-level statements of the body.
    pub depth: usize,
    pub locals: BTreeSet<String>,
}

impl ScopedStatement<'_> {
    /// True when `name` refers to a member of `state` at this statement.
    pub fn is_state(&self, state: &BTreeSet<String>, name: &str) -> bool {
        state.contains(name) && !self.locals.contains(name)
    }

    pub fn state_writes<'s>(&'s self, state: &'s BTreeSet<String>) -> impl Iterator<Item = &'s str> {
        self.facts.written().filter(move |n| self.is_state(state, n))
    }

    pub fn state_reads<'s>(&'s self, state: &'s BTreeSet<String>) -> impl Iterator<Item = &'s str> {
        self.facts.reads.iter().map(String::as_str).filter(move |n| self.is_state(state, n))
    }
}

/// Pre-order walk of `body` with block scoping applied.
pub fn scoped_statements<'a>(
    params: impl IntoIterator<Item = String>,
    body: &'a [Statement],
) -> Vec<ScopedStatement<'a>> {
    fn walk<'a>(
        stmts: &'a [Statement],
        depth: usize,
        scopes: &mut Vec<BTreeSet<String>>,
        out: &mut Vec<ScopedStatement<'a>>,
    ) {
        for stmt in stmts {
            let facts = statement_facts(stmt);
            let declared: BTreeSet<String> = facts.declared.iter().map(|(n, _)| n.clone()).collect();
            let locals = scopes.iter().flatten().cloned().collect();
            out.push(ScopedStatement { stmt, facts, depth, locals });
            if stmt.kind.is_compound() {
                scopes.push(declared);
                walk(&stmt.children, depth + 1, scopes, out);
                scopes.pop();
            } else if let Some(scope) = scopes.last_mut() {
                scope.extend(declared);
            }
        }
    }
    let mut scopes = vec![params.into_iter().filter(|p| !p.is_empty()).collect()];
    let mut out = Vec::new();
    walk(body, 0, &mut scopes, &mut out);
    out
}

/// Scoped statements of a function body; parameters and named returns are
/// locals throughout.
pub fn function_statements(f: &FunctionDef) -> Vec<ScopedStatement<'_>> {
    scoped_statements(f.params.iter().chain(&f.returns).map(|p| p.name.clone()), &f.body)
}

fn resolve_body(
    params: impl Iterator<Item = String>,
    body: &[Statement],
    state: &BTreeSet<String>,
) -> (BTreeSet<String>, BTreeSet<String>) {
    let mut writes = BTreeSet::new();
    let mut reads = BTreeSet::new();
    for s in scoped_statements(params, body) {
        writes.extend(s.state_writes(state).map(str::to_string));
        reads.extend(s.state_reads(state).map(str::to_string));
    }
    (writes, reads)
}

fn resolve_function(f: &mut FunctionDef, state: &BTreeSet<String>) {
    let names = f.params.iter().chain(&f.returns).map(|p| p.name.clone()).collect::<Vec<_>>();
    let (writes, reads) = resolve_body(names.into_iter(), &f.body, state);
    f.writes = writes;
    f.reads = reads;
}

fn resolve_modifier(m: &mut ModifierDef, state: &BTreeSet<String>) {
    let names = m.params.iter().map(|p| p.name.clone()).collect::<Vec<_>>();
    let (writes, reads) = resolve_body(names.into_iter(), &m.body, state);
    m.writes = writes;
    m.reads = reads;
}

/// Populates `writes`/`reads` of every function, the constructor and every
/// modifier. `inherited` holds state variables of parsed ancestors; the
/// contract's own declarations take precedence.
pub fn resolve_access_sets(contract: &ContractDef, inherited: &[StateVarDef]) -> ContractDef {
    let state: BTreeSet<String> = contract.state_vars.iter().chain(inherited).map(|v| v.name.clone()).collect();
    let mut out = contract.clone();
    for f in out.functions.iter_mut().chain(out.constructor.iter_mut()) {
        resolve_function(f, &state);
    }
    for m in &mut out.modifiers {
        resolve_modifier(m, &state);
    }
    out
}

/// Every local and parameter name a function introduces, ignoring scope.
pub fn local_names(f: &FunctionDef) -> BTreeSet<String> {
    let mut names: BTreeSet<String> =
        f.params.iter().chain(&f.returns).filter(|p| !p.name.is_empty()).map(|p| p.name.clone()).collect();
    for s in f.flat_statements() {
        names.extend(statement_facts(s).declared.into_iter().map(|(n, _)| n));
    }
    names
}
