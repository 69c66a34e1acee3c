//! Tolerant brace-tracking parser.
//!
//! Declarations are recognized by their leading keyword; statements are
//! classified by their first token. Expressions are never parsed beyond the
//! token level. Any region the parser cannot make sense of becomes a
//! [`ParseDiagnostic`] and parsing resumes at the next brace-balanced point.

use crate::frontend::lexer::{Token, TokenKind};
use crate::model::*;

const STATE_VAR_ATTRIBUTES: &[&str] =
    &["public", "private", "internal", "constant", "immutable", "override", "transient"];

const DATA_LOCATIONS: &[&str] = &["memory", "storage", "calldata"];

/// Words that may precede `(` without denoting a call.
const NON_CALL_WORDS: &[&str] = &[
    "if",
    "else",
    "for",
    "while",
    "do",
    "return",
    "returns",
    "emit",
    "new",
    "delete",
    "catch",
    "try",
    "require",
    "assert",
    "revert",
    "mapping",
    "function",
    "modifier",
    "event",
    "error",
    "type",
    "keccak256",
    "sha256",
    "sha3",
    "ripemd160",
    "ecrecover",
    "addmod",
    "mulmod",
    "blockhash",
    "gasleft",
    "selfdestruct",
    "suicide",
    "assembly",
    "unchecked",
];

const ARRAY_BUILTINS: &[&str] = &["push", "pop"];
const BUILTIN_NAMESPACES: &[&str] = &["abi", "bytes", "string"];
const SAFE_MATH_METHODS: &[&str] = &["add", "sub", "mul", "div", "mod"];
const SELECTOR_ENCODERS: &[&str] = &["encodeWithSelector", "encodeWithSignature", "encodeCall"];

pub(crate) const ASSIGNMENT_OPS: &[&str] = &["=", "+=", "-=", "*=", "/=", "%=", "|=", "&=", "^=", "<<=", ">>=", ">>>="];

pub fn is_elementary_type(word: &str) -> bool {
    let sized = |prefix: &str| {
        word.strip_prefix(prefix).is_some_and(|rest| rest.is_empty() || rest.chars().all(|c| c.is_ascii_digit()))
    };
    matches!(word, "address" | "payable" | "bool" | "string" | "byte")
        || sized("uint")
        || sized("int")
        || sized("bytes")
        || word.starts_with("fixed")
        || word.starts_with("ufixed")
}

/// Bracket partner for every `(`/`)`, `[`/`]`, `{`/`}` token. Each bracket
/// kind is matched independently so one stray closer cannot derail the rest.
pub(crate) fn bracket_partners(src: &str, toks: &[Token]) -> Vec<Option<usize>> {
    let mut partners = vec![None; toks.len()];
    let mut stacks: [Vec<usize>; 3] = [Vec::new(), Vec::new(), Vec::new()];
    for (i, t) in toks.iter().enumerate() {
        if t.kind != TokenKind::Punct {
            continue;
        }
        let (slot, open) = match t.text(src) {
            "(" => (0, true),
            ")" => (0, false),
            "[" => (1, true),
            "]" => (1, false),
            "{" => (2, true),
            "}" => (2, false),
            _ => continue,
        };
        if open {
            stacks[slot].push(i);
        } else if let Some(o) = stacks[slot].pop() {
            partners[o] = Some(i);
            partners[i] = Some(o);
        }
    }
    partners
}

pub(crate) struct Parser<'a> {
    src: &'a str,
    raw: &'a str,
    toks: Vec<Token>,
    partners: Vec<Option<usize>>,
    pos: usize,
    pub(crate) diagnostics: Vec<ParseDiagnostic>,
}

impl<'a> Parser<'a> {
    pub(crate) fn new(src: &'a str, raw: &'a str, toks: Vec<Token>) -> Self {
        let partners = bracket_partners(src, &toks);
        Self { src, raw, toks, partners, pos: 0, diagnostics: Vec::new() }
    }

    fn text(&self, i: usize) -> &'a str {
        match self.toks.get(i) {
            Some(t) => t.text(self.src),
            None => "",
        }
    }

    fn kind(&self, i: usize) -> Option<TokenKind> {
        self.toks.get(i).map(|t| t.kind)
    }

    fn is_ident(&self, i: usize) -> bool {
        self.kind(i) == Some(TokenKind::Ident)
    }

    fn line(&self, i: usize) -> usize {
        match self.toks.get(i) {
            Some(t) => t.line,
            None => self.toks.last().map_or(1, |t| t.line),
        }
    }

    /// Closing partner of the bracket at `i`, if it lies before `limit`.
    fn close_of(&self, i: usize, limit: usize) -> Option<usize> {
        self.partners[i].filter(|&c| c > i && c < limit)
    }

    fn error(&mut self, at: usize, msg: impl Into<String>) {
        let line = self.line(at);
        self.diagnostics.push(ParseDiagnostic::error(line, msg));
    }

    fn warn(&mut self, at: usize, msg: impl Into<String>) {
        let line = self.line(at);
        self.diagnostics.push(ParseDiagnostic::warning(line, msg));
    }

    /// Source text of tokens `a..=b` with whitespace runs collapsed.
    fn slice_text(&self, a: usize, b: usize) -> String {
        if a > b || b >= self.toks.len() {
            return String::new();
        }
        let s = &self.src[self.toks[a].start..self.toks[b].end];
        s.split_whitespace().collect::<Vec<_>>().join(" ")
    }

    /// Canonical spelling of tokens `a..b`: words separated by one space,
    /// punctuation glued, `=>` spaced.
    fn join_tokens(&self, a: usize, b: usize) -> String {
        let mut out = String::new();
        let mut prev_word = false;
        for i in a..b.min(self.toks.len()) {
            let t = self.text(i);
            let word = matches!(self.kind(i), Some(TokenKind::Ident | TokenKind::Number));
            if t == "=>" {
                out.push_str(" => ");
                prev_word = false;
                continue;
            }
            if word && prev_word {
                out.push(' ');
            }
            out.push_str(t);
            prev_word = word;
        }
        out
    }

    /// Skips one unrecognized construct: up to and including the next `;` at
    /// depth zero, or a whole brace-balanced block. Stops before a closing
    /// brace that would end the enclosing scope.
    fn skip_construct(&mut self, limit: usize) {
        while self.pos < limit {
            match self.text(self.pos) {
                ";" => {
                    self.pos += 1;
                    return;
                }
                "{" => {
                    self.pos = match self.close_of(self.pos, limit) {
                        Some(c) => c + 1,
                        None => limit,
                    };
                    if self.text(self.pos) == ";" {
                        self.pos += 1;
                    }
                    return;
                }
                "(" | "[" => {
                    self.pos = self.close_of(self.pos, limit).map_or(self.pos + 1, |c| c + 1);
                }
                "}" => return,
                _ => self.pos += 1,
            }
        }
    }

    // ---------------------------------------------------------------- unit

    pub(crate) fn parse_unit(&mut self, unit: &mut SourceUnit) {
        let n = self.toks.len();
        while self.pos < n {
            let start = self.pos;
            match self.text(self.pos) {
                "pragma" => {
                    let end = self.find_semicolon(self.pos + 1, n);
                    if self.text(end) != ";" && end < n {
                        self.error(start, "malformed pragma");
                    }
                    if self.text(self.pos + 1) == "solidity" {
                        let v = self.slice_text(self.pos + 2, end.saturating_sub(1));
                        unit.pragmas.push(v);
                    }
                    self.pos = end + 1;
                }
                "import" => {
                    let mut from = self.pos + 1;
                    if self.text(from) == "{" {
                        from = self.close_of(from, n).map_or(n, |c| c + 1);
                    }
                    let end = self.find_semicolon(from, n);
                    let path = (self.pos + 1..end).find(|&i| self.kind(i) == Some(TokenKind::Str)).map(|i| {
                        let t = self.toks[i];
                        self.raw[t.start..t.end].trim_matches(|c| c == '"' || c == '\'').to_string()
                    });
                    match path {
                        Some(path) => unit.imports.push(ImportRef { path, line: self.line(start) }),
                        None => self.warn(start, "import without a path literal"),
                    }
                    self.pos = end + 1;
                }
                "abstract" if self.text(self.pos + 1) == "contract" => {
                    self.pos += 1;
                    self.parse_contract(unit, true, start);
                }
                "contract" | "interface" | "library" => self.parse_contract(unit, false, start),
                "struct" | "enum" | "function" | "error" | "event" | "using" | "type" => self.skip_construct(n),
                ";" => self.pos += 1,
                "}" => {
                    self.error(self.pos, "unmatched closing brace");
                    self.pos += 1;
                }
                _ => {
                    // File-level constants are the only other legal form.
                    let semi = self.find_semicolon(self.pos, n);
                    if !self.is_ident(self.pos) || self.text(semi) != ";" {
                        self.error(self.pos, format!("unexpected `{}` at top level", self.text(self.pos)));
                    }
                    self.skip_construct(n);
                }
            }
            if self.pos == start {
                self.pos += 1;
            }
        }
    }

    /// Index of the next `;` at bracket depth zero, or `limit` (clamped to the
    /// last token) if there is none.
    fn find_semicolon(&self, from: usize, limit: usize) -> usize {
        let mut i = from;
        while i < limit {
            match self.text(i) {
                ";" => return i,
                "(" | "[" => i = self.close_of(i, limit).map_or(i + 1, |c| c + 1),
                "{" | "}" => return i.min(limit),
                _ => i += 1,
            }
        }
        limit.min(self.toks.len())
    }

    fn parse_contract(&mut self, unit: &mut SourceUnit, is_abstract: bool, start: usize) {
        let n = self.toks.len();
        let kind = match self.text(self.pos) {
            "interface" => ContractKind::Interface,
            "library" => ContractKind::Library,
            _ => ContractKind::Contract,
        };
        self.pos += 1;
        if !self.is_ident(self.pos) {
            self.error(self.pos, format!("expected {} name", kind));
            self.skip_construct(n);
            return;
        }
        let mut contract = ContractDef::new(self.text(self.pos), kind, self.line(start));
        contract.is_abstract = is_abstract;
        self.pos += 1;

        if self.text(self.pos) == "is" {
            self.pos += 1;
            let mut expect_name = true;
            while self.pos < n && self.text(self.pos) != "{" {
                match self.text(self.pos) {
                    "," => {
                        expect_name = true;
                        self.pos += 1;
                    }
                    "(" => self.pos = self.close_of(self.pos, n).map_or(self.pos + 1, |c| c + 1),
                    _ if expect_name && self.is_ident(self.pos) => {
                        let mut name = self.text(self.pos).to_string();
                        self.pos += 1;
                        while self.text(self.pos) == "." && self.is_ident(self.pos + 1) {
                            name = format!("{}.{}", name, self.text(self.pos + 1));
                            self.pos += 2;
                        }
                        contract.inherits.push(name);
                        expect_name = false;
                    }
                    ";" | "}" => break,
                    _ => self.pos += 1,
                }
            }
        }

        if self.text(self.pos) != "{" {
            self.error(self.pos, format!("expected `{{` after {} `{}`", kind, contract.name));
            self.skip_construct(n);
            return;
        }
        let open = self.pos;
        let body_end = match self.close_of(open, n) {
            Some(c) => c,
            None => {
                self.error(open, format!("unterminated body of {} `{}`", kind, contract.name));
                n
            }
        };
        self.pos = open + 1;
        self.parse_members(&mut contract, body_end);
        contract.line_span = LineSpan::new(self.line(start), self.line(body_end));
        self.pos = body_end + 1;

        if unit.contracts.iter().any(|c| c.name == contract.name && c.kind == contract.kind) {
            self.diagnostics.push(ParseDiagnostic::error(
                contract.line_span.start,
                format!("duplicate {} `{}` ignored", kind, contract.name),
            ));
        } else {
            unit.contracts.push(contract);
        }
    }

    fn parse_members(&mut self, contract: &mut ContractDef, end: usize) {
        while self.pos < end {
            let start = self.pos;
            match self.text(self.pos) {
                "function" | "constructor" => self.parse_function_into(contract, end),
                "fallback" | "receive" if self.text(self.pos + 1) == "(" => self.parse_function_into(contract, end),
                "modifier" => {
                    if let Some(m) = self.parse_modifier(end) {
                        contract.modifiers.push(m);
                    }
                }
                "event" => {
                    if let Some(e) = self.parse_event(end) {
                        contract.events.push(e);
                    }
                }
                "struct" => {
                    if let Some(s) = self.parse_struct(end) {
                        contract.structs.push(s);
                    }
                }
                "using" => {
                    if self.is_ident(self.pos + 1) {
                        contract.using_for.push(self.text(self.pos + 1).to_string());
                    }
                    self.skip_construct(end);
                }
                "enum" | "error" | "type" => self.skip_construct(end),
                ";" => self.pos += 1,
                "}" => {
                    self.error(self.pos, "unmatched closing brace");
                    self.pos += 1;
                }
                _ => {
                    if let Some(v) = self.parse_state_var(end) {
                        contract.state_vars.push(v);
                    }
                }
            }
            if self.pos == start {
                self.pos += 1;
            }
        }
    }

    fn parse_state_var(&mut self, end: usize) -> Option<StateVarDef> {
        let start = self.pos;
        let mut i = start;
        let mut semi = None;
        while i < end {
            match self.text(i) {
                ";" => {
                    semi = Some(i);
                    break;
                }
                "(" | "[" => i = self.close_of(i, end).map_or(i + 1, |c| c + 1),
                "{" | "}" => break,
                _ => i += 1,
            }
        }
        let Some(semi) = semi else {
            self.error(start, format!("unrecognized contract member starting with `{}`", self.text(start)));
            self.pos = i;
            self.skip_construct(end);
            return None;
        };
        self.pos = semi + 1;

        let decl_end = (start..semi).find(|&k| self.text(k) == "=").unwrap_or(semi);
        let mut attrs_from = None;
        let mut name_at = None;
        let mut k = start;
        while k < decl_end {
            let t = self.text(k);
            if STATE_VAR_ATTRIBUTES.contains(&t) {
                attrs_from.get_or_insert(k);
            } else if t == "(" {
                k = self.close_of(k, decl_end).unwrap_or(k);
            } else if self.is_ident(k) && k > start {
                name_at = Some(k);
            }
            k += 1;
        }
        let Some(name_at) = name_at.filter(|&n| n > start && attrs_from.is_none_or(|a| n > a)) else {
            self.error(start, "malformed state variable declaration");
            return None;
        };
        let type_end = attrs_from.map_or(name_at, |a| a.min(name_at));
        let attrs: Vec<&str> = (type_end..decl_end).map(|k| self.text(k)).collect();
        let visibility = if attrs.contains(&"public") {
            Visibility::Public
        } else if attrs.contains(&"private") {
            Visibility::Private
        } else if attrs.contains(&"internal") {
            Visibility::Internal
        } else {
            Visibility::Default
        };
        Some(StateVarDef {
            name: self.text(name_at).to_string(),
            type_name: self.join_tokens(start, type_end),
            visibility,
            is_constant: attrs.contains(&"constant"),
            is_immutable: attrs.contains(&"immutable"),
            line: self.line(start),
        })
    }

    /// Parameters inside the parenthesis pair starting at `open`.
    fn parse_params(&self, open: usize, close: usize) -> Vec<ParamDef> {
        let mut params = Vec::new();
        let mut seg_start = open + 1;
        let mut i = open + 1;
        let push = |parser: &Self, a: usize, b: usize, params: &mut Vec<ParamDef>| {
            let idx: Vec<usize> = (a..b)
                .filter(|&k| {
                    let t = parser.text(k);
                    !DATA_LOCATIONS.contains(&t) && t != "indexed"
                })
                .collect();
            if idx.is_empty() {
                return;
            }
            let last = *idx.last().unwrap();
            let named = idx.len() >= 2
                && parser.is_ident(last)
                && !(parser.text(last) == "payable" && parser.text(idx[idx.len() - 2]) == "address")
                && parser.text(idx[idx.len() - 2]) != ".";
            let (type_idx, name) =
                if named { (&idx[..idx.len() - 1], parser.text(last).to_string()) } else { (&idx[..], String::new()) };
            let type_name = match (type_idx.first(), type_idx.last()) {
                (Some(&f), Some(&l)) => {
                    // data locations can only sit between type and name, so the
                    // type tokens are contiguous
                    parser.join_tokens(f, l + 1)
                }
                _ => String::new(),
            };
            params.push(ParamDef { type_name, name });
        };
        while i < close {
            match self.text(i) {
                "," => {
                    push(self, seg_start, i, &mut params);
                    seg_start = i + 1;
                    i += 1;
                }
                "(" | "[" | "{" => i = self.close_of(i, close).map_or(i + 1, |c| c + 1),
                _ => i += 1,
            }
        }
        push(self, seg_start, close, &mut params);
        params
    }

    fn parse_function_into(&mut self, contract: &mut ContractDef, end: usize) {
        let Some(mut f) = self.parse_function(end) else {
            return;
        };
        if contract.kind == ContractKind::Interface && f.implemented {
            self.diagnostics
                .push(ParseDiagnostic::error(f.line_span.start, format!("interface function `{}` has a body", f.name)));
            f.body.clear();
            f.calls.clear();
            f.implemented = false;
        }
        if f.is_constructor() {
            if contract.constructor.is_some() {
                self.diagnostics.push(ParseDiagnostic::error(f.line_span.start, "duplicate constructor ignored"));
            } else {
                contract.constructor = Some(f);
            }
        } else {
            contract.functions.push(f);
        }
    }

    fn parse_function(&mut self, end: usize) -> Option<FunctionDef> {
        let start = self.pos;
        let keyword = self.text(start);
        self.pos += 1;
        let name = match keyword {
            "function" if self.is_ident(self.pos) => {
                self.pos += 1;
                self.text(self.pos - 1).to_string()
            }
            // pre-0.6 unnamed fallback
            "function" if self.text(self.pos) == "(" => "fallback".to_string(),
            "function" => {
                self.error(start, "expected function name");
                self.skip_construct(end);
                return None;
            }
            other => other.to_string(),
        };
        let mut f = FunctionDef::new(name, self.line(start));

        let Some(close) = (self.text(self.pos) == "(").then(|| self.close_of(self.pos, end)).flatten() else {
            self.error(start, format!("expected parameter list for `{}`", f.name));
            self.skip_construct(end);
            return None;
        };
        f.params = self.parse_params(self.pos, close);
        self.pos = close + 1;

        while self.pos < end && !matches!(self.text(self.pos), "{" | ";" | "}") {
            let t = self.text(self.pos);
            match t {
                "public" => f.visibility = Visibility::Public,
                "external" => f.visibility = Visibility::External,
                "internal" => f.visibility = Visibility::Internal,
                "private" => f.visibility = Visibility::Private,
                "view" | "constant" => f.mutability = Mutability::View,
                "pure" => f.mutability = Mutability::Pure,
                "payable" => f.mutability = Mutability::Payable,
                "virtual" => f.is_virtual = true,
                "override" => {
                    if self.text(self.pos + 1) == "(" {
                        self.pos = self.close_of(self.pos + 1, end).unwrap_or(self.pos + 1);
                    }
                }
                "returns" => {
                    if self.text(self.pos + 1) == "(" {
                        if let Some(c) = self.close_of(self.pos + 1, end) {
                            f.returns = self.parse_params(self.pos + 1, c);
                            self.pos = c;
                        }
                    }
                }
                _ if self.is_ident(self.pos) => {
                    let mut args = None;
                    let name = t.to_string();
                    if self.text(self.pos + 1) == "(" {
                        if let Some(c) = self.close_of(self.pos + 1, end) {
                            args = Some(self.slice_text(self.pos + 2, c - 1));
                            self.pos = c;
                        }
                    }
                    f.modifiers.push(ModifierInvocation { name, args });
                }
                _ => self.warn(self.pos, format!("unexpected `{}` in header of `{}`", t, f.name)),
            }
            self.pos += 1;
        }

        match self.text(self.pos) {
            ";" => {
                f.line_span = LineSpan::new(self.line(start), self.line(self.pos));
                self.pos += 1;
            }
            "{" => {
                let open = self.pos;
                let body_end = match self.close_of(open, end + 1) {
                    Some(c) => c,
                    None => {
                        self.error(open, format!("unterminated body of `{}`", f.name));
                        end
                    }
                };
                f.body = self.parse_block(open + 1, body_end);
                f.implemented = true;
                f.line_span =
                    LineSpan::new(self.line(start), self.line(body_end.min(self.toks.len().saturating_sub(1))));
                self.pos = body_end + 1;
            }
            _ => {
                self.error(self.pos, format!("expected body or `;` after header of `{}`", f.name));
                f.line_span = LineSpan::new(self.line(start), self.line(self.pos.min(end)));
            }
        }
        f.calls = flatten(&f.body).into_iter().flat_map(|s| s.calls.iter().cloned()).collect();
        Some(f)
    }

    fn parse_modifier(&mut self, end: usize) -> Option<ModifierDef> {
        let start = self.pos;
        self.pos += 1;
        if !self.is_ident(self.pos) {
            self.error(start, "expected modifier name");
            self.skip_construct(end);
            return None;
        }
        let name = self.text(self.pos).to_string();
        self.pos += 1;
        let mut params = Vec::new();
        if self.text(self.pos) == "(" {
            if let Some(c) = self.close_of(self.pos, end) {
                params = self.parse_params(self.pos, c);
                self.pos = c + 1;
            }
        }
        while self.pos < end && !matches!(self.text(self.pos), "{" | ";" | "}") {
            if self.text(self.pos + 1) == "(" && self.text(self.pos) == "override" {
                self.pos = self.close_of(self.pos + 1, end).unwrap_or(self.pos + 1);
            }
            self.pos += 1;
        }
        let mut body = Vec::new();
        let mut last = self.pos;
        if self.text(self.pos) == "{" {
            let open = self.pos;
            let close = match self.close_of(open, end + 1) {
                Some(c) => c,
                None => {
                    self.error(open, format!("unterminated body of modifier `{}`", name));
                    end
                }
            };
            body = self.parse_block(open + 1, close);
            last = close;
            self.pos = close + 1;
        } else if self.text(self.pos) == ";" {
            self.pos += 1;
        }
        let calls = flatten(&body).into_iter().flat_map(|s| s.calls.iter().cloned()).collect();
        Some(ModifierDef {
            name,
            params,
            body,
            line_span: LineSpan::new(self.line(start), self.line(last.min(self.toks.len().saturating_sub(1)))),
            writes: Default::default(),
            reads: Default::default(),
            calls,
        })
    }

    fn parse_event(&mut self, end: usize) -> Option<EventDef> {
        let start = self.pos;
        if !self.is_ident(start + 1) || self.text(start + 2) != "(" {
            self.error(start, "malformed event declaration");
            self.pos += 1;
            self.skip_construct(end);
            return None;
        }
        let name = self.text(start + 1).to_string();
        let params = match self.close_of(start + 2, end) {
            Some(c) => {
                let p = self.parse_params(start + 2, c);
                self.pos = c + 1;
                p
            }
            None => Vec::new(),
        };
        self.skip_construct(end);
        Some(EventDef { name, params, line: self.line(start) })
    }

    fn parse_struct(&mut self, end: usize) -> Option<StructDef> {
        let start = self.pos;
        if !self.is_ident(start + 1) || self.text(start + 2) != "{" {
            self.error(start, "malformed struct declaration");
            self.pos += 1;
            self.skip_construct(end);
            return None;
        }
        let name = self.text(start + 1).to_string();
        let close = self.close_of(start + 2, end).unwrap_or(end);
        let mut fields = Vec::new();
        let mut seg = start + 3;
        for i in start + 3..close {
            if self.text(i) == ";" {
                if i > seg {
                    let last = i - 1;
                    if self.is_ident(last) && last > seg {
                        fields.push(ParamDef {
                            type_name: self.join_tokens(seg, last),
                            name: self.text(last).to_string(),
                        });
                    }
                }
                seg = i + 1;
            }
        }
        self.pos = close + 1;
        Some(StructDef { name, fields, line: self.line(start) })
    }

    // ---------------------------------------------------------- statements

    fn parse_block(&mut self, start: usize, end: usize) -> Vec<Statement> {
        let mut out = Vec::new();
        let mut i = start;
        while i < end {
            let before = i;
            self.parse_statement(&mut i, end, &mut out);
            if i == before {
                i += 1;
            }
        }
        out
    }

    /// Body of `if`/`for`/`while`/`do`/`else`: a block or a single statement.
    fn parse_branch(&mut self, i: &mut usize, end: usize) -> Vec<Statement> {
        let mut out = Vec::new();
        if *i < end {
            self.parse_statement(i, end, &mut out);
        }
        out
    }

    fn header(&mut self, i: &mut usize, end: usize) -> Option<(usize, usize)> {
        let kw = *i;
        if self.text(kw + 1) != "(" {
            self.error(kw, format!("expected `(` after `{}`", self.text(kw)));
            return None;
        }
        let close = self.close_of(kw + 1, end)?;
        *i = close + 1;
        Some((kw, close))
    }

    fn parse_statement(&mut self, i: &mut usize, end: usize, out: &mut Vec<Statement>) {
        let start = *i;
        let line = self.line(start);
        match self.text(start) {
            "{" => {
                let close = self.close_of(start, end + 1).unwrap_or(end);
                out.extend(self.parse_block(start + 1, close));
                *i = close + 1;
            }
            "unchecked" if self.text(start + 1) == "{" => {
                *i = start + 1;
                self.parse_statement(i, end, out);
            }
            "if" => {
                let Some((a, b)) = self.header(i, end) else {
                    return self.simple_statement(i, end, out);
                };
                let mut children = self.parse_branch(i, end);
                if self.text(*i) == "else" && *i < end {
                    *i += 1;
                    children.extend(self.parse_branch(i, end));
                }
                out.push(self.compound(StatementKind::If, line, a, b, children));
            }
            "for" | "while" => {
                let Some((a, b)) = self.header(i, end) else {
                    return self.simple_statement(i, end, out);
                };
                let children = self.parse_branch(i, end);
                out.push(self.compound(StatementKind::Loop, line, a, b, children));
            }
            "do" => {
                *i += 1;
                let children = self.parse_branch(i, end);
                if self.text(*i) == "while" {
                    let w = *i;
                    if let Some((a, b)) = self.header(i, end) {
                        if self.text(*i) == ";" {
                            *i += 1;
                        }
                        let mut s = self.compound(StatementKind::Loop, line, a, b, children);
                        s.text = format!("do {}", s.text);
                        out.push(s);
                        return;
                    }
                    *i = w + 1;
                }
                self.error(start, "`do` without matching `while (...)`");
                out.push(Statement {
                    kind: StatementKind::Loop,
                    line,
                    text: "do".to_string(),
                    children,
                    calls: Vec::new(),
                });
            }
            "try" => {
                let mut k = start + 1;
                while k < end && self.text(k) != "{" {
                    if matches!(self.text(k), "(" | "[") {
                        k = self.close_of(k, end).unwrap_or(k);
                    }
                    if self.text(k) == ";" {
                        break;
                    }
                    k += 1;
                }
                if self.text(k) != "{" {
                    self.error(start, "malformed try statement");
                    return self.simple_statement(i, end, out);
                }
                let header_end = k - 1;
                *i = k;
                let mut children = self.parse_branch(i, end);
                while *i < end && self.text(*i) == "catch" {
                    let mut k = *i + 1;
                    while k < end && self.text(k) != "{" {
                        k += 1;
                    }
                    *i = k;
                    children.extend(self.parse_branch(i, end));
                }
                out.push(self.compound(StatementKind::TryCatch, line, start, header_end, children));
            }
            "assembly" => {
                let mut k = start + 1;
                while k < end && self.text(k) != "{" {
                    k += 1;
                }
                let close = if k < end { self.close_of(k, end + 1).unwrap_or(end) } else { end };
                self.warn(start, "inline assembly block is not analyzed");
                out.push(Statement {
                    kind: StatementKind::Other,
                    line,
                    text: "assembly".to_string(),
                    children: Vec::new(),
                    calls: Vec::new(),
                });
                *i = close + 1;
            }
            ";" => *i += 1,
            _ => self.simple_statement(i, end, out),
        }
    }

    fn compound(&self, kind: StatementKind, line: usize, a: usize, b: usize, children: Vec<Statement>) -> Statement {
        Statement { kind, line, text: self.slice_text(a, b), children, calls: self.calls_in(a, b) }
    }

    fn simple_statement(&mut self, i: &mut usize, end: usize, out: &mut Vec<Statement>) {
        let start = *i;
        let mut k = start;
        let mut terminated = false;
        while k < end {
            match self.text(k) {
                ";" => {
                    terminated = true;
                    break;
                }
                "(" | "[" | "{" => match self.close_of(k, end) {
                    Some(c) => k = c + 1,
                    None => {
                        self.error(k, format!("unbalanced `{}`", self.text(k)));
                        k = end;
                        break;
                    }
                },
                "}" => {
                    self.error(k, "unmatched closing brace");
                    break;
                }
                _ => k += 1,
            }
        }
        if !terminated && k > start {
            self.warn(start, "statement is missing a terminating `;`");
        }
        *i = if terminated || self.text(k) == "}" { k + 1 } else { k };
        let last = if terminated { k.saturating_sub(1) } else { k.saturating_sub(1).min(end.saturating_sub(1)) };
        if last < start || start >= end {
            return;
        }
        let kind = self.classify(start, last);
        out.push(Statement {
            kind,
            line: self.line(start),
            text: self.slice_text(start, if terminated { k } else { last }),
            children: Vec::new(),
            calls: self.calls_in(start, last),
        });
    }

    fn classify(&self, a: usize, b: usize) -> StatementKind {
        match self.text(a) {
            "require" => return StatementKind::Require,
            "assert" => return StatementKind::Assert,
            "revert" | "throw" => return StatementKind::Revert,
            "emit" => return StatementKind::Emit,
            "return" => return StatementKind::Return,
            "delete" => return StatementKind::Assignment,
            _ => {}
        }
        let mut k = a;
        let mut has_call = false;
        while k <= b {
            let t = self.text(k);
            if ASSIGNMENT_OPS.contains(&t) || t == "++" || t == "--" {
                return StatementKind::Assignment;
            }
            if matches!(t, "(" | "[" | "{") {
                if t == "(" && k > a && self.is_ident(k - 1) {
                    has_call = true;
                }
                k = self.close_of(k, b + 1).unwrap_or(k);
            }
            k += 1;
        }
        if has_call || !self.calls_in(a, b).is_empty() {
            StatementKind::Call
        } else {
            StatementKind::Other
        }
    }

    /// Compact source text of tokens `a..=b` (whitespace removed).
    fn compact(&self, a: usize, b: usize) -> String {
        self.src[self.toks[a].start..self.toks[b].end].chars().filter(|c| !c.is_whitespace()).collect()
    }

    fn open_of(&self, close: usize, lower: usize) -> Option<usize> {
        self.partners[close].filter(|&o| o < close && o >= lower)
    }

    /// Call sites whose argument list opens within tokens `a..=b`.
    pub(crate) fn calls_in(&self, a: usize, b: usize) -> Vec<CallSite> {
        let mut calls = Vec::new();
        for k in a..=b.min(self.toks.len().saturating_sub(1)) {
            if self.text(k) != "(" || k == 0 || k <= a {
                continue;
            }
            let mut j = k - 1;
            if self.text(j) == "}" {
                match self.open_of(j, a) {
                    Some(o) if o > a => j = o - 1,
                    _ => continue,
                }
            }
            if !self.is_ident(j) {
                continue;
            }
            let name = self.text(j);
            if NON_CALL_WORDS.contains(&name) {
                continue;
            }
            if j > a
                && matches!(self.text(j - 1), "emit" | "new" | "revert" | "function" | "event" | "error" | "modifier")
            {
                continue;
            }

            let mut segments = vec![name.to_string()];
            let mut cur = j;
            while cur >= a + 2 && self.text(cur - 1) == "." {
                let p = cur - 2;
                if self.is_ident(p) {
                    segments.push(self.text(p).to_string());
                    cur = p;
                } else if matches!(self.text(p), ")" | "]") {
                    let Some(o) = self.open_of(p, a) else { break };
                    if o > a && self.is_ident(o - 1) {
                        segments.push(self.compact(o - 1, p));
                        cur = o - 1;
                    } else {
                        segments.push(self.compact(o, p));
                        break;
                    }
                } else {
                    break;
                }
            }
            segments.reverse();
            let dotted = segments.len() > 1;
            let head = segments[0].split('(').next().unwrap_or("");
            if !dotted && (is_elementary_type(name) || name.starts_with(|c: char| c.is_ascii_uppercase())) {
                continue;
            }
            if dotted && BUILTIN_NAMESPACES.contains(&head) && segments.len() == 2 {
                continue;
            }
            if dotted && ARRAY_BUILTINS.contains(&name) {
                continue;
            }

            let close = self.close_of(k, self.toks.len()).unwrap_or(k);
            let arg_count = self.count_args(k, close);
            let selector_args = (k..close).any(|x| SELECTOR_ENCODERS.contains(&self.text(x)));
            let callee = segments.join(".");
            let receiver = callee.rsplit_once('.').map(|(r, _)| r).unwrap_or("");

            let kind = if !dotted {
                CallKind::Internal
            } else if matches!(name, "call" | "delegatecall" | "staticcall")
                || selector_args
                || (matches!(name, "send" | "transfer")
                    && (arg_count == 1
                        || receiver.starts_with("payable(")
                        || receiver.starts_with("address(")
                        || matches!(receiver, "msg.sender" | "tx.origin")))
            {
                CallKind::LowLevel
            } else if receiver == "super" || SAFE_MATH_METHODS.contains(&name) {
                CallKind::Internal
            } else {
                CallKind::ExternalMember
            };

            calls.push(CallSite { callee, kind, line: self.line(j), arg_count, offset: self.toks[j].start });
        }
        calls
    }

    fn count_args(&self, open: usize, close: usize) -> usize {
        if close <= open + 1 {
            return 0;
        }
        let mut n = 1;
        let mut k = open + 1;
        while k < close {
            match self.text(k) {
                "," => n += 1,
                "(" | "[" | "{" => k = self.close_of(k, close).unwrap_or(k),
                _ => {}
            }
            k += 1;
        }
        n
    }
}
