//! A standalone recursive-descent parser for the Graphviz DOT language,
//! used to validate exported graphs without trusting the exporter.

use std::collections::BTreeMap;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Id(String),
    Keyword(String),
    Punct(char),
    EdgeOp(&'static str),
}

pub type Attrs = Vec<(String, String)>;

#[derive(Clone, Debug, Default)]
pub struct DotGraph {
    pub strict: bool,
    pub directed: bool,
    pub name: Option<String>,
    pub nodes: BTreeMap<String, Attrs>,
    pub edges: Vec<(String, String, Attrs)>,
}

impl DotGraph {
    pub fn attr<'a>(attrs: &'a Attrs, key: &str) -> Option<&'a str> {
        attrs.iter().rev().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

const KEYWORDS: &[&str] = &["strict", "graph", "digraph", "node", "edge", "subgraph"];

fn lex(src: &str) -> Result<Vec<Tok>, String> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let mut line_start = true;
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            line_start = true;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c == '#' && line_start {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        line_start = false;
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'*') {
            i += 2;
            loop {
                if i + 1 >= chars.len() {
                    return Err("unterminated comment".into());
                }
                if chars[i] == '*' && chars[i + 1] == '/' {
                    i += 2;
                    break;
                }
                i += 1;
            }
            continue;
        }
        if c == '-' && matches!(chars.get(i + 1), Some('>') | Some('-')) {
            out.push(Tok::EdgeOp(if chars[i + 1] == '>' { "->" } else { "--" }));
            i += 2;
            continue;
        }
        if "{}[]=;,:".contains(c) {
            out.push(Tok::Punct(c));
            i += 1;
            continue;
        }
        if c == '"' {
            let mut s = String::new();
            i += 1;
            loop {
                match chars.get(i) {
                    None => return Err("unterminated string".into()),
                    Some('"') => break,
                    Some('\\') if chars.get(i + 1) == Some(&'"') => {
                        s.push('"');
                        i += 2;
                    }
                    Some('\\') if chars.get(i + 1) == Some(&'\n') => i += 2,
                    Some(&ch) => {
                        s.push(ch);
                        i += 1;
                    }
                }
            }
            i += 1;
            out.push(Tok::Id(s));
            continue;
        }
        if c == '<' {
            let mut depth = 0;
            let start = i;
            loop {
                match chars.get(i) {
                    None => return Err("unterminated HTML string".into()),
                    Some('<') => depth += 1,
                    Some('>') => {
                        depth -= 1;
                        if depth == 0 {
                            break;
                        }
                    }
                    _ => {}
                }
                i += 1;
            }
            i += 1;
            out.push(Tok::Id(chars[start..i].iter().collect()));
            continue;
        }
        if c.is_ascii_digit() || c == '.' || c == '-' {
            let start = i;
            if c == '-' {
                i += 1;
            }
            let mut digits = 0;
            let mut dots = 0;
            while let Some(&d) = chars.get(i) {
                if d.is_ascii_digit() {
                    digits += 1;
                } else if d == '.' {
                    dots += 1;
                } else {
                    break;
                }
                i += 1;
            }
            if digits == 0 || dots > 1 {
                return Err(format!("malformed numeral at char {start}"));
            }
            if chars.get(i).is_some_and(|d| d.is_alphabetic() || *d == '_') {
                return Err(format!("identifier may not start with a digit at char {start}"));
            }
            out.push(Tok::Id(chars[start..i].iter().collect()));
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let start = i;
            while chars.get(i).is_some_and(|d| d.is_alphanumeric() || *d == '_') {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            if KEYWORDS.contains(&word.to_ascii_lowercase().as_str()) {
                out.push(Tok::Keyword(word.to_ascii_lowercase()));
            } else {
                out.push(Tok::Id(word));
            }
            continue;
        }
        return Err(format!("unexpected character `{c}`"));
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn peek_at(&self, n: usize) -> Option<&Tok> {
        self.toks.get(self.pos + n)
    }

    fn eat_punct(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Punct(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_punct(&mut self, c: char) -> Result<(), String> {
        if self.eat_punct(c) {
            Ok(())
        } else {
            Err(format!("expected `{c}`, found {:?}", self.peek()))
        }
    }

    fn eat_keyword(&mut self, k: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Keyword(w)) if w == k) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn id(&mut self) -> Result<String, String> {
        match self.peek().cloned() {
            Some(Tok::Id(s)) => {
                self.pos += 1;
                Ok(s)
            }
            other => Err(format!("expected ID, found {other:?}")),
        }
    }

    fn graph(&mut self) -> Result<DotGraph, String> {
        let mut g = DotGraph { strict: self.eat_keyword("strict"), ..Default::default() };
        g.directed = if self.eat_keyword("digraph") {
            true
        } else if self.eat_keyword("graph") {
            false
        } else {
            return Err(format!("expected `graph` or `digraph`, found {:?}", self.peek()));
        };
        if let Some(Tok::Id(_)) = self.peek() {
            g.name = Some(self.id()?);
        }
        self.expect_punct('{')?;
        self.stmt_list(&mut g)?;
        self.expect_punct('}')?;
        Ok(g)
    }

    fn stmt_list(&mut self, g: &mut DotGraph) -> Result<(), String> {
        while !matches!(self.peek(), Some(Tok::Punct('}')) | None) {
            self.stmt(g)?;
            self.eat_punct(';');
        }
        Ok(())
    }

    fn attr_list(&mut self) -> Result<Attrs, String> {
        let mut attrs = Vec::new();
        while self.eat_punct('[') {
            while !self.eat_punct(']') {
                let k = self.id()?;
                self.expect_punct('=')?;
                let v = self.id()?;
                attrs.push((k, v));
                if !self.eat_punct(',') {
                    self.eat_punct(';');
                }
            }
        }
        Ok(attrs)
    }

    fn node_id(&mut self) -> Result<String, String> {
        let id = self.id()?;
        if self.eat_punct(':') {
            self.id()?;
            if self.eat_punct(':') {
                self.id()?;
            }
        }
        Ok(id)
    }

    /// A node id or a subgraph, returning the node ids it stands for.
    fn endpoint(&mut self, g: &mut DotGraph) -> Result<Vec<String>, String> {
        if matches!(self.peek(), Some(Tok::Keyword(k)) if k == "subgraph") || self.peek() == Some(&Tok::Punct('{')) {
            let before: Vec<String> = g.nodes.keys().cloned().collect();
            self.subgraph(g)?;
            Ok(g.nodes.keys().filter(|k| !before.contains(k)).cloned().collect())
        } else {
            let id = self.node_id()?;
            g.nodes.entry(id.clone()).or_default();
            Ok(vec![id])
        }
    }

    fn subgraph(&mut self, g: &mut DotGraph) -> Result<(), String> {
        if self.eat_keyword("subgraph") {
            if let Some(Tok::Id(_)) = self.peek() {
                self.id()?;
            }
        }
        self.expect_punct('{')?;
        self.stmt_list(g)?;
        self.expect_punct('}')
    }

    fn stmt(&mut self, g: &mut DotGraph) -> Result<(), String> {
        if let Some(Tok::Keyword(k)) = self.peek().cloned() {
            if k == "graph" || k == "node" || k == "edge" {
                self.pos += 1;
                if self.peek() != Some(&Tok::Punct('[')) {
                    return Err(format!("`{k}` must be followed by an attribute list"));
                }
                self.attr_list()?;
                return Ok(());
            }
        }
        if matches!(self.peek(), Some(Tok::Id(_))) && self.peek_at(1) == Some(&Tok::Punct('=')) {
            self.id()?;
            self.pos += 1;
            self.id()?;
            return Ok(());
        }
        let mut left = self.endpoint(g)?;
        let mut pairs = Vec::new();
        while let Some(Tok::EdgeOp(op)) = self.peek().cloned() {
            if (op == "->") != g.directed {
                return Err(format!("edge operator `{op}` does not match graph type"));
            }
            self.pos += 1;
            let right = self.endpoint(g)?;
            for a in &left {
                for b in &right {
                    pairs.push((a.clone(), b.clone()));
                }
            }
            left = right;
        }
        let attrs = self.attr_list()?;
        if pairs.is_empty() {
            if let [id] = &left[..] {
                g.nodes.get_mut(id).expect("registered").extend(attrs);
            }
        } else {
            for (a, b) in pairs {
                g.edges.push((a, b, attrs.clone()));
            }
        }
        Ok(())
    }
}

/// Parses one or more graphs; the whole input must be consumed.
pub fn parse(src: &str) -> Result<Vec<DotGraph>, String> {
    let mut p = Parser { toks: lex(src)?, pos: 0 };
    let mut graphs = Vec::new();
    while p.peek().is_some() {
        graphs.push(p.graph()?);
    }
    if graphs.is_empty() {
        return Err("no graph".into());
    }
    Ok(graphs)
}
