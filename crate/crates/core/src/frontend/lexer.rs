//! Comment/string blanking and tokenization.
//!
//! The frontend never looks at raw source directly: it first blanks comments
//! and string contents so that keyword heuristics cannot match inside them,
//! then tokenizes the cleaned text. Blanking is byte-length preserving, so
//! token offsets index both the cleaned and the original text.

use crate::model::ParseDiagnostic;

const STRING_FILL: char = '_';

/// Result of [`strip_noise_with_diagnostics`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stripped {
    pub text: String,
    pub diagnostics: Vec<ParseDiagnostic>,
}

/// Blanks comments (with spaces) and string literal contents (with `_`),
/// keeping every newline and the byte length of the input.
pub fn strip_noise(source: &str) -> String {
    strip_noise_with_diagnostics(source).text
}

pub fn strip_noise_with_diagnostics(source: &str) -> Stripped {
    let mut out = String::with_capacity(source.len());
    let mut diagnostics = Vec::new();
    let mut chars = source.chars().peekable();
    let mut line = 1usize;

    fn blank(out: &mut String, c: char, fill: char) {
        if c == '\n' || c == '\r' {
            out.push(c);
        } else {
            out.extend(std::iter::repeat_n(fill, c.len_utf8()));
        }
    }

    while let Some(c) = chars.next() {
        match c {
            '/' if chars.peek() == Some(&'/') => {
                out.push_str("  ");
                chars.next();
                while let Some(&n) = chars.peek() {
                    if n == '\n' {
                        break;
                    }
                    blank(&mut out, n, ' ');
                    chars.next();
                }
            }
            '/' if chars.peek() == Some(&'*') => {
                let opened_at = line;
                out.push_str("  ");
                chars.next();
                let mut closed = false;
                while let Some(n) = chars.next() {
                    if n == '*' && chars.peek() == Some(&'/') {
                        chars.next();
                        out.push_str("  ");
                        closed = true;
                        break;
                    }
                    if n == '\n' {
                        line += 1;
                    }
                    blank(&mut out, n, ' ');
                }
                if !closed {
                    diagnostics.push(ParseDiagnostic::error(opened_at, "unterminated block comment"));
                }
            }
            '"' | '\'' => {
                let quote = c;
                out.push(quote);
                let mut closed = false;
                while let Some(&n) = chars.peek() {
                    if n == quote {
                        chars.next();
                        out.push(quote);
                        closed = true;
                        break;
                    }
                    if n == '\n' {
                        break;
                    }
                    chars.next();
                    blank(&mut out, n, STRING_FILL);
                    if n == '\\' {
                        if let Some(esc) = chars.next() {
                            if esc == '\n' {
                                line += 1;
                            }
                            blank(&mut out, esc, STRING_FILL);
                        }
                    }
                }
                if !closed {
                    diagnostics.push(ParseDiagnostic::error(line, "unterminated string literal"));
                }
            }
            '\n' => {
                line += 1;
                out.push(c);
            }
            _ => out.push(c),
        }
    }

    debug_assert_eq!(out.len(), source.len());
    Stripped { text: out, diagnostics }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TokenKind {
    Ident,
    Number,
    Str,
    Punct,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub start: usize,
    pub end: usize,
    pub line: usize,
}

impl Token {
    pub fn text<'s>(&self, src: &'s str) -> &'s str {
        &src[self.start..self.end]
    }
}

// Longest operators first.
const OPERATORS: &[&str] = &[
    ">>>=", "<<=", ">>=", ">>>", "**", "++", "--", "+=", "-=", "*=", "/=", "%=", "|=", "&=", "^=", "==", "!=", "<=",
    ">=", "&&", "||", "<<", ">>", "=>", "->",
];

pub fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_' || c == '$'
}

pub fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '$'
}

/// Tokenizes already-stripped text. Total: unknown characters become
/// single-character punctuation tokens.
pub fn tokenize(src: &str) -> Vec<Token> {
    let bytes = src.as_bytes();
    let mut tokens = Vec::new();
    let mut line = 1usize;
    let mut i = 0usize;

    while i < src.len() {
        let c = src[i..].chars().next().expect("index on char boundary");
        if c == '\n' {
            line += 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += c.len_utf8();
            continue;
        }
        let start = i;
        let kind = if is_ident_start(c) {
            while i < src.len() && is_ident_continue(bytes[i] as char) {
                i += 1;
            }
            TokenKind::Ident
        } else if c.is_ascii_digit() {
            while i < src.len() {
                let b = bytes[i] as char;
                let fraction = b == '.' && bytes.get(i + 1).is_some_and(|n| n.is_ascii_digit());
                if b.is_ascii_alphanumeric() || b == '_' || fraction {
                    i += 1;
                } else {
                    break;
                }
            }
            TokenKind::Number
        } else if c == '"' || c == '\'' {
            i += 1;
            while i < src.len() && bytes[i] != b'\n' {
                let b = bytes[i];
                i += 1;
                if b == c as u8 {
                    break;
                }
            }
            TokenKind::Str
        } else {
            let rest = &src[i..];
            match OPERATORS.iter().find(|op| rest.starts_with(**op)) {
                Some(op) => i += op.len(),
                None => i += c.len_utf8(),
            }
            TokenKind::Punct
        };
        tokens.push(Token { kind, start, end: i, line });
    }
    tokens
}
