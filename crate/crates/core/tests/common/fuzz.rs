//! Seeded input generation for the parser fuzz run.

use std::panic::{catch_unwind, AssertUnwindSafe};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use smartgraph_core::{
    analyze_unit, export_unit_dot, parse_source, render_text, serialize_json, strip_noise, AnalysisOptions,
};

const VOCAB: &[&str] = &[
    "contract",
    "interface",
    "library",
    "is",
    "function",
    "modifier",
    "event",
    "struct",
    "constructor",
    "returns",
    "public",
    "external",
    "internal",
    "private",
    "payable",
    "view",
    "pure",
    "if",
    "else",
    "for",
    "while",
    "do",
    "try",
    "catch",
    "require",
    "assert",
    "revert",
    "emit",
    "return",
    "assembly",
    "unchecked",
    "mapping",
    "=>",
    "uint256",
    "address",
    "bool",
    "memory",
    "storage",
    "{",
    "}",
    "(",
    ")",
    "[",
    "]",
    ";",
    ",",
    ".",
    "=",
    "+=",
    "-",
    "*",
    "/",
    "%",
    "**",
    "\"",
    "'",
    "//",
    "/*",
    "*/",
    "\n",
    "x",
    "stake",
    "withdraw",
    "transfer",
    "rebase",
    "call",
    "_",
    "0",
    "1e18",
    "msg.sender",
    "import",
    "pragma",
    "using",
    "for",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mutation {
    RandomBytes,
    RandomTokens,
    /// Removes one code `}`: the result is always unbalanced.
    DropClose,
    /// Adds one `{` before a code `;` or `}`: the result is always unbalanced.
    ExtraOpen,
    Shuffle,
    Truncate,
}

pub struct Input {
    pub text: String,
    pub mutation: Mutation,
}

fn code_positions(src: &str, wanted: &[char]) -> Vec<usize> {
    strip_noise(src).char_indices().filter(|(_, c)| wanted.contains(c)).map(|(i, _)| i).collect()
}

/// `n` inputs, half random and half mutations of `corpus`.
pub fn inputs(seed: u64, n: usize, corpus: &[String]) -> Vec<Input> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let base = corpus.choose(&mut rng).expect("non-empty corpus");
        let (mutation, text) = match out.len() % 6 {
            0 => {
                let len = rng.gen_range(0..400);
                let bytes: Vec<u8> = (0..len).map(|_| rng.gen()).collect();
                (Mutation::RandomBytes, String::from_utf8_lossy(&bytes).into_owned())
            }
            1 => {
                let len = rng.gen_range(0..200);
                let words: Vec<&str> = (0..len).map(|_| *VOCAB.choose(&mut rng).unwrap()).collect();
                (Mutation::RandomTokens, words.join(" "))
            }
            2 => {
                let spots = code_positions(base, &['}']);
                let Some(&at) = spots.choose(&mut rng) else { continue };
                let mut t = base.clone();
                t.remove(at);
                (Mutation::DropClose, t)
            }
            3 => {
                let spots = code_positions(base, &[';', '}']);
                let Some(&at) = spots.choose(&mut rng) else { continue };
                let mut t = base.clone();
                t.insert(at, '{');
                (Mutation::ExtraOpen, t)
            }
            4 => {
                let mut lines: Vec<&str> = base.lines().collect();
                let k = rng.gen_range(0..=lines.len().min(6));
                for _ in 0..k {
                    let (a, b) = (rng.gen_range(0..lines.len()), rng.gen_range(0..lines.len()));
                    lines.swap(a, b);
                }
                (Mutation::Shuffle, lines.join("\n"))
            }
            _ => {
                let mut cut = rng.gen_range(0..=base.len());
                while !base.is_char_boundary(cut) {
                    cut -= 1;
                }
                (Mutation::Truncate, base[..cut].to_string())
            }
        };
        out.push(Input { text, mutation });
    }
    out
}

pub enum Outcome {
    Ok { diagnostics: usize },
    Panicked(String),
}

/// Runs parse, every detector, and all three renderers on one input.
pub fn run(text: &str) -> Outcome {
    let result = catch_unwind(AssertUnwindSafe(|| {
        let unit = parse_source(text, "fuzz.sol");
        let report = analyze_unit(&unit, Some(&unit), &AnalysisOptions::default()).expect("default options are valid");
        let _ = render_text(&report, true);
        let _ = serialize_json(&report);
        let _ = export_unit_dot(&report.graphs);
        unit.diagnostics.len()
    }));
    match result {
        Ok(diagnostics) => Outcome::Ok { diagnostics },
        Err(e) => Outcome::Panicked(
            e.downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default(),
        ),
    }
}

/// Failures as human-readable lines; empty means the run is clean.
pub fn campaign(seed: u64, n: usize, corpus: &[String]) -> Vec<String> {
    let hook = std::panic::take_hook();
    std::panic::set_hook(Box::new(|_| {}));
    let mut failures = Vec::new();
    for (i, input) in inputs(seed, n, corpus).iter().enumerate() {
        match run(&input.text) {
            Outcome::Panicked(msg) => failures.push(format!("input {i} ({:?}) panicked: {msg}", input.mutation)),
            Outcome::Ok { diagnostics: 0 } if matches!(input.mutation, Mutation::DropClose | Mutation::ExtraOpen) => {
                failures.push(format!("input {i} ({:?}) is unbalanced but has no diagnostics", input.mutation))
            }
            Outcome::Ok { .. } => {}
        }
    }
    std::panic::set_hook(hook);
    failures
}
