//! Random small contracts whose ground truth is known by construction, and
//! the brute-force oracles that go with them.

use std::collections::BTreeSet;

use proptest::prelude::*;
use smartgraph_core::{analyze, AnalysisOptions, DetectorId, KeywordConfig, Warning};

pub const STATE_POOL: &[&str] = &["balances", "totalStaked", "rewardPool", "shares", "debtIndex", "lastUpdate"];
pub const FN_POOL: &[&str] = &[
    "stake",
    "deposit",
    "lockTokens",
    "provideLiquidity",
    "unstake",
    "withdraw",
    "unlockAll",
    "releaseFunds",
    "claimRewards",
    "harvest",
    "sync",
];

#[derive(Clone, Debug)]
pub enum Line {
    Write(usize),
    Read(usize),
    Require(usize),
    Price,
    Transfer,
}

#[derive(Clone, Debug)]
pub struct FnSpec {
    pub name: String,
    pub body: Vec<Line>,
}

impl FnSpec {
    pub fn writes<'a>(&self, state: &'a [String]) -> BTreeSet<&'a str> {
        self.body
            .iter()
            .filter_map(|l| match l {
                Line::Write(v) => Some(state[*v].as_str()),
                _ => None,
            })
            .collect()
    }

    fn lines(&self) -> usize {
        self.body.len() + 2
    }
}

#[derive(Clone, Debug)]
pub struct ContractSpec {
    pub state: Vec<String>,
    pub functions: Vec<FnSpec>,
}

const HEADER: &str = "interface IOracle {\n    function getRate() external returns (uint256);\n}\n\ninterface IToken {\n    function transfer(address to, uint256 amount) external returns (bool);\n}\n\ncontract Pool {\n    IOracle oracle;\n    IToken token;\n";

impl ContractSpec {
    /// Solidity text. A skipped function is replaced by blank lines so every
    /// other line keeps its number.
    pub fn render(&self, skip: Option<usize>) -> String {
        let mut out = String::from(HEADER);
        for v in &self.state {
            out.push_str(&format!("    uint256 {v};\n"));
        }
        for (i, f) in self.functions.iter().enumerate() {
            if skip == Some(i) {
                out.push_str(&"\n".repeat(f.lines()));
                continue;
            }
            out.push_str(&format!("    function {}() public {{\n", f.name));
            for (n, line) in f.body.iter().enumerate() {
                let stmt = match line {
                    Line::Write(v) => format!("{} = {};", self.state[*v], n + 1),
                    Line::Read(v) => format!("uint256 t{n} = {};", self.state[*v]),
                    Line::Require(v) => format!("require({} > 0);", self.state[*v]),
                    Line::Price => "oracle.getRate();".to_string(),
                    Line::Transfer => "token.transfer(msg.sender, 1);".to_string(),
                };
                out.push_str(&format!("        {stmt}\n"));
            }
            out.push_str("    }\n");
        }
        out.push_str("}\n");
        out
    }

    pub fn without(&self, i: usize) -> ContractSpec {
        let mut spec = self.clone();
        spec.functions.remove(i);
        spec
    }
}

fn line_strategy(n_state: usize, calls: bool) -> BoxedStrategy<Line> {
    let v = 0..n_state;
    if calls {
        prop_oneof![
            4 => v.clone().prop_map(Line::Write),
            2 => v.clone().prop_map(Line::Read),
            1 => v.prop_map(Line::Require),
            1 => Just(Line::Price),
            1 => Just(Line::Transfer),
        ]
        .boxed()
    } else {
        prop_oneof![3 => v.clone().prop_map(Line::Write), 1 => v.prop_map(Line::Read)].boxed()
    }
}

/// ≤ 5 functions over ≤ 6 state variables. With `calls` the bodies also
/// contain requires, price reads and transfers.
pub fn contract_strategy(calls: bool) -> impl Strategy<Value = ContractSpec> {
    (1..=STATE_POOL.len(), proptest::sample::subsequence(FN_POOL.to_vec(), 0..=5)).prop_flat_map(
        move |(n_state, names)| {
            let body = proptest::collection::vec(line_strategy(n_state, calls), 0..6);
            proptest::collection::vec(body, names.len()).prop_map(move |bodies| ContractSpec {
                state: STATE_POOL[..n_state].iter().map(|s| s.to_string()).collect(),
                functions: names.iter().zip(bodies).map(|(n, body)| FnSpec { name: n.to_string(), body }).collect(),
            })
        },
    )
}

pub fn warnings(source: &str, detectors: &[DetectorId], cfg: &KeywordConfig) -> Vec<Warning> {
    let opts =
        AnalysisOptions { config: cfg.clone(), detectors: detectors.iter().copied().collect(), generated_at: None };
    analyze(source, "gen.sol", None, &opts).expect("valid options").warnings
}

fn contains_any(name: &str, keywords: &[String]) -> bool {
    let lower = name.to_lowercase();
    keywords.iter().any(|k| lower.contains(k.as_str()))
}

/// (missing side, variable, writer, non-writer) for every flagged triple.
pub type Asymmetry = (String, String, String, String);

/// Enumerates all (f, g, v) over the spec's own write sets.
pub fn d1_oracle(spec: &ContractSpec, cfg: &KeywordConfig) -> BTreeSet<Asymmetry> {
    let mut out = BTreeSet::new();
    for f in &spec.functions {
        for g in &spec.functions {
            if f.name == g.name
                || !contains_any(&f.name, &cfg.stake_names)
                || !contains_any(&g.name, &cfg.unstake_names)
            {
                continue;
            }
            let wf = f.writes(&spec.state);
            let wg = g.writes(&spec.state);
            if wf.is_empty() {
                continue;
            }
            for v in &spec.state {
                let (in_f, in_g) = (wf.contains(v.as_str()), wg.contains(v.as_str()));
                if in_f && !in_g {
                    out.insert(("Unstake".into(), v.clone(), f.name.clone(), g.name.clone()));
                }
                if in_g && !in_f {
                    out.insert(("Stake".into(), v.clone(), g.name.clone(), f.name.clone()));
                }
            }
        }
    }
    out
}

/// Reads a D1 message back into its asymmetry tuple.
pub fn parse_d1(w: &Warning) -> Asymmetry {
    let rest = w.message.strip_prefix("Inconsistent State Update: Missing ").expect("D1 alert phrase");
    let (side, rest) = rest.split_once(" Logic for ").unwrap();
    let (var, rest) = rest.split_once("; ").unwrap();
    let (writer, rest) = rest.split_once(" writes it but ").unwrap();
    let other = rest.strip_suffix(" does not").unwrap();
    (side.into(), var.into(), writer.into(), other.into())
}

pub fn check_d1(spec: &ContractSpec) -> Result<(), String> {
    let cfg = KeywordConfig::default();
    let got: BTreeSet<Asymmetry> = warnings(&spec.render(None), &[DetectorId::D1], &cfg).iter().map(parse_d1).collect();
    let want = d1_oracle(spec, &cfg);
    if got == want {
        Ok(())
    } else {
        Err(format!("D1 mismatch\n got: {got:?}\nwant: {want:?}\n{}", spec.render(None)))
    }
}

/// Removing a function never creates a D1, D2 or D4 warning about the rest.
pub fn check_monotonic(spec: &ContractSpec, remove: usize) -> Result<(), String> {
    if spec.functions.is_empty() {
        return Ok(());
    }
    let remove = remove % spec.functions.len();
    let cfg = KeywordConfig::default();
    let detectors = [DetectorId::D1, DetectorId::D2, DetectorId::D4];
    let key = |w: &Warning| (w.detector, w.function.clone(), w.line, w.message.clone());
    let before: BTreeSet<_> = warnings(&spec.render(None), &detectors, &cfg).iter().map(key).collect();
    let after: Vec<_> = warnings(&spec.render(Some(remove)), &detectors, &cfg).iter().map(key).collect();
    let removed = &spec.functions[remove].name;
    for w in after {
        if w.1.as_deref() != Some(removed.as_str()) && !before.contains(&w) {
            return Err(format!("new warning after removing {removed}: {w:?}\n{}", spec.render(None)));
        }
    }
    Ok(())
}

/// Presence bits: require, assert, if, try/catch, modifier.
pub fn d2_source(bits: u8) -> String {
    let has = |i: u8| bits & (1 << i) != 0;
    let mut body = String::new();
    if has(0) {
        body.push_str("        require(amount > 0);\n");
    }
    if has(1) {
        body.push_str("        assert(amount < 1e30);\n");
    }
    if has(2) {
        body.push_str("        if (amount == 0) {\n            return;\n        }\n");
    }
    if has(3) {
        body.push_str("        try token.transfer(owner, 0) returns (bool) {\n        } catch {\n        }\n");
    }
    body.push_str("        token.transfer(msg.sender, amount);\n");
    let modifier = if has(4) { " onlyOwner" } else { "" };
    format!(
        "interface IToken {{\n    function transfer(address to, uint256 amount) external returns (bool);\n}}\n\ncontract Vault {{\n    IToken token;\n    address owner;\n\n    modifier onlyOwner() {{\n        require(msg.sender == owner);\n        _;\n    }}\n\n    function withdraw(uint256 amount) external{modifier} {{\n{body}    }}\n}}\n"
    )
}

pub fn check_d2(bits: u8) -> Result<(), String> {
    let src = d2_source(bits);
    let got = warnings(&src, &[DetectorId::D2], &KeywordConfig::default());
    let want = usize::from(bits == 0);
    if got.len() != want {
        return Err(format!("D2 bits {bits:05b}: got {} warnings, want {want}\n{src}", got.len()));
    }
    if want == 1 {
        let w = &got[0];
        if w.message != "High Risk: Missing Validation Logic in function withdraw"
            || w.related_symbols != ["token.transfer"]
        {
            return Err(format!("unexpected D2 warning {w:?}"));
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Op {
    Price,
    Transfer,
    Filler,
    /// `if (...) { ... }`: two statements once flattened.
    Nested,
}

pub fn op_strategy() -> impl Strategy<Value = Op> {
    prop_oneof![1 => Just(Op::Price), 1 => Just(Op::Transfer), 3 => Just(Op::Filler), 1 => Just(Op::Nested)]
}

pub const D4_BODY_START: usize = 12;

pub fn d4_source(ops: &[Op]) -> String {
    let mut out = String::from(
        "interface IOracle {\n    function updatePrice() external returns (uint256);\n}\n\ninterface IToken {\n    function safeTransfer(address to, uint256 amount) external;\n}\n\ncontract Desk {\n    IOracle oracle;\n    IToken token;\n    function execute(uint256 x) external {\n",
    );
    for op in ops {
        out.push_str(match op {
            Op::Price => "        oracle.updatePrice();\n",
            Op::Transfer => "        token.safeTransfer(msg.sender, x);\n",
            Op::Filler => "        x = x + 1;\n",
            Op::Nested => "        if (x > 1) {\n            x = x - 1;\n        }\n",
        });
    }
    out.push_str("    }\n}\n");
    out
}

/// (transfer line, price line, ordering branch) for every flagged pair,
/// from a hand count of flattened statements.
pub fn d4_oracle(ops: &[Op], max_distance: usize) -> BTreeSet<(usize, usize, bool)> {
    let mut line = D4_BODY_START;
    let mut index = 0usize;
    let mut prices = Vec::new();
    let mut transfers = Vec::new();
    for op in ops {
        line += 1;
        match op {
            Op::Price => prices.push((index, line)),
            Op::Transfer => transfers.push((index, line)),
            Op::Filler => {}
            Op::Nested => {
                index += 1;
                line += 2;
            }
        }
        index += 1;
    }
    let mut out = BTreeSet::new();
    for &(pi, pl) in &prices {
        for &(ti, tl) in &transfers {
            let gap = pi.abs_diff(ti) - 1;
            if tl < pl || gap > max_distance {
                out.insert((tl, pl, tl < pl));
            }
        }
    }
    out
}

fn lines_in(message: &str) -> Vec<usize> {
    message
        .match_indices("(line ")
        .map(|(i, m)| {
            let rest = &message[i + m.len()..];
            rest[..rest.find(')').unwrap()].parse().unwrap()
        })
        .collect()
}

pub fn check_d4(ops: &[Op], max_distance: usize) -> Result<(), String> {
    let cfg = KeywordConfig { max_distance, ..KeywordConfig::default() };
    let src = d4_source(ops);
    let got: BTreeSet<(usize, usize, bool)> = warnings(&src, &[DetectorId::D4], &cfg)
        .iter()
        .map(|w| {
            let ordering = w.message.contains(" runs before ");
            let lines = lines_in(&w.message);
            let price_line = if ordering { lines[1] } else { lines[0] };
            (w.line, price_line, ordering)
        })
        .collect();
    let want = d4_oracle(ops, max_distance);
    if got == want {
        Ok(())
    } else {
        Err(format!("D4 mismatch (max_distance {max_distance})\n got: {got:?}\nwant: {want:?}\n{src}"))
    }
}
