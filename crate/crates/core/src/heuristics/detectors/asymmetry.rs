//! Write-set asymmetry between paired entry and exit functions (stake and
//! unstake, borrow and repay, earn and spend).

use crate::heuristics::{matches_any, Context, DetectorId, KeywordConfig, Warning};
use crate::model::FunctionDef;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairKind {
    Stake,
    Collateral,
    Points,
}

impl PairKind {
    fn detector(self) -> DetectorId {
        match self {
            PairKind::Stake => DetectorId::D1,
            PairKind::Collateral => DetectorId::D11,
            PairKind::Points => DetectorId::D12,
        }
    }

    /// Alert wording for the entry and exit side.
    fn words(self) -> (&'static str, &'static str) {
        match self {
            PairKind::Stake => ("Stake", "Unstake"),
            PairKind::Collateral => ("Collateral", "Release"),
            PairKind::Points => ("Earn", "Spend"),
        }
    }
}

pub fn detect_stake_asymmetry(cx: &Context<'_>, cfg: &KeywordConfig, kind: PairKind) -> Vec<Warning> {
    let pairs: Vec<(&[String], &[String])> = match kind {
        PairKind::Stake => vec![(&cfg.stake_names, &cfg.unstake_names)],
        PairKind::Collateral => cfg.collateral_pairs.iter().map(|p| (&p.entry[..], &p.exit[..])).collect(),
        PairKind::Points => cfg.earn_spend_pairs.iter().map(|p| (&p.entry[..], &p.exit[..])).collect(),
    };
    let (entry_word, exit_word) = kind.words();
    let detector = kind.detector();
    let functions: Vec<&FunctionDef> = cx.contract.functions.iter().filter(|f| f.implemented).collect();

    let mut out = Vec::new();
    for (entry, exit) in pairs {
        let fs = functions.iter().filter(|f| matches_any(&f.name, entry));
        for f in fs {
            if f.writes.is_empty() {
                continue;
            }
            for g in functions.iter().filter(|g| matches_any(&g.name, exit)) {
                if std::ptr::eq(*f, *g) {
                    continue;
                }
                let related = |v: &str| {
                    (
                        vec![f.name.clone(), g.name.clone(), v.to_string()],
                        vec![cx.fn_id(f), cx.fn_id(g), cx.state_id(v)],
                    )
                };
                for v in f.writes.difference(&g.writes) {
                    let msg = format!(
                        "Inconsistent State Update: Missing {exit_word} Logic for {v}; {} writes it but {} does not",
                        f.name, g.name
                    );
                    let (symbols, nodes) = related(v);
                    out.push(
                        cx.warning(detector, Some(g), g.line_span.start, msg).with_symbols(symbols).with_nodes(nodes),
                    );
                }
                for u in g.writes.difference(&f.writes) {
                    let msg = format!(
                        "Inconsistent State Update: Missing {entry_word} Logic for {u}; {} writes it but {} does not",
                        g.name, f.name
                    );
                    let (symbols, nodes) = related(u);
                    out.push(
                        cx.warning(detector, Some(f), f.line_span.start, msg).with_symbols(symbols).with_nodes(nodes),
                    );
                }
            }
        }
    }
    out
}
