//! One PASS/FAIL line per acceptance criterion. Exits non-zero on any FAIL.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use common::{corpus, detector_cases, dot, fixtures_dir, fuzz, gen, read, rel};
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};
use smartgraph_core::{
    analyze, build_unit_graphs, export_dot, export_unit_dot, parse_source, render_text, serialize_json,
    AnalysisOptions, DetectorId, EdgeKind, Mutability, StatementKind,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn detector_corpus() -> Outcome {
    let start = Instant::now();
    let cases = detector_cases();
    let mut fixtures = 0;
    for case in &cases {
        let baseline = case.baseline();
        for file in ["vulnerable", "fixed"] {
            let path = case.dir.join(format!("{file}.sol"));
            let report = analyze(&read(&path), &rel(&path), baseline.as_ref(), &AnalysisOptions::default())
                .map_err(|e| e.to_string())?;
            fixtures += 1;
            let expected = case.source(&format!("{file}.expected"));
            ensure(render_text(&report, false) == expected, || format!("{}/{file} differs from golden", case.name))?;
            let own = report.warnings.iter().filter(|w| w.detector == case.detector).count();
            match file {
                "vulnerable" => ensure(own > 0, || format!("{} vulnerable has no {}", case.name, case.detector))?,
                _ => ensure(own == 0, || format!("{} fixed still has {} {}", case.name, own, case.detector))?,
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    ensure(cases.len() == 12 && fixtures >= 24, || format!("only {fixtures} fixtures"))?;
    ensure(elapsed < 5.0, || format!("took {elapsed:.2}s"))?;
    Ok(format!("{fixtures} fixtures, goldens exact, {elapsed:.3}s"))
}

fn case_studies() -> Outcome {
    let run = |name: &str| {
        let path = fixtures_dir().join("cases").join(name);
        analyze(&read(&path), name, None, &AnalysisOptions::default()).unwrap().warnings
    };
    let syfi: Vec<DetectorId> = run("syfi_rebase.sol").iter().map(|w| w.detector).collect();
    let d4 = syfi.iter().filter(|d| **d == DetectorId::D4).count();
    ensure(d4 == 1, || format!("SYFI has {d4} D4 warnings"))?;
    ensure(syfi == [DetectorId::D5, DetectorId::D4], || format!("SYFI warning set {syfi:?}"))?;
    let form: Vec<DetectorId> = run("form_flash_swap.sol").iter().map(|w| w.detector).collect();
    ensure(form == [DetectorId::D5], || format!("FORM warning set {form:?}"))?;
    Ok("SYFI: one D4 (plus the D5 rebase dependency), FORM: exactly one D5".into())
}

fn listings() -> Outcome {
    let l1 = parse_source(&read(&fixtures_dir().join("listings/smart_paradigm.sol")), "l1");
    let c = &l1.contracts[..];
    ensure(c.len() == 1 && c[0].name == "SmartParadigm", || "Listing 1 contract".into())?;
    let c = &c[0];
    let vars: Vec<&str> = c.state_vars.iter().map(|v| v.name.as_str()).collect();
    ensure(vars == ["owner", "totalSupply"], || format!("Listing 1 state vars {vars:?}"))?;
    ensure(c.events.len() == 1 && c.events[0].name == "Transfer", || "Listing 1 events".into())?;
    ensure(c.modifiers.len() == 1 && c.modifiers[0].name == "onlyOwner", || "Listing 1 modifiers".into())?;
    ensure(
        c.functions.len() == 1
            && c.functions[0].name == "updateSupply"
            && c.functions[0].modifiers.iter().map(|m| m.name.as_str()).eq(["onlyOwner"]),
        || "Listing 1 functions".into(),
    )?;

    let l2 = parse_source(&read(&fixtures_dir().join("listings/simple_auction.sol")), "l2");
    ensure(l2.contracts.len() == 1 && l2.contracts[0].name == "SimpleAuction", || "Listing 2 contract".into())?;
    let c = &l2.contracts[0];
    let vars: Vec<&str> = c.state_vars.iter().map(|v| v.name.as_str()).collect();
    ensure(vars == ["highestBidder", "highestBid"], || format!("Listing 2 state vars {vars:?}"))?;
    ensure(c.events.len() == 1 && c.events[0].name == "NewBid", || "Listing 2 events".into())?;
    let f = &c.functions[0];
    ensure(
        c.functions.len() == 1
            && f.name == "placeBid"
            && f.mutability == Mutability::Payable
            && f.flat_statements().iter().filter(|s| s.kind == StatementKind::Require).count() == 1,
        || "Listing 2 placeBid".into(),
    )?;
    let graph = &build_unit_graphs(&l2)[0];
    let id = |k: &str, n: &str| format!("SimpleAuction.{k}.{n}");
    let mut edges: Vec<(EdgeKind, String, String)> =
        graph.edges.iter().map(|e| (e.kind, e.from.clone(), e.to.clone())).collect();
    edges.sort();
    let mut want = vec![
        (EdgeKind::DataWrite, id("function", "placeBid"), id("state_var", "highestBidder")),
        (EdgeKind::DataWrite, id("function", "placeBid"), id("state_var", "highestBid")),
        (EdgeKind::DataRead, id("function", "placeBid"), id("state_var", "highestBid")),
        (EdgeKind::Emits, id("function", "placeBid"), id("event", "NewBid")),
    ];
    want.sort();
    ensure(edges == want, || format!("SimpleAuction edges {edges:?}"))?;
    Ok("component counts match, SimpleAuction has exactly 4 edges".into())
}

fn runner(cases: u32) -> TestRunner {
    TestRunner::new_with_rng(
        Config { cases, failure_persistence: None, ..Config::default() },
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    )
}

fn pseudocode_equivalence() -> Outcome {
    runner(200)
        .run(&gen::contract_strategy(false), |spec| gen::check_d1(&spec).map_err(TestCaseError::fail))
        .map_err(|e| format!("D1: {e}"))?;
    for bits in 0..32u8 {
        gen::check_d2(bits).map_err(|e| format!("D2: {e}"))?;
    }
    let ops = proptest::collection::vec(gen::op_strategy(), 0..18);
    runner(200)
        .run(&(ops, 1usize..8), |(ops, max)| gen::check_d4(&ops, max).map_err(TestCaseError::fail))
        .map_err(|e| format!("D4: {e}"))?;
    Ok("D1 200 random contracts, D2 32 combinations, D4 200 sequences: 0 mismatches".into())
}

fn robustness() -> Outcome {
    let sources: Vec<String> = corpus().into_iter().map(|(_, s)| s).collect();
    let failures = fuzz::campaign(0x5eed, 10_000, &sources);
    ensure(failures.is_empty(), || format!("{} failures, first: {}", failures.len(), failures[0]))?;
    Ok("10000 inputs, 0 panics, every unbalanced input diagnosed".into())
}

fn outputs() -> Vec<(String, String, String)> {
    corpus()
        .iter()
        .map(|(path, src)| {
            let r = analyze(src, &rel(path), None, &AnalysisOptions::default()).unwrap();
            (render_text(&r, false), serialize_json(&r), export_unit_dot(&r.graphs))
        })
        .collect()
}

fn determinism() -> Outcome {
    let (a, b) = (outputs(), outputs());
    ensure(a == b, || "outputs differ between runs".into())?;
    Ok(format!("{} files byte-identical across two runs", a.len()))
}

fn dot_validity() -> Outcome {
    let mut graphs = 0;
    for (path, src) in corpus() {
        for g in build_unit_graphs(&parse_source(&src, &rel(&path))) {
            let parsed = dot::parse(&export_dot(&g)).map_err(|e| format!("{}: {e}", rel(&path)))?;
            ensure(
                parsed.len() == 1 && parsed[0].nodes.len() == g.nodes.len() && parsed[0].edges.len() == g.edges.len(),
                || format!("{}: {} mis-rendered", rel(&path), g.contract_name),
            )?;
            graphs += 1;
        }
    }
    Ok(format!("{graphs} graphs accepted"))
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("detector corpus", detector_corpus),
        ("case-study regressions", case_studies),
        ("listings round-trip", listings),
        ("pseudocode equivalence", pseudocode_equivalence),
        ("robustness", robustness),
        ("determinism", determinism),
        ("DOT validity", dot_validity),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name}: {detail}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
