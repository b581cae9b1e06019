//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p pipevis-cli --test acceptance`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

#[path = "../../core/tests/support/mod.rs"]
mod support;
mod common;

use std::cell::Cell;
use std::panic::{self, AssertUnwindSafe};
use std::time::{Duration, Instant};

use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

use pipevis_core::display::format_fixed;
use pipevis_core::{
    derived_asset_visibility, node_visibility, overall_visibility, parse_document, quality_index, report, scenarios,
    serialize_document, validate_assessment, Assessment, Criterion, IngestError, Judgement, ScoreLevel, WeightScheme,
};

use common::*;
use support::*;

type Check = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

const GOLDEN_TOLERANCE: f64 = 1e-9;
const ORACLE_TOLERANCE: f64 = 1e-12;

const FIRST_PARTY_2023_OVERALL: f64 = 2.9036020036098447;
const SPARSE_OVERALL: f64 = 1.189207115002721;
const DOCUMENTED_OVERALL: f64 = 3.4641016151377544;

/// Rendered cells of the library table for `a`.
fn library_table(a: &Assessment) -> Result<Vec<Vec<String>>, String> {
    let r = overall_visibility(a).map_err(|e| e.to_string())?;
    let body = report::render_table(&r, &a.judgements).map_err(|e| e.to_string())?.body;
    Ok(cells(&body))
}

/// Compares a displayed cell to an expected figure; "3.00" and "3" agree.
fn shows(cell: &str, expected: &str) -> bool {
    match (cell.parse::<f64>(), expected.parse::<f64>()) {
        (Ok(c), Ok(e)) => c == e && cell.len() >= expected.len(),
        _ => false,
    }
}

/// Node rows must display `(quality, vis)`, the overall row `overall`.
fn check_golden(a: &Assessment, nodes: &[(&str, &str, &str)], overall: &str, unrounded: Option<f64>) -> Check {
    let rows = library_table(a)?;
    for &(id, quality, vis) in nodes {
        let row = rows.iter().find(|r| r[0] == id).ok_or(format!("no row for {id}"))?;
        ensure!(shows(&row[4], quality) && shows(&row[5], vis), "{id}: shows {} / {}, want {quality} / {vis}", row[4], row[5]);
    }
    let shown = rows.iter().find(|r| r[0] == OVERALL).map(|r| r[5].clone()).ok_or("no overall row")?;
    ensure!(shows(&shown, overall), "overall shows {shown}, want {overall}");
    if let Some(want) = unrounded {
        let got = overall_visibility(a).map_err(|e| e.to_string())?.overall;
        ensure!((got - want).abs() <= GOLDEN_TOLERANCE, "unrounded overall {got}, want {want}");
    }
    Ok(())
}

fn golden_all_fours() -> Check {
    let a = scenarios::first_party_2019();
    let r = overall_visibility(&a).map_err(|e| e.to_string())?;
    ensure!(r.per_node.len() == 3, "{} leaf rows", r.per_node.len());
    for n in &r.per_node {
        ensure!(n.visibility_index == 4.0, "{} VIS {}", n.node_id, n.visibility_index);
    }
    ensure!(r.overall == 4.0, "overall {}", r.overall);
    check_golden(&a, &[("DS", "4", "4"), ("H1", "4", "4"), ("H2", "4", "4")], "4", None)
}

fn golden_first_party() -> Check {
    check_golden(
        &scenarios::first_party_2023(),
        &[("DS", "2.45", "2.71"), ("H1", "3", "3"), ("H2", "3", "3")],
        "2.90",
        Some(FIRST_PARTY_2023_OVERALL),
    )
}

fn golden_sparse() -> Check {
    let nodes = [("DS", "1.41", "1.19"), ("H1", "1.41", "1.19"), ("H2", "1.41", "1.19")];
    check_golden(&scenarios::third_party_sparse(), &nodes, "1.19", Some(SPARSE_OVERALL))
}

fn golden_documented() -> Check {
    let nodes = [("DS", "3", "3.46"), ("H1", "3", "3.46"), ("H2", "3", "3.46")];
    check_golden(&scenarios::third_party_documented(), &nodes, "3.46", Some(DOCUMENTED_OVERALL))
}

fn formula_oracle() -> Check {
    let all = all_judgements();
    ensure!(all.len() == 64, "{} triples", all.len());
    for j in all {
        let got = node_visibility("n", &j).visibility_index;
        let want = oracle_visibility(j.quantity.value(), j.accuracy.value(), j.freshness.value());
        ensure!(rel_close(got, want, ORACLE_TOLERANCE), "{j:?}: {got} vs {want}");
    }
    Ok(())
}

fn runner(cases: u32) -> TestRunner {
    TestRunner::new_with_rng(
        Config { cases, failure_persistence: None, ..Config::default() },
        proptest::test_runner::TestRng::deterministic_rng(proptest::test_runner::RngAlgorithm::ChaCha),
    )
}

fn property_suite() -> Check {
    for a in ScoreLevel::ALL {
        for f in ScoreLevel::ALL {
            let q = ScoreLevel::ALL[0];
            ensure!(
                quality_index(&Judgement::new(q, a, f)) == quality_index(&Judgement::new(q, f, a)),
                "quality not symmetric at a={a} f={f}"
            );
        }
    }
    for k in ScoreLevel::ALL {
        let v = node_visibility("n", &Judgement::new(k, k, k));
        ensure!(v.visibility_index == k.as_f64() && v.quality_index == k.as_f64(), "fixpoint fails at {k}");
    }

    let strategy = (assessment(12), any::<prop::sample::Index>(), 0usize..3, 0u32..1000);
    let seen = Cell::new(0u32);
    runner(1000)
        .run(&strategy, |(a, pick, c, salt)| {
            seen.set(seen.get() + 1);
            let leaves = a.judgements.len();
            prop_assert!((1..=12).contains(&leaves));
            let base = overall_visibility(&a).unwrap();
            prop_assert!((1.0..=4.0).contains(&base.overall));
            for n in &base.per_node {
                for v in [n.quantity_index, n.quality_index, n.visibility_index] {
                    prop_assert!((1.0..=4.0).contains(&v));
                }
            }

            // Single-field increment.
            let criterion = Criterion::ALL[c];
            let id = a.judgements.keys().nth(pick.index(leaves)).unwrap().clone();
            let old = a.judgements[&id];
            let level = old.get(criterion).value();
            if level < 4 {
                let mut raised = a.clone();
                raised.judgements.insert(id.clone(), old.with(criterion, ScoreLevel::new(i64::from(level) + 1).unwrap()));
                let after = overall_visibility(&raised).unwrap();
                let (nb, na) = (base.node(&id).unwrap(), after.node(&id).unwrap());
                prop_assert!(na.visibility_index > nb.visibility_index);
                if nb.weight > 0.0 {
                    prop_assert!(after.overall > base.overall);
                } else {
                    prop_assert!(after.overall >= base.overall);
                }
            }

            // Equal weights against explicit 1/M.
            let mut equal = a.clone();
            equal.weights = WeightScheme::Equal;
            let mut explicit = a.clone();
            let m = leaves as f64;
            explicit.weights = WeightScheme::Explicit(a.judgements.keys().map(|k| (k.clone(), 1.0 / m)).collect());
            let (e, x) = (overall_visibility(&equal).unwrap(), overall_visibility(&explicit).unwrap());
            prop_assert_eq!(e.overall.to_bits(), x.overall.to_bits());

            // Renaming every id reorders the nodes.
            let renamed = relabel(&a, |id| {
                let rev: String = id.chars().map(|c| char::from_u32(0x7e - (c as u32 - 0x20)).unwrap_or(c)).collect();
                format!("{rev}#{salt}")
            });
            let r = overall_visibility(&renamed).unwrap();
            prop_assert!(rel_close(r.overall, base.overall, ORACLE_TOLERANCE), "{} vs {}", r.overall, base.overall);
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    ensure!(seen.get() >= 1000, "only {} assessments", seen.get());
    Ok(())
}

/// Byte-level edits applied to a valid document.
#[derive(Debug, Clone)]
enum Mutation {
    Flip(prop::sample::Index, u8),
    Delete(prop::sample::Index, usize),
    Insert(prop::sample::Index, Vec<u8>),
    Duplicate(prop::sample::Index, usize),
    Truncate(prop::sample::Index),
}

fn mutation() -> impl Strategy<Value = Mutation> {
    let idx = any::<prop::sample::Index>();
    prop_oneof![
        (idx.clone(), any::<u8>()).prop_map(|(i, b)| Mutation::Flip(i, b)),
        (idx.clone(), 1usize..16).prop_map(|(i, n)| Mutation::Delete(i, n)),
        (idx.clone(), prop::collection::vec(prop::sample::select(b"{}[]\":,0123456789.-eE \\ntrufalsn\xff".to_vec()), 1..8))
            .prop_map(|(i, b)| Mutation::Insert(i, b)),
        (idx.clone(), 1usize..64).prop_map(|(i, n)| Mutation::Duplicate(i, n)),
        idx.prop_map(Mutation::Truncate),
    ]
}

fn apply(doc: &mut Vec<u8>, m: &Mutation) {
    if doc.is_empty() {
        return;
    }
    match m {
        Mutation::Flip(i, b) => {
            let at = i.index(doc.len());
            doc[at] = *b;
        }
        Mutation::Delete(i, n) => {
            let at = i.index(doc.len());
            let end = (at + n).min(doc.len());
            doc.drain(at..end);
        }
        Mutation::Insert(i, bytes) => {
            let at = i.index(doc.len());
            doc.splice(at..at, bytes.iter().copied());
        }
        Mutation::Duplicate(i, n) => {
            let at = i.index(doc.len());
            let end = (at + n).min(doc.len());
            let chunk = doc[at..end].to_vec();
            doc.splice(end..end, chunk);
        }
        Mutation::Truncate(i) => doc.truncate(i.index(doc.len())),
    }
}

/// Parses without panicking; both outcomes must be well-formed.
fn classify(input: &[u8]) -> Result<(), String> {
    let outcome = panic::catch_unwind(AssertUnwindSafe(|| parse_document(input)))
        .map_err(|_| format!("parser panicked on {:?}", String::from_utf8_lossy(input)))?;
    match outcome {
        Ok(a) => {
            ensure!(validate_assessment(&a).is_ok(), "accepted an invalid assessment");
        }
        Err(e) => {
            ensure!(!e.messages().is_empty(), "error without messages: {e:?}");
            if let IngestError::Syntax { line, column, .. } = e {
                ensure!(line >= 1 && column >= 1, "syntax error at {line}:{column}");
            }
        }
    }
    Ok(())
}

fn round_trip() -> Check {
    let trips = Cell::new(0u32);
    runner(500)
        .run(&assessment(12), |a| {
            trips.set(trips.get() + 1);
            let text = serialize_document(&a);
            let back = parse_document(text.as_bytes()).unwrap();
            prop_assert_eq!(&back, &a);
            prop_assert_eq!(serialize_document(&back), text);
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    ensure!(trips.get() >= 500, "only {} round trips", trips.get());

    let previous = panic::take_hook();
    panic::set_hook(Box::new(|_| {}));
    let fuzzed = Cell::new(0u32);
    let random = runner(5000).run(&prop::collection::vec(any::<u8>(), 0..512), |bytes| {
        fuzzed.set(fuzzed.get() + 1);
        classify(&bytes).map_err(TestCaseError::fail)
    });
    let mutated = runner(5000).run(&(assessment(6), prop::collection::vec(mutation(), 1..6)), |(a, edits)| {
        fuzzed.set(fuzzed.get() + 1);
        let mut doc = serialize_document(&a).into_bytes();
        for m in &edits {
            apply(&mut doc, m);
        }
        classify(&doc).map_err(TestCaseError::fail)
    });
    panic::set_hook(previous);
    random.map_err(|e| e.to_string())?;
    mutated.map_err(|e| e.to_string())?;
    ensure!(fuzzed.get() >= 10_000, "only {} fuzzed inputs", fuzzed.get());
    Ok(())
}

fn cli_conformance() -> Check {
    for (file, want) in [(FIRST_PARTY_2019, "4.00"), (FIRST_PARTY_2023, "2.90"), (THIRD_PARTY_SPARSE, "1.19"), (THIRD_PARTY_DOCUMENTED, "3.46")] {
        let r = pipevis(&["score", sample(file).to_str().unwrap()]);
        ensure!(r.code == 0, "score {file}: exit {} {}", r.code, r.stderr);
        let shown = row_value(&r.stdout, OVERALL).unwrap_or_default();
        ensure!(shows(&shown, want), "score {file}: overall {shown}, want {want}");
    }

    let r = pipevis(&[
        "compare",
        sample(THIRD_PARTY_SPARSE).to_str().unwrap(),
        sample(FIRST_PARTY_2023).to_str().unwrap(),
        sample(THIRD_PARTY_DOCUMENTED).to_str().unwrap(),
    ]);
    ensure!(r.code == 0, "compare: exit {} {}", r.code, r.stderr);
    let order: Vec<String> = cells(&r.stdout).into_iter().skip(1).map(|row| row[3].clone()).collect();
    ensure!(order == ["3.46", "2.90", "1.19"], "compare order {order:?}");

    let matrix = invalid_matrix();
    ensure!(matrix.len() >= 10, "only {} invalid cases", matrix.len());
    for case in &matrix {
        let r = run_case(case);
        ensure!(r.code == case.code, "{}: exit {}, want {} ({})", case.name, r.code, case.code, r.stderr.trim());
    }
    Ok(())
}

fn derived_asset() -> Check {
    let hand = (oracle_visibility(3, 2, 3) + oracle_visibility(3, 3, 3)) / 2.0;
    let lib = derived_asset_visibility(&scenarios::first_party_2023(), "LD").map_err(|e| e.to_string())?;
    ensure!(rel_close(lib.overall, hand, ORACLE_TOLERANCE), "library {} vs hand {hand}", lib.overall);
    ensure!(format_fixed(hand, 2) == "2.86", "hand oracle shows {}", format_fixed(hand, 2));

    let r = pipevis(&["score", sample(FIRST_PARTY_2023).to_str().unwrap(), "--node", "LD"]);
    ensure!(r.code == 0, "exit {} {}", r.code, r.stderr);
    let shown = row_value(&r.stdout, OVERALL).unwrap_or_default();
    ensure!(shown == "2.86", "shows {shown}");
    Ok(())
}

struct Criterion_ {
    id: u8,
    name: &'static str,
    limit: Option<Duration>,
    check: fn() -> Check,
}

fn main() {
    let secs = |s| Some(Duration::from_secs(s));
    let criteria = [
        Criterion_ { id: 1, name: "golden all-4 pipeline", limit: secs(1), check: golden_all_fours },
        Criterion_ { id: 2, name: "golden first-party audit", limit: None, check: golden_first_party },
        Criterion_ { id: 3, name: "golden sparse third party", limit: None, check: golden_sparse },
        Criterion_ { id: 4, name: "golden documented third party", limit: None, check: golden_documented },
        Criterion_ { id: 5, name: "exhaustive formula oracle", limit: None, check: formula_oracle },
        Criterion_ { id: 6, name: "property suite", limit: secs(30), check: property_suite },
        Criterion_ { id: 7, name: "round trip and parser fuzzing", limit: secs(60), check: round_trip },
        Criterion_ { id: 8, name: "cli conformance", limit: None, check: cli_conformance },
        Criterion_ { id: 9, name: "derived asset scoring", limit: None, check: derived_asset },
    ];

    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let result = panic::catch_unwind(c.check).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let result = match (result, c.limit) {
            (Ok(()), Some(limit)) if elapsed > limit => Err(format!("took {elapsed:.2?}, limit {limit:?}")),
            (r, _) => r,
        };
        match result {
            Ok(()) => println!("criterion {} PASS {} ({elapsed:.2?})", c.id, c.name),
            Err(why) => {
                failed += 1;
                println!("criterion {} FAIL {}: {why}", c.id, c.name);
            }
        }
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
    println!("all {} criteria passed", criteria.len());
}
