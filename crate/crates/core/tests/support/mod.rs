//! Random valid assessments and independent oracles, shared by the property
//! tests and the acceptance suite.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use chrono::NaiveDate;
use proptest::prelude::*;

use pipevis_core::{
    Assessment, ContributionNode, Edge, Judgement, NodeKind, PipelineGraph, ScoreLevel, WeightScheme,
};

pub fn judgement() -> impl Strategy<Value = Judgement> {
    (1i64..=4, 1i64..=4, 1i64..=4).prop_map(|(q, a, f)| Judgement::from_scores(q, a, f).unwrap())
}

fn text() -> impl Strategy<Value = String> {
    prop_oneof![
        "[a-zA-Z0-9 _./-]{0,16}",
        "\\PC{0,12}",
    ]
}

/// Layout of a random pipeline before ids are assigned.
#[derive(Debug, Clone)]
struct Shape {
    leaf_humans: Vec<bool>,
    derived: usize,
    /// Target index per leaf, into `derived` plus the output at the end.
    leaf_targets: Vec<usize>,
    /// Target per derived node, strictly later in the chain.
    derived_targets: Vec<usize>,
}

fn shape(max_leaves: usize) -> impl Strategy<Value = Shape> {
    (1..=max_leaves, 0usize..=3).prop_flat_map(|(leaves, derived)| {
        (
            prop::collection::vec(any::<bool>(), leaves),
            prop::collection::vec(0..=derived, leaves),
            prop::collection::vec(any::<prop::sample::Index>(), derived),
        )
            .prop_map(move |(leaf_humans, leaf_targets, picks)| {
                let derived_targets = picks
                    .iter()
                    .enumerate()
                    .map(|(i, p)| i + 1 + p.index(derived - i))
                    .collect();
                Shape { leaf_humans, derived, leaf_targets, derived_targets }
            })
    })
}

fn build_graph(s: &Shape, labels: &[String]) -> PipelineGraph {
    let leaf_id = |i: usize| format!("L{i:02}");
    let target_id = |t: usize| if t == s.derived { "OUT".to_string() } else { format!("D{t}") };

    let mut nodes = Vec::new();
    let mut edges = BTreeSet::new();
    for (i, &human) in s.leaf_humans.iter().enumerate() {
        let kind = if human { NodeKind::HumanContributor } else { NodeKind::DataSource };
        let mut node = ContributionNode::new(leaf_id(i), kind, labels[i % labels.len()].clone());
        if i % 3 == 0 {
            node = node.with_description(labels[(i + 1) % labels.len()].clone());
        }
        if i % 2 == 1 {
            node = node.with_evidence(format!("doc://{i}/{}", labels[i % labels.len()]));
        }
        nodes.push(node);
        edges.insert(Edge::new(leaf_id(i), target_id(s.leaf_targets[i])));
    }
    for d in 0..s.derived {
        nodes.push(ContributionNode::new(format!("D{d}"), NodeKind::DerivedAsset, format!("derived {d}")));
        edges.insert(Edge::new(format!("D{d}"), target_id(s.derived_targets[d])));
        let fed = edges.iter().any(|e| e.to == format!("D{d}"));
        if !fed {
            edges.insert(Edge::new(leaf_id(d % s.leaf_humans.len()), format!("D{d}")));
        }
    }
    nodes.push(ContributionNode::new("OUT", NodeKind::OutputAsset, "output"));
    PipelineGraph::new(nodes, edges.into_iter().collect())
}

pub fn weights_for(leaves: &[String], raw: &[u32], equal: bool) -> WeightScheme {
    if equal {
        return WeightScheme::Equal;
    }
    let total: f64 = raw.iter().map(|&r| f64::from(r)).sum();
    let mut map: BTreeMap<String, f64> =
        leaves.iter().zip(raw).map(|(id, &r)| (id.clone(), f64::from(r) / total)).collect();
    // Fold the rounding residue into the last weight so the sum is 1 to within an ulp.
    let residue = 1.0 - map.values().sum::<f64>();
    if let Some(last) = map.values_mut().last() {
        *last = (*last + residue).max(0.0);
    }
    WeightScheme::Explicit(map)
}

/// Valid assessments with `1..=max_leaves` leaves, 0-3 derived assets,
/// equal or explicit weights.
pub fn assessment(max_leaves: usize) -> impl Strategy<Value = Assessment> {
    shape(max_leaves).prop_flat_map(|s| {
        let n = s.leaf_humans.len();
        (
            Just(s),
            prop::collection::vec(judgement(), n),
            prop::collection::vec(1u32..1000, n),
            any::<bool>(),
            prop::collection::vec(text(), 1..4),
            (text(), text(), text()),
            (0i64..20_000, 0u32..=6),
        )
            .prop_map(move |(s, js, raw_w, equal, labels, (name, version, assessor), (day, precision))| {
                let graph = build_graph(&s, &labels);
                let leaves: Vec<String> = (0..n).map(|i| format!("L{i:02}")).collect();
                let judgements = leaves.iter().cloned().zip(js).collect();
                Assessment {
                    graph,
                    judgements,
                    weights: weights_for(&leaves, &raw_w, equal),
                    asset_name: name,
                    asset_version: version,
                    assessed_at: NaiveDate::from_ymd_opt(1990, 1, 1).unwrap() + chrono::Days::new(day as u64),
                    assessor,
                    display_precision: precision,
                }
            })
    })
}

/// `sqrt(q * sqrt(a * f))`, written out directly.
pub fn oracle_visibility(q: u8, a: u8, f: u8) -> f64 {
    let quality = (f64::from(a) * f64::from(f)).sqrt();
    (f64::from(q) * quality).sqrt()
}

pub fn all_judgements() -> Vec<Judgement> {
    let mut out = Vec::with_capacity(64);
    for q in ScoreLevel::ALL {
        for a in ScoreLevel::ALL {
            for f in ScoreLevel::ALL {
                out.push(Judgement::new(q, a, f));
            }
        }
    }
    out
}

/// Kahn's algorithm; `None` when the edges contain a cycle.
pub fn kahn_order(graph: &PipelineGraph) -> Option<Vec<String>> {
    let mut indegree: BTreeMap<&str, usize> = graph.nodes().iter().map(|n| (n.id.as_str(), 0)).collect();
    for e in graph.edges() {
        *indegree.get_mut(e.to.as_str())? += 1;
    }
    let mut queue: VecDeque<&str> = indegree.iter().filter(|(_, &d)| d == 0).map(|(&id, _)| id).collect();
    let mut order = Vec::new();
    while let Some(id) = queue.pop_front() {
        order.push(id.to_string());
        for e in graph.edges().iter().filter(|e| e.from == id) {
            let d = indegree.get_mut(e.to.as_str())?;
            *d -= 1;
            if *d == 0 {
                queue.push_back(e.to.as_str());
            }
        }
    }
    (order.len() == indegree.len()).then_some(order)
}

/// Leaf ids by counting in-degrees over the edge list.
pub fn in_degree_leaves(graph: &PipelineGraph) -> Vec<String> {
    let targets: BTreeSet<&str> = graph.edges().iter().map(|e| e.to.as_str()).collect();
    let mut ids: Vec<String> = graph
        .nodes()
        .iter()
        .filter(|n| !targets.contains(n.id.as_str()))
        .map(|n| n.id.clone())
        .collect();
    ids.sort();
    ids
}

/// Renames every node id with `rename`, carrying judgements and weights.
pub fn relabel(a: &Assessment, rename: impl Fn(&str) -> String) -> Assessment {
    let nodes = a
        .graph
        .nodes()
        .iter()
        .map(|n| ContributionNode { id: rename(&n.id), ..n.clone() })
        .collect();
    let edges = a.graph.edges().iter().map(|e| Edge::new(rename(&e.from), rename(&e.to))).collect();
    let weights = match &a.weights {
        WeightScheme::Equal => WeightScheme::Equal,
        WeightScheme::Explicit(m) => WeightScheme::Explicit(m.iter().map(|(k, v)| (rename(k), *v)).collect()),
    };
    Assessment {
        graph: PipelineGraph::new(nodes, edges),
        judgements: a.judgements.iter().map(|(k, j)| (rename(k), *j)).collect(),
        weights,
        ..a.clone()
    }
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs())
}
