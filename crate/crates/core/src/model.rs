//! Domain types for contribution pipelines, judgements and assessments.
//!
//! A [`PipelineGraph`] is a DAG whose edges read "from contributes to to".
//! Only leaf nodes (zero in-degree) carry judgements; derived assets and the
//! output asset take their transparency from the leaves upstream of them.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use chrono::NaiveDate;
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use crate::error::{Error, Result};

/// Absolute tolerance on the sum of an explicit weight vector.
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;

/// Lowest and highest rubric levels.
pub const MIN_SCORE: u8 = 1;
pub const MAX_SCORE: u8 = 4;

/// A rubric level in `1..=4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ScoreLevel(u8);

impl ScoreLevel {
    pub const ALL: [ScoreLevel; 4] = [ScoreLevel(1), ScoreLevel(2), ScoreLevel(3), ScoreLevel(4)];

    pub fn new(value: i64) -> Result<Self> {
        if (MIN_SCORE as i64..=MAX_SCORE as i64).contains(&value) {
            Ok(ScoreLevel(value as u8))
        } else {
            Err(Error::ScoreOutOfRange(value))
        }
    }

    pub fn value(self) -> u8 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.0)
    }
}

impl TryFrom<i64> for ScoreLevel {
    type Error = Error;

    fn try_from(value: i64) -> Result<Self> {
        ScoreLevel::new(value)
    }
}

impl fmt::Display for ScoreLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The three rubric criteria a leaf node is judged against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Criterion {
    Quantity,
    Freshness,
    Accuracy,
}

impl Criterion {
    /// Column order used by the rubric and score tables.
    pub const ALL: [Criterion; 3] = [Criterion::Quantity, Criterion::Freshness, Criterion::Accuracy];

    pub fn as_str(self) -> &'static str {
        match self {
            Criterion::Quantity => "quantity",
            Criterion::Freshness => "freshness",
            Criterion::Accuracy => "accuracy",
        }
    }

    pub fn heading(self) -> &'static str {
        match self {
            Criterion::Quantity => "Quantity",
            Criterion::Freshness => "Freshness",
            Criterion::Accuracy => "Accuracy",
        }
    }
}

impl std::str::FromStr for Criterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "quantity" => Ok(Criterion::Quantity),
            "freshness" => Ok(Criterion::Freshness),
            "accuracy" => Ok(Criterion::Accuracy),
            _ => Err(Error::UnknownCriterion(s.to_string())),
        }
    }
}

/// Scores for one leaf node: quantity, accuracy and freshness of the
/// information available about it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Judgement {
    pub quantity: ScoreLevel,
    pub accuracy: ScoreLevel,
    pub freshness: ScoreLevel,
}

impl Judgement {
    pub fn new(quantity: ScoreLevel, accuracy: ScoreLevel, freshness: ScoreLevel) -> Self {
        Judgement { quantity, accuracy, freshness }
    }

    /// Builds a judgement from raw integers in `(quantity, accuracy, freshness)` order.
    pub fn from_scores(quantity: i64, accuracy: i64, freshness: i64) -> Result<Self> {
        Ok(Judgement {
            quantity: ScoreLevel::new(quantity)?,
            accuracy: ScoreLevel::new(accuracy)?,
            freshness: ScoreLevel::new(freshness)?,
        })
    }

    pub fn get(&self, criterion: Criterion) -> ScoreLevel {
        match criterion {
            Criterion::Quantity => self.quantity,
            Criterion::Freshness => self.freshness,
            Criterion::Accuracy => self.accuracy,
        }
    }

    /// Returns a copy with one criterion replaced.
    pub fn with(mut self, criterion: Criterion, level: ScoreLevel) -> Self {
        match criterion {
            Criterion::Quantity => self.quantity = level,
            Criterion::Freshness => self.freshness = level,
            Criterion::Accuracy => self.accuracy = level,
        }
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NodeKind {
    DataSource,
    HumanContributor,
    DerivedAsset,
    OutputAsset,
}

impl NodeKind {
    pub const ALL: [NodeKind; 4] = [
        NodeKind::DataSource,
        NodeKind::HumanContributor,
        NodeKind::DerivedAsset,
        NodeKind::OutputAsset,
    ];

    /// Identifier used in documents.
    pub fn as_str(self) -> &'static str {
        match self {
            NodeKind::DataSource => "data_source",
            NodeKind::HumanContributor => "human_contributor",
            NodeKind::DerivedAsset => "derived_asset",
            NodeKind::OutputAsset => "output_asset",
        }
    }

    pub fn parse(s: &str) -> Option<NodeKind> {
        NodeKind::ALL.into_iter().find(|k| k.as_str() == s)
    }

    /// Kinds allowed to sit at the top of a pipeline.
    pub fn may_be_leaf(self) -> bool {
        matches!(self, NodeKind::DataSource | NodeKind::HumanContributor)
    }
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContributionNode {
    pub id: String,
    pub kind: NodeKind,
    pub label: String,
    pub description: Option<String>,
    /// Locators for documents that support the judgements on this node.
    pub evidence_refs: Vec<String>,
}

impl ContributionNode {
    pub fn new(id: impl Into<String>, kind: NodeKind, label: impl Into<String>) -> Self {
        ContributionNode {
            id: id.into(),
            kind,
            label: label.into(),
            description: None,
            evidence_refs: Vec::new(),
        }
    }

    pub fn with_description(mut self, description: impl Into<String>) -> Self {
        self.description = Some(description.into());
        self
    }

    pub fn with_evidence(mut self, evidence: impl Into<String>) -> Self {
        self.evidence_refs.push(evidence.into());
        self
    }
}

/// Directed contribution: `from` contributes to `to`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub from: String,
    pub to: String,
}

impl Edge {
    pub fn new(from: impl Into<String>, to: impl Into<String>) -> Self {
        Edge { from: from.into(), to: to.into() }
    }
}

/// Contribution DAG for one produced asset.
///
/// Nodes are kept sorted by id and edges by `(from, to)`, so two graphs built
/// from the same nodes in a different order compare equal. Duplicates are
/// retained so that [`validate_graph`] can report them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PipelineGraph {
    nodes: Vec<ContributionNode>,
    edges: Vec<Edge>,
}

impl PipelineGraph {
    pub fn new(mut nodes: Vec<ContributionNode>, mut edges: Vec<Edge>) -> Self {
        nodes.sort_by(|a, b| a.id.cmp(&b.id));
        edges.sort();
        PipelineGraph { nodes, edges }
    }

    pub fn nodes(&self) -> &[ContributionNode] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn node(&self, id: &str) -> Option<&ContributionNode> {
        self.nodes
            .binary_search_by(|n| n.id.as_str().cmp(id))
            .ok()
            .map(|i| &self.nodes[i])
    }

    /// Ids of nodes with no incoming edge from a known node. Does not check
    /// validity.
    pub(crate) fn zero_in_degree_ids(&self) -> BTreeSet<&str> {
        let known: BTreeSet<&str> = self.nodes.iter().map(|n| n.id.as_str()).collect();
        let targets: BTreeSet<&str> = self
            .edges
            .iter()
            .filter(|e| known.contains(e.from.as_str()))
            .map(|e| e.to.as_str())
            .collect();
        known.difference(&targets).copied().collect()
    }

    /// Leaf ids upstream of `id` (or `id` itself when it is a leaf).
    pub(crate) fn ancestor_leaves(&self, id: &str) -> BTreeSet<String> {
        let leaves = self.zero_in_degree_ids();
        let mut incoming: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
        for e in &self.edges {
            incoming.entry(e.to.as_str()).or_default().push(e.from.as_str());
        }
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::from([id]);
        let mut found = BTreeSet::new();
        while let Some(current) = queue.pop_front() {
            if !seen.insert(current) {
                continue;
            }
            if leaves.contains(current) {
                found.insert(current.to_string());
            }
            for &up in incoming.get(current).into_iter().flatten() {
                queue.push_back(up);
            }
        }
        found
    }

    pub fn output(&self) -> Option<&ContributionNode> {
        self.nodes.iter().find(|n| n.kind == NodeKind::OutputAsset)
    }
}

/// One structural problem found by validation.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    EmptyNodeId,
    DuplicateNode(String),
    DuplicateEdge { from: String, to: String },
    UnknownEdgeEndpoint { from: String, to: String, missing: String },
    SelfEdge(String),
    Cycle(Vec<String>),
    NoOutput,
    MultipleOutputs(Vec<String>),
    OutputWithoutInput(String),
    DerivedWithoutInput(String),
    NoPathToOutput(String),
    MissingJudgement(String),
    JudgementOnNonLeaf(String),
    JudgementOnUnknownNode(String),
    MissingWeight(String),
    WeightOnNonLeaf(String),
    WeightOnUnknownNode(String),
    InvalidWeightValue { id: String, value: f64 },
    WeightKeysIncomplete { sum: f64 },
    WeightSum { sum: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyNodeId => write!(f, "node with empty id"),
            Violation::DuplicateNode(id) => write!(f, "duplicate node id {id}"),
            Violation::DuplicateEdge { from, to } => write!(f, "duplicate edge {from}->{to}"),
            Violation::UnknownEdgeEndpoint { from, to, missing } => {
                write!(f, "edge {from}->{to} references unknown node {missing}")
            }
            Violation::SelfEdge(id) => write!(f, "self edge on node {id}"),
            Violation::Cycle(ids) => write!(f, "cycle detected: {}", ids.join(",")),
            Violation::NoOutput => write!(f, "graph has no output asset"),
            Violation::MultipleOutputs(ids) => {
                write!(f, "graph has more than one output asset: {}", ids.join(","))
            }
            Violation::OutputWithoutInput(id) => write!(f, "output has no incoming edge: {id}"),
            Violation::DerivedWithoutInput(id) => {
                write!(f, "derived asset has no incoming edge: {id}")
            }
            Violation::NoPathToOutput(id) => write!(f, "node has no path to output: {id}"),
            Violation::MissingJudgement(id) => write!(f, "missing judgement for {id}"),
            Violation::JudgementOnNonLeaf(id) => write!(f, "judgement on non-leaf node {id}"),
            Violation::JudgementOnUnknownNode(id) => write!(f, "judgement on unknown node {id}"),
            Violation::MissingWeight(id) => write!(f, "missing weight for {id}"),
            Violation::WeightOnNonLeaf(id) => write!(f, "weight on non-leaf node {id}"),
            Violation::WeightOnUnknownNode(id) => write!(f, "weight on unknown node {id}"),
            Violation::InvalidWeightValue { id, value } => {
                write!(f, "weight for {id} must be finite and non-negative, got {value:?}")
            }
            Violation::WeightKeysIncomplete { sum } => {
                write!(f, "weights sum {sum:?} but key set incomplete")
            }
            Violation::WeightSum { sum } => {
                write!(f, "weights sum {sum:?}, expected 1 within {WEIGHT_SUM_TOLERANCE:e}")
            }
        }
    }
}

/// Ordered list of violations. Empty means valid.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Violations(pub Vec<Violation>);

impl Violations {
    pub fn is_ok(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Violation> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Rendered messages, one per violation.
    pub fn messages(&self) -> Vec<String> {
        self.0.iter().map(ToString::to_string).collect()
    }

    fn push(&mut self, v: Violation) {
        self.0.push(v);
    }
}

impl fmt::Display for Violations {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl<'a> IntoIterator for &'a Violations {
    type Item = &'a Violation;
    type IntoIter = std::slice::Iter<'a, Violation>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// Checks every graph invariant and reports all violations, in a fixed order.
pub fn validate_graph(graph: &PipelineGraph) -> Violations {
    let mut out = Violations::default();

    let mut ids = BTreeSet::new();
    let mut reported_dup = BTreeSet::new();
    for node in &graph.nodes {
        if node.id.is_empty() {
            out.push(Violation::EmptyNodeId);
        } else if !ids.insert(node.id.as_str()) && reported_dup.insert(node.id.as_str()) {
            out.push(Violation::DuplicateNode(node.id.clone()));
        }
    }

    // Edges that survive endpoint checks feed the structural passes below.
    let mut usable: Vec<&Edge> = Vec::new();
    let mut prev: Option<&Edge> = None;
    for edge in &graph.edges {
        if prev == Some(edge) {
            out.push(Violation::DuplicateEdge { from: edge.from.clone(), to: edge.to.clone() });
            continue;
        }
        prev = Some(edge);
        let mut ok = true;
        for end in [&edge.from, &edge.to] {
            if !ids.contains(end.as_str()) {
                out.push(Violation::UnknownEdgeEndpoint {
                    from: edge.from.clone(),
                    to: edge.to.clone(),
                    missing: end.clone(),
                });
                ok = false;
                if edge.from == edge.to {
                    break;
                }
            }
        }
        if edge.from == edge.to {
            if ok {
                out.push(Violation::SelfEdge(edge.from.clone()));
            }
            ok = false;
        }
        if ok {
            usable.push(edge);
        }
    }

    let mut dag: DiGraph<&str, ()> = DiGraph::new();
    let index: BTreeMap<&str, _> = ids.iter().map(|&id| (id, dag.add_node(id))).collect();
    for e in &usable {
        dag.add_edge(index[e.from.as_str()], index[e.to.as_str()], ());
    }
    let mut cycles: Vec<Vec<String>> = tarjan_scc(&dag)
        .into_iter()
        .filter(|scc| scc.len() > 1)
        .map(|scc| {
            let mut members: Vec<String> = scc.iter().map(|&ix| dag[ix].to_string()).collect();
            members.sort();
            members
        })
        .collect();
    cycles.sort();
    out.0.extend(cycles.into_iter().map(Violation::Cycle));

    let mut has_input: BTreeSet<&str> = BTreeSet::new();
    for e in &usable {
        has_input.insert(e.to.as_str());
    }

    let mut outputs: Vec<&str> = Vec::new();
    let mut seen = BTreeSet::new();
    for node in &graph.nodes {
        if node.id.is_empty() || !seen.insert(node.id.as_str()) {
            continue;
        }
        if node.kind == NodeKind::OutputAsset {
            outputs.push(node.id.as_str());
        }
    }
    match outputs.len() {
        0 => out.push(Violation::NoOutput),
        1 => {}
        _ => out.push(Violation::MultipleOutputs(outputs.iter().map(|s| s.to_string()).collect())),
    }

    seen.clear();
    for node in &graph.nodes {
        if node.id.is_empty() || !seen.insert(node.id.as_str()) {
            continue;
        }
        if has_input.contains(node.id.as_str()) {
            continue;
        }
        match node.kind {
            NodeKind::OutputAsset => out.push(Violation::OutputWithoutInput(node.id.clone())),
            NodeKind::DerivedAsset => out.push(Violation::DerivedWithoutInput(node.id.clone())),
            _ => {}
        }
    }

    if let [output] = outputs.as_slice() {
        let mut incoming: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
        for e in &usable {
            incoming.entry(e.to.as_str()).or_default().push(e.from.as_str());
        }
        let mut reach = BTreeSet::new();
        let mut queue = VecDeque::from([*output]);
        while let Some(cur) = queue.pop_front() {
            if reach.insert(cur) {
                queue.extend(incoming.get(cur).into_iter().flatten().copied());
            }
        }
        for id in &ids {
            if !reach.contains(id) {
                out.push(Violation::NoPathToOutput(id.to_string()));
            }
        }
    }

    out
}

/// Leaf nodes (zero in-degree), sorted by id.
pub fn leaf_nodes(graph: &PipelineGraph) -> Result<Vec<&ContributionNode>> {
    let violations = validate_graph(graph);
    if !violations.is_ok() {
        return Err(Error::InvalidGraph(violations));
    }
    let leaves = graph.zero_in_degree_ids();
    Ok(graph.nodes.iter().filter(|n| leaves.contains(n.id.as_str())).collect())
}

/// How leaf visibilities are combined into the overall index.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightScheme {
    /// `1/M` for each of the `M` leaves.
    Equal,
    /// Per-leaf weights; must cover exactly the leaves and sum to 1.
    Explicit(BTreeMap<String, f64>),
}

impl WeightScheme {
    /// Weight for every id in `leaves` under this scheme. Missing explicit
    /// entries read as 0.
    pub fn resolve<'a, I>(&self, leaves: I) -> BTreeMap<String, f64>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let leaves: Vec<&str> = leaves.into_iter().collect();
        match self {
            WeightScheme::Equal => {
                let w = 1.0 / leaves.len() as f64;
                leaves.into_iter().map(|id| (id.to_string(), w)).collect()
            }
            WeightScheme::Explicit(map) => leaves
                .into_iter()
                .map(|id| (id.to_string(), map.get(id).copied().unwrap_or(0.0)))
                .collect(),
        }
    }
}

/// Checks a weight scheme against the leaf set of `graph`.
pub fn validate_weights(graph: &PipelineGraph, weights: &WeightScheme) -> Violations {
    let mut out = Violations::default();
    let WeightScheme::Explicit(map) = weights else {
        return out;
    };
    let leaves = graph.zero_in_degree_ids();
    let mut missing = false;
    for leaf in &leaves {
        if !map.contains_key(*leaf) {
            out.push(Violation::MissingWeight(leaf.to_string()));
            missing = true;
        }
    }
    for (id, &value) in map {
        if !leaves.contains(id.as_str()) {
            if graph.node(id).is_some() {
                out.push(Violation::WeightOnNonLeaf(id.clone()));
            } else {
                out.push(Violation::WeightOnUnknownNode(id.clone()));
            }
        }
        if !value.is_finite() || value < 0.0 {
            out.push(Violation::InvalidWeightValue { id: id.clone(), value });
        }
    }
    let sum: f64 = map.values().sum();
    if missing {
        out.push(Violation::WeightKeysIncomplete { sum });
    } else if !sum.is_finite() || (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
        out.push(Violation::WeightSum { sum });
    }
    out
}

/// A dated, attributed judgement of one pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct Assessment {
    pub graph: PipelineGraph,
    pub judgements: BTreeMap<String, Judgement>,
    pub weights: WeightScheme,
    pub asset_name: String,
    pub asset_version: String,
    pub assessed_at: NaiveDate,
    pub assessor: String,
    /// Decimal places used when rendering this assessment.
    pub display_precision: u32,
}

pub const DEFAULT_DISPLAY_PRECISION: u32 = 2;

impl Assessment {
    pub fn validate(&self) -> Violations {
        validate_assessment(self)
    }

    pub fn leaf_ids(&self) -> BTreeSet<&str> {
        self.graph.zero_in_degree_ids()
    }
}

/// Graph checks, then judgement keys, then weights.
pub fn validate_assessment(assessment: &Assessment) -> Violations {
    let mut out = validate_graph(&assessment.graph);
    let leaves = assessment.graph.zero_in_degree_ids();
    for leaf in &leaves {
        if !assessment.judgements.contains_key(*leaf) {
            out.push(Violation::MissingJudgement(leaf.to_string()));
        }
    }
    for id in assessment.judgements.keys() {
        if leaves.contains(id.as_str()) {
            continue;
        }
        if assessment.graph.node(id).is_some() {
            out.push(Violation::JudgementOnNonLeaf(id.clone()));
        } else {
            out.push(Violation::JudgementOnUnknownNode(id.clone()));
        }
    }
    out.0.extend(validate_weights(&assessment.graph, &assessment.weights).0);
    out
}
