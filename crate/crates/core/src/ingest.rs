//! Reading and writing assessment documents.
//!
//! The carrier is a single UTF-8 JSON object, schema version `1.0`:
//!
//! ```json
//! {
//!   "schema_version": "1.0",
//!   "asset": { "name": "model", "version": "1.0" },
//!   "assessed_at": "2023-06-01",
//!   "assessor": "jane",
//!   "nodes": [ { "id": "DS", "kind": "data_source", "label": "Training data" } ],
//!   "edges": [ { "from": "DS", "to": "M" } ],
//!   "judgements": { "DS": { "quantity": 3, "accuracy": 2, "freshness": 3 } },
//!   "weights": "equal",
//!   "display_precision": 2
//! }
//! ```
//!
//! Parsing happens in three stages: JSON syntax, then the document schema
//! (every problem collected with its path), then the model invariants.

use std::collections::BTreeMap;
use std::fmt;

use chrono::NaiveDate;
use serde::de::{self, Deserialize, Deserializer, MapAccess, SeqAccess, Visitor};
use serde::Serialize;
use thiserror::Error;

use crate::model::{
    validate_assessment, Assessment, ContributionNode, Edge, Judgement, NodeKind, PipelineGraph,
    ScoreLevel, Violations, WeightScheme, DEFAULT_DISPLAY_PRECISION,
};

pub const SCHEMA_VERSION: &str = "1.0";

/// Largest accepted `display_precision`.
pub const MAX_DISPLAY_PRECISION: u32 = 15;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemaViolation {
    /// Dotted location, `$` for the document root.
    pub path: String,
    pub message: String,
}

impl fmt::Display for SchemaViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IngestError {
    #[error("malformed syntax at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },

    #[error("unknown schema version {0:?} (supported: {SCHEMA_VERSION})")]
    UnknownSchemaVersion(String),

    #[error("schema violation: {}", join(.0))]
    Schema(Vec<SchemaViolation>),

    #[error("semantic violation: {0}")]
    Semantic(Violations),
}

fn join(items: &[SchemaViolation]) -> String {
    items.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

impl IngestError {
    /// One message per underlying problem.
    pub fn messages(&self) -> Vec<String> {
        match self {
            IngestError::Schema(items) => items.iter().map(ToString::to_string).collect(),
            IngestError::Semantic(v) => v.messages(),
            other => vec![other.to_string()],
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ParseOptions {
    /// Report unknown fields as warnings instead of schema violations.
    pub lenient: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Parsed {
    pub assessment: Assessment,
    pub warnings: Vec<String>,
}

/// Strict parse of a document.
pub fn parse_document(input: &[u8]) -> Result<Assessment, IngestError> {
    parse_document_with(input, ParseOptions::default()).map(|p| p.assessment)
}

pub fn parse_document_with(input: &[u8], options: ParseOptions) -> Result<Parsed, IngestError> {
    let raw: Raw = serde_json::from_slice(input).map_err(|e| IngestError::Syntax {
        line: e.line().max(1),
        column: e.column().max(1),
        message: strip_position(&e.to_string()),
    })?;

    let mut walk = Walk { options, errors: Vec::new(), warnings: Vec::new() };
    let assessment = walk.document(&raw)?;
    if !walk.errors.is_empty() {
        return Err(IngestError::Schema(walk.errors));
    }
    let assessment = assessment.expect("no schema errors implies a document");

    let violations = validate_assessment(&assessment);
    if !violations.is_ok() {
        return Err(IngestError::Semantic(violations));
    }
    Ok(Parsed { assessment, warnings: walk.warnings })
}

fn strip_position(msg: &str) -> String {
    match msg.rfind(" at line ") {
        Some(i) => msg[..i].to_string(),
        None => msg.to_string(),
    }
}

/// JSON tree that keeps duplicate object keys so they can be reported.
#[derive(Debug, Clone)]
enum Raw {
    Null,
    Bool,
    Number(serde_json::Number),
    String(String),
    Array(Vec<Raw>),
    Object(Vec<(String, Raw)>),
}

impl Raw {
    fn type_name(&self) -> &'static str {
        match self {
            Raw::Null => "null",
            Raw::Bool => "boolean",
            Raw::Number(_) => "number",
            Raw::String(_) => "string",
            Raw::Array(_) => "array",
            Raw::Object(_) => "object",
        }
    }
}

impl<'de> Deserialize<'de> for Raw {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct RawVisitor;

        impl<'de> Visitor<'de> for RawVisitor {
            type Value = Raw;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("any JSON value")
            }

            fn visit_bool<E>(self, _: bool) -> Result<Raw, E> {
                Ok(Raw::Bool)
            }

            fn visit_i64<E>(self, v: i64) -> Result<Raw, E> {
                Ok(Raw::Number(v.into()))
            }

            fn visit_u64<E>(self, v: u64) -> Result<Raw, E> {
                Ok(Raw::Number(v.into()))
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Raw, E> {
                serde_json::Number::from_f64(v)
                    .map(Raw::Number)
                    .ok_or_else(|| E::custom("non-finite number"))
            }

            fn visit_str<E>(self, v: &str) -> Result<Raw, E> {
                Ok(Raw::String(v.to_string()))
            }

            fn visit_string<E>(self, v: String) -> Result<Raw, E> {
                Ok(Raw::String(v))
            }

            fn visit_unit<E>(self) -> Result<Raw, E> {
                Ok(Raw::Null)
            }

            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Raw, A::Error> {
                let mut items = Vec::new();
                while let Some(item) = seq.next_element()? {
                    items.push(item);
                }
                Ok(Raw::Array(items))
            }

            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<Raw, A::Error> {
                let mut fields = Vec::new();
                while let Some((k, v)) = map.next_entry::<String, Raw>()? {
                    fields.push((k, v));
                }
                Ok(Raw::Object(fields))
            }
        }

        deserializer.deserialize_any(RawVisitor)
    }
}

fn child(path: &str, key: &str) -> String {
    if path == "$" {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

struct Walk {
    options: ParseOptions,
    errors: Vec<SchemaViolation>,
    warnings: Vec<String>,
}

impl Walk {
    fn fail(&mut self, path: &str, message: impl Into<String>) {
        self.errors.push(SchemaViolation { path: path.to_string(), message: message.into() });
    }

    fn type_error(&mut self, path: &str, expected: &str, got: &Raw) {
        self.fail(path, format!("expected {expected}, got {}", got.type_name()));
    }

    /// First occurrence of every key; duplicates are reported.
    fn fields<'r>(&mut self, path: &str, raw: &'r Raw) -> Option<BTreeMap<&'r str, &'r Raw>> {
        let Raw::Object(entries) = raw else {
            self.type_error(path, "object", raw);
            return None;
        };
        let mut out = BTreeMap::new();
        for (k, v) in entries {
            if out.contains_key(k.as_str()) {
                self.fail(&child(path, k), "duplicate field");
            } else {
                out.insert(k.as_str(), v);
            }
        }
        Some(out)
    }

    /// Object with a fixed key set.
    fn record<'r>(
        &mut self,
        path: &str,
        raw: &'r Raw,
        required: &[&str],
        optional: &[&str],
    ) -> Option<BTreeMap<&'r str, &'r Raw>> {
        let fields = self.fields(path, raw)?;
        for key in required {
            if !fields.contains_key(key) {
                self.fail(&child(path, key), "missing required field");
            }
        }
        for key in fields.keys() {
            if !required.contains(key) && !optional.contains(key) {
                let at = child(path, key);
                if self.options.lenient {
                    self.warnings.push(format!("{at}: unknown field ignored"));
                } else {
                    self.fail(&at, "unknown field");
                }
            }
        }
        Some(fields)
    }

    fn string(&mut self, path: &str, raw: Option<&&Raw>) -> Option<String> {
        match raw {
            None => None,
            Some(Raw::String(s)) => Some(s.clone()),
            Some(other) => {
                self.type_error(path, "string", other);
                None
            }
        }
    }

    fn integer(&mut self, path: &str, raw: &Raw) -> Option<i64> {
        match raw {
            Raw::Number(n) => match n.as_i64() {
                Some(v) => Some(v),
                None if n.is_u64() => {
                    self.fail(path, format!("integer {n} out of range"));
                    None
                }
                None => {
                    self.fail(path, format!("expected integer, got {n}"));
                    None
                }
            },
            other => {
                self.type_error(path, "integer", other);
                None
            }
        }
    }

    fn document(&mut self, raw: &Raw) -> Result<Option<Assessment>, IngestError> {
        const REQUIRED: [&str; 8] = [
            "schema_version",
            "asset",
            "assessed_at",
            "assessor",
            "nodes",
            "edges",
            "judgements",
            "weights",
        ];
        let Some(top) = self.record("$", raw, &REQUIRED, &["display_precision"]) else {
            return Ok(None);
        };

        if let Some(Raw::String(v)) = top.get("schema_version") {
            if v != SCHEMA_VERSION {
                return Err(IngestError::UnknownSchemaVersion(v.clone()));
            }
        } else if let Some(other) = top.get("schema_version") {
            self.type_error("schema_version", "string", other);
        }

        let asset = top.get("asset").and_then(|raw| self.record("asset", raw, &["name", "version"], &[]));
        let (asset_name, asset_version) = match asset {
            Some(f) => (self.string("asset.name", f.get("name")), self.string("asset.version", f.get("version"))),
            None => (None, None),
        };

        let assessed_at = self
            .string("assessed_at", top.get("assessed_at"))
            .and_then(|s| self.date("assessed_at", &s));
        let assessor = self.string("assessor", top.get("assessor"));
        let nodes = top.get("nodes").map(|raw| self.nodes(raw));
        let edges = top.get("edges").map(|raw| self.edges(raw));
        let judgements = top.get("judgements").map(|raw| self.judgements(raw));
        let weights = top.get("weights").and_then(|raw| self.weights(raw));
        let display_precision = match top.get("display_precision") {
            None => Some(DEFAULT_DISPLAY_PRECISION),
            Some(raw) => self.integer("display_precision", raw).and_then(|p| {
                match u32::try_from(p) {
                    Ok(p) if p <= MAX_DISPLAY_PRECISION => Some(p),
                    _ => {
                        self.fail("display_precision", format!("must be in 0..={MAX_DISPLAY_PRECISION}, got {p}"));
                        None
                    }
                }
            }),
        };

        if !self.errors.is_empty() {
            return Ok(None);
        }
        match (asset_name, asset_version, assessed_at, assessor, nodes, edges, judgements, weights, display_precision) {
            (
                Some(asset_name),
                Some(asset_version),
                Some(assessed_at),
                Some(assessor),
                Some(nodes),
                Some(edges),
                Some(judgements),
                Some(weights),
                Some(display_precision),
            ) => Ok(Some(Assessment {
                graph: PipelineGraph::new(nodes, edges),
                judgements,
                weights,
                asset_name,
                asset_version,
                assessed_at,
                assessor,
                display_precision,
            })),
            _ => {
                self.fail("$", "incomplete document");
                Ok(None)
            }
        }
    }

    fn date(&mut self, path: &str, s: &str) -> Option<NaiveDate> {
        let b = s.as_bytes();
        let shaped = b.len() == 10
            && b[4] == b'-'
            && b[7] == b'-'
            && b.iter().enumerate().all(|(i, c)| i == 4 || i == 7 || c.is_ascii_digit());
        let parsed = if shaped { NaiveDate::parse_from_str(s, "%Y-%m-%d").ok() } else { None };
        if parsed.is_none() {
            self.fail(path, format!("expected calendar date YYYY-MM-DD, got {s:?}"));
        }
        parsed
    }

    fn nodes(&mut self, raw: &Raw) -> Vec<ContributionNode> {
        let Raw::Array(items) = raw else {
            self.type_error("nodes", "array", raw);
            return Vec::new();
        };
        let mut out = Vec::with_capacity(items.len());
        for (i, item) in items.iter().enumerate() {
            let path = format!("nodes[{i}]");
            let Some(f) = self.record(&path, item, &["id", "kind", "label"], &["description", "evidence_refs"]) else {
                continue;
            };
            let id = self.string(&child(&path, "id"), f.get("id"));
            let kind = self.string(&child(&path, "kind"), f.get("kind")).and_then(|k| {
                let parsed = NodeKind::parse(&k);
                if parsed.is_none() {
                    let names: Vec<_> = NodeKind::ALL.iter().map(|k| k.as_str()).collect();
                    self.fail(&child(&path, "kind"), format!("unknown kind {k:?} (expected one of {})", names.join(", ")));
                }
                parsed
            });
            let label = self.string(&child(&path, "label"), f.get("label"));
            let description = self.string(&child(&path, "description"), f.get("description"));
            let mut evidence_refs = Vec::new();
            if let Some(raw) = f.get("evidence_refs") {
                let at = child(&path, "evidence_refs");
                match raw {
                    Raw::Array(refs) => {
                        for (j, r) in refs.iter().enumerate() {
                            match r {
                                Raw::String(s) => evidence_refs.push(s.clone()),
                                other => self.type_error(&format!("{at}[{j}]"), "string", other),
                            }
                        }
                    }
                    other => self.type_error(&at, "array", other),
                }
            }
            if let (Some(id), Some(kind), Some(label)) = (id, kind, label) {
                out.push(ContributionNode { id, kind, label, description, evidence_refs });
            }
        }
        out
    }

    fn edges(&mut self, raw: &Raw) -> Vec<Edge> {
        let Raw::Array(items) = raw else {
            self.type_error("edges", "array", raw);
            return Vec::new();
        };
        let mut out = Vec::with_capacity(items.len());
        for (i, item) in items.iter().enumerate() {
            let path = format!("edges[{i}]");
            let Some(f) = self.record(&path, item, &["from", "to"], &[]) else {
                continue;
            };
            let from = self.string(&child(&path, "from"), f.get("from"));
            let to = self.string(&child(&path, "to"), f.get("to"));
            if let (Some(from), Some(to)) = (from, to) {
                out.push(Edge { from, to });
            }
        }
        out
    }

    fn judgements(&mut self, raw: &Raw) -> BTreeMap<String, Judgement> {
        let mut out = BTreeMap::new();
        let Some(entries) = self.fields("judgements", raw) else {
            return out;
        };
        for (id, raw) in entries {
            let path = child("judgements", id);
            let Some(f) = self.record(&path, raw, &["quantity", "accuracy", "freshness"], &[]) else {
                continue;
            };
            let mut score = |name: &str| -> Option<ScoreLevel> {
                let at = child(&path, name);
                let v = self.integer(&at, f.get(name)?)?;
                match ScoreLevel::new(v) {
                    Ok(level) => Some(level),
                    Err(_) => {
                        self.fail(&at, format!("score {v} outside 1..=4"));
                        None
                    }
                }
            };
            let quantity = score("quantity");
            let accuracy = score("accuracy");
            let freshness = score("freshness");
            if let (Some(quantity), Some(accuracy), Some(freshness)) = (quantity, accuracy, freshness) {
                out.insert(id.to_string(), Judgement { quantity, accuracy, freshness });
            }
        }
        out
    }

    fn weights(&mut self, raw: &Raw) -> Option<WeightScheme> {
        match raw {
            Raw::String(s) if s == "equal" => Some(WeightScheme::Equal),
            Raw::String(s) => {
                self.fail("weights", format!("expected \"equal\" or an object of weights, got {s:?}"));
                None
            }
            Raw::Object(_) => {
                let entries = self.fields("weights", raw)?;
                let mut out = BTreeMap::new();
                for (id, v) in entries {
                    match v {
                        Raw::Number(n) => {
                            out.insert(id.to_string(), n.as_f64().unwrap_or(f64::NAN));
                        }
                        other => self.type_error(&child("weights", id), "number", other),
                    }
                }
                Some(WeightScheme::Explicit(out))
            }
            other => {
                self.type_error("weights", "\"equal\" or object", other);
                None
            }
        }
    }
}

#[derive(Serialize)]
pub(crate) struct DocumentOut<'a> {
    schema_version: &'static str,
    asset: AssetOut<'a>,
    assessed_at: String,
    assessor: &'a str,
    nodes: Vec<NodeOut<'a>>,
    edges: Vec<EdgeOut<'a>>,
    judgements: BTreeMap<&'a str, JudgementOut>,
    weights: WeightsOut<'a>,
    display_precision: u32,
}

#[derive(Serialize)]
struct AssetOut<'a> {
    name: &'a str,
    version: &'a str,
}

#[derive(Serialize)]
struct NodeOut<'a> {
    id: &'a str,
    kind: &'static str,
    label: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    description: Option<&'a str>,
    #[serde(skip_serializing_if = "<[String]>::is_empty")]
    evidence_refs: &'a [String],
}

#[derive(Serialize)]
struct EdgeOut<'a> {
    from: &'a str,
    to: &'a str,
}

#[derive(Serialize)]
struct JudgementOut {
    quantity: u8,
    accuracy: u8,
    freshness: u8,
}

#[derive(Serialize)]
#[serde(untagged)]
pub(crate) enum WeightsOut<'a> {
    Equal(&'static str),
    Explicit(&'a BTreeMap<String, f64>),
}

impl<'a> WeightsOut<'a> {
    pub(crate) fn new(scheme: &'a WeightScheme) -> Self {
        match scheme {
            WeightScheme::Equal => WeightsOut::Equal("equal"),
            WeightScheme::Explicit(map) => WeightsOut::Explicit(map),
        }
    }
}

impl<'a> DocumentOut<'a> {
    pub(crate) fn new(a: &'a Assessment) -> Self {
        DocumentOut {
            schema_version: SCHEMA_VERSION,
            asset: AssetOut { name: &a.asset_name, version: &a.asset_version },
            assessed_at: a.assessed_at.format("%Y-%m-%d").to_string(),
            assessor: &a.assessor,
            nodes: a
                .graph
                .nodes()
                .iter()
                .map(|n| NodeOut {
                    id: &n.id,
                    kind: n.kind.as_str(),
                    label: &n.label,
                    description: n.description.as_deref(),
                    evidence_refs: &n.evidence_refs,
                })
                .collect(),
            edges: a.graph.edges().iter().map(|e| EdgeOut { from: &e.from, to: &e.to }).collect(),
            judgements: a
                .judgements
                .iter()
                .map(|(id, j)| {
                    let out = JudgementOut {
                        quantity: j.quantity.value(),
                        accuracy: j.accuracy.value(),
                        freshness: j.freshness.value(),
                    };
                    (id.as_str(), out)
                })
                .collect(),
            weights: WeightsOut::new(&a.weights),
            display_precision: a.display_precision,
        }
    }
}

/// Canonical form: fixed key order, nodes sorted by id, edges by
/// `(from, to)`, 2-space indentation and a trailing newline.
///
/// Intended for valid assessments; the output of an invalid one is not
/// guaranteed to parse back.
pub fn serialize_document(assessment: &Assessment) -> String {
    let mut out = serde_json::to_string_pretty(&DocumentOut::new(assessment)).expect("document serializes");
    out.push('\n');
    out
}
