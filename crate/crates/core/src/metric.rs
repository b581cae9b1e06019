//! Visibility indices.
//!
//! Per leaf node `k`:
//!
//! ```text
//! quantity_k   = j_q
//! quality_k    = sqrt(j_a * j_f)
//! visibility_k = sqrt(quantity_k * quality_k)
//! ```
//!
//! and for the pipeline `VIS = sum_k visibility_k * w_k`, with `w_k = 1/M`
//! under equal weighting. Everything is computed at full `f64` precision;
//! rounding only happens when a value is displayed.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::model::{validate_assessment, validate_weights, Assessment, Judgement, NodeKind, WeightScheme};

/// Lower and upper bound of every index.
pub const INDEX_MIN: f64 = 1.0;
pub const INDEX_MAX: f64 = 4.0;

pub fn quantity_index(j: &Judgement) -> f64 {
    j.quantity.as_f64()
}

/// Geometric mean of accuracy and freshness.
pub fn quality_index(j: &Judgement) -> f64 {
    (j.accuracy.as_f64() * j.freshness.as_f64()).sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeVisibility {
    pub node_id: String,
    pub quantity_index: f64,
    pub quality_index: f64,
    pub visibility_index: f64,
    pub weight: f64,
}

/// Indices for one judged node. The weight is left at 0 for the caller to set.
pub fn node_visibility(node_id: impl Into<String>, j: &Judgement) -> NodeVisibility {
    let quantity = quantity_index(j);
    let quality = quality_index(j);
    NodeVisibility {
        node_id: node_id.into(),
        quantity_index: quantity,
        quality_index: quality,
        visibility_index: (quantity * quality).sqrt(),
        weight: 0.0,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VisibilityReport {
    /// Sorted by node id.
    pub per_node: Vec<NodeVisibility>,
    pub overall: f64,
    pub leaf_count: usize,
    pub weight_scheme: WeightScheme,
    pub display_precision: u32,
    /// Node the report was restricted to, when it is not the whole pipeline.
    pub scope: Option<String>,
}

impl VisibilityReport {
    pub fn node(&self, id: &str) -> Option<&NodeVisibility> {
        self.per_node.iter().find(|n| n.node_id == id)
    }

    /// Smallest node visibility in the report.
    pub fn min_node_visibility(&self) -> f64 {
        self.per_node.iter().map(|n| n.visibility_index).fold(f64::INFINITY, f64::min)
    }
}

/// Weighted sum over `leaves`. Weights are divided by their total so the
/// result stays inside `[1, 4]` for any vector within the sum tolerance; the
/// clamp only absorbs the last-ulp error of the summation.
fn weighted_report(
    assessment: &Assessment,
    leaves: &BTreeSet<String>,
    raw_weights: BTreeMap<String, f64>,
    scheme: WeightScheme,
    scope: Option<String>,
) -> VisibilityReport {
    let total: f64 = raw_weights.values().sum();
    let mut per_node = Vec::with_capacity(leaves.len());
    let mut overall = 0.0;
    for id in leaves {
        let mut node = node_visibility(id.clone(), &assessment.judgements[id]);
        node.weight = raw_weights[id] / total;
        overall += node.visibility_index * node.weight;
        per_node.push(node);
    }
    VisibilityReport {
        per_node,
        overall: overall.clamp(INDEX_MIN, INDEX_MAX),
        leaf_count: leaves.len(),
        weight_scheme: scheme,
        display_precision: assessment.display_precision,
        scope,
    }
}

fn ensure_valid(assessment: &Assessment) -> Result<()> {
    let violations = validate_assessment(assessment);
    if violations.is_ok() {
        Ok(())
    } else {
        Err(Error::InvalidAssessment(violations))
    }
}

/// Overall visibility of the whole pipeline.
pub fn overall_visibility(assessment: &Assessment) -> Result<VisibilityReport> {
    ensure_valid(assessment)?;
    let leaves: BTreeSet<String> = assessment.leaf_ids().into_iter().map(str::to_string).collect();
    let weights = assessment.weights.resolve(leaves.iter().map(String::as_str));
    Ok(weighted_report(assessment, &leaves, weights, assessment.weights.clone(), None))
}

/// Visibility of a derived or output asset, computed over the leaves upstream
/// of it with weights renormalized to that subset.
pub fn derived_asset_visibility(assessment: &Assessment, node_id: &str) -> Result<VisibilityReport> {
    let node = assessment
        .graph
        .node(node_id)
        .ok_or_else(|| Error::UnknownNode(node_id.to_string()))?;
    if !matches!(node.kind, NodeKind::DerivedAsset | NodeKind::OutputAsset) {
        return Err(Error::LeafNode(node_id.to_string()));
    }
    ensure_valid(assessment)?;

    let leaves = assessment.graph.ancestor_leaves(node_id);
    let weights = assessment.weights.resolve(leaves.iter().map(String::as_str));
    let scheme = match &assessment.weights {
        WeightScheme::Equal => WeightScheme::Equal,
        WeightScheme::Explicit(_) => {
            let total: f64 = weights.values().sum();
            if total <= 0.0 {
                return Err(Error::DegenerateWeights(node_id.to_string()));
            }
            WeightScheme::Explicit(weights.iter().map(|(k, w)| (k.clone(), w / total)).collect())
        }
    };
    Ok(weighted_report(assessment, &leaves, weights, scheme, Some(node_id.to_string())))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankEntry {
    pub asset_name: String,
    pub asset_version: String,
    pub overall: f64,
    pub min_node_visibility: f64,
}

/// Orders assessments by overall visibility, highest first. Ties fall back
/// to the higher minimum node visibility, then to `(name, version)`.
pub fn rank(assessments: &[Assessment]) -> Result<Vec<RankEntry>> {
    let mut entries = Vec::with_capacity(assessments.len());
    for (index, a) in assessments.iter().enumerate() {
        let report = overall_visibility(a).map_err(|e| match e {
            Error::InvalidAssessment(violations) => Error::InvalidAssessmentAt {
                index,
                asset_name: a.asset_name.clone(),
                asset_version: a.asset_version.clone(),
                violations,
            },
            other => other,
        })?;
        entries.push(RankEntry {
            asset_name: a.asset_name.clone(),
            asset_version: a.asset_version.clone(),
            overall: report.overall,
            min_node_visibility: report.min_node_visibility(),
        });
    }
    entries.sort_by(|a, b| {
        b.overall
            .total_cmp(&a.overall)
            .then(b.min_node_visibility.total_cmp(&a.min_node_visibility))
            .then_with(|| a.asset_name.cmp(&b.asset_name))
            .then_with(|| a.asset_version.cmp(&b.asset_version))
    });
    Ok(entries)
}

/// A what-if perturbation of an assessment.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Changes {
    pub judgements: Vec<(String, Judgement)>,
    pub weights: Option<WeightScheme>,
}

impl Changes {
    pub fn set(mut self, node_id: impl Into<String>, j: Judgement) -> Self {
        self.judgements.push((node_id.into(), j));
        self
    }

    pub fn with_weights(mut self, weights: WeightScheme) -> Self {
        self.weights = Some(weights);
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeDelta {
    pub node_id: String,
    pub visibility: f64,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sensitivity {
    pub baseline: VisibilityReport,
    pub modified: VisibilityReport,
    pub node_deltas: Vec<NodeDelta>,
    pub overall_delta: f64,
}

/// Applies `changes` to a copy of `assessment` and reports how the indices
/// move. Later changes to the same node win.
pub fn sensitivity(assessment: &Assessment, changes: &Changes) -> Result<Sensitivity> {
    let baseline = overall_visibility(assessment)?;
    let leaves = assessment.leaf_ids();

    let mut modified = assessment.clone();
    for (id, j) in &changes.judgements {
        if !leaves.contains(id.as_str()) {
            return Err(match assessment.graph.node(id) {
                Some(_) => Error::NotALeaf(id.clone()),
                None => Error::UnknownNode(id.clone()),
            });
        }
        modified.judgements.insert(id.clone(), *j);
    }
    if let Some(weights) = &changes.weights {
        let violations = validate_weights(&assessment.graph, weights);
        if !violations.is_ok() {
            return Err(Error::InvalidWeights(violations));
        }
        modified.weights = weights.clone();
    }
    let modified = overall_visibility(&modified)?;

    let node_deltas = baseline
        .per_node
        .iter()
        .zip(&modified.per_node)
        .map(|(b, m)| NodeDelta {
            node_id: b.node_id.clone(),
            visibility: m.visibility_index - b.visibility_index,
            weight: m.weight - b.weight,
        })
        .collect();
    let overall_delta = modified.overall - baseline.overall;
    Ok(Sensitivity { baseline, modified, node_deltas, overall_delta })
}
