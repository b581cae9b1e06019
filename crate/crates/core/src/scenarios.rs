//! Reference assessments on the simple training pipeline
//!
//! ```text
//! DS --\
//!       LD --\
//! H1 --/      M
//! H2 --------/
//! ```
//!
//! A training data set (DS) labelled by a curator (H1) produces a labelled
//! data set (LD), which an engineer (H2) uses to train the model (M).

use std::collections::BTreeMap;

use chrono::NaiveDate;

use crate::model::{
    Assessment, ContributionNode, Edge, Judgement, NodeKind, PipelineGraph, WeightScheme,
    DEFAULT_DISPLAY_PRECISION,
};

pub fn training_pipeline() -> PipelineGraph {
    PipelineGraph::new(
        vec![
            ContributionNode::new("DS", NodeKind::DataSource, "Training data set"),
            ContributionNode::new("H1", NodeKind::HumanContributor, "Data curator"),
            ContributionNode::new("LD", NodeKind::DerivedAsset, "Labelled data set"),
            ContributionNode::new("H2", NodeKind::HumanContributor, "AI engineer"),
            ContributionNode::new("M", NodeKind::OutputAsset, "Trained model"),
        ],
        vec![
            Edge::new("DS", "LD"),
            Edge::new("H1", "LD"),
            Edge::new("LD", "M"),
            Edge::new("H2", "M"),
        ],
    )
}

fn build(name: &str, date: (i32, u32, u32), scores: [(&str, [i64; 3]); 3]) -> Assessment {
    let judgements = scores
        .into_iter()
        .map(|(id, [q, a, f])| (id.to_string(), Judgement::from_scores(q, a, f).expect("score in range")))
        .collect::<BTreeMap<_, _>>();
    Assessment {
        graph: training_pipeline(),
        judgements,
        weights: WeightScheme::Equal,
        asset_name: name.to_string(),
        asset_version: "1.0".to_string(),
        assessed_at: NaiveDate::from_ymd_opt(date.0, date.1, date.2).expect("valid date"),
        assessor: "example auditor".to_string(),
        display_precision: DEFAULT_DISPLAY_PRECISION,
    }
}

/// First-party view at release time: every criterion scored 4.
pub fn first_party_2019() -> Assessment {
    build("first-party-model", (2019, 6, 1), [("DS", [4, 4, 4]), ("H1", [4, 4, 4]), ("H2", [4, 4, 4])])
}

/// The same model re-assessed years later (scores given as `[q, a, f]`).
pub fn first_party_2023() -> Assessment {
    build("first-party-model", (2023, 6, 1), [("DS", [3, 2, 3]), ("H1", [3, 3, 3]), ("H2", [3, 3, 3])])
}

/// Sparsely documented third-party model.
pub fn third_party_sparse() -> Assessment {
    build("third-party-sparse", (2025, 1, 15), [("DS", [1, 2, 1]), ("H1", [1, 2, 1]), ("H2", [1, 2, 1])])
}

/// Well documented third-party model.
pub fn third_party_documented() -> Assessment {
    build("third-party-documented", (2025, 1, 15), [("DS", [4, 3, 3]), ("H1", [4, 3, 3]), ("H2", [4, 3, 3])])
}
