use thiserror::Error;

use crate::model::Violations;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("score {0} outside 1..=4")]
    ScoreOutOfRange(i64),

    #[error("unknown criterion {0:?}")]
    UnknownCriterion(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(Violations),

    #[error("invalid assessment: {0}")]
    InvalidAssessment(Violations),

    /// An assessment inside a batch failed validation.
    #[error("invalid assessment #{index} ({asset_name} {asset_version}): {violations}")]
    InvalidAssessmentAt {
        index: usize,
        asset_name: String,
        asset_version: String,
        violations: Violations,
    },

    #[error("unknown node {0}")]
    UnknownNode(String),

    #[error("node {0} is a leaf; derived scoring needs a derived or output asset")]
    LeafNode(String),

    #[error("node {0} is not a leaf and cannot be judged")]
    NotALeaf(String),

    #[error("explicit weights of the leaves upstream of {0} sum to zero")]
    DegenerateWeights(String),

    #[error("invalid weights: {0}")]
    InvalidWeights(Violations),

    #[error("report and judgements cover different nodes: {0}")]
    KeyMismatch(String),

    #[error("no entries to render")]
    EmptyInput,

    #[error("series mixes assets {0:?} and {1:?}")]
    MixedAsset(String, String),
}
