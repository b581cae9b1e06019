//! Transparency rating for machine-learning production pipelines.
//!
//! A pipeline is described as a DAG of contributions (data sources, human
//! contributors, derived assets, one output asset). An assessor scores each
//! leaf contribution on quantity, accuracy and freshness of the information
//! available about it, using a four-level [`rubric`]. The [`metric`] module
//! turns those judgements into per-node and overall visibility indices in
//! `[1, 4]`.
//!
//! ```
//! use pipevis_core::{metric, scenarios, display::format_fixed};
//!
//! let report = metric::overall_visibility(&scenarios::first_party_2023()).unwrap();
//! assert_eq!(format_fixed(report.overall, 2), "2.90");
//! ```

pub mod display;
pub mod error;
pub mod ingest;
pub mod metric;
pub mod model;
pub mod report;
pub mod rubric;
pub mod scenarios;

pub use error::{Error, Result};
pub use ingest::{parse_document, parse_document_with, serialize_document, IngestError, ParseOptions};
pub use metric::{
    derived_asset_visibility, node_visibility, overall_visibility, quality_index, quantity_index, rank,
    sensitivity, Changes, NodeVisibility, RankEntry, Sensitivity, VisibilityReport,
};
pub use model::{
    leaf_nodes, validate_assessment, validate_graph, Assessment, ContributionNode, Criterion, Edge,
    Judgement, NodeKind, PipelineGraph, ScoreLevel, Violation, Violations, WeightScheme,
};
pub use report::{RenderedReport, ReportFormat};
pub use rubric::{rubric_text, Rubric};
