//! Rendering of visibility results.
//!
//! Text tables are pipe-separated with padded columns; the machine document
//! is JSON carrying the input document plus every computed index.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::display::{format_fixed, significant15};
use crate::error::{Error, Result};
use crate::ingest::{DocumentOut, WeightsOut};
use crate::metric::{overall_visibility, RankEntry, Sensitivity, VisibilityReport};
use crate::model::{Assessment, Judgement};

pub const OVERALL_LABEL: &str = "Overall VIS for model";
pub const RESULT_SCHEMA_VERSION: &str = "1.0";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    TextTable,
    MachineDocument,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenderedReport {
    pub format: ReportFormat,
    pub body: String,
    pub precision: u32,
}

/// Pads every column to its widest cell. Returns the table with a trailing
/// newline.
fn layout(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: &mut dyn Iterator<Item = &str>| -> String {
        let padded: Vec<String> = cells
            .zip(&widths)
            .map(|(c, &w)| format!("{c:<w$}"))
            .collect();
        format!("| {} |\n", padded.join(" | "))
    };
    let mut out = line(&mut header.iter().copied());
    let rule: Vec<String> = widths.iter().map(|&w| "-".repeat(w)).collect();
    out.push_str(&format!("|-{}-|\n", rule.join("-|-")));
    for row in rows {
        out.push_str(&line(&mut row.iter().map(String::as_str)));
    }
    out
}

/// Node rows with the three judgements and the two indices, then the
/// overall row.
pub fn render_table(report: &VisibilityReport, judgements: &BTreeMap<String, Judgement>) -> Result<RenderedReport> {
    render_table_with(report, judgements, report.display_precision)
}

pub fn render_table_with(
    report: &VisibilityReport,
    judgements: &BTreeMap<String, Judgement>,
    precision: u32,
) -> Result<RenderedReport> {
    let report_ids: BTreeSet<&str> = report.per_node.iter().map(|n| n.node_id.as_str()).collect();
    let judged: BTreeSet<&str> = judgements.keys().map(String::as_str).collect();
    if report_ids != judged {
        let diff: Vec<&str> = report_ids.symmetric_difference(&judged).copied().collect();
        return Err(Error::KeyMismatch(diff.join(",")));
    }

    let p = precision as usize;
    let mut rows: Vec<Vec<String>> = report
        .per_node
        .iter()
        .map(|n| {
            let j = &judgements[&n.node_id];
            vec![
                n.node_id.clone(),
                j.quantity.to_string(),
                j.freshness.to_string(),
                j.accuracy.to_string(),
                format_fixed(n.quality_index, p),
                format_fixed(n.visibility_index, p),
            ]
        })
        .collect();
    let mut overall = vec![String::new(); 6];
    overall[0] = OVERALL_LABEL.to_string();
    overall[5] = format_fixed(report.overall, p);
    rows.push(overall);

    let header = ["Node", "Quantity", "Freshness", "Accuracy", "VISQuality", "VIS"];
    Ok(RenderedReport { format: ReportFormat::TextTable, body: layout(&header, &rows), precision })
}

/// Ranking table, in the order given.
pub fn render_comparison(ranked: &[RankEntry], precision: u32) -> Result<RenderedReport> {
    if ranked.is_empty() {
        return Err(Error::EmptyInput);
    }
    let p = precision as usize;
    let rows: Vec<Vec<String>> = ranked
        .iter()
        .enumerate()
        .map(|(i, e)| {
            vec![
                (i + 1).to_string(),
                e.asset_name.clone(),
                e.asset_version.clone(),
                format_fixed(e.overall, p),
            ]
        })
        .collect();
    let body = layout(&["Rank", "Asset", "Version", "VIS"], &rows);
    Ok(RenderedReport { format: ReportFormat::TextTable, body, precision })
}

/// Re-assessments of one asset over time, oldest first, with the net change
/// between the first and the last.
pub fn render_series(assessments: &[Assessment], precision: u32) -> Result<RenderedReport> {
    let first = assessments.first().ok_or(Error::EmptyInput)?;
    if let Some(other) = assessments.iter().find(|a| a.asset_name != first.asset_name) {
        return Err(Error::MixedAsset(first.asset_name.clone(), other.asset_name.clone()));
    }
    let mut points = Vec::with_capacity(assessments.len());
    for a in assessments {
        points.push((a.assessed_at, a.asset_version.as_str(), overall_visibility(a)?.overall));
    }
    points.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(b.1)));

    let p = precision as usize;
    let mut rows: Vec<Vec<String>> = points
        .iter()
        .map(|(date, version, vis)| vec![date.format("%Y-%m-%d").to_string(), version.to_string(), format_fixed(*vis, p)])
        .collect();
    let net = points.last().map(|l| l.2).unwrap_or_default() - points[0].2;
    rows.push(vec!["Net change".to_string(), String::new(), format_fixed(net, p)]);

    let mut body = format!("Asset: {}\n", first.asset_name);
    body.push_str(&layout(&["Assessed", "Version", "VIS"], &rows));
    Ok(RenderedReport { format: ReportFormat::TextTable, body, precision })
}

/// Baseline, modified and delta values per node and overall.
pub fn render_sensitivity(s: &Sensitivity, precision: u32) -> RenderedReport {
    let p = precision as usize;
    let mut rows: Vec<Vec<String>> = s
        .baseline
        .per_node
        .iter()
        .zip(&s.modified.per_node)
        .zip(&s.node_deltas)
        .map(|((b, m), d)| {
            vec![
                b.node_id.clone(),
                format_fixed(b.visibility_index, p),
                format_fixed(m.visibility_index, p),
                format_fixed(d.visibility, p),
                format_fixed(b.weight, p),
                format_fixed(m.weight, p),
            ]
        })
        .collect();
    rows.push(vec![
        OVERALL_LABEL.to_string(),
        format_fixed(s.baseline.overall, p),
        format_fixed(s.modified.overall, p),
        format_fixed(s.overall_delta, p),
        String::new(),
        String::new(),
    ]);
    let header = ["Node", "Baseline VIS", "Modified VIS", "Delta", "Baseline weight", "Modified weight"];
    RenderedReport { format: ReportFormat::TextTable, body: layout(&header, &rows), precision }
}

#[derive(Serialize)]
struct ResultDocument<'a> {
    result_schema_version: &'static str,
    assessment: DocumentOut<'a>,
    result: ResultOut<'a>,
}

#[derive(Serialize)]
struct ResultOut<'a> {
    /// Node the indices are restricted to; `null` for the whole pipeline.
    scope: Option<&'a str>,
    leaf_count: usize,
    weights: WeightsOut<'a>,
    overall: f64,
    overall_display: String,
    display_precision: u32,
    nodes: Vec<NodeOut<'a>>,
}

#[derive(Serialize)]
struct NodeOut<'a> {
    id: &'a str,
    quantity_index: f64,
    quality_index: f64,
    visibility_index: f64,
    weight: f64,
}

/// JSON result document: the input document and the computed indices at 15
/// significant digits.
pub fn render_machine(assessment: &Assessment, report: &VisibilityReport, precision: u32) -> RenderedReport {
    let doc = ResultDocument {
        result_schema_version: RESULT_SCHEMA_VERSION,
        assessment: DocumentOut::new(assessment),
        result: ResultOut {
            scope: report.scope.as_deref(),
            leaf_count: report.leaf_count,
            weights: WeightsOut::new(&report.weight_scheme),
            overall: significant15(report.overall),
            overall_display: format_fixed(report.overall, precision as usize),
            display_precision: precision,
            nodes: report
                .per_node
                .iter()
                .map(|n| NodeOut {
                    id: &n.node_id,
                    quantity_index: significant15(n.quantity_index),
                    quality_index: significant15(n.quality_index),
                    visibility_index: significant15(n.visibility_index),
                    weight: significant15(n.weight),
                })
                .collect(),
        },
    };
    let mut body = serde_json::to_string_pretty(&doc).expect("result serializes");
    body.push('\n');
    RenderedReport { format: ReportFormat::MachineDocument, body, precision }
}
