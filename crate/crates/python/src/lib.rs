//! Python module `pipevis`.

use std::collections::BTreeMap;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use pipevis_core as core;
use pipevis_core::{display, report, Changes, Criterion, ScoreLevel, WeightScheme};

fn value_error(lines: Vec<String>) -> PyErr {
    PyValueError::new_err(lines.join("\n"))
}

fn core_error(e: core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Scores for one leaf contribution, each 1-4.
#[pyclass(frozen, eq, from_py_object, module = "pipevis")]
#[derive(Clone, Copy, PartialEq)]
pub struct Judgement(core::Judgement);

#[pymethods]
impl Judgement {
    #[new]
    fn new(quantity: i64, accuracy: i64, freshness: i64) -> PyResult<Self> {
        core::Judgement::from_scores(quantity, accuracy, freshness).map(Judgement).map_err(core_error)
    }

    #[getter]
    fn quantity(&self) -> u8 {
        self.0.quantity.value()
    }

    #[getter]
    fn accuracy(&self) -> u8 {
        self.0.accuracy.value()
    }

    #[getter]
    fn freshness(&self) -> u8 {
        self.0.freshness.value()
    }

    fn __repr__(&self) -> String {
        format!("Judgement(quantity={}, accuracy={}, freshness={})", self.quantity(), self.accuracy(), self.freshness())
    }
}

#[pyclass(frozen, skip_from_py_object, module = "pipevis")]
#[derive(Clone)]
pub struct NodeVisibility(core::NodeVisibility);

#[pymethods]
impl NodeVisibility {
    #[getter]
    fn node_id(&self) -> &str {
        &self.0.node_id
    }

    #[getter]
    fn quantity_index(&self) -> f64 {
        self.0.quantity_index
    }

    #[getter]
    fn quality_index(&self) -> f64 {
        self.0.quality_index
    }

    #[getter]
    fn visibility_index(&self) -> f64 {
        self.0.visibility_index
    }

    #[getter]
    fn weight(&self) -> f64 {
        self.0.weight
    }

    fn __repr__(&self) -> String {
        format!("NodeVisibility({:?}, visibility_index={})", self.0.node_id, self.0.visibility_index)
    }
}

#[pyclass(frozen, skip_from_py_object, module = "pipevis")]
#[derive(Clone)]
pub struct VisibilityReport(core::VisibilityReport);

#[pymethods]
impl VisibilityReport {
    #[getter]
    fn overall(&self) -> f64 {
        self.0.overall
    }

    #[getter]
    fn leaf_count(&self) -> usize {
        self.0.leaf_count
    }

    /// Node the report is restricted to, or None.
    #[getter]
    fn scope(&self) -> Option<&str> {
        self.0.scope.as_deref()
    }

    #[getter]
    fn nodes(&self) -> Vec<NodeVisibility> {
        self.0.per_node.iter().cloned().map(NodeVisibility).collect()
    }

    fn node(&self, node_id: &str) -> Option<NodeVisibility> {
        self.0.node(node_id).cloned().map(NodeVisibility)
    }

    fn __repr__(&self) -> String {
        format!("VisibilityReport(overall={}, leaf_count={})", self.0.overall, self.0.leaf_count)
    }
}

/// A validated assessment document.
#[pyclass(from_py_object, module = "pipevis")]
#[derive(Clone)]
pub struct Assessment(core::Assessment);

impl Assessment {
    fn report(&self, node: Option<&str>) -> PyResult<core::VisibilityReport> {
        match node {
            None => core::overall_visibility(&self.0),
            Some(id) => core::derived_asset_visibility(&self.0, id),
        }
        .map_err(core_error)
    }
}

#[pymethods]
impl Assessment {
    /// Parses a JSON document; raises ValueError listing every violation.
    #[staticmethod]
    #[pyo3(signature = (text, lenient = false))]
    fn from_json(text: &str, lenient: bool) -> PyResult<Self> {
        core::parse_document_with(text.as_bytes(), core::ParseOptions { lenient })
            .map(|p| Assessment(p.assessment))
            .map_err(|e| value_error(e.messages()))
    }

    fn to_json(&self) -> String {
        core::serialize_document(&self.0)
    }

    /// Violation messages; empty when valid.
    fn validate(&self) -> Vec<String> {
        core::validate_assessment(&self.0).messages()
    }

    #[getter]
    fn asset_name(&self) -> &str {
        &self.0.asset_name
    }

    #[getter]
    fn asset_version(&self) -> &str {
        &self.0.asset_version
    }

    #[getter]
    fn assessed_at(&self) -> String {
        self.0.assessed_at.to_string()
    }

    #[getter]
    fn assessor(&self) -> &str {
        &self.0.assessor
    }

    #[getter]
    fn display_precision(&self) -> u32 {
        self.0.display_precision
    }

    #[getter]
    fn leaf_ids(&self) -> Vec<String> {
        self.0.leaf_ids().into_iter().map(String::from).collect()
    }

    #[getter]
    fn judgements(&self) -> BTreeMap<String, Judgement> {
        self.0.judgements.iter().map(|(k, j)| (k.clone(), Judgement(*j))).collect()
    }

    fn set_judgement(&mut self, node_id: String, judgement: Judgement) {
        self.0.judgements.insert(node_id, judgement.0);
    }

    fn overall(&self) -> PyResult<VisibilityReport> {
        self.report(None).map(VisibilityReport)
    }

    /// Visibility of a derived or output asset from its upstream leaves.
    fn derived(&self, node_id: &str) -> PyResult<VisibilityReport> {
        self.report(Some(node_id)).map(VisibilityReport)
    }

    #[pyo3(signature = (precision = None, node = None))]
    fn render_table(&self, precision: Option<u32>, node: Option<&str>) -> PyResult<String> {
        let r = self.report(node)?;
        let judged = self.0.judgements.iter().filter(|(id, _)| r.node(id).is_some()).map(|(k, j)| (k.clone(), *j)).collect();
        let p = precision.unwrap_or(self.0.display_precision);
        report::render_table_with(&r, &judged, p).map(|t| t.body).map_err(core_error)
    }

    #[pyo3(signature = (precision = None, node = None))]
    fn render_machine(&self, precision: Option<u32>, node: Option<&str>) -> PyResult<String> {
        let r = self.report(node)?;
        Ok(report::render_machine(&self.0, &r, precision.unwrap_or(self.0.display_precision)).body)
    }

    fn __repr__(&self) -> String {
        format!("Assessment({:?}, {:?}, {})", self.0.asset_name, self.0.asset_version, self.0.assessed_at)
    }
}

#[pyclass(frozen, module = "pipevis")]
pub struct RankEntry(core::RankEntry);

#[pymethods]
impl RankEntry {
    #[getter]
    fn asset_name(&self) -> &str {
        &self.0.asset_name
    }

    #[getter]
    fn asset_version(&self) -> &str {
        &self.0.asset_version
    }

    #[getter]
    fn overall(&self) -> f64 {
        self.0.overall
    }

    #[getter]
    fn min_node_visibility(&self) -> f64 {
        self.0.min_node_visibility
    }

    fn __repr__(&self) -> String {
        format!("RankEntry({:?}, {:?}, overall={})", self.0.asset_name, self.0.asset_version, self.0.overall)
    }
}

#[pyclass(frozen, module = "pipevis")]
pub struct Sensitivity(core::Sensitivity);

#[pymethods]
impl Sensitivity {
    #[getter]
    fn baseline(&self) -> VisibilityReport {
        VisibilityReport(self.0.baseline.clone())
    }

    #[getter]
    fn modified(&self) -> VisibilityReport {
        VisibilityReport(self.0.modified.clone())
    }

    #[getter]
    fn overall_delta(&self) -> f64 {
        self.0.overall_delta
    }

    /// Per-node `(node_id, visibility delta, weight delta)`.
    #[getter]
    fn node_deltas(&self) -> Vec<(String, f64, f64)> {
        self.0.node_deltas.iter().map(|d| (d.node_id.clone(), d.visibility, d.weight)).collect()
    }

    #[pyo3(signature = (precision = 2))]
    fn render(&self, precision: u32) -> String {
        report::render_sensitivity(&self.0, precision).body
    }
}

/// `None`, `"equal"`, or a mapping of leaf id to weight.
fn weights_arg(weights: Option<&Bound<'_, PyAny>>) -> PyResult<Option<WeightScheme>> {
    let Some(w) = weights else { return Ok(None) };
    if let Ok(s) = w.extract::<String>() {
        return match s.as_str() {
            "equal" => Ok(Some(WeightScheme::Equal)),
            other => Err(PyValueError::new_err(format!("unknown weight scheme {other:?}"))),
        };
    }
    Ok(Some(WeightScheme::Explicit(w.extract::<BTreeMap<String, f64>>()?)))
}

/// Ranks assessments, most visible first.
#[pyfunction]
fn rank(assessments: Vec<Assessment>) -> PyResult<Vec<RankEntry>> {
    let list: Vec<core::Assessment> = assessments.into_iter().map(|a| a.0).collect();
    core::rank(&list).map(|r| r.into_iter().map(RankEntry).collect()).map_err(core_error)
}

#[pyfunction]
#[pyo3(signature = (assessment, judgements = None, weights = None))]
fn sensitivity(
    assessment: &Assessment,
    judgements: Option<BTreeMap<String, Judgement>>,
    weights: Option<&Bound<'_, PyAny>>,
) -> PyResult<Sensitivity> {
    let changes = Changes {
        judgements: judgements.unwrap_or_default().into_iter().map(|(k, j)| (k, j.0)).collect(),
        weights: weights_arg(weights)?,
    };
    core::sensitivity(&assessment.0, &changes).map(Sensitivity).map_err(core_error)
}

#[pyfunction]
fn quantity_index(j: &Judgement) -> f64 {
    core::quantity_index(&j.0)
}

#[pyfunction]
fn quality_index(j: &Judgement) -> f64 {
    core::quality_index(&j.0)
}

#[pyfunction]
fn visibility_index(j: &Judgement) -> f64 {
    core::node_visibility("", &j.0).visibility_index
}

/// Rubric cell text, e.g. `rubric_text("accuracy", 4)`.
#[pyfunction]
fn rubric_text(criterion: &str, level: i64) -> PyResult<&'static str> {
    let c: Criterion = criterion.parse().map_err(core_error)?;
    let l = ScoreLevel::new(level).map_err(core_error)?;
    Ok(core::rubric_text(c, l))
}

/// Fixed-point display with half-away-from-zero rounding.
#[pyfunction]
fn format_fixed(x: f64, precision: usize) -> String {
    display::format_fixed(x, precision)
}

#[pymodule]
fn pipevis(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Judgement>()?;
    m.add_class::<NodeVisibility>()?;
    m.add_class::<VisibilityReport>()?;
    m.add_class::<Assessment>()?;
    m.add_class::<RankEntry>()?;
    m.add_class::<Sensitivity>()?;
    m.add_function(wrap_pyfunction!(rank, m)?)?;
    m.add_function(wrap_pyfunction!(sensitivity, m)?)?;
    m.add_function(wrap_pyfunction!(quantity_index, m)?)?;
    m.add_function(wrap_pyfunction!(quality_index, m)?)?;
    m.add_function(wrap_pyfunction!(visibility_index, m)?)?;
    m.add_function(wrap_pyfunction!(rubric_text, m)?)?;
    m.add_function(wrap_pyfunction!(format_fixed, m)?)?;
    m.add("SCHEMA_VERSION", core::ingest::SCHEMA_VERSION)?;
    Ok(())
}
