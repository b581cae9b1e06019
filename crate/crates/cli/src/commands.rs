use std::io::{self, Read, Write};
use std::path::Path;

use pipevis_core::model::{Criterion, ScoreLevel};
use pipevis_core::{
    derived_asset_visibility, overall_visibility, parse_document_with, rank, report, rubric_text, sensitivity,
    Assessment, Changes, Error, IngestError, Judgement, ParseOptions, WeightScheme,
};

use crate::cli::OutputFormat;

/// Process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    /// The document (data) is invalid.
    Validation = 1,
    /// Bad flags, paths or arguments.
    Usage = 2,
    Internal = 3,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }
}

/// A failed command: exit status plus the diagnostics for stderr.
#[derive(Debug)]
pub struct Failure {
    pub status: ExitStatus,
    pub lines: Vec<String>,
}

impl Failure {
    fn usage(msg: impl Into<String>) -> Self {
        Failure { status: ExitStatus::Usage, lines: vec![format!("error: {}", msg.into())] }
    }

    fn internal(msg: impl Into<String>) -> Self {
        Failure { status: ExitStatus::Internal, lines: vec![format!("error: {}", msg.into())] }
    }

    fn invalid(source: &Path, err: &IngestError) -> Self {
        let mut lines = vec![format!("error: {}: invalid document", source.display())];
        lines.extend(err.messages().into_iter().map(|m| format!("violation: {m}")));
        Failure { status: ExitStatus::Validation, lines }
    }
}

pub type Outcome = Result<(), Failure>;

/// Parsed document plus the warnings raised in lenient mode.
fn load(path: &Path, lenient: bool, warnings: &mut Vec<String>) -> Result<Assessment, Failure> {
    let bytes = read_input(path)?;
    match parse_document_with(&bytes, ParseOptions { lenient }) {
        Ok(parsed) => {
            warnings.extend(parsed.warnings.into_iter().map(|w| format!("warning: {}: {w}", path.display())));
            Ok(parsed.assessment)
        }
        Err(e) => Err(Failure::invalid(path, &e)),
    }
}

fn read_input(path: &Path) -> Result<Vec<u8>, Failure> {
    if path == Path::new("-") {
        let mut buf = Vec::new();
        io::stdin()
            .read_to_end(&mut buf)
            .map_err(|e| Failure::usage(format!("cannot read standard input: {e}")))?;
        return Ok(buf);
    }
    std::fs::read(path).map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))
}

fn emit(out: &mut dyn Write, body: &str) -> Outcome {
    out.write_all(body.as_bytes())
        .and_then(|_| out.flush())
        .map_err(|e| Failure::internal(format!("cannot write output: {e}")))
}

fn flush_warnings(err: &mut dyn Write, warnings: &[String]) {
    for w in warnings {
        let _ = writeln!(err, "{w}");
    }
}

pub fn validate(path: &Path, lenient: bool, err: &mut dyn Write) -> Outcome {
    let mut warnings = Vec::new();
    let result = load(path, lenient, &mut warnings);
    flush_warnings(err, &warnings);
    result.map(|_| ())
}

pub fn score(
    path: &Path,
    format: OutputFormat,
    node: Option<&str>,
    precision: Option<u32>,
    lenient: bool,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Outcome {
    let mut warnings = Vec::new();
    let assessment = load(path, lenient, &mut warnings)?;
    flush_warnings(err, &warnings);
    let precision = precision.unwrap_or(assessment.display_precision);

    let report = match node {
        None => overall_visibility(&assessment),
        Some(id) => derived_asset_visibility(&assessment, id),
    }
    .map_err(|e| match e {
        Error::UnknownNode(_) | Error::LeafNode(_) => Failure::usage(format!("--node: {e}")),
        Error::DegenerateWeights(_) => Failure { status: ExitStatus::Validation, lines: vec![format!("error: {e}")] },
        other => Failure::internal(other.to_string()),
    })?;

    let rendered = match format {
        OutputFormat::Table => {
            let judged = assessment
                .judgements
                .iter()
                .filter(|(id, _)| report.node(id).is_some())
                .map(|(id, j)| (id.clone(), *j))
                .collect();
            report::render_table_with(&report, &judged, precision).map_err(|e| Failure::internal(e.to_string()))?
        }
        OutputFormat::Machine => report::render_machine(&assessment, &report, precision),
    };
    emit(out, &rendered.body)
}

fn load_all(paths: &[impl AsRef<Path>], err: &mut dyn Write) -> Result<Vec<Assessment>, Failure> {
    let mut warnings = Vec::new();
    let all = paths
        .iter()
        .map(|p| load(p.as_ref(), false, &mut warnings))
        .collect::<Result<Vec<_>, _>>();
    flush_warnings(err, &warnings);
    all
}

pub fn compare(paths: &[impl AsRef<Path>], precision: u32, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    if paths.is_empty() {
        return Err(Failure::usage("compare needs at least one document"));
    }
    let assessments = load_all(paths, err)?;
    let ranked = rank(&assessments).map_err(|e| Failure::internal(e.to_string()))?;
    let rendered = report::render_comparison(&ranked, precision).map_err(|e| Failure::internal(e.to_string()))?;
    emit(out, &rendered.body)
}

pub fn series(paths: &[impl AsRef<Path>], precision: u32, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    if paths.is_empty() {
        return Err(Failure::usage("series needs at least one document"));
    }
    let assessments = load_all(paths, err)?;
    let rendered = report::render_series(&assessments, precision).map_err(|e| match e {
        Error::MixedAsset(..) => Failure::usage(e.to_string()),
        other => Failure::internal(other.to_string()),
    })?;
    emit(out, &rendered.body)
}

pub fn whatif(
    path: &Path,
    set: &[(String, Judgement)],
    weights: Option<&WeightScheme>,
    precision: Option<u32>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Outcome {
    let mut warnings = Vec::new();
    let assessment = load(path, false, &mut warnings)?;
    flush_warnings(err, &warnings);
    let precision = precision.unwrap_or(assessment.display_precision);

    let changes = Changes { judgements: set.to_vec(), weights: weights.cloned() };
    let result = sensitivity(&assessment, &changes).map_err(|e| match e {
        Error::UnknownNode(_) | Error::NotALeaf(_) => Failure::usage(format!("--set: {e}")),
        Error::InvalidWeights(_) => Failure::usage(format!("--weights: {e}")),
        other => Failure::internal(other.to_string()),
    })?;
    emit(out, &report::render_sensitivity(&result, precision).body)
}

pub fn rubric(out: &mut dyn Write) -> Outcome {
    emit(out, &render_rubric())
}

/// Score rows 1-4 against the three criteria.
pub fn render_rubric() -> String {
    let headings: Vec<&str> = std::iter::once("Score").chain(Criterion::ALL.iter().map(|c| c.heading())).collect();
    let rows: Vec<Vec<String>> = ScoreLevel::ALL
        .iter()
        .map(|&level| {
            std::iter::once(level.to_string())
                .chain(Criterion::ALL.iter().map(|&c| rubric_text(c, level).to_string()))
                .collect()
        })
        .collect();
    let mut widths: Vec<usize> = headings.iter().map(|h| h.len()).collect();
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let line = |cells: Vec<&str>| {
        let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, &w)| format!("{c:<w$}")).collect();
        format!("| {} |\n", padded.join(" | "))
    };
    let mut out = line(headings.clone());
    let rule: Vec<String> = widths.iter().map(|&w| "-".repeat(w)).collect();
    out.push_str(&format!("|-{}-|\n", rule.join("-|-")));
    for row in &rows {
        out.push_str(&line(row.iter().map(String::as_str).collect()));
    }
    out
}
