use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use pipevis_core::{Judgement, WeightScheme};

/// Transparency rating for ML production pipelines.
///
/// Documents are JSON assessments (schema version 1.0). Every PATH may be
/// `-` to read from standard input.
///
/// Exit codes: 0 success, 1 invalid document, 2 usage error, 3 internal error.
#[derive(Debug, Parser)]
#[command(name = "pipevis", version, about, long_about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a document; prints one `violation:` line per problem on stderr.
    Validate {
        path: PathBuf,
        /// Treat unknown fields as warnings.
        #[arg(long)]
        lenient: bool,
    },

    /// Compute and print the visibility table for a document.
    Score {
        path: PathBuf,
        #[arg(long, value_enum, default_value_t = OutputFormat::Table)]
        format: OutputFormat,
        /// Score a derived or output asset from the leaves upstream of it.
        #[arg(long, value_name = "ID")]
        node: Option<String>,
        /// Decimal places (defaults to the document's display_precision).
        #[arg(long, value_parser = clap::value_parser!(u32).range(0..=15))]
        precision: Option<u32>,
        #[arg(long)]
        lenient: bool,
    },

    /// Rank several documents by overall visibility.
    Compare {
        #[arg(required = true, num_args = 1..)]
        paths: Vec<PathBuf>,
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(0..=15))]
        precision: u32,
    },

    /// Show how visibility changes under modified judgements or weights.
    ///
    /// Example: pipevis whatif doc.json --set DS:3,2,3 --weights DS=0.5,H1=0.25,H2=0.25
    Whatif {
        path: PathBuf,
        /// Replace a leaf's judgement, given as `ID:QUANTITY,ACCURACY,FRESHNESS`
        /// (each 1-4). Repeatable.
        #[arg(long = "set", value_name = "ID:Q,A,F", value_parser = parse_set)]
        set: Vec<(String, Judgement)>,
        /// Replacement weights: `equal`, or `ID=W,ID=W,...` summing to 1.
        #[arg(long, value_name = "SPEC", value_parser = parse_weights)]
        weights: Option<WeightScheme>,
        #[arg(long, value_parser = clap::value_parser!(u32).range(0..=15))]
        precision: Option<u32>,
    },

    /// Overall visibility of one asset's assessments over time.
    Series {
        #[arg(required = true, num_args = 1..)]
        paths: Vec<PathBuf>,
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(0..=15))]
        precision: u32,
    },

    /// Print the scoring rubric.
    Rubric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Table,
    Machine,
}

pub fn parse_set(s: &str) -> Result<(String, Judgement), String> {
    let (id, scores) = s
        .rsplit_once(':')
        .ok_or_else(|| format!("expected ID:Q,A,F, got {s:?}"))?;
    if id.is_empty() {
        return Err(format!("missing node id in {s:?}"));
    }
    let values: Vec<i64> = scores
        .split(',')
        .map(|v| v.trim().parse::<i64>().map_err(|_| format!("score {v:?} is not an integer")))
        .collect::<Result<_, _>>()?;
    let [q, a, f] = values[..] else {
        return Err(format!("expected three scores Q,A,F, got {}", values.len()));
    };
    let j = Judgement::from_scores(q, a, f).map_err(|e| e.to_string())?;
    Ok((id.to_string(), j))
}

pub fn parse_weights(s: &str) -> Result<WeightScheme, String> {
    if s == "equal" {
        return Ok(WeightScheme::Equal);
    }
    let mut map = BTreeMap::new();
    for part in s.split(',') {
        let (id, w) = part
            .split_once('=')
            .ok_or_else(|| format!("expected ID=WEIGHT, got {part:?}"))?;
        let w: f64 = w.trim().parse().map_err(|_| format!("weight {w:?} is not a number"))?;
        if !w.is_finite() {
            return Err(format!("weight for {id} is not finite"));
        }
        if map.insert(id.trim().to_string(), w).is_some() {
            return Err(format!("weight for {id} given twice"));
        }
    }
    Ok(WeightScheme::Explicit(map))
}
