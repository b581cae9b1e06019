//! Scale used to judge the documentation available for each contribution.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::model::{Criterion, ScoreLevel};

const QUANTITY: [&str; 4] = [
    "Sparse or insufficient information",
    "Some information missing",
    "Sufficient to gain confidence",
    "Sufficient to validate",
];

const FRESHNESS: [&str; 4] = [
    "Never updated",
    "Out-of-date",
    "Updated when changed",
    "Real-time validation",
];

const ACCURACY: [&str; 4] = [
    "Demonstrably inaccurate",
    "Believed to be inaccurate",
    "Believed to be accurate",
    "Evidenced and verifiable",
];

/// Canonical description of `level` for `criterion`.
pub fn rubric_text(criterion: Criterion, level: ScoreLevel) -> &'static str {
    let column = match criterion {
        Criterion::Quantity => &QUANTITY,
        Criterion::Freshness => &FRESHNESS,
        Criterion::Accuracy => &ACCURACY,
    };
    column[usize::from(level.value() - 1)]
}

/// One description per criterion and level.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rubric {
    /// criterion name -> level (as a string key "1".."4") -> description
    cells: BTreeMap<String, BTreeMap<String, String>>,
}

impl Rubric {
    pub fn canonical() -> Self {
        let cells = Criterion::ALL
            .into_iter()
            .map(|c| {
                let levels = ScoreLevel::ALL
                    .into_iter()
                    .map(|l| (l.to_string(), rubric_text(c, l).to_string()))
                    .collect();
                (c.as_str().to_string(), levels)
            })
            .collect();
        Rubric { cells }
    }

    pub fn get(&self, criterion: Criterion, level: ScoreLevel) -> Option<&str> {
        self.cells.get(criterion.as_str())?.get(&level.to_string()).map(String::as_str)
    }

    /// True when all twelve cells are present and non-empty.
    pub fn is_complete(&self) -> bool {
        Criterion::ALL.into_iter().all(|c| {
            ScoreLevel::ALL
                .into_iter()
                .all(|l| self.get(c, l).is_some_and(|s| !s.trim().is_empty()))
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("rubric serializes")
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }
}

impl Default for Rubric {
    fn default() -> Self {
        Rubric::canonical()
    }
}
