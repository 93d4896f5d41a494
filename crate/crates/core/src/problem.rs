//! JSON problem files.
//!
//! ```json
//! {
//!   "outcomes": [{"label": "R", "probability": "4/9"}, ...],
//!   "options": [{"label": "option 1", "favorable": ["R", "B"]}, ...],
//!   "utilities": {"favorable": "1", "unfavorable": "0"}
//! }
//! ```
//!
//! Errors carry the 1-based line of the offending field.

use std::collections::BTreeMap;
use std::fmt;

use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::decision::{DecisionError, DecisionMatrix, DecisionOption, Outcome, PayoffClass, Utilities};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemError {
    pub line: usize,
    pub field: String,
    pub message: String,
}

impl fmt::Display for ProblemError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.field.is_empty() {
            write!(f, "line {}: {}", self.line, self.message)
        } else {
            write!(f, "line {}: {}: {}", self.line, self.field, self.message)
        }
    }
}

impl std::error::Error for ProblemError {}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutcome {
    label: String,
    probability: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOption {
    label: String,
    favorable: Vec<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProblem {
    outcomes: Vec<RawOutcome>,
    options: Vec<RawOption>,
    #[serde(default)]
    utilities: Option<Map<String, Value>>,
}

/// Line of the `nth` (0-based) occurrence of `"key"` used as an object key,
/// or line 1 when it cannot be found.
fn key_line(text: &str, key: &str, nth: usize) -> usize {
    let quoted = format!("\"{key}\"");
    let mut seen = 0;
    for (pos, _) in text.match_indices(&quoted) {
        let rest = text[pos + quoted.len()..].trim_start();
        if rest.starts_with(':') {
            if seen == nth {
                return text[..pos].matches('\n').count() + 1;
            }
            seen += 1;
        }
    }
    1
}

fn field_error(text: &str, key: &str, nth: usize, field: String, message: impl Into<String>) -> ProblemError {
    ProblemError {
        line: key_line(text, key, nth),
        field,
        message: message.into(),
    }
}

fn parse_value<T: Scalar>(text: &str, key: &str, nth: usize, field: String, value: &str) -> Result<T, ProblemError> {
    T::parse_fraction(value).map_err(|e| field_error(text, key, nth, field, e.to_string()))
}

/// Parses and validates a problem file.
pub fn parse_problem<T: Scalar>(text: &str) -> Result<DecisionMatrix<T>, ProblemError> {
    let raw: RawProblem = serde_json::from_str(text).map_err(|e| ProblemError {
        line: e.line().max(1),
        field: String::new(),
        message: e.to_string(),
    })?;
    let mut outcomes = Vec::with_capacity(raw.outcomes.len());
    for (k, o) in raw.outcomes.iter().enumerate() {
        let probability = parse_value(text, "probability", k, format!("outcomes[{k}].probability"), &o.probability)?;
        outcomes.push(Outcome {
            label: o.label.clone(),
            probability,
        });
    }
    let index: BTreeMap<&str, usize> = raw
        .outcomes
        .iter()
        .enumerate()
        .map(|(k, o)| (o.label.as_str(), k))
        .collect();
    let mut options = Vec::with_capacity(raw.options.len());
    for (i, o) in raw.options.iter().enumerate() {
        let mut payoffs = vec![PayoffClass::Unfavorable; outcomes.len()];
        for label in &o.favorable {
            let j = *index.get(label.as_str()).ok_or_else(|| {
                field_error(
                    text,
                    "favorable",
                    i,
                    format!("options[{i}].favorable"),
                    format!("unknown outcome label {label:?}"),
                )
            })?;
            payoffs[j] = PayoffClass::Favorable;
        }
        options.push(DecisionOption::new(o.label.clone(), payoffs));
    }
    let utilities = match &raw.utilities {
        None => Utilities::binary(),
        Some(map) => {
            let extra: Vec<&String> = map.keys().filter(|k| *k != "favorable" && *k != "unfavorable").collect();
            if !extra.is_empty() {
                return Err(field_error(
                    text,
                    "utilities",
                    0,
                    "utilities".into(),
                    DecisionError::MultiLevelUtility(map.len()).to_string(),
                ));
            }
            let get = |key: &str| -> Result<T, ProblemError> {
                match map.get(key) {
                    None => Err(field_error(text, "utilities", 0, format!("utilities.{key}"), "missing")),
                    Some(Value::String(s)) => parse_value(text, key, 0, format!("utilities.{key}"), s),
                    Some(other) => parse_value(text, key, 0, format!("utilities.{key}"), &other.to_string()),
                }
            };
            Utilities {
                favorable: get("favorable")?,
                unfavorable: get("unfavorable")?,
            }
        }
    };
    DecisionMatrix::new(outcomes, options, utilities)
        .validate()
        .map_err(|e| {
            let (key, field) = match &e {
                DecisionError::ProbabilitySum(_) | DecisionError::EmptyOutcomes => ("outcomes", "outcomes"),
                DecisionError::ProbabilityRange { .. } => ("outcomes", "outcomes"),
                DecisionError::InvertedUtilities { .. } | DecisionError::MultiLevelUtility(_) => ("utilities", "utilities"),
                _ => ("options", "options"),
            };
            field_error(text, key, 0, field.to_string(), e.to_string())
        })
}

/// Serializes a matrix in the problem-file schema.
pub fn problem_to_json<T: Scalar>(matrix: &DecisionMatrix<T>) -> Value {
    json!({
        "outcomes": matrix.outcomes.iter().map(|o| json!({
            "label": o.label,
            "probability": o.probability.to_fraction_string(),
        })).collect::<Vec<_>>(),
        "options": matrix.options.iter().map(|o| json!({
            "label": o.label,
            "favorable": (0..matrix.outcome_count())
                .filter(|&j| o.is_favorable(j))
                .map(|j| matrix.outcomes[j].label.clone())
                .collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
        "utilities": {
            "favorable": matrix.utilities.favorable.to_fraction_string(),
            "unfavorable": matrix.utilities.unfavorable.to_fraction_string(),
        },
    })
}
