//! Field and vocabulary mapping from heterogeneous arena exports onto the
//! canonical battle schema.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::domain::Outcome;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FileFormat {
    Jsonl,
    Csv,
}

impl std::str::FromStr for FileFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "jsonl" => Ok(FileFormat::Jsonl),
            "csv" => Ok(FileFormat::Csv),
            other => Err(Error::invalid(format!("unknown file format {other:?}"))),
        }
    }
}

/// Maps logical battle fields to source column/key names and source outcome
/// tokens to outcomes. Model and outcome mappings are mandatory; a missing
/// battle id or timestamp mapping falls back to row order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SchemaMapping {
    pub battle_id: Option<String>,
    pub timestamp: Option<String>,
    pub model_a: String,
    pub model_b: String,
    pub outcome: String,
    pub query_text: Option<String>,
    /// Total over the tokens present in the source; any token outside it is
    /// a hard error, never a silent drop.
    pub outcome_vocabulary: BTreeMap<String, Outcome>,
    /// Tokens whose rows are dropped entirely (e.g. "tie (bothbad)" when
    /// both-bad ties should not count as draws).
    pub drop_tokens: BTreeSet<String>,
}

impl Default for SchemaMapping {
    /// The canonical arena-style export: `model_a`/`model_b`/`tie` tokens,
    /// with both tie variants treated as draws.
    fn default() -> Self {
        let mut vocabulary = BTreeMap::new();
        vocabulary.insert("model_a".to_string(), Outcome::WinA);
        vocabulary.insert("model_b".to_string(), Outcome::WinB);
        vocabulary.insert("tie".to_string(), Outcome::Draw);
        vocabulary.insert("tie (bothbad)".to_string(), Outcome::Draw);
        SchemaMapping {
            battle_id: Some("battle_id".to_string()),
            timestamp: Some("timestamp".to_string()),
            model_a: "model_a".to_string(),
            model_b: "model_b".to_string(),
            outcome: "outcome".to_string(),
            query_text: Some("query_text".to_string()),
            outcome_vocabulary: vocabulary,
            drop_tokens: BTreeSet::new(),
        }
    }
}

impl SchemaMapping {
    /// Default mapping with "tie (bothbad)" rows dropped instead of folded
    /// into draws.
    pub fn without_bothbad(mut self) -> Self {
        self.drop_tokens.insert("tie (bothbad)".to_string());
        self
    }

    /// Mapping for published arena battle exports, which key battles by
    /// `question_id`, carry epoch-second `tstamp` values, and put the
    /// judgement under `winner`.
    pub fn arena_export() -> Self {
        SchemaMapping {
            battle_id: Some("question_id".to_string()),
            timestamp: Some("tstamp".to_string()),
            outcome: "winner".to_string(),
            query_text: None,
            ..SchemaMapping::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("model_a", &self.model_a),
            ("model_b", &self.model_b),
            ("outcome", &self.outcome),
        ] {
            if value.is_empty() {
                return Err(Error::invalid(format!(
                    "schema field {name} must be mapped"
                )));
            }
        }
        if self.outcome_vocabulary.is_empty() {
            return Err(Error::invalid("outcome vocabulary must not be empty"));
        }
        Ok(())
    }

    /// Resolves a source token to an outcome, or `Ok(None)` when the row is
    /// configured to be dropped.
    pub fn resolve_outcome(&self, token: &str, location: &str) -> Result<Option<Outcome>> {
        if self.drop_tokens.contains(token) {
            return Ok(None);
        }
        match self.outcome_vocabulary.get(token) {
            Some(outcome) => Ok(Some(*outcome)),
            None => Err(Error::parse(
                location,
                format!("outcome token {token:?} is not in the vocabulary"),
            )),
        }
    }
}
