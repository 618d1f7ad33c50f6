//! Canonical domain types shared by every other module: model identifiers,
//! battle outcomes, judged battles, ordered battle streams, and per-query
//! annotations.
//!
//! All types here are immutable value records and safe to share between
//! threads.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Opaque model identifier, unique within a dataset.
///
/// Equality is exact string equality; the identifier must be non-empty.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ModelId(String);

impl ModelId {
    pub fn new(id: impl Into<String>) -> Result<Self> {
        let id = id.into();
        if id.is_empty() {
            return Err(Error::invalid("model id must be non-empty"));
        }
        Ok(ModelId(id))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl std::fmt::Display for ModelId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

/// Outcome of one battle, from model A's perspective.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    WinA,
    Draw,
    WinB,
}

impl Outcome {
    /// Numeric score of the outcome for model A: win 1, draw 1/2, loss 0.
    pub fn score(self) -> f64 {
        match self {
            Outcome::WinA => 1.0,
            Outcome::Draw => 0.5,
            Outcome::WinB => 0.0,
        }
    }

    /// Swaps the two sides; a draw is a fixed point.
    pub fn flip(self) -> Outcome {
        match self {
            Outcome::WinA => Outcome::WinB,
            Outcome::Draw => Outcome::Draw,
            Outcome::WinB => Outcome::WinA,
        }
    }

    pub fn is_draw(self) -> bool {
        matches!(self, Outcome::Draw)
    }
}

/// One judged pairwise comparison.
#[derive(Clone, Debug, PartialEq)]
pub struct Battle {
    /// Opaque identifier, unique within a stream.
    pub battle_id: String,
    /// Millisecond epoch time or a monotone sequence index; only the order
    /// matters.
    pub timestamp: i64,
    pub model_a: ModelId,
    pub model_b: ModelId,
    pub outcome: Outcome,
    pub query_text: Option<String>,
}

impl Battle {
    pub fn new(
        battle_id: impl Into<String>,
        timestamp: i64,
        model_a: ModelId,
        model_b: ModelId,
        outcome: Outcome,
        query_text: Option<String>,
    ) -> Result<Self> {
        let battle_id = battle_id.into();
        if battle_id.is_empty() {
            return Err(Error::invalid("battle id must be non-empty"));
        }
        if model_a == model_b {
            return Err(Error::invalid(format!(
                "battle {battle_id}: a model cannot battle itself ({model_a})"
            )));
        }
        Ok(Battle {
            battle_id,
            timestamp,
            model_a,
            model_b,
            outcome,
            query_text,
        })
    }
}

/// A time-ordered sequence of battles.
///
/// Construction enforces non-decreasing timestamps and unique battle ids.
#[derive(Clone, Debug, PartialEq)]
pub struct BattleStream {
    battles: Vec<Battle>,
}

impl BattleStream {
    pub fn new(battles: Vec<Battle>) -> Result<Self> {
        let mut seen = std::collections::HashSet::with_capacity(battles.len());
        for pair in battles.windows(2) {
            if pair[1].timestamp < pair[0].timestamp {
                return Err(Error::invalid(format!(
                    "battle {} is out of order (timestamp {} after {})",
                    pair[1].battle_id, pair[1].timestamp, pair[0].timestamp
                )));
            }
        }
        for battle in &battles {
            if !seen.insert(battle.battle_id.as_str()) {
                return Err(Error::invalid(format!(
                    "duplicate battle id {}",
                    battle.battle_id
                )));
            }
        }
        Ok(BattleStream { battles })
    }

    pub fn battles(&self) -> &[Battle] {
        &self.battles
    }

    pub fn len(&self) -> usize {
        self.battles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.battles.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Battle> {
        self.battles.iter()
    }

    /// The first `k` battles as a stream of their own. A prefix of a valid
    /// stream is always valid.
    pub fn prefix(&self, k: usize) -> BattleStream {
        BattleStream {
            battles: self.battles[..k.min(self.battles.len())].to_vec(),
        }
    }

    /// Fraction of battles that ended in a draw.
    ///
    /// Undefined (an error, not zero) on an empty stream.
    pub fn draw_fraction(&self) -> Result<f64> {
        if self.battles.is_empty() {
            return Err(Error::invalid(
                "draw fraction is undefined for an empty stream",
            ));
        }
        let draws = self.battles.iter().filter(|b| b.outcome.is_draw()).count();
        Ok(draws as f64 / self.battles.len() as f64)
    }
}

impl<'a> IntoIterator for &'a BattleStream {
    type Item = &'a Battle;
    type IntoIter = std::slice::Iter<'a, Battle>;

    fn into_iter(self) -> Self::IntoIter {
        self.battles.iter()
    }
}

/// Per-battle query annotation: difficulty and subjectivity, each on a 0-5
/// integer scale.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Annotation {
    pub battle_id: String,
    pub difficulty: u8,
    pub subjectivity: u8,
}

impl Annotation {
    pub const MAX_SCORE: u8 = 5;

    pub fn new(battle_id: impl Into<String>, difficulty: u8, subjectivity: u8) -> Result<Self> {
        let battle_id = battle_id.into();
        if difficulty > Self::MAX_SCORE || subjectivity > Self::MAX_SCORE {
            return Err(Error::invalid(format!(
                "annotation {battle_id}: scores must be within 0..=5 (got {difficulty}, {subjectivity})"
            )));
        }
        Ok(Annotation {
            battle_id,
            difficulty,
            subjectivity,
        })
    }
}
