//! The four online rating systems behind one common contract: an
//! expected-outcome distribution for the next battle and a post-battle
//! update rule.
//!
//! Updates are pure (states in, states out) and both sides of every update
//! read the opponent's pre-update state, so a battle is a single simultaneous
//! transition.

mod bradley_terry;
mod elo;
mod glicko2;
mod trueskill;

pub use bradley_terry::{
    expected_score as bradley_terry_expected_score, BradleyTerryConfig, BradleyTerryState,
};
pub use elo::{expected_score as elo_expected_score, EloConfig, EloState};
pub use glicko2::{
    expected_score as glicko2_expected_score, update_rating_period, Glicko2Config, Glicko2State,
    GLICKO2_SCALE,
};
pub use trueskill::{draw_margin_from_probability, TrueSkillConfig, TrueSkillState};

use serde::{Deserialize, Serialize};

use crate::domain::Outcome;
use crate::error::Result;

/// Predicted probabilities of the three outcomes of one battle, from model
/// A's perspective.
///
/// The logistic systems (Elo, Glicko-2, Bradley-Terry) model only win/loss
/// and report `p_draw = 0`; draw prediction for them is layered on by the
/// decision margin. TrueSkill natively reports a three-way distribution.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutcomeProbs {
    pub p_win_a: f64,
    pub p_draw: f64,
    pub p_loss_a: f64,
}

impl OutcomeProbs {
    const NORMALIZATION_TOLERANCE: f64 = 1e-9;

    pub fn new(p_win_a: f64, p_draw: f64, p_loss_a: f64) -> Result<Self> {
        let probs = OutcomeProbs {
            p_win_a,
            p_draw,
            p_loss_a,
        };
        for p in [p_win_a, p_draw, p_loss_a] {
            if !(0.0..=1.0).contains(&p) {
                return Err(crate::Error::invalid(format!(
                    "outcome probability {p} outside [0, 1]"
                )));
            }
        }
        let sum = p_win_a + p_draw + p_loss_a;
        if (sum - 1.0).abs() > Self::NORMALIZATION_TOLERANCE {
            return Err(crate::Error::invalid(format!(
                "outcome probabilities sum to {sum}, expected 1"
            )));
        }
        Ok(probs)
    }

    /// Two-way distribution of a system without a native draw model.
    pub fn decisive(expected_a: f64) -> Self {
        OutcomeProbs {
            p_win_a: expected_a,
            p_draw: 0.0,
            p_loss_a: 1.0 - expected_a,
        }
    }
}

/// Common contract of an online rating system.
pub trait RatingSystem {
    type State: Clone + std::fmt::Debug;

    fn name(&self) -> &'static str;

    /// Fresh state for a model seen for the first time.
    fn initial_state(&self) -> Self::State;

    /// Expected outcome distribution for a battle between `a` and `b`.
    fn outcome_probs(&self, a: &Self::State, b: &Self::State) -> OutcomeProbs;

    /// Post-battle update. Both returned states are computed from the
    /// pre-update inputs.
    fn update(
        &self,
        a: &Self::State,
        b: &Self::State,
        outcome: Outcome,
    ) -> Result<(Self::State, Self::State)>;

    /// Absolute rating difference in the system's native units, used for
    /// percentile binning of rating gaps.
    fn rating_gap(&self, a: &Self::State, b: &Self::State) -> f64;
}

/// Config for any of the four systems, for call sites that pick a system at
/// runtime.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "system", rename_all = "snake_case")]
pub enum SystemConfig {
    Elo(EloConfig),
    Glicko2(Glicko2Config),
    BradleyTerry(BradleyTerryConfig),
    Trueskill(TrueSkillConfig),
}

impl SystemConfig {
    pub fn name(&self) -> &'static str {
        match self {
            SystemConfig::Elo(c) => c.name(),
            SystemConfig::Glicko2(c) => c.name(),
            SystemConfig::BradleyTerry(c) => c.name(),
            SystemConfig::Trueskill(c) => c.name(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SystemConfig::Elo(c) => c.validate(),
            SystemConfig::Glicko2(c) => c.validate(),
            SystemConfig::BradleyTerry(c) => c.validate(),
            SystemConfig::Trueskill(c) => c.validate(),
        }
    }
}
