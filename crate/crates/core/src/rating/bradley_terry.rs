//! Online Bradley-Terry: a plain logistic model on natural-log-odds ratings
//! with a constant learning rate.
//!
//! A draw applies a simultaneous win update and loss update, both computed
//! from the pre-update ratings; the net effect pulls the two ratings
//! together by `eta * (1 - 2 E_a)` without changing their sum.

use serde::{Deserialize, Serialize};

use crate::domain::Outcome;
use crate::error::{Error, Result};

use super::{OutcomeProbs, RatingSystem};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BradleyTerryState {
    pub rating: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BradleyTerryConfig {
    /// Learning rate.
    pub eta: f64,
    pub initial_rating: f64,
}

impl Default for BradleyTerryConfig {
    fn default() -> Self {
        BradleyTerryConfig {
            eta: 0.1,
            initial_rating: 0.0,
        }
    }
}

impl BradleyTerryConfig {
    pub fn validate(&self) -> Result<()> {
        if self.eta <= 0.0 || !self.eta.is_finite() {
            return Err(Error::invalid(format!(
                "eta must be positive, got {}",
                self.eta
            )));
        }
        if !self.initial_rating.is_finite() {
            return Err(Error::invalid("initial rating must be finite"));
        }
        Ok(())
    }
}

/// Win probability of the first player: `1 / (1 + exp(r_b - r_a))`.
pub fn expected_score(rating_a: f64, rating_b: f64) -> f64 {
    (1.0 + (rating_b - rating_a).exp()).recip()
}

impl RatingSystem for BradleyTerryConfig {
    type State = BradleyTerryState;

    fn name(&self) -> &'static str {
        "bradley_terry"
    }

    fn initial_state(&self) -> BradleyTerryState {
        BradleyTerryState {
            rating: self.initial_rating,
        }
    }

    fn outcome_probs(&self, a: &BradleyTerryState, b: &BradleyTerryState) -> OutcomeProbs {
        OutcomeProbs::decisive(expected_score(a.rating, b.rating))
    }

    fn update(
        &self,
        a: &BradleyTerryState,
        b: &BradleyTerryState,
        outcome: Outcome,
    ) -> Result<(BradleyTerryState, BradleyTerryState)> {
        let e_a = expected_score(a.rating, b.rating);
        let e_b = 1.0 - e_a;
        let (delta_a, delta_b) = match outcome {
            Outcome::WinA => (self.eta * (1.0 - e_a), self.eta * (0.0 - e_b)),
            Outcome::WinB => (self.eta * (0.0 - e_a), self.eta * (1.0 - e_b)),
            // Win and loss deltas summed, both from pre-update ratings.
            Outcome::Draw => (
                self.eta * (1.0 - e_a) + self.eta * (0.0 - e_a),
                self.eta * (1.0 - e_b) + self.eta * (0.0 - e_b),
            ),
        };
        Ok((
            BradleyTerryState {
                rating: a.rating + delta_a,
            },
            BradleyTerryState {
                rating: b.rating + delta_b,
            },
        ))
    }

    fn rating_gap(&self, a: &BradleyTerryState, b: &BradleyTerryState) -> f64 {
        (a.rating - b.rating).abs()
    }
}
