//! The classic chess rating system: a logistic expected score on the
//! 400-point display scale and a constant-gain update.

use serde::{Deserialize, Serialize};

use crate::domain::Outcome;
use crate::error::{Error, Result};

use super::{OutcomeProbs, RatingSystem};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EloState {
    pub rating: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EloConfig {
    pub k_factor: f64,
    pub initial_rating: f64,
}

impl Default for EloConfig {
    fn default() -> Self {
        EloConfig {
            k_factor: 32.0,
            initial_rating: 1500.0,
        }
    }
}

impl EloConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k_factor <= 0.0 || !self.k_factor.is_finite() {
            return Err(Error::invalid(format!(
                "k_factor must be positive, got {}",
                self.k_factor
            )));
        }
        if !self.initial_rating.is_finite() {
            return Err(Error::invalid("initial rating must be finite"));
        }
        Ok(())
    }
}

/// Expected score of the first player: `1 / (1 + 10^((r_b - r_a) / 400))`.
pub fn expected_score(rating_a: f64, rating_b: f64) -> f64 {
    1.0 / (1.0 + 10f64.powf((rating_b - rating_a) / 400.0))
}

impl RatingSystem for EloConfig {
    type State = EloState;

    fn name(&self) -> &'static str {
        "elo"
    }

    fn initial_state(&self) -> EloState {
        EloState {
            rating: self.initial_rating,
        }
    }

    fn outcome_probs(&self, a: &EloState, b: &EloState) -> OutcomeProbs {
        OutcomeProbs::decisive(expected_score(a.rating, b.rating))
    }

    fn update(&self, a: &EloState, b: &EloState, outcome: Outcome) -> Result<(EloState, EloState)> {
        let e_a = expected_score(a.rating, b.rating);
        let e_b = 1.0 - e_a;
        let s = outcome.score();
        Ok((
            EloState {
                rating: a.rating + self.k_factor * (s - e_a),
            },
            EloState {
                rating: b.rating + self.k_factor * ((1.0 - s) - e_b),
            },
        ))
    }

    fn rating_gap(&self, a: &EloState, b: &EloState) -> f64 {
        (a.rating - b.rating).abs()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expected_score_examples() {
        assert_eq!(expected_score(1500.0, 1500.0), 0.5);
        assert!((expected_score(1600.0, 1400.0) - 0.759747).abs() < 1e-6);
        assert!((expected_score(1400.0, 1600.0) - 0.240253).abs() < 1e-6);
        assert!(
            (expected_score(1600.0, 1400.0) + expected_score(1400.0, 1600.0) - 1.0).abs() < 1e-12
        );
    }

    #[test]
    fn win_at_parity_moves_sixteen_points() {
        let cfg = EloConfig::default();
        let a = EloState { rating: 1500.0 };
        let b = EloState { rating: 1500.0 };
        let (na, nb) = cfg.update(&a, &b, Outcome::WinA).unwrap();
        assert!((na.rating - 1516.0).abs() < 1e-9);
        assert!((nb.rating - 1484.0).abs() < 1e-9);
    }

    #[test]
    fn draw_at_parity_is_a_fixed_point() {
        let cfg = EloConfig::default();
        let a = EloState { rating: 1500.0 };
        let (na, nb) = cfg.update(&a, &a.clone(), Outcome::Draw).unwrap();
        assert_eq!(na.rating, 1500.0);
        assert_eq!(nb.rating, 1500.0);
    }

    #[test]
    fn draw_pulls_unequal_ratings_together() {
        let cfg = EloConfig::default();
        let a = EloState { rating: 1600.0 };
        let b = EloState { rating: 1400.0 };
        let (na, nb) = cfg.update(&a, &b, Outcome::Draw).unwrap();
        assert!((na.rating - 1591.688).abs() < 1e-3);
        assert!((nb.rating - 1408.312).abs() < 1e-3);
    }

    #[test]
    fn updates_conserve_the_rating_sum() {
        let cfg = EloConfig::default();
        for (ra, rb) in [(1500.0, 1500.0), (1712.5, 1304.25), (900.0, 2400.0)] {
            for outcome in [Outcome::WinA, Outcome::Draw, Outcome::WinB] {
                let (na, nb) = cfg
                    .update(&EloState { rating: ra }, &EloState { rating: rb }, outcome)
                    .unwrap();
                assert!((na.rating + nb.rating - (ra + rb)).abs() < 1e-9);
            }
        }
    }
}
