//! Glicko-2: a logistic rating model that also tracks rating deviation and
//! volatility.
//!
//! All computation happens on the internal scale; the conventional display
//! scale (rating `1500 + 173.7178 * mu`, deviation `173.7178 * phi`) is a
//! reporting conversion only.
//!
//! The online mode treats every battle as a one-game rating period for both
//! participants, with no deviation inflation for idle models, so the replay
//! updates battle by battle. The batch rating-period form is also provided;
//! it is what the reference worked example exercises.

use serde::{Deserialize, Serialize};

use crate::domain::Outcome;
use crate::error::{Error, Result};
use crate::numerics::solve_volatility;

use super::{OutcomeProbs, RatingSystem};

/// Conversion factor between the internal and display scales.
pub const GLICKO2_SCALE: f64 = 173.7178;

const DISPLAY_ANCHOR: f64 = 1500.0;

/// Rating state on the internal scale.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Glicko2State {
    /// Rating.
    pub mu: f64,
    /// Rating deviation, strictly positive.
    pub phi: f64,
    /// Volatility, strictly positive.
    pub sigma: f64,
}

impl Glicko2State {
    pub fn from_display(rating: f64, deviation: f64, volatility: f64) -> Result<Self> {
        if deviation <= 0.0 || volatility <= 0.0 || deviation.is_nan() || volatility.is_nan() {
            return Err(Error::invalid(format!(
                "deviation and volatility must be positive (got {deviation}, {volatility})"
            )));
        }
        Ok(Glicko2State {
            mu: (rating - DISPLAY_ANCHOR) / GLICKO2_SCALE,
            phi: deviation / GLICKO2_SCALE,
            sigma: volatility,
        })
    }

    pub fn display_rating(&self) -> f64 {
        DISPLAY_ANCHOR + GLICKO2_SCALE * self.mu
    }

    pub fn display_deviation(&self) -> f64 {
        GLICKO2_SCALE * self.phi
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Glicko2Config {
    /// Volatility-change constraint; smaller means steadier volatility.
    pub tau: f64,
    pub initial_rating: f64,
    pub initial_deviation: f64,
    pub initial_volatility: f64,
}

impl Default for Glicko2Config {
    fn default() -> Self {
        Glicko2Config {
            tau: 0.5,
            initial_rating: 1500.0,
            initial_deviation: 350.0,
            initial_volatility: 0.06,
        }
    }
}

impl Glicko2Config {
    pub fn validate(&self) -> Result<()> {
        if self.tau <= 0.0 || !self.tau.is_finite() {
            return Err(Error::invalid(format!(
                "tau must be positive, got {}",
                self.tau
            )));
        }
        if self.initial_deviation <= 0.0
            || self.initial_volatility <= 0.0
            || self.initial_deviation.is_nan()
            || self.initial_volatility.is_nan()
        {
            return Err(Error::invalid(
                "initial deviation and volatility must be positive".to_string(),
            ));
        }
        Ok(())
    }
}

/// The deviation weighting `g(phi) = 1 / sqrt(1 + 3 phi^2 / pi^2)`.
fn g_weight(phi: f64) -> f64 {
    (1.0 + 3.0 * phi * phi / (std::f64::consts::PI * std::f64::consts::PI))
        .sqrt()
        .recip()
}

/// Expected score of `a` against `b`, discounted by the opponent's
/// deviation: `1 / (1 + exp(-g(phi_b) (mu_a - mu_b)))`.
pub fn expected_score(a: &Glicko2State, b: &Glicko2State) -> f64 {
    (1.0 + (-g_weight(b.phi) * (a.mu - b.mu)).exp()).recip()
}

/// One rating period for `player` against a list of `(opponent, score)`
/// results, scores from the player's perspective in `{0, 1/2, 1}`.
pub fn update_rating_period(
    player: &Glicko2State,
    results: &[(Glicko2State, f64)],
    config: &Glicko2Config,
) -> Result<Glicko2State> {
    if results.is_empty() {
        return Err(Error::invalid("a rating period needs at least one game"));
    }
    for (_, score) in results {
        if *score != 0.0 && *score != 0.5 && *score != 1.0 {
            return Err(Error::invalid(format!(
                "game scores must be 0, 1/2, or 1 (got {score})"
            )));
        }
    }

    let mut inv_v = 0.0;
    let mut score_sum = 0.0;
    for (opponent, score) in results {
        let g = g_weight(opponent.phi);
        let e = expected_score(player, opponent);
        inv_v += g * g * e * (1.0 - e);
        score_sum += g * (score - e);
    }
    let v = inv_v.recip();
    let delta = v * score_sum;

    let sigma_next = solve_volatility(
        delta * delta,
        player.phi * player.phi,
        v,
        player.sigma,
        config.tau,
    )?;
    let phi_star = player.phi.hypot(sigma_next);
    let phi_next = (phi_star.powi(2).recip() + v.recip()).sqrt().recip();
    let mu_next = player.mu + phi_next * phi_next * score_sum;

    Ok(Glicko2State {
        mu: mu_next,
        phi: phi_next,
        sigma: sigma_next,
    })
}

impl RatingSystem for Glicko2Config {
    type State = Glicko2State;

    fn name(&self) -> &'static str {
        "glicko2"
    }

    fn initial_state(&self) -> Glicko2State {
        Glicko2State::from_display(
            self.initial_rating,
            self.initial_deviation,
            self.initial_volatility,
        )
        .expect("validated config")
    }

    fn outcome_probs(&self, a: &Glicko2State, b: &Glicko2State) -> OutcomeProbs {
        OutcomeProbs::decisive(expected_score(a, b))
    }

    fn update(
        &self,
        a: &Glicko2State,
        b: &Glicko2State,
        outcome: Outcome,
    ) -> Result<(Glicko2State, Glicko2State)> {
        let s = outcome.score();
        // Each side runs a one-game rating period against the other's
        // pre-update state.
        let next_a = update_rating_period(a, &[(*b, s)], self)?;
        let next_b = update_rating_period(b, &[(*a, 1.0 - s)], self)?;
        Ok((next_a, next_b))
    }

    fn rating_gap(&self, a: &Glicko2State, b: &Glicko2State) -> f64 {
        (a.mu - b.mu).abs()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn worked_example_player() -> Glicko2State {
        Glicko2State::from_display(1500.0, 200.0, 0.06).unwrap()
    }

    fn worked_example_opponents() -> [(Glicko2State, f64); 3] {
        [
            (Glicko2State::from_display(1400.0, 30.0, 0.06).unwrap(), 1.0),
            (
                Glicko2State::from_display(1550.0, 100.0, 0.06).unwrap(),
                0.0,
            ),
            (
                Glicko2State::from_display(1700.0, 300.0, 0.06).unwrap(),
                0.0,
            ),
        ]
    }

    #[test]
    fn expected_score_is_half_at_parity() {
        let cfg = Glicko2Config::default();
        let s = cfg.initial_state();
        assert_eq!(expected_score(&s, &s), 0.5);
    }

    #[test]
    fn zero_deviation_reduces_to_plain_logistic() {
        // g(0) = 1, so the expectation collapses to 1/(1+exp(-(mu_a-mu_b))).
        let a = Glicko2State {
            mu: 0.8,
            phi: 1.0,
            sigma: 0.06,
        };
        let b = Glicko2State {
            mu: 0.3,
            phi: 1e-12,
            sigma: 0.06,
        };
        let plain_logistic = (1.0 + (-(a.mu - b.mu)).exp()).recip();
        assert!((expected_score(&a, &b) - plain_logistic).abs() < 1e-9);
    }

    #[test]
    fn worked_example_first_game_expectation() {
        let player = worked_example_player();
        let (opponent, _) = worked_example_opponents()[0];
        assert!((expected_score(&player, &opponent) - 0.639).abs() < 0.002);
    }

    #[test]
    fn worked_example_rating_period() {
        let player = worked_example_player();
        let next = update_rating_period(
            &player,
            &worked_example_opponents(),
            &Glicko2Config::default(),
        )
        .unwrap();
        assert!((next.display_rating() - 1464.06).abs() < 0.5);
        assert!((next.display_deviation() - 151.52).abs() < 0.5);
        assert!((next.sigma - 0.05999).abs() < 1e-4);
    }

    #[test]
    fn empty_rating_period_rejected() {
        let player = worked_example_player();
        assert!(update_rating_period(&player, &[], &Glicko2Config::default()).is_err());
    }

    #[test]
    fn symmetric_draw_shrinks_deviation_only() {
        let cfg = Glicko2Config::default();
        let s = cfg.initial_state();
        let (na, nb) = cfg.update(&s, &s.clone(), Outcome::Draw).unwrap();
        assert!((na.mu - s.mu).abs() < 1e-12);
        assert!((nb.mu - s.mu).abs() < 1e-12);
        assert!(na.phi < s.phi);
        assert_eq!(na.phi, nb.phi);
    }

    #[test]
    fn symmetric_win_moves_ratings_antisymmetrically() {
        let cfg = Glicko2Config::default();
        let s = cfg.initial_state();
        let (na, nb) = cfg.update(&s, &s.clone(), Outcome::WinA).unwrap();
        assert!(na.mu > 0.0);
        assert!((na.mu + nb.mu).abs() < 1e-12);
    }

    #[test]
    fn relabeling_the_players_mirrors_the_update() {
        let cfg = Glicko2Config::default();
        let a = Glicko2State::from_display(1550.0, 120.0, 0.06).unwrap();
        let b = Glicko2State::from_display(1450.0, 220.0, 0.06).unwrap();
        let (a_first, b_first) = cfg.update(&a, &b, Outcome::WinA).unwrap();
        let (b_second, a_second) = cfg.update(&b, &a, Outcome::WinB).unwrap();
        assert_eq!(a_first, a_second);
        assert_eq!(b_first, b_second);
    }

    #[test]
    fn states_stay_positive_over_fuzzed_battles() {
        let cfg = Glicko2Config::default();
        let mut a = cfg.initial_state();
        let mut b = cfg.initial_state();
        let mut state = 0xdeadbeef_u64;
        for i in 0..10_000 {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            let outcome = match state >> 62 {
                0 => Outcome::WinA,
                1 => Outcome::Draw,
                _ => Outcome::WinB,
            };
            let (na, nb) = cfg.update(&a, &b, outcome).unwrap();
            assert!(na.phi > 0.0 && na.sigma > 0.0, "battle {i}");
            assert!(nb.phi > 0.0 && nb.sigma > 0.0, "battle {i}");
            a = na;
            b = nb;
        }
    }
}
