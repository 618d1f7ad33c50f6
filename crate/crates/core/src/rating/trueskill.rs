//! TrueSkill for two players: Gaussian skill beliefs, a performance noise
//! `beta`, an additive dynamics variance per battle, and a draw margin
//! `epsilon` in performance units.
//!
//! The two-player posterior has closed forms through the truncated-Gaussian
//! corrections, so no factor-graph machinery is needed here. Teams and
//! partial play are out of scope.

use serde::{Deserialize, Serialize};

use crate::domain::Outcome;
use crate::error::{Error, Result};
use crate::numerics::{cdf_raw, inv_cdf_raw, truncated_moments_draw, truncated_moments_win};

use super::{OutcomeProbs, RatingSystem};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrueSkillState {
    /// Skill belief mean.
    pub mu: f64,
    /// Skill belief standard deviation, strictly positive.
    pub sigma: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrueSkillConfig {
    pub initial_mu: f64,
    pub initial_sigma: f64,
    /// Performance noise standard deviation.
    pub beta: f64,
    /// Additive skill standard deviation per battle, keeping old ratings
    /// adaptive.
    pub tau_dynamics: f64,
    /// Draw margin in performance units. Derive one from a target draw
    /// probability with [`draw_margin_from_probability`].
    pub draw_margin: f64,
}

impl Default for TrueSkillConfig {
    fn default() -> Self {
        let beta = 25.0 / 6.0;
        TrueSkillConfig {
            initial_mu: 25.0,
            initial_sigma: 25.0 / 3.0,
            beta,
            tau_dynamics: 25.0 / 300.0,
            draw_margin: draw_margin_from_probability(0.10, beta)
                .expect("default draw probability is valid"),
        }
    }
}

impl TrueSkillConfig {
    pub fn with_draw_probability(p_draw: f64) -> Result<Self> {
        let mut cfg = TrueSkillConfig::default();
        cfg.draw_margin = draw_margin_from_probability(p_draw, cfg.beta)?;
        Ok(cfg)
    }

    pub fn with_draw_margin(draw_margin: f64) -> Result<Self> {
        let cfg = TrueSkillConfig {
            draw_margin,
            ..TrueSkillConfig::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.beta <= 0.0 || !self.beta.is_finite() {
            return Err(Error::invalid(format!(
                "beta must be positive, got {}",
                self.beta
            )));
        }
        if self.initial_sigma <= 0.0 || self.initial_sigma.is_nan() {
            return Err(Error::invalid("initial sigma must be positive"));
        }
        if self.tau_dynamics < 0.0 || !self.tau_dynamics.is_finite() {
            return Err(Error::invalid("dynamics tau must be non-negative"));
        }
        if self.draw_margin < 0.0 || !self.draw_margin.is_finite() {
            return Err(Error::invalid("draw margin must be non-negative"));
        }
        Ok(())
    }
}

/// Draw margin that makes two fresh, noise-free opponents draw with
/// probability `p_draw`: `epsilon = sqrt(2) * beta * quantile((p_draw+1)/2)`.
pub fn draw_margin_from_probability(p_draw: f64, beta: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&p_draw) {
        return Err(Error::invalid(format!(
            "draw probability must be in [0, 1), got {p_draw}"
        )));
    }
    if beta <= 0.0 || !beta.is_finite() {
        return Err(Error::invalid(format!("beta must be positive, got {beta}")));
    }
    if p_draw == 0.0 {
        return Ok(0.0);
    }
    Ok(std::f64::consts::SQRT_2 * beta * inv_cdf_raw((p_draw + 1.0) / 2.0))
}

impl RatingSystem for TrueSkillConfig {
    type State = TrueSkillState;

    fn name(&self) -> &'static str {
        "trueskill"
    }

    fn initial_state(&self) -> TrueSkillState {
        TrueSkillState {
            mu: self.initial_mu,
            sigma: self.initial_sigma,
        }
    }

    fn outcome_probs(&self, a: &TrueSkillState, b: &TrueSkillState) -> OutcomeProbs {
        let c = (2.0 * self.beta * self.beta + a.sigma * a.sigma + b.sigma * b.sigma).sqrt();
        let diff = a.mu - b.mu;
        let p_win_a = cdf_raw((diff - self.draw_margin) / c);
        let p_loss_a = cdf_raw((-diff - self.draw_margin) / c);
        let p_draw = (1.0 - p_win_a - p_loss_a).max(0.0);
        OutcomeProbs {
            p_win_a,
            p_draw,
            p_loss_a,
        }
    }

    fn update(
        &self,
        a: &TrueSkillState,
        b: &TrueSkillState,
        outcome: Outcome,
    ) -> Result<(TrueSkillState, TrueSkillState)> {
        // Dynamics variance is added before the battle is absorbed.
        let var_a = a.sigma * a.sigma + self.tau_dynamics * self.tau_dynamics;
        let var_b = b.sigma * b.sigma + self.tau_dynamics * self.tau_dynamics;
        let c_sq = 2.0 * self.beta * self.beta + var_a + var_b;
        let c = c_sq.sqrt();
        let alpha = self.draw_margin / c;

        // Signed mean shift for player a; b moves opposite.
        let shift = match outcome {
            Outcome::WinA => truncated_moments_win((a.mu - b.mu) / c, alpha)?,
            Outcome::WinB => {
                let m = truncated_moments_win((b.mu - a.mu) / c, alpha)?;
                crate::numerics::TruncatedMoments { v: -m.v, w: m.w }
            }
            Outcome::Draw => truncated_moments_draw((a.mu - b.mu) / c, alpha)?,
        };

        let next_a = TrueSkillState {
            mu: a.mu + var_a / c * shift.v,
            sigma: (var_a * (1.0 - var_a / c_sq * shift.w)).sqrt(),
        };
        let next_b = TrueSkillState {
            mu: b.mu - var_b / c * shift.v,
            sigma: (var_b * (1.0 - var_b / c_sq * shift.w)).sqrt(),
        };
        Ok((next_a, next_b))
    }

    fn rating_gap(&self, a: &TrueSkillState, b: &TrueSkillState) -> f64 {
        (a.mu - b.mu).abs()
    }
}
