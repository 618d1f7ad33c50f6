//! The predict-then-update replay loop and the decision rule.

use std::collections::HashMap;

use crate::domain::{BattleStream, ModelId, Outcome};
use crate::error::{Error, Result};
use crate::rating::{OutcomeProbs, RatingSystem, SystemConfig};

use super::policy::TreatmentPolicy;

/// One battle's prediction, made strictly before the battle's update.
#[derive(Clone, Debug, PartialEq)]
pub struct PredictionRecord {
    pub battle_id: String,
    pub predicted: Outcome,
    pub actual: Outcome,
    /// The full predicted distribution, so metrics can re-derive decisions
    /// under different margins.
    pub probs: OutcomeProbs,
    /// Absolute rating difference at prediction time, in the system's native
    /// units.
    pub pre_gap: f64,
    /// Whether the battle falls in the leading calibration slice.
    pub in_calibration: bool,
}

impl PredictionRecord {
    pub fn correct(&self) -> bool {
        self.predicted == self.actual
    }
}

/// Every prediction of one replay, in stream order.
#[derive(Clone, Debug)]
pub struct PredictionLog {
    pub system: String,
    pub policy: TreatmentPolicy,
    pub epsilon: f64,
    pub records: Vec<PredictionRecord>,
}

impl PredictionLog {
    pub fn validation_records(&self) -> impl Iterator<Item = &PredictionRecord> {
        self.records.iter().filter(|r| !r.in_calibration)
    }
}

/// Turns a predicted distribution into a predicted outcome.
///
/// Systems with a native draw probability use the most probable outcome,
/// ties resolved draw over win over loss. Two-way systems predict a draw
/// whenever the win/loss probabilities are within `epsilon` of each other.
pub fn decide(probs: &OutcomeProbs, epsilon: f64) -> Outcome {
    if probs.p_draw > 0.0 {
        if probs.p_draw >= probs.p_win_a && probs.p_draw >= probs.p_loss_a {
            Outcome::Draw
        } else if probs.p_win_a >= probs.p_loss_a {
            Outcome::WinA
        } else {
            Outcome::WinB
        }
    } else {
        let diff = probs.p_win_a - probs.p_loss_a;
        if diff.abs() <= epsilon {
            Outcome::Draw
        } else if diff > 0.0 {
            Outcome::WinA
        } else {
            Outcome::WinB
        }
    }
}

/// Number of leading battles in the calibration slice:
/// `ceil(fraction * n)`, robust to the usual floating-point dust.
pub(crate) fn calibration_len(fraction: f64, n: usize) -> usize {
    let raw = fraction * n as f64;
    (((raw - 1e-9).ceil()).max(0.0) as usize).min(n)
}

/// Replays `stream` chronologically: every battle is predicted from the
/// current states via [`decide`], recorded, and then updated unless `policy`
/// skips it. Skipped battles still contribute their prediction.
///
/// Every model gets a fresh initial state on first appearance; models not in
/// a battle are untouched by it.
pub fn replay<S: RatingSystem>(
    stream: &BattleStream,
    system: &S,
    policy: &TreatmentPolicy,
    epsilon: f64,
    calibration_fraction: f64,
) -> Result<PredictionLog> {
    if stream.is_empty() {
        return Err(Error::invalid("cannot replay an empty stream"));
    }
    if !epsilon.is_finite() || epsilon < 0.0 {
        return Err(Error::invalid(format!(
            "decision margin must be non-negative, got {epsilon}"
        )));
    }
    if !(0.0..=1.0).contains(&calibration_fraction) {
        return Err(Error::invalid(format!(
            "calibration fraction must be in [0, 1], got {calibration_fraction}"
        )));
    }
    policy.validate()?;

    let n_calibration = calibration_len(calibration_fraction, stream.len());
    let mut states: HashMap<ModelId, S::State> = HashMap::new();
    let mut runner = policy.runner();
    let mut records = Vec::with_capacity(stream.len());

    for (index, battle) in stream.iter().enumerate() {
        let state_a = states
            .get(&battle.model_a)
            .cloned()
            .unwrap_or_else(|| system.initial_state());
        let state_b = states
            .get(&battle.model_b)
            .cloned()
            .unwrap_or_else(|| system.initial_state());

        let probs = system.outcome_probs(&state_a, &state_b);
        records.push(PredictionRecord {
            battle_id: battle.battle_id.clone(),
            predicted: decide(&probs, epsilon),
            actual: battle.outcome,
            probs,
            pre_gap: system.rating_gap(&state_a, &state_b),
            in_calibration: index < n_calibration,
        });

        if !runner.skip_update(battle.outcome) {
            let (next_a, next_b) =
                system
                    .update(&state_a, &state_b, battle.outcome)
                    .map_err(|e| {
                        Error::numerical(format!(
                            "update failed at battle {index} ({}): {e}",
                            battle.battle_id
                        ))
                    })?;
            states.insert(battle.model_a.clone(), next_a);
            states.insert(battle.model_b.clone(), next_b);
        }
    }

    Ok(PredictionLog {
        system: system.name().to_string(),
        policy: policy.clone(),
        epsilon,
        records,
    })
}

/// [`replay`] for a runtime-selected system.
pub fn replay_config(
    stream: &BattleStream,
    config: &SystemConfig,
    policy: &TreatmentPolicy,
    epsilon: f64,
    calibration_fraction: f64,
) -> Result<PredictionLog> {
    config.validate()?;
    match config {
        SystemConfig::Elo(c) => replay(stream, c, policy, epsilon, calibration_fraction),
        SystemConfig::Glicko2(c) => replay(stream, c, policy, epsilon, calibration_fraction),
        SystemConfig::BradleyTerry(c) => replay(stream, c, policy, epsilon, calibration_fraction),
        SystemConfig::Trueskill(c) => replay(stream, c, policy, epsilon, calibration_fraction),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Battle;
    use crate::rating::EloConfig;

    fn model(id: &str) -> ModelId {
        ModelId::new(id).unwrap()
    }

    fn battle(id: &str, t: i64, a: &str, b: &str, outcome: Outcome) -> Battle {
        Battle::new(id, t, model(a), model(b), outcome, None).unwrap()
    }

    fn two_battle_stream(first: Outcome) -> BattleStream {
        BattleStream::new(vec![
            battle("b1", 0, "x", "y", first),
            battle("b2", 1, "x", "y", Outcome::WinA),
        ])
        .unwrap()
    }

    #[test]
    fn decide_margin_rule() {
        let probs = OutcomeProbs::decisive(0.55);
        assert_eq!(decide(&probs, 0.15), Outcome::Draw);
        let probs = OutcomeProbs::decisive(0.70);
        assert_eq!(decide(&probs, 0.25), Outcome::WinA);
        let probs = OutcomeProbs::decisive(0.30);
        assert_eq!(decide(&probs, 0.25), Outcome::WinB);
    }

    #[test]
    fn decide_native_draw_argmax() {
        let probs = OutcomeProbs::new(0.30, 0.45, 0.25).unwrap();
        assert_eq!(decide(&probs, 0.0), Outcome::Draw);
        let probs = OutcomeProbs::new(0.4, 0.2, 0.4).unwrap();
        assert_eq!(decide(&probs, 0.0), Outcome::WinA);
    }

    #[test]
    fn second_prediction_reflects_first_update() {
        let stream = two_battle_stream(Outcome::WinA);
        let log = replay(
            &stream,
            &EloConfig::default(),
            &TreatmentPolicy::ApplyAll,
            0.0,
            0.0,
        )
        .unwrap();
        assert_eq!(log.records[0].probs.p_win_a, 0.5);
        assert!(log.records[1].probs.p_win_a > 0.5);
    }

    #[test]
    fn skipping_a_draw_freezes_the_states() {
        let stream = two_battle_stream(Outcome::Draw);
        let log = replay(
            &stream,
            &EloConfig::default(),
            &TreatmentPolicy::SkipDrawUpdates,
            0.0,
            0.0,
        )
        .unwrap();
        assert_eq!(log.records[0].probs, log.records[1].probs);
        assert_eq!(log.records.len(), 2);
    }

    #[test]
    fn omit_rate_boundaries_match_reference_policies() {
        let stream = two_battle_stream(Outcome::WinA);
        let cfg = EloConfig::default();
        let apply = replay(&stream, &cfg, &TreatmentPolicy::ApplyAll, 0.0, 0.0).unwrap();
        let never = replay(
            &stream,
            &cfg,
            &TreatmentPolicy::RandomOmit {
                omit_rate: 0.0,
                seed: 1,
            },
            0.0,
            0.0,
        )
        .unwrap();
        let always = replay(
            &stream,
            &cfg,
            &TreatmentPolicy::RandomOmit {
                omit_rate: 1.0,
                seed: 1,
            },
            0.0,
            0.0,
        )
        .unwrap();
        assert_eq!(apply.records, never.records);
        assert_eq!(always.records[0].probs, always.records[1].probs);
    }

    #[test]
    fn idle_models_keep_their_state() {
        let stream = BattleStream::new(vec![
            battle("b1", 0, "x", "y", Outcome::WinA),
            battle("b2", 1, "p", "q", Outcome::WinB),
        ])
        .unwrap();
        let log = replay(
            &stream,
            &EloConfig::default(),
            &TreatmentPolicy::ApplyAll,
            0.0,
            0.0,
        )
        .unwrap();
        // p and q have never battled, so their prediction is from fresh states.
        assert_eq!(log.records[1].probs.p_win_a, 0.5);
        assert_eq!(log.records[1].pre_gap, 0.0);
    }

    #[test]
    fn calibration_flagging_uses_ceiling() {
        let battles: Vec<Battle> = (0..10)
            .map(|i| battle(&format!("b{i}"), i, "x", "y", Outcome::WinA))
            .collect();
        let stream = BattleStream::new(battles).unwrap();
        let log = replay(
            &stream,
            &EloConfig::default(),
            &TreatmentPolicy::ApplyAll,
            0.0,
            0.05,
        )
        .unwrap();
        let flagged = log.records.iter().filter(|r| r.in_calibration).count();
        assert_eq!(flagged, 1); // ceil(0.5)
        assert!(log.records[0].in_calibration);
        assert_eq!(log.validation_records().count(), 9);
    }

    #[test]
    fn empty_stream_rejected() {
        let stream = BattleStream::new(vec![]).unwrap();
        assert!(replay(
            &stream,
            &EloConfig::default(),
            &TreatmentPolicy::ApplyAll,
            0.0,
            0.0
        )
        .is_err());
    }

    #[test]
    fn truncated_replay_is_a_prefix_of_the_full_log() {
        let battles: Vec<Battle> = (0..20)
            .map(|i| {
                let outcome = match i % 3 {
                    0 => Outcome::WinA,
                    1 => Outcome::Draw,
                    _ => Outcome::WinB,
                };
                battle(&format!("b{i}"), i, "x", "y", outcome)
            })
            .collect();
        let full_stream = BattleStream::new(battles).unwrap();
        let cfg = EloConfig::default();
        let full = replay(&full_stream, &cfg, &TreatmentPolicy::ApplyAll, 0.1, 0.0).unwrap();
        for k in [1, 7, 13] {
            let partial = replay(
                &full_stream.prefix(k),
                &cfg,
                &TreatmentPolicy::ApplyAll,
                0.1,
                0.0,
            )
            .unwrap();
            assert_eq!(partial.records[..], full.records[..k]);
        }
    }
}
