//! Decision-margin calibration on the leading slice of a stream.

use crate::domain::BattleStream;
use crate::error::{Error, Result};
use crate::rating::{RatingSystem, SystemConfig};

use super::policy::TreatmentPolicy;
use super::replay::{calibration_len, decide, replay, replay_config, PredictionLog};

/// The swept margin grid: 0.05 through 0.45 in steps of 0.05, nine values.
pub fn margin_grid() -> Vec<f64> {
    (1..=9).map(|k| f64::from(k) / 20.0).collect()
}

/// Picks the decision margin maximizing overall accuracy on the calibration
/// slice (the first `ceil(calibration_fraction * n)` battles), replayed with
/// every update applied. Ties break toward the smaller margin.
///
/// The returned margin is meant to be reused for every treatment of the same
/// system and stream; tuning it per treatment would bias the comparison.
pub fn calibrate_margin<S: RatingSystem>(
    stream: &BattleStream,
    system: &S,
    calibration_fraction: f64,
) -> Result<f64> {
    let n_cal = calibration_len(calibration_fraction, stream.len());
    if n_cal == 0 {
        return Err(Error::invalid(
            "calibration slice is empty; nothing to tune the margin on",
        ));
    }
    let slice = stream.prefix(n_cal);
    // State evolution does not depend on the margin, so one replay provides
    // the stored distributions for every grid point.
    let log = replay(&slice, system, &TreatmentPolicy::ApplyAll, 0.0, 1.0)?;
    Ok(best_margin(&log))
}

/// [`calibrate_margin`] for a runtime-selected system.
pub fn calibrate_margin_config(
    stream: &BattleStream,
    config: &SystemConfig,
    calibration_fraction: f64,
) -> Result<f64> {
    let n_cal = calibration_len(calibration_fraction, stream.len());
    if n_cal == 0 {
        return Err(Error::invalid(
            "calibration slice is empty; nothing to tune the margin on",
        ));
    }
    let slice = stream.prefix(n_cal);
    let log = replay_config(&slice, config, &TreatmentPolicy::ApplyAll, 0.0, 1.0)?;
    Ok(best_margin(&log))
}

fn best_margin(log: &PredictionLog) -> f64 {
    let grid = margin_grid();
    let mut best_epsilon = grid[0];
    let mut best_correct = 0;
    for (i, epsilon) in grid.into_iter().enumerate() {
        let correct = log
            .records
            .iter()
            .filter(|r| decide(&r.probs, epsilon) == r.actual)
            .count();
        // Strict improvement only, so ties keep the smaller margin.
        if i == 0 || correct > best_correct {
            best_epsilon = epsilon;
            best_correct = correct;
        }
    }
    best_epsilon
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{Battle, ModelId, Outcome};
    use crate::rating::EloConfig;

    #[test]
    fn grid_has_exactly_nine_values() {
        let grid = margin_grid();
        assert_eq!(grid.len(), 9);
        assert_eq!(grid[0], 0.05);
        assert_eq!(grid[8], 0.45);
        for pair in grid.windows(2) {
            assert!((pair[1] - pair[0] - 0.05).abs() < 1e-12);
        }
    }

    #[test]
    fn draw_free_separated_stream_prefers_the_smallest_margin() {
        // One model beats the other every time; any draw band only hurts.
        let a = ModelId::new("strong").unwrap();
        let b = ModelId::new("weak").unwrap();
        let battles: Vec<Battle> = (0..40)
            .map(|i| {
                Battle::new(
                    format!("b{i}"),
                    i,
                    a.clone(),
                    b.clone(),
                    Outcome::WinA,
                    None,
                )
                .unwrap()
            })
            .collect();
        let stream = BattleStream::new(battles).unwrap();
        let eps = calibrate_margin(&stream, &EloConfig::default(), 1.0).unwrap();
        assert_eq!(eps, 0.05);
    }

    #[test]
    fn empty_calibration_slice_is_an_error() {
        let a = ModelId::new("x").unwrap();
        let b = ModelId::new("y").unwrap();
        let stream = BattleStream::new(vec![
            Battle::new("b0", 0, a, b, Outcome::WinA, None).unwrap()
        ])
        .unwrap();
        assert!(calibrate_margin(&stream, &EloConfig::default(), 0.0).is_err());
    }
}
