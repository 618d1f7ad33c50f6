//! Draw-recall versus win-loss-accuracy trade-off curves over a margin grid.

use serde::{Deserialize, Serialize};

use crate::domain::BattleStream;
use crate::error::{Error, Result};
use crate::rating::SystemConfig;

use super::policy::TreatmentPolicy;
use super::replay::{decide, replay_config, PredictionLog, PredictionRecord};

/// One operating point: at margin `epsilon`, the recall on actual draws and
/// the strict accuracy on decisive battles (a predicted draw on a decisive
/// battle counts as wrong, so widening the band trades one for the other).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub epsilon: f64,
    pub draw_acc: Option<f64>,
    pub wl_acc: Option<f64>,
}

/// Replays the stream once per grid point and reports the trade-off curve on
/// validation records.
///
/// State evolution is margin-independent, so the replays share one pass and
/// differ only in the decision applied to the stored distributions.
pub fn tradeoff_curve(
    stream: &BattleStream,
    config: &SystemConfig,
    policy: &TreatmentPolicy,
    epsilon_grid: &[f64],
    calibration_fraction: f64,
) -> Result<Vec<CurvePoint>> {
    if epsilon_grid.is_empty() {
        return Err(Error::invalid("the margin grid must be non-empty"));
    }
    let log = replay_config(stream, config, policy, 0.0, calibration_fraction)?;
    Ok(curve_from_log(&log, epsilon_grid, true))
}

/// Builds the curve from an existing log by re-deciding each record at every
/// grid margin.
pub fn curve_from_log(
    log: &PredictionLog,
    epsilon_grid: &[f64],
    validation_only: bool,
) -> Vec<CurvePoint> {
    let records: Vec<&PredictionRecord> = if validation_only {
        log.validation_records().collect()
    } else {
        log.records.iter().collect()
    };
    epsilon_grid
        .iter()
        .map(|&epsilon| {
            let mut draws = 0usize;
            let mut draws_caught = 0usize;
            let mut decisive = 0usize;
            let mut decisive_right = 0usize;
            for record in &records {
                let predicted = decide(&record.probs, epsilon);
                if record.actual.is_draw() {
                    draws += 1;
                    if predicted.is_draw() {
                        draws_caught += 1;
                    }
                } else {
                    decisive += 1;
                    if predicted == record.actual {
                        decisive_right += 1;
                    }
                }
            }
            CurvePoint {
                epsilon,
                draw_acc: (draws > 0).then(|| draws_caught as f64 / draws as f64),
                wl_acc: (decisive > 0).then(|| decisive_right as f64 / decisive as f64),
            }
        })
        .collect()
}

/// True when `upper` offers at least the draw recall of `lower` at every
/// comparable win-loss accuracy: each point of `lower` whose accuracy falls
/// inside `upper`'s swept accuracy range must be weakly dominated by the
/// (linearly interpolated) `upper` curve.
///
/// A `lower` point above `upper`'s best accuracy is a failure (`upper`
/// cannot match it at all). A point below `upper`'s swept range counts only
/// when `upper`'s widest-margin endpoint beats it outright; otherwise the
/// truncated sweep has no operating point to compare against and the point
/// is ignored. At least one point must actually be dominated.
pub fn curve_dominates(upper: &[CurvePoint], lower: &[CurvePoint]) -> bool {
    const TOL: f64 = 1e-12;
    let upper_points: Vec<(f64, f64)> = upper
        .iter()
        .filter_map(|p| Some((p.wl_acc?, p.draw_acc?)))
        .collect();
    if upper_points.is_empty() {
        return false;
    }
    let max_wl = upper_points
        .iter()
        .map(|p| p.0)
        .fold(f64::NEG_INFINITY, f64::max);
    let min_wl = upper_points
        .iter()
        .map(|p| p.0)
        .fold(f64::INFINITY, f64::min);
    let widest_draw = upper_points
        .iter()
        .filter(|p| p.0 <= min_wl + TOL)
        .map(|p| p.1)
        .fold(f64::NEG_INFINITY, f64::max);

    let mut any_dominated = false;
    for (wl, draw) in lower.iter().filter_map(|p| Some((p.wl_acc?, p.draw_acc?))) {
        if wl > max_wl + TOL {
            return false;
        }
        if wl >= min_wl - TOL {
            if best_draw_at_wl(&upper_points, wl) >= draw - TOL {
                any_dominated = true;
            } else {
                return false;
            }
        } else if widest_draw >= draw - TOL {
            any_dominated = true;
        }
    }
    any_dominated
}

/// The best draw recall `upper` can offer at win-loss accuracy >= `wl`,
/// linearly interpolated along the curve.
fn best_draw_at_wl(points: &[(f64, f64)], wl: f64) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for &(w, d) in points {
        if w >= wl {
            best = best.max(d);
        }
    }
    for pair in points.windows(2) {
        let (w0, d0) = pair[0];
        let (w1, d1) = pair[1];
        if (w0 - wl) * (w1 - wl) < 0.0 {
            // Segment crosses the query accuracy; interpolate.
            let t = (wl - w0) / (w1 - w0);
            best = best.max(d0 + t * (d1 - d0));
        }
    }
    best
}
