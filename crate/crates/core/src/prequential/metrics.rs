//! Accuracy metrics over a prediction log.

use serde::{Deserialize, Serialize};

use crate::domain::Outcome;
use crate::error::{Error, Result};
use crate::rating::OutcomeProbs;

use super::replay::{PredictionLog, PredictionRecord};

/// How win-loss accuracy treats records whose margin prediction was a draw.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WlMode {
    /// Re-decide every decisive battle with a zero margin, so each one gets
    /// a definite win/loss call (ties go to the first player).
    #[default]
    ZeroMargin,
    /// Keep the margin prediction and count a predicted draw as wrong.
    MarginStrict,
}

/// Accuracy summary. A metric over an empty slice (no decisive battles, no
/// draws) is reported as absent rather than zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    /// Overall prediction accuracy, draws included.
    pub acc: f64,
    /// Accuracy over decisive battles.
    pub wl_acc: Option<f64>,
    /// Recall on actual draws under the margin prediction.
    pub draw_acc: Option<f64>,
    pub n: usize,
    pub n_wl: usize,
    pub n_draw: usize,
}

/// The zero-margin win/loss call for one predicted distribution; exact
/// probability ties go to the first player.
pub fn zero_margin_call(probs: &OutcomeProbs) -> Outcome {
    if probs.p_win_a >= probs.p_loss_a {
        Outcome::WinA
    } else {
        Outcome::WinB
    }
}

/// Computes metrics over a log, optionally restricted to the validation
/// slice (everything after the calibration battles).
pub fn metrics(
    log: &PredictionLog,
    validation_only: bool,
    wl_mode: WlMode,
) -> Result<MetricsReport> {
    let records: Vec<&PredictionRecord> = if validation_only {
        log.validation_records().collect()
    } else {
        log.records.iter().collect()
    };
    if records.is_empty() {
        return Err(Error::invalid(
            "metrics are undefined over an empty record slice",
        ));
    }

    let n = records.len();
    let correct = records.iter().filter(|r| r.correct()).count();

    let decisive: Vec<&&PredictionRecord> =
        records.iter().filter(|r| !r.actual.is_draw()).collect();
    let n_wl = decisive.len();
    let wl_correct = decisive
        .iter()
        .filter(|r| match wl_mode {
            WlMode::ZeroMargin => zero_margin_call(&r.probs) == r.actual,
            WlMode::MarginStrict => r.correct(),
        })
        .count();

    let n_draw = n - n_wl;
    let draw_correct = records
        .iter()
        .filter(|r| r.actual.is_draw() && r.predicted.is_draw())
        .count();

    Ok(MetricsReport {
        acc: correct as f64 / n as f64,
        wl_acc: (n_wl > 0).then(|| wl_correct as f64 / n_wl as f64),
        draw_acc: (n_draw > 0).then(|| draw_correct as f64 / n_draw as f64),
        n,
        n_wl,
        n_draw,
    })
}
