//! Chronological replay: predict each battle from the ratings as they stand,
//! score the prediction, then apply (or skip) the update.
//!
//! One replay is inherently sequential because every update feeds the next
//! prediction. Distinct replays (margin sweep points, treatments, seeds,
//! systems) are independent; the experiment runner keeps their output order
//! fixed by the declared grid regardless of how they are scheduled.

mod calibrate;
mod experiment;
mod metrics;
mod policy;
mod replay;
mod tradeoff;

pub use calibrate::{calibrate_margin, calibrate_margin_config, margin_grid};
pub use experiment::{
    run_experiment, ExperimentOptions, ExperimentReport, ExperimentRow, TreatmentKind,
};
pub use metrics::{metrics, zero_margin_call, MetricsReport, WlMode};
pub use policy::TreatmentPolicy;
pub use replay::{decide, replay, replay_config, PredictionLog, PredictionRecord};
pub use tradeoff::{curve_dominates, curve_from_log, tradeoff_curve, CurvePoint};
