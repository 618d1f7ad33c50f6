//! Online rating systems and a prequential evaluation harness for
//! arena-style pairwise battles.
//!
//! The crate replays a time-ordered battle stream through Elo, Glicko-2,
//! online Bradley-Terry, or TrueSkill, predicting each outcome before
//! applying (or deliberately skipping) the rating update, and provides the
//! statistical layer — risk ratios, paired significance tests, margin
//! sweeps — for studying what draws actually correlate with.
//!
//! Modules:
//! - [`domain`]: battles, outcomes, streams, annotations.
//! - [`numerics`]: normal functions, truncated-Gaussian corrections, the
//!   volatility root-finder.
//! - [`rating`]: the four rating systems behind one contract.
//! - [`prequential`]: predict-then-update replay, margin calibration,
//!   ablation treatments, trade-off curves.
//! - [`analysis`]: risk ratios with confidence intervals, McNemar's paired
//!   test, annotation and rating-gap binning.
//! - [`data_io`]: battle/annotation ingestion with schema mapping, report
//!   serialization, and a generic HTTP annotation client.
//! - [`simulator`]: a seeded synthetic arena whose ground truth is known, so
//!   the analyses can be checked against configured answers.

pub mod analysis;
pub mod data_io;
pub mod domain;
pub mod error;
pub mod numerics;
pub mod prequential;
pub mod rating;
pub mod simulator;

mod rng;

pub use error::{Error, Result};
