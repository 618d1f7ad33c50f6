//! Statistical layer: McNemar's paired test, risk ratios with confidence
//! intervals, and the annotation/rating-gap binning analyses.
//!
//! Everything operates on immutable logs and counts; all functions are pure.

mod binning;
mod mcnemar;
mod risk_ratio;

pub use binning::{
    rr_by_annotation, rr_by_gap_pairs, rr_by_rating_gap, AnnotationBinRr, AnnotationField,
    GapBinRr, GapRrReport,
};
pub use mcnemar::{mcnemar_from_records, mcnemar_one_sided, mcnemar_p_value, McNemarResult};
pub use risk_ratio::{risk_ratio, GroupCounts, RiskRatioResult};
