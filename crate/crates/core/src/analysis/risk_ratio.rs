//! Risk ratio of an event between an exposed and an unexposed group, with
//! the standard log-method confidence interval.

use serde::{Deserialize, Serialize};

/// z for a two-sided 95% interval.
const Z_95: f64 = 1.959964;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupCounts {
    /// Event (draw) count in the group.
    pub draws: usize,
    pub total: usize,
}

/// Point estimate and 95% interval for the ratio of draw risks.
///
/// `rr` is absent when a denominator is zero (empty group, or no draws among
/// the unexposed); the interval additionally requires every cell of the
/// implied 2x2 table to be non-zero.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RiskRatioResult {
    pub rr: Option<f64>,
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
    pub exposed: GroupCounts,
    pub unexposed: GroupCounts,
}

impl RiskRatioResult {
    /// True when the interval exists and contains `value`.
    pub fn ci_covers(&self, value: f64) -> bool {
        match (self.ci_low, self.ci_high) {
            (Some(low), Some(high)) => low <= value && value <= high,
            _ => false,
        }
    }
}

/// `(exposed_draws / exposed_total) / (unexposed_draws / unexposed_total)`
/// with the Katz log-method 95% interval.
pub fn risk_ratio(
    exposed_draws: usize,
    exposed_total: usize,
    unexposed_draws: usize,
    unexposed_total: usize,
) -> RiskRatioResult {
    let exposed = GroupCounts {
        draws: exposed_draws,
        total: exposed_total,
    };
    let unexposed = GroupCounts {
        draws: unexposed_draws,
        total: unexposed_total,
    };

    let rr = if exposed_total == 0 || unexposed_total == 0 || unexposed_draws == 0 {
        None
    } else {
        Some(
            (exposed_draws as f64 / exposed_total as f64)
                / (unexposed_draws as f64 / unexposed_total as f64),
        )
    };

    // The log-method standard error needs every cell of the 2x2 table.
    let cells_ok = exposed_draws > 0
        && unexposed_draws > 0
        && exposed_draws < exposed_total
        && unexposed_draws < unexposed_total;
    let (ci_low, ci_high) = match (rr, cells_ok) {
        (Some(rr), true) => {
            let se = (1.0 / exposed_draws as f64 - 1.0 / exposed_total as f64
                + 1.0 / unexposed_draws as f64
                - 1.0 / unexposed_total as f64)
                .sqrt();
            let log_rr = rr.ln();
            (
                Some((log_rr - Z_95 * se).exp()),
                Some((log_rr + Z_95 * se).exp()),
            )
        }
        _ => (None, None),
    };

    RiskRatioResult {
        rr,
        ci_low,
        ci_high,
        exposed,
        unexposed,
    }
}
