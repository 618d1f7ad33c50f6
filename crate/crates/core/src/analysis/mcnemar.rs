//! One-sided McNemar paired test over two prediction logs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::cdf_raw;
use crate::prequential::{PredictionLog, PredictionRecord};

/// Discordant many pairs are needed before the exact binomial tail gives way
/// to the normal approximation.
const EXACT_LIMIT: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct McNemarResult {
    /// Battles the first log got right and the second got wrong.
    pub b: usize,
    /// Battles the second log got right and the first got wrong.
    pub c: usize,
    /// One-sided p-value for the first log being better than the second.
    pub p_one_sided: f64,
}

/// Paired test over two full logs covering the same battles in the same
/// order.
pub fn mcnemar_one_sided(log_a: &PredictionLog, log_b: &PredictionLog) -> Result<McNemarResult> {
    let a: Vec<&PredictionRecord> = log_a.records.iter().collect();
    let b: Vec<&PredictionRecord> = log_b.records.iter().collect();
    mcnemar_from_records(&a, &b)
}

/// Paired test over matched record slices (same battles, same order).
pub fn mcnemar_from_records(
    records_a: &[&PredictionRecord],
    records_b: &[&PredictionRecord],
) -> Result<McNemarResult> {
    if records_a.len() != records_b.len() {
        return Err(Error::invalid(format!(
            "logs cover different numbers of battles ({} vs {})",
            records_a.len(),
            records_b.len()
        )));
    }
    let mut b = 0usize;
    let mut c = 0usize;
    for (ra, rb) in records_a.iter().zip(records_b) {
        if ra.battle_id != rb.battle_id {
            return Err(Error::invalid(format!(
                "logs cover different battles ({} vs {})",
                ra.battle_id, rb.battle_id
            )));
        }
        match (ra.correct(), rb.correct()) {
            (true, false) => b += 1,
            (false, true) => c += 1,
            _ => {}
        }
    }
    Ok(McNemarResult {
        b,
        c,
        p_one_sided: mcnemar_p_value(b, c),
    })
}

/// One-sided p-value from the discordant-pair counts alone: the exact
/// binomial tail for up to 1000 discordant pairs, the continuity-corrected
/// normal approximation beyond.
pub fn mcnemar_p_value(b: usize, c: usize) -> f64 {
    let n = b + c;
    if n == 0 {
        return 1.0;
    }
    if n <= EXACT_LIMIT {
        exact_tail(b, n)
    } else {
        normal_tail(b, n)
    }
}

/// Exact binomial tail `P(X >= b)` for `X ~ Binomial(n, 1/2)`.
pub(crate) fn exact_tail(b: usize, n: usize) -> f64 {
    // Log-factorial table keeps the terms stable out to n = 1000.
    let mut ln_fact = vec![0.0f64; n + 1];
    for i in 1..=n {
        ln_fact[i] = ln_fact[i - 1] + (i as f64).ln();
    }
    let ln_half_n = n as f64 * std::f64::consts::LN_2;
    let mut p = 0.0;
    for k in b..=n {
        p += (ln_fact[n] - ln_fact[k] - ln_fact[n - k] - ln_half_n).exp();
    }
    p.min(1.0)
}

/// Normal approximation with continuity correction.
pub(crate) fn normal_tail(b: usize, n: usize) -> f64 {
    let z = (b as f64 - n as f64 / 2.0 - 0.5) / (n as f64 / 4.0).sqrt();
    1.0 - cdf_raw(z)
}
