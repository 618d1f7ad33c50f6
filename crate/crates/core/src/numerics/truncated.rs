//! Mean and variance corrections for a standard normal truncated by a win
//! or a draw condition, as used by Bayesian skill updates.

use crate::error::{Error, Result};

use super::normal::{cdf_raw, pdf_raw};

/// Arguments beyond this depth in the losing tail switch to the asymptotic
/// forms instead of evaluating pdf/cdf ratios.
const TAIL_GUARD: f64 = -30.0;

/// Mean (`v`) and variance (`w`) corrections of a truncated standard normal.
///
/// `w` lies strictly inside (0, 1) for all finite inputs; the posterior
/// variance factor `1 - k*w` therefore always shrinks.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TruncatedMoments {
    pub v: f64,
    pub w: f64,
}

/// Corrections for a decisive outcome: the performance difference is
/// conditioned on exceeding the margin, i.e. truncated to `(alpha - t, inf)`
/// around the scaled mean difference `t`.
pub fn truncated_moments_win(t: f64, alpha: f64) -> Result<TruncatedMoments> {
    if !t.is_finite() || !alpha.is_finite() {
        return Err(Error::invalid(format!(
            "truncated moments require finite inputs (t={t}, alpha={alpha})"
        )));
    }
    let x = t - alpha;
    if x <= TAIL_GUARD {
        // Deep losing tail: pdf/cdf would approach 0/0. The exact ratio
        // tends to -x with the variance correction tending to 1 - 1/x^2.
        return Ok(TruncatedMoments {
            v: -x,
            w: 1.0 - 1.0 / (x * x),
        });
    }
    let denom = cdf_raw(x);
    let v = pdf_raw(x) / denom;
    let w = v * (v + x);
    Ok(TruncatedMoments {
        v: v.max(f64::MIN_POSITIVE),
        w: w.clamp(f64::MIN_POSITIVE, 1.0 - 1e-16),
    })
}

/// Corrections for a draw: the performance difference is conditioned on
/// staying within the margin, i.e. truncated to `(-alpha - t, alpha - t)`.
///
/// Fails when the draw band has no numeric mass (the caller must widen the
/// margin or treat the outcome as decisive).
pub fn truncated_moments_draw(t: f64, alpha: f64) -> Result<TruncatedMoments> {
    if !t.is_finite() || !alpha.is_finite() || alpha < 0.0 {
        return Err(Error::invalid(format!(
            "draw moments require finite inputs and alpha >= 0 (t={t}, alpha={alpha})"
        )));
    }
    // Evaluate at |t| and reflect the sign afterwards, so the odd symmetry
    // of v (and evenness of w) holds exactly instead of up to cancellation.
    let t_abs = t.abs();
    let hi = alpha - t_abs;
    let lo = -alpha - t_abs;
    let d = cdf_raw(hi) - cdf_raw(lo);
    if d <= 0.0 || d.is_nan() {
        return Err(Error::numerical(format!(
            "draw region has no probability mass (t={t}, alpha={alpha}); \
             widen the draw margin or treat the outcome as decisive"
        )));
    }
    let v_abs = (pdf_raw(lo) - pdf_raw(hi)) / d;
    let w = v_abs * v_abs + (hi * pdf_raw(hi) + (alpha + t_abs) * pdf_raw(lo)) / d;
    Ok(TruncatedMoments {
        v: if t < 0.0 { -v_abs } else { v_abs },
        w: w.clamp(f64::MIN_POSITIVE, 1.0 - 1e-16),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn win_at_zero_margin_parity() {
        // Closed form: v = pdf(0)/cdf(0) = sqrt(2/pi), w = v^2 = 2/pi.
        let m = truncated_moments_win(0.0, 0.0).unwrap();
        assert!((m.v - 0.7978846).abs() < 1e-7);
        assert!((m.w - std::f64::consts::FRAC_2_PI).abs() < 1e-9);
    }

    #[test]
    fn win_vanishes_for_expected_winner() {
        let m = truncated_moments_win(5.0, 0.0).unwrap();
        assert!((m.v - 1.48672e-6).abs() < 1e-10);
        assert!((m.w - 7.4336e-6).abs() < 1e-9);
    }

    #[test]
    fn win_tail_guard_uses_asymptote() {
        let m = truncated_moments_win(-30.0, 0.0).unwrap();
        assert!((m.v - 30.0).abs() < 1e-3);
        assert!(m.w > 0.0 && m.w < 1.0);
        // Guard triggered via a margin rather than the mean.
        let m2 = truncated_moments_win(0.0, 30.0).unwrap();
        assert!((m2.v - 30.0).abs() < 1e-3);
    }

    #[test]
    fn win_v_decreasing_in_t() {
        let mut prev = f64::INFINITY;
        for i in -40..=40 {
            let t = i as f64 * 0.25;
            let m = truncated_moments_win(t, 0.5).unwrap();
            assert!(m.v < prev, "v must decrease in t (t={t})");
            assert!(m.w > 0.0 && m.w < 1.0);
            prev = m.v;
        }
    }

    #[test]
    fn draw_is_odd_in_t() {
        let m0 = truncated_moments_draw(0.0, 0.8).unwrap();
        assert_eq!(m0.v, 0.0);
        for i in 1..=20 {
            let t = i as f64 * 0.3;
            let pos = truncated_moments_draw(t, 1.0).unwrap();
            let neg = truncated_moments_draw(-t, 1.0).unwrap();
            assert!((pos.v + neg.v).abs() < 1e-12 * (1.0 + pos.v.abs()));
            assert!((pos.w - neg.w).abs() < 1e-12 * (1.0 + pos.w.abs()));
            assert!(pos.w > 0.0 && pos.w < 1.0);
        }
    }

    #[test]
    fn draw_known_value() {
        // Closed-form evaluation; cross-checked by the Monte-Carlo oracle in
        // tests/numerics_oracles.rs.
        let m = truncated_moments_draw(0.5, 1.0).unwrap();
        assert!((m.v - (-0.3562729)).abs() < 1e-6);
        assert!(m.w > 0.0 && m.w < 1.0);
    }

    #[test]
    fn draw_rejects_empty_band() {
        assert!(truncated_moments_draw(0.0, 0.0).is_err());
        assert!(truncated_moments_draw(45.0, 1e-3).is_err());
    }
}
