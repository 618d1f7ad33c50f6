//! Bracketed root-finder for the rating-volatility equation.
//!
//! Solves for the new volatility given the squared surprise `delta_sq`, the
//! squared deviation `phi_sq`, the estimation variance `v`, the current
//! volatility `sigma`, and the change constraint `tau`, using the Illinois
//! variant of regula falsi on `x = ln(sigma'^2)` with the reference
//! bracketing initialization.

use crate::error::{Error, Result};

const CONVERGENCE_TOLERANCE: f64 = 1e-6;
const RESIDUAL_TOLERANCE: f64 = 1e-6;
const MAX_ITERATIONS: usize = 100;

pub fn solve_volatility(delta_sq: f64, phi_sq: f64, v: f64, sigma: f64, tau: f64) -> Result<f64> {
    for (name, value) in [
        ("delta_sq", delta_sq),
        ("phi_sq", phi_sq),
        ("v", v),
        ("sigma", sigma),
        ("tau", tau),
    ] {
        if !value.is_finite() {
            return Err(Error::invalid(format!(
                "volatility solve requires finite inputs ({name} = {value})"
            )));
        }
    }
    if delta_sq < 0.0 || phi_sq <= 0.0 || v <= 0.0 || sigma <= 0.0 || tau <= 0.0 {
        return Err(Error::invalid(
            "volatility solve requires delta_sq >= 0 and positive phi_sq, v, sigma, tau"
                .to_string(),
        ));
    }

    let ln_sigma_sq = (sigma * sigma).ln();
    let f = |x: f64| -> f64 {
        let ex = x.exp();
        let num = ex * (delta_sq - phi_sq - v - ex);
        let den = 2.0 * (phi_sq + v + ex) * (phi_sq + v + ex);
        num / den - (x - ln_sigma_sq) / (tau * tau)
    };

    // Bracket the root: the upper end is the current volatility; the lower
    // end either comes from the surprise term or from stepping down by tau.
    let mut a = ln_sigma_sq;
    let mut b = if delta_sq > phi_sq + v {
        (delta_sq - phi_sq - v).ln()
    } else {
        let mut k = 1.0;
        while f(ln_sigma_sq - k * tau) < 0.0 {
            k += 1.0;
            if k > 1_000.0 {
                return Err(Error::numerical(
                    "volatility bracket search exceeded 1000 steps".to_string(),
                ));
            }
        }
        ln_sigma_sq - k * tau
    };

    let mut fa = f(a);
    let mut fb = f(b);
    let mut iterations = 0;
    while (b - a).abs() > CONVERGENCE_TOLERANCE {
        iterations += 1;
        if iterations > MAX_ITERATIONS {
            return Err(Error::numerical(format!(
                "volatility iteration did not converge within {MAX_ITERATIONS} steps"
            )));
        }
        let c = a + (a - b) * fa / (fb - fa);
        let fc = f(c);
        if fc * fb <= 0.0 {
            a = b;
            fa = fb;
        } else {
            // Illinois step: halve the retained endpoint's value to avoid
            // stalling on one side.
            fa /= 2.0;
        }
        b = c;
        fb = fc;
    }

    // Polish with plain secant until the residual itself is below tolerance
    // (the bracket criterion alone leaves residuals of slope * tolerance).
    let mut x0 = a;
    let mut f0 = f(a);
    let mut x1 = b;
    let mut f1 = fb;
    if f0.abs() < f1.abs() {
        std::mem::swap(&mut x0, &mut x1);
        std::mem::swap(&mut f0, &mut f1);
    }
    while f1.abs() > RESIDUAL_TOLERANCE {
        iterations += 1;
        if iterations > MAX_ITERATIONS || f1 == f0 {
            return Err(Error::numerical(format!(
                "volatility residual did not converge within {MAX_ITERATIONS} steps"
            )));
        }
        let x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = f(x2);
    }

    Ok((x1 / 2.0).exp())
}
