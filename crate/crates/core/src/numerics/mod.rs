//! Scalar numerical primitives: standard-normal functions, truncated-Gaussian
//! moment corrections, and the bracketed root-finder for the rating-volatility
//! equation.
//!
//! Everything here is a pure function; all operations are safe for arbitrary
//! parallel use.

// The erfc coefficients are transcribed verbatim from the reference
// implementation, beyond f64 precision.
#[allow(clippy::excessive_precision)]
mod normal;
mod truncated;
mod volatility;

pub use normal::{std_normal_cdf, std_normal_inv_cdf, std_normal_pdf};
pub use truncated::{truncated_moments_draw, truncated_moments_win, TruncatedMoments};
pub use volatility::solve_volatility;

pub(crate) use normal::{cdf_raw, inv_cdf_raw};
