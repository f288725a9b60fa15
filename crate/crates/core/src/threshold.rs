//! Bisection on the minimum block eigenvalue.
//!
//! PPT thresholds are exact zeros of the map from a family parameter to the
//! minimum eigenvalue over all nontrivial transposition masks, so the root
//! is located on the eigenvalue itself rather than on the boolean verdict.
//! Plain interval halving keeps the search deterministic.

use crate::error::{Error, Result};

/// Result of a bisection run.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ThresholdEstimate {
    /// Midpoint of the final bracket.
    pub value: f64,
    /// Final bracket around the root.
    pub bracket: (f64, f64),
    /// Number of halvings performed.
    pub iterations: u32,
    /// Root function evaluated at the estimate.
    pub residual: f64,
}

/// Bisects `f` on `[lo, hi]` down to a bracket of width `width_tol`.
///
/// `f(lo)` and `f(hi)` must have opposite signs; a zero endpoint counts as
/// positive so that boundary-touching families still bracket.
pub fn bisect_threshold<F>(mut f: F, lo: f64, hi: f64, width_tol: f64) -> Result<ThresholdEstimate>
where
    F: FnMut(f64) -> Result<f64>,
{
    #[allow(clippy::neg_cmp_op_on_partial_ord)] // NaN endpoints must be rejected
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidBracket { lo, hi });
    }
    let f_lo = f(lo)?;
    let f_hi = f(hi)?;
    let positive = |x: f64| x >= 0.0;
    if positive(f_lo) == positive(f_hi) {
        return Err(Error::NoSignChange { lo, hi, f_lo, f_hi });
    }
    let lo_positive = positive(f_lo);
    let (mut a, mut b) = (lo, hi);
    let mut iterations = 0;
    while b - a > width_tol && iterations < 200 {
        let mid = 0.5 * (a + b);
        let f_mid = f(mid)?;
        if positive(f_mid) == lo_positive {
            a = mid;
        } else {
            b = mid;
        }
        iterations += 1;
    }
    let value = 0.5 * (a + b);
    let residual = f(value)?;
    Ok(ThresholdEstimate {
        value,
        bracket: (a, b),
        iterations,
        residual,
    })
}
