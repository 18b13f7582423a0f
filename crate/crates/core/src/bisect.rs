//! Sign-bracket bisection shared by the moduli solvers.

use crate::error::{Error, Result};

/// Iteration cap for every bisection in the crate.
pub const MAX_ITERATIONS: usize = 200;

/// Finds a zero of `f` in `[lo, hi]`, given that `f(lo)` and `f(hi)` have
/// opposite signs (a zero at either end is accepted as is).
///
/// Halves the bracket until it stops shrinking in floating point, or until
/// `|f(mid)| <= f_tol / 16`. The returned point always satisfies
/// `|f(x)| < f_tol`, otherwise `ConvergenceFailure` is reported.
pub fn bisect<F>(mut f: F, mut lo: f64, mut hi: f64, f_tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() || !f_lo.is_finite() || !f_hi.is_finite() {
        return Err(Error::ConvergenceFailure(format!(
            "no sign change on [{lo}, {hi}]: f = {f_lo}, {f_hi}"
        )));
    }
    let (mut best_x, mut best_f) = if f_lo.abs() < f_hi.abs() {
        (lo, f_lo)
    } else {
        (hi, f_hi)
    };
    for _ in 0..MAX_ITERATIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid.abs() < best_f.abs() {
            best_x = mid;
            best_f = f_mid;
        }
        if f_mid == 0.0 || f_mid.abs() <= f_tol / 16.0 {
            break;
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    if best_f.abs() < f_tol {
        Ok(best_x)
    } else {
        Err(Error::ConvergenceFailure(format!(
            "bisection stalled at x = {best_x} with |f| = {:e}",
            best_f.abs()
        )))
    }
}
