//! Bracketed scalar root refinement.

use crate::error::Result;

/// Bisection until the bracket is narrower than `coarse`, then secant steps
/// kept inside the bracket until the update drops below `fine`.
pub(crate) fn bisect_then_secant<F>(mut f: F, mut lo: f64, mut hi: f64, mut f_lo: f64, mut f_hi: f64, coarse: f64, fine: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    debug_assert!(f_lo * f_hi <= 0.0);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    while (hi - lo).abs() > coarse {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid)?;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
            f_hi = f_mid;
        }
    }
    // Secant from the bracket ends; a step leaving the bracket falls back to bisection.
    let (mut x0, mut f0, mut x1, mut f1) = (lo, f_lo, hi, f_hi);
    for _ in 0..100 {
        let mut next = x1 - f1 * (x1 - x0) / (f1 - f0);
        let (a, b) = (lo.min(hi), lo.max(hi));
        if !next.is_finite() || next <= a || next >= b {
            next = 0.5 * (lo + hi);
        }
        let f_next = f(next)?;
        if f_next == 0.0 {
            return Ok(next);
        }
        if f_next.signum() == f_lo.signum() {
            lo = next;
            f_lo = f_next;
        } else {
            hi = next;
        }
        let step = (next - x1).abs();
        x0 = x1;
        f0 = f1;
        x1 = next;
        f1 = f_next;
        if step <= fine * x1.abs().max(1.0) || (hi - lo).abs() <= fine * x1.abs().max(1.0) {
            return Ok(x1);
        }
    }
    Ok(x1)
}
