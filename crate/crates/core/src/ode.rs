//! Dormand–Prince 5(4) stepping for the two-component radial system.

use crate::error::{Error, Result};

pub(crate) type State = [f64; 2];

/// Amplitudes above this are treated as a runaway solution.
pub(crate) const OVERFLOW: f64 = 1.0e150;

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;

const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;

// Fifth-order minus embedded fourth-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[inline]
fn axpy(y: &State, terms: &[(f64, &State)], h: f64) -> State {
    let mut out = *y;
    for (c, k) in terms {
        out[0] += h * c * k[0];
        out[1] += h * c * k[1];
    }
    out
}

/// Advances `y` from `x0` to `x1` (either direction) with error-controlled
/// substeps. `h_hint` carries the last accepted step size between calls.
pub(crate) fn advance<F>(f: &F, x0: f64, x1: f64, y: State, rtol: f64, h_hint: &mut f64) -> Result<State>
where
    F: Fn(f64, &State) -> State,
{
    let span = x1 - x0;
    let dir = span.signum();
    let mut x = x0;
    let mut y = y;
    let mut h = h_hint.abs().min(span.abs()).max(span.abs() * 1e-6) * dir;
    let mut k1 = f(x, &y);
    let mut last_accepted = h.abs();
    loop {
        let remaining = x1 - x;
        if remaining.abs() <= 1e-14 * x1.abs().max(1.0) {
            break;
        }
        if h.abs() >= remaining.abs() {
            h = remaining;
        }
        let k2 = f(x + C2 * h, &axpy(&y, &[(A21, &k1)], h));
        let k3 = f(x + C3 * h, &axpy(&y, &[(A31, &k1), (A32, &k2)], h));
        let k4 = f(x + C4 * h, &axpy(&y, &[(A41, &k1), (A42, &k2), (A43, &k3)], h));
        let k5 = f(x + C5 * h, &axpy(&y, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)], h));
        let k6 = f(x + h, &axpy(&y, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)], h));
        let y_new = axpy(&y, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)], h);
        let k7 = f(x + h, &y_new);

        let scale = rtol * y[0].abs().max(y[1].abs()).max(y_new[0].abs()).max(y_new[1].abs()).max(1e-300);
        let mut err = 0.0f64;
        for c in 0..2 {
            let e = h * (E1 * k1[c] + E3 * k3[c] + E4 * k4[c] + E5 * k5[c] + E6 * k6[c] + E7 * k7[c]);
            err = err.max(e.abs() / scale);
        }
        if !err.is_finite() {
            return Err(Error::Overflow { x });
        }
        if err <= 1.0 {
            x += h;
            y = y_new;
            k1 = k7;
            last_accepted = h.abs();
            if y[0].abs().max(y[1].abs()) > OVERFLOW {
                return Err(Error::Overflow { x });
            }
            let grow = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h *= grow;
        } else {
            h *= (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
            if h.abs() < 1e-14 * x.abs().max(1e-300) {
                return Err(Error::Overflow { x });
            }
        }
    }
    *h_hint = last_accepted;
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotation_is_integrated_accurately() {
        // u' = v, v' = -u from (0, 1): u = sin x.
        let f = |_x: f64, y: &State| [y[1], -y[0]];
        let mut h = 0.1;
        let y = advance(&f, 0.0, 10.0, [0.0, 1.0], 1e-12, &mut h).unwrap();
        assert!((y[0] - 10f64.sin()).abs() < 1e-9);
        let back = advance(&f, 10.0, 0.0, y, 1e-12, &mut h).unwrap();
        assert!((back[0]).abs() < 1e-9 && (back[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn runaway_growth_is_reported() {
        let f = |_x: f64, y: &State| [400.0 * y[0], 0.0];
        let mut h = 0.1;
        assert!(matches!(advance(&f, 0.0, 2.0, [1.0, 0.0], 1e-10, &mut h), Err(Error::Overflow { .. })));
    }
}
