//! Mixing coefficients of the moving quasi-particle.
//!
//! With the spin operator replaced by its magnitude `P`, each conjugate pair
//! of spinor equations becomes a 2x2 real system:
//!
//! ```text
//! (E - E0) L  - P K  = 0      (E + E0) K  - P L  = 0
//! (E - E0) K1 + P L1 = 0      (E + E0) L1 + P K1 = 0
//! ```
//!
//! Both have determinant `E^2 - E0^2 - P^2`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    Electron,
    Positron,
}

impl Branch {
    /// `+sqrt(E0^2 + P^2)` or its negative.
    pub fn energy(self, p: f64, e0: f64) -> f64 {
        let e = e0.hypot(p);
        match self {
            Branch::Electron => e,
            Branch::Positron => -e,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DispersionCoefficients {
    #[serde(rename = "P")]
    pub p: f64,
    pub branch: Branch,
    #[serde(rename = "E")]
    pub e: f64,
    #[serde(rename = "E0")]
    pub e0: f64,
    #[serde(rename = "L")]
    pub l: f64,
    #[serde(rename = "K")]
    pub k: f64,
    #[serde(rename = "L1")]
    pub l1: f64,
    #[serde(rename = "K1")]
    pub k1: f64,
}

fn check(p: f64, e0: f64) -> Result<()> {
    if !(p >= 0.0) || !p.is_finite() {
        return Err(Error::NegativeMomentum(p));
    }
    if !(e0 > 0.0) {
        return Err(Error::InvalidParameter { name: "E0", value: e0 });
    }
    Ok(())
}

/// On-shell coefficients for the branch.
pub fn coefficients(p: f64, e0: f64, branch: Branch) -> Result<DispersionCoefficients> {
    check(p, e0)?;
    let e = branch.energy(p, e0);
    // E - E0 rewritten without cancellation; its ratio to P stays finite at rest.
    let (l, k) = match branch {
        Branch::Electron => {
            let r = p / (e + e0);
            let n = 1.0 / (1.0 + r * r).sqrt();
            (n, r * n)
        }
        Branch::Positron => {
            let d = e - e0;
            let n = p.hypot(d);
            (p / n, d / n)
        }
    };
    Ok(build(p, e0, e, branch, l, k))
}

/// Coefficients from the normalization formulas at an arbitrary energy `e`.
/// Off shell the linear system is no longer satisfied.
pub fn coefficients_at_energy(p: f64, e0: f64, e: f64, branch: Branch) -> Result<DispersionCoefficients> {
    check(p, e0)?;
    let d = e - e0;
    let n = p.hypot(d);
    let (l, k) = if n == 0.0 { (1.0, 0.0) } else { (p / n, d / n) };
    Ok(build(p, e0, e, branch, l, k))
}

fn build(p: f64, e0: f64, e: f64, branch: Branch, l: f64, k: f64) -> DispersionCoefficients {
    DispersionCoefficients { p, branch, e, e0, l, k, l1: -k, k1: l }
}

/// Largest absolute defect over both pairs of equations.
pub fn residual(c: &DispersionCoefficients) -> f64 {
    let (p, e, e0) = (c.p, c.e, c.e0);
    [(e - e0) * c.l - p * c.k, (e + e0) * c.k - p * c.l, (e - e0) * c.k1 + p * c.l1, (e + e0) * c.l1 + p * c.k1].iter().fold(0.0f64, |m, d| m.max(d.abs()))
}

/// Determinant of either pair's coefficient matrix.
pub fn determinant(e: f64, p: f64, e0: f64) -> f64 {
    (e - e0) * (e + e0) - p * p
}
