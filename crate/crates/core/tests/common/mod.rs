#![allow(dead_code)]

use std::sync::OnceLock;

use nalgebra::{DMatrix, SymmetricEigen};
use selfloc::dirac::PotentialProfile;
use selfloc::grid::RadialGrid;
use selfloc::scf::{scf_solve, ScfConfig, ScfSolution};

/// Default-config solution shared by all tests in one binary.
pub fn default_solution() -> &'static ScfSolution {
    static SOLUTION: OnceLock<ScfSolution> = OnceLock::new();
    SOLUTION.get_or_init(|| scf_solve(&ScfConfig::default()).expect("default solve"))
}

/// Sine integral from its power series or the large-argument asymptotics.
pub fn si(x: f64) -> f64 {
    if x < 20.0 {
        let mut term = x;
        let mut sum = x;
        for k in 1..200 {
            term *= -x * x / ((2 * k) as f64 * (2 * k + 1) as f64);
            sum += term / (2 * k + 1) as f64;
            if term.abs() < 1e-20 {
                break;
            }
        }
        sum
    } else {
        let (mut f, mut g) = (0.0, 0.0);
        let mut fac = 1.0;
        for k in 0..12 {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            f += sign * fac / x.powi(2 * k + 1);
            fac *= (2 * k + 1) as f64;
            g += sign * fac / x.powi(2 * k + 2);
            fac *= (2 * k + 2) as f64;
        }
        std::f64::consts::FRAC_PI_2 - f * x.cos() - g * x.sin()
    }
}

/// Levels inside the gap `(-1, 1)` of a staggered finite-difference
/// discretization of the radial operator in `potential`, ascending.
///
/// `u` sits at `i h` (i = 1..n), `v` at `(m + 1/2) h` (m = 0..n-1), with
/// `h = x_max / (n + 1/2)`. The operator is
/// `[[1 + phi, -(d/dx + 1/x)], [d/dx - 1/x, -(1 - phi)]]`.
pub fn matrix_levels(grid: &RadialGrid, potential: &PotentialProfile, n: usize) -> Vec<f64> {
    let h = grid.x_max() / (n as f64 + 0.5);
    let phi = |x: f64| grid.interpolate(potential.phi(), x.max(grid.x_min()));
    let mut hmat = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for i in 0..n {
        let x = (i + 1) as f64 * h;
        hmat[(i, i)] = 1.0 + phi(x);
    }
    for m in 0..n {
        let xm = (m as f64 + 0.5) * h;
        let r = n + m;
        hmat[(r, r)] = -(1.0 - phi(xm));
        // u_{m+1} is column m, u_m is column m - 1.
        let right = 1.0 / h - 0.5 / xm;
        hmat[(r, m)] = right;
        hmat[(m, r)] = right;
        if m >= 1 {
            let left = -1.0 / h - 0.5 / xm;
            hmat[(r, m - 1)] = left;
            hmat[(m - 1, r)] = left;
        }
    }
    let eig = SymmetricEigen::new(hmat);
    let mut levels: Vec<f64> = eig.eigenvalues.iter().copied().filter(|e| e.abs() < 1.0).collect();
    levels.sort_by(f64::total_cmp);
    levels
}
