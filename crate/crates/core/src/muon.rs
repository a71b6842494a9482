//! Excited branch in the frozen ground-state potential.

use serde::{Deserialize, Serialize};

use crate::dirac::{self, PotentialProfile, RadialState, ShootingUnknown};
use crate::error::{Error, Result};
use crate::grid::{self, RadialGrid};
use crate::observables::PhysicalConstants;
use crate::scf::ScfSolution;

/// How the excited-configuration potential is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MuonMode {
    /// Both levels in the frozen ground-state potential `a0 phi0`.
    #[default]
    Adiabatic,
    /// Iterating the excited pair together with its own potential.
    SelfConsistent,
}

/// Note attached to every result describing the level integrand used.
pub const INTEGRAND_NOTE: &str = "I = int [u'v - v'u - 2uv/x + (u^2 - v^2) + a0 phi0 (u^2 + v^2) / 2] dx \
     with the antisymmetric derivative pair; both states solve the same channel at their own energy";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MuonResult {
    pub epsilon1: f64,
    pub epsilon2: f64,
    #[serde(rename = "I_mu")]
    pub i_mu: f64,
    #[serde(rename = "I_1mu")]
    pub i_1mu: f64,
    pub ratio_coefficient: f64,
    pub mass_ratio: f64,
    /// `int (u1 u2 + v1 v2) dx` of the two states.
    pub orthogonality: f64,
    /// `epsilon2 - epsilon1`, reported alongside the integral-based ratio.
    pub level_difference: f64,
    /// `ratio_coefficient * level_difference / I_mu`.
    pub level_difference_ratio: f64,
    pub integrand_note: String,
    #[serde(skip)]
    pub ground: Option<RadialState>,
    #[serde(skip)]
    pub excited: Option<RadialState>,
}

pub fn solve_muon(solution: &ScfSolution, constants: &PhysicalConstants, mode: MuonMode) -> Result<MuonResult> {
    match mode {
        MuonMode::Adiabatic => solve_muon_adiabatic(solution, constants),
        MuonMode::SelfConsistent => {
            Err(Error::NotImplemented("self-consistent excited pair with its own potential (only the frozen-potential approximation is available)"))
        }
    }
}

/// Level integral of a state at energy `epsilon` in `a0 * phi0`.
pub fn level_integral(grid: &RadialGrid, state: &RadialState, a0: f64, phi0: &PotentialProfile) -> Result<f64> {
    grid.check_len(&state.u)?;
    grid.check_len(phi0.phi())?;
    let eps = state.epsilon;
    let integrand: Vec<f64> = grid
        .points()
        .iter()
        .enumerate()
        .map(|(j, &x)| {
            let (u, v) = (state.u[j], state.v[j]);
            let phi = a0 * phi0.phi()[j];
            let du = u / x + (1.0 + eps - phi) * v;
            let dv = -v / x + (1.0 - eps + phi) * u;
            du * v - dv * u - 2.0 * u * v / x + (u * u - v * v) + 0.5 * phi * (u * u + v * v)
        })
        .collect();
    grid::integrate(grid, &integrand)
}

pub fn solve_muon_adiabatic(solution: &ScfSolution, constants: &PhysicalConstants) -> Result<MuonResult> {
    if !solution.converged {
        return Err(Error::NotConvergedInput);
    }
    let grid = &solution.grid;
    let a0 = solution.a;
    let frozen = solution.phi0.scaled(a0);
    let ground = dirac::shoot_match(grid, &frozen, ShootingUnknown::energy(), 0)?;
    let excited = dirac::shoot_match(grid, &frozen, ShootingUnknown::energy(), 1)?;
    let (g, e) = (ground.state, excited.state);

    let overlap: Vec<f64> = (0..grid.len()).map(|j| g.u[j] * e.u[j] + g.v[j] * e.v[j]).collect();
    let orthogonality = grid::integrate(grid, &overlap)?;
    let i_mu = level_integral(grid, &g, a0, &solution.phi0)?;
    let i_1mu = level_integral(grid, &e, a0, &solution.phi0)?;
    let ratio_coefficient = a0.abs() / (2.0 * constants.alpha);
    let level_difference = e.epsilon - g.epsilon;
    log::info!("frozen levels {:.9} {:.9}, integrals {i_mu:.6} {i_1mu:.6}", g.epsilon, e.epsilon);
    Ok(MuonResult {
        epsilon1: g.epsilon,
        epsilon2: e.epsilon,
        i_mu,
        i_1mu,
        ratio_coefficient,
        mass_ratio: ratio_coefficient * (i_mu - i_1mu) / i_mu,
        orthogonality,
        level_difference,
        level_difference_ratio: ratio_coefficient * level_difference / i_mu,
        integrand_note: INTEGRAND_NOTE.to_string(),
        ground: Some(g),
        excited: Some(e),
    })
}
