//! Self-consistent loop for the ground state.
//!
//! Each pass solves for the coupling `a` that admits a normalizable
//! zero-node state in `a * phi0`, rebuilds `phi0` from the new density and
//! mixes it with the previous potential.

use serde::{Deserialize, Serialize};

use crate::dirac::{self, BoundState, PotentialProfile, RadialState, SearchRange, ShootingUnknown};
use crate::error::{Error, Result};
use crate::grid::{self, build_grid, GridScheme, RadialGrid};

/// Grid parameters, as accepted by [`build_grid`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSpec {
    pub n_points: usize,
    pub x_max: f64,
    pub scheme: GridScheme,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { n_points: 4000, x_max: 30.0, scheme: GridScheme::LogDenseOrigin }
    }
}

impl GridSpec {
    pub fn build(&self) -> Result<RadialGrid> {
        build_grid(self.n_points, self.x_max, self.scheme)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScfConfig {
    pub grid: GridSpec,
    pub max_outer_iterations: usize,
    /// Weight of the new potential in each pass, in `(0, 1]`.
    pub mixing: f64,
    pub tol_residual: f64,
    /// Centre of the first coupling search window.
    pub a_initial: f64,
    pub continuation_steps: usize,
    /// Starting density is `x^2 exp(-initial_decay x)`, normalized.
    pub initial_decay: f64,
}

impl Default for ScfConfig {
    fn default() -> Self {
        Self {
            grid: GridSpec::default(),
            max_outer_iterations: 200,
            mixing: 0.5,
            tol_residual: 1e-9,
            a_initial: -3.5,
            continuation_steps: 10,
            initial_decay: 2.0,
        }
    }
}

impl ScfConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |field, reason: &str| Err(Error::InvalidConfig { field, reason: reason.into() });
        if !(self.mixing > 0.0 && self.mixing <= 1.0) {
            return bad("mixing", &format!("must lie in (0, 1], got {}", self.mixing));
        }
        if !(self.tol_residual > 0.0) {
            return bad("tol_residual", "must be positive");
        }
        if self.max_outer_iterations == 0 {
            return bad("max_outer_iterations", "must be at least 1");
        }
        if !(self.a_initial < 0.0) {
            return bad("a_initial", "must be negative");
        }
        if self.continuation_steps == 0 {
            return bad("continuation_steps", "must be at least 1");
        }
        if !(self.initial_decay > 0.0) {
            return bad("initial_decay", "must be positive");
        }
        if !(self.grid.x_max > 1.0) {
            return bad("grid.x_max", "must exceed 1");
        }
        if self.grid.n_points < grid::MIN_POINTS {
            return bad("grid.n_points", &format!("must be at least {}", grid::MIN_POINTS));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScfSolution {
    pub grid: RadialGrid,
    pub state: RadialState,
    pub rho: Vec<f64>,
    /// Potential of unit source `rho`.
    pub phi0: PotentialProfile,
    pub a: f64,
    pub residual_history: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
}

/// Unit-source potential `phi0(x) = int_x rho/y dy + (1/x) int_0^x rho dy`.
///
/// The segment below the first node assumes `rho ~ x^k` with `k` read off the
/// first two nodes; beyond `x_max` the source is taken to vanish.
pub fn compute_potential(grid: &RadialGrid, rho: &[f64]) -> Result<PotentialProfile> {
    grid.check_len(rho)?;
    let x = grid.points();
    let k = origin_exponent(x, rho);
    let head = rho[0] * x[0] / (k + 1.0);
    let mut charge = grid.cumulative_from_origin(rho)?;
    charge.iter_mut().for_each(|q| *q += head);
    let over_x: Vec<f64> = rho.iter().zip(x).map(|(r, x)| r / x).collect();
    let outer = grid.cumulative_to_end(&over_x)?;
    let phi = outer.iter().zip(&charge).zip(x).map(|((o, q), x)| o + q / x).collect();
    let dphi = charge.iter().zip(x).map(|(q, x)| -q / (x * x)).collect();
    let phi_at_zero = if k > 0.0 { outer[0] + rho[0] / k } else { outer[0] + head / x[0] };
    PotentialProfile::with_derivative(grid, phi, dphi, phi_at_zero)
}

fn origin_exponent(x: &[f64], rho: &[f64]) -> f64 {
    let (r0, r1) = (rho[0], rho[1]);
    if r0 != 0.0 && r1 != 0.0 && r0.signum() == r1.signum() {
        ((r1 / r0).ln() / (x[1] / x[0]).ln()).clamp(0.0, 4.0)
    } else {
        2.0
    }
}

/// Normalized `x^2 exp(-decay x)` on the grid.
pub fn bump_density(grid: &RadialGrid, decay: f64) -> Result<Vec<f64>> {
    let mut rho: Vec<f64> = grid.points().iter().map(|x| x * x * (-decay * x).exp()).collect();
    let norm = grid::integrate(grid, &rho)?;
    rho.iter_mut().for_each(|r| *r /= norm);
    Ok(rho)
}

fn l2_distance(grid: &RadialGrid, a: &[f64], b: &[f64]) -> Result<f64> {
    let d2: Vec<f64> = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).collect();
    Ok(grid::integrate(grid, &d2)?.max(0.0).sqrt())
}

/// Zero-node coupling eigenvalue in `a * phi0`, trying a window around
/// `hint` before the full scan from zero.
pub fn solve_coupling(grid: &RadialGrid, phi0: &PotentialProfile, hint: Option<f64>) -> Result<BoundState> {
    if let Some(h) = hint.filter(|h| *h < 0.0) {
        let window = ShootingUnknown::Coupling { epsilon: 0.0, range: SearchRange { from: 0.9 * h, to: 1.1 * h, step: 0.02 * h.abs() } };
        match dirac::shoot_match(grid, phi0, window, 0) {
            Ok(b) => return Ok(b),
            Err(Error::NoBoundState { .. } | Error::WrongNodeCount { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    dirac::shoot_match(grid, phi0, ShootingUnknown::coupling(), 0)
}

const POLISH_FACTOR: f64 = 1e-2;
const MAX_POLISH_PASSES: usize = 50;

struct Start {
    rho: Vec<f64>,
    a_hint: f64,
}

/// Runs the loop with the potential `blend * phi0[rho] + (1 - blend) * reference`.
fn run(config: &ScfConfig, grid: &RadialGrid, start: Start, blend: f64, reference: &PotentialProfile) -> Result<ScfSolution> {
    let blended = |phi: &PotentialProfile| -> Result<PotentialProfile> {
        if blend == 1.0 {
            return Ok(phi.clone());
        }
        mix(grid, reference, phi, blend)
    };
    let mut rho = start.rho;
    let mut hint = Some(start.a_hint);
    let mut a_prev = f64::NAN;
    let mut potential = blended(&compute_potential(grid, &rho)?)?;
    let mut history = Vec::new();
    let mut restarts = 0;
    let mut polishing = false;
    let mut polish_passes = 0;
    let mut last = None;
    for iteration in 1..=config.max_outer_iterations {
        let bound = solve_coupling(grid, &potential, hint)?;
        let max_u = bound.state.u.iter().fold(0.0f64, |m, u| m.max(u.abs()));
        if max_u < 1e-8 {
            restarts += 1;
            if restarts > 1 {
                return Err(Error::TrivialSolution);
            }
            log::warn!("pass {iteration}: trivial state, restarting from bump density");
            rho = bump_density(grid, config.initial_decay)?;
            potential = blended(&compute_potential(grid, &rho)?)?;
            hint = None;
            continue;
        }
        let rho_new = bound.state.density();
        let residual = l2_distance(grid, &rho_new, &rho)?;
        let delta_a = (bound.value - a_prev).abs();
        history.push(residual);
        log::info!("scf iteration {iteration}: a = {:.12}, residual = {residual:.3e}", bound.value);
        a_prev = bound.value;
        hint = Some(bound.value);
        let fresh = blended(&compute_potential(grid, &rho_new)?)?;
        let converged = residual < config.tol_residual && delta_a < config.tol_residual;
        rho = rho_new;
        // Past the stopping test, a few more passes pin `a` to the final density.
        polishing |= converged;
        if polishing && (delta_a < POLISH_FACTOR * config.tol_residual || polish_passes == MAX_POLISH_PASSES) {
            return finish(grid, bound, rho, blend, reference, history, iteration);
        }
        if polishing {
            polish_passes += 1;
        }
        potential = mix(grid, &potential, &fresh, config.mixing)?;
        last = Some(bound);
    }
    let residual = history.last().copied().unwrap_or(f64::NAN);
    log::warn!("scf stopped after {} passes, residual {residual:.3e}", config.max_outer_iterations);
    if let Some(bound) = last {
        log::debug!("last coupling {}", bound.value);
    }
    Err(Error::NotConverged { iterations: config.max_outer_iterations, residual, residual_history: history })
}

fn finish(
    grid: &RadialGrid,
    bound: BoundState,
    rho: Vec<f64>,
    blend: f64,
    reference: &PotentialProfile,
    history: Vec<f64>,
    iterations: usize,
) -> Result<ScfSolution> {
    let own = compute_potential(grid, &rho)?;
    let phi0 = if blend == 1.0 { own } else { mix(grid, reference, &own, blend)? };
    Ok(ScfSolution { grid: grid.clone(), state: bound.state, rho, phi0, a: bound.value, residual_history: history, converged: true, iterations })
}

fn mix(grid: &RadialGrid, old: &PotentialProfile, new: &PotentialProfile, w: f64) -> Result<PotentialProfile> {
    let lerp = |a: &[f64], b: &[f64]| -> Vec<f64> { a.iter().zip(b).map(|(x, y)| (1.0 - w) * x + w * y).collect() };
    PotentialProfile::with_derivative(grid, lerp(old.phi(), new.phi()), lerp(old.dphi(), new.dphi()), (1.0 - w) * old.phi_at_zero() + w * new.phi_at_zero())
}

/// Self-consistent ground state from the bump starting density.
pub fn scf_solve(config: &ScfConfig) -> Result<ScfSolution> {
    config.validate()?;
    let grid = config.grid.build()?;
    let rho = bump_density(&grid, config.initial_decay)?;
    let reference = PotentialProfile::zero(&grid);
    run(config, &grid, Start { rho, a_hint: config.a_initial }, 1.0, &reference)
}

/// Evenly spaced self-consistency fractions ending at 1.
pub fn default_path(steps: usize) -> Vec<f64> {
    let steps = steps.max(1);
    (1..=steps).map(|k| k as f64 / steps as f64).collect()
}

/// Homotopy from the starting bump's own potential to the self-consistent one.
///
/// Step `k` iterates `phi = a (s_k phi0[rho] + (1 - s_k) phi0[bump])`, warm
/// started from step `k - 1`. The last entry of `path` must be 1.
pub fn continuation_solve(config: &ScfConfig, path: &[f64]) -> Result<Vec<ScfSolution>> {
    config.validate()?;
    if path.last() != Some(&1.0) {
        return Err(Error::InvalidConfig { field: "path", reason: "must be non-empty and end at 1".into() });
    }
    if let Some(s) = path.iter().find(|s| !(**s > 0.0 && **s <= 1.0)) {
        return Err(Error::InvalidParameter { name: "path", value: *s });
    }
    let grid = config.grid.build()?;
    let bump = bump_density(&grid, config.initial_decay)?;
    let reference = compute_potential(&grid, &bump)?;
    let mut start = Start { rho: bump, a_hint: config.a_initial };
    let mut out: Vec<ScfSolution> = Vec::with_capacity(path.len());
    for (step, &s) in path.iter().enumerate() {
        let sol = run(config, &grid, start, s, &reference).map_err(|e| Error::Continuation { step, source: Box::new(e) })?;
        log::info!("continuation step {step}: fraction {s}, a = {:.12}", sol.a);
        start = Start { rho: sol.rho.clone(), a_hint: sol.a };
        out.push(sol);
    }
    Ok(out)
}

/// One row of a grid-refinement study.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub n_points: usize,
    pub a0: f64,
    /// Change from the previous (coarser) row.
    pub delta: Option<f64>,
}

/// Solves at each grid size in turn, all other settings from `config`.
pub fn convergence_study(config: &ScfConfig, sizes: &[usize]) -> Result<Vec<ConvergenceRow>> {
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let mut c = config.clone();
        c.grid.n_points = n;
        let sol = scf_solve(&c)?;
        let delta = rows.last().map(|r| sol.a - r.a0);
        rows.push(ConvergenceRow { n_points: n, a0: sol.a, delta });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fine_grid() -> RadialGrid {
        build_grid(3000, 30.0, GridScheme::LogDenseOrigin).unwrap()
    }

    #[test]
    fn hydrogenic_density_potential() {
        // rho = 4 x^2 exp(-2x): phi0 = 1/x - exp(-2x) (1/x + 1), phi0(0) = 1.
        let grid = fine_grid();
        let rho: Vec<f64> = grid.points().iter().map(|x| 4.0 * x * x * (-2.0 * x).exp()).collect();
        let pot = compute_potential(&grid, &rho).unwrap();
        for (x, p) in grid.points().iter().zip(pot.phi()) {
            let exact = 1.0 / x - (-2.0 * x).exp() * (1.0 / x + 1.0);
            assert!((p - exact).abs() < 1e-8, "x={x} {p} {exact}");
        }
        assert!((pot.phi_at_zero() - 1.0).abs() < 1e-8);
        for (x, d) in grid.points().iter().zip(pot.dphi()) {
            let q = 1.0 - (-2.0 * x).exp() * (1.0 + 2.0 * x + 2.0 * x * x);
            assert!((d + q / (x * x)).abs() < 1e-7);
        }
    }

    #[test]
    fn box_density_potential() {
        // rho = 1 on [0, 1]: phi0 = 1 - ln x inside, 1/x outside.
        let inside = RadialGrid::log_dense_origin(1500, 1e-3, 1.0).unwrap();
        let pot = compute_potential(&inside, &vec![1.0; inside.len()]).unwrap();
        for (&x, p) in inside.points().iter().zip(pot.phi()) {
            assert!((p - (1.0 - x.ln())).abs() < 1e-8, "x={x} {p}");
        }

        // With the jump on the grid, the panels straddling it cost O(h).
        let outer = (1..=1450).map(|k| 1.0 + 0.02 * k as f64);
        let grid = RadialGrid::from_points(inside.points().iter().copied().chain(outer).collect()).unwrap();
        let rho: Vec<f64> = grid.points().iter().map(|&x| if x <= 1.0 { 1.0 } else { 0.0 }).collect();
        let pot = compute_potential(&grid, &rho).unwrap();
        for (&x, p) in grid.points().iter().zip(pot.phi()) {
            let exact = if x <= 1.0 { 1.0 - x.ln() } else { 1.0 / x };
            assert!((p - exact).abs() < 2e-2, "x={x} {p} {exact}");
        }
    }

    #[test]
    fn zero_density_gives_zero_potential() {
        let grid = fine_grid();
        let pot = compute_potential(&grid, &vec![0.0; grid.len()]).unwrap();
        assert!(pot.phi().iter().all(|p| *p == 0.0));
        assert!(compute_potential(&grid, &[1.0, 2.0]).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(ScfConfig::default().validate().is_ok());
        for mixing in [0.0, -0.1, 1.5, f64::NAN] {
            let c = ScfConfig { mixing, ..Default::default() };
            assert!(matches!(c.validate(), Err(Error::InvalidConfig { field: "mixing", .. })));
        }
        let c = ScfConfig { tol_residual: 0.0, ..Default::default() };
        assert!(c.validate().is_err());
    }

    #[test]
    fn coarse_solve_converges_to_attractive_well() {
        let config = ScfConfig { grid: GridSpec { n_points: 800, ..Default::default() }, ..Default::default() };
        let sol = scf_solve(&config).unwrap();
        assert!(sol.converged);
        assert!(sol.a < 0.0);
        assert_eq!(sol.state.nodes_u, 0);
        let norm = grid::integrate(&sol.grid, &sol.rho).unwrap();
        assert!((norm - 1.0).abs() < 1e-10);
    }

    #[test]
    fn divergent_settings_report_history() {
        let config = ScfConfig { grid: GridSpec { n_points: 200, ..Default::default() }, max_outer_iterations: 3, ..Default::default() };
        match scf_solve(&config) {
            Err(Error::NotConverged { iterations, residual_history, .. }) => {
                assert_eq!(iterations, 3);
                assert_eq!(residual_history.len(), 3);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn continuation_rejects_open_path() {
        let c = ScfConfig::default();
        assert!(matches!(continuation_solve(&c, &[0.5]), Err(Error::InvalidConfig { .. })));
        assert!(matches!(continuation_solve(&c, &[]), Err(Error::InvalidConfig { .. })));
    }
}
