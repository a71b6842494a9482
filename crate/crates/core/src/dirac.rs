//! Radial Dirac system for the `kappa = -1` channel.
//!
//! With reduced energy `epsilon` and potential `phi` the components obey
//!
//! ```text
//! u' =  u / x + (1 + epsilon - phi) v
//! v' = -v / x + (1 - epsilon + phi) u
//! ```
//!
//! Bound states are found by shooting: a regular solution from the origin
//! and a decaying solution from `x_max` are matched at `x_match`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::RadialGrid;
use crate::ode::{self, State};
use crate::roots::bisect_then_secant;

/// Series start for the outward integration. Nodes below it take series values.
pub const SERIES_START: f64 = 1.0e-3;

/// Default matching point.
pub const DEFAULT_X_MATCH: f64 = 2.0;

const RTOL: f64 = 1.0e-11;
const NODE_THRESHOLD: f64 = 1.0e-10;

/// Potential sampled on a grid, with nodal derivative for Hermite interpolation.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialProfile {
    phi: Vec<f64>,
    dphi: Vec<f64>,
    phi_at_zero: f64,
}

impl PotentialProfile {
    /// Derivative taken numerically; the origin value from an even fit through
    /// the first two nodes.
    pub fn from_values(grid: &RadialGrid, phi: Vec<f64>) -> Result<Self> {
        let dphi = grid.derivative(&phi)?;
        let x = grid.points();
        let (x0, x1) = (x[0] * x[0], x[1] * x[1]);
        let phi_at_zero = (x1 * phi[0] - x0 * phi[1]) / (x1 - x0);
        Ok(Self { phi, dphi, phi_at_zero })
    }

    pub fn with_derivative(grid: &RadialGrid, phi: Vec<f64>, dphi: Vec<f64>, phi_at_zero: f64) -> Result<Self> {
        grid.check_len(&phi)?;
        grid.check_len(&dphi)?;
        Ok(Self { phi, dphi, phi_at_zero })
    }

    pub fn constant(grid: &RadialGrid, c: f64) -> Self {
        Self { phi: vec![c; grid.len()], dphi: vec![0.0; grid.len()], phi_at_zero: c }
    }

    pub fn zero(grid: &RadialGrid) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            phi: self.phi.iter().map(|p| p * factor).collect(),
            dphi: self.dphi.iter().map(|p| p * factor).collect(),
            phi_at_zero: self.phi_at_zero * factor,
        }
    }

    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    pub fn dphi(&self) -> &[f64] {
        &self.dphi
    }

    pub fn phi_at_zero(&self) -> f64 {
        self.phi_at_zero
    }

    /// Cubic Hermite value on interval `i`; below the first node an even
    /// quadratic joins the origin value.
    fn eval(&self, grid: &RadialGrid, i: usize, x: f64) -> f64 {
        let p = grid.points();
        if x < p[0] {
            let s = x / p[0];
            return self.phi_at_zero + (self.phi[0] - self.phi_at_zero) * s * s;
        }
        let h = p[i + 1] - p[i];
        let t = (x - p[i]) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * self.phi[i]
            + (t3 - 2.0 * t2 + t) * h * self.dphi[i]
            + (-2.0 * t3 + 3.0 * t2) * self.phi[i + 1]
            + (t3 - t2) * h * self.dphi[i + 1]
    }
}

/// Normalized bound state on the full grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialState {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    /// `integral (u^2 + v^2) dx` of the stored components.
    pub norm: f64,
    pub nodes_u: usize,
    pub epsilon: f64,
}

impl RadialState {
    pub fn density(&self) -> Vec<f64> {
        self.u.iter().zip(&self.v).map(|(u, v)| u * u + v * v).collect()
    }
}

/// `u ~ A x` at the origin and `u ~ A1 exp(-k x)` at `x_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticParams {
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "A1")]
    pub a1: f64,
}

/// One-sided solution covering grid nodes `first..first + u.len()`.
///
/// True amplitudes are the stored ones times `exp(log_scale)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialBranch {
    pub first: usize,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub log_scale: f64,
    /// `u'/u` at the matching node.
    pub log_derivative: f64,
}

#[derive(Clone, Copy)]
struct Channel<'a> {
    grid: &'a RadialGrid,
    potential: &'a PotentialProfile,
    scale: f64,
    epsilon: f64,
}

impl Channel<'_> {
    fn phi(&self, i: usize, x: f64) -> f64 {
        self.scale * self.potential.eval(self.grid, i, x)
    }

    fn rhs(&self, i: usize, x: f64, y: &State) -> State {
        let phi = self.phi(i, x);
        [y[0] / x + (1.0 + self.epsilon - phi) * y[1], -y[1] / x + (1.0 - self.epsilon + phi) * y[0]]
    }

    fn series(&self, amplitude: f64, x: f64) -> State {
        let p = self.scale * self.potential.phi_at_zero;
        let d = self.epsilon - p;
        [amplitude * x * (1.0 + (1.0 - d * d) * x * x / 6.0), amplitude * (1.0 - self.epsilon + p) * x * x / 3.0]
    }

    fn log_derivative(&self, j: usize, y: &State) -> f64 {
        let x = self.grid.points()[j];
        let i = j.min(self.grid.len() - 2);
        self.rhs(i, x, y)[0] / y[0]
    }

    fn outward(&self, amplitude: f64, m: usize) -> Result<RadialBranch> {
        let x = self.grid.points();
        let start = x.partition_point(|&p| p < SERIES_START);
        let mut u = Vec::with_capacity(m + 1);
        let mut v = Vec::with_capacity(m + 1);
        for &xi in &x[..start.min(m + 1)] {
            let s = self.series(amplitude, xi);
            u.push(s[0]);
            v.push(s[1]);
        }
        if start <= m {
            let mut y = self.series(amplitude, SERIES_START);
            let mut h = x[start] - SERIES_START;
            if h > 0.0 {
                let i = start.saturating_sub(1);
                let f = |t: f64, y: &State| self.rhs(i, t, y);
                y = ode::advance(&f, SERIES_START, x[start], y, RTOL, &mut h)?;
            } else {
                h = x[start + 1] - x[start];
            }
            u.push(y[0]);
            v.push(y[1]);
            for i in start..m {
                let f = |t: f64, y: &State| self.rhs(i, t, y);
                y = ode::advance(&f, x[i], x[i + 1], y, RTOL, &mut h)?;
                u.push(y[0]);
                v.push(y[1]);
            }
        }
        let last = [u[m], v[m]];
        Ok(RadialBranch { first: 0, log_derivative: self.log_derivative(m, &last), u, v, log_scale: 0.0 })
    }

    /// Decaying tail value at the last node: exact for a locally constant
    /// potential.
    fn tail(&self) -> (State, f64) {
        let n = self.grid.len();
        let x = self.grid.x_max();
        let phi = self.scale * self.potential.phi[n - 1];
        let m1 = 1.0 + self.epsilon - phi;
        let m2 = 1.0 - self.epsilon + phi;
        let k = (m1 * m2).max(0.0).sqrt();
        ([1.0, -(k + 1.0 / x) / m1], k)
    }

    fn inward(&self, amplitude: f64, m: usize) -> Result<RadialBranch> {
        let x = self.grid.points();
        let n = x.len();
        let (mut y, k) = self.tail();
        let log_scale = amplitude.abs().ln() - k * x[n - 1];
        if amplitude < 0.0 {
            y = [-y[0], -y[1]];
        }
        let mut u = vec![0.0; n - m];
        let mut v = vec![0.0; n - m];
        u[n - 1 - m] = y[0];
        v[n - 1 - m] = y[1];
        let mut h = x[n - 1] - x[n - 2];
        for i in (m..n - 1).rev() {
            let f = |t: f64, y: &State| self.rhs(i, t, y);
            y = ode::advance(&f, x[i + 1], x[i], y, RTOL, &mut h)?;
            u[i - m] = y[0];
            v[i - m] = y[1];
        }
        Ok(RadialBranch { first: m, log_derivative: self.log_derivative(m, &[u[0], v[0]]), u, v, log_scale })
    }
}

fn match_index(grid: &RadialGrid, x_match: f64) -> Result<usize> {
    let m = grid.nearest_index(x_match);
    let bad = !(x_match > grid.x_min() && x_match < grid.x_max()) || m == 0 || m + 1 >= grid.len() || grid.points()[m] < SERIES_START;
    if bad {
        return Err(Error::MatchOutsideGrid { x_match, x_min: grid.x_min(), x_max: grid.x_max() });
    }
    Ok(m)
}

/// Regular solution `u ~ amplitude x` integrated outward up to the node nearest `x_match`.
pub fn integrate_outward(grid: &RadialGrid, potential: &PotentialProfile, epsilon: f64, amplitude: f64, x_match: f64) -> Result<RadialBranch> {
    grid.check_len(potential.phi())?;
    let m = match_index(grid, x_match)?;
    Channel { grid, potential, scale: 1.0, epsilon }.outward(amplitude, m)
}

/// Decaying solution started at `x_max` and integrated inward to the node nearest `x_match`.
pub fn integrate_inward(grid: &RadialGrid, potential: &PotentialProfile, epsilon: f64, amplitude: f64, x_match: f64) -> Result<RadialBranch> {
    grid.check_len(potential.phi())?;
    let m = match_index(grid, x_match)?;
    Channel { grid, potential, scale: 1.0, epsilon }.inward(amplitude, m)
}

/// Scan window for the shooting parameter, walked from `from` towards `to`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchRange {
    pub from: f64,
    pub to: f64,
    pub step: f64,
}

/// The parameter solved for by [`shoot_match`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ShootingUnknown {
    /// Solve for `a` in `phi = a * potential` at fixed `epsilon`.
    Coupling { epsilon: f64, range: SearchRange },
    /// Solve for `epsilon` in the given potential.
    Energy { range: SearchRange },
}

impl ShootingUnknown {
    /// Coupling search from just below zero towards strongly attractive values.
    pub fn coupling() -> Self {
        Self::Coupling { epsilon: 0.0, range: SearchRange { from: -0.05, to: -40.0, step: 0.05 } }
    }

    /// Energy search over the gap `(-1, 1)`.
    pub fn energy() -> Self {
        Self::Energy { range: SearchRange { from: -0.999, to: 0.999, step: 0.01 } }
    }

    fn range(&self) -> SearchRange {
        match self {
            Self::Coupling { range, .. } | Self::Energy { range } => *range,
        }
    }
}

/// Solved bound state and the parameter value that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundState {
    pub state: RadialState,
    pub params: AsymptoticParams,
    /// Coupling `a` or energy `epsilon`, depending on the unknown.
    pub value: f64,
    /// Normalized matching Wronskian at `value`.
    pub mismatch: f64,
}

/// Matching point and tolerances for [`shoot_match_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShootOptions {
    pub x_match: f64,
    pub coarse_tol: f64,
    pub fine_tol: f64,
}

impl Default for ShootOptions {
    fn default() -> Self {
        Self { x_match: DEFAULT_X_MATCH, coarse_tol: 1e-6, fine_tol: 1e-12 }
    }
}

/// [`shoot_match_with`] using default options.
pub fn shoot_match(grid: &RadialGrid, potential: &PotentialProfile, unknown: ShootingUnknown, target_nodes: usize) -> Result<BoundState> {
    shoot_match_with(grid, potential, unknown, target_nodes, &ShootOptions::default())
}

/// Finds the first root of the matching condition along the search range
/// whose state has `target_nodes` nodes in `u`.
pub fn shoot_match_with(
    grid: &RadialGrid,
    potential: &PotentialProfile,
    unknown: ShootingUnknown,
    target_nodes: usize,
    options: &ShootOptions,
) -> Result<BoundState> {
    grid.check_len(potential.phi())?;
    let m = match_index(grid, options.x_match)?;
    let channel = |value: f64| match unknown {
        ShootingUnknown::Coupling { epsilon, .. } => Channel { grid, potential, scale: value, epsilon },
        ShootingUnknown::Energy { .. } => Channel { grid, potential, scale: 1.0, epsilon: value },
    };
    let mismatch = |value: f64| -> Result<f64> {
        let c = channel(value);
        let o = c.outward(1.0, m)?;
        let i = c.inward(1.0, m)?;
        let (uo, vo) = (o.u[m], o.v[m]);
        let (ui, vi) = (i.u[0], i.v[0]);
        Ok((uo * vi - vo * ui) / (uo.hypot(vo) * ui.hypot(vi)))
    };

    let range = unknown.range();
    let dir = (range.to - range.from).signum();
    let step = range.step.abs() * dir;
    let count = ((range.to - range.from) / step).ceil().max(1.0) as usize;
    let mut prev = range.from;
    let mut f_prev = mismatch(prev)?;
    let mut highest = None;
    for k in 1..=count {
        let next = if k == count { range.to } else { range.from + step * k as f64 };
        let f_next = mismatch(next)?;
        if f_prev * f_next <= 0.0 {
            let root = bisect_then_secant(mismatch, prev, next, f_prev, f_next, options.coarse_tol, options.fine_tol)?;
            let bound = assemble(channel(root), m, root)?;
            let bound = BoundState { mismatch: mismatch(root)?, ..bound };
            match bound.state.nodes_u.cmp(&target_nodes) {
                std::cmp::Ordering::Equal => return Ok(bound),
                std::cmp::Ordering::Greater => return Err(Error::WrongNodeCount { expected: target_nodes, found: bound.state.nodes_u }),
                std::cmp::Ordering::Less => highest = Some(bound.state.nodes_u),
            }
        }
        prev = next;
        f_prev = f_next;
    }
    log::debug!("no root with {target_nodes} nodes; highest found {highest:?}");
    Err(Error::NoBoundState { nodes: target_nodes, lo: range.from, hi: range.to })
}

fn assemble(c: Channel<'_>, m: usize, value: f64) -> Result<BoundState> {
    let o = c.outward(1.0, m)?;
    let i = c.inward(1.0, m)?;
    let s = (o.u[m] * i.u[0] + o.v[m] * i.v[0]) / (i.u[0] * i.u[0] + i.v[0] * i.v[0]);
    let mut u = o.u;
    let mut v = o.v;
    u.extend(i.u[1..].iter().map(|x| x * s));
    v.extend(i.v[1..].iter().map(|x| x * s));
    let rho: Vec<f64> = u.iter().zip(&v).map(|(a, b)| a * a + b * b).collect();
    let norm = crate::grid::integrate(c.grid, &rho)?;
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::TrivialSolution);
    }
    let k = 1.0 / norm.sqrt();
    u.iter_mut().chain(v.iter_mut()).for_each(|x| *x *= k);
    let nodes_u = count_nodes(&u);
    let (_, kappa) = c.tail();
    let a1 = u[u.len() - 1] * (kappa * c.grid.x_max()).exp();
    Ok(BoundState { state: RadialState { u, v, norm: 1.0, nodes_u, epsilon: c.epsilon }, params: AsymptoticParams { a: k, a1 }, value, mismatch: 0.0 })
}

/// Sign changes of `u`, ignoring values negligible against its maximum.
pub fn count_nodes(u: &[f64]) -> usize {
    let max = u.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let floor = NODE_THRESHOLD * max;
    let mut last = 0.0f64;
    let mut nodes = 0;
    for &x in u {
        if x.abs() <= floor {
            continue;
        }
        if last != 0.0 && x.signum() != last.signum() {
            nodes += 1;
        }
        last = x;
    }
    nodes
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{build_grid, GridScheme};

    fn log_grid() -> RadialGrid {
        build_grid(3000, 30.0, GridScheme::LogDenseOrigin).unwrap()
    }

    #[test]
    fn constant_potential_matches_closed_form() {
        // Oracle: u = A sinh(kx)/k, v = A (cosh kx - sinh(kx)/(kx)) / (1 - c), k^2 = 1 - c^2.
        let grid = log_grid();
        for c in [0.0, 0.4, -0.7] {
            let pot = PotentialProfile::constant(&grid, c);
            let b = integrate_outward(&grid, &pot, 0.0, 1.0, 2.0).unwrap();
            let k = (1.0 - c * c).sqrt();
            let x = grid.points();
            for (j, (&u, &v)) in b.u.iter().zip(&b.v).enumerate() {
                let xe = x[j];
                let ue = (k * xe).sinh() / k;
                let ve = ((k * xe).cosh() - (k * xe).sinh() / (k * xe)) / (1.0 - c);
                assert!((u - ue).abs() <= 1e-9 * ue.abs().max(1e-3), "c={c} x={xe} u={u} {ue}");
                assert!((v - ve).abs() <= 1e-9 * ue.abs().max(1e-3), "c={c} x={xe} v={v} {ve}");
            }
        }
    }

    #[test]
    fn oscillating_constant_potential() {
        // c > 1: u = A sin(kx)/k with k^2 = c^2 - 1.
        let grid = log_grid();
        let c = 2.5;
        let pot = PotentialProfile::constant(&grid, c);
        let b = integrate_outward(&grid, &pot, 0.0, 1.0, 5.0).unwrap();
        let k = (c * c - 1.0f64).sqrt();
        for (j, &u) in b.u.iter().enumerate() {
            let xe = grid.points()[j];
            assert!((u - (k * xe).sin() / k).abs() < 1e-9);
        }
    }

    #[test]
    fn free_tail_ratio() {
        // Free decaying solution: u = exp(-x), v = -exp(-x) (1 + 1/x).
        let grid = log_grid();
        let pot = PotentialProfile::zero(&grid);
        let b = integrate_inward(&grid, &pot, 0.0, 1.0, 2.0).unwrap();
        for (j, (&u, &v)) in b.u.iter().zip(&b.v).enumerate() {
            let x = grid.points()[b.first + j];
            assert!((v / u + 1.0 + 1.0 / x).abs() < 1e-8, "x={x}");
            let true_u = u * b.log_scale.exp();
            assert!((true_u - (-x).exp()).abs() < 1e-9 * (-x).exp());
        }
    }

    #[test]
    fn zero_potential_has_no_bound_state() {
        let grid = log_grid();
        let pot = PotentialProfile::zero(&grid);
        let unknown = ShootingUnknown::Energy { range: SearchRange { from: -0.99, to: 0.99, step: 0.05 } };
        assert!(matches!(shoot_match(&grid, &pot, unknown, 0), Err(Error::NoBoundState { .. })));
    }

    #[test]
    fn match_point_must_lie_inside_grid() {
        let grid = log_grid();
        let pot = PotentialProfile::zero(&grid);
        assert!(matches!(integrate_outward(&grid, &pot, 0.0, 1.0, 31.0), Err(Error::MatchOutsideGrid { .. })));
        assert!(matches!(integrate_inward(&grid, &pot, 0.0, 1.0, -1.0), Err(Error::MatchOutsideGrid { .. })));
    }

    #[test]
    fn coulomb_like_well_binds_in_order() {
        // Attractive well phi = -g / sqrt(1 + x^2): levels rise with node count.
        let grid = log_grid();
        let phi: Vec<f64> = grid.points().iter().map(|x| -2.0 / (1.0 + x * x).sqrt()).collect();
        let pot = PotentialProfile::from_values(&grid, phi).unwrap();
        let e0 = shoot_match(&grid, &pot, ShootingUnknown::energy(), 0).unwrap();
        let e1 = shoot_match(&grid, &pot, ShootingUnknown::energy(), 1).unwrap();
        assert!(e0.value < e1.value);
        assert_eq!(e0.state.nodes_u, 0);
        assert_eq!(e1.state.nodes_u, 1);
        assert!(e0.mismatch.abs() < 1e-9);
        let rho = e0.state.density();
        assert!((crate::grid::integrate(&grid, &rho).unwrap() - 1.0).abs() < 1e-12);
        assert!(e0.state.u[10] > 0.0);
    }

    #[test]
    fn node_counting_ignores_noise() {
        assert_eq!(count_nodes(&[0.0, 1.0, 2.0, -1.0, -2.0, 1e-16, -1e-16, 3.0]), 2);
        assert_eq!(count_nodes(&[]), 0);
    }
}
