//! Energy integrals, the constants chain, the form factor and the overlap
//! of two coherent field configurations.

use serde::{Deserialize, Serialize};

use crate::dirac::PotentialProfile;
use crate::error::{Error, Result};
use crate::grid::{self, RadialGrid, GAUSS8};
use crate::scf::{compute_potential, ScfSolution};

/// Default fine-structure constant.
pub const ALPHA: f64 = 1.0 / 137.036;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    #[serde(rename = "T")]
    pub t: f64,
    #[serde(rename = "Pi")]
    pub pi: f64,
    pub a_virial: f64,
    /// Rest energy `-alpha T / (2 a)` in units of the bare mass.
    #[serde(rename = "E0_units_m0")]
    pub e0_units_m0: f64,
    /// The same quantity from `(a / alpha0) [T + a Pi / 2]`.
    #[serde(rename = "E0_functional_units_m0")]
    pub e0_functional_units_m0: f64,
    /// True when both rest-energy routes agree in sign as well as magnitude.
    pub e0_sign_consistent: bool,
    pub virial_residual: f64,
}

/// Kinetic-type and potential integrals of a zero-energy state, with the
/// component derivatives taken from the equations of motion.
pub fn energy_integrals(grid: &RadialGrid, u: &[f64], v: &[f64], a: f64, phi0: &PotentialProfile) -> Result<(f64, f64)> {
    grid.check_len(u)?;
    grid.check_len(v)?;
    grid.check_len(phi0.phi())?;
    let x = grid.points();
    let mut kinetic = Vec::with_capacity(u.len());
    let mut potential = Vec::with_capacity(u.len());
    for j in 0..u.len() {
        let phi = a * phi0.phi()[j];
        let du = u[j] / x[j] + (1.0 - phi) * v[j];
        let dv = -v[j] / x[j] + (1.0 + phi) * u[j];
        kinetic.push(du * v[j] - dv * u[j] - 2.0 * u[j] * v[j] / x[j] + u[j] * u[j] - v[j] * v[j]);
        potential.push(phi0.phi()[j] * (u[j] * u[j] + v[j] * v[j]));
    }
    Ok((grid::integrate(grid, &kinetic)?, grid::integrate(grid, &potential)?))
}

pub fn energy_report(solution: &ScfSolution, alpha: f64) -> Result<EnergyReport> {
    if !solution.converged {
        return Err(Error::NotConvergedInput);
    }
    let (t, pi) = energy_integrals(&solution.grid, &solution.state.u, &solution.state.v, solution.a, &solution.phi0)?;
    let a = solution.a;
    let alpha0 = a * a / alpha;
    let a_virial = -t / pi;
    let e0_units_m0 = -alpha * t / (2.0 * a);
    let e0_functional_units_m0 = (a / alpha0) * (t + 0.5 * a * pi);
    let e0_sign_consistent = e0_units_m0.signum() == e0_functional_units_m0.signum();
    if !e0_sign_consistent {
        log::warn!("rest energy routes disagree in sign: closed form {e0_units_m0:e}, functional {e0_functional_units_m0:e}");
    }
    Ok(EnergyReport { t, pi, a_virial, e0_units_m0, e0_functional_units_m0, e0_sign_consistent, virial_residual: ((a - a_virial) / a).abs() })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    pub alpha: f64,
    pub m: f64,
    pub a0: f64,
    #[serde(rename = "T")]
    pub t: f64,
    pub alpha0: f64,
    pub e0: f64,
    pub xi: f64,
    #[serde(rename = "C")]
    pub c: f64,
    pub m0_over_m: f64,
    #[serde(rename = "Z0")]
    pub z0: f64,
    #[serde(rename = "L0_over_m")]
    pub l0_over_m: f64,
}

/// Renormalization chain from the eigenvalue `a0` and kinetic integral `t`.
///
/// The bare mass follows from setting the rest energy `-m0 alpha T / (2 a0)`
/// equal to the observed mass `m`.
pub fn derive_constants(a0: f64, t: f64, alpha: f64, m: f64) -> Result<PhysicalConstants> {
    if !(a0 < 0.0) {
        return Err(Error::NonNegativeEigenvalue(a0));
    }
    if !(alpha > 0.0) {
        return Err(Error::InvalidParameter { name: "alpha", value: alpha });
    }
    if !(t > 0.0) {
        return Err(Error::InvalidParameter { name: "T", value: t });
    }
    let alpha0 = a0 * a0 / alpha;
    let xi = a0 / alpha0;
    let m0_over_m = 2.0 * a0.abs() / (alpha * t);
    Ok(PhysicalConstants {
        alpha,
        m,
        a0,
        t,
        alpha0,
        e0: (4.0 * std::f64::consts::PI * alpha0).sqrt(),
        xi,
        c: (1.0 - xi) / (1.0 + xi),
        m0_over_m,
        z0: alpha * alpha / (a0 * a0),
        l0_over_m: 2.0 * m0_over_m,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormFactorTable {
    /// `|P|` in units of `m`.
    pub momenta: Vec<f64>,
    pub values: Vec<f64>,
    /// Cutoff of the `L^4 / (P^2 + L^2)^2` template fitted over the top decade, units of `m`.
    #[serde(rename = "L0_fit")]
    pub l0_fit: f64,
}

/// `F(P) = int rho sinc(P x / m0)` for the converged density.
pub fn form_factor(solution: &ScfSolution, constants: &PhysicalConstants, momenta: &[f64]) -> Result<FormFactorTable> {
    if !solution.converged {
        return Err(Error::NotConvergedInput);
    }
    form_factor_of_density(&solution.grid, &solution.rho, constants.m0_over_m, momenta)
}

/// Form factor of an arbitrary density with wavenumber `t = P / m0_over_m`.
pub fn form_factor_of_density(grid: &RadialGrid, rho: &[f64], m0_over_m: f64, momenta: &[f64]) -> Result<FormFactorTable> {
    grid.check_len(rho)?;
    if let Some(p) = momenta.iter().find(|p| !(**p >= 0.0)) {
        return Err(Error::NegativeMomentum(*p));
    }
    let total = grid::integrate(grid, rho)?;
    let reduced: Vec<f64> = rho.iter().zip(grid.points()).map(|(r, x)| r / (x * x)).collect();
    let values = momenta
        .iter()
        .map(|&p| {
            if p == 0.0 {
                return Ok(total);
            }
            let t = p / m0_over_m;
            Ok(grid.sine_transform(&reduced, t)? / t)
        })
        .collect::<Result<Vec<f64>>>()?;
    let l0_fit = fit_cutoff(momenta, &values);
    Ok(FormFactorTable { momenta: momenta.to_vec(), values, l0_fit })
}

/// `0` followed by `n` log-spaced momenta from `m0 / 100` to `10 m0`.
pub fn default_momenta(constants: &PhysicalConstants, n: usize) -> Vec<f64> {
    let (lo, hi) = (0.01 * constants.m0_over_m, 10.0 * constants.m0_over_m);
    let n = n.max(2);
    std::iter::once(0.0).chain((0..n).map(|k| lo * (hi / lo).powf(k as f64 / (n - 1) as f64))).collect()
}

/// Least-squares fit of `ln F` to the template over the largest decade of
/// momenta with positive `F`. NaN when fewer than two points qualify.
fn fit_cutoff(momenta: &[f64], values: &[f64]) -> f64 {
    let p_max = momenta.iter().copied().fold(0.0f64, f64::max);
    let pts: Vec<(f64, f64)> = momenta.iter().zip(values).filter(|(p, f)| **p >= 0.1 * p_max && **p > 0.0 && **f > 0.0).map(|(p, f)| (*p, f.ln())).collect();
    if pts.len() < 2 {
        return f64::NAN;
    }
    let cost = |ln_l: f64| -> f64 {
        let l2 = (2.0 * ln_l).exp();
        pts.iter()
            .map(|(p, lf)| {
                let model = 2.0 * l2.ln() - 2.0 * (p * p + l2).ln();
                (lf - model).powi(2)
            })
            .sum()
    };
    // Golden-section search on ln L.
    let (mut a, mut b) = ((p_max * 1e-4).ln(), (p_max * 1e4).ln());
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (cost(c), cost(d));
    while (b - a).abs() > 1e-10 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = cost(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = cost(d);
        }
    }
    (0.5 * (a + b)).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OverlapResult {
    #[serde(rename = "Lambda")]
    pub lambda: f64,
    /// `alpha0 * Lambda`, so the overlap is `exp(-exponent)`.
    pub exponent: f64,
    pub log10_lifetime_seconds: f64,
}

/// Field-strength transform `Phi(t) = int x phi'(x) sin(t x) dx`.
pub fn field_transform(grid: &RadialGrid, potential: &PotentialProfile, t: f64) -> Result<f64> {
    grid.sine_transform(potential.dphi(), t)
}

/// `Lambda = int t [Phi(t) - Phi_mu(t)]^2 dt` and the lifetime estimate
/// `tau ~ exp(alpha0 Lambda) / m0`, with `inverse_mass_seconds` the
/// observed `1/m` in seconds.
pub fn overlap_lambda(
    grid: &RadialGrid,
    phi_e: &PotentialProfile,
    phi_mu: &PotentialProfile,
    constants: &PhysicalConstants,
    inverse_mass_seconds: f64,
) -> Result<OverlapResult> {
    if phi_e.phi().len() != phi_mu.phi().len() {
        return Err(Error::GridMismatch);
    }
    grid.check_len(phi_e.phi())?;
    let diff: Vec<f64> = phi_e.dphi().iter().zip(phi_mu.dphi()).map(|(a, b)| a - b).collect();
    let lambda = lambda_integral(grid, &diff)?;
    let exponent = constants.alpha0 * lambda;
    Ok(OverlapResult { lambda, exponent, log10_lifetime_seconds: exponent / std::f64::consts::LN_10 + (inverse_mass_seconds / constants.m0_over_m).log10() })
}

/// `int t G(t)^2 dt` with `G` the sine transform of `x * dphi`, panels
/// widening geometrically past `t = 1` until the integrand has fallen
/// below `1e-12` of its peak.
fn lambda_integral(grid: &RadialGrid, dphi: &[f64]) -> Result<f64> {
    const T_CAP: f64 = 2.0e3;
    let mut total = 0.0;
    let mut peak = 0.0f64;
    let mut lo = 0.0;
    while lo < T_CAP {
        let width = if lo < 1.0 { 0.05 } else { 0.05 * lo };
        let hi = lo + width;
        let mut panel_max = 0.0f64;
        for (node, w) in GAUSS8 {
            let t = 0.5 * (lo + hi) + 0.5 * width * node;
            let g = grid.sine_transform(dphi, t)?;
            let f = t * g * g;
            panel_max = panel_max.max(f);
            total += 0.5 * width * w * f;
        }
        peak = peak.max(panel_max);
        lo = hi;
        if lo > 2.0 && panel_max <= 1e-12 * peak {
            break;
        }
    }
    Ok(total)
}

/// Electron and excited-configuration potentials per unit bare charge:
/// `xi phi0[rho0]` and `phi0[(rho0 - C rho1) / (1 + C)]`.
pub fn coherent_potentials(solution: &ScfSolution, rho_excited: &[f64], constants: &PhysicalConstants) -> Result<(PotentialProfile, PotentialProfile)> {
    let grid = &solution.grid;
    grid.check_len(rho_excited)?;
    let phi_e = solution.phi0.scaled(constants.xi);
    let c = constants.c;
    let mixed: Vec<f64> = solution.rho.iter().zip(rho_excited).map(|(r0, r1)| (r0 - c * r1) / (1.0 + c)).collect();
    Ok((phi_e, compute_potential(grid, &mixed)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{build_grid, GridScheme};
    use approx::assert_relative_eq;

    #[test]
    fn constants_chain_closes() {
        let c = derive_constants(-3.531, 0.749, ALPHA, 1.0).unwrap();
        assert_relative_eq!(c.alpha0, 3.531f64.powi(2) * 137.036, max_relative = 1e-14);
        assert!((c.alpha0 - 1708.7).abs() < 1.0);
        assert!((c.m0_over_m - 1291.7).abs() < 5.0);
        assert_relative_eq!(c.alpha0 * c.xi, c.a0, max_relative = 1e-14);
        assert_relative_eq!(c.e0 * c.xi, -(4.0 * std::f64::consts::PI * ALPHA).sqrt(), max_relative = 1e-12);
        assert_relative_eq!(c.z0, ALPHA / c.alpha0, max_relative = 1e-12);
        assert_relative_eq!(c.xi, (1.0 - c.c) / (1.0 + c.c), max_relative = 1e-12);
        assert!(c.c > 1.0);
        assert_eq!(c, derive_constants(-3.531, 0.749, ALPHA, 1.0).unwrap());
    }

    #[test]
    fn constants_reject_unphysical_branch() {
        assert!(matches!(derive_constants(0.5, 0.7, ALPHA, 1.0), Err(Error::NonNegativeEigenvalue(_))));
        assert!(derive_constants(-3.0, 0.7, 0.0, 1.0).is_err());
    }

    #[test]
    fn weak_coupling_limit_is_monotone() {
        let chain: Vec<_> = [1.0 / 137.0, 1.0 / 500.0, 1.0 / 1000.0].iter().map(|&al| derive_constants(-3.531, 0.749, al, 1.0).unwrap()).collect();
        for w in chain.windows(2) {
            assert!(w[1].alpha0 > w[0].alpha0);
            assert!(w[1].z0 < w[0].z0);
        }
    }

    #[test]
    fn uniform_density_form_factor() {
        // rho = 1 on [x0, 1]: F(t) = (Si(t) - Si(t x0)) / t.
        let grid = RadialGrid::log_dense_origin(2000, 1e-4, 1.0).unwrap();
        let rho = vec![1.0; grid.len()];
        let momenta = [0.0, 0.3, 1.0, 4.0, 17.0, 60.0];
        let table = form_factor_of_density(&grid, &rho, 1.0, &momenta).unwrap();
        for (&t, &f) in momenta.iter().zip(&table.values) {
            let exact = if t == 0.0 { 1.0 - 1e-4 } else { (si(t) - si(t * 1e-4)) / t };
            assert!((f - exact).abs() < 1e-8, "t={t} {f} {exact}");
        }
    }

    /// Sine integral from its power series or, for large arguments, the
    /// auxiliary-function asymptotics.
    fn si(x: f64) -> f64 {
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

    #[test]
    fn sine_integral_helper() {
        assert!((si(1.0) - 0.946_083_070_367_183).abs() < 1e-14);
        assert!((si(30.0) - 1.566_756_540_030_351_5).abs() < 1e-10);
    }

    #[test]
    fn form_factor_rejects_negative_momentum() {
        let grid = build_grid(200, 30.0, GridScheme::LogDenseOrigin).unwrap();
        let rho = vec![0.0; grid.len()];
        assert!(matches!(form_factor_of_density(&grid, &rho, 1.0, &[0.0, -1.0]), Err(Error::NegativeMomentum(_))));
    }

    #[test]
    fn cutoff_fit_recovers_template() {
        let momenta: Vec<f64> = (1..=40).map(|k| 10.0 * k as f64).collect();
        let values: Vec<f64> = momenta.iter().map(|p| 80f64.powi(4) / (p * p + 6400.0).powi(2)).collect();
        assert!((fit_cutoff(&momenta, &values) - 80.0).abs() < 1e-6);
    }

    #[test]
    fn zero_fields_have_zero_integrals() {
        let grid = build_grid(200, 30.0, GridScheme::LogDenseOrigin).unwrap();
        let zero = vec![0.0; grid.len()];
        let phi = PotentialProfile::zero(&grid);
        assert_eq!(energy_integrals(&grid, &zero, &zero, -3.0, &phi).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn identical_potentials_do_not_decay() {
        let grid = build_grid(400, 30.0, GridScheme::LogDenseOrigin).unwrap();
        let rho: Vec<f64> = grid.points().iter().map(|x| 4.0 * x * x * (-2.0 * x).exp()).collect();
        let phi = compute_potential(&grid, &rho).unwrap();
        let c = derive_constants(-3.531, 0.749, ALPHA, 1.0).unwrap();
        let r = overlap_lambda(&grid, &phi, &phi, &c, 1.288e-21).unwrap();
        assert_eq!(r.lambda, 0.0);
        let short = PotentialProfile::zero(&build_grid(200, 30.0, GridScheme::LogDenseOrigin).unwrap());
        assert!(matches!(overlap_lambda(&grid, &phi, &short, &c, 1.288e-21), Err(Error::GridMismatch)));
    }

    #[test]
    fn hydrogenic_pair_lambda_oracle() {
        // Sources (b^3/2) x^2 exp(-bx) have x phi' = -Q(x)/x with
        // Q = 1 - exp(-bx)(1 + bx + b^2 x^2/2), whose sine transform is
        // -pi/2 + atan(t/b) + bt/(b^2+t^2) + b^3 t/(b^2+t^2)^2.
        let grid = build_grid(4000, 40.0, GridScheme::LogDenseOrigin).unwrap();
        let density = |b: f64| -> Vec<f64> { grid.points().iter().map(|x| 0.5 * b.powi(3) * x * x * (-b * x).exp()).collect() };
        let p1 = compute_potential(&grid, &density(2.0)).unwrap();
        let p2 = compute_potential(&grid, &density(3.0)).unwrap();
        let c = derive_constants(-3.531, 0.749, ALPHA, 1.0).unwrap();
        let got = overlap_lambda(&grid, &p1, &p2, &c, 1.288e-21).unwrap().lambda;
        let phi_t = |b: f64, t: f64| (t / b).atan() + b * t / (b * b + t * t) + b.powi(3) * t / (b * b + t * t).powi(2);
        let f = |t: f64| t * (phi_t(2.0, t) - phi_t(3.0, t)).powi(2);
        let mut oracle = 0.0;
        let h = 1e-3;
        let mut t = 0.5 * h;
        while t < 400.0 {
            oracle += h * f(t);
            t += h;
        }
        assert!((got - oracle).abs() < 1e-7 * oracle, "{got} {oracle}");
    }
}
