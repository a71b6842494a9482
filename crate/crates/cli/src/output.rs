//! Tables written next to the report.

use std::io::Write;
use std::path::Path;

use selfloc::dispersion::{Branch, DispersionCoefficients};
use selfloc::observables::FormFactorTable;
use selfloc::scf::ScfSolution;

use crate::CliError;

/// Numeric table written as CSV after `#` comment lines.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub comments: Vec<String>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
        let mut file = std::io::BufWriter::new(std::fs::File::create(path).map_err(io)?);
        for line in &self.comments {
            writeln!(file, "# {line}").map_err(io)?;
        }
        let mut csv = csv::Writer::from_writer(file);
        let err = |e: csv::Error| CliError::Io(format!("{}: {e}", path.display()));
        csv.write_record(&self.columns).map_err(err)?;
        for row in &self.rows {
            csv.serialize(row).map_err(err)?;
        }
        csv.flush().map_err(io)
    }
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn check_profile(solution: &ScfSolution) -> Result<usize, CliError> {
    if !solution.converged {
        return Err(CliError::Solver("profile requested from a non-converged solution".into()));
    }
    let n = solution.grid.len();
    let s = &solution.state;
    if s.u.is_empty() || [s.u.len(), s.v.len(), solution.rho.len(), solution.phi0.phi().len()].iter().any(|&m| m != n) {
        return Err(CliError::Solver(format!("profile arrays are empty or do not match the {n}-point grid")));
    }
    Ok(n)
}

/// Full ground-state profile: `x, u, v, rho, phi0`.
pub fn profile_table(solution: &ScfSolution) -> Result<Table, CliError> {
    let n = check_profile(solution)?;
    let x = solution.grid.points();
    let s = &solution.state;
    Ok(Table {
        comments: vec![
            format!("ground state, a0 = {}", solution.a),
            format!("grid: {n} points up to x_max = {}", solution.grid.x_max()),
            "u, v normalized so that int (u^2 + v^2) dx = 1; rho = u^2 + v^2".into(),
            "phi0 is the potential of the unit source rho; the coupled potential is a0 * phi0".into(),
        ],
        columns: vec!["x", "u", "v", "rho", "phi0"],
        rows: (0..n).map(|j| vec![x[j], s.u[j], s.v[j], solution.rho[j], solution.phi0.phi()[j]]).collect(),
    })
}

/// Wave-function and potential tables for plotting, in the reduced variable
/// `x = r / r0` with `r0 = r_e / (2 |a0|)`.
pub fn emit_figure_data(solution: &ScfSolution) -> Result<(Table, Table), CliError> {
    let n = check_profile(solution)?;
    let x = solution.grid.points();
    let a0 = solution.a;
    let scale = format!("x = r / r0 = 2 |a0| r / r_e with a0 = {a0}, so r / r_e = x / {}", 2.0 * a0.abs());
    let waves = Table {
        comments: vec![
            "localized wave functions of the ground state".into(),
            scale.clone(),
            "u0 = x g(x r0), v0 = x f(x r0) up to a common factor, normalized to int (u0^2 + v0^2) dx = 1".into(),
        ],
        columns: vec!["x", "u0", "v0"],
        rows: (0..n).map(|j| vec![x[j], solution.state.u[j], solution.state.v[j]]).collect(),
    };
    let potential = Table {
        comments: vec![
            "self-consistent potential of the ground state".into(),
            scale,
            "phi0(x) = e varphi(x r0) / (2 |a0| m) per unit bare coupling; x phi0 -> 1 far out".into(),
        ],
        columns: vec!["x", "phi0"],
        rows: (0..n).map(|j| vec![x[j], solution.phi0.phi()[j]]).collect(),
    };
    Ok((waves, potential))
}

pub fn form_factor_table(table: &FormFactorTable, m0_over_m: f64) -> Table {
    Table {
        comments: vec![
            "charge form factor of the ground-state density".into(),
            format!("P in units of m; t = P / (m0/m) with m0/m = {m0_over_m}"),
            format!("fitted cutoff L0_fit = {} m", table.l0_fit),
        ],
        columns: vec!["P", "t", "F"],
        rows: table.momenta.iter().zip(&table.values).map(|(&p, &f)| vec![p, p / m0_over_m, f]).collect(),
    }
}

pub fn dispersion_table(rows: &[DispersionCoefficients]) -> Table {
    Table {
        comments: vec!["mixing coefficients on both branches, energies and momenta in units of m".into(), "branch: +1 electron, -1 positron".into()],
        columns: vec!["P", "branch", "E", "E0", "L", "K", "L1", "K1"],
        rows: rows
            .iter()
            .map(|c| {
                let b = match c.branch {
                    Branch::Electron => 1.0,
                    Branch::Positron => -1.0,
                };
                vec![c.p, b, c.e, c.e0, c.l, c.k, c.l1, c.k1]
            })
            .collect(),
    }
}
