//! Stage ordering for each subcommand.

use std::path::Path;

use selfloc::dispersion::{self, Branch};
use selfloc::muon::{solve_muon, MuonResult};
use selfloc::observables::{coherent_potentials, default_momenta, derive_constants, energy_report, form_factor, overlap_lambda, PhysicalConstants};
use selfloc::scf::{scf_solve, ScfSolution};
use selfloc::Error;

use crate::config::RunConfig;
use crate::output::{dispersion_table, emit_figure_data, form_factor_table, profile_table};
use crate::report::{Convergence, Provenance, RunReport, Scalar, Scalars};
use crate::{CliError, Command};

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Solve => "solve",
            Command::Muon => "muon",
            Command::Dispersion => "dispersion",
            Command::Formfactor => "formfactor",
            Command::Overlap => "overlap",
            Command::All => "all",
        }
    }

    fn wants_profile(self) -> bool {
        matches!(self, Command::Solve | Command::All)
    }

    fn wants_muon(self) -> bool {
        matches!(self, Command::Muon | Command::Overlap | Command::All)
    }

    fn wants_dispersion(self) -> bool {
        matches!(self, Command::Dispersion | Command::All)
    }

    fn wants_form_factor(self) -> bool {
        matches!(self, Command::Formfactor | Command::All)
    }

    fn wants_overlap(self) -> bool {
        matches!(self, Command::Overlap | Command::All)
    }
}

/// Runs the stages `command` needs and writes their files under
/// `config.outputs.dir`. The report is written even when a stage fails.
pub fn run(command: Command, config: &RunConfig) -> Result<RunReport, CliError> {
    let dir = &config.outputs.dir;
    ensure_dir(dir)?;
    let physics = &config.physics;
    let grid = &physics.scf.grid;
    let mut report = RunReport {
        provenance: Provenance { artifact_version: crate::report::ARTIFACT_VERSION.into(), config_sha256: config.hash(), subcommand: command.name().into() },
        convergence: Convergence {
            converged: false,
            n_points: grid.n_points,
            x_max: grid.x_max,
            scheme: serde_json::to_value(grid.scheme).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
            iterations: 0,
            tol_residual: physics.scf.tol_residual,
            final_residual: None,
            residual_history: Vec::new(),
        },
        scalars: Scalars::all_skipped(&format!("not computed by `{}`", command.name())),
        notes: Vec::new(),
    };

    let solution = match scf_solve(&physics.scf) {
        Ok(s) => s,
        Err(e) => {
            if let Error::NotConverged { iterations, residual, residual_history } = &e {
                report.convergence.iterations = *iterations;
                report.convergence.final_residual = Some(*residual);
                report.convergence.residual_history = residual_history.clone();
            }
            report.scalars = Scalars::all_skipped("ground state did not converge");
            report.notes.push(e.to_string());
            report.write(dir, &config.outputs.report)?;
            return Err(CliError::Solver(e.to_string()));
        }
    };
    report.convergence.converged = solution.converged;
    report.convergence.iterations = solution.iterations;
    report.convergence.final_residual = solution.residual_history.last().copied();
    report.convergence.residual_history = solution.residual_history.clone();

    let mut failures = Vec::new();
    let result = stages(command, config, &solution, &mut report, &mut failures);
    report.write(dir, &config.outputs.report)?;
    result?;
    if failures.is_empty() {
        Ok(report)
    } else {
        Err(CliError::Solver(failures.join("; ")))
    }
}

fn stages(command: Command, config: &RunConfig, solution: &ScfSolution, report: &mut RunReport, failures: &mut Vec<String>) -> Result<(), CliError> {
    let physics = &config.physics;
    let outputs = &config.outputs;
    let dir = &outputs.dir;
    let s = &mut report.scalars;
    let solver = |e: Error| CliError::Solver(e.to_string());

    s.a0 = Scalar::of(solution.a);
    let energy = energy_report(solution, physics.alpha).map_err(solver)?;
    s.t = Scalar::of(energy.t);
    s.pi = Scalar::of(energy.pi);
    s.virial_residual = Scalar::of(energy.virial_residual);
    s.rest_energy = Scalar::of(energy.e0_units_m0);
    s.rest_energy_functional = Scalar::of(energy.e0_functional_units_m0);
    if !energy.e0_sign_consistent {
        report.notes.push(format!("rest energy: closed form {} and energy functional {} differ in sign", energy.e0_units_m0, energy.e0_functional_units_m0));
    }
    let constants = derive_constants(solution.a, energy.t, physics.alpha, physics.mass).map_err(solver)?;
    fill_constants(s, &constants);

    if command.wants_profile() {
        profile_table(solution)?.write(&dir.join(&outputs.profile))?;
        let (waves, potential) = emit_figure_data(solution)?;
        waves.write(&dir.join(&outputs.wavefunction_figure))?;
        potential.write(&dir.join(&outputs.potential_figure))?;
    }

    let mut muon: Option<MuonResult> = None;
    if command.wants_muon() {
        match solve_muon(solution, &constants, physics.muon_mode) {
            Ok(m) => {
                s.epsilon1 = Scalar::of(m.epsilon1);
                s.epsilon2 = Scalar::of(m.epsilon2);
                s.i_mu = Scalar::of(m.i_mu);
                s.i_1mu = Scalar::of(m.i_1mu);
                s.mass_ratio = Scalar::of(m.mass_ratio);
                s.level_difference_ratio = Scalar::of(m.level_difference_ratio);
                s.orthogonality = Scalar::of(m.orthogonality);
                report.notes.push(format!("level integrals: {}", m.integrand_note));
                muon = Some(m);
            }
            Err(e) => {
                let reason = format!("excited level failed: {e}");
                for field in
                    [&mut s.epsilon1, &mut s.epsilon2, &mut s.i_mu, &mut s.i_1mu, &mut s.mass_ratio, &mut s.level_difference_ratio, &mut s.orthogonality]
                {
                    *field = Scalar::skipped(&reason);
                }
                failures.push(reason);
            }
        }
    }

    if command.wants_dispersion() {
        let e0 = energy.e0_units_m0 * constants.m0_over_m * physics.mass;
        let mut rows = Vec::with_capacity(2 * physics.dispersion_momenta.len());
        for &p in &physics.dispersion_momenta {
            for branch in [Branch::Electron, Branch::Positron] {
                rows.push(dispersion::coefficients(p, e0, branch).map_err(solver)?);
            }
        }
        dispersion_table(&rows).write(&dir.join(&outputs.dispersion))?;
    }

    if command.wants_form_factor() {
        let momenta = default_momenta(&constants, physics.form_factor_points);
        match form_factor(solution, &constants, &momenta) {
            Ok(table) => {
                s.l0_fit = Scalar::of(table.l0_fit);
                form_factor_table(&table, constants.m0_over_m).write(&dir.join(&outputs.form_factor))?;
            }
            Err(e) => {
                s.l0_fit = Scalar::skipped(format!("form factor failed: {e}"));
                failures.push(format!("form factor failed: {e}"));
            }
        }
    }

    if command.wants_overlap() {
        let result = match muon.as_ref().and_then(|m| m.excited.as_ref()) {
            None => Err("overlap needs the excited level".to_string()),
            Some(excited) => coherent_potentials(solution, &excited.density(), &constants)
                .and_then(|(pe, pm)| overlap_lambda(&solution.grid, &pe, &pm, &constants, physics.inverse_mass_seconds))
                .map_err(|e| format!("overlap failed: {e}")),
        };
        match result {
            Ok(o) => {
                s.lambda = Scalar::of(o.lambda);
                s.log10_lifetime_seconds = Scalar::of(o.log10_lifetime_seconds);
            }
            Err(reason) => {
                s.lambda = Scalar::skipped(&reason);
                s.log10_lifetime_seconds = Scalar::skipped(&reason);
                failures.push(reason);
            }
        }
    }
    Ok(())
}

fn fill_constants(s: &mut Scalars, c: &PhysicalConstants) {
    s.alpha0 = Scalar::of(c.alpha0);
    s.e0 = Scalar::of(c.e0);
    s.xi = Scalar::of(c.xi);
    s.c = Scalar::of(c.c);
    s.m0_over_m = Scalar::of(c.m0_over_m);
    s.z0 = Scalar::of(c.z0);
    s.l0_over_m = Scalar::of(c.l0_over_m);
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))
}
