//! Ground state through lifetime estimate at the default resolution.

use selfloc::muon::{solve_muon, MuonMode};
use selfloc::observables::{coherent_potentials, default_momenta, derive_constants, energy_report, form_factor, overlap_lambda, ALPHA};
use selfloc::scf::{scf_solve, ScfConfig};

fn main() -> selfloc::Result<()> {
    let sol = scf_solve(&ScfConfig::default())?;
    println!("a0 = {:.10} after {} iterations", sol.a, sol.iterations);

    let energy = energy_report(&sol, ALPHA)?;
    let constants = derive_constants(sol.a, energy.t, ALPHA, 1.0)?;
    println!("T = {:.7}  Pi = {:.7}  m0/m = {:.3}  C = {:.6}", energy.t, energy.pi, constants.m0_over_m, constants.c);

    let muon = solve_muon(&sol, &constants, MuonMode::Adiabatic)?;
    println!("levels {:.3e} {:.6}  I_mu = {:.6}  I_1mu = {:.6}", muon.epsilon1, muon.epsilon2, muon.i_mu, muon.i_1mu);

    let ff = form_factor(&sol, &constants, &default_momenta(&constants, 60))?;
    println!("form factor cutoff {:.2} m (2 m0 = {:.2} m)", ff.l0_fit, constants.l0_over_m);

    let excited = muon.excited.expect("adiabatic result carries the excited state");
    let (phi_e, phi_mu) = coherent_potentials(&sol, &excited.density(), &constants)?;
    let overlap = overlap_lambda(&sol.grid, &phi_e, &phi_mu, &constants, 1.288e-21)?;
    println!("Lambda = {:.6}  log10 tau = {:.3}", overlap.lambda, overlap.log10_lifetime_seconds);
    Ok(())
}
