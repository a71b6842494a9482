//! Self-localized ground state of the reduced radial Dirac system and the
//! quantities derived from it.
//!
//! The usual pipeline is [`scf::scf_solve`], then
//! [`observables::energy_report`] and [`observables::derive_constants`],
//! after which the excited branch, form factor and overlap can be evaluated.

// Negated comparisons are how NaN inputs get rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dirac;
pub mod dispersion;
pub mod error;
pub mod grid;
pub mod muon;
pub mod observables;
mod ode;
mod roots;
pub mod scf;

pub use error::{Error, Result};
