//! Every chapter of the guide as a module, so `cargo test --doc` runs the
//! listings. mdbook itself cannot resolve the workspace crates.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/grids.md")]
pub mod grids {}
#[doc = include_str!("../../../book/src/channel.md")]
pub mod channel {}
#[doc = include_str!("../../../book/src/self-consistency.md")]
pub mod self_consistency {}
#[doc = include_str!("../../../book/src/constants.md")]
pub mod constants {}
#[doc = include_str!("../../../book/src/excited-level.md")]
pub mod excited_level {}
#[doc = include_str!("../../../book/src/dispersion.md")]
pub mod dispersion {}
#[doc = include_str!("../../../book/src/form-factor-overlap.md")]
pub mod form_factor_overlap {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
