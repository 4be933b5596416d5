//! Nonequilibrium spectra of a cavity photon coupled to a Beliaev-damped
//! condensate quasiparticle.
//!
//! The crate assembles the frequency-doubled Keldysh action of the two-mode
//! (photon `a`, cosine density wave `c`) model, with the phonon bath entering
//! through a coupling density `ρ(ω)` that vanishes below half the recoil
//! frequency. From the inverted action it extracts correlation spectra,
//! soft-mode frequencies and steady-state populations.
//!
//! All frequencies are in units of the recoil frequency `ω_R`.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop, clippy::field_reassign_with_default)]

pub mod bath;
pub mod error;
pub mod keldysh;
pub mod linalg;
pub mod model;
pub mod observables;
pub mod oracle;
pub mod presets;
pub mod quadrature;
pub mod selfenergy;

pub use error::{Error, Result};
