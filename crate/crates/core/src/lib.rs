//! Bragg-scattering spectra of ultracold bosons in a one-dimensional optical
//! lattice, across the Mott-insulator / superfluid transition.
//!
//! The crate computes the differential cross section for off-resonant photon
//! scattering from a gas of lattice bosons, split into an elastic (carrier)
//! component and a Stokes (inelastic) component.  Three backends produce the
//! spectra and cross-validate each other:
//!
//! * [`hilbert`] — exact diagonalization of the Bose-Hubbard chain,
//! * [`mott`] — strong-coupling perturbation theory around the Mott insulator,
//! * [`bogoliubov`] — Bogoliubov theory of the weakly interacting superfluid.
//!
//! The single-particle input (band structure, Wannier functions, Hubbard
//! parameters and the probe coupling coefficients) lives in [`lattice`];
//! spectrum assembly, lineshapes and parameter sweeps live in [`spectra`].

pub mod bogoliubov;
pub mod error;
pub mod hilbert;
pub mod lattice;
pub mod mott;
pub mod spectra;
pub mod units;

pub use error::{Error, Result};
