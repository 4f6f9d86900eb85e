//! Spectral analysis of radial Schrödinger operators with attractive or
//! repulsive delta interactions supported on concentric spheres.
//!
//! The radial problem on `(0, R)` is solved by Prüfer oscillation counting;
//! the periodic one-dimensional comparison problem (Kronig-Penney) supplies
//! band edges and Floquet data, and a finite-difference discretisation
//! serves as an independent check.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiments;
pub mod json;
pub mod kp1d;
pub mod lattice;
pub mod oracle;
pub mod propagate;
pub mod radial;
mod rk;
pub mod table;

pub use error::{Error, Result};
pub use kp1d::{
    band_edges, discriminant, floquet_ids, spectral_floor, theta_eigenvalues, BandStructure,
    Interval,
};
pub use lattice::{centrifugal_constant, LatticeSpec, PartialWave, ShellLattice};
pub use propagate::{PruferOptions, PruferState, TransferMatrix};
pub use radial::{
    count_below, eigenvalues_in, stable_gap_eigenvalues, SpectralQuery, SpectralResult,
};
pub use table::Table;
