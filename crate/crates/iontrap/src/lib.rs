//! Simulation and analysis toolkit for a single trapped-ion qubit (plus a
//! small register) coupled to quantized harmonic motion.
//!
//! The crate covers the full desk-scale experiment chain:
//!
//! - [`fockspace`]: truncated oscillator Hilbert space, hybrid spin ⊗ motion
//!   states, density matrices, coherent states, and displacement operators.
//! - [`trapphysics`]: classical rf-trap dynamics — stability parameters,
//!   secular frequencies, pseudopotential, and micromotion trajectories.
//! - [`dynamics`]: sideband coupling matrix elements, Rabi frequencies, and
//!   resonant pulse unitaries.
//! - [`protocols`]: composite procedures — sideband cooling, coherent and
//!   cat-state preparation, the single-ion CN gate, the two-ion register
//!   gate, and GHZ preparation.
//! - [`signals`]: blue-sideband fluorescence signal synthesis, shot-noise
//!   sampling, and inversion back to number-state populations.
//! - [`tomography`]: displaced-population analysis, quasiprobability
//!   functions, Wigner maps, and density-matrix reconstruction.
//! - [`spectroscopy`]: Ramsey interferometry with uncorrelated or maximally
//!   entangled registers and projection-noise Monte Carlo.

pub mod dynamics;
pub mod error;
pub mod fockspace;
mod linalg;
pub mod protocols;
pub mod signals;
pub mod spectroscopy;
pub mod tomography;
pub mod trapphysics;

pub use error::{Error, Result};
pub use fockspace::{FockSpace, HybridState, InternalLevel, MotionalDensityMatrix};
