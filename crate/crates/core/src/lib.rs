//! Numerical engine for a quantum thermal diode built from three
//! pairwise-coupled qubits, two of which share a common heat reservoir.
//!
//! The crate assembles the global (secular) Lindblad generator of the
//! three-qubit triangle, with and without the crossing dissipator that
//! appears when the shared reservoir drives degenerate transitions, solves
//! for steady states three independent ways (coefficient-matrix null space,
//! closed forms, long-time integration), and evaluates heat currents,
//! rectification, and classical/quantum correlation measures on top.
//!
//! Everything is dimensionless in units of a reference frequency
//! `omega_0 = 1` with `hbar = k_B = 1`.

pub mod correlations;
pub mod cycles;
pub mod density;
pub mod error;
pub mod liouvillian;
pub mod model;
pub mod params;
pub mod steady;
pub mod sweep;
pub mod thermo;

pub use density::DensityMatrix;
pub use error::Error;
pub use params::{DissipationMode, Qubit, SystemParams};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
/// Dense 8x8 complex matrix in the energy eigenbasis.
pub type Matrix8 = nalgebra::SMatrix<C64, 8, 8>;
/// Dense 8x8 real matrix (population-sector coefficient matrices).
pub type RMatrix8 = nalgebra::SMatrix<f64, 8, 8>;
/// Complex 8-vector.
pub type Vector8 = nalgebra::SVector<C64, 8>;

pub type Result<T> = std::result::Result<T, Error>;
