//! Quantifying coherent superposition between quantum evolutions.
//!
//! The crate is organised bottom-up:
//!
//! * [`matrix`]: dense complex matrices, partial traces, Hermitian
//!   eigendecomposition, relative entropy and the l1 off-diagonal norm.
//! * [`bases`]: Hilbert–Schmidt orthonormal operator bases (the
//!   `√d|i⟩⟨j|` family and the clock-and-shift family) and their Choi states.
//! * [`channels`]: Kraus channels, Choi matrices, process matrices.
//! * [`superposition`]: the free set, the dephasing map and the two
//!   superposition measures, plus maximally superposed unitaries.
//! * [`superops`]: super-operations on Choi matrices, the strict freeness
//!   check and the resource constructions that consume `U_max`.
//! * [`protocols`]: state-vector simulations of switch, collapse, temporal
//!   order and signaling scenarios.
//! * [`bipartite`]: local vs non-local superposition classes and the
//!   correlation state `γ`.
//! * [`io`] and [`scenario`]: JSON file schemas shared with the CLI.

pub mod bases;
pub mod bipartite;
pub mod channels;
mod error;
pub mod io;
pub mod matrix;
pub mod protocols;
pub mod random;
pub mod scenario;
pub mod superops;
pub mod superposition;

pub use error::{Error, Result};
pub use matrix::{ComplexMatrix, Divergence, StateVector, C64};

/// Numerical thresholds shared by every module.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Entrywise Hermiticity check.
    pub herm: f64,
    /// Smallest admissible negative eigenvalue of a positive operator.
    pub psd: f64,
    /// Reconstruction and orthonormality residuals.
    pub recon: f64,
    /// Eigenvalues at or below this are treated as exact zeros.
    pub supp: f64,
    /// Largest off-diagonal modulus still counted as superposition-free.
    pub free: f64,
    /// Trace distance above which marginals count as different.
    pub signal: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        herm: 1e-9,
        psd: 1e-9,
        recon: 1e-10,
        supp: 1e-9,
        free: 1e-9,
        signal: 1e-9,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}
