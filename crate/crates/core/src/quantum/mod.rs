//! Floating-point quantum linear algebra over sector-tagged bases.
//!
//! Every basis vector carries a [`Sector`] tag (particle number, total spin, or
//! the single trivial sector when no superselection rule applies). Reduced
//! density operators keep those tags so that superselection constraints can be
//! enforced block by block.

mod linalg;
mod measures;
mod state;
mod uhlmann;

pub use linalg::{hermitian_eigen, psd_factor, trace_norm};
pub use measures::{block_fidelity, block_trace_distance, dephase_offdiagonal_sectors, fidelity, trace_distance};
pub(crate) use state::sector_positions as state_sector_positions;
pub use state::{BlockMatrix, DensityMatrix, Label, Sector, StateVector};
pub use uhlmann::{apply_proof_unitary, cheat_state, uhlmann_optimal_unitary, UhlmannSolution};

pub use num_complex::Complex64;
pub type CMatrix = nalgebra::DMatrix<Complex64>;

use thiserror::Error;

/// Absolute tolerance used for normalization checks on state vectors.
pub const NORM_TOL: f64 = 1e-12;
/// Most negative eigenvalue accepted for a density operator.
pub const PSD_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuantumError {
    #[error("state is not normalized (norm^2 = {0})")]
    NotNormalized(f64),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("sector structure differs between operands")]
    SectorMismatch,
    #[error("basis labels are not a valid sector enumeration: {0}")]
    BadBasis(String),
    #[error("operator is not positive semidefinite (min eigenvalue {0})")]
    NotPsd(f64),
    #[error("operator is not Hermitian (residual {0})")]
    NotHermitian(f64),
}
