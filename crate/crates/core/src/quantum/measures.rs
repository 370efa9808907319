use super::linalg::{hermitian_eigen, psd_factor, trace_norm};
use super::state::{BlockMatrix, DensityMatrix};
use super::{CMatrix, QuantumError};

fn half_trace_norm_hermitian(m: &CMatrix) -> Result<f64, QuantumError> {
    let (vals, _) = hermitian_eigen(m)?;
    Ok(0.5 * vals.iter().map(|v| v.abs()).sum::<f64>())
}

/// Fidelity `tr|sqrt(a) sqrt(b)|` for PSD `a`, `b` (not necessarily unit trace).
///
/// Computed as the trace norm of `A^dagger B` where `A A^dagger = a` and
/// `B B^dagger = b`; this equals `tr|sqrt(a) sqrt(b)|` because `A^dagger` and
/// `sqrt(a)` differ by a partial isometry.
pub(crate) fn raw_fidelity(a: &CMatrix, b: &CMatrix) -> Result<f64, QuantumError> {
    let fa = psd_factor(a)?;
    let fb = psd_factor(b)?;
    if fa.ncols() == 0 || fb.ncols() == 0 {
        return Ok(0.0);
    }
    Ok(trace_norm(&(fa.adjoint() * fb)))
}

/// Trace distance `D = 1/2 tr|a - b|`.
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64, QuantumError> {
    if !a.same_basis(b) {
        return Err(QuantumError::SectorMismatch);
    }
    half_trace_norm_hermitian(&(a.matrix() - b.matrix()))
}

/// Uhlmann fidelity `F = tr|sqrt(a) sqrt(b)|`.
pub fn fidelity(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64, QuantumError> {
    if !a.same_basis(b) {
        return Err(QuantumError::SectorMismatch);
    }
    raw_fidelity(a.matrix(), b.matrix())
}

/// Sum of per-sector trace distances `1/2 sum_s tr|a_s - b_s|`.
pub fn block_trace_distance(a: &BlockMatrix, b: &BlockMatrix) -> Result<f64, QuantumError> {
    if !a.same_structure(b) {
        return Err(QuantumError::SectorMismatch);
    }
    a.blocks().values().zip(b.blocks().values()).map(|(x, y)| half_trace_norm_hermitian(&(x - y))).sum()
}

/// Sum of per-sector fidelities of the unnormalized blocks, i.e.
/// `sum_s sqrt(p_{a,s} p_{b,s}) F(sigma_{a,s}, sigma_{b,s})`.
pub fn block_fidelity(a: &BlockMatrix, b: &BlockMatrix) -> Result<f64, QuantumError> {
    if !a.same_structure(b) {
        return Err(QuantumError::SectorMismatch);
    }
    a.blocks().values().zip(b.blocks().values()).map(|(x, y)| raw_fidelity(x, y)).sum()
}

/// Zeroes every element that connects two different sectors.
pub fn dephase_offdiagonal_sectors(rho: &DensityMatrix) -> BlockMatrix {
    BlockMatrix::project(rho)
}
