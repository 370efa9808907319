use nalgebra::{DVector, SymmetricEigen};
use num_complex::Complex64;

use super::{CMatrix, QuantumError, PSD_TOL};

/// Eigenvalues below this are treated as exact zeros when factoring a PSD operator.
///
/// Keeping round-off eigenvalues of order 1e-16 would inject square roots of
/// order 1e-8 into fidelity computations.
pub(crate) const EIG_CUTOFF: f64 = 1e-13;

fn hermiticity_residual(m: &CMatrix) -> f64 {
    (m - m.adjoint()).iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Eigen-decomposition of a Hermitian matrix (eigenvalues unsorted).
pub fn hermitian_eigen(m: &CMatrix) -> Result<(DVector<f64>, CMatrix), QuantumError> {
    let r = hermiticity_residual(m);
    let scale = m.iter().fold(1.0f64, |acc, z| acc.max(z.norm()));
    if r > 1e-10 * scale {
        return Err(QuantumError::NotHermitian(r));
    }
    // symmetrize so the solver sees an exactly Hermitian input
    let h = (m + m.adjoint()) * Complex64::from(0.5);
    let eig = SymmetricEigen::new(h);
    Ok((eig.eigenvalues, eig.eigenvectors))
}

/// `A` with `A A^dagger = m` for a positive semidefinite `m`, keeping only
/// eigenvalues above the cutoff (so `A` has as many columns as the numeric rank).
pub fn psd_factor(m: &CMatrix) -> Result<CMatrix, QuantumError> {
    let (vals, vecs) = hermitian_eigen(m)?;
    let min = vals.iter().cloned().fold(f64::INFINITY, f64::min);
    if min < -PSD_TOL {
        return Err(QuantumError::NotPsd(min));
    }
    let keep: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] > EIG_CUTOFF).collect();
    let mut a = vecs.select_columns(&keep);
    for (c, &i) in keep.iter().enumerate() {
        let s = Complex64::from(vals[i].sqrt());
        for z in a.column_mut(c).iter_mut() {
            *z *= s;
        }
    }
    Ok(a)
}

/// Sum of singular values.
pub fn trace_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().iter().sum()
}
