use num_complex::Complex64;

use super::state::{distinct_sectors, sector_positions, StateVector};
use super::{CMatrix, QuantumError};

/// Optimal proof-side unitary for `max_U |<chi0| U ⊗ I |chi1>|`.
#[derive(Debug, Clone)]
pub struct UhlmannSolution {
    /// Unitary on the proof space, in the proof basis order of the states.
    pub unitary: CMatrix,
    /// `<chi0| U ⊗ I |chi1>` evaluated directly.
    pub overlap: Complex64,
    pub block_constrained: bool,
}

impl UhlmannSolution {
    pub fn magnitude(&self) -> f64 {
        self.overlap.norm()
    }
}

/// Unitary `U` maximizing `|tr(U M)|` for square `M`: with `M = W S V^dagger`, `U = V W^dagger`.
fn polar_maximizer(m: &CMatrix) -> CMatrix {
    let n = m.nrows();
    if m.norm() < 1e-14 {
        return CMatrix::identity(n, n);
    }
    let svd = m.clone().svd(true, true);
    let w = svd.u.expect("requested U");
    let v_t = svd.v_t.expect("requested V^T");
    v_t.adjoint() * w.adjoint()
}

/// Uhlmann-optimal proof unitary for a pair of states on the same spaces.
///
/// The cross-Gram operator is `M = Psi1 Psi0^dagger` (proof x proof), so that
/// `<chi0| U ⊗ I |chi1> = tr(U M)`. With `block_constrained`, `U` is built one
/// proof sector at a time and every element between different sectors is an
/// exact zero.
pub fn uhlmann_optimal_unitary(
    chi0: &StateVector,
    chi1: &StateVector,
    block_constrained: bool,
) -> Result<UhlmannSolution, QuantumError> {
    if !chi0.same_spaces(chi1) {
        return Err(QuantumError::SectorMismatch);
    }
    for s in [chi0, chi1] {
        let n2 = s.norm_squared();
        if (n2 - 1.0).abs() > super::NORM_TOL {
            return Err(QuantumError::NotNormalized(n2));
        }
    }
    let m = chi1.amplitudes() * chi0.amplitudes().adjoint();
    let dp = m.nrows();
    let unitary = if block_constrained {
        let mut u = CMatrix::zeros(dp, dp);
        for sector in distinct_sectors(chi0.proof_basis()) {
            let pos = sector_positions(chi0.proof_basis(), sector);
            let block = m.select_rows(&pos).select_columns(&pos);
            let ub = polar_maximizer(&block);
            for (a, &i) in pos.iter().enumerate() {
                for (b, &k) in pos.iter().enumerate() {
                    u[(i, k)] = ub[(a, b)];
                }
            }
        }
        u
    } else {
        polar_maximizer(&m)
    };
    let rotated = apply_proof_unitary(chi1, &unitary)?;
    let overlap = chi0.inner(&rotated)?;
    Ok(UhlmannSolution { unitary, overlap, block_constrained })
}

/// `(U ⊗ I)|psi>`.
pub fn apply_proof_unitary(psi: &StateVector, u: &CMatrix) -> Result<StateVector, QuantumError> {
    let dp = psi.proof_basis().len();
    if u.shape() != (dp, dp) {
        return Err(QuantumError::Dimension(format!("unitary {:?} on proof dimension {dp}", u.shape())));
    }
    Ok(psi.with_amplitudes(u * psi.amplitudes()))
}

/// Alice's bit-independent state `chi ∝ chi0 + e^{-i arg w} (U ⊗ I) chi1`, with
/// `w = <chi0| U ⊗ I |chi1>` from `sol`.
///
/// Unveiling 0 sends `chi` unchanged; unveiling 1 first applies `U^dagger ⊗ I`.
/// Either way the acceptance probability is `(1 + |w|) / 2`.
pub fn cheat_state(chi0: &StateVector, chi1: &StateVector, sol: &UhlmannSolution) -> Result<StateVector, QuantumError> {
    let rotated = apply_proof_unitary(chi1, &sol.unitary)?;
    let phase =
        if sol.overlap.norm() < 1e-14 { Complex64::from(1.0) } else { Complex64::from_polar(1.0, -sol.overlap.arg()) };
    let amps = chi0.amplitudes() + rotated.amplitudes() * phase;
    StateVector::normalized(chi0.proof_basis().to_vec(), chi0.token_basis().to_vec(), amps)
}
