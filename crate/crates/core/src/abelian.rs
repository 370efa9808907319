//! Particle-number superselection: number-conserving commitment pairs and the
//! checks that neither security parameter changes under the constraint.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quantum::{
    block_trace_distance, cheat_state, fidelity, hermitian_eigen, trace_distance, uhlmann_optimal_unitary, BlockMatrix,
    CMatrix, DensityMatrix, Label, QuantumError, Sector, StateVector, UhlmannSolution,
};

/// Upper bound on the total Hilbert-space dimension of generated instances.
pub const MAX_TOTAL_DIM: usize = 64;
/// Tolerance for every equivalence residual.
pub const RESIDUAL_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AbelianError {
    #[error("invalid sector dimensions: {0}")]
    BadDims(String),
    #[error("state has weight outside the number-conserving subspace")]
    NotNumberConserving,
    #[error(transparent)]
    Quantum(#[from] QuantumError),
}

/// Local dimensions when the token holds `m` particles (and the proof `n - m`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectorDim {
    pub proof: usize,
    pub token: usize,
}

/// State of total particle number `n`:
/// `sum_m sum_{i_p, i_t} c(i_p, i_t, m) |i_p, n - m>_p |i_t, m>_t`.
#[derive(Debug, Clone, PartialEq)]
pub struct NumberState {
    n: u32,
    dims: Vec<SectorDim>,
    state: StateVector,
}

fn bases(n: u32, dims: &[SectorDim]) -> (Vec<Label>, Vec<Label>) {
    let mut proof = Vec::new();
    let mut token = Vec::new();
    for (m, d) in dims.iter().enumerate() {
        let m = m as u32;
        proof.extend((0..d.proof as u32).map(|i| Label::new(Sector::Number(n - m), i)));
        token.extend((0..d.token as u32).map(|i| Label::new(Sector::Number(m), i)));
    }
    (proof, token)
}

fn particle_count(l: &Label) -> u32 {
    match l.sector {
        Sector::Number(k) => k,
        _ => unreachable!("number states only carry number sectors"),
    }
}

pub fn validate_dims(n: u32, dims: &[SectorDim]) -> Result<(), AbelianError> {
    if n == 0 {
        return Err(AbelianError::BadDims("total number must be at least 1".into()));
    }
    if dims.len() != n as usize + 1 {
        return Err(AbelianError::BadDims(format!("need {} sectors, got {}", n + 1, dims.len())));
    }
    if dims.iter().any(|d| d.proof == 0 || d.token == 0) {
        return Err(AbelianError::BadDims("every sector needs dimension >= 1".into()));
    }
    let total = total_dim(dims);
    if total > MAX_TOTAL_DIM {
        return Err(AbelianError::BadDims(format!("total dimension {total} exceeds {MAX_TOTAL_DIM}")));
    }
    Ok(())
}

/// Dimension of the number-`n` subspace.
pub fn total_dim(dims: &[SectorDim]) -> usize {
    dims.iter().map(|d| d.proof * d.token).sum()
}

impl NumberState {
    /// Builds a normalized state from per-sector coefficient blocks
    /// (`blocks[m]` is `proof x token` for token count `m`).
    pub fn from_blocks(n: u32, dims: Vec<SectorDim>, blocks: &[CMatrix]) -> Result<Self, AbelianError> {
        validate_dims(n, &dims)?;
        if blocks.len() != dims.len() || blocks.iter().zip(&dims).any(|(b, d)| b.shape() != (d.proof, d.token)) {
            return Err(AbelianError::BadDims("block shapes do not match dimensions".into()));
        }
        let (proof, token) = bases(n, &dims);
        let mut amps = CMatrix::zeros(proof.len(), token.len());
        let (mut r, mut c) = (0, 0);
        for (b, d) in blocks.iter().zip(&dims) {
            amps.view_mut((r, c), (d.proof, d.token)).copy_from(b);
            r += d.proof;
            c += d.token;
        }
        let state = StateVector::normalized(proof, token, amps)?;
        Ok(Self { n, dims, state })
    }

    /// Wraps an arbitrary state, checking that it lives in the number-`n` subspace.
    pub fn from_state(n: u32, dims: Vec<SectorDim>, state: StateVector) -> Result<Self, AbelianError> {
        validate_dims(n, &dims)?;
        let (proof, token) = bases(n, &dims);
        if state.proof_basis() != proof.as_slice() || state.token_basis() != token.as_slice() {
            return Err(AbelianError::BadDims("state basis does not match dimensions".into()));
        }
        let s = Self { n, dims, state };
        if !s.conserves_number() {
            return Err(AbelianError::NotNumberConserving);
        }
        Ok(s)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn dims(&self) -> &[SectorDim] {
        &self.dims
    }

    pub fn state(&self) -> &StateVector {
        &self.state
    }

    /// Every amplitude pairing proof count `k` with token count `m` is an exact
    /// zero unless `k + m = n`.
    pub fn conserves_number(&self) -> bool {
        let a = self.state.amplitudes();
        for (i, lp) in self.state.proof_basis().iter().enumerate() {
            for (k, lt) in self.state.token_basis().iter().enumerate() {
                if particle_count(lp) + particle_count(lt) != self.n && a[(i, k)] != Complex64::from(0.0) {
                    return false;
                }
            }
        }
        true
    }
}

/// Draws a normalized number-`n` state with complex Gaussian coefficients.
fn gaussian_blocks(dims: &[SectorDim], rng: &mut ChaCha8Rng) -> Vec<CMatrix> {
    dims.iter()
        .map(|d| {
            CMatrix::from_fn(d.proof, d.token, |_, _| {
                Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
            })
        })
        .collect()
}

/// Two orthonormal number-`n` states, reproducible from `seed`.
///
/// The second state is a fresh Gaussian draw with its component along the first
/// removed (twice, for numerical orthogonality).
pub fn random_orthogonal_pair(
    n: u32,
    dims: &[SectorDim],
    seed: u64,
) -> Result<(NumberState, NumberState), AbelianError> {
    validate_dims(n, dims)?;
    if total_dim(dims) < 2 {
        return Err(AbelianError::BadDims("need dimension >= 2 for an orthogonal pair".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let first = NumberState::from_blocks(n, dims.to_vec(), &gaussian_blocks(dims, &mut rng))?;
    let draw = NumberState::from_blocks(n, dims.to_vec(), &gaussian_blocks(dims, &mut rng))?;
    let a = first.state.amplitudes();
    let mut b = draw.state.amplitudes().clone();
    for _ in 0..2 {
        let proj: Complex64 = a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum();
        b -= a * proj;
    }
    let second = StateVector::normalized(first.state.proof_basis().to_vec(), first.state.token_basis().to_vec(), b)?;
    let second = NumberState::from_state(n, dims.to_vec(), second)?;
    Ok((first, second))
}

/// `chi_0 = |0>_p |1 particle>_t`, `chi_1 = |1 particle>_p |0>_t`.
pub fn orthogonal_token_pair() -> (NumberState, NumberState) {
    let dims = vec![SectorDim { proof: 1, token: 1 }; 2];
    let one = CMatrix::from_element(1, 1, Complex64::from(1.0));
    let zero = CMatrix::zeros(1, 1);
    let chi0 = NumberState::from_blocks(1, dims.clone(), &[zero.clone(), one.clone()]).unwrap();
    let chi1 = NumberState::from_blocks(1, dims, &[one, zero]).unwrap();
    (chi0, chi1)
}

/// `(|0,1> + |1,0>)/sqrt2` and `(|0,1> - |1,0>)/sqrt2`, whose tokens are identical.
pub fn symmetric_pair() -> (NumberState, NumberState) {
    let dims = vec![SectorDim { proof: 1, token: 1 }; 2];
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let e = |x: f64| CMatrix::from_element(1, 1, Complex64::from(x));
    let chi0 = NumberState::from_blocks(1, dims.clone(), &[e(h), e(h)]).unwrap();
    let chi1 = NumberState::from_blocks(1, dims, &[e(h), e(-h)]).unwrap();
    (chi0, chi1)
}

/// `rho = (+)_m p_m sigma_m` on the token.
#[derive(Debug, Clone)]
pub struct BlockDecomposition {
    pub probabilities: BTreeMap<u32, f64>,
    /// Unit-trace sector states; sectors with `p_m = 0` are absent.
    pub states: BTreeMap<u32, CMatrix>,
    /// Largest element of the full reduced operator outside the number blocks.
    pub off_block_max: f64,
}

impl BlockDecomposition {
    /// Reassembles `(+)_m p_m sigma_m` as a block operator.
    pub fn reassemble(&self) -> BlockMatrix {
        let blocks = self
            .probabilities
            .keys()
            .map(|m| {
                let b = match self.states.get(m) {
                    Some(s) => s * Complex64::from(self.probabilities[m]),
                    None => CMatrix::zeros(0, 0),
                };
                (Sector::Number(*m), b)
            })
            .collect();
        BlockMatrix::new(blocks).expect("square blocks")
    }
}

fn token_operator(s: &NumberState) -> Result<DensityMatrix, AbelianError> {
    Ok(s.state.partial_trace_proof()?)
}

pub fn block_decompose(s: &NumberState) -> Result<BlockDecomposition, AbelianError> {
    let rho = token_operator(s)?;
    let off_block_max = rho.off_sector_max();
    let blocks = BlockMatrix::from_dense(&rho, f64::INFINITY)?;
    let mut probabilities = BTreeMap::new();
    let mut states = BTreeMap::new();
    for (sector, b) in blocks.blocks() {
        let Sector::Number(m) = *sector else { unreachable!() };
        let p = b.trace().re;
        probabilities.insert(m, p);
        if p > 0.0 {
            states.insert(m, b / Complex64::from(p));
        }
    }
    Ok(BlockDecomposition { probabilities, states, off_block_max })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GainReport {
    /// `1/2 D(rho_0, rho_1)` from the full eigen-decomposition.
    pub gain_unconstrained: f64,
    /// `1/2 sum_m D_m` from a measurement built sector by sector.
    pub gain_constrained: f64,
    /// Largest element of `rho_0 - rho_1` between different number sectors.
    pub off_block_residual: f64,
    /// `||[Pi_+, N_t]||` for the projector onto the positive part of `rho_0 - rho_1`.
    pub commutator_residual: f64,
    pub gain_residual: f64,
    pub pass: bool,
}

pub fn verify_gain_equivalence(pair: &(NumberState, NumberState)) -> Result<GainReport, AbelianError> {
    let r0 = token_operator(&pair.0)?;
    let r1 = token_operator(&pair.1)?;
    let diff = DensityMatrix::new(r0.basis().to_vec(), r0.matrix() - r1.matrix())?;
    let off_block_residual = diff.off_sector_max();

    let gain_unconstrained = 0.5 * trace_distance(&r0, &r1)?;
    let b0 = BlockMatrix::from_dense(&r0, f64::INFINITY)?;
    let b1 = BlockMatrix::from_dense(&r1, f64::INFINITY)?;
    let gain_constrained = 0.5 * block_trace_distance(&b0, &b1)?;

    let (vals, vecs) = hermitian_eigen(diff.matrix())?;
    let d = diff.dim();
    let mut proj = CMatrix::zeros(d, d);
    for (k, &v) in vals.iter().enumerate() {
        if v > 1e-10 {
            let col = vecs.column(k);
            proj += col * col.adjoint();
        }
    }
    let number = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        d,
        diff.basis().iter().map(|l| Complex64::from(particle_count(l) as f64)),
    ));
    let commutator_residual = (&proj * &number - &number * &proj).norm();

    let gain_residual = (gain_constrained - gain_unconstrained).abs();
    let pass = [off_block_residual, commutator_residual, gain_residual].iter().all(|r| *r <= RESIDUAL_TOL);
    Ok(GainReport {
        gain_unconstrained,
        gain_constrained,
        off_block_residual,
        commutator_residual,
        gain_residual,
        pass,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ControlReport {
    /// `1/2 F(rho_0, rho_1)`.
    pub control_unconstrained: f64,
    /// `1/2 |<chi_0| U_p ⊗ I |chi_1>|` with `U_p` block diagonal in proof number.
    pub control_constrained: f64,
    /// `1/2 sum_m sqrt(p_{0,m} p_{1,m}) F(sigma_{0,m}, sigma_{1,m})`.
    pub control_block_formula: f64,
    pub control_residual: f64,
    pub decomposition_residual: f64,
    /// Largest modulus of `U_p` between different proof sectors (structurally zero).
    pub unitary_off_block: f64,
    pub pass: bool,
}

fn proof_off_block(s: &StateVector, u: &CMatrix) -> f64 {
    let mut m: f64 = 0.0;
    for (i, a) in s.proof_basis().iter().enumerate() {
        for (k, b) in s.proof_basis().iter().enumerate() {
            if a.sector != b.sector {
                m = m.max(u[(i, k)].norm());
            }
        }
    }
    m
}

/// Optimal block-diagonal proof unitary for the pair.
pub fn constrained_uhlmann(pair: &(NumberState, NumberState)) -> Result<UhlmannSolution, AbelianError> {
    Ok(uhlmann_optimal_unitary(&pair.0.state, &pair.1.state, true)?)
}

pub fn verify_control_equivalence(pair: &(NumberState, NumberState)) -> Result<ControlReport, AbelianError> {
    let r0 = token_operator(&pair.0)?;
    let r1 = token_operator(&pair.1)?;
    let control_unconstrained = 0.5 * fidelity(&r0, &r1)?;

    let sol = constrained_uhlmann(pair)?;
    let control_constrained = 0.5 * sol.magnitude();
    let unitary_off_block = proof_off_block(&pair.0.state, &sol.unitary);

    let d0 = block_decompose(&pair.0)?;
    let d1 = block_decompose(&pair.1)?;
    let mut block_sum = 0.0;
    for (m, p0) in &d0.probabilities {
        let p1 = d1.probabilities[m];
        if let (Some(s0), Some(s1)) = (d0.states.get(m), d1.states.get(m)) {
            let f = fidelity(
                &DensityMatrix::new(sector_labels(*m, s0.nrows()), s0.clone())?,
                &DensityMatrix::new(sector_labels(*m, s1.nrows()), s1.clone())?,
            )?;
            block_sum += (p0 * p1).sqrt() * f;
        }
    }
    let control_block_formula = 0.5 * block_sum;
    let control_residual = (control_constrained - control_unconstrained).abs();
    let decomposition_residual = (control_block_formula - control_unconstrained).abs();
    let pass = control_residual <= RESIDUAL_TOL && decomposition_residual <= RESIDUAL_TOL && unitary_off_block == 0.0;
    Ok(ControlReport {
        control_unconstrained,
        control_constrained,
        control_block_formula,
        control_residual,
        decomposition_residual,
        unitary_off_block,
        pass,
    })
}

fn sector_labels(m: u32, d: usize) -> Vec<Label> {
    (0..d as u32).map(|i| Label::new(Sector::Number(m), i)).collect()
}

/// Alice's cheating state built with the block-constrained Uhlmann unitary.
pub fn build_cheat_state(
    pair: &(NumberState, NumberState),
    sol: &UhlmannSolution,
) -> Result<NumberState, AbelianError> {
    let chi = cheat_state(&pair.0.state, &pair.1.state, sol)?;
    NumberState::from_state(pair.0.n, pair.0.dims.clone(), chi)
}

/// One line of the verification report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub seed: u64,
    pub n: u32,
    pub dims: Vec<SectorDim>,
    pub gain_unconstrained: f64,
    pub gain_constrained: f64,
    pub control_unconstrained: f64,
    pub control_constrained: f64,
    pub gain_residual: f64,
    pub control_residual: f64,
    pub decomposition_residual: f64,
    pub pass: bool,
}

/// Instance shape derived from a seed: `n` in `1..=n_max`, sector dimensions in `1..=3`.
pub fn instance_shape(seed: u64, n_max: u32) -> (u32, Vec<SectorDim>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_d1b5);
    let n = rng.random_range(1..=n_max.max(1));
    loop {
        let dims: Vec<SectorDim> =
            (0..=n).map(|_| SectorDim { proof: rng.random_range(1..=3), token: rng.random_range(1..=3) }).collect();
        if total_dim(&dims) <= MAX_TOTAL_DIM {
            return (n, dims);
        }
    }
}

pub fn verify_pair(seed: u64, pair: &(NumberState, NumberState)) -> Result<InstanceRecord, AbelianError> {
    let g = verify_gain_equivalence(pair)?;
    let c = verify_control_equivalence(pair)?;
    Ok(InstanceRecord {
        seed,
        n: pair.0.n,
        dims: pair.0.dims.clone(),
        gain_unconstrained: g.gain_unconstrained,
        gain_constrained: g.gain_constrained,
        control_unconstrained: c.control_unconstrained,
        control_constrained: c.control_constrained,
        gain_residual: g.gain_residual,
        control_residual: c.control_residual,
        decomposition_residual: c.decomposition_residual,
        pass: g.pass && c.pass,
    })
}

/// Verifies `count` random instances; instance `i` uses seed `seed + i`.
/// Output order follows `i` regardless of scheduling.
pub fn run_batch(count: usize, n_max: u32, seed: u64) -> Result<Vec<InstanceRecord>, AbelianError> {
    (0..count as u64)
        .into_par_iter()
        .map(|i| {
            let s = seed.wrapping_add(i);
            let (n, dims) = instance_shape(s, n_max);
            let pair = random_orthogonal_pair(n, &dims, s)?;
            verify_pair(s, &pair)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::apply_proof_unitary;
    use approx::assert_abs_diff_eq;

    #[test]
    fn degenerate_dims_rejected() {
        assert!(random_orthogonal_pair(0, &[SectorDim { proof: 1, token: 1 }], 0).is_err());
        assert!(random_orthogonal_pair(1, &[SectorDim { proof: 1, token: 0 }, SectorDim { proof: 1, token: 1 }], 0)
            .is_err());
        assert!(random_orthogonal_pair(1, &[SectorDim { proof: 1, token: 1 }], 0).is_err());
        let big = vec![SectorDim { proof: 6, token: 6 }; 2];
        assert!(random_orthogonal_pair(1, &big, 0).is_err());
    }

    #[test]
    fn seeded_pairs_are_orthonormal_and_reproducible() {
        let dims = vec![
            SectorDim { proof: 2, token: 1 },
            SectorDim { proof: 1, token: 2 },
            SectorDim { proof: 2, token: 2 },
            SectorDim { proof: 1, token: 1 },
        ];
        let (a, b) = random_orthogonal_pair(3, &dims, 17).unwrap();
        assert!(a.state().inner(b.state()).unwrap().norm() <= 1e-12);
        assert_abs_diff_eq!(b.state().norm_squared(), 1.0, epsilon = 1e-12);
        assert!(a.conserves_number() && b.conserves_number());
        let (a2, b2) = random_orthogonal_pair(3, &dims, 17).unwrap();
        assert_eq!((a, b), (a2, b2));

        let ones = vec![SectorDim { proof: 1, token: 1 }; 2];
        let (c, d) = random_orthogonal_pair(1, &ones, 4).unwrap();
        assert!(c.state().inner(d.state()).unwrap().norm() <= 1e-12);
    }

    #[test]
    fn decomposition_of_simple_states() {
        // token holds 2 particles with certainty
        let dims = vec![SectorDim { proof: 1, token: 1 }; 3];
        let blocks = [CMatrix::zeros(1, 1), CMatrix::zeros(1, 1), CMatrix::from_element(1, 1, Complex64::from(1.0))];
        let s = NumberState::from_blocks(2, dims, &blocks).unwrap();
        let d = block_decompose(&s).unwrap();
        assert_eq!(d.probabilities[&2], 1.0);
        assert_eq!(d.probabilities[&0], 0.0);

        let (sym, _) = symmetric_pair();
        let d = block_decompose(&sym).unwrap();
        assert_abs_diff_eq!(d.probabilities[&0], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(d.probabilities[&1], 0.5, epsilon = 1e-15);
    }

    #[test]
    fn reassembly_reproduces_reduced_operator() {
        let dims =
            vec![SectorDim { proof: 2, token: 2 }, SectorDim { proof: 1, token: 3 }, SectorDim { proof: 3, token: 1 }];
        let (a, _) = random_orthogonal_pair(2, &dims, 8).unwrap();
        let d = block_decompose(&a).unwrap();
        assert_eq!(d.off_block_max, 0.0);
        let rho = a.state().partial_trace_proof().unwrap();
        let back = d.reassemble().to_dense();
        assert!((back.matrix() - rho.matrix()).norm() <= 1e-12);
    }

    #[test]
    fn hand_picked_pairs() {
        let orth = orthogonal_token_pair();
        let g = verify_gain_equivalence(&orth).unwrap();
        let c = verify_control_equivalence(&orth).unwrap();
        assert_abs_diff_eq!(g.gain_unconstrained, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(g.gain_constrained, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(c.control_unconstrained, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c.control_constrained, 0.0, epsilon = 1e-12);
        assert!(g.pass && c.pass);

        let sym = symmetric_pair();
        let g = verify_gain_equivalence(&sym).unwrap();
        let c = verify_control_equivalence(&sym).unwrap();
        assert_abs_diff_eq!(g.gain_unconstrained, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c.control_unconstrained, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(c.control_constrained, 0.5, epsilon = 1e-12);
        assert!(g.pass && c.pass);
    }

    #[test]
    fn cheat_state_for_orthogonal_tokens() {
        let pair = orthogonal_token_pair();
        let sol = constrained_uhlmann(&pair).unwrap();
        let chi = build_cheat_state(&pair, &sol).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let expect = (pair.0.state().amplitudes() + pair.1.state().amplitudes()) * Complex64::from(h);
        assert!((chi.state().amplitudes() - expect).norm() < 1e-15);
    }

    #[test]
    fn cheat_state_reproduces_control() {
        let dims =
            vec![SectorDim { proof: 2, token: 1 }, SectorDim { proof: 2, token: 2 }, SectorDim { proof: 1, token: 2 }];
        let pair = random_orthogonal_pair(2, &dims, 99).unwrap();
        let sol = constrained_uhlmann(&pair).unwrap();
        let chi = build_cheat_state(&pair, &sol).unwrap();
        assert!(chi.conserves_number());
        assert_abs_diff_eq!(chi.state().norm_squared(), 1.0, epsilon = 1e-12);
        let p0 = pair.0.state().inner(chi.state()).unwrap().norm_sqr();
        let back = apply_proof_unitary(chi.state(), &sol.unitary.adjoint()).unwrap();
        let p1 = pair.1.state().inner(&back).unwrap().norm_sqr();
        let control = 0.5 * (p0 + p1) - 0.5;
        assert_abs_diff_eq!(control, 0.5 * sol.magnitude(), epsilon = 1e-9);
    }

    #[test]
    fn batch_is_deterministic() {
        let a = run_batch(5, 3, 42).unwrap();
        let b = run_batch(5, 3, 42).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(|r| r.pass));
    }
}
