use std::collections::BTreeMap;

use num_complex::Complex64;
use num_traits::Zero;

use super::beta::BetaVector;
use super::cg::cg_signed;
use super::{AngularError, SpinJ};
use crate::exact::{Rational, Sign, SignedSqrtRational};
use crate::quantum::{CMatrix, Label, Sector, StateVector};

/// One of the two committed states
/// `chi_b = sum_{j_B} (-1)^{b j_B} sqrt(beta_{j_B}) sum_{m_A} C(j, m_A, j_B, j - m_A, j, j) |j, m_A>_p |j_B, j - m_A>_t`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolState {
    beta: BetaVector,
    bit: u8,
    amplitudes: BTreeMap<(i32, u32), SignedSqrtRational>,
}

impl ProtocolState {
    fn build(beta: &BetaVector, bit: u8) -> Self {
        let j = beta.j();
        let mut amplitudes = BTreeMap::new();
        for tm in j.twice_projections() {
            for j_b in 0..=j.twice() {
                let cg = cg_signed(j, tm, j_b).expect("indices enumerated in range");
                let sign = if bit == 1 && j_b % 2 == 1 { -cg.sign() } else { cg.sign() };
                let amp = SignedSqrtRational::new(sign, beta.get(j_b) * cg.square()).expect("nonnegative square");
                amplitudes.insert((tm, j_b), amp);
            }
        }
        Self { beta: beta.clone(), bit, amplitudes }
    }

    pub fn j(&self) -> SpinJ {
        self.beta.j()
    }

    pub fn bit(&self) -> u8 {
        self.bit
    }

    pub fn beta(&self) -> &BetaVector {
        &self.beta
    }

    /// Amplitude on `|j, m_A>_p |j_B, j - m_A>_t`.
    pub fn amplitude(&self, twice_m_a: i32, j_b: u32) -> Option<&SignedSqrtRational> {
        self.amplitudes.get(&(twice_m_a, j_b))
    }

    pub fn amplitudes(&self) -> &BTreeMap<(i32, u32), SignedSqrtRational> {
        &self.amplitudes
    }

    pub fn norm_squared(&self) -> Rational {
        self.amplitudes.values().map(|a| a.square()).sum()
    }

    /// Exact `<self|other>` for two states built from the same `beta`.
    ///
    /// Matching amplitudes differ at most by a sign, so every product is rational.
    pub fn overlap(&self, other: &Self) -> Result<Rational, AngularError> {
        if self.beta != other.beta {
            return Err(AngularError::Incompatible);
        }
        let mut acc = Rational::zero();
        for (k, a) in &self.amplitudes {
            let b = &other.amplitudes[k];
            match a.sign() * b.sign() {
                Sign::Positive => acc += a.square(),
                Sign::Negative => acc -= a.square(),
                Sign::Zero => {}
            }
        }
        Ok(acc)
    }

    /// Numeric state on proof (single sector `j_A = j`, index `m_A + j`) ⊗ token
    /// (sectors `j_B`, index `m_B + j_B`), with the full token space `0 <= j_B <= 2j`.
    pub fn to_state_vector(&self) -> StateVector {
        let j = self.j();
        let tj = j.twice();
        let proof: Vec<Label> = (0..=tj).map(|i| Label::new(Sector::Spin { twice_j: tj }, i)).collect();
        let mut token = Vec::new();
        let mut offset = BTreeMap::new();
        for j_b in 0..=tj {
            offset.insert(j_b, token.len());
            token.extend((0..=2 * j_b).map(|i| Label::new(Sector::Spin { twice_j: 2 * j_b }, i)));
        }
        let mut amps = CMatrix::zeros(proof.len(), token.len());
        for (&(tm, j_b), a) in &self.amplitudes {
            if a.is_zero() {
                continue;
            }
            let row = ((tm + tj as i32) / 2) as usize;
            // m_B = j - m_A, index m_B + j_B
            let twice_m_b = tj as i32 - tm;
            let col = offset[&j_b] + ((twice_m_b + 2 * j_b as i32) / 2) as usize;
            amps[(row, col)] = Complex64::from(a.to_f64());
        }
        StateVector::new(proof, token, amps).expect("protocol states are normalized")
    }
}

/// `(chi_0, chi_1)` for the given weights.
pub fn build_states(beta: &BetaVector) -> (ProtocolState, ProtocolState) {
    (ProtocolState::build(beta, 0), ProtocolState::build(beta, 1))
}
