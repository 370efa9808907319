//! Angular-momentum protocol family: Clebsch-Gordan data, the two committed
//! states for each total spin `j`, and the exact fidelity objective in terms of
//! the weight vector `beta`.

mod beta;
mod cg;
mod states;

pub use beta::{
    conjectured_fidelity, fidelity_of_beta, kernel_k, kernels, lambda_coeff, random_feasible_beta, BetaVector,
};
pub use cg::{cg_signed, cg_squared, clebsch_gordan, write_cg_table};
pub use states::{build_states, ProtocolState};

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AngularError {
    #[error("2j must be a positive integer, got {0}")]
    BadSpin(u32),
    #[error("invalid magnetic quantum number 2m_A = {twice_m} for 2j = {twice_j}")]
    BadProjection { twice_j: u32, twice_m: i32 },
    #[error("j_B = {j_b} outside 0..=2j for 2j = {twice_j}")]
    BadTokenSpin { twice_j: u32, j_b: u32 },
    #[error("infeasible beta: {0}")]
    Infeasible(String),
    #[error("operation requires integer j, got 2j = {0}")]
    HalfInteger(u32),
    #[error("states belong to different protocol instances")]
    Incompatible,
}

/// Total spin `j`, stored doubled so half-integers are exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SpinJ(u32);

impl SpinJ {
    pub fn from_twice(twice_j: u32) -> Result<Self, AngularError> {
        if twice_j == 0 {
            return Err(AngularError::BadSpin(twice_j));
        }
        Ok(Self(twice_j))
    }

    /// Integer spin `j >= 1`.
    pub fn integer(j: u32) -> Result<Self, AngularError> {
        Self::from_twice(2 * j)
    }

    pub fn twice(self) -> u32 {
        self.0
    }

    pub fn is_integer(self) -> bool {
        self.0.is_multiple_of(2)
    }

    /// Number of token spins `j_B = 0..=2j`, which is also the number of
    /// proof projections `m_A = -j..=j`.
    pub fn width(self) -> usize {
        self.0 as usize + 1
    }

    /// `2 m_A` for `m_A = -j, -j+1, ..., j`.
    pub fn twice_projections(self) -> impl DoubleEndedIterator<Item = i32> + Clone {
        let t = self.0 as i32;
        (0..=t).map(move |k| 2 * k - t)
    }

    pub(crate) fn check_projection(self, twice_m: i32) -> Result<(), AngularError> {
        let t = self.0 as i32;
        if twice_m.abs() > t || (t - twice_m) % 2 != 0 {
            return Err(AngularError::BadProjection { twice_j: self.0, twice_m });
        }
        Ok(())
    }

    pub(crate) fn check_token(self, j_b: u32) -> Result<(), AngularError> {
        if j_b > self.0 {
            return Err(AngularError::BadTokenSpin { twice_j: self.0, j_b });
        }
        Ok(())
    }
}

impl fmt::Display for SpinJ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}
