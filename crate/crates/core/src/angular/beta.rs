use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::Rng;

use super::cg::cg_squared;
use super::{AngularError, SpinJ};
use crate::exact::{binomial_int, Rational};

/// Weights `beta_{j_B}`, `j_B = 0..=2j`, satisfying normalization,
/// orthogonality (`sum (-1)^{j_B} beta_{j_B} = 0`) and nonnegativity.
///
/// Feasibility is checked exactly on construction.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BetaVector {
    j: SpinJ,
    entries: Vec<Rational>,
}

impl BetaVector {
    pub fn new(j: SpinJ, entries: Vec<Rational>) -> Result<Self, AngularError> {
        if entries.len() != j.width() {
            return Err(AngularError::Infeasible(format!(
                "expected {} entries for j = {j}, got {}",
                j.width(),
                entries.len()
            )));
        }
        if let Some((k, b)) = entries.iter().enumerate().find(|(_, b)| b.is_negative()) {
            return Err(AngularError::Infeasible(format!("beta_{k} = {b} is negative")));
        }
        let total: Rational = entries.iter().sum();
        if !total.is_one() {
            return Err(AngularError::Infeasible(format!("entries sum to {total}")));
        }
        let alt = alternating_sum(&entries);
        if !alt.is_zero() {
            return Err(AngularError::Infeasible(format!("alternating sum is {alt}")));
        }
        Ok(Self { j, entries })
    }

    pub fn j(&self) -> SpinJ {
        self.j
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    pub fn get(&self, j_b: u32) -> &Rational {
        &self.entries[j_b as usize]
    }
}

fn alternating_sum(v: &[Rational]) -> Rational {
    v.iter().enumerate().fold(Rational::zero(), |acc, (k, b)| if k % 2 == 0 { acc + b } else { acc - b })
}

/// Schmidt weight `lambda_{m_A} = sum_{j_B} beta_{j_B} C^2(j, m_A, j_B, j - m_A, j, j)`.
pub fn lambda_coeff(beta: &BetaVector, twice_m_a: i32) -> Result<Rational, AngularError> {
    weighted_cg_sum(beta, twice_m_a, false)
}

/// `K_{m_A} = sum_{j_B} (-1)^{j_B} beta_{j_B} C^2(j, m_A, j_B, j - m_A, j, j)`.
pub fn kernel_k(beta: &BetaVector, twice_m_a: i32) -> Result<Rational, AngularError> {
    weighted_cg_sum(beta, twice_m_a, true)
}

fn weighted_cg_sum(beta: &BetaVector, twice_m_a: i32, alternate: bool) -> Result<Rational, AngularError> {
    let j = beta.j();
    j.check_projection(twice_m_a)?;
    let mut acc = Rational::zero();
    for (j_b, b) in beta.entries().iter().enumerate() {
        if b.is_zero() {
            continue;
        }
        let term = b * cg_squared(j, twice_m_a, j_b as u32)?;
        if alternate && j_b % 2 == 1 {
            acc -= term;
        } else {
            acc += term;
        }
    }
    Ok(acc)
}

/// `K_{m_A}` for `m_A = -j..=j`, in that order.
pub fn kernels(beta: &BetaVector) -> Vec<Rational> {
    beta.j().twice_projections().map(|tm| kernel_k(beta, tm).expect("projection enumerated in range")).collect()
}

/// Exact fidelity of the two token states, `F = sum_{m_A} |K_{m_A}|`.
pub fn fidelity_of_beta(beta: &BetaVector) -> Rational {
    kernels(beta).iter().map(|k| k.abs()).sum()
}

/// `1 / C(2j + 1, j + 1)` for integer `j`.
pub fn conjectured_fidelity(j: SpinJ) -> Result<Rational, AngularError> {
    if !j.is_integer() {
        return Err(AngularError::HalfInteger(j.twice()));
    }
    let jj = (j.twice() / 2) as i64;
    Ok(Rational::new(BigInt::one(), binomial_int(2 * jj + 1, jj + 1)))
}

/// Draws a feasible `beta` with every entry strictly positive.
///
/// Feasibility is equivalent to the even-indexed and odd-indexed entries each
/// summing to 1/2, so each parity class gets independent random integer weights
/// rescaled to 1/2.
pub fn random_feasible_beta<R: Rng + ?Sized>(j: SpinJ, rng: &mut R) -> BetaVector {
    let n = j.width();
    let weights: Vec<i64> = (0..n).map(|_| rng.random_range(1..=1000)).collect();
    let class_sum = |parity: usize| -> i64 { weights.iter().skip(parity).step_by(2).sum() };
    let (even, odd) = (class_sum(0), class_sum(1));
    let entries = weights
        .iter()
        .enumerate()
        .map(|(k, &w)| {
            let total = if k % 2 == 0 { even } else { odd };
            Rational::new(BigInt::from(w), BigInt::from(2 * total))
        })
        .collect();
    BetaVector::new(j, entries).expect("construction is feasible by design")
}
