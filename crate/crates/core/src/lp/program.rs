use num_traits::{One, Zero};
use thiserror::Error;

use super::simplex::{simplex_solve, LpProblem, LpSolution, LpStatus, Relation};
use crate::angular::{cg_squared, fidelity_of_beta, kernels, AngularError, BetaVector, SpinJ};
use crate::exact::{Rational, Sign};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProgramError {
    #[error(transparent)]
    Angular(#[from] AngularError),
    #[error("linear program ended with status {0}")]
    NotOptimal(LpStatus),
    #[error("optimality certificate failed: {0}")]
    Certificate(String),
    #[error("LP optimum {lp} disagrees with exact fidelity {exact}")]
    Inconsistent { lp: Box<Rational>, exact: Box<Rational> },
}

/// Extra equalities used to test the structure of optimal solutions.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Pins {
    /// `beta_k = 0` for `j + 2 <= k <= 2j`.
    pub zero_tail: bool,
    /// `K_{m_A} = 0` for `m_A >= 1`.
    pub zero_positive_kernels: bool,
}

/// Row of `K_{m_A}` coefficients over `beta`.
fn kernel_row(j: SpinJ, twice_m_a: i32) -> Vec<Rational> {
    (0..=j.twice())
        .map(|j_b| {
            let c = cg_squared(j, twice_m_a, j_b).expect("indices enumerated in range");
            if j_b % 2 == 1 {
                -c
            } else {
                c
            }
        })
        .collect()
}

/// Epigraph form of `min sum_m |K_m(beta)|` over feasible `beta`.
///
/// Variables are `beta_0..beta_{2j}` followed by `t_{-j}..t_j`; rows are
/// `t_m - K_m >= 0` and `t_m + K_m >= 0` for each `m` (in that order, `m`
/// ascending), then normalization and orthogonality. The `t` variables carry a
/// zero lower bound, which the epigraph rows already imply.
pub fn reformulate_abs(j: SpinJ) -> LpProblem {
    build_program(j, Pins::default())
}

fn build_program(j: SpinJ, pins: Pins) -> LpProblem {
    let nb = j.width();
    let nt = j.width();
    let n = nb + nt;
    let mut objective = vec![Rational::zero(); n];
    objective[nb..].iter_mut().for_each(|c| *c = Rational::one());
    let mut p = LpProblem::new(objective);

    for (i, tm) in j.twice_projections().enumerate() {
        let k = kernel_row(j, tm);
        for sign in [1i8, -1] {
            let mut row = vec![Rational::zero(); n];
            for (b, c) in k.iter().enumerate() {
                row[b] = if sign == 1 { -c } else { c.clone() };
            }
            row[nb + i] = Rational::one();
            p.add_row(row, Relation::Ge, Rational::zero());
        }
    }

    let mut norm = vec![Rational::zero(); n];
    let mut alt = vec![Rational::zero(); n];
    for b in 0..nb {
        norm[b] = Rational::one();
        alt[b] = if b % 2 == 0 { Rational::one() } else { -Rational::one() };
    }
    p.add_row(norm, Relation::Eq, Rational::one());
    p.add_row(alt, Relation::Eq, Rational::zero());

    if pins.zero_tail {
        // k ranges over j + 2 ..= 2j; for half-integer j start at ceil(j) + 1
        let first = (j.twice() as usize).div_ceil(2) + 2;
        for k in first..nb {
            let mut row = vec![Rational::zero(); n];
            row[k] = Rational::one();
            p.add_row(row, Relation::Eq, Rational::zero());
        }
    }
    if pins.zero_positive_kernels {
        for tm in j.twice_projections().filter(|&tm| tm > 0) {
            let mut row = vec![Rational::zero(); n];
            for (b, c) in kernel_row(j, tm).into_iter().enumerate() {
                row[b] = c;
            }
            p.add_row(row, Relation::Eq, Rational::zero());
        }
    }
    p
}

/// An optimal `beta` with its exact fidelity and kernel signs.
#[derive(Debug, Clone)]
pub struct OptimalBeta {
    pub beta: BetaVector,
    pub fidelity: Rational,
    /// `sign(K_{m_A})` for `m_A = -j..=j`; `Sign::Zero` marks a term that does not
    /// contribute.
    pub signs: Vec<Sign>,
    pub solution: LpSolution,
}

impl OptimalBeta {
    /// Signs of `K_{-1}` and `K_0`, when `j >= 1` is an integer.
    pub fn central_signs(&self) -> Option<(Sign, Sign)> {
        let j = self.beta.j();
        if !j.is_integer() {
            return None;
        }
        let mid = (j.twice() / 2) as usize;
        Some((self.signs[mid - 1], self.signs[mid]))
    }
}

pub fn solve_optimal_beta(j: SpinJ) -> Result<OptimalBeta, ProgramError> {
    solve_pinned(j, Pins::default())
}

/// Solves the program with the optional structural equalities added.
pub fn solve_pinned(j: SpinJ, pins: Pins) -> Result<OptimalBeta, ProgramError> {
    let p = build_program(j, pins);
    let solution = simplex_solve(&p);
    if solution.status != LpStatus::Optimal {
        return Err(ProgramError::NotOptimal(solution.status));
    }
    solution.certify(&p).map_err(ProgramError::Certificate)?;
    let beta = BetaVector::new(j, solution.point[..j.width()].to_vec())?;
    let fidelity = fidelity_of_beta(&beta);
    if fidelity != solution.objective {
        return Err(ProgramError::Inconsistent { lp: Box::new(solution.objective.clone()), exact: Box::new(fidelity) });
    }
    let signs = kernels(&beta).iter().map(Sign::of).collect();
    Ok(OptimalBeta { beta, fidelity, signs, solution })
}
