//! Exact rational linear programming and the fidelity-minimizing program over `beta`.

mod io;
mod program;
mod simplex;

pub use io::{parse_problem, write_problem, write_solution};
pub use program::{reformulate_abs, solve_optimal_beta, solve_pinned, OptimalBeta, Pins, ProgramError};
pub use simplex::{simplex_solve, LpProblem, LpSolution, LpStatus, Relation};
