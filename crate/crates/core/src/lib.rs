//! Security trade-offs of one-way (ancilla-free) quantum bit commitment under
//! particle-number and angular-momentum superselection rules.
//!
//! * [`exact`]: rationals, binomials, signed surds.
//! * [`angular`]: Clebsch-Gordan data, protocol states and the exact fidelity objective.
//! * [`lp`]: exact simplex and the epigraph program that minimizes the fidelity.
//! * [`quantum`]: numeric density operators, trace distance, fidelity, Uhlmann unitaries.
//! * [`abelian`]: particle-number instances and the equivalence checks.
//! * [`protocol`]: Monte Carlo estimates of cheating probabilities.
//! * [`report`]: serializable result records shared with the command-line tool.

pub mod abelian;
pub mod angular;
pub mod exact;
pub mod lp;
pub mod protocol;
pub mod quantum;
pub mod report;
