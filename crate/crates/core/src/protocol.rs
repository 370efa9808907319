//! Monte Carlo runs of the one-way commitment protocol with honest and cheating
//! parties, checked against the analytic optimum of each cheating strategy.
//!
//! Trials are split into chunks of [`CHUNK`] trials. Chunk `k` draws from
//! `ChaCha8Rng::seed_from_u64(seed)` switched to stream `k`, so counts depend
//! only on `(instance, trials, seed)` and not on how chunks are scheduled.

use std::fmt;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::abelian::NumberState;
use crate::angular::{build_states, BetaVector};
use crate::quantum::{
    apply_proof_unitary, block_trace_distance, cheat_state, dephase_offdiagonal_sectors, hermitian_eigen,
    trace_distance, uhlmann_optimal_unitary, BlockMatrix, CMatrix, DensityMatrix, QuantumError, StateVector,
    UhlmannSolution,
};

pub const CHUNK: u64 = 8192;
pub const DEFAULT_TRIALS: u64 = 100_000;

/// Eigenvalues of `rho_0 - rho_1` within this of zero make Bob toss a coin.
const TIE_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProtocolError {
    #[error("committed states are not orthogonal (|<chi0|chi1>| = {0:e})")]
    NotOrthogonal(f64),
    #[error(transparent)]
    Quantum(#[from] QuantumError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// No superselection rule.
    None,
    /// Particle-number conservation.
    Number,
    /// Total angular momentum conservation.
    AngularMomentum,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::None => "none",
            Mode::Number => "number",
            Mode::AngularMomentum => "angular-momentum",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    Honest,
    BobCheat,
    AliceCheat,
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Honest => "honest",
            Strategy::BobCheat => "bob-cheat",
            Strategy::AliceCheat => "alice-cheat",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrategyOutcome {
    pub trials: u64,
    pub successes: u64,
    pub estimate: f64,
    pub std_error: f64,
}

impl StrategyOutcome {
    pub fn from_counts(trials: u64, successes: u64) -> Self {
        let estimate = if trials == 0 { 0.0 } else { successes as f64 / trials as f64 };
        let std_error = if trials == 0 { 0.0 } else { (estimate * (1.0 - estimate) / trials as f64).sqrt() };
        Self { trials, successes, estimate, std_error }
    }

    /// `(estimate - analytic) / std_error`; `None` when the standard error vanishes
    /// and the estimate differs from the analytic value.
    pub fn z_score(&self, analytic: f64) -> Option<f64> {
        let d = self.estimate - analytic;
        if self.std_error > 0.0 {
            Some(d / self.std_error)
        } else if d.abs() <= 1e-12 {
            Some(0.0)
        } else {
            None
        }
    }

    /// Within `k` standard errors of `analytic`.
    pub fn consistent_with(&self, analytic: f64, k: f64) -> bool {
        self.z_score(analytic).is_some_and(|z| z.abs() <= k)
    }
}

/// Bob's sealing-phase measurement: rank-one projectors with the bit he guesses.
#[derive(Debug, Clone)]
pub struct Measurement {
    pub vectors: CMatrix,
    /// `Some(b)` to guess `b`, `None` to toss a coin.
    pub guesses: Vec<Option<u8>>,
    /// Largest modulus of any measurement vector component outside its own
    /// sector (zero whenever a superselection mode is active).
    pub off_sector: f64,
}

/// Orthogonal committed pair plus everything the simulator needs about it.
#[derive(Debug, Clone)]
pub struct ProtocolInstance {
    pub descriptor: String,
    pub mode: Mode,
    chi0: StateVector,
    chi1: StateVector,
    rho0: DensityMatrix,
    rho1: DensityMatrix,
}

impl ProtocolInstance {
    pub fn new(
        descriptor: impl Into<String>,
        mode: Mode,
        chi0: StateVector,
        chi1: StateVector,
    ) -> Result<Self, ProtocolError> {
        let ov = chi0.inner(&chi1)?.norm();
        if ov > 1e-10 {
            return Err(ProtocolError::NotOrthogonal(ov));
        }
        let rho0 = chi0.partial_trace_proof()?;
        let rho1 = chi1.partial_trace_proof()?;
        Ok(Self { descriptor: descriptor.into(), mode, chi0, chi1, rho0, rho1 })
    }

    pub fn angular(beta: &BetaVector) -> Result<Self, ProtocolError> {
        let (c0, c1) = build_states(beta);
        let desc = format!("angular 2j={}", beta.j().twice());
        Self::new(desc, Mode::AngularMomentum, c0.to_state_vector(), c1.to_state_vector())
    }

    pub fn number(pair: &(NumberState, NumberState)) -> Result<Self, ProtocolError> {
        let desc = format!("number n={}", pair.0.n());
        Self::new(desc, Mode::Number, pair.0.state().clone(), pair.1.state().clone())
    }

    pub fn states(&self) -> (&StateVector, &StateVector) {
        (&self.chi0, &self.chi1)
    }

    /// What Bob can see of `rho_0 - rho_1`: everything without a rule, the
    /// number blocks under number conservation, and the `j_B` blocks (after
    /// discarding off-diagonal coherences) under angular-momentum conservation.
    fn visible_blocks(&self) -> Option<(BlockMatrix, BlockMatrix)> {
        match self.mode {
            Mode::None => None,
            Mode::Number | Mode::AngularMomentum => {
                Some((dephase_offdiagonal_sectors(&self.rho0), dephase_offdiagonal_sectors(&self.rho1)))
            }
        }
    }

    /// Helstrom measurement, built per sector when a rule is active.
    pub fn bob_measurement(&self) -> Result<Measurement, ProtocolError> {
        let basis = self.rho0.basis();
        let d = basis.len();
        let mut vectors = CMatrix::zeros(d, d);
        let mut guesses = Vec::with_capacity(d);
        let guess = |v: f64| {
            if v > TIE_TOL {
                Some(0)
            } else if v < -TIE_TOL {
                Some(1)
            } else {
                None
            }
        };
        match self.visible_blocks() {
            None => {
                let (vals, vecs) = hermitian_eigen(&(self.rho0.matrix() - self.rho1.matrix()))?;
                vectors.copy_from(&vecs);
                guesses.extend(vals.iter().map(|&v| guess(v)));
            }
            Some((b0, b1)) => {
                let mut col = 0;
                for ((sector, x), y) in b0.blocks().iter().zip(b1.blocks().values()) {
                    let (vals, vecs) = hermitian_eigen(&(x - y))?;
                    let rows = crate::quantum::state_sector_positions(basis, *sector);
                    for k in 0..vals.len() {
                        for (a, &r) in rows.iter().enumerate() {
                            vectors[(r, col)] = vecs[(a, k)];
                        }
                        guesses.push(guess(vals[k]));
                        col += 1;
                    }
                }
            }
        }
        let mut off_sector: f64 = 0.0;
        if self.mode != Mode::None {
            for c in 0..d {
                let home = (0..d).max_by(|&a, &b| vectors[(a, c)].norm().total_cmp(&vectors[(b, c)].norm())).unwrap();
                for r in 0..d {
                    if basis[r].sector != basis[home].sector {
                        off_sector = off_sector.max(vectors[(r, c)].norm());
                    }
                }
            }
        }
        Ok(Measurement { vectors, guesses, off_sector })
    }

    /// Best information gain available to Bob under the mode's rule.
    pub fn analytic_gain(&self) -> Result<f64, ProtocolError> {
        Ok(match self.visible_blocks() {
            None => 0.5 * trace_distance(&self.rho0, &self.rho1)?,
            Some((b0, b1)) => 0.5 * block_trace_distance(&b0, &b1)?,
        })
    }

    /// Uhlmann unitary Alice is allowed to apply to the proof after committing.
    pub fn alice_unitary(&self) -> Result<UhlmannSolution, ProtocolError> {
        Ok(uhlmann_optimal_unitary(&self.chi0, &self.chi1, self.mode != Mode::None)?)
    }

    /// `1/2 |<chi_0| U_p ⊗ I |chi_1>|` for the optimal allowed `U_p`.
    pub fn analytic_control(&self) -> Result<f64, ProtocolError> {
        Ok(0.5 * self.alice_unitary()?.magnitude())
    }

    pub fn analytic_success(&self, strategy: Strategy) -> Result<f64, ProtocolError> {
        Ok(match strategy {
            Strategy::Honest => 1.0,
            Strategy::BobCheat => 0.5 + self.analytic_gain()?,
            Strategy::AliceCheat => 0.5 + self.analytic_control()?,
        })
    }
}

fn outcome_probabilities(m: &Measurement, rho: &DensityMatrix) -> Vec<f64> {
    let r = rho.matrix();
    (0..m.vectors.ncols())
        .map(|k| {
            let v = m.vectors.column(k);
            let p: Complex64 = (v.adjoint() * r * v)[(0, 0)];
            p.re.max(0.0)
        })
        .collect()
}

fn cumulative(p: &[f64]) -> Vec<f64> {
    p.iter()
        .scan(0.0, |acc, x| {
            *acc += x;
            Some(*acc)
        })
        .collect()
}

fn sample(cdf: &[f64], rng: &mut impl Rng) -> usize {
    let total = *cdf.last().unwrap_or(&0.0);
    let u: f64 = rng.random::<f64>() * total;
    cdf.partition_point(|&c| c <= u).min(cdf.len().saturating_sub(1))
}

/// Sums per-chunk successes; `trial` is called with the chunk RNG.
fn run_chunks<F>(trials: u64, seed: u64, trial: F) -> StrategyOutcome
where
    F: Fn(&mut ChaCha8Rng) -> bool + Sync,
{
    let chunks = trials.div_ceil(CHUNK);
    let successes: u64 = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k);
            let len = CHUNK.min(trials - k * CHUNK);
            (0..len).filter(|_| trial(&mut rng)).count() as u64
        })
        .sum();
    StrategyOutcome::from_counts(trials, successes)
}

/// Alice commits a uniformly random bit honestly; Bob measures the token with
/// his best allowed measurement and guesses. Estimates `P_E`.
pub fn simulate_bob_cheat(inst: &ProtocolInstance, trials: u64, seed: u64) -> Result<StrategyOutcome, ProtocolError> {
    let m = inst.bob_measurement()?;
    let cdf = [cumulative(&outcome_probabilities(&m, &inst.rho0)), cumulative(&outcome_probabilities(&m, &inst.rho1))];
    Ok(run_chunks(trials, seed, |rng| {
        let bit = rng.random_range(0..2u8);
        let k = sample(&cdf[bit as usize], rng);
        let guess = m.guesses[k].unwrap_or_else(|| rng.random_range(0..2u8));
        guess == bit
    }))
}

/// Alice sends the token of her bit-independent cheating state, learns a
/// uniformly random target bit, rotates the proof if needed and unveils.
/// Estimates `P_U`.
pub fn simulate_alice_cheat(inst: &ProtocolInstance, trials: u64, seed: u64) -> Result<StrategyOutcome, ProtocolError> {
    let sol = inst.alice_unitary()?;
    let chi = cheat_state(&inst.chi0, &inst.chi1, &sol)?;
    let rotated = apply_proof_unitary(&chi, &sol.unitary.adjoint())?;
    // probability that Bob's projector onto chi_target accepts
    let accept = [inst.chi0.inner(&chi)?.norm_sqr(), inst.chi1.inner(&rotated)?.norm_sqr()];
    Ok(run_chunks(trials, seed, |rng| {
        let target = rng.random_range(0..2usize);
        rng.random::<f64>() < accept[target]
    }))
}

/// Both parties honest; Bob's projector onto `chi_b` accepts every time.
pub fn honest_run(inst: &ProtocolInstance, trials: u64, seed: u64) -> Result<StrategyOutcome, ProtocolError> {
    let accept = [inst.chi0.inner(&inst.chi0)?.norm_sqr(), inst.chi1.inner(&inst.chi1)?.norm_sqr()];
    Ok(run_chunks(trials, seed, |rng| {
        let bit = rng.random_range(0..2usize);
        rng.random::<f64>() < accept[bit]
    }))
}

pub fn simulate(
    inst: &ProtocolInstance,
    strategy: Strategy,
    trials: u64,
    seed: u64,
) -> Result<StrategyOutcome, ProtocolError> {
    match strategy {
        Strategy::Honest => honest_run(inst, trials, seed),
        Strategy::BobCheat => simulate_bob_cheat(inst, trials, seed),
        Strategy::AliceCheat => simulate_alice_cheat(inst, trials, seed),
    }
}

/// JSON result record for one simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationRecord {
    pub instance: String,
    pub mode: Mode,
    pub strategy: Strategy,
    pub trials: u64,
    pub seed: u64,
    pub successes: u64,
    pub estimate: f64,
    pub std_error: f64,
    pub analytic: f64,
    pub z_score: Option<f64>,
}

pub fn simulation_record(
    inst: &ProtocolInstance,
    strategy: Strategy,
    trials: u64,
    seed: u64,
) -> Result<SimulationRecord, ProtocolError> {
    let out = simulate(inst, strategy, trials, seed)?;
    let analytic = inst.analytic_success(strategy)?;
    Ok(SimulationRecord {
        instance: inst.descriptor.clone(),
        mode: inst.mode,
        strategy,
        trials,
        seed,
        successes: out.successes,
        estimate: out.estimate,
        std_error: out.std_error,
        analytic,
        z_score: out.z_score(analytic),
    })
}
