//! Security reports for the angular-momentum protocol: optimal `beta`, exact
//! fidelity, sign pattern of the kernels, and the closed-form comparison.

use std::io::{self, Write};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::angular::{conjectured_fidelity, SpinJ};
use crate::exact::{format_rational, rat, Rational, Sign};
use crate::lp::{solve_optimal_beta, solve_pinned, OptimalBeta, Pins, ProgramError};

/// Largest `j` for which the sweep is part of the verified range; rows above it
/// are flagged as extrapolated.
pub const VERIFIED_MAX_J: u32 = 11;

fn sign_label(s: Sign) -> String {
    match s {
        Sign::Positive => "+1",
        Sign::Negative => "-1",
        Sign::Zero => "x",
    }
    .to_string()
}

/// JSON form of a solved instance. Exact numbers are `"p/q"` strings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SecurityReport {
    pub twice_j: u32,
    pub beta_star: Vec<String>,
    #[serde(rename = "F_star")]
    pub f_star: String,
    #[serde(rename = "conjectured_F")]
    pub conjectured_f: Option<String>,
    pub conjecture_match: Option<bool>,
    /// `sign(K_m)` for `m = -j..=j`: `"+1"`, `"-1"`, or `"x"` when `K_m = 0`.
    pub sign_pattern: Vec<String>,
    /// Bob's optimal information gain, zero by symmetry.
    pub gain_max: String,
    /// Alice's optimal control, `F*/2`.
    pub control_max: String,
    pub pivots: usize,
    pub wall_time_ms: u64,
}

impl SecurityReport {
    pub fn from_optimum(opt: &OptimalBeta, wall_time_ms: u64) -> Self {
        let j = opt.beta.j();
        let conj = conjectured_fidelity(j).ok();
        Self {
            twice_j: j.twice(),
            beta_star: opt.beta.entries().iter().map(format_rational).collect(),
            f_star: format_rational(&opt.fidelity),
            conjecture_match: conj.as_ref().map(|c| *c == opt.fidelity),
            conjectured_f: conj.as_ref().map(format_rational),
            sign_pattern: opt.signs.iter().copied().map(sign_label).collect(),
            gain_max: "0".into(),
            control_max: format_rational(&(&opt.fidelity * rat(1, 2))),
            pivots: opt.solution.pivots,
            wall_time_ms,
        }
    }
}

pub fn solve_report(j: SpinJ) -> Result<(OptimalBeta, SecurityReport), ProgramError> {
    let t = Instant::now();
    let opt = solve_optimal_beta(j)?;
    let ms = t.elapsed().as_millis() as u64;
    let report = SecurityReport::from_optimum(&opt, ms);
    Ok((opt, report))
}

/// One row per index `k = 0..=2j`, pairing `beta_k` with the sign of `K` at
/// `m_A = -j + k`. The scalar fields are only in the JSON form.
pub fn write_report_csv<W: Write>(r: &SecurityReport, mut w: W) -> io::Result<()> {
    writeln!(w, "twice_j,j_b,beta,twice_m_a,kernel_sign")?;
    let tj = r.twice_j as i64;
    for (k, (b, s)) in r.beta_star.iter().zip(&r.sign_pattern).enumerate() {
        writeln!(w, "{},{},{},{},{}", r.twice_j, k, b, -tj + 2 * k as i64, s)?;
    }
    Ok(())
}

/// One row of the closed-form sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub twice_j: u32,
    #[serde(rename = "F_star", with = "crate::exact::as_string")]
    pub f_star: Rational,
    #[serde(with = "crate::exact::as_string")]
    pub conjectured: Rational,
    #[serde(rename = "match")]
    pub matches: bool,
    /// `(s_{-1}, s_0)` as `"+1"`, `"-1"` or `"x"`.
    pub central_signs: (String, String),
    /// Optimum unchanged with `beta_{j_B} = 0` for `j_B >= (j+1)/2 + 2`.
    pub tail_pin_holds: bool,
    /// Optimum unchanged with `K_m = 0` for `m > 0`.
    pub kernel_pin_holds: bool,
    pub extrapolated: bool,
    pub wall_time_ms: u64,
}

pub fn sweep_row(j: u32) -> Result<SweepRow, ProgramError> {
    let t = Instant::now();
    let s = SpinJ::integer(j)?;
    let opt = solve_optimal_beta(s)?;
    let conjectured = conjectured_fidelity(s)?;
    let tail = solve_pinned(s, Pins { zero_tail: true, zero_positive_kernels: false });
    let kern = solve_pinned(s, Pins { zero_tail: false, zero_positive_kernels: true });
    let holds = |r: Result<OptimalBeta, ProgramError>| r.is_ok_and(|o| o.fidelity == opt.fidelity);
    let (tail_pin_holds, kernel_pin_holds) = (holds(tail), holds(kern));
    Ok(SweepRow {
        twice_j: s.twice(),
        matches: opt.fidelity == conjectured,
        central_signs: {
            let (a, b) = opt.central_signs().unwrap_or((Sign::Zero, Sign::Zero));
            (sign_label(a), sign_label(b))
        },
        f_star: opt.fidelity,
        conjectured,
        tail_pin_holds,
        kernel_pin_holds,
        extrapolated: j > VERIFIED_MAX_J,
        wall_time_ms: t.elapsed().as_millis() as u64,
    })
}

/// Integer `j = 1..=max_j`, solved in parallel and returned in order.
pub fn conjecture_sweep(max_j: u32) -> Result<Vec<SweepRow>, ProgramError> {
    (1..=max_j).into_par_iter().map(sweep_row).collect()
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], mut w: W) -> io::Result<()> {
    writeln!(w, "twice_j,F_star,conjectured,match,extrapolated")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{}",
            r.twice_j,
            format_rational(&r.f_star),
            format_rational(&r.conjectured),
            r.matches,
            r.extrapolated
        )?;
    }
    Ok(())
}
