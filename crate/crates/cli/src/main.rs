use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use afbc_core::abelian::{
    orthogonal_token_pair, random_orthogonal_pair, run_batch, symmetric_pair, verify_pair, InstanceRecord, NumberState,
    SectorDim,
};
use afbc_core::angular::{cg_signed, SpinJ};
use afbc_core::lp::solve_optimal_beta;
use afbc_core::protocol::{simulation_record, ProtocolInstance, SimulationRecord, Strategy, DEFAULT_TRIALS};
use afbc_core::report::{conjecture_sweep, solve_report, write_report_csv, write_sweep_csv, SweepRow};
use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

const EXIT_MISMATCH: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(name = "afbc", version, about = "Bit-commitment security under superselection rules")]
struct Cli {
    /// Master seed for random instances and Monte Carlo streams.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write to this file instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Solve for the optimal beta at one j and print its security report.
    Solve {
        #[arg(long)]
        twice_j: u32,
    },
    /// Compare F* with 1/C(2j+1, j+1) for every integer j up to max_twice_j/2.
    Conjecture {
        #[arg(long)]
        max_twice_j: u32,
    },
    /// Check constrained against unconstrained optima on number-conserving pairs.
    Abelian {
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 4)]
        n_max: u32,
        /// Fixed instance instead of seeded random pairs.
        #[arg(long, value_enum, default_value_t = Pair::Random)]
        pair: Pair,
    },
    /// Monte Carlo estimate of a cheating or honest success probability.
    Simulate {
        #[arg(long, value_enum)]
        mode: SimMode,
        /// Spin of the angular instance, doubled; the optimal beta is used.
        #[arg(long, required_if_eq("mode", "angular"))]
        twice_j: Option<u32>,
        /// Total particle number of the number instance.
        #[arg(long, short = 'n', required_if_eq("mode", "number"))]
        n: Option<u32>,
        #[arg(long, value_enum, default_value_t = Pair::Random)]
        pair: Pair,
        #[arg(long, value_enum, default_value_t = StrategyArg::Bob)]
        strategy: StrategyArg,
        #[arg(long, default_value_t = DEFAULT_TRIALS)]
        trials: u64,
    },
    /// Signed CG coefficients C(j, m_A, j_B, j - m_A, j, j) as exact squares.
    CgTable {
        #[arg(long)]
        twice_j: u32,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SimMode {
    Angular,
    Number,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Pair {
    Random,
    /// `|0>|1>` against `|1>|0>`; n = 1.
    OrthogonalTokens,
    /// Identical tokens; n = 1.
    Symmetric,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StrategyArg {
    Bob,
    Alice,
    Honest,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Bob => Strategy::BobCheat,
            StrategyArg::Alice => Strategy::AliceCheat,
            StrategyArg::Honest => Strategy::Honest,
        }
    }
}

/// Bad arguments that clap cannot see.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

fn open_output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json<T: Serialize + ?Sized>(value: &T, w: &mut dyn Write) -> Result<()> {
    serde_json::to_writer_pretty(&mut *w, value)?;
    writeln!(w)?;
    Ok(())
}

fn spin(twice_j: u32) -> Result<SpinJ> {
    SpinJ::from_twice(twice_j).map_err(|e| usage(e.to_string()))
}

/// One abelian verification row in its report form.
#[derive(Serialize)]
struct AbelianRow {
    seed: u64,
    n: u32,
    dims: Vec<SectorDim>,
    gain_residual: f64,
    control_residual: f64,
    pass: bool,
    gain_max: f64,
    control_max: f64,
}

impl From<&InstanceRecord> for AbelianRow {
    fn from(r: &InstanceRecord) -> Self {
        Self {
            seed: r.seed,
            n: r.n,
            dims: r.dims.clone(),
            gain_residual: r.gain_residual,
            control_residual: r.control_residual,
            pass: r.pass,
            gain_max: r.gain_constrained,
            control_max: r.control_constrained,
        }
    }
}

#[derive(Serialize)]
struct CgRow {
    twice_j: u32,
    twice_m_a: i32,
    twice_j_b: u32,
    numerator: String,
    denominator: String,
    sign: i8,
}

fn fixed_pair(pair: Pair) -> Option<(NumberState, NumberState)> {
    match pair {
        Pair::Random => None,
        Pair::OrthogonalTokens => Some(orthogonal_token_pair()),
        Pair::Symmetric => Some(symmetric_pair()),
    }
}

fn cmd_solve(cli: &Cli, twice_j: u32) -> Result<u8> {
    if twice_j < 2 {
        return Err(usage("--twice-j must be at least 2"));
    }
    if twice_j % 2 == 1 {
        eprintln!("warning: half-integer j has no closed form to compare against");
    }
    let (_, report) = solve_report(spin(twice_j)?)?;
    let mut w = open_output(&cli.output)?;
    match cli.format {
        Format::Json => write_json(&report, &mut *w)?,
        Format::Csv => write_report_csv(&report, &mut w)?,
    }
    w.flush()?;
    Ok(0)
}

fn cmd_conjecture(cli: &Cli, max_twice_j: u32) -> Result<u8> {
    if max_twice_j < 2 {
        return Err(usage("--max-twice-j must be at least 2"));
    }
    let rows: Vec<SweepRow> = conjecture_sweep(max_twice_j / 2)?;
    let mut w = open_output(&cli.output)?;
    match cli.format {
        Format::Json => write_json(&rows, &mut *w)?,
        Format::Csv => write_sweep_csv(&rows, &mut w)?,
    }
    w.flush()?;
    let bad: Vec<u32> = rows.iter().filter(|r| !r.matches).map(|r| r.twice_j).collect();
    if bad.is_empty() {
        Ok(0)
    } else {
        eprintln!("mismatch at twice_j = {bad:?}");
        Ok(EXIT_MISMATCH)
    }
}

fn cmd_abelian(cli: &Cli, count: usize, n_max: u32, pair: Pair) -> Result<u8> {
    if count == 0 || n_max == 0 {
        return Err(usage("--count and --n-max must be at least 1"));
    }
    let records = match fixed_pair(pair) {
        Some(p) => vec![verify_pair(cli.seed, &p)?],
        None => run_batch(count, n_max, cli.seed)?,
    };
    let rows: Vec<AbelianRow> = records.iter().map(AbelianRow::from).collect();
    let mut w = open_output(&cli.output)?;
    match cli.format {
        Format::Json => write_json(&rows, &mut *w)?,
        Format::Csv => {
            writeln!(w, "seed,n,dims,gain_residual,control_residual,pass")?;
            for r in &rows {
                let dims: Vec<String> = r.dims.iter().map(|d| format!("{}x{}", d.proof, d.token)).collect();
                writeln!(
                    w,
                    "{},{},{},{:e},{:e},{}",
                    r.seed,
                    r.n,
                    dims.join(";"),
                    r.gain_residual,
                    r.control_residual,
                    r.pass
                )?;
            }
        }
    }
    w.flush()?;
    let failing: Vec<u64> = rows.iter().filter(|r| !r.pass).map(|r| r.seed).collect();
    if failing.is_empty() {
        Ok(0)
    } else {
        eprintln!("failing seeds: {failing:?}");
        Ok(EXIT_MISMATCH)
    }
}

fn number_instance(n: u32, pair: Pair, seed: u64) -> Result<ProtocolInstance> {
    let states = match fixed_pair(pair) {
        Some(p) if n == 1 => p,
        Some(_) => return Err(usage("fixed pairs have n = 1")),
        None => {
            if n == 0 {
                return Err(usage("-n must be at least 1"));
            }
            let dims = vec![SectorDim { proof: 2, token: 2 }; n as usize + 1];
            random_orthogonal_pair(n, &dims, seed).map_err(|e| usage(e.to_string()))?
        }
    };
    Ok(ProtocolInstance::number(&states)?)
}

fn cmd_simulate(
    cli: &Cli,
    mode: SimMode,
    twice_j: Option<u32>,
    n: Option<u32>,
    pair: Pair,
    strategy: Strategy,
    trials: u64,
) -> Result<u8> {
    if trials == 0 {
        return Err(usage("--trials must be at least 1"));
    }
    let inst = match mode {
        SimMode::Angular => {
            let tj = twice_j.ok_or_else(|| usage("--twice-j is required in angular mode"))?;
            if tj < 2 || tj % 2 == 1 {
                return Err(usage("angular simulation needs an even --twice-j >= 2"));
            }
            let opt = solve_optimal_beta(spin(tj)?)?;
            ProtocolInstance::angular(&opt.beta)?
        }
        SimMode::Number => number_instance(n.ok_or_else(|| usage("-n is required in number mode"))?, pair, cli.seed)?,
    };
    let rec: SimulationRecord = simulation_record(&inst, strategy, trials, cli.seed)?;
    let mut w = open_output(&cli.output)?;
    match cli.format {
        Format::Json => write_json(&rec, &mut *w)?,
        Format::Csv => {
            writeln!(w, "instance,mode,strategy,trials,seed,successes,estimate,std_error,analytic,z_score")?;
            let z = rec.z_score.map(|z| z.to_string()).unwrap_or_default();
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{},{}",
                rec.instance,
                rec.mode,
                rec.strategy,
                rec.trials,
                rec.seed,
                rec.successes,
                rec.estimate,
                rec.std_error,
                rec.analytic,
                z
            )?;
        }
    }
    w.flush()?;
    Ok(if rec.z_score.is_some_and(|z| z.abs() <= 3.0) { 0 } else { EXIT_MISMATCH })
}

fn cmd_cg_table(cli: &Cli, twice_j: u32) -> Result<u8> {
    let j = spin(twice_j)?;
    let mut w = open_output(&cli.output)?;
    match cli.format {
        Format::Csv => afbc_core::angular::write_cg_table(j, &mut w)?,
        Format::Json => {
            let mut rows = Vec::new();
            for tm in j.twice_projections() {
                for j_b in 0..=twice_j {
                    let c = cg_signed(j, tm, j_b)?;
                    rows.push(CgRow {
                        twice_j,
                        twice_m_a: tm,
                        twice_j_b: 2 * j_b,
                        numerator: c.square().numer().to_string(),
                        denominator: c.square().denom().to_string(),
                        sign: c.sign().as_i8(),
                    });
                }
            }
            write_json(&rows, &mut *w)?;
        }
    }
    w.flush()?;
    Ok(0)
}

fn run(cli: &Cli) -> Result<u8> {
    match cli.command {
        Command::Solve { twice_j } => cmd_solve(cli, twice_j),
        Command::Conjecture { max_twice_j } => cmd_conjecture(cli, max_twice_j),
        Command::Abelian { count, n_max, pair } => cmd_abelian(cli, count, n_max, pair),
        Command::Simulate { mode, twice_j, n, pair, strategy, trials } => {
            cmd_simulate(cli, mode, twice_j, n, pair, strategy.into(), trials)
        }
        Command::CgTable { twice_j } => cmd_cg_table(cli, twice_j),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) if e.is::<Usage>() => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_MISMATCH)
        }
    }
}
