//! `nsn-ddu`: solve, sweep, and audit two-stage hierarchical games under
//! decision-dependent uncertainty.
//!
//! Exit codes: 0 when the requested result is certified (or the report
//! completes), 1 on input errors (files, schema, flags), 2 on solver or
//! verification failures.

mod commands;
mod csvout;
mod runrec;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use nsn_ddu_core::{BrMode, Regime, Tiebreak};

pub const EXIT_OK: u8 = 0;
pub const EXIT_INPUT: u8 = 1;
pub const EXIT_SOLVER: u8 = 2;

/// A command failure with its exit class.
#[derive(Debug)]
pub enum CmdError {
    /// Unreadable files, schema violations, bad flags.
    Input(String),
    /// Solver, verification, or artifact failures.
    Solver(String),
}

impl CmdError {
    fn code(&self) -> u8 {
        match self {
            CmdError::Input(_) => EXIT_INPUT,
            CmdError::Solver(_) => EXIT_SOLVER,
        }
    }
    fn message(&self) -> &str {
        match self {
            CmdError::Input(m) | CmdError::Solver(m) => m,
        }
    }
}

pub type CmdResult = Result<u8, CmdError>;

#[derive(Parser)]
#[command(
    name = "nsn-ddu",
    version,
    about = "Equilibrium solver, verifier, and assumption auditor for N-S-N games under decision-dependent uncertainty"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve for an equilibrium and certify it
    Solve(SolveArgs),
    /// Sweep the scalarization weight, optionally in both regimes
    Sweep(SweepArgs),
    /// Emit the virtual player's objective front at the equilibrium profile
    Pareto(ParetoArgs),
    /// Sample the existence assumptions and report a verdict
    Audit(AuditArgs),
    /// Re-certify a persisted candidate or certificate
    Verify(VerifyArgs),
    /// Query a single leader best response
    Br(BrArgs),
    /// Follower-layer diagnostics
    Followers(FollowersArgs),
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Myopic,
    Anticipating,
}

impl From<ModeArg> for BrMode {
    fn from(m: ModeArg) -> BrMode {
        match m {
            ModeArg::Myopic => BrMode::Myopic,
            ModeArg::Anticipating => BrMode::Anticipating,
        }
    }
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
pub enum TiebreakArg {
    LexLow,
    PreferRestrict,
    PreferRelax,
}

impl From<TiebreakArg> for Tiebreak {
    fn from(t: TiebreakArg) -> Tiebreak {
        match t {
            TiebreakArg::LexLow => Tiebreak::LexLow,
            TiebreakArg::PreferRestrict => Tiebreak::PreferRestrict,
            TiebreakArg::PreferRelax => Tiebreak::PreferRelax,
        }
    }
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
pub enum RegimeArg {
    Ddu,
    Diu,
}

impl From<RegimeArg> for Regime {
    fn from(r: RegimeArg) -> Regime {
        match r {
            RegimeArg::Ddu => Regime::Ddu,
            RegimeArg::Diu => Regime::Diu,
        }
    }
}

/// Flags shared by every certifying command.
#[derive(Args, Clone)]
pub struct CommonOpts {
    /// Verification grid points per leader coordinate
    #[arg(long = "grid-x")]
    pub grid_x: Option<usize>,
    /// Verification grid points over the uncertainty interval
    #[arg(long = "grid-w")]
    pub grid_w: Option<usize>,
    /// Verification tolerance
    #[arg(long)]
    pub tol: Option<f64>,
    /// Run directory (default: timestamped under NSN_DDU_OUT or ./runs)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct SolveArgs {
    /// Scenario document (JSON)
    pub scenario: PathBuf,
    /// Scalarization weight on the first leader
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Full weight vector, comma separated (overrides --lambda)
    #[arg(long)]
    pub weights: Option<String>,
    /// Solve under decision-independent uncertainty (static interval)
    #[arg(long)]
    pub diu: bool,
    /// Leader best-response mode
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// Tie-break policy for payoff-flat coordinates
    #[arg(long, value_enum)]
    pub tiebreak: Option<TiebreakArg>,
    /// Initial profile, comma separated (default: all zeros)
    #[arg(long)]
    pub init: Option<String>,
    /// Also run from every box corner and report distinct equilibria
    #[arg(long)]
    pub multistart: bool,
    #[arg(long = "max-iter")]
    pub max_iter: Option<usize>,
    #[arg(long = "conv-tol")]
    pub conv_tol: Option<f64>,
    #[command(flatten)]
    pub common: CommonOpts,
}

#[derive(Args)]
pub struct SweepArgs {
    pub scenario: PathBuf,
    /// Sweep start
    #[arg(long, default_value_t = 0.0)]
    pub from: f64,
    /// Sweep end (inclusive)
    #[arg(long, default_value_t = 1.0)]
    pub to: f64,
    /// Sweep step, must be positive
    #[arg(long, default_value_t = 0.01)]
    pub step: f64,
    /// Sweep both regimes and compare weighted sums rowwise
    #[arg(long)]
    pub both: bool,
    /// Worker threads for sweep rows
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    #[arg(long, value_enum)]
    pub tiebreak: Option<TiebreakArg>,
    /// Also emit SVG plots
    #[arg(long)]
    pub svg: bool,
    #[command(flatten)]
    pub common: CommonOpts,
}

#[derive(Args)]
pub struct ParetoArgs {
    pub scenario: PathBuf,
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Regime to solve and sample in
    #[arg(long = "at", value_enum, default_value = "ddu")]
    pub at: RegimeArg,
    /// Number of interval samples
    #[arg(long = "grid-n", default_value_t = 401)]
    pub grid_n: usize,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    #[arg(long, value_enum)]
    pub tiebreak: Option<TiebreakArg>,
    /// Also emit an SVG plot with one series per regime
    #[arg(long)]
    pub svg: bool,
    #[command(flatten)]
    pub common: CommonOpts,
}

#[derive(Args)]
pub struct AuditArgs {
    pub scenario: PathBuf,
    /// Segments sampled per check
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Midpoint-violation tolerance
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Run directory (default: timestamped under NSN_DDU_OUT or ./runs)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct VerifyArgs {
    pub scenario: PathBuf,
    /// Certificate or bare candidate JSON to re-certify
    pub certificate: PathBuf,
    /// Treat the scenario as decision-independent
    #[arg(long)]
    pub diu: bool,
    #[command(flatten)]
    pub common: CommonOpts,
}

#[derive(Args)]
pub struct BrArgs {
    pub scenario: PathBuf,
    /// Leader index, 1-based
    #[arg(long)]
    pub leader: usize,
    /// Context profile (all leaders), comma separated
    #[arg(long)]
    pub profile: String,
    /// Fixed uncertainty value (required in myopic mode)
    #[arg(long)]
    pub w: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub weights: Option<String>,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    #[arg(long, value_enum)]
    pub tiebreak: Option<TiebreakArg>,
    /// Treat the scenario as decision-independent
    #[arg(long)]
    pub diu: bool,
}

#[derive(Args)]
pub struct FollowersArgs {
    #[command(subcommand)]
    pub action: FollowersAction,
}

#[derive(Subcommand)]
pub enum FollowersAction {
    /// Best-response consistency sweep over random states
    Check {
        scenario: PathBuf,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    ExitCode::from(EXIT_OK)
                }
                _ => {
                    eprint!("{e}");
                    ExitCode::from(EXIT_INPUT)
                }
            };
        }
    };
    let result = match cli.command {
        Command::Solve(args) => commands::solve(&args),
        Command::Sweep(args) => commands::sweep(&args),
        Command::Pareto(args) => commands::pareto(&args),
        Command::Audit(args) => commands::audit(&args),
        Command::Verify(args) => commands::verify(&args),
        Command::Br(args) => commands::br(&args),
        Command::Followers(args) => match args.action {
            FollowersAction::Check {
                scenario,
                samples,
                seed,
                tol,
            } => commands::followers_check(&scenario, samples, seed, tol),
        },
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
