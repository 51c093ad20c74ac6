//! `zf`: exact partition functions, interpolation polynomials, Taylor
//! truncations, pseudo-marginals and the boundary-independence check, as
//! deterministic JSON or CSV.
//!
//! Exit codes: 0 ok, 1 assertion failure, 2 configuration error, 3 budget
//! exceeded. Failures print one `error kind=... reason="..."` line on stderr.

mod commands;
mod config;
mod selftest;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "zf",
    version,
    about = "Partition functions, Taylor interpolation and pseudo-marginals on decorated graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact Z, marginals, conditional marginals and rho_R.
    Exact(CommonArgs),
    /// Interpolation polynomial coefficients.
    Poly(CommonArgs),
    /// Power sums and the truncated Taylor expansion.
    Taylor(CommonArgs),
    /// Pseudo-marginal values.
    Pseudo(CommonArgs),
    /// Boundary-independence check of Taylor coefficient differences.
    Theorem1(CommonArgs),
    /// rho_R and the pseudo-marginal gap over radii and a parameter sweep.
    SsmScan(CommonArgs),
    /// Induced counts, connected enumeration, product decomposition, beta tables.
    Subgraph(SubgraphArgs),
    /// Fixed-seed invariant suite.
    Selftest(OutputArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    /// Write here instead of stdout.
    #[arg(long)]
    pub out: Option<String>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Enumeration budget (configurations); overrides ZF_BUDGET.
    #[arg(long)]
    pub budget: Option<u128>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args, Debug, Clone)]
pub struct GraphArgs {
    /// JSON graph file.
    #[arg(long, conflicts_with = "builder")]
    pub graph: Option<String>,
    /// path | cycle | complete | grid | tree | edgeless
    #[arg(long)]
    pub builder: Option<String>,
    /// hardcore | coloring | list | ising
    #[arg(long)]
    pub model: Option<String>,
    /// Builder and model parameters, e.g. n=7,lambda=1/2,K=3.
    #[arg(long)]
    pub params: Option<String>,
}

#[derive(Args, Debug, Clone)]
pub struct CommonArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// type1 | type2
    #[arg(long)]
    pub kind: Option<String>,
    /// Node ids of S, comma separated.
    #[arg(long = "S")]
    pub s: Option<String>,
    /// Colors (1-based) for the nodes of S.
    #[arg(long)]
    pub sigma: Option<String>,
    /// Node ids of T for conditioning.
    #[arg(long = "T")]
    pub t: Option<String>,
    /// Colors (1-based) for the nodes of T.
    #[arg(long)]
    pub tau: Option<String>,
    /// Radius, or for ssm-scan a list r1,r2 or range lo:hi.
    #[arg(long = "R")]
    pub r: Option<String>,
    /// Truncation order.
    #[arg(long)]
    pub m: Option<usize>,
    /// Evaluation point p/q.
    #[arg(long)]
    pub z: Option<String>,
    /// param=lo:hi:step over a model parameter.
    #[arg(long)]
    pub sweep: Option<String>,
    /// Boundary conditions enumerated before switching to sampling.
    #[arg(long)]
    pub tau_budget: Option<u128>,
    /// Boundary conditions drawn in sampled mode.
    #[arg(long)]
    pub samples: Option<usize>,
    /// taylor: emit the accuracy table for m = 0..=M instead.
    #[arg(long)]
    pub accuracy: bool,
}

#[derive(Args, Debug, Clone)]
pub struct SubgraphArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Count induced copies of these patterns, e.g. path:n=3;edgeless:n=2.
    #[arg(long)]
    pub pattern: Option<String>,
    /// Enumerate connected induced subgraphs up to this size.
    #[arg(long)]
    pub size_max: Option<usize>,
    /// Decompose the product of the --pattern counts.
    #[arg(long)]
    pub decompose: bool,
    /// Assemble the Type I beta table of this order.
    #[arg(long)]
    pub beta_k: Option<usize>,
    /// Fugacity for --beta-k.
    #[arg(long)]
    pub lambda: Option<String>,
}

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub kind: &'static str,
    pub reason: String,
}

impl CliError {
    pub fn config(reason: impl Into<String>) -> Self {
        CliError {
            code: 2,
            kind: "config",
            reason: reason.into(),
        }
    }

    pub fn assertion(reason: impl Into<String>) -> Self {
        CliError {
            code: 1,
            kind: "assertion",
            reason: reason.into(),
        }
    }
}

impl From<zf_core::Error> for CliError {
    fn from(e: zf_core::Error) -> Self {
        if e.is_budget() {
            CliError {
                code: 3,
                kind: "budget",
                reason: e.to_string(),
            }
        } else {
            CliError::config(e.to_string())
        }
    }
}

fn init_threads() -> Result<(), CliError> {
    if let Ok(v) = std::env::var("ZF_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .map_err(|_| CliError::config(format!("ZF_THREADS={v:?} is not an integer")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::config(e.to_string()))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    init_threads()?;
    let (text, out, failure) = match cli.command {
        Command::Exact(a) => commands::finish(commands::exact(&a)?, &a.output),
        Command::Poly(a) => commands::finish(commands::poly(&a)?, &a.output),
        Command::Taylor(a) => commands::finish(commands::taylor(&a)?, &a.output),
        Command::Pseudo(a) => commands::finish(commands::pseudo(&a)?, &a.output),
        Command::Theorem1(a) => commands::finish(commands::theorem1(&a)?, &a.output),
        Command::SsmScan(a) => commands::finish(commands::ssm_scan(&a)?, &a.output),
        Command::Subgraph(a) => commands::finish(commands::subgraph(&a)?, &a.output),
        Command::Selftest(o) => commands::finish(selftest::run(&o)?, &o),
    }?;
    match out {
        Some(path) => std::fs::write(&path, text).map_err(|e| CliError::config(format!("cannot write {path}: {e}")))?,
        None => print!("{text}"),
    }
    match failure {
        Some(reason) => Err(CliError::assertion(reason)),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let reason = e.to_string();
            let first = reason.lines().next().unwrap_or("").to_string();
            eprint!("{e}");
            eprintln!("error kind=config reason={first:?}");
            return ExitCode::from(2);
        }
        Err(e) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error kind={} reason={:?}", e.kind, e.reason);
            ExitCode::from(e.code)
        }
    }
}
