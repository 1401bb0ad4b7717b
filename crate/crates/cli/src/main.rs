//! `wedgewalk`: experiments on wedge graphs from a JSON profile document.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::commands::CliError;

#[derive(Parser)]
#[command(
    name = "wedgewalk",
    version,
    about = "Random walks on wedges of Z^(d+1)"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
pub struct Common {
    /// Profile document: {"d": 1, "profiles": [{"type": "linear", "a": 1, "b": 0}]}.
    #[arg(long)]
    pub config: PathBuf,
    /// Output file, written atomically; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Mode {
    Green,
    Collide,
}

#[derive(Subcommand)]
enum Command {
    /// Recurrence verdict from the partial sums of prod 1/(h_i(n)+1), as JSON.
    Classify {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 100_000)]
        n_max: u64,
        #[arg(long, default_value_t = 0.05)]
        recurrent_threshold: f64,
        #[arg(long, default_value_t = 0.01)]
        transient_threshold: f64,
        #[arg(long, default_value_t = 1e-4)]
        increment_threshold: f64,
    },
    /// Layer sizes |∂_n| for n = 0..=r against their product bounds.
    Partition {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        r: u64,
    },
    /// Exact R(O <-> ∂_r) with its lower and upper bounds.
    Resistance {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', required = true)]
        r: Vec<u64>,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Edge list of the unit flow from an anchor to ∂_r.
    Flow {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        r: u64,
        /// "x1,...,xd,level"; the origin when omitted.
        #[arg(long)]
        anchor: Option<String>,
    },
    /// Monte Carlo: killed Green function or two-walk collisions.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        mode: Mode,
        /// Steps per collision run.
        #[arg(long = "T", default_value_t = 1000)]
        horizon: u64,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Truncation level; required for green mode.
        #[arg(long)]
        kill_r: Option<u64>,
        #[arg(long)]
        anchor: Option<String>,
    },
    /// Degree-normalized g_{V_r}(x, x) from a linear solve.
    Green {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', required = true)]
        r: Vec<u64>,
        #[arg(long)]
        anchor: Option<String>,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Lower bounds, exact resistance and flow upper bound over a sweep of r.
    Sandwich {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', required = true)]
        r: Vec<u64>,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("WEDGEWALK_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        CliError::Invalid(format!(
            "WEDGEWALK_THREADS must be a positive integer, got {raw:?}"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Invalid(e.to_string()))
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    let (text, common) = match cli.command {
        Command::Classify {
            common,
            n_max,
            recurrent_threshold,
            transient_threshold,
            increment_threshold,
        } => {
            let th = wedgewalk_core::Thresholds {
                recurrent: recurrent_threshold,
                transient: transient_threshold,
                increment: increment_threshold,
            };
            (commands::classify(&common, n_max, th)?, common)
        }
        Command::Partition { common, r } => (commands::partition(&common, r)?, common),
        Command::Resistance { common, r, tol } => (commands::resistance(&common, &r, tol)?, common),
        Command::Flow { common, r, anchor } => {
            (commands::flow(&common, r, anchor.as_deref())?, common)
        }
        Command::Simulate {
            common,
            mode,
            horizon,
            trials,
            seed,
            kill_r,
            anchor,
        } => {
            let cfg = wedgewalk_core::WalkConfig {
                seed,
                horizon,
                trials,
                kill_r,
                ..Default::default()
            };
            (
                commands::simulate(&common, mode, &cfg, anchor.as_deref())?,
                common,
            )
        }
        Command::Green {
            common,
            r,
            anchor,
            tol,
        } => (
            commands::green(&common, &r, anchor.as_deref(), tol)?,
            common,
        ),
        Command::Sandwich { common, r, tol } => (commands::sandwich(&common, &r, tol)?, common),
    };
    output::emit(&text, common.out.as_deref()).map_err(CliError::Io)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("wedgewalk: {e}");
            if let CliError::Config(..) = e {
                eprintln!("{}", commands::SCHEMA_HINT);
            }
            ExitCode::from(e.exit_code())
        }
    }
}
