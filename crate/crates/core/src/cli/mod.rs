//! Command-line front end. `run` returns the process exit code.

mod commands;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use commands::{cmd_eval, cmd_oracle, cmd_size, cmd_wake, Manifest};

use crate::error::Error;

#[derive(Debug, Parser)]
#[command(name = "wakesize", version, about = "Wake-aware wind and storage sizing")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sweep available wind power and fit the facet envelope per site.
    Wake(WakeArgs),
    /// Size capacities, one iterative solve per budget.
    Size(SizeArgs),
    /// Compare sizing methods, test out of sample, run sensitivity sweeps.
    Eval(EvalArgs),
    /// Brute-force reference computations.
    Oracle(OracleArgs),
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Grid case JSON.
    #[arg(long)]
    pub case: PathBuf,
    /// Output directory, created if missing.
    #[arg(long)]
    pub out: PathBuf,
    /// Envelope tolerance (MW); defaults to 1% of the largest sampled power.
    #[arg(long)]
    pub tol_hull: Option<f64>,
    /// Worker threads; defaults to the available cores.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Seed for the random probes of the bound search.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct WakeArgs {
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct SizingArgs {
    /// Scenario CSV.
    #[arg(long)]
    pub scenarios: PathBuf,
    /// Ambiguity scale.
    #[arg(long, default_value_t = 0.05)]
    pub eps0: f64,
    /// Cap on expected shedding (MWh).
    #[arg(long, default_value_t = 220.0)]
    pub g_cap: f64,
    /// Investment budgets (CNY), ascending.
    #[arg(long, value_delimiter = ',')]
    pub budgets: Vec<f64>,
    /// Minimize investment with the fuel-cost term capped (CNY). `size`
    /// rejects it together with budgets; `eval` uses it for the sweeps.
    #[arg(long)]
    pub fuel_cap: Option<f64>,
    /// Convergence tolerance on capacities (MW).
    #[arg(long, default_value_t = 0.1)]
    pub tol_x: f64,
    #[arg(long, default_value_t = 50)]
    pub max_iter: usize,
    /// Node limit of the bound search.
    #[arg(long, default_value_t = 20_000)]
    pub node_limit: usize,
}

#[derive(Debug, Clone, Args)]
pub struct SizeArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub sizing: SizingArgs,
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub sizing: SizingArgs,
    /// Held-out scenario CSV for testing.
    #[arg(long)]
    pub heldout: Option<PathBuf>,
    /// Baselines besides DRO: SP1, SP2, RO.
    #[arg(long, value_delimiter = ',')]
    pub methods: Vec<String>,
    /// Sensitivity sweep as `knob=v1,v2,…` with knob eps0, g-cap or kappa.
    #[arg(long)]
    pub sweep: Vec<String>,
}

#[derive(Debug, Clone, Args)]
pub struct OracleArgs {
    #[command(subcommand)]
    pub which: OracleCommand,
}

#[derive(Debug, Clone, Subcommand)]
pub enum OracleCommand {
    /// Upper facets of a site's sweep by brute-force plane enumeration.
    Facets {
        #[arg(long)]
        case: PathBuf,
        #[arg(long, default_value_t = 0)]
        site: usize,
        /// Speed grid points, kept small for the cubic enumeration.
        #[arg(long, default_value_t = 8)]
        grid_points: usize,
    },
    /// Shedding of one scenario at fixed capacities by vertex enumeration.
    Shed {
        #[arg(long)]
        case: PathBuf,
        #[arg(long)]
        scenarios: PathBuf,
        #[arg(long)]
        scenario: String,
        /// Capacities in case order.
        #[arg(long, value_delimiter = ',')]
        x: Vec<f64>,
    },
    /// Shedding slope bounds by enumerating multiplier supports.
    Lipschitz {
        #[arg(long)]
        case: PathBuf,
    },
}

/// Validation-type failures exit with 2, everything else with 1.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidParameter(_)
        | Error::DimensionMismatch { .. }
        | Error::Io { .. }
        | Error::Parse { .. }
        | Error::WeightMismatch(..) => 2,
        _ => 1,
    }
}

pub fn run(cli: Cli) -> i32 {
    let jobs = match &cli.command {
        Command::Wake(a) => a.common.jobs,
        Command::Size(a) => a.common.jobs,
        Command::Eval(a) => a.common.jobs,
        Command::Oracle(_) => None,
    };
    if let Some(n) = jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            log::warn!("cannot set worker count: {e}");
        }
    }
    let result = match cli.command {
        Command::Wake(a) => cmd_wake(&a).map(|_| ()),
        Command::Size(a) => cmd_size(&a).map(|_| ()),
        Command::Eval(a) => cmd_eval(&a).map(|_| ()),
        Command::Oracle(a) => cmd_oracle(&a.which, &mut std::io::stdout()),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
