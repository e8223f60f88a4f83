//! Batch front-end: builds the configured space and inputs, runs one check and writes its report.

mod commands;
mod config;
mod error;
mod sources;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::CliError;

#[derive(Parser, Debug)]
#[command(name = "linmaps", version, about = "Fourier-analytic checks on spaces of linear maps over finite fields")]
#[command(args_override_self = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Profile {
    /// q in {2,3}; dims up to 3×3 for spectral commands and six entries for direct ones.
    Desk,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Seed for every sampled quantity.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Reject configurations outside the named preset.
    #[arg(long, value_enum)]
    pub profile: Option<Profile>,
    /// Directory receiving the report (and the failing instance, if any).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct SpaceArgs {
    /// Field order.
    #[arg(long, default_value_t = 2)]
    pub q: usize,
    /// dim V.
    #[arg(long, default_value_t = 2)]
    pub dimv: usize,
    /// dim W.
    #[arg(long, default_value_t = 2)]
    pub dimw: usize,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Rank-level Fourier mass table of a function.
    Spectrum {
        #[command(flatten)]
        space: SpaceArgs,
        /// Order used by `builtin:sharpness` without an explicit order.
        #[arg(long, default_value_t = 1)]
        d: usize,
        #[arg(long, default_value = "builtin:sharpness")]
        function: String,
        #[command(flatten)]
        common: Common,
    },
    /// Globalness transfer, hypercontractivity, Bonami and level-d checks at order d.
    CheckHyp {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long, default_value_t = 1)]
        d: usize,
        #[arg(long, default_value = "builtin:sharpness")]
        function: String,
        #[command(flatten)]
        common: Common,
    },
    /// Cube hypercontractivity and, with --rho, small-set expansion under the noise operator.
    CheckCube {
        /// Alphabet size.
        #[arg(long, default_value_t = 2)]
        p: usize,
        /// Number of coordinates.
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        d: usize,
        #[arg(long, default_value = "builtin:random-low-degree:0")]
        function: String,
        /// Noise rate for the expansion check; the function must then be 0/1-valued.
        #[arg(long)]
        rho: Option<f64>,
        /// Globalness level assumed by the expansion check.
        #[arg(long, default_value_t = 0.0)]
        epsilon: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Stay probability of a vertex set in the shortcode graph, as CSV.
    Expansion {
        #[command(flatten)]
        space: SpaceArgs,
        /// `builtin:rank-threshold:r`, `random:density,seed`, a JSON file, or `family` for the scan family.
        #[arg(long, default_value = "builtin:rank-threshold:1")]
        set: String,
        /// Target exponent in the q^{-r} stay bound.
        #[arg(long, default_value_t = 1)]
        r: usize,
        /// Globalness constant in the q^{-C0 r^2} hypothesis.
        #[arg(long, default_value_t = 1.0)]
        c0: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Operator identities and linear-algebra lemmas, one JSON line each.
    VerifyLemmas {
        #[command(flatten)]
        space: SpaceArgs,
        /// Instances per lemma when a sweep is sampled rather than exhaustive.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Observed hypercontractivity exponent of the sharpness family, one JSON line per order.
    Sharpness {
        #[command(flatten)]
        space: SpaceArgs,
        /// Single order; all orders up to the maximal rank by default.
        #[arg(long)]
        d: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var("BF_THREADS") else {
        return Ok(());
    };
    let threads: usize =
        value.parse().map_err(|_| CliError::Usage(format!("BF_THREADS must be a positive integer, got `{value}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Usage(format!("BF_THREADS: {e}")))
}

/// Raw arguments with config-file flags spliced in right after the subcommand name.
fn arguments() -> Result<Vec<String>, CliError> {
    let mut args: Vec<String> = std::env::args().collect();
    let Some(path) = config::extract_path(&mut args)? else {
        return Ok(args);
    };
    let Some(pos) = args.iter().skip(1).position(|a| !a.starts_with('-')).map(|p| p + 1) else {
        return Ok(args);
    };
    let extra = config::flags_for(path.as_ref(), &args[pos])?;
    args.splice(pos + 1..pos + 1, extra);
    Ok(args)
}

fn run() -> Result<bool, CliError> {
    let args = arguments()?;
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            e.print()?;
            std::process::exit(code);
        }
    };
    configure_threads()?;
    let outcome = commands::execute(&cli.command)?;
    outcome.emit(commands::common(&cli.command))
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
