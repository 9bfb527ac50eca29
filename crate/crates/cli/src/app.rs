use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use tgc_core::Method;

use crate::commands::{self, Command, Outcome};
use crate::config::{Format, GridArg, RunConfig, DEFAULT_MC_SAMPLES};

pub const EXIT_OK: u8 = 0;
pub const EXIT_INPUT: u8 = 1;
pub const EXIT_VERDICT: u8 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "tgc",
    version,
    about = "Capacities, volumes and geodesics of toric Reinhardt sets"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Cmd,
    #[command(flatten)]
    pub options: Options,
}

#[derive(Debug, Args)]
pub struct Options {
    /// exact, quadrature, monte_carlo or auto
    #[arg(long, global = true, default_value = "auto")]
    pub method: Method,
    /// Relative tolerance of deterministic estimates
    #[arg(long = "tol", global = true)]
    pub tolerance: Option<f64>,
    /// Monte Carlo sample count (at least 1000)
    #[arg(long, global = true, default_value_t = DEFAULT_MC_SAMPLES)]
    pub mc_samples: u64,
    #[arg(long, global = true, env = "TGC_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Point count of a uniform grid, or a comma-separated list from 0 to 1
    #[arg(long, global = true, default_value = "21")]
    pub t_grid: GridArg,
    /// Output file (default: stdout)
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Capacity of one set relative to the unit polydisk
    Capacity {
        /// Set file (JSON)
        spec: PathBuf,
        /// Set name in the file
        set: String,
    },
    /// Lebesgue volume of one set
    Volume {
        /// Set file (JSON)
        spec: PathBuf,
        /// Set name in the file
        set: String,
    },
    /// Capacity along the geometric-mean interpolation of two sets
    Sweep {
        /// Set file (JSON)
        spec: PathBuf,
        /// Set at t = 0
        set0: String,
        /// Set at t = 1
        set1: String,
    },
    /// Sweep plus volume log-concavity and the equality margin at t = 0.5
    CheckBm {
        /// Set file (JSON)
        spec: PathBuf,
        /// Set at t = 0
        set0: String,
        /// Set at t = 1
        set1: String,
    },
    /// Geodesic value at one point
    Geodesic {
        /// Set file (JSON)
        spec: PathBuf,
        /// Set at t = 0
        set0: String,
        /// Set at t = 1
        set1: String,
        /// Geodesic time in [0, 1]
        #[arg(long)]
        t: f64,
        /// Comma-separated log-moduli s_1,...,s_n
        #[arg(
            long,
            allow_hyphen_values = true,
            value_delimiter = ',',
            required = true
        )]
        point: Vec<f64>,
    },
}

impl From<Cmd> for Command {
    fn from(cmd: Cmd) -> Self {
        match cmd {
            Cmd::Capacity { spec, set } => Command::Capacity { spec, set },
            Cmd::Volume { spec, set } => Command::Volume { spec, set },
            Cmd::Sweep { spec, set0, set1 } => Command::Sweep { spec, set0, set1 },
            Cmd::CheckBm { spec, set0, set1 } => Command::CheckBm { spec, set0, set1 },
            Cmd::Geodesic {
                spec,
                set0,
                set1,
                t,
                point,
            } => Command::Geodesic {
                spec,
                set0,
                set1,
                t,
                point,
            },
        }
    }
}

impl From<Options> for RunConfig {
    fn from(o: Options) -> Self {
        RunConfig {
            method: o.method,
            tolerance: o.tolerance,
            mc_samples: o.mc_samples,
            seed: o.seed,
            t_grid: o.t_grid,
            output: o.out,
            format: o.format,
        }
    }
}

/// Parses arguments, runs the command and maps the result to an exit code.
pub fn main_with<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::from(EXIT_OK),
                _ => ExitCode::from(EXIT_INPUT),
            };
        }
    };
    let command = Command::from(cli.command);
    let config = RunConfig::from(cli.options);
    let outcome = match commands::run(&command, &config).and_then(|o| {
        commands::emit(&o, &config)?;
        Ok(o)
    }) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INPUT);
        }
    };
    ExitCode::from(report_verdicts(&outcome, &mut std::io::stderr().lock()))
}

/// Prints verdict failures together with the serialized instance and
/// returns the exit code.
pub fn report_verdicts(outcome: &Outcome, err: &mut impl Write) -> u8 {
    if outcome.failures.is_empty() {
        return EXIT_OK;
    }
    for failure in &outcome.failures {
        let _ = writeln!(err, "error: verdict failure: {failure}");
    }
    let _ = writeln!(err, "instance: {}", outcome.instance);
    EXIT_VERDICT
}
