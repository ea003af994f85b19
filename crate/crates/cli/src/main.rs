//! `degpv`: verification suites, trajectories, monodromy, Bäcklund maps and
//! the monodromy cubic from the command line.
//!
//! Exit codes: 0 when every check passes, 1 on a numerical or suite
//! failure, 2 on a usage or configuration error. `DEGPV_LOG` sets the log
//! level (default `warn`).

mod commands;
mod config;
mod json;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use degpv::{BTKind, Flow};

use commands::Failure;
use config::{complex, parse_pair, ContourFile, FileConfig, Pair, RunConfig, SweepFile};

#[derive(Parser, Debug)]
#[command(name = "degpv", version, about = "Isomonodromy toolkit for the degenerate fifth Painleve equation")]
struct Cli {
    /// TOML configuration; flags given on the command line take precedence.
    #[arg(long, short, global = true)]
    config: Option<PathBuf>,

    #[command(flatten)]
    overrides: Overrides,

    #[command(subcommand)]
    command: Command,
}

/// Flags mirroring the configuration file keys. Complex values are `re,im`.
#[derive(Args, Debug, Default)]
struct Overrides {
    #[arg(long, global = true, value_parser = parse_pair)]
    theta0: Option<Pair>,
    #[arg(long, global = true, value_parser = parse_pair)]
    theta1: Option<Pair>,
    #[arg(long, global = true, value_parser = parse_pair)]
    t_start: Option<Pair>,
    #[arg(long, global = true, value_parser = parse_pair)]
    t_end: Option<Pair>,
    #[arg(long = "q0", global = true, value_parser = parse_pair)]
    initial_q: Option<Pair>,
    #[arg(long = "p0", global = true, value_parser = parse_pair)]
    initial_p: Option<Pair>,
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Number of equal segments of the t path.
    #[arg(long, global = true)]
    steps: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Cases per verification suite.
    #[arg(long, global = true)]
    cases: Option<usize>,
    /// Output file; standard output when absent.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Base point of the monodromy loops.
    #[arg(long, global = true, value_parser = parse_pair)]
    base: Option<Pair>,
    #[arg(long, global = true)]
    radius0: Option<f64>,
    #[arg(long, global = true)]
    radius1: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the identity suites and print a JSON report.
    Verify,
    /// Integrate from the initial state and write the trajectory CSV.
    Integrate {
        #[arg(long, value_enum, default_value_t = FlowArg::Hamiltonian)]
        flow: FlowArg,
    },
    /// Monodromy invariants at the initial state and their drift along the solution.
    Monodromy {
        /// Points along the solution at which the invariants are compared.
        #[arg(long, default_value_t = 5)]
        checks: usize,
    },
    /// Apply a Bäcklund transformation to a trajectory CSV.
    Backlund {
        #[arg(long, value_enum)]
        kind: KindArg,
        /// Trajectory CSV; integrated from the configuration when absent.
        #[arg(long, short)]
        input: Option<PathBuf>,
    },
    /// Singular points of the monodromy cubic and the exceptional fiber.
    Surface {
        #[arg(long, value_parser = parse_pair, default_value = "3,0")]
        s0: Pair,
        #[arg(long, value_parser = parse_pair, default_value = "2,0")]
        s1: Pair,
        /// Number of points sampled on the exceptional line.
        #[arg(long, default_value_t = 5)]
        fiber: usize,
    },
    /// Integrate and check isomonodromy over a grid of real parameters.
    Sweep {
        #[arg(long, value_parser = parse_pair)]
        theta0_range: Option<Pair>,
        #[arg(long, value_parser = parse_pair)]
        theta1_range: Option<Pair>,
        #[arg(long)]
        n0: Option<usize>,
        #[arg(long)]
        n1: Option<usize>,
        /// Invariant checks per grid point.
        #[arg(long)]
        checks: Option<usize>,
        /// Worker threads; all cores when absent.
        #[arg(long)]
        jobs: Option<usize>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FlowArg {
    Hamiltonian,
    Scalar,
    Moduli,
}

impl From<FlowArg> for Flow {
    fn from(f: FlowArg) -> Self {
        match f {
            FlowArg::Hamiltonian => Flow::Hamiltonian,
            FlowArg::Scalar => Flow::Scalar,
            FlowArg::Moduli => Flow::Moduli,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum KindArg {
    NegateT,
    Flip0,
    Flip1,
    Swap,
    Shift,
}

impl From<KindArg> for BTKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::NegateT => BTKind::NegateT,
            KindArg::Flip0 => BTKind::FlipTheta0,
            KindArg::Flip1 => BTKind::FlipTheta1,
            KindArg::Swap => BTKind::Swap,
            KindArg::Shift => BTKind::Shift,
        }
    }
}

impl Overrides {
    fn into_layer(self, command: &Command) -> FileConfig {
        let sweep = match command {
            Command::Sweep { theta0_range, theta1_range, n0, n1, checks, jobs } => SweepFile {
                theta0_range: *theta0_range,
                theta1_range: *theta1_range,
                n0: *n0,
                n1: *n1,
                checks: *checks,
                jobs: *jobs,
            },
            _ => SweepFile::default(),
        };
        FileConfig {
            theta0: self.theta0,
            theta1: self.theta1,
            t_start: self.t_start,
            t_end: self.t_end,
            initial_q: self.initial_q,
            initial_p: self.initial_p,
            tol: self.tol,
            steps: self.steps,
            seed: self.seed,
            cases: self.cases,
            output: self.output,
            contour: ContourFile { base: self.base, radius0: self.radius0, radius1: self.radius1 },
            sweep,
        }
    }
}

fn run(cli: Cli) -> Result<bool, Failure> {
    let file = match &cli.config {
        Some(path) => FileConfig::load(path).map_err(Failure::Usage)?,
        None => FileConfig::default(),
    };
    let layer = cli.overrides.into_layer(&cli.command);
    let cfg = RunConfig::resolve(file, layer).map_err(Failure::Usage)?;
    log::debug!("resolved configuration {cfg:?}");
    match cli.command {
        Command::Verify => commands::cmd_verify(&cfg),
        Command::Integrate { flow } => commands::cmd_integrate(&cfg, flow.into()),
        Command::Monodromy { checks } => commands::cmd_monodromy(&cfg, checks),
        Command::Backlund { kind, input } => commands::cmd_backlund(&cfg, kind.into(), input.as_ref()),
        Command::Surface { s0, s1, fiber } => commands::cmd_surface(&cfg, complex(s0), complex(s1), fiber),
        Command::Sweep { .. } => commands::cmd_sweep(&cfg),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("DEGPV_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // help and version requests are not errors
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("degpv: checks failed");
            ExitCode::from(1)
        }
        Err(f) => {
            eprintln!("degpv: {:#}", f.error());
            ExitCode::from(f.exit_code())
        }
    }
}
