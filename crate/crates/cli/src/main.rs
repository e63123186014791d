use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use optomech_cli::config::{parse_ratios, Overrides, RunConfig};
use optomech_cli::{cmd_evolve, cmd_figure, cmd_scan, cmd_validate, render_summary, FigureKind};

/// Single-photon mechanical entanglement curves and cross-validation.
#[derive(Parser)]
#[command(name = "optomech", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// omega_m / g_mag
    #[arg(long)]
    ratio: Option<f64>,
    /// xi / omega_m (the closed form requires 0.5)
    #[arg(long = "xi-ratio")]
    xi_ratio: Option<f64>,
    /// Upper end of the scaled-time grid
    #[arg(long = "tau-max")]
    tau_max: Option<f64>,
    /// Number of grid points, endpoints included
    #[arg(long)]
    steps: Option<usize>,
    /// Fock truncation per mechanical mode
    #[arg(long = "nb")]
    n_b: Option<usize>,
    /// omega_c / g_mag (global phase only)
    #[arg(long = "omega-c")]
    omega_c: Option<f64>,
    /// Output CSV path; a `.meta` sidecar is written next to it
    #[arg(long)]
    out: PathBuf,
    /// Optional key=value config file (flags take precedence)
    #[arg(long)]
    config: Option<PathBuf>,
}

impl CommonArgs {
    fn resolve(&self) -> anyhow::Result<RunConfig> {
        let flags = Overrides {
            ratio: self.ratio,
            xi_ratio: self.xi_ratio,
            tau_max: self.tau_max,
            steps: self.steps,
            n_b: self.n_b,
            omega_c: self.omega_c,
        };
        RunConfig::resolve(self.out.clone(), self.config.as_deref(), &flags)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FigureArg {
    Concurrence,
    Average,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form probabilities and concurrences over the time grid
    Evolve {
        #[command(flatten)]
        args: CommonArgs,
    },
    /// Plot-ready curves: per-branch concurrence or the average envelope
    Figure {
        #[arg(value_enum)]
        which: FigureArg,
        #[command(flatten)]
        args: CommonArgs,
    },
    /// Cross-validate the propagators against the closed form
    Validate {
        /// Comma-separated list of omega_m / g_mag ratios
        #[arg(long, default_value = "10,15,30")]
        ratios: String,
        #[command(flatten)]
        args: CommonArgs,
    },
    /// Peak achievable average concurrence per ratio
    Scan {
        /// Comma-separated list of omega_m / g_mag ratios
        #[arg(long)]
        ratios: String,
        #[command(flatten)]
        args: CommonArgs,
    },
}

fn run() -> anyhow::Result<ExitCode> {
    let cli = Cli::parse();
    match cli.command {
        Command::Evolve { args } => {
            cmd_evolve(&args.resolve()?)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Figure { which, args } => {
            let kind = match which {
                FigureArg::Concurrence => FigureKind::Concurrence,
                FigureArg::Average => FigureKind::Average,
            };
            cmd_figure(kind, &args.resolve()?)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate { ratios, args } => {
            let summary = cmd_validate(&args.resolve()?, &parse_ratios(&ratios)?)?;
            print!("{}", render_summary(&summary));
            if summary.passed() {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::from(1))
            }
        }
        Command::Scan { ratios, args } => {
            cmd_scan(&args.resolve()?, &parse_ratios(&ratios)?)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
