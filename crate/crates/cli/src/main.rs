use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod config;
mod output;
mod run;

use config::{Overrides, RunConfig};
use run::{Format, Numerical};

#[derive(Parser)]
#[command(name = "ptdirac", version, about = "Bound states of PT-symmetric Dirac Hamiltonians")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form spectrum, optionally checked against the numerical oracles
    Spectrum {
        #[command(flatten)]
        common: Common,
        /// Compare every valid level with shooting and the Dirac operator
        #[arg(long)]
        verify: bool,
    },
    /// Two-component spinor of level `spinor.n` sampled on the grid
    Spinor {
        #[command(flatten)]
        common: Common,
    },
    /// Every check available for the configured family
    Verify {
        #[command(flatten)]
        common: Common,
    },
    /// Parity of the couplings and of the effective potential
    Ptcheck {
        #[command(flatten)]
        common: Common,
    },
    /// Normalisation constants
    Norm {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Records,
}

#[derive(clap::Args)]
struct Common {
    /// TOML run configuration
    #[arg(long)]
    config: PathBuf,
    /// Output file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Number of grid points
    #[arg(long)]
    grid_n: Option<usize>,
    /// Half width L of the symmetric grid [-L, L]
    #[arg(long = "box")]
    half_width: Option<f64>,
    /// Tolerance of the closed form against the shooting oracle
    #[arg(long)]
    tol: Option<f64>,
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<Numerical>().is_some() {
        return 3;
    }
    if let Some(e) = err.chain().find_map(|c| c.downcast_ref::<ptdirac::Error>()) {
        use ptdirac::Error::*;
        return match e {
            Convergence(_) | NotFound(_) | NonFinite(_) => 3,
            _ => 2,
        };
    }
    2
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (common, default_format) = match &cli.command {
        Command::Spectrum { common, .. } | Command::Verify { common } | Command::Ptcheck { common } => {
            (common, Format::Records)
        }
        Command::Spinor { common } => (common, Format::Csv),
        Command::Norm { common } => (common, Format::Records),
    };
    let format = match common.format {
        Some(FormatArg::Csv) => Format::Csv,
        Some(FormatArg::Records) => Format::Records,
        None => default_format,
    };
    let ov = Overrides { grid_n: common.grid_n, half_width: common.half_width, tol: common.tol };

    let result = RunConfig::load(&common.config, ov).and_then(|cfg| {
        let outcome = match &cli.command {
            Command::Spectrum { verify, .. } => run::spectrum(&cfg, *verify, format),
            Command::Spinor { .. } => run::spinor(&cfg, format),
            Command::Verify { .. } => run::verify(&cfg, format),
            Command::Ptcheck { .. } => run::ptcheck(&cfg, format),
            Command::Norm { .. } => run::norm(&cfg, format),
        }?;
        output::emit(common.out.as_deref(), &outcome.text)?;
        Ok(outcome.failed)
    });
    match result {
        Ok(failed) if failed.is_empty() => ExitCode::SUCCESS,
        Ok(failed) => {
            eprintln!("ptdirac: failed checks: {}", failed.join(", "));
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("ptdirac: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
