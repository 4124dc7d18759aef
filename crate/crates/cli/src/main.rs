//! `hardy-lab`: sharp Hardy constants, verification batteries and
//! sharpness searches from the command line.
//!
//! Exit codes: 0 success, 2 inadmissible or invalid input, 3 a check failed,
//! 4 numeric or convergence failure, 5 nothing was verified, 1 I/O error.

mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hardy_lab::Error;

use crate::commands::{SharpnessArgs, VerifyArgs};
use crate::config::CommonArgs;
use crate::report::Status;

#[derive(Debug, Parser)]
#[command(
    name = "hardy-lab",
    version,
    about = "Sharp Hardy inequalities on homogeneous groups"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sharp constant, bracket, sphere measure and derived exponents
    Constant {
        #[command(flatten)]
        common: CommonArgs,
        /// Conjugate inequality (requires alpha > Q(p-1))
        #[arg(long)]
        conjugate: bool,
    },
    /// Run the inequality check battery on a set of test functions
    Verify {
        #[command(flatten)]
        common: CommonArgs,
        /// Built-in profile such as `gaussian:width=2`; repeatable
        #[arg(long)]
        family: Vec<String>,
        /// Two-column (r, value) file
        #[arg(long)]
        profile: Option<PathBuf>,
        /// Number of random smooth and random piecewise-power profiles each
        #[arg(long)]
        random: Option<usize>,
    },
    /// Search a profile family for near-extremal quotients
    Sharpness {
        #[command(flatten)]
        common: CommonArgs,
        /// truncated_power, bliss, or a starting profile such as `bliss:c=1,a=2,b=1`
        #[arg(long)]
        family: Option<String>,
        #[arg(long)]
        budget: Option<usize>,
        #[arg(long)]
        cycles: Option<usize>,
    },
    /// Measure of the unit quasi-sphere
    Sphere {
        #[command(flatten)]
        common: CommonArgs,
    },
}

fn error_code(e: &Error) -> u8 {
    match e {
        Error::InvalidInput(_)
        | Error::IncompatibleSpec(_)
        | Error::Inadmissible(_)
        | Error::InadmissibleFamily(_)
        | Error::Degenerate(_) => 2,
        Error::GeometryConfig(_)
        | Error::Numeric(_)
        | Error::Sampling(_)
        | Error::Convergence { .. } => 4,
    }
}

fn run(cli: Cli) -> Result<(report::Report, config::RunConfig), Error> {
    match cli.command {
        Command::Constant { common, conjugate } => {
            let cfg = common.resolve()?;
            Ok((commands::constant(&cfg, conjugate)?, cfg))
        }
        Command::Verify {
            common,
            family,
            profile,
            random,
        } => {
            let cfg = common.resolve()?;
            let args = VerifyArgs {
                family,
                profile,
                random,
            };
            Ok((commands::verify(&cfg, &args)?, cfg))
        }
        Command::Sharpness {
            common,
            family,
            budget,
            cycles,
        } => {
            let cfg = common.resolve()?;
            let args = SharpnessArgs {
                family,
                budget,
                cycles,
            };
            Ok((commands::sharpness(&cfg, &args)?, cfg))
        }
        Command::Sphere { common } => {
            let cfg = common.resolve()?;
            Ok((commands::sphere_cmd(&cfg)?, cfg))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (report, cfg) = match run(cli) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(error_code(&e));
        }
    };
    let text = report.render(cfg.format);
    match &cfg.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(1);
            }
        }
        None => print!("{text}"),
    }
    match report.status {
        Status::Ok | Status::Pass => ExitCode::SUCCESS,
        Status::Fail => {
            if let Some(checks) = &report.checks {
                for c in checks.iter().filter(|c| !c.passed) {
                    eprintln!("check failed: {}", c.check);
                }
            }
            ExitCode::from(3)
        }
        Status::NothingVerified => {
            eprintln!("nothing verified: the test-function set is empty");
            ExitCode::from(5)
        }
    }
}
