use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use tumorfront::config::{Command as RunCommand, KeyValues};
use tumorfront::{cli, Dim, Error};

/// Front propagation in the Brinkman cell-density tumor model: closed-form
/// free-boundary solutions, the front DAE, and front-capturing PDE runs,
/// all emitting CSV.
#[derive(Parser)]
#[command(name = "tumorfront", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// Plain-text config file with `key = value` lines.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override one config key (repeatable), e.g. `--set params.c_z=0.2`.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Concurrent sweep entries.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Reserved; the core is deterministic and ignores it.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Integrate the front DAE; writes front.csv.
    Analytic {
        /// Symmetry: 1d, 2d or 3d.
        dim: String,
    },
    /// Evaluate the closed-form profile; writes profile.csv.
    Profile { dim: String },
    /// Tabulate the inner radius against the outer one; writes relation.csv.
    Relation { dim: String },
    /// Run the 1D scheme; writes snapshots and diagnostics.csv.
    Sim1d,
    /// Run the radial scheme; writes snapshots and diagnostics.csv.
    Simradial,
    /// Run PDE and DAE from the same geometry; writes discrepancy.csv.
    Compare {
        /// `1d` or `radial`.
        kind: String,
    },
    /// Cross product over sweep.parameter; writes summary.csv.
    Sweep,
}

fn parse_dim(s: &str) -> Result<Dim, Error> {
    match s {
        "1d" | "1" => Ok(Dim::One),
        "2d" | "2" => Ok(Dim::Two),
        "3d" | "3" => Ok(Dim::Three),
        other => Err(Error::Config(format!("expected 1d, 2d or 3d, got '{other}'"))),
    }
}

fn execute(args: Cli) -> Result<(), Error> {
    let (command, dim) = match &args.command {
        Cmd::Analytic { dim } => (RunCommand::Analytic, parse_dim(dim)?),
        Cmd::Profile { dim } => (RunCommand::Profile, parse_dim(dim)?),
        Cmd::Relation { dim } => (RunCommand::Relation, parse_dim(dim)?),
        Cmd::Sim1d => (RunCommand::Sim1d, Dim::One),
        Cmd::Simradial => (RunCommand::SimRadial, Dim::Two),
        Cmd::Compare { kind } => match kind.as_str() {
            "1d" => (RunCommand::Compare, Dim::One),
            "radial" | "2d" => (RunCommand::Compare, Dim::Two),
            other => {
                return Err(Error::Config(format!("compare expects 1d or radial, got '{other}'")))
            }
        },
        Cmd::Sweep => (RunCommand::Sweep, Dim::One),
    };

    let mut kv = match &args.config {
        Some(path) => KeyValues::parse_file(path)?,
        None => KeyValues::default(),
    };
    for assignment in &args.set {
        kv.set(assignment)?;
    }
    if let Some(jobs) = args.jobs {
        kv.set(&format!("jobs={jobs}"))?;
    }
    let cfg = kv.resolve(command, dim, args.out.clone())?;
    cli::run(&cfg)?;
    Ok(())
}

fn main() -> ExitCode {
    let args = Cli::parse();
    match execute(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e @ Error::Config(_)) | Err(e @ Error::Domain(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
