use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use cyclovortex::app::{run, Subcommand, EXIT_INVALID};
use cyclovortex::config::parse_config_with_overrides;
use cyclovortex::error::Error;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Command {
    /// Per-step state and angular momenta of single orbits.
    Orbit,
    /// Ensemble observables over time.
    Vortex,
    /// Radial azimuthal-current profile.
    Field,
    /// Landau energy table.
    Landau,
    /// Run every consistency check and write a report.
    Verify,
}

#[derive(Debug, Parser)]
#[command(name = "cyclovortex", version, about = "Classical electron vortices from cyclotron orbits")]
struct Args {
    #[arg(value_enum)]
    command: Command,

    /// Configuration file (`key = value`, optional sections).
    #[arg(long)]
    config: Option<PathBuf>,

    /// Override a configuration key, e.g. `--set geometry.R=2`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,

    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_INVALID as u8)
        }
    }
}

fn execute(args: &Args) -> Result<i32, Error> {
    let text = match &args.config {
        Some(path) => fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?,
        None => String::new(),
    };
    let config = parse_config_with_overrides(&text, &args.overrides)?;
    let cmd = match args.command {
        Command::Orbit => Subcommand::Orbit,
        Command::Vortex => Subcommand::Vortex,
        Command::Field => Subcommand::Field,
        Command::Landau => Subcommand::Landau,
        Command::Verify => Subcommand::Verify,
    };
    let outcome = run(cmd, &config, &args.out)?;
    for f in &outcome.files {
        println!("wrote {}", f.display());
    }
    Ok(outcome.exit_code)
}
