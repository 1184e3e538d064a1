use clap::{Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

use orientdecoh_cli::selftest::{selftest, SelftestOptions};
use orientdecoh_cli::{execute, write_preset, CliError, Config, Format, Scenario};

/// Orientational decoherence rates, diffusion coefficients and rotor simulations.
#[derive(Parser)]
#[command(name = "orientdecoh", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a TOML configuration.
    Run {
        config: PathBuf,
        /// Output file, overriding `output.path`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the invariant battery.
    Selftest {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, hide = true, default_value_t = 1.0)]
        perturb_hbar: f64,
    },
    /// Write a built-in figure data set.
    Preset {
        name: PresetName,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
        format: FormatArg,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum PresetName {
    Fig1,
    Fig2a,
    Fig2b,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

fn configure_threads() -> Result<(), CliError> {
    if let Ok(value) = std::env::var("ORIENTDECOH_THREADS") {
        let n: usize = value
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::precondition("ORIENTDECOH_THREADS", "must be a positive integer"))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Io(e.to_string()))?;
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    match cli.command {
        Command::Run { config, out } => {
            let cfg = Config::from_file(&config)?;
            if let Some(path) = execute(&cfg, out.as_deref())? {
                eprintln!("wrote {}", path.display());
            }
            Ok(())
        }
        Command::Selftest { seed, perturb_hbar } => {
            let report = selftest(&SelftestOptions {
                seed,
                hbar_factor: perturb_hbar,
            });
            print!("{}", report.render());
            if report.passed() {
                Ok(())
            } else {
                Err(CliError::SelftestFailed)
            }
        }
        Command::Preset { name, out, format } => {
            let scenario = match name {
                PresetName::Fig1 => Scenario::Fig1,
                PresetName::Fig2a => Scenario::Fig2a,
                PresetName::Fig2b => Scenario::Fig2b,
            };
            let format = match format {
                FormatArg::Csv => Format::Csv,
                FormatArg::Json => Format::Json,
            };
            let path = write_preset(scenario, format, &out)?;
            eprintln!("wrote {}", path.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
