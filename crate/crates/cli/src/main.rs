use std::net::{IpAddr, SocketAddr};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use mmrx_cli::commands::{self, OutputFormat};
use mmrx_core::montecarlo::{Scenario, PRESET_NAMES};

#[derive(Parser)]
#[command(name = "mmrx", version, about = "SE vs EE sweeps for analog, hybrid and digital mmWave receivers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte Carlo sweep and write a chart document.
    Sweep {
        /// Scenario file (TOML, or JSON with a .json extension).
        #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
        scenario: Option<PathBuf>,
        /// Built-in scenario instead of a file.
        #[arg(long)]
        preset: Option<String>,
        /// Output path; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Defaults to the extension of --out, else json.
        #[arg(long, value_enum)]
        format: Option<OutputFormat>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        trials: Option<u64>,
    },
    /// Print the utility-maximizing design of a chart for one or more alphas.
    Utility {
        /// Chart document written by `mmrx sweep`.
        chart: PathBuf,
        /// A number in [0, 1], a comma-separated list, or `grid`.
        #[arg(long, default_value = "grid")]
        alpha: String,
    },
    /// Print a built-in scenario as TOML, or list the built-in names.
    Preset {
        name: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Serve the HTTP evaluation API.
    Serve {
        #[arg(long, env = "MMRX_BIND", default_value = "127.0.0.1")]
        bind: IpAddr,
        #[arg(long, env = "MMRX_PORT", default_value_t = 8080)]
        port: u16,
    },
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => commands::write_atomic(path, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Sweep {
            scenario,
            preset,
            out,
            format,
            seed,
            trials,
        } => {
            let base = match (scenario, preset) {
                (Some(path), _) => {
                    Scenario::load(&path).with_context(|| format!("invalid scenario {}", path.display()))?
                }
                (None, Some(name)) => match Scenario::preset(&name) {
                    Some(s) => s,
                    None => bail!("unknown preset {name:?}; expected one of {PRESET_NAMES:?}"),
                },
                (None, None) => bail!("either --scenario or --preset is required"),
            };
            let scenario = commands::with_overrides(base, seed, trials)?;
            let format = format
                .or_else(|| out.as_deref().map(OutputFormat::from_path))
                .unwrap_or(OutputFormat::Json);
            let doc = commands::evaluate(&scenario)?;
            let text = commands::render(&doc, format)?;
            emit(out.as_ref(), &text)?;
            eprintln!(
                "{}: {} points, {} of {} trials valid, {} failures",
                scenario.name,
                doc.points.len(),
                doc.metadata.valid_trials,
                doc.metadata.trials,
                doc.failures.len()
            );
            Ok(())
        }
        Command::Utility { chart, alpha } => {
            let alphas = commands::parse_alphas(&alpha)?;
            let doc = commands::load_chart(&chart)?;
            print!("{}", commands::utility_table(&doc, &alphas)?);
            Ok(())
        }
        Command::Preset { name: None, .. } => {
            for n in PRESET_NAMES {
                println!("{n}");
            }
            Ok(())
        }
        Command::Preset { name: Some(name), out } => {
            let Some(s) = Scenario::preset(&name) else {
                bail!("unknown preset {name:?}; expected one of {PRESET_NAMES:?}");
            };
            emit(out.as_ref(), &s.to_toml_string())
        }
        Command::Serve { bind, port } => {
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(mmrx_cli::service::serve(SocketAddr::new(bind, port)))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
