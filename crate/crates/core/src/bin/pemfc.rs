//! Command-line front end: runs scenario files and tabulates correlations.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use pemfc_core::scenario::{self, Correlation, RunKind, Scenario};
use pemfc_core::{Error, Result};

#[derive(Parser, Debug)]
#[command(name = "pemfc", version, about = "Dynamic 1D two-phase PEM fuel cell simulator")]
struct Cli {
    /// Output directory (default: output.dir of the scenario, else
    /// $PEMFC_OUT_DIR/<scenario name>, else pemfc_out/<scenario name>).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Print nothing on success.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a scenario of any kind.
    Run {
        /// Scenario file.
        scenario: PathBuf,
    },
    /// Run a sweep scenario.
    Sweep {
        /// Scenario file.
        scenario: PathBuf,
    },
    /// Run a fit scenario.
    Fit {
        /// Scenario file.
        scenario: PathBuf,
    },
    /// Tabulate a correlation.
    PropsTable {
        /// Correlation name.
        name: String,
        /// First abscissa.
        #[arg(long, allow_negative_numbers = true)]
        from: f64,
        /// Last abscissa.
        #[arg(long, allow_negative_numbers = true)]
        to: f64,
        /// Number of rows.
        #[arg(long, default_value_t = 101)]
        points: usize,
        /// Temperature of correlations not tabulated against it, K.
        #[arg(long, default_value_t = 353.15)]
        temperature: f64,
        /// Pressure of the binary diffusivities, Pa.
        #[arg(long, default_value_t = 101_325.0)]
        pressure: f64,
    },
    /// Check a scenario and print the resolved configuration.
    Validate {
        /// Scenario file.
        scenario: PathBuf,
    },
}

fn run_scenario(cli: &Cli, path: &Path, required: Option<&str>) -> Result<()> {
    let sc = Scenario::from_path(path)?;
    if let Some(kind) = required {
        if sc.run.name() != kind {
            return Err(Error::Validation(format!(
                "run.kind = \"{kind}\" for this command, found \"{}\"",
                sc.run.name()
            )));
        }
    }
    let out = scenario::output_dir(cli.out.as_deref(), &sc, path);
    let report = scenario::execute(&sc, &out)?;
    if !cli.quiet {
        print!("{}", report.summary);
        for f in &report.files {
            println!("wrote {}", f.display());
        }
    }
    Ok(())
}

fn dispatch(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Run { scenario } => run_scenario(cli, scenario, None),
        Command::Sweep { scenario } => run_scenario(cli, scenario, Some("sweep")),
        Command::Fit { scenario } => run_scenario(cli, scenario, Some("fit")),
        Command::Validate { scenario } => {
            let sc = Scenario::from_path(scenario)?;
            if !cli.quiet {
                print!("{}", sc.to_toml_string()?);
            }
            Ok(())
        }
        Command::PropsTable { name, from, to, points, temperature, pressure } => {
            let correlation: Correlation = name.parse()?;
            let sc = Scenario {
                run: RunKind::PropsTable {
                    correlation,
                    from: *from,
                    to: *to,
                    points: *points,
                    temperature: *temperature,
                    pressure: *pressure,
                },
                ..Scenario::default()
            };
            sc.validate()?;
            let out = scenario::output_dir(cli.out.as_deref(), &sc, Path::new("props_table"));
            let report = scenario::execute(&sc, &out)?;
            if !cli.quiet {
                print!("{}", report.summary);
                for f in &report.files {
                    println!("wrote {}", f.display());
                }
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
