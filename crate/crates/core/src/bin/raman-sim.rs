use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cavity_raman::config::{apply_overrides, validate_config_with, Config, ResolvedConfig};
use cavity_raman::oracle::{oracle_check, OracleScan};
use cavity_raman::scenario::{run_scenario, Scenario};
use cavity_raman::Result;

#[derive(Parser)]
#[command(name = "raman-sim", version, about = "Cavity-stimulated Raman spin-flip emission simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a named scenario and write CSV outputs plus manifest.toml.
    Simulate {
        #[arg(long)]
        scenario: String,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Override a configuration key, e.g. device.magnetic_field_T=6.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
    /// Check a configuration file and print the resolved parameters.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Engine versus closed-form sideband ratios in the weak-drive regime.
    OracleCheck {
        #[arg(long, default_value_t = 0.05)]
        tolerance: f64,
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

fn resolve(config: Option<&PathBuf>, set: &[String]) -> Result<ResolvedConfig> {
    let resolved = match config {
        Some(path) => validate_config_with(path, set)?,
        None => apply_overrides(&Config::default(), set)?.resolve()?,
    };
    for w in &resolved.warnings {
        log::warn!("{w}");
    }
    Ok(resolved)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate {
            scenario,
            config,
            out,
            set,
        } => {
            let scenario: Scenario = scenario.parse()?;
            let resolved = resolve(config.as_ref(), &set)?;
            let dir = out.join(scenario.name());
            let manifest = run_scenario(scenario, &resolved, &dir)?;
            println!("{}: wrote {} files to {}", scenario, manifest.files.len(), dir.display());
            for m in &manifest.metrics {
                match m.reference {
                    Some(r) => println!("  {:<32} {:>14.6} (reference {r})", m.name, m.value),
                    None => println!("  {:<32} {:>14.6}", m.name, m.value),
                }
            }
        }
        Command::Validate { config } => {
            let resolved = resolve(Some(&config), &[])?;
            print!("{}", resolved.config.to_toml());
            println!("# resolved qd_cavity_coupling_ueV = {}", resolved.params.qd_cavity_coupling);
            println!("# resolved spin_flip_rate_ueV = {:e}", resolved.params.spin_flip_rate);
        }
        Command::OracleCheck { tolerance, config } => {
            let resolved = resolve(config.as_ref(), &[])?;
            let sc = &resolved.config.scenario;
            let scan = OracleScan {
                span: sc.oracle_span_ueV,
                step: sc.oracle_step_ueV,
                exclusion: sc.oracle_exclusion_ueV,
                tolerance,
            };
            let report = oracle_check(&resolved.params, &scan, &resolved.config.model_options())?;
            println!("oracle check passed: RMS {:.4} <= {tolerance}", report.rms);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
