use std::path::{Path, PathBuf};
use std::process::ExitCode as ProcessExit;

use clap::{Parser, Subcommand};
use mhdnudge::experiments::{
    parse_values, run_scenario, run_sweep, verify_interpolant_config, Check, CheckStatus,
    ExitCode, ExperimentConfig, Scenario, SweepAxis,
};
use mhdnudge::Error;

/// Nudging experiments for 2D periodic MHD.
#[derive(Parser)]
#[command(name = "mhdnudge", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Overrides the seed of the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides the output directory of the config.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scenario described by a config file.
    Run { config: PathBuf },
    /// Run the scenario once per value of one parameter.
    Sweep {
        config: PathBuf,
        /// mu, h or grashof.
        #[arg(long)]
        axis: String,
        /// Comma-separated values.
        #[arg(long, allow_hyphen_values = true)]
        values: String,
    },
    /// Fit and re-check the interpolant constants.
    VerifyInterpolant { config: PathBuf },
    /// Run the determining-interpolant experiment.
    Determining { config: PathBuf },
}

fn load(cli: &Cli, path: &Path) -> Result<ExperimentConfig, Error> {
    let mut config = ExperimentConfig::load(path)?;
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(dir) = &cli.output {
        config.output_dir = Some(dir.clone());
    }
    config.validate()?;
    Ok(config)
}

fn print_checks(checks: &[Check]) {
    for c in checks {
        let tag = match c.status {
            CheckStatus::Pass => "PASS",
            CheckStatus::Fail => "FAIL",
            CheckStatus::Skipped => "SKIP",
        };
        println!("{tag} {}: {}", c.name, c.detail);
    }
}

fn scenario(config: &ExperimentConfig) -> Result<ExitCode, Error> {
    let out = run_scenario(config)?;
    let s = &out.summary;
    println!(
        "scenario {:?}: G = {:.4}, mu = {}, h = {}, dt = {:e}",
        s.scenario, s.grashof, s.mu, s.h, s.dt
    );
    print_checks(&s.checks);
    if let Some(dir) = &config.output_dir {
        println!("wrote {}", dir.display());
    }
    Ok(if out.passed() { ExitCode::Ok } else { ExitCode::CheckFailed })
}

fn execute(cli: &Cli) -> Result<ExitCode, Error> {
    match &cli.command {
        Command::Run { config } => scenario(&load(cli, config)?),
        Command::Determining { config } => {
            let mut config = load(cli, config)?;
            config.scenario = Scenario::DeterminingInterpolant;
            scenario(&config)
        }
        Command::Sweep { config, axis, values } => {
            let config = load(cli, config)?;
            let axis: SweepAxis = axis.parse()?;
            let table = run_sweep(&config, axis, &parse_values(values)?)?;
            print!("{}", table.to_csv());
            for row in table.rows.iter().filter(|r| r.error.is_some()) {
                eprintln!("{axis} = {}: {}", row.value, row.error.as_deref().unwrap_or_default());
            }
            Ok(table.exit_code())
        }
        Command::VerifyInterpolant { config } => {
            let check = verify_interpolant_config(&load(cli, config)?)?;
            println!("{}", serde_json::to_string_pretty(&check)?);
            Ok(if check.passed { ExitCode::Ok } else { ExitCode::CheckFailed })
        }
    }
}

fn main() -> ProcessExit {
    let cli = Cli::parse();
    let code = execute(&cli).unwrap_or_else(|e| {
        eprintln!("error: {e}");
        ExitCode::from_error(&e)
    });
    ProcessExit::from(code.code() as u8)
}
