use std::path::{Path, PathBuf};
use std::process::ExitCode;

use beamgame_core::channel::{Point, Scenario};
use beamgame_core::experiment::{
    emit_bound_csv, emit_csv, emit_summary_csv, run_distance_sweep, run_uncertainty_sweep, summarize,
    summary_path, validate_bound, SolverKind, SweepConfig, SweepVariable,
};
use beamgame_core::Error;
use clap::{Args, Parser, Subcommand};

/// Stackelberg power-pricing equilibria for wireless-powered sensor networks.
#[derive(Debug, Parser)]
#[command(name = "beamgame", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// One sensor at the origin, multi-antenna beacon, closed-form equilibrium vs. distance.
    SingleNode(Common),
    /// One sensor, one antenna: closed form and the exponential-tail model vs. distance.
    M1Exact(Common),
    /// Many sensors: bound, relaxation and search equilibria vs. distance.
    SweepDistance(Common),
    /// One sensor: per-antenna power vs. the first antenna's error variance.
    SweepUncertainty(Common),
    /// Monte-Carlo non-outage against the analytic bound at equilibrium.
    ValidateBound(Common),
}

#[derive(Debug, Args)]
struct Common {
    /// TOML config; absent keys take the subcommand's defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output CSV. Sweeps also write `<stem>_summary.csv` next to it.
    #[arg(long)]
    out: PathBuf,
    /// Overrides `sweep.seed`.
    #[arg(long)]
    seed: Option<u64>,
}

fn origin_sensor(antennas: usize) -> SweepConfig {
    SweepConfig {
        scenario: Scenario {
            sensors: 1,
            antennas,
            ..Scenario::default()
        },
        sensor_positions: Some(vec![Point::new(0.0, 0.0)]),
        replications: 1,
        solvers: vec![SolverKind::ClosedForm],
        ..SweepConfig::default()
    }
}

fn defaults(command: &Command) -> SweepConfig {
    match command {
        Command::SingleNode(_) => origin_sensor(5),
        Command::M1Exact(_) => SweepConfig {
            solvers: vec![SolverKind::ClosedForm, SolverKind::M1Exact],
            ..origin_sensor(1)
        },
        Command::SweepDistance(_) => SweepConfig::default(),
        Command::SweepUncertainty(_) => SweepConfig {
            sweep_variable: SweepVariable::Uncertainty,
            sweep_values: (1..=20).map(f64::from).collect(),
            relative_values: true,
            ..origin_sensor(5)
        },
        Command::ValidateBound(_) => SweepConfig {
            scenario: Scenario {
                sensors: 1,
                ..Scenario::default()
            },
            sweep_values: vec![10.0],
            mc_samples: 100_000,
            ..SweepConfig::default()
        },
    }
}

fn load(command: &Command, common: &Common) -> Result<SweepConfig, Error> {
    let base = defaults(command);
    let mut config = match &common.config {
        Some(path) => SweepConfig::from_path_over(path, base)?,
        None => base,
    };
    if let Some(seed) = common.seed {
        config.base_seed = seed;
    }
    config.validate()?;
    Ok(config)
}

fn write_sweep(records: &[beamgame_core::SweepRecord], out: &Path) -> Result<(), Error> {
    emit_csv(records, out)?;
    let summary = summary_path(out);
    emit_summary_csv(&summarize(records), &summary)?;
    eprintln!(
        "wrote {} rows to {} and {}",
        records.len(),
        out.display(),
        summary.display()
    );
    Ok(())
}

fn run(cli: Cli) -> Result<(), Error> {
    let common = match &cli.command {
        Command::SingleNode(c)
        | Command::M1Exact(c)
        | Command::SweepDistance(c)
        | Command::SweepUncertainty(c)
        | Command::ValidateBound(c) => c,
    };
    let config = load(&cli.command, common)?;
    match &cli.command {
        Command::SingleNode(_) | Command::M1Exact(_) => {
            if config.scenario.sensors != 1 {
                return Err(Error::Validation(
                    "geometry.sensors: this subcommand needs exactly one sensor".into(),
                ));
            }
            write_sweep(&run_distance_sweep(&config)?, &common.out)
        }
        Command::SweepDistance(_) => write_sweep(&run_distance_sweep(&config)?, &common.out),
        Command::SweepUncertainty(_) => write_sweep(&run_uncertainty_sweep(&config)?, &common.out),
        Command::ValidateBound(_) => {
            let report = validate_bound(&config)?;
            emit_bound_csv(&report.rows, &common.out)?;
            eprintln!(
                "checked {} sensor draws, {} violations; wrote {}",
                report.rows.len(),
                report.violations(),
                common.out.display()
            );
            Ok(())
        }
    }
}

fn main() -> ExitCode {
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
            ExitCode::from(if e.is_validation() { 1 } else { 2 })
        }
    }
}
