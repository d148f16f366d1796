//! Command-line front end for the driven Ising chain library.

pub mod config;
pub mod scenarios;
pub mod table;

use std::io::Write;
use std::time::Instant;

use driven_ising::observables::SweepQuantity;

use config::{load_config, Command, ConfigError, Format, RunConfig, Scenario};
use scenarios::{run, RunError};

pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "DRIVEN_ISING_THREADS";

/// Failure of a command together with its process exit status.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Environment(String),
    #[error("cannot write {path}: {source}")]
    Output {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Run(#[from] RunError),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Run(RunError::Numerical(_) | RunError::Table(_)) => EXIT_NUMERICAL,
            _ => EXIT_CONFIG,
        }
    }
}

/// Applies the thread cap from the environment, if set.
pub fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::Environment(format!("{THREADS_ENV} must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Environment(e.to_string()))
}

fn describe(config: &RunConfig, table: &mut table::ResultTable, seconds: f64) {
    let p = &config.params;
    table.add_metadata("tool", concat!("driven-ising ", env!("CARGO_PKG_VERSION")));
    table.add_metadata("scenario", config.scenario);
    table.add_metadata("units", "energies and rates in units of Omega, times in drive periods");
    table.add_metadata("j", p.j());
    table.add_metadata("g0", p.g0());
    table.add_metadata("g1", p.g1());
    table.add_metadata("m", p.m());
    table.add_metadata("nk", config.n_k_nodes);
    match config.scenario {
        Scenario::Dynamics => {
            table.add_metadata("t_max", config.t_max_periods);
            table.add_metadata("samples", config.n_time_samples);
            if let Some(n) = config.n_spins {
                table.add_metadata("n_spins", n);
            }
        }
        Scenario::Averages | Scenario::Sweep => {
            let s = &config.sweep;
            table.add_metadata("var", s.variable.name());
            table.add_metadata("min", s.min);
            table.add_metadata("max", s.max);
            table.add_metadata("points", s.points);
            if config.scenario == Scenario::Sweep {
                let name = match s.quantity {
                    SweepQuantity::AveragedEnergyMinus => "energy",
                    SweepQuantity::AveragedMagnetizationMinus => "magnetization",
                };
                table.add_metadata("quantity", name);
            }
        }
        Scenario::PhaseDiagram => table.add_metadata("points", config.phase_points),
        _ => {}
    }
    table.add_metadata("wall_clock_seconds", format!("{seconds:.3}"));
}

/// Runs one command: resolves its configuration, computes the scenario and
/// writes the result to the output file or stdout.
pub fn execute(command: &Command) -> Result<(), CliError> {
    let config = load_config(command)?;
    let start = Instant::now();
    let outcome = run(&config)?;
    for w in &outcome.warnings {
        eprintln!("warning: {w}");
    }
    let mut table = outcome.table;
    let mut summary = outcome.summary;
    describe(&config, &mut table, start.elapsed().as_secs_f64());
    let text = match config.format {
        Format::Csv => {
            let mut lines = table.clone();
            for (k, v) in &summary {
                if k != "extrema" {
                    lines.add_metadata(format!("summary.{k}"), v);
                }
            }
            lines.to_csv()
        }
        Format::Json => {
            if !outcome.warnings.is_empty() {
                summary.insert("warnings".into(), serde_json::json!(outcome.warnings));
            }
            table.to_json(&summary)
        }
    };
    match &config.output {
        Some(path) => table::write_atomic(path, &text).map_err(|source| CliError::Output {
            path: path.display().to_string(),
            source,
        }),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Output {
                path: "stdout".into(),
                source,
            }),
    }
}
