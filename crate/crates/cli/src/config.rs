//! Run configuration: command-line flags, `key = value` config files and
//! the validated [`RunConfig`] built from both.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use driven_ising::observables::{SweepQuantity, SweepVariable};
use driven_ising::ModelParams;
use thiserror::Error;

pub const DEFAULT_NK: usize = 256;
pub const DEFAULT_T_MAX: f64 = 200.0;
pub const DEFAULT_SAMPLES: usize = 2001;
pub const DEFAULT_SWEEP_POINTS: usize = 601;
pub const DEFAULT_PHASE_POINTS: usize = 201;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}:{line}: {message}")]
    File {
        path: String,
        line: usize,
        message: String,
    },
    #[error("cannot read config file {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("missing required setting `{0}` (pass --{1} or set it in the config file)")]
    Missing(&'static str, &'static str),
    #[error("invalid `{field}`: {message}")]
    Invalid { field: &'static str, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VarArg {
    G0,
    G1,
}

impl From<VarArg> for SweepVariable {
    fn from(v: VarArg) -> Self {
        match v {
            VarArg::G0 => SweepVariable::G0,
            VarArg::G1 => SweepVariable::G1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum QuantityArg {
    Energy,
    Magnetization,
}

impl From<QuantityArg> for SweepQuantity {
    fn from(q: QuantityArg) -> Self {
        match q {
            QuantityArg::Energy => SweepQuantity::AveragedEnergyMinus,
            QuantityArg::Magnetization => SweepQuantity::AveragedMagnetizationMinus,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "driven-ising", version, about = "Driven transverse-field Ising chain simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Static, folded and rotating-wave quasienergy bands over k.
    Spectrum(CommonArgs),
    /// Phase labels on a (g1, g0) grid around the resonance.
    PhaseDiagram {
        #[command(flatten)]
        common: CommonArgs,
        /// Grid points along each axis.
        #[arg(long)]
        points: Option<usize>,
    },
    /// Transverse magnetization after preparing the x-polarised state.
    Dynamics(CommonArgs),
    /// One-period propagator quasienergies against the rotating-wave bands.
    Floquet(CommonArgs),
    /// Cycle-averaged energy and magnetization with their curvature.
    Averages {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// One cycle-averaged quantity with its curvature.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        sweep: SweepArgs,
        #[arg(long, value_enum)]
        quantity: Option<QuantityArg>,
    },
}

/// Flags shared by every scenario. Energies are ratios over Ω.
#[derive(Debug, Default, Args)]
pub struct CommonArgs {
    #[arg(long)]
    pub j: Option<f64>,
    #[arg(long)]
    pub g0: Option<f64>,
    #[arg(long)]
    pub g1: Option<f64>,
    /// Photon number of the resonance.
    #[arg(long)]
    pub m: Option<u32>,
    /// Momentum quadrature nodes (or k points for band output).
    #[arg(long)]
    pub nk: Option<usize>,
    /// Simulated time in drive periods.
    #[arg(long = "t-max")]
    pub t_max: Option<f64>,
    #[arg(long)]
    pub samples: Option<usize>,
    /// Also evolve a finite chain of this many spins.
    #[arg(long = "n-spins")]
    pub n_spins: Option<usize>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Fail instead of warning when parameters leave the rotating-wave regime.
    #[arg(long = "strict-rwa")]
    pub strict_rwa: bool,
}

#[derive(Debug, Default, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub var: Option<VarArg>,
    #[arg(long)]
    pub min: Option<f64>,
    #[arg(long)]
    pub max: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    Spectrum,
    PhaseDiagram,
    Dynamics,
    Floquet,
    Averages,
    Sweep,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::Spectrum => "spectrum",
            Scenario::PhaseDiagram => "phase-diagram",
            Scenario::Dynamics => "dynamics",
            Scenario::Floquet => "floquet",
            Scenario::Averages => "averages",
            Scenario::Sweep => "sweep",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Every setting that can come from a flag or a config file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    pub j: Option<f64>,
    pub g0: Option<f64>,
    pub g1: Option<f64>,
    pub m: Option<u32>,
    pub nk: Option<usize>,
    pub t_max: Option<f64>,
    pub samples: Option<usize>,
    pub n_spins: Option<usize>,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
    pub strict_rwa: Option<bool>,
    pub var: Option<VarArg>,
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub points: Option<usize>,
    pub quantity: Option<QuantityArg>,
}

impl Settings {
    /// Values set in `other` win.
    pub fn overridden_by(self, other: Settings) -> Settings {
        Settings {
            j: other.j.or(self.j),
            g0: other.g0.or(self.g0),
            g1: other.g1.or(self.g1),
            m: other.m.or(self.m),
            nk: other.nk.or(self.nk),
            t_max: other.t_max.or(self.t_max),
            samples: other.samples.or(self.samples),
            n_spins: other.n_spins.or(self.n_spins),
            output: other.output.or(self.output),
            format: other.format.or(self.format),
            strict_rwa: other.strict_rwa.or(self.strict_rwa),
            var: other.var.or(self.var),
            min: other.min.or(self.min),
            max: other.max.or(self.max),
            points: other.points.or(self.points),
            quantity: other.quantity.or(self.quantity),
        }
    }

    fn from_flags(common: &CommonArgs) -> Settings {
        Settings {
            j: common.j,
            g0: common.g0,
            g1: common.g1,
            m: common.m,
            nk: common.nk,
            t_max: common.t_max,
            samples: common.samples,
            n_spins: common.n_spins,
            output: common.output.clone(),
            format: common.format,
            strict_rwa: common.strict_rwa.then_some(true),
            ..Settings::default()
        }
    }
}

/// Parses a flat `key = value` file; `#` starts a comment.
pub fn parse_config(text: &str, path: &str) -> Result<Settings, ConfigError> {
    let mut s = Settings::default();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let err = |message: String| ConfigError::File {
            path: path.to_string(),
            line: line_no,
            message,
        };
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err(format!("expected `key = value`, found `{line}`")))?;
        let key = key.trim().replace('-', "_");
        let value = value.trim();
        fn num<T: FromStr>(key: &str, value: &str) -> Result<T, String>
        where
            T::Err: fmt::Display,
        {
            value
                .parse::<T>()
                .map_err(|e| format!("`{key}`: cannot parse `{value}`: {e}"))
        }
        fn choice<T: ValueEnum>(key: &str, value: &str) -> Result<T, String> {
            T::from_str(value, true).map_err(|_| format!("`{key}`: unknown value `{value}`"))
        }
        match key.as_str() {
            "j" => s.j = Some(num(&key, value).map_err(err)?),
            "g0" => s.g0 = Some(num(&key, value).map_err(err)?),
            "g1" => s.g1 = Some(num(&key, value).map_err(err)?),
            "m" => s.m = Some(num(&key, value).map_err(err)?),
            "nk" => s.nk = Some(num(&key, value).map_err(err)?),
            "t_max" => s.t_max = Some(num(&key, value).map_err(err)?),
            "samples" => s.samples = Some(num(&key, value).map_err(err)?),
            "n_spins" => s.n_spins = Some(num(&key, value).map_err(err)?),
            "output" => s.output = Some(PathBuf::from(value)),
            "format" => s.format = Some(choice(&key, value).map_err(err)?),
            "strict_rwa" => s.strict_rwa = Some(num(&key, value).map_err(err)?),
            "var" => s.var = Some(choice(&key, value).map_err(err)?),
            "min" => s.min = Some(num(&key, value).map_err(err)?),
            "max" => s.max = Some(num(&key, value).map_err(err)?),
            "points" => s.points = Some(num(&key, value).map_err(err)?),
            "quantity" => s.quantity = Some(choice(&key, value).map_err(err)?),
            _ => return Err(err(format!("unknown setting `{key}`"))),
        }
    }
    Ok(s)
}

pub fn read_config(path: &Path) -> Result<Settings, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
        path: path.display().to_string(),
        source,
    })?;
    parse_config(&text, &path.display().to_string())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub min: f64,
    pub max: f64,
    pub points: usize,
    pub quantity: SweepQuantity,
}

/// Fully resolved and validated run description.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario: Scenario,
    /// In units where `Ω = 1`.
    pub params: ModelParams,
    pub n_k_nodes: usize,
    pub n_spins: Option<usize>,
    pub t_max_periods: f64,
    pub n_time_samples: usize,
    pub sweep: SweepSpec,
    pub phase_points: usize,
    pub output: Option<PathBuf>,
    pub format: Format,
    pub strict_rwa: bool,
}

fn positive<T: PartialOrd + Default + fmt::Display>(
    field: &'static str,
    v: T,
) -> Result<T, ConfigError> {
    if v > T::default() {
        Ok(v)
    } else {
        Err(ConfigError::Invalid {
            field,
            message: format!("must be positive, got {v}"),
        })
    }
}

impl RunConfig {
    pub fn from_settings(scenario: Scenario, s: Settings) -> Result<Self, ConfigError> {
        let j = s.j.ok_or(ConfigError::Missing("j", "j"))?;
        let g0 = s.g0.ok_or(ConfigError::Missing("g0", "g0"))?;
        let g1 = s.g1.ok_or(ConfigError::Missing("g1", "g1"))?;
        let m = s.m.ok_or(ConfigError::Missing("m", "m"))?;
        let params = ModelParams::in_drive_units(j, g0, g1, m).map_err(|e| ConfigError::Invalid {
            field: "params",
            message: e.to_string(),
        })?;

        let n_k_nodes = positive("nk", s.nk.unwrap_or(DEFAULT_NK))?;
        let t_max_periods = positive("t_max", s.t_max.unwrap_or(DEFAULT_T_MAX))?;
        if !t_max_periods.is_finite() {
            return Err(ConfigError::Invalid {
                field: "t_max",
                message: "must be finite".into(),
            });
        }
        let n_time_samples = s.samples.unwrap_or(DEFAULT_SAMPLES);
        if n_time_samples < 2 {
            return Err(ConfigError::Invalid {
                field: "samples",
                message: format!("need at least 2, got {n_time_samples}"),
            });
        }
        if let Some(n) = s.n_spins {
            if n < 2 || n % 2 == 1 {
                return Err(ConfigError::Invalid {
                    field: "n_spins",
                    message: format!("must be even and at least 2, got {n}"),
                });
            }
        }

        let variable: SweepVariable = s.var.unwrap_or(VarArg::G1).into();
        let (default_min, default_max) = match variable {
            SweepVariable::G1 => (0.0, 3.0),
            SweepVariable::G0 => (f64::from(m) / 4.0 - 0.015, f64::from(m) / 4.0 + 0.015),
        };
        let min = s.min.unwrap_or(default_min);
        let max = s.max.unwrap_or(default_max);
        let default_points = if scenario == Scenario::PhaseDiagram {
            DEFAULT_PHASE_POINTS
        } else {
            DEFAULT_SWEEP_POINTS
        };
        let points = s.points.unwrap_or(default_points);
        if matches!(scenario, Scenario::Averages | Scenario::Sweep) {
            if !(min.is_finite() && max.is_finite() && max > min) {
                return Err(ConfigError::Invalid {
                    field: "range",
                    message: format!("sweep range [{min}, {max}] is empty"),
                });
            }
            if points < 5 {
                return Err(ConfigError::Invalid {
                    field: "points",
                    message: format!("a sweep needs at least 5 points, got {points}"),
                });
            }
        }
        if scenario == Scenario::PhaseDiagram && points < 2 {
            return Err(ConfigError::Invalid {
                field: "points",
                message: format!("need at least 2 per axis, got {points}"),
            });
        }

        Ok(RunConfig {
            scenario,
            params,
            n_k_nodes,
            n_spins: s.n_spins,
            t_max_periods,
            n_time_samples,
            sweep: SweepSpec {
                variable,
                min,
                max,
                points,
                quantity: s.quantity.unwrap_or(QuantityArg::Energy).into(),
            },
            phase_points: points,
            output: s.output,
            format: s.format.unwrap_or(Format::Csv),
            strict_rwa: s.strict_rwa.unwrap_or(false),
        })
    }
}

/// Resolves parsed arguments into a run configuration, reading the config
/// file first so that flags override it.
pub fn load_config(command: &Command) -> Result<RunConfig, ConfigError> {
    let (scenario, common, mut flags) = match command {
        Command::Spectrum(c) => (Scenario::Spectrum, c, Settings::default()),
        Command::Dynamics(c) => (Scenario::Dynamics, c, Settings::default()),
        Command::Floquet(c) => (Scenario::Floquet, c, Settings::default()),
        Command::PhaseDiagram { common, points } => (
            Scenario::PhaseDiagram,
            common,
            Settings {
                points: *points,
                ..Settings::default()
            },
        ),
        Command::Averages { common, sweep } => {
            (Scenario::Averages, common, sweep_settings(sweep, None))
        }
        Command::Sweep {
            common,
            sweep,
            quantity,
        } => (Scenario::Sweep, common, sweep_settings(sweep, *quantity)),
    };
    flags = Settings::from_flags(common).overridden_by(flags);
    let base = match &common.config {
        Some(path) => read_config(path)?,
        None => Settings::default(),
    };
    RunConfig::from_settings(scenario, base.overridden_by(flags))
}

fn sweep_settings(sweep: &SweepArgs, quantity: Option<QuantityArg>) -> Settings {
    Settings {
        var: sweep.var,
        min: sweep.min,
        max: sweep.max,
        points: sweep.points,
        quantity,
        ..Settings::default()
    }
}
