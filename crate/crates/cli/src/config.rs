//! Run configuration: clap flag definitions, optional JSON config file,
//! and the merge of the two onto documented defaults.
//!
//! Precedence is strict: command-line flags override config-file values,
//! which override built-in defaults. Unknown keys in the config file are a
//! hard error — a typo must never silently fall back to a default.

use std::fs;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use ptcubic_core::{BasisConfig, OscillatorSpec};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Which subcommand a [`RunConfig`] describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CommandKind {
    Spectrum,
    Duality,
    Series,
    Sweep,
    Crosscheck,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Spectrum => "spectrum",
            CommandKind::Duality => "duality",
            CommandKind::Series => "series",
            CommandKind::Sweep => "sweep",
            CommandKind::Crosscheck => "crosscheck",
        }
    }
}

/// Eigenvalue engine selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum BackendKind {
    /// Harmonic-basis diagonalization with two-size drift certification.
    Basis,
    /// Complex shooting along anti-Stokes rays with Wronskian matching.
    Shooting,
    /// Basis spectrum, every level re-derived by shooting and required to
    /// agree before any verdict is rendered.
    Both,
}

/// Output serialization format.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum FormatKind {
    /// Full result envelope as JSON.
    Json,
    /// Flat table of the payload (envelope metadata omitted).
    Csv,
}

/// Flags shared by every subcommand. Each has a documented default; an
/// omitted flag falls back to the config file (if given), then the default.
#[derive(Args, Clone, Debug, Default)]
pub struct CommonArgs {
    /// Squared mass m². Signed for `spectrum`/`crosscheck`; `duality` takes
    /// |m²| and flips the sign itself; ignored by `sweep` (see --m2-grid).
    /// [default: 1]
    #[arg(long = "m2", allow_hyphen_values = true)]
    pub m2: Option<f64>,

    /// Cubic coupling f; must be finite and > 0. [default: 1]
    #[arg(long, allow_hyphen_values = true)]
    pub f: Option<f64>,

    /// Number of levels to compute/compare. [default: 8; crosscheck 5; sweep 4]
    #[arg(long)]
    pub levels: Option<usize>,

    /// Eigenvalue engine. [default: basis]
    #[arg(long, value_enum)]
    pub backend: Option<BackendKind>,

    /// Harmonic-basis truncation N (also bounds the series sum). [default: 256]
    #[arg(long = "n-basis")]
    pub n_basis: Option<usize>,

    /// Basis frequency Ω override. [default: automatic, max(√|m²|, f^(2/5))]
    #[arg(long, allow_hyphen_values = true)]
    pub omega: Option<f64>,

    /// Headline tolerance: spectrum = certification tolerance (drift for the
    /// basis engine, root step for shooting); duality/sweep/crosscheck =
    /// comparison tolerance. Ignored by series.
    /// [default: 1e-8 for spectrum, 1e-6 otherwise]
    #[arg(long, allow_hyphen_values = true)]
    pub tol: Option<f64>,

    /// Output format. [default: json]
    #[arg(long, value_enum)]
    pub format: Option<FormatKind>,

    /// Output path. [default: stdout]
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Cache directory: results are stored and reused on exact config match.
    /// [default: no caching]
    #[arg(long = "cache-dir")]
    pub cache_dir: Option<PathBuf>,

    /// Also write flat (m², E_n) / (f, E_n) plot tables next to --out
    /// (spectrum, duality, and sweep only; requires --out). [default: off]
    #[arg(long = "emit-plot-data")]
    pub emit_plot_data: bool,

    /// JSON config file supplying any of the long flags as keys (hyphens
    /// spelled as underscores, e.g. "n_basis"). Flags given on the command
    /// line win; unknown keys are a hard error. [default: none]
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Config-file schema: exactly the long flags, hyphens as underscores.
/// `deny_unknown_fields` turns typos into hard errors instead of silently
/// running with defaults.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    m2: Option<f64>,
    f: Option<f64>,
    levels: Option<usize>,
    backend: Option<BackendKind>,
    n_basis: Option<usize>,
    omega: Option<f64>,
    tol: Option<f64>,
    format: Option<FormatKind>,
    out: Option<PathBuf>,
    cache_dir: Option<PathBuf>,
    emit_plot_data: Option<bool>,
    level: Option<usize>,
    m2_grid: Option<Vec<f64>>,
}

/// Fully resolved, validated configuration; echoed verbatim inside every
/// result envelope. Defaults (when neither flag nor file supplies a value):
///
/// | field          | default                                        |
/// |----------------|------------------------------------------------|
/// | m_squared      | 1.0                                            |
/// | coupling       | 1.0                                            |
/// | levels         | 8 (crosscheck: 5, sweep: 4)                    |
/// | backend        | basis                                          |
/// | n_basis        | 256                                            |
/// | omega          | automatic (null)                               |
/// | tol            | 1e-8 (spectrum), 1e-6 (duality/sweep/crosscheck), unused by series |
/// | series_level   | 0                                              |
/// | m2_grid        | [1e-3, 1e-2, 1e-1] (sweep only, else empty)    |
/// | format         | json                                           |
/// | out            | stdout (null)                                  |
/// | cache_dir      | none (null)                                    |
/// | emit_plot_data | false                                          |
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: CommandKind,
    pub m_squared: f64,
    pub coupling: f64,
    pub levels: usize,
    pub backend: BackendKind,
    pub n_basis: usize,
    /// `None` means the automatic per-sign basis frequency.
    pub omega: Option<f64>,
    pub tol: f64,
    /// Level index for `series`; 0 for every other command.
    pub series_level: usize,
    /// Ascending |m²| grid for `sweep`; empty for every other command.
    pub m2_grid: Vec<f64>,
    pub format: FormatKind,
    /// `None` means stdout.
    pub out: Option<PathBuf>,
    pub cache_dir: Option<PathBuf>,
    pub emit_plot_data: bool,
}

fn load_file(path: &PathBuf) -> Result<FileConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|e| {
        CliError::Filesystem(format!("cannot read config file {}: {e}", path.display()))
    })?;
    serde_json::from_str(&text).map_err(|e| {
        CliError::Usage(format!("invalid config file {}: {e}", path.display()))
    })
}

/// Merge flags over file values over defaults, then validate. `level` and
/// `m2_grid` arrive separately because only `series`/`sweep` define the
/// flags.
pub fn resolve(
    command: CommandKind,
    args: &CommonArgs,
    level_flag: Option<usize>,
    m2_grid_flag: Option<Vec<f64>>,
) -> Result<RunConfig, CliError> {
    let file = match &args.config {
        Some(path) => load_file(path)?,
        None => FileConfig::default(),
    };

    let default_levels = match command {
        CommandKind::Crosscheck => 5,
        CommandKind::Sweep => 4,
        _ => 8,
    };
    let default_tol = match command {
        CommandKind::Spectrum | CommandKind::Series => BasisConfig::DEFAULT_TOL,
        _ => 1e-6,
    };

    let cfg = RunConfig {
        command,
        m_squared: args.m2.or(file.m2).unwrap_or(1.0),
        coupling: args.f.or(file.f).unwrap_or(1.0),
        levels: args.levels.or(file.levels).unwrap_or(default_levels),
        backend: args.backend.or(file.backend).unwrap_or(BackendKind::Basis),
        n_basis: args
            .n_basis
            .or(file.n_basis)
            .unwrap_or(BasisConfig::DEFAULT_N_BASIS),
        omega: args.omega.or(file.omega),
        tol: args.tol.or(file.tol).unwrap_or(default_tol),
        series_level: level_flag.or(file.level).unwrap_or(0),
        m2_grid: match command {
            CommandKind::Sweep => m2_grid_flag
                .or(file.m2_grid)
                .unwrap_or_else(|| vec![1e-3, 1e-2, 1e-1]),
            _ => Vec::new(),
        },
        format: args.format.or(file.format).unwrap_or(FormatKind::Json),
        out: args.out.clone().or(file.out),
        cache_dir: args.cache_dir.clone().or(file.cache_dir),
        emit_plot_data: args.emit_plot_data || file.emit_plot_data.unwrap_or(false),
    };
    validate(&cfg)?;
    Ok(cfg)
}

fn validate(cfg: &RunConfig) -> Result<(), CliError> {
    // the model constructor owns the m²/f preconditions; surface its message
    OscillatorSpec::new(cfg.m_squared, cfg.coupling)
        .map_err(|e| CliError::Usage(e.to_string()))?;

    match cfg.command {
        CommandKind::Duality if cfg.m_squared < 0.0 => {
            return Err(CliError::Usage(
                "duality takes positive --m2 (the harness flips the sign itself)".into(),
            ));
        }
        CommandKind::Sweep => {
            if cfg.m2_grid.is_empty() {
                return Err(CliError::Usage("sweep needs a non-empty --m2-grid".into()));
            }
            if let Some(&bad) = cfg.m2_grid.iter().find(|&&m2| m2 < 0.0 || !m2.is_finite()) {
                return Err(CliError::Usage(format!(
                    "sweep takes non-negative finite m² grid entries (the harness flips the \
                     sign itself), got {bad}"
                )));
            }
        }
        CommandKind::Series if cfg.m_squared <= 0.0 => {
            return Err(CliError::Usage(format!(
                "series expands about the m² > 0 harmonic well; got --m2 {}",
                cfg.m_squared
            )));
        }
        _ => {}
    }

    if cfg.levels == 0 {
        return Err(CliError::Usage("--levels must be at least 1".into()));
    }
    if !(cfg.tol > 0.0) || !cfg.tol.is_finite() {
        return Err(CliError::Usage(format!(
            "--tol must be finite and > 0, got {}",
            cfg.tol
        )));
    }
    if let Some(omega) = cfg.omega {
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(CliError::Usage(format!(
                "--omega must be finite and > 0, got {omega}"
            )));
        }
    }
    if cfg.emit_plot_data {
        if cfg.out.is_none() {
            return Err(CliError::Usage(
                "--emit-plot-data derives its file names from --out; pass --out as well".into(),
            ));
        }
        if matches!(cfg.command, CommandKind::Series | CommandKind::Crosscheck) {
            return Err(CliError::Usage(format!(
                "--emit-plot-data applies to spectrum, duality, and sweep, not {}",
                cfg.command.name()
            )));
        }
    }
    Ok(())
}
