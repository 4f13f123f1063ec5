//! `ptcubic` — command-line front end for the PT-symmetric cubic
//! oscillator toolkit: spectra of H = -d²/dx² ± m²x² + ifx³ by two
//! independent engines, the mass-sign duality band shift, small-f series
//! coefficients, and cross-backend agreement checks.
//!
//! Exit codes: 0 success/pass; 1 usage, validation, or filesystem error;
//! 2 numerical non-convergence or backend disagreement; 3 failed duality
//! verdict (the envelope carries the machine-readable report either way).

use std::process::ExitCode;

use chrono::{SecondsFormat, Utc};
use clap::{Args, Parser, Subcommand};

use ptcubic::config::{self, CommandKind, CommonArgs, RunConfig};
use ptcubic::envelope::{self, exit_for, ResultEnvelope, SCHEMA_VERSION};
use ptcubic::error::CliError;
use ptcubic::{cache, run};

const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser, Debug)]
#[command(
    name = "ptcubic",
    version,
    about = "Spectra and mass-sign duality of the PT-symmetric cubic oscillator \
             H = -d²/dx² ± m²x² + ifx³",
    after_help = "Exit codes: 0 success/pass; 1 usage or filesystem error; \
                  2 numerical non-convergence; 3 failed duality verdict."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Eigenvalues of H(m², f) with per-level convergence certification
    Spectrum(CommonArgs),
    /// Verify E_n(-m², f) = E_n(+m², f) + 4m⁶/(27f²) level by level
    Duality(CommonArgs),
    /// Small-f expansion E_n(f) ≈ E_n(0) + c1·f + c2·f² about the m² > 0 well
    Series(SeriesArgs),
    /// Duality verdicts across an ascending m² grid at fixed f
    Sweep(SweepArgs),
    /// Basis vs shooting agreement on the lowest levels
    Crosscheck(CommonArgs),
}

#[derive(Args, Debug)]
struct SeriesArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Level index n of the expansion. [default: 0]
    #[arg(long)]
    level: Option<usize>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Comma-separated ascending |m²| grid. [default: 1e-3,1e-2,1e-1]
    #[arg(long = "m2-grid", value_delimiter = ',', allow_hyphen_values = true)]
    m2_grid: Option<Vec<f64>>,
}

fn resolve_config(cli: &Cli) -> Result<RunConfig, CliError> {
    match &cli.command {
        Command::Spectrum(common) => config::resolve(CommandKind::Spectrum, common, None, None),
        Command::Duality(common) => config::resolve(CommandKind::Duality, common, None, None),
        Command::Series(args) => {
            config::resolve(CommandKind::Series, &args.common, args.level, None)
        }
        Command::Sweep(args) => {
            config::resolve(CommandKind::Sweep, &args.common, None, args.m2_grid.clone())
        }
        Command::Crosscheck(common) => {
            config::resolve(CommandKind::Crosscheck, common, None, None)
        }
    }
}

fn real_main(cli: Cli) -> Result<u8, CliError> {
    let cfg = resolve_config(&cli)?;

    let key = cache::cache_key(&cfg, TOOL_VERSION);
    if let Some(dir) = &cfg.cache_dir {
        if let Some(cached) = cache::lookup(dir, &key) {
            eprintln!("cache hit: {key}");
            envelope::write_output(&cfg, &cached)?;
            return Ok(exit_for(&cfg, &cached.payload));
        }
    }

    let output = run::execute(&cfg)?;
    let envelope = ResultEnvelope {
        schema_version: SCHEMA_VERSION,
        timestamp: Utc::now().to_rfc3339_opts(SecondsFormat::Micros, true),
        tool_version: TOOL_VERSION.to_string(),
        run_config: cfg.clone(),
        payload: output.payload,
    };
    envelope::write_output(&cfg, &envelope)?;
    if let Some(dir) = &cfg.cache_dir {
        // a failed store must not fail the run — the result is already out
        if let Err(e) = cache::store(dir, &key, &envelope) {
            eprintln!("warning: could not store cache entry: {e}");
        }
    }
    Ok(output.exit)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help/--version are successes; anything else is a usage error
            let code = if e.use_stderr() { 1 } else { 0 };
            // clap's print() routes to stdout or stderr appropriately
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match real_main(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
