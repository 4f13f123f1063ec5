//! Result envelope and serialization.
//!
//! Every run produces a [`ResultEnvelope`] wrapping one typed payload. JSON
//! output carries the whole envelope and round-trips losslessly (serde_json
//! prints the shortest decimal that recovers each f64 bit pattern exactly).
//! CSV output flattens the payload into a table, rendering reals as
//! `{:.16e}` — 17 significant digits, the same values the JSON carries.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use ptcubic_core::{DualityReport, OscillatorSpec, SeriesCoefficients, SpectrumResult};
use serde::{Deserialize, Serialize};

use crate::config::{FormatKind, RunConfig};
use crate::error::CliError;

/// Schema version of the JSON envelope; additive evolution only.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultEnvelope {
    pub schema_version: u32,
    /// RFC 3339 UTC wall-clock time of the run that produced the payload
    /// (cached results keep the original run's stamp).
    pub timestamp: String,
    pub tool_version: String,
    pub run_config: RunConfig,
    pub payload: Payload,
}

/// One result per subcommand, tagged for lossless round-trips.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Payload {
    Spectrum(SpectrumResult),
    Duality(DualityReport),
    Series(SeriesCoefficients),
    Sweep(SweepSummary),
    Crosscheck(CrosscheckReport),
}

/// Aggregate of duality verdicts over an ascending |m²| grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub coupling: f64,
    pub n_levels: usize,
    pub tol: f64,
    pub points: Vec<DualityReport>,
    pub all_pass: bool,
}

/// Level-by-level agreement between the two engines on one spec.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrosscheckReport {
    pub spec: OscillatorSpec,
    pub tol: f64,
    pub per_level: Vec<CrosscheckLevel>,
    pub max_abs_diff: f64,
    pub pass: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrosscheckLevel {
    pub n: usize,
    #[serde(with = "ptcubic_core::serde_complex")]
    pub e_basis: Complex64,
    #[serde(with = "ptcubic_core::serde_complex")]
    pub e_shooting: Complex64,
    pub abs_diff: f64,
}

/// 17 significant digits: enough to recover the f64 bit pattern exactly.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Flatten a payload to CSV. Columns per payload kind:
///
/// * spectrum:   `n,re_E,im_E,drift,converged`
/// * duality:    `n,re_E_plus,re_E_minus,measured_diff,predicted_delta,abs_error`
/// * sweep:      duality columns with a leading `m2`
/// * series:     `level,re_c1,im_c1,re_c2,im_c2,basis_size_used`
/// * crosscheck: `n,re_E_basis,im_E_basis,re_E_shooting,im_E_shooting,abs_diff`
pub fn to_csv(payload: &Payload) -> String {
    let mut out = String::new();
    match payload {
        Payload::Spectrum(result) => {
            out.push_str("n,re_E,im_E,drift,converged\n");
            for (n, (e, drift)) in result
                .eigenvalues
                .iter()
                .zip(&result.per_level_drift)
                .enumerate()
            {
                out.push_str(&format!(
                    "{n},{},{},{},{}\n",
                    num(e.re),
                    num(e.im),
                    num(*drift),
                    n < result.converged_count
                ));
            }
        }
        Payload::Duality(report) => {
            out.push_str("n,re_E_plus,re_E_minus,measured_diff,predicted_delta,abs_error\n");
            push_duality_rows(&mut out, report, None);
        }
        Payload::Sweep(sweep) => {
            out.push_str("m2,n,re_E_plus,re_E_minus,measured_diff,predicted_delta,abs_error\n");
            for report in &sweep.points {
                push_duality_rows(&mut out, report, Some(report.spec_plus.m_squared));
            }
        }
        Payload::Series(series) => {
            out.push_str("level,re_c1,im_c1,re_c2,im_c2,basis_size_used\n");
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                series.level,
                num(series.c1.re),
                num(series.c1.im),
                num(series.c2.re),
                num(series.c2.im),
                series.basis_size_used
            ));
        }
        Payload::Crosscheck(report) => {
            out.push_str("n,re_E_basis,im_E_basis,re_E_shooting,im_E_shooting,abs_diff\n");
            for row in &report.per_level {
                out.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    row.n,
                    num(row.e_basis.re),
                    num(row.e_basis.im),
                    num(row.e_shooting.re),
                    num(row.e_shooting.im),
                    num(row.abs_diff)
                ));
            }
        }
    }
    out
}

fn push_duality_rows(out: &mut String, report: &DualityReport, m2: Option<f64>) {
    for level in &report.per_level {
        if let Some(m2) = m2 {
            out.push_str(&num(m2));
            out.push(',');
        }
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            level.n,
            num(level.e_plus.re),
            num(level.e_minus.re),
            num(level.measured_diff),
            num(report.predicted_delta),
            num(level.abs_error)
        ));
    }
}

/// Serialize the envelope in the configured format.
pub fn render(cfg: &RunConfig, envelope: &ResultEnvelope) -> Result<String, CliError> {
    match cfg.format {
        FormatKind::Json => serde_json::to_string_pretty(envelope)
            .map(|mut s| {
                s.push('\n');
                s
            })
            .map_err(|e| CliError::Filesystem(format!("serialization failed: {e}"))),
        FormatKind::Csv => Ok(to_csv(&envelope.payload)),
    }
}

/// Write `bytes` to `path` atomically: a temporary sibling is written in
/// full, then renamed over the destination, so readers never observe a
/// partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let io_err = |e: std::io::Error| {
        CliError::Filesystem(format!("cannot write {}: {e}", path.display()))
    };
    let mut tmp_name = path
        .file_name()
        .map(|n| n.to_os_string())
        .unwrap_or_else(|| "out".into());
    tmp_name.push(".tmp");
    let tmp = path.with_file_name(tmp_name);
    {
        let mut file = fs::File::create(&tmp).map_err(io_err)?;
        file.write_all(bytes).map_err(io_err)?;
        file.sync_all().map_err(io_err)?;
    }
    fs::rename(&tmp, path).map_err(io_err)
}

/// Write the rendered envelope to `--out` (atomically) or stdout, then any
/// requested plot tables.
pub fn write_output(cfg: &RunConfig, envelope: &ResultEnvelope) -> Result<(), CliError> {
    let rendered = render(cfg, envelope)?;
    match &cfg.out {
        Some(path) => write_atomic(path, rendered.as_bytes())?,
        None => print!("{rendered}"),
    }
    if cfg.emit_plot_data {
        for (path, table) in plot_tables(cfg, &envelope.payload) {
            write_atomic(&path, table.as_bytes())?;
        }
    }
    Ok(())
}

/// Plot tables derived from the payload, named after `--out`:
/// `<stem>_plot_f.csv` holds (f, E_n) rows, `<stem>_plot_m2.csv` holds
/// (m², E_n) rows for both mass signs.
pub fn plot_tables(cfg: &RunConfig, payload: &Payload) -> Vec<(PathBuf, String)> {
    let out = match &cfg.out {
        Some(path) => path,
        None => return Vec::new(), // validated earlier; defensive
    };
    let sibling = |suffix: &str| -> PathBuf {
        let stem = out
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "out".into());
        out.with_file_name(format!("{stem}{suffix}"))
    };
    match payload {
        Payload::Spectrum(result) => {
            let mut table = String::from("f,n,re_E,im_E\n");
            for (n, e) in result.converged().iter().enumerate() {
                table.push_str(&format!(
                    "{},{n},{},{}\n",
                    num(result.spec_echo.coupling),
                    num(e.re),
                    num(e.im)
                ));
            }
            vec![(sibling("_plot_f.csv"), table)]
        }
        Payload::Duality(report) => {
            let mut table = String::from("m2,n,re_E_plus,re_E_minus\n");
            push_plot_rows(&mut table, report);
            vec![(sibling("_plot_m2.csv"), table)]
        }
        Payload::Sweep(sweep) => {
            let mut table = String::from("m2,n,re_E_plus,re_E_minus\n");
            for report in &sweep.points {
                push_plot_rows(&mut table, report);
            }
            vec![(sibling("_plot_m2.csv"), table)]
        }
        Payload::Series(_) | Payload::Crosscheck(_) => Vec::new(),
    }
}

fn push_plot_rows(table: &mut String, report: &DualityReport) {
    for level in &report.per_level {
        table.push_str(&format!(
            "{},{},{},{}\n",
            num(report.spec_plus.m_squared),
            level.n,
            num(level.e_plus.re),
            num(level.e_minus.re)
        ));
    }
}

/// The semantic exit code a payload encodes, recomputed identically for
/// fresh and cached results: 0 pass, 2 under-convergence or cross-backend
/// disagreement, 3 failed duality verdict.
pub fn exit_for(run_config: &RunConfig, payload: &Payload) -> u8 {
    match payload {
        Payload::Spectrum(result) => {
            if result.converged_count < run_config.levels.min(result.eigenvalues.len()) {
                2
            } else {
                0
            }
        }
        Payload::Duality(report) => {
            if report.verdict {
                0
            } else {
                3
            }
        }
        Payload::Sweep(sweep) => {
            if sweep.all_pass {
                0
            } else {
                3
            }
        }
        Payload::Series(_) => 0,
        Payload::Crosscheck(report) => {
            if report.pass {
                0
            } else {
                2
            }
        }
    }
}
