//! Result cache keyed by the semantic content of a run.
//!
//! The key hashes the oscillator spec, backend selection, every numeric
//! tolerance in play (the resolved headline tolerance plus the fixed
//! library defaults it sits on), and the tool version — never presentation
//! fields, so changing `--out` or `--format` reuses the same entry. A
//! lookup returns a stored envelope only on an exact key match; corrupt
//! entries are reported and ignored, never trusted.

use std::fs;
use std::path::{Path, PathBuf};

use ptcubic_core::{DualityOptions, ShootingConfig};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::{BackendKind, CommandKind, RunConfig};
use crate::envelope::{ResultEnvelope, SCHEMA_VERSION};
use crate::error::CliError;

/// Everything that determines the numbers in a payload. Presentation
/// fields (`format`, `out`, `cache_dir`, `emit_plot_data`) are deliberately
/// absent.
#[derive(Serialize)]
struct KeyMaterial<'a> {
    schema_version: u32,
    tool_version: &'a str,
    command: CommandKind,
    m_squared: f64,
    coupling: f64,
    levels: usize,
    backend: BackendKind,
    n_basis: usize,
    omega: Option<f64>,
    tol: f64,
    series_level: usize,
    m2_grid: &'a [f64],
    // fixed library tolerances the run inherits; a future default change
    // must not serve stale numbers
    drift_tol: f64,
    reality_tol: f64,
    cross_backend_tol: f64,
    shooting_rtol: f64,
    shooting_atol: f64,
    shooting_root_tol: f64,
}

/// Stable content hash of the run's semantic configuration.
pub fn cache_key(cfg: &RunConfig, tool_version: &str) -> String {
    let duality_defaults = DualityOptions::default();
    let shooting_defaults = ShootingConfig::default();
    let material = KeyMaterial {
        schema_version: SCHEMA_VERSION,
        tool_version,
        command: cfg.command,
        m_squared: cfg.m_squared,
        coupling: cfg.coupling,
        levels: cfg.levels,
        backend: cfg.backend,
        n_basis: cfg.n_basis,
        omega: cfg.omega,
        tol: cfg.tol,
        series_level: cfg.series_level,
        m2_grid: &cfg.m2_grid,
        drift_tol: duality_defaults.drift_tol,
        reality_tol: duality_defaults.reality_tol,
        cross_backend_tol: duality_defaults.cross_backend_tol,
        shooting_rtol: shooting_defaults.rtol,
        shooting_atol: shooting_defaults.atol,
        shooting_root_tol: shooting_defaults.root_tol,
    };
    // field order in the struct fixes the byte stream; sha256 fixes the key
    let bytes = serde_json::to_vec(&material).expect("key material serializes");
    let digest = Sha256::digest(&bytes);
    let mut key = String::with_capacity(64);
    for byte in digest {
        key.push_str(&format!("{byte:02x}"));
    }
    key
}

fn entry_path(dir: &Path, key: &str) -> PathBuf {
    dir.join(format!("{key}.json"))
}

/// Fetch a stored envelope on exact key match. A missing entry is a clean
/// miss; an unreadable or unparsable one warns on stderr and is treated as
/// a miss.
pub fn lookup(dir: &Path, key: &str) -> Option<ResultEnvelope> {
    let path = entry_path(dir, key);
    let text = match fs::read_to_string(&path) {
        Ok(text) => text,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return None,
        Err(e) => {
            eprintln!("warning: ignoring unreadable cache entry {}: {e}", path.display());
            return None;
        }
    };
    match serde_json::from_str::<ResultEnvelope>(&text) {
        Ok(envelope) if envelope.schema_version == SCHEMA_VERSION => Some(envelope),
        Ok(envelope) => {
            eprintln!(
                "warning: ignoring cache entry {} with schema_version {} (expected {})",
                path.display(),
                envelope.schema_version,
                SCHEMA_VERSION
            );
            None
        }
        Err(e) => {
            eprintln!("warning: ignoring corrupt cache entry {}: {e}", path.display());
            None
        }
    }
}

/// Store an envelope under `key`, creating the directory if needed. The
/// write is atomic (temp file + rename), so concurrent readers never see a
/// torn entry.
pub fn store(dir: &Path, key: &str, envelope: &ResultEnvelope) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| {
        CliError::Filesystem(format!("cannot create cache dir {}: {e}", dir.display()))
    })?;
    let bytes = serde_json::to_vec_pretty(envelope)
        .map_err(|e| CliError::Filesystem(format!("cache serialization failed: {e}")))?;
    crate::envelope::write_atomic(&entry_path(dir, key), &bytes)
}
