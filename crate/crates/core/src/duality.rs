//! Mass-sign duality harness.
//!
//! The two oscillators H(±m², f) = -d²/dx² ± m²x² + i f x³ share one
//! spectrum up to a rigid shift: E(-m², f) = E(+m², f) + 4m⁶/(27 f²),
//! level by level. The identity follows from completing the cube along a
//! shifted integration contour, so it is exact — any residual in a verified
//! report measures numerical error, not physics.
//!
//! [`verify_duality`] computes both spectra (basis diagonalization,
//! complex shooting, or both with a cross-check), pairs levels by sorted
//! order, and grades the measured per-level differences against the
//! predicted shift. [`mass_sweep`] repeats this over a mass grid to expose
//! how the shift disconnects the two signs as m² → 0⁺ heals the gap.

use crate::basis::{solve_spectrum, BasisConfig, SpectrumResult};
use crate::model::{energy_shift, shifted_potential_constant, ModelError, OscillatorSpec};
use crate::shooting::{find_eigenvalue, ShootingConfig, ShootingError};
use crate::basis::BasisError;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DualityError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Basis(#[from] BasisError),
    #[error(transparent)]
    Shooting(#[from] ShootingError),
    #[error(
        "the m² = {m_squared} spectrum certified only {converged} of {requested} requested levels; \
         raise n_basis or loosen the drift tolerance"
    )]
    InsufficientLevels { m_squared: f64, requested: usize, converged: usize },
    #[error(
        "backends disagree at level {level} of m² = {m_squared}: basis {basis}, shooting {shooting} \
         (|diff| = {diff:.3e} > {tol:.3e})"
    )]
    CrossBackendDisagreement {
        m_squared: f64,
        level: usize,
        basis: Complex64,
        shooting: Complex64,
        diff: f64,
        tol: f64,
    },
    #[error("negative m² = {0} passed to the duality harness; pass |m²| — the harness flips the sign itself")]
    NegativeMassInput(f64),
    #[error("mass sweep failed at grid point m² = {m_squared}: {source}")]
    SweepPointFailed {
        m_squared: f64,
        #[source]
        source: Box<DualityError>,
    },
    #[error("m² sweep grid must be strictly ascending, but {prev} precedes {next}")]
    GridNotAscending { prev: f64, next: f64 },
}

/// Which eigenvalue engine(s) the harness runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BackendChoice {
    Basis,
    Shooting,
    /// Basis spectra, each level re-derived by shooting and required to
    /// agree within `cross_backend_tol` before the duality verdict is
    /// rendered. Disagreement is its own failure class, distinct from a
    /// duality violation.
    Both,
}

/// Numerical knobs for the harness; [`Default`] matches the library-wide
/// defaults.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualityOptions {
    /// Basis truncation; `None` → [`BasisConfig::DEFAULT_N_BASIS`].
    pub n_basis: Option<usize>,
    /// Basis frequency override; `None` → automatic per mass sign.
    pub omega: Option<f64>,
    /// Drift tolerance a level must certify to count as converged.
    pub drift_tol: f64,
    pub shooting: ShootingConfig,
    /// Largest |Im E| tolerated in a verified report.
    pub reality_tol: f64,
    /// Agreement required between backends in [`BackendChoice::Both`].
    pub cross_backend_tol: f64,
}

impl Default for DualityOptions {
    fn default() -> Self {
        DualityOptions {
            n_basis: None,
            omega: None,
            drift_tol: BasisConfig::DEFAULT_TOL,
            shooting: ShootingConfig::default(),
            reality_tol: 1e-8,
            cross_backend_tol: 1e-6,
        }
    }
}

/// One paired level of the two spectra.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelComparison {
    pub n: usize,
    #[serde(with = "crate::serde_complex")]
    pub e_plus: Complex64,
    #[serde(with = "crate::serde_complex")]
    pub e_minus: Complex64,
    /// Re E(-m²) - Re E(+m²); the theorem predicts exactly the shift.
    pub measured_diff: f64,
    /// |measured_diff - predicted_delta|.
    pub abs_error: f64,
    pub reality_violation_plus: f64,
    pub reality_violation_minus: f64,
}

/// Full duality verdict for one (|m²|, f) point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualityReport {
    pub spec_plus: OscillatorSpec,
    pub spec_minus: OscillatorSpec,
    /// 4|m²|³/(27 f²).
    pub predicted_delta: f64,
    /// Constants 2(±m²)³/(27 f²) added by the two shifted potentials; their
    /// difference reproduces `predicted_delta` to roundoff.
    pub shifted_constant_plus: f64,
    pub shifted_constant_minus: f64,
    pub per_level: Vec<LevelComparison>,
    pub max_abs_error: f64,
    pub max_reality_violation: f64,
    /// True iff every |measured - predicted| ≤ tol and every |Im E| ≤
    /// reality_tol.
    pub verdict: bool,
    pub tol: f64,
    pub backends_used: BackendChoice,
}

/// Per-level imaginary-part audit of a spectrum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealityRow {
    pub n: usize,
    pub im_part: f64,
    pub pass: bool,
}

/// |Im E_n| for every certified level, graded against `tol`. PT symmetry
/// makes the whole spectrum real in the regime studied here, so a failing
/// row flags either symmetry breaking or numerical trouble.
pub fn reality_check(result: &SpectrumResult, tol: f64) -> Vec<RealityRow> {
    result
        .converged()
        .iter()
        .enumerate()
        .map(|(n, e)| RealityRow { n, im_part: e.im, pass: e.im.abs() <= tol })
        .collect()
}

fn certified_levels(
    spec: &OscillatorSpec,
    n_levels: usize,
    opts: &DualityOptions,
) -> Result<Vec<Complex64>, DualityError> {
    let n_basis = opts.n_basis.unwrap_or(BasisConfig::DEFAULT_N_BASIS);
    let cfg = match opts.omega {
        Some(omega) => BasisConfig::new(n_basis, omega, opts.drift_tol, n_levels)?,
        None => BasisConfig::with_auto_omega(spec, n_basis, opts.drift_tol, n_levels)?,
    };
    let result = solve_spectrum(spec, &cfg)?;
    if result.converged_count < n_levels {
        return Err(DualityError::InsufficientLevels {
            m_squared: spec.m_squared,
            requested: n_levels,
            converged: result.converged_count,
        });
    }
    Ok(result.converged()[..n_levels].to_vec())
}

/// Re-derive each basis level by shooting, seeded at the basis value, and
/// insist the two engines agree.
fn cross_check_levels(
    spec: &OscillatorSpec,
    levels: &[Complex64],
    opts: &DualityOptions,
) -> Result<(), DualityError> {
    for (n, &e_basis) in levels.iter().enumerate() {
        let m = find_eigenvalue(spec, e_basis, &opts.shooting)?;
        let diff = (m.energy - e_basis).norm();
        if !m.converged || diff > opts.cross_backend_tol {
            return Err(DualityError::CrossBackendDisagreement {
                m_squared: spec.m_squared,
                level: n,
                basis: e_basis,
                shooting: m.energy,
                diff,
                tol: opts.cross_backend_tol,
            });
        }
    }
    Ok(())
}

/// Shooting-only spectrum: scan a window wide enough for `n_levels` levels.
fn shooting_levels(
    spec: &OscillatorSpec,
    n_levels: usize,
    opts: &DualityOptions,
) -> Result<Vec<Complex64>, DualityError> {
    let report = crate::shooting::scan_for_levels(spec, n_levels, &opts.shooting)?;
    if report.result.converged_count < n_levels {
        return Err(DualityError::InsufficientLevels {
            m_squared: spec.m_squared,
            requested: n_levels,
            converged: report.result.converged_count,
        });
    }
    Ok(report.result.converged()[..n_levels].to_vec())
}

/// Verify E(-m², f) = E(+m², f) + 4m⁶/(27 f²) on the first `n_levels`
/// levels. Takes |m²| ≥ 0 and flips the sign itself; negative input is a
/// usage error. m² = 0 is allowed and trivially self-dual (shift 0).
pub fn verify_duality(
    m_abs_squared: f64,
    coupling: f64,
    n_levels: usize,
    tol: f64,
    backend: BackendChoice,
    opts: &DualityOptions,
) -> Result<DualityReport, DualityError> {
    if m_abs_squared < 0.0 || !m_abs_squared.is_finite() {
        return Err(DualityError::NegativeMassInput(m_abs_squared));
    }
    let spec_plus = OscillatorSpec::new(m_abs_squared, coupling)?;
    let spec_minus = spec_plus.mass_flipped();

    let (plus, minus) = match backend {
        BackendChoice::Basis => (
            certified_levels(&spec_plus, n_levels, opts)?,
            certified_levels(&spec_minus, n_levels, opts)?,
        ),
        BackendChoice::Shooting => (
            shooting_levels(&spec_plus, n_levels, opts)?,
            shooting_levels(&spec_minus, n_levels, opts)?,
        ),
        BackendChoice::Both => {
            let plus = certified_levels(&spec_plus, n_levels, opts)?;
            let minus = certified_levels(&spec_minus, n_levels, opts)?;
            cross_check_levels(&spec_plus, &plus, opts)?;
            cross_check_levels(&spec_minus, &minus, opts)?;
            (plus, minus)
        }
    };

    let delta = energy_shift(&spec_plus).delta;
    let mut per_level = Vec::with_capacity(n_levels);
    let mut max_abs_error = 0.0f64;
    let mut max_reality = 0.0f64;
    for n in 0..n_levels {
        let e_p = plus[n];
        let e_m = minus[n];
        let measured = e_m.re - e_p.re;
        let abs_error = (measured - delta).abs();
        max_abs_error = max_abs_error.max(abs_error);
        max_reality = max_reality.max(e_p.im.abs()).max(e_m.im.abs());
        per_level.push(LevelComparison {
            n,
            e_plus: e_p,
            e_minus: e_m,
            measured_diff: measured,
            abs_error,
            reality_violation_plus: e_p.im.abs(),
            reality_violation_minus: e_m.im.abs(),
        });
    }
    let verdict = max_abs_error <= tol && max_reality <= opts.reality_tol;
    Ok(DualityReport {
        spec_plus,
        spec_minus,
        predicted_delta: delta,
        shifted_constant_plus: shifted_potential_constant(&spec_plus),
        shifted_constant_minus: shifted_potential_constant(&spec_minus),
        per_level,
        max_abs_error,
        max_reality_violation: max_reality,
        verdict,
        tol,
        backends_used: backend,
    })
}

/// Run [`verify_duality`] on an ascending grid of |m²| values at fixed f.
/// Failed verdicts come back as data in the reports; solver errors abort
/// with the offending grid point attached.
pub fn mass_sweep(
    coupling: f64,
    m2_grid: &[f64],
    n_levels: usize,
    tol: f64,
    opts: &DualityOptions,
) -> Result<Vec<DualityReport>, DualityError> {
    for pair in m2_grid.windows(2) {
        if pair[1] <= pair[0] {
            return Err(DualityError::GridNotAscending { prev: pair[0], next: pair[1] });
        }
    }
    let mut reports = Vec::with_capacity(m2_grid.len());
    for &m2 in m2_grid {
        let report = verify_duality(m2, coupling, n_levels, tol, BackendChoice::Basis, opts)
            .map_err(|e| DualityError::SweepPointFailed { m_squared: m2, source: Box::new(e) })?;
        reports.push(report);
    }
    Ok(reports)
}
