//! Harmonic-basis diagonalization backend.
//!
//! The Hamiltonian H = p² + m²x² + i f x³ is represented in the eigenbasis
//! of an auxiliary reference oscillator p² + Ω²x². With x = (a+a†)/√(2Ω)
//! the matrix is complex symmetric with bandwidth 3; truncating at N states
//! and extracting dense eigenvalues gives the spectrum, with convergence
//! certified by the drift between two basis sizes rather than by residual
//! norms (the matrix is strongly non-normal, so residuals say little about
//! eigenvalue error).
//!
//! # Why eigenvalues get refined after QR
//!
//! For m² < 0 the eigenvalue condition numbers κ_n = ‖v_n‖²/|v_nᵀv_n| grow
//! geometrically with the level — κ₇ reaches ~10⁹ at (m² = -2, f = 1) — and
//! κ is a property of the operator, not of the basis: it saturates in N and
//! is Ω-invariant. Plain double-precision QR therefore carries an error
//! floor κ·ε·‖M‖ that can exceed 10⁻⁵, far above the drift tolerances this
//! crate promises. Each candidate eigenvalue is therefore polished by a
//! bordered Newton iteration whose residual M v - λ v is accumulated in
//! compensated double-double arithmetic against double-double matrix
//! entries; that removes both the QR roundoff and the entry-rounding floor
//! and restores ~10⁻¹⁰ accuracy even at κ ~ 10⁹. (Fixed-precision
//! compensated arithmetic, not arbitrary precision.)
//!
//! Truncation junk is handled by certification, not by sorting: a truncated
//! negative-mass matrix grows spurious eigenvalues with large negative real
//! parts that would dominate a naive sort. Candidates are selected by
//! smallest drift under the basis-size increment, and only drift-certified
//! levels count as converged.

use crate::banded::BandedLu;
use crate::dd::{CDd, Dd};
use crate::eig::{eigenvalues_dense, EigError};
use crate::model::OscillatorSpec;
use ndarray::Array2;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::{rand_core::SeedableRng, ChaCha8Rng};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum BasisError {
    #[error("invalid basis config: {0}")]
    InvalidConfig(String),
    #[error("eigensolver failed: {0}")]
    Eig(#[from] EigError),
}

/// Truncation and convergence parameters for the basis backend.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasisConfig {
    /// Truncation size N.
    pub n_basis: usize,
    /// Reference-oscillator frequency Ω > 0.
    pub omega: f64,
    /// Drift tolerance: a level is converged when its eigenvalue moves less
    /// than this under the basis-size increment.
    pub convergence_tol: f64,
    /// How many trusted levels the caller wants.
    pub n_levels_requested: usize,
}

impl BasisConfig {
    /// Default truncation size, adequate for ≤ 10 levels at the couplings
    /// studied here.
    pub const DEFAULT_N_BASIS: usize = 256;
    /// Default drift tolerance.
    pub const DEFAULT_TOL: f64 = 1e-8;

    pub fn new(
        n_basis: usize,
        omega: f64,
        convergence_tol: f64,
        n_levels_requested: usize,
    ) -> Result<Self, BasisError> {
        let cfg = BasisConfig { n_basis, omega, convergence_tol, n_levels_requested };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Like [`BasisConfig::new`] with Ω picked by [`auto_omega`].
    pub fn with_auto_omega(
        spec: &OscillatorSpec,
        n_basis: usize,
        convergence_tol: f64,
        n_levels_requested: usize,
    ) -> Result<Self, BasisError> {
        Self::new(n_basis, auto_omega(spec), convergence_tol, n_levels_requested)
    }

    pub fn validate(&self) -> Result<(), BasisError> {
        if self.n_levels_requested == 0 {
            return Err(BasisError::InvalidConfig("n_levels_requested must be >= 1".into()));
        }
        if self.n_basis < 4 * self.n_levels_requested {
            return Err(BasisError::InvalidConfig(format!(
                "n_basis = {} is below the safety margin 4*n_levels_requested = {}",
                self.n_basis,
                4 * self.n_levels_requested
            )));
        }
        if !(self.omega.is_finite() && self.omega > 0.0) {
            return Err(BasisError::InvalidConfig(format!(
                "omega must be finite and > 0, got {}",
                self.omega
            )));
        }
        if !(self.convergence_tol.is_finite() && self.convergence_tol > 0.0) {
            return Err(BasisError::InvalidConfig(format!(
                "convergence_tol must be finite and > 0, got {}",
                self.convergence_tol
            )));
        }
        Ok(())
    }
}

/// Heuristic basis frequency Ω = max(√|m²|, f^(2/5)): the harmonic scale
/// when the mass term dominates, the pure-cubic scale f^(2/5) (from
/// E(0, f) = f^(2/5)·E(0, 1)) when it does not. Either sign of m² maps to
/// the same Ω — the basis is a numerical device, not physics.
pub fn auto_omega(spec: &OscillatorSpec) -> f64 {
    spec.m_squared.abs().sqrt().max(spec.coupling.powf(0.4))
}

/// Which backend produced a [`SpectrumResult`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BackendTag {
    Basis,
    Shooting,
}

/// Eigenvalues with convergence metadata.
///
/// The first `converged_count` entries are drift-certified and sorted by
/// ascending real part (ties by imaginary part); any remaining entries are
/// uncertified candidates — truncation routinely contaminates them — also
/// sorted among themselves. `per_level_drift[k]` is the eigenvalue movement
/// under the last basis-size increment (for the shooting backend it is the
/// final root-step size instead).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    #[serde(with = "crate::serde_complex::vec")]
    pub eigenvalues: Vec<Complex64>,
    pub converged_count: usize,
    pub per_level_drift: Vec<f64>,
    pub backend_tag: BackendTag,
    pub spec_echo: OscillatorSpec,
}

impl SpectrumResult {
    /// The drift-certified prefix of the spectrum.
    pub fn converged(&self) -> &[Complex64] {
        &self.eigenvalues[..self.converged_count]
    }
}

/// The banded Hamiltonian held as double-double values: one array per
/// stored band. `diag` and `off2` are real entries (p² + m²x²); `off1` and
/// `off3` are the magnitudes of the purely imaginary i·f·x³ entries.
/// The `f64` matrix handed to the eigensolver is this object rounded
/// entry-wise, so the refinement residual can be evaluated against entries
/// that are exact to ~10⁻³² rather than to one ulp.
struct DdBands {
    n: usize,
    diag: Vec<Dd>,
    off1: Vec<Dd>,
    off2: Vec<Dd>,
    off3: Vec<Dd>,
}

impl DdBands {
    fn build(spec: &OscillatorSpec, n: usize, omega: f64) -> DdBands {
        let m2 = spec.m_squared;
        let f = spec.coupling;
        let two_omega = Dd::from_f64(2.0 * omega); // dyadic scale: exact
        // p² diagonal coefficient Ω/2 plus m²x² diagonal coefficient m²/(2Ω)
        let diag_coef = Dd::from_f64(0.5 * omega).add(Dd::from_f64(m2).div(two_omega));
        // second band: -Ω/2 from p², +m²/(2Ω) from x², common √((n+1)(n+2))
        let off2_coef = Dd::from_f64(-0.5 * omega).add(Dd::from_f64(m2).div(two_omega));
        // x³ bands carry f/(2Ω)^(3/2)
        let cube_scale = Dd::from_f64(f).div(two_omega.powi32());

        let mut diag = Vec::with_capacity(n);
        let mut off1 = Vec::with_capacity(n.saturating_sub(1));
        let mut off2 = Vec::with_capacity(n.saturating_sub(2));
        let mut off3 = Vec::with_capacity(n.saturating_sub(3));
        for k in 0..n {
            // integer products below stay far under 2^53, so the f64
            // conversions are exact and only the square roots round
            let kf = k as f64;
            diag.push(diag_coef.mul_f64(2.0 * kf + 1.0));
            if k + 1 < n {
                // 3(k+1)^(3/2) = sqrt(9(k+1)³)
                let nine_cubed = 9.0 * (kf + 1.0) * (kf + 1.0) * (kf + 1.0);
                off1.push(cube_scale.mul(Dd::from_f64(nine_cubed).sqrt()));
            }
            if k + 2 < n {
                let prod = (kf + 1.0) * (kf + 2.0);
                off2.push(off2_coef.mul(Dd::from_f64(prod).sqrt()));
            }
            if k + 3 < n {
                let prod = (kf + 1.0) * (kf + 2.0) * (kf + 3.0);
                off3.push(cube_scale.mul(Dd::from_f64(prod).sqrt()));
            }
        }
        DdBands { n, diag, off1, off2, off3 }
    }

    /// The f64 matrix entry (i, j); zero outside the band.
    fn entry(&self, i: usize, j: usize) -> Complex64 {
        let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
        match hi - lo {
            0 => Complex64::new(self.diag[lo].to_f64(), 0.0),
            1 => Complex64::new(0.0, self.off1[lo].to_f64()),
            2 => Complex64::new(self.off2[lo].to_f64(), 0.0),
            3 => Complex64::new(0.0, self.off3[lo].to_f64()),
            _ => Complex64::new(0.0, 0.0),
        }
    }

    fn to_dense(&self) -> Array2<Complex64> {
        let n = self.n;
        let mut m = Array2::zeros((n, n));
        for i in 0..n {
            let j_hi = (i + 3).min(n - 1);
            for j in i.saturating_sub(3)..=j_hi {
                m[[i, j]] = self.entry(i, j);
            }
        }
        m
    }

    /// Residual r = M v - λ v accumulated in compensated double-double
    /// arithmetic against the double-double entries, then rounded.
    fn residual(&self, lam: Complex64, v: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        let mut r = Vec::with_capacity(n);
        for i in 0..n {
            let mut acc = CDd::ZERO;
            if i >= 3 {
                acc = acc.add_imag_coeff(self.off3[i - 3], v[i - 3].re, v[i - 3].im);
            }
            if i >= 2 {
                acc = acc.add_real_coeff(self.off2[i - 2], v[i - 2].re, v[i - 2].im);
            }
            if i >= 1 {
                acc = acc.add_imag_coeff(self.off1[i - 1], v[i - 1].re, v[i - 1].im);
            }
            acc = acc.add_real_coeff(self.diag[i], v[i].re, v[i].im);
            if i + 1 < n {
                acc = acc.add_imag_coeff(self.off1[i], v[i + 1].re, v[i + 1].im);
            }
            if i + 2 < n {
                acc = acc.add_real_coeff(self.off2[i], v[i + 2].re, v[i + 2].im);
            }
            if i + 3 < n {
                acc = acc.add_imag_coeff(self.off3[i], v[i + 3].re, v[i + 3].im);
            }
            // subtract λ·v_i with an error-free product
            acc = acc.add_c64_prod(-lam.re, -lam.im, v[i].re, v[i].im);
            r.push(acc.to_c64());
        }
        r
    }
}

/// The N×N complex-symmetric Hamiltonian matrix in the Ω-basis.
pub fn build_hamiltonian_matrix(
    spec: &OscillatorSpec,
    cfg: &BasisConfig,
) -> Result<Array2<Complex64>, BasisError> {
    cfg.validate()?;
    Ok(DdBands::build(spec, cfg.n_basis, cfg.omega).to_dense())
}

/// Unconjugated bilinear form Σ a_k·b_k (the natural pairing for complex
/// symmetric matrices).
fn bilinear(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn euclid_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Polish one QR eigenvalue estimate on the bands it came from. Returns the
/// refined eigenvalue, falling back to the input when the iteration cannot
/// improve it (near-defective candidates diverge and are left alone —
/// they are truncation junk that certification will discard anyway).
fn refine_eigenvalue(bands: &DdBands, lam0: Complex64, convergence_tol: f64) -> Complex64 {
    let n = bands.n;
    // factor M - μI once, with μ detuned off the eigenvalue estimate just
    // enough to keep the factorization regular
    let mut lu = None;
    for detune in [3e-14, 1e-12, 1e-10] {
        let mu = lam0 + lam0 * detune + Complex64::new(detune, 0.0);
        let shifted = |i: usize, j: usize| {
            let mut z = bands.entry(i, j);
            if i == j {
                z -= mu;
            }
            z
        };
        if let Ok(f) = BandedLu::factor(n, 3, 3, shifted) {
            lu = Some(f);
            break;
        }
    }
    let Some(lu) = lu else { return lam0 };

    // inverse iteration from a fixed-seed random vector isolates the
    // eigenvector belonging to the nearest eigenvalue
    let mut rng = ChaCha8Rng::seed_from_u64(12345);
    let mut v: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
        .collect();
    for _ in 0..3 {
        lu.solve(&mut v);
        let s = 1.0 / euclid_norm(&v);
        if !s.is_finite() {
            return lam0;
        }
        v.iter_mut().for_each(|z| *z *= s);
    }
    // switch to the bilinear normalization vᵀv = 1 used by the bordered
    // Newton step; bail out if the self-overlap is too degenerate
    let vtv = bilinear(&v, &v);
    if vtv.norm() < 1e-10 {
        return lam0;
    }
    let s = vtv.sqrt();
    v.iter_mut().for_each(|z| *z /= s);

    // bordered Newton on F = (Mv - λv, (vᵀv-1)/2), with the Jacobian's
    // (M - λI) block frozen at the factored μ — the exactness that matters
    // lives entirely in the residual
    let mut lam = lam0;
    for _ in 0..8 {
        let r = bands.residual(lam, &v);
        let beta = Complex64::new(1.0, 0.0) - bilinear(&v, &v);
        let mut y = v.clone();
        lu.solve(&mut y);
        let mut z = r.clone();
        lu.solve(&mut z);
        let vty = bilinear(&v, &y);
        let vtz = bilinear(&v, &z);
        if vty.norm() == 0.0 {
            return lam0;
        }
        let dlam = (0.5 * beta + vtz) / vty;
        if !(dlam.re.is_finite() && dlam.im.is_finite()) || dlam.norm() > 0.5 * (1.0 + lam.norm())
        {
            return lam0;
        }
        for k in 0..n {
            v[k] = v[k] - z[k] + dlam * y[k];
        }
        lam += dlam;
        let vtv = bilinear(&v, &v);
        if vtv.norm() < 1e-10 {
            return lam0;
        }
        let s = vtv.sqrt();
        v.iter_mut().for_each(|w| *w /= s);
        if dlam.norm() <= 1e-3 * convergence_tol * (1.0 + lam.norm()) {
            break;
        }
    }
    lam
}

/// Distance from `z` to the nearest element of `set`, with that element.
fn nearest(z: Complex64, set: &[Complex64]) -> (Complex64, f64) {
    let mut best = (Complex64::new(f64::INFINITY, f64::INFINITY), f64::INFINITY);
    for &w in set {
        let d = (z - w).norm();
        if d < best.1 {
            best = (w, d);
        }
    }
    best
}

/// Raw-drift gate: larger-basis eigenvalues whose nearest smaller-basis
/// partner is farther than this are truncation junk not worth refining.
const RAW_DRIFT_GATE: f64 = 1e-2;

/// Two refined candidates closer than this (relative) are the same
/// eigenvalue reached from different raw estimates.
const DEDUPE_REL: f64 = 1e-9;

/// Compute the spectrum with drift-based convergence certification.
///
/// The protocol: dense QR eigenvalues at N and N+ΔN (ΔN = max(16, N/8));
/// each larger-basis eigenvalue is matched to its nearest smaller-basis
/// partner; the lowest-raw-drift candidates are Newton-polished on *both*
/// matrices, and a level is converged when the polished pair agrees within
/// `convergence_tol`. Certified levels come first, sorted by real part
/// (ties by imaginary part); uncertified candidates follow, so the trusted
/// prefix of the list is exactly `converged()`.
pub fn solve_spectrum(
    spec: &OscillatorSpec,
    cfg: &BasisConfig,
) -> Result<SpectrumResult, BasisError> {
    cfg.validate()?;
    let n1 = cfg.n_basis;
    let n2 = n1 + (n1 / 8).max(16);

    let bands1 = DdBands::build(spec, n1, cfg.omega);
    let bands2 = DdBands::build(spec, n2, cfg.omega);
    let raw1 = eigenvalues_dense(&bands1.to_dense())?;
    let raw2 = eigenvalues_dense(&bands2.to_dense())?;

    // nearest-partner raw drift for every larger-basis eigenvalue; gate out
    // truncation junk (it moves wildly between the two sizes), then keep the
    // lowest-lying survivors — capping from the top of the ladder, where
    // truncation error is worst anyway, keeps the selection deterministic
    // even when every drift ties at roundoff level
    let mut tagged: Vec<(Complex64, Complex64, f64)> = raw2
        .iter()
        .filter_map(|&z| {
            let (partner, d) = nearest(z, &raw1);
            (d < RAW_DRIFT_GATE).then_some((z, partner, d))
        })
        .collect();
    tagged.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
    let cap = 40usize.max(3 * cfg.n_levels_requested);
    let candidates: Vec<&(Complex64, Complex64, f64)> = tagged.iter().take(cap).collect();

    // polish each candidate on both matrices; certified drift is the
    // distance between the two polished values
    let mut refined: Vec<(Complex64, f64)> = Vec::with_capacity(candidates.len());
    for &&(z2, z1, _) in &candidates {
        let p2 = refine_eigenvalue(&bands2, z2, cfg.convergence_tol);
        let p1 = refine_eigenvalue(&bands1, z1, cfg.convergence_tol);
        refined.push((p2, (p2 - p1).norm()));
    }
    // dedupe: several raw estimates can polish onto one eigenvalue; keep
    // the best-certified copy
    refined.sort_by(|a, b| a.1.total_cmp(&b.1));
    let mut unique: Vec<(Complex64, f64)> = Vec::with_capacity(refined.len());
    for (z, d) in refined {
        let dup = unique.iter().any(|(u, _)| (z - u).norm() <= DEDUPE_REL * (1.0 + u.norm()));
        if !dup {
            unique.push((z, d));
        }
    }

    let (mut converged, mut rest): (Vec<(Complex64, f64)>, Vec<(Complex64, f64)>) =
        unique.into_iter().partition(|(_, d)| *d <= cfg.convergence_tol);
    let by_real = |a: &(Complex64, f64), b: &(Complex64, f64)| {
        a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im))
    };
    converged.sort_by(by_real);
    rest.sort_by(by_real);
    let converged_count = converged.len();
    let mut eigenvalues = Vec::with_capacity(converged.len() + rest.len());
    let mut per_level_drift = Vec::with_capacity(converged.len() + rest.len());
    for (z, d) in converged.into_iter().chain(rest) {
        eigenvalues.push(z);
        per_level_drift.push(d);
    }
    Ok(SpectrumResult {
        eigenvalues,
        converged_count,
        per_level_drift,
        backend_tag: BackendTag::Basis,
        spec_echo: *spec,
    })
}
