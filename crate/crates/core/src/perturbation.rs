//! Weak-coupling power series for H = -d²/dx² + m²x² + i f x³ with m² > 0.
//!
//! For small f the spectrum admits the expansion
//! E_n(f) = (2n+1)ω + c₁ f + c₂ f² + O(f⁴), ω = √(m²).
//! The coefficients are computed by the literal sum-over-states formulas in
//! the oscillator eigenbasis of the unperturbed well, using the bilinear
//! (unconjugated) pairing appropriate to the complex-symmetric perturbation,
//! rather than from the closed forms — the closed forms serve as test
//! oracles instead.
//!
//! The series is blind to the non-perturbative level shift that separates
//! the two mass signs; [`nonperturbative_gap`] exposes that shift for
//! comparison. For m² ≤ 0 there is no harmonic well to expand around, so
//! coefficient requests are rejected outright.

use crate::model::{energy_shift, OscillatorSpec, ModelError};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PerturbationError {
    #[error(
        "m² = {0} has no harmonic expansion point: the series exists only in the perturbative regime m² > 0"
    )]
    NonPerturbativeRegime(f64),
    #[error("basis size {basis_size} too small for level {level}: need at least level + 4 states")]
    BasisTooSmall { level: usize, basis_size: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// First- and second-order series coefficients for one level.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesCoefficients {
    pub level: usize,
    /// Coefficient of f; vanishes by parity (computed, not assumed).
    #[serde(with = "crate::serde_complex")]
    pub c1: Complex64,
    /// Coefficient of f².
    #[serde(with = "crate::serde_complex")]
    pub c2: Complex64,
    /// Number of unperturbed states the sums actually ran over.
    pub basis_size_used: usize,
}

/// ⟨bra|x³|ket⟩ in the eigenbasis of -d²/dx² + ω²x²; nonzero only for
/// |bra - ket| ∈ {1, 3}.
fn x3_element(bra: usize, ket: usize, omega: f64) -> f64 {
    let (lo, hi) = if bra < ket { (bra, ket) } else { (ket, bra) };
    let scale = (2.0 * omega).powf(1.5);
    match hi - lo {
        1 => {
            let k = lo as f64;
            3.0 * (k + 1.0).powf(1.5) / scale
        }
        3 => {
            let k = lo as f64;
            ((k + 1.0) * (k + 2.0) * (k + 3.0)).sqrt() / scale
        }
        _ => 0.0,
    }
}

/// Sum-over-states coefficients through second order for level `level` of
/// the m² > 0 oscillator. `basis_size` bounds the intermediate-state sum;
/// only the four states level ± 1, level ± 3 contribute, so any basis with
/// at least `level + 4` states gives the bitwise-identical answer.
pub fn rs_coefficients(
    m_squared: f64,
    level: usize,
    basis_size: usize,
) -> Result<SeriesCoefficients, PerturbationError> {
    if !(m_squared > 0.0) || !m_squared.is_finite() {
        return Err(PerturbationError::NonPerturbativeRegime(m_squared));
    }
    if basis_size < level + 4 {
        return Err(PerturbationError::BasisTooSmall { level, basis_size });
    }
    let omega = m_squared.sqrt();
    let n = level;
    // first order: diagonal element of the perturbation i·x³ (the factor f
    // is carried by the series variable, not the coefficient)
    let c1 = Complex64::new(0.0, 1.0) * x3_element(n, n, omega);
    // second order: Σ_{k≠n} W_nk W_kn / (E_n - E_k) with W = i·x³ and the
    // unconjugated product, i.e. -Σ X²_{kn}/(E_n - E_k)
    let mut c2 = 0.0f64;
    for k in 0..basis_size {
        if k == n {
            continue;
        }
        let x = x3_element(k, n, omega);
        if x == 0.0 {
            continue;
        }
        let gap = 2.0 * omega * (k as f64 - n as f64); // E_k - E_n
        c2 += x * x / gap;
    }
    Ok(SeriesCoefficients {
        level,
        c1,
        c2: Complex64::new(c2, 0.0),
        basis_size_used: basis_size,
    })
}

/// Evaluate the truncated series E ≈ (2n+1)√(m²) + c₁f + c₂f² for the level
/// the coefficients were computed at. `m_squared` must match the value used
/// in [`rs_coefficients`].
pub fn series_eval(
    coeffs: &SeriesCoefficients,
    m_squared: f64,
    coupling: f64,
) -> Result<Complex64, PerturbationError> {
    if !(m_squared > 0.0) || !m_squared.is_finite() {
        return Err(PerturbationError::NonPerturbativeRegime(m_squared));
    }
    let omega = m_squared.sqrt();
    let e0 = (2 * coeffs.level + 1) as f64 * omega;
    Ok(Complex64::new(e0, 0.0) + coeffs.c1 * coupling + coeffs.c2 * (coupling * coupling))
}

/// The level shift 4|m²|³/(27 f²) that the power series cannot see: every
/// series coefficient is identical for the two mass signs, yet the spectra
/// differ by exactly this constant.
pub fn nonperturbative_gap(m_squared: f64, coupling: f64) -> Result<f64, PerturbationError> {
    let spec = OscillatorSpec::new(m_squared, coupling)?;
    Ok(energy_shift(&spec).delta)
}
