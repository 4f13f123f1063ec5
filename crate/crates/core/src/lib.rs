//! Spectral toolkit for the complex cubic oscillators
//! H(±m², f) = -d²/dx² ± m²x² + i f x³.
//!
//! These Hamiltonians are not Hermitian, but they are PT-symmetric and
//! their low-lying spectra are real for the parameter ranges treated here.
//! The crate computes those spectra by two independent routes and uses them
//! to verify an exact identity connecting the two mass signs:
//!
//! * [`basis`] — truncated diagonalization in a harmonic-oscillator basis,
//!   where the Hamiltonian is complex symmetric and banded, followed by a
//!   mixed-precision Newton polish of each eigenpair and a
//!   truncation-drift certificate per level.
//! * [`shooting`] — direct integration of the ODE along rays inside the
//!   anti-Stokes wedges where eigenfunctions decay, matching the two
//!   recessive solutions at the origin through a Wronskian root search.
//! * [`duality`] — the headline harness: E(-m², f) = E(+m², f) +
//!   4m⁶/(27 f²) level by level, graded at caller-chosen tolerances.
//! * [`perturbation`] — the weak-coupling series around the harmonic well,
//!   whose coefficients are blind to that non-perturbative shift.
//! * [`model`] — potentials, wedge geometry, contour identities, and the
//!   scaling map shared by everything above.
//!
//! Supporting numerics live in [`eig`] (dense complex eigensolver),
//! [`banded`] (banded LU with partial pivoting), and [`dd`] (double-double
//! compensated arithmetic for residuals near the conditioning limit).

pub mod banded;
pub mod basis;
pub mod dd;
pub mod duality;
pub mod eig;
pub mod model;
pub mod perturbation;
pub mod serde_complex;
pub mod shooting;

pub use basis::{
    auto_omega, build_hamiltonian_matrix, solve_spectrum, BackendTag, BasisConfig, BasisError,
    SpectrumResult,
};
pub use duality::{
    mass_sweep, reality_check, verify_duality, BackendChoice, DualityError, DualityOptions,
    DualityReport, LevelComparison, RealityRow,
};
pub use model::{
    contour_identity_residual, duality_gamma, energy_shift, in_wedge, potential, scaling_image,
    shifted_potential, shifted_potential_constant, ContourShift, EnergyShift, ModelError,
    OscillatorSpec, Wedge, WedgeSide,
};
pub use perturbation::{
    nonperturbative_gap, rs_coefficients, series_eval, PerturbationError, SeriesCoefficients,
};
pub use shooting::{
    asymptotic_seed, find_eigenvalue, integrate_ray, scan_for_levels, spectrum_scan,
    wronskian_mismatch,
    MatchResult, RaySolution, ScanReport, ShootingConfig, ShootingError,
};
