//! Hamiltonian parameterization, potential evaluation, anti-Stokes wedge
//! geometry, contour-shift algebra, and exact scaling laws.
//!
//! Everything else in the crate builds on this module. The central object is
//! [`OscillatorSpec`], the pair (m², f) defining the one-parameter family of
//! Schrödinger operators
//!
//! ```text
//!     H(m², f) = -d²/dx² + m² x² + i f x³ ,
//! ```
//!
//! where m² is a *signed* real (its sign selects the two partners of the
//! mass-sign duality) and f > 0. The key algebraic facts encoded here:
//!
//! * shifting the integration contour to x = t + iγ with γ = 2m²/(3f) turns
//!   H(m², f) into H(-m², f) minus the constant 4(m²)³/(27f²) — checked
//!   pointwise by [`contour_identity_residual`];
//! * eigenfunctions decay only inside two anti-Stokes wedges of width 2π/5,
//!   the right wedge (-3π/10, π/10) and the left wedge (9π/10, 13π/10) —
//!   encoded by [`in_wedge`];
//! * the substitution x → s·y rescales the whole spectrum exactly:
//!   E(m², f) = s⁻²·E(s⁴m², s⁵f) — encoded by [`scaling_image`].

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Machine epsilon of the working precision (binary64).
pub const EPS: f64 = f64::EPSILON;

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    /// The cubic coupling must be a strictly positive finite real; f = 0
    /// degenerates the wedge geometry and makes the duality shift diverge.
    #[error("cubic coupling f must be finite and > 0, got {0}")]
    InvalidCoupling(f64),
    /// m² may have either sign but must be a finite real.
    #[error("squared mass m\u{b2} must be finite, got {0}")]
    InvalidMassSquared(f64),
}

/// One member of the cubic-oscillator family: H = -d²/dx² + m²x² + i f x³.
///
/// `m_squared` carries the sign; there is no separate sign flag. Negative
/// couplings are excluded rather than mapped through parity (x → -x sends
/// f → -f, so nothing is lost) to keep the wedge orientation fixed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OscillatorSpec {
    /// Signed squared mass m². Positive, zero, and negative are all valid.
    pub m_squared: f64,
    /// Cubic coupling f; strictly positive.
    pub coupling: f64,
}

impl OscillatorSpec {
    /// Validating constructor; the only supported way to obtain a spec.
    /// All evaluation methods assume the invariants established here
    /// (finite m², finite f > 0) and are total functions afterwards.
    pub fn new(m_squared: f64, coupling: f64) -> Result<Self, ModelError> {
        if !m_squared.is_finite() {
            return Err(ModelError::InvalidMassSquared(m_squared));
        }
        if !(coupling.is_finite() && coupling > 0.0) {
            return Err(ModelError::InvalidCoupling(coupling));
        }
        Ok(OscillatorSpec { m_squared, coupling })
    }

    /// The partner spec with the sign of m² flipped (same coupling).
    pub fn mass_flipped(self) -> OscillatorSpec {
        OscillatorSpec { m_squared: -self.m_squared, coupling: self.coupling }
    }
}

/// The vertical offset γ in the shifted contour x = t + iγ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContourShift {
    pub gamma: f64,
}

/// The spectral shift Δ = 4m⁶/(27f²) between the two mass-sign partners.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyShift {
    pub delta: f64,
}

/// Which anti-Stokes wedge a direction is tested against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum WedgeSide {
    Right,
    Left,
}

/// An open angular sector in the complex plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Wedge {
    pub lower_angle: f64,
    pub upper_angle: f64,
    pub side: WedgeSide,
}

impl Wedge {
    /// The right anti-Stokes wedge (-3π/10, π/10).
    pub fn right() -> Wedge {
        Wedge {
            lower_angle: -3.0 * std::f64::consts::PI / 10.0,
            upper_angle: std::f64::consts::PI / 10.0,
            side: WedgeSide::Right,
        }
    }

    /// The left anti-Stokes wedge (9π/10, 13π/10).
    pub fn left() -> Wedge {
        Wedge {
            lower_angle: 9.0 * std::f64::consts::PI / 10.0,
            upper_angle: 13.0 * std::f64::consts::PI / 10.0,
            side: WedgeSide::Left,
        }
    }
}

/// V(x) = m²x² + i f x³ with full complex arithmetic. Total function.
pub fn potential(spec: &OscillatorSpec, x: Complex64) -> Complex64 {
    let x2 = x * x;
    spec.m_squared * x2 + Complex64::new(0.0, spec.coupling) * x2 * x
}

/// V(x) plus the constant 2(m²)³/(27f²); the cube makes the constant's sign
/// follow the sign of m², so the two mass-sign partners get constants of
/// opposite sign whose difference is exactly [`energy_shift`].
pub fn shifted_potential(spec: &OscillatorSpec, x: Complex64) -> Complex64 {
    potential(spec, x) + shifted_potential_constant(spec)
}

/// The constant term of [`shifted_potential`]: 2(m²)³/(27f²), signed.
pub fn shifted_potential_constant(spec: &OscillatorSpec) -> f64 {
    let m2 = spec.m_squared;
    2.0 * (m2 * m2 * m2) / (27.0 * spec.coupling * spec.coupling)
}

/// The unique real contour shift γ = 2m²/(3f) that maps H(m²,f) onto
/// H(-m²,f) plus a constant: the quadratic coefficient of V(t + iγ) flips
/// sign while the imaginary linear term 2m²γ - 3fγ² cancels.
pub fn duality_gamma(spec: &OscillatorSpec) -> ContourShift {
    ContourShift { gamma: 2.0 * spec.m_squared / (3.0 * spec.coupling) }
}

/// The duality shift Δ = 4|m²|³/(27f²) ≥ 0.
///
/// The pairing E(-m²) = E(+m²) + Δ is symmetric in the two partners, so the
/// shift is reported for |m²| regardless of the input sign.
pub fn energy_shift(spec: &OscillatorSpec) -> EnergyShift {
    let m2 = spec.m_squared.abs();
    EnergyShift { delta: 4.0 * (m2 * m2 * m2) / (27.0 * spec.coupling * spec.coupling) }
}

/// Pointwise check of the contour identity: returns
///
/// ```text
///     | V(t + iγ) - ( -m²t² + i f t³ - 4(m²)³/(27f²) ) |
/// ```
///
/// with γ = 2m²/(3f). The subtracted constant uses the *signed* cube
/// 4(m²)³/(27f²) — equal to +Δ for m² ≥ 0 — because V(t + iγ) literally
/// produces the flipped-mass potential minus that signed constant; for
/// m² < 0 the identity runs in the opposite direction and the constant
/// changes sign with it. Zero up to a few units of roundoff for all real t.
pub fn contour_identity_residual(spec: &OscillatorSpec, t: f64) -> f64 {
    let gamma = duality_gamma(spec).gamma;
    let direct = potential(spec, Complex64::new(t, gamma));
    let m2 = spec.m_squared;
    let signed_shift = 4.0 * (m2 * m2 * m2) / (27.0 * spec.coupling * spec.coupling);
    let reference = Complex64::new(-m2 * t * t - signed_shift, spec.coupling * t * t * t);
    (direct - reference).norm()
}

/// True iff `angle` lies strictly inside the named open wedge. The input is
/// normalized into (-π, 3π/2] first, the smallest range containing both
/// wedges, so e.g. 17π/10 ≡ -3π/10 is handled; the four boundary angles
/// themselves are excluded (open intervals).
pub fn in_wedge(angle: f64, side: WedgeSide) -> bool {
    let mut a = angle;
    while a > 3.0 * std::f64::consts::PI / 2.0 {
        a -= 2.0 * std::f64::consts::PI;
    }
    while a <= -std::f64::consts::PI {
        a += 2.0 * std::f64::consts::PI;
    }
    let w = match side {
        WedgeSide::Right => Wedge::right(),
        WedgeSide::Left => Wedge::left(),
    };
    w.lower_angle < a && a < w.upper_angle
}

/// The exact spectral scaling x → s·y: returns the image spec
/// (m²′, f′) = (s⁴m², s⁵f) and the factor s⁻² such that every eigenvalue
/// satisfies E(m², f) = s⁻²·E(m²′, f′).
pub fn scaling_image(spec: &OscillatorSpec, s: f64) -> (OscillatorSpec, f64) {
    assert!(s > 0.0, "scaling parameter must be positive");
    let s2 = s * s;
    let s4 = s2 * s2;
    let image = OscillatorSpec {
        m_squared: s4 * spec.m_squared,
        coupling: s4 * s * spec.coupling,
    };
    (image, 1.0 / s2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn spec(m2: f64, f: f64) -> OscillatorSpec {
        OscillatorSpec::new(m2, f).unwrap()
    }

    #[test]
    fn construction_rejects_bad_couplings() {
        assert_eq!(OscillatorSpec::new(1.0, 0.0), Err(ModelError::InvalidCoupling(0.0)));
        assert_eq!(OscillatorSpec::new(1.0, -2.0), Err(ModelError::InvalidCoupling(-2.0)));
        assert!(OscillatorSpec::new(1.0, f64::NAN).is_err());
        assert!(OscillatorSpec::new(f64::INFINITY, 1.0).is_err());
        assert!(OscillatorSpec::new(-3.0, 0.5).is_ok());
    }

    #[test]
    fn potential_matches_hand_values() {
        // direct substitutions
        let v = potential(&spec(0.0, 1.0), Complex64::new(1.0, 0.0));
        assert_eq!(v, Complex64::new(0.0, 1.0));
        let v = potential(&spec(1.0, 1.0), Complex64::new(0.0, 1.0));
        // at x = i: m²x² = -1, i f x³ = i·(-i) = 1
        assert_eq!(v, Complex64::new(0.0, 0.0));
        let v = potential(&spec(1.0, 1.0), Complex64::new(2.0, 0.0));
        assert_eq!(v, Complex64::new(4.0, 8.0));
    }

    #[test]
    fn shifted_potential_constant_follows_mass_sign() {
        let v = shifted_potential(&spec(1.0, 1.0), Complex64::new(0.0, 0.0));
        assert_relative_eq!(v.re, 2.0 / 27.0, max_relative = 1e-15);
        assert_eq!(v.im, 0.0);
        let v = shifted_potential(&spec(-1.0, 1.0), Complex64::new(0.0, 0.0));
        assert_relative_eq!(v.re, -2.0 / 27.0, max_relative = 1e-15);
        let v = shifted_potential(&spec(0.0, 1.0), Complex64::new(0.0, 0.0));
        assert_eq!(v, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn gamma_and_shift_hand_values() {
        assert_relative_eq!(duality_gamma(&spec(3.0, 2.0)).gamma, 1.0, max_relative = 1e-15);
        assert_eq!(duality_gamma(&spec(0.0, 1.0)).gamma, 0.0);
        assert_relative_eq!(duality_gamma(&spec(1.0, 1.0)).gamma, 2.0 / 3.0, max_relative = 1e-15);

        assert_relative_eq!(energy_shift(&spec(1.0, 1.0)).delta, 4.0 / 27.0, max_relative = 1e-15);
        assert_eq!(energy_shift(&spec(0.0, 5.0)).delta, 0.0);
        assert_relative_eq!(energy_shift(&spec(3.0, 2.0)).delta, 1.0, max_relative = 1e-15);
        // the pairing is symmetric: reported shift ignores the input sign
        assert_eq!(
            energy_shift(&spec(-2.0, 1.0)).delta,
            energy_shift(&spec(2.0, 1.0)).delta
        );
    }

    #[test]
    fn energy_shift_equals_difference_of_shifted_constants() {
        for &(m2, f) in &[(1.0, 1.0), (2.0, 0.5), (0.7, 3.0), (4.0, 2.5)] {
            let plus = spec(m2, f);
            let minus = plus.mass_flipped();
            let diff =
                shifted_potential_constant(&plus) - shifted_potential_constant(&minus);
            assert_relative_eq!(diff, energy_shift(&plus).delta, max_relative = 1e-14);
        }
    }

    #[test]
    fn contour_identity_hand_points() {
        assert!(contour_identity_residual(&spec(1.0, 1.0), 0.0) < 1e-14);
        // γ = 0 at zero mass: both sides are literally the same expression
        assert_eq!(contour_identity_residual(&spec(0.0, 1.0), 7.0), 0.0);
        assert!(contour_identity_residual(&spec(2.0, 0.5), -3.3) < 1e-11);
    }

    #[test]
    fn wedge_hand_values() {
        assert!(in_wedge(0.0, WedgeSide::Right));
        assert!(in_wedge(PI, WedgeSide::Left));
        assert!(!in_wedge(PI / 2.0, WedgeSide::Right));
        assert!(!in_wedge(PI / 2.0, WedgeSide::Left));
        // boundary angles are excluded (open intervals)
        for b in [-3.0 * PI / 10.0, PI / 10.0] {
            assert!(!in_wedge(b, WedgeSide::Right));
        }
        for b in [9.0 * PI / 10.0, 13.0 * PI / 10.0] {
            assert!(!in_wedge(b, WedgeSide::Left));
        }
        // 2π-periodicity: 17π/10 is the right wedge's lower edge from above
        assert!(in_wedge(17.0 * PI / 10.0 + 0.01, WedgeSide::Right));
        assert!(in_wedge(-PI, WedgeSide::Left)); // -π ≡ π
    }

    #[test]
    fn wedge_widths_are_two_fifths_pi() {
        for w in [Wedge::right(), Wedge::left()] {
            assert_relative_eq!(w.upper_angle - w.lower_angle, 2.0 * PI / 5.0, max_relative = 1e-15);
        }
    }

    #[test]
    fn scaling_image_hand_values() {
        let (img, fac) = scaling_image(&spec(1.0, 1.0), 1.0);
        assert_eq!((img.m_squared, img.coupling, fac), (1.0, 1.0, 1.0));
        let (img, fac) = scaling_image(&spec(1.0, 1.0), 2.0);
        assert_eq!((img.m_squared, img.coupling, fac), (16.0, 32.0, 0.25));
    }

    #[test]
    fn scaling_composes_exactly_for_dyadic_factors() {
        // powers of two make every product exact, so composition is bitwise
        let base = spec(-3.0, 0.75);
        for &(s1, s2) in &[(0.5, 2.0), (2.0, 4.0), (0.25, 0.5)] {
            let (mid, f1) = scaling_image(&base, s1);
            let (fin, f2) = scaling_image(&mid, s2);
            let (direct, f12) = scaling_image(&base, s1 * s2);
            assert_eq!(fin, direct);
            assert_eq!(f1 * f2, f12);
        }
    }

    proptest! {
        /// Residual of the contour identity stays within an ε-scaled envelope
        /// across the whole parameter box.
        #[test]
        fn contour_identity_residual_is_roundoff(
            m2 in -5.0..5.0f64,
            f in 0.1..5.0f64,
            t in -10.0..10.0f64,
        ) {
            let sp = spec(m2, f);
            let delta = energy_shift(&sp).delta;
            let bound = 10.0 * EPS
                * (1.0 + m2.abs() * t * t + f * t.abs().powi(3) + delta);
            prop_assert!(contour_identity_residual(&sp, t) <= bound);
        }

        /// V(x) = conj(V(-conj(x))): the algebraic PT invariance of the
        /// potential, exact in floating point because every component product
        /// is reproduced with only sign flips.
        #[test]
        fn potential_is_pt_symmetric(
            m2 in -5.0..5.0f64,
            f in 0.1..5.0f64,
            re in -10.0..10.0f64,
            im in -10.0..10.0f64,
        ) {
            let sp = spec(m2, f);
            let x = Complex64::new(re, im);
            let lhs = potential(&sp, x);
            let rhs = potential(&sp, -x.conj()).conj();
            prop_assert_eq!(lhs, rhs);
        }

        /// Scaling transport composes multiplicatively (approximately for
        /// arbitrary real factors; exactly for dyadic ones, tested above).
        #[test]
        fn scaling_composes(s1 in 0.3..3.0f64, s2 in 0.3..3.0f64) {
            let base = spec(1.7, 0.9);
            let (mid, f1) = scaling_image(&base, s1);
            let (fin, f2) = scaling_image(&mid, s2);
            let (direct, f12) = scaling_image(&base, s1 * s2);
            prop_assert!((fin.m_squared - direct.m_squared).abs() <= 1e-12 * direct.m_squared.abs());
            prop_assert!((fin.coupling - direct.coupling).abs() <= 1e-12 * direct.coupling);
            prop_assert!((f1 * f2 - f12).abs() <= 1e-12 * f12);
        }

        /// Boundary angles are excluded no matter which 2π branch they
        /// arrive on.
        #[test]
        fn wedge_boundaries_excluded(k in -2i32..3) {
            let two_pi = 2.0 * PI;
            // exact dyadic multiples of the boundary constants are not
            // representable, so allow the test only on the canonical branch
            // (k = 0) for exactness and check the shifted branches against
            // points just inside/outside instead.
            if k == 0 {
                prop_assert!(!in_wedge(-3.0 * PI / 10.0, WedgeSide::Right));
                prop_assert!(!in_wedge(PI / 10.0, WedgeSide::Right));
                prop_assert!(!in_wedge(9.0 * PI / 10.0, WedgeSide::Left));
                prop_assert!(!in_wedge(13.0 * PI / 10.0, WedgeSide::Left));
            } else {
                let shift = k as f64 * two_pi;
                prop_assert!(in_wedge(shift + 0.0, WedgeSide::Right));
                prop_assert!(in_wedge(shift + PI, WedgeSide::Left));
                prop_assert!(!in_wedge(shift + PI / 2.0, WedgeSide::Right));
            }
        }
    }
}
