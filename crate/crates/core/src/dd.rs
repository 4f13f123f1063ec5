//! Compensated (double-double) arithmetic used when plain `f64` residuals
//! are not accurate enough.
//!
//! A [`Dd`] value represents a real number as an unevaluated sum `hi + lo`
//! of two `f64`s with `|lo| <= ulp(hi)/2`, giving roughly 32 significant
//! decimal digits. This is fixed-precision compensated arithmetic (error-free
//! transformations plus one FMA per product), not arbitrary-precision: every
//! operation costs a small constant number of float ops.
//!
//! The eigenvalue refinement in the basis backend is the only consumer. The
//! spectra of strongly non-normal Hamiltonians have eigenvalue condition
//! numbers up to ~1e9, so a residual `M v - lambda v` formed in plain `f64`
//! loses every digit the refinement is trying to recover; forming it against
//! double-double matrix entries restores them.

/// Error-free sum: returns `(s, e)` with `s = fl(a + b)` and `a + b = s + e`
/// exactly. No assumption on the magnitudes of `a` and `b` (Knuth's version).
#[inline]
pub fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

/// Error-free sum assuming `|a| >= |b|` (or either is zero): cheaper than
/// [`two_sum`] by three flops.
#[inline]
pub fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let e = b - (s - a);
    (s, e)
}

/// Error-free product via FMA: returns `(p, e)` with `p = fl(a * b)` and
/// `a * b = p + e` exactly.
#[inline]
pub fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let e = a.mul_add(b, -p);
    (p, e)
}

/// A double-double real number: the unevaluated sum `hi + lo`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };

    /// Lift an `f64` exactly.
    #[inline]
    pub fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    /// Exact product of two `f64`s as a `Dd`.
    #[inline]
    pub fn from_prod(a: f64, b: f64) -> Dd {
        let (hi, lo) = two_prod(a, b);
        Dd { hi, lo }
    }

    /// Round to nearest `f64`.
    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }

    /// Accurate double-double addition (error bound ~2 ulps of the result).
    #[inline]
    pub fn add(self, other: Dd) -> Dd {
        let (s, mut e) = two_sum(self.hi, other.hi);
        let (t, te) = two_sum(self.lo, other.lo);
        e += t;
        let (s, mut e2) = quick_two_sum(s, e);
        e2 += te;
        let (hi, lo) = quick_two_sum(s, e2);
        Dd { hi, lo }
    }

    #[inline]
    pub fn add_f64(self, other: f64) -> Dd {
        let (s, mut e) = two_sum(self.hi, other);
        e += self.lo;
        let (hi, lo) = quick_two_sum(s, e);
        Dd { hi, lo }
    }

    #[inline]
    pub fn sub(self, other: Dd) -> Dd {
        self.add(other.neg())
    }

    #[inline]
    pub fn mul(self, other: Dd) -> Dd {
        let (p, mut e) = two_prod(self.hi, other.hi);
        e += self.hi * other.lo + self.lo * other.hi;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    #[inline]
    pub fn mul_f64(self, other: f64) -> Dd {
        let (p, mut e) = two_prod(self.hi, other);
        e = self.lo.mul_add(other, e);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    /// Long division: three quotient corrections give full double-double
    /// accuracy.
    #[inline]
    pub fn div(self, other: Dd) -> Dd {
        let q1 = self.hi / other.hi;
        let r = self.sub(other.mul_f64(q1));
        let q2 = r.hi / other.hi;
        let r = r.sub(other.mul_f64(q2));
        let q3 = r.hi / other.hi;
        let (s, e) = quick_two_sum(q1, q2);
        Dd { hi: s, lo: e }.add_f64(q3)
    }

    /// Square root by one Newton step on the `f64` seed; exact for zero.
    pub fn sqrt(self) -> Dd {
        if self.hi == 0.0 && self.lo == 0.0 {
            return Dd::ZERO;
        }
        let x = self.hi.sqrt();
        // r = (x + self/x) / 2, evaluated in double-double
        let r = Dd::from_f64(x).add(self.div(Dd::from_f64(x)));
        Dd { hi: 0.5 * r.hi, lo: 0.5 * r.lo }
    }

    /// `self^(3/2)`, i.e. `self * sqrt(self)`.
    pub fn powi32(self) -> Dd {
        self.mul(self.sqrt())
    }
}

/// A complex accumulator with double-double real and imaginary parts.
///
/// Supports exactly the operations the residual evaluation needs: start from
/// zero, add products of a double-double real coefficient with an `f64`
/// complex number (optionally rotated by `i`), and round to `Complex64` at
/// the end.
#[derive(Clone, Copy, Debug, Default)]
pub struct CDd {
    pub re: Dd,
    pub im: Dd,
}

impl CDd {
    pub const ZERO: CDd = CDd { re: Dd::ZERO, im: Dd::ZERO };

    /// Accumulate `coeff * (re + i im)` where `coeff` is a double-double real.
    #[inline]
    pub fn add_real_coeff(self, coeff: Dd, re: f64, im: f64) -> CDd {
        CDd {
            re: self.re.add(coeff.mul_f64(re)),
            im: self.im.add(coeff.mul_f64(im)),
        }
    }

    /// Accumulate `(i * coeff) * (re + i im)` where `coeff` is a double-double
    /// real, i.e. a purely imaginary matrix entry times a complex number.
    #[inline]
    pub fn add_imag_coeff(self, coeff: Dd, re: f64, im: f64) -> CDd {
        CDd {
            re: self.re.sub(coeff.mul_f64(im)),
            im: self.im.add(coeff.mul_f64(re)),
        }
    }

    /// Accumulate a full `f64` complex product `(ar + i ai)(br + i bi)`,
    /// with each partial product kept error-free.
    #[inline]
    pub fn add_c64_prod(self, ar: f64, ai: f64, br: f64, bi: f64) -> CDd {
        CDd {
            re: self
                .re
                .add(Dd::from_prod(ar, br))
                .sub(Dd::from_prod(ai, bi)),
            im: self
                .im
                .add(Dd::from_prod(ar, bi))
                .add(Dd::from_prod(ai, br)),
        }
    }

    #[inline]
    pub fn to_c64(self) -> num_complex::Complex64 {
        num_complex::Complex64::new(self.re.to_f64(), self.im.to_f64())
    }
}
