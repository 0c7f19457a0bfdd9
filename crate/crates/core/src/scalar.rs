//! The scalar field: double-precision complex numbers with an explicit
//! approximate-equality contract.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub type ComplexScalar = Complex64;

pub const ZERO: ComplexScalar = Complex64::new(0.0, 0.0);
pub const ONE: ComplexScalar = Complex64::new(1.0, 0.0);

/// Shorthand for a real-valued scalar.
#[inline]
pub fn real(x: f64) -> ComplexScalar {
    Complex64::new(x, 0.0)
}

#[inline]
pub fn is_finite(z: ComplexScalar) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// Mixed absolute/relative tolerance.
///
/// `a ≈ b` iff `|a − b| ≤ abs + rel·max(|a|, |b|)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { abs: 1e-12, rel: 1e-9 }
    }
}

impl Tolerance {
    pub const fn new(abs: f64, rel: f64) -> Self {
        Tolerance { abs, rel }
    }

    pub fn approx_eq(&self, a: ComplexScalar, b: ComplexScalar) -> bool {
        (a - b).norm() <= self.abs + self.rel * a.norm().max(b.norm())
    }

    /// Zero test against an externally supplied magnitude scale.
    pub fn is_zero(&self, v: ComplexScalar, scale: f64) -> bool {
        v.norm() <= self.abs + self.rel * scale
    }

    pub fn threshold(&self, scale: f64) -> f64 {
        self.abs + self.rel * scale
    }
}

/// Principal `k`-th root: argument taken in (−π, π] and divided by `k`.
pub fn principal_root(z: ComplexScalar, k: u32) -> ComplexScalar {
    assert!(k > 0, "root order must be positive");
    if z == ZERO {
        return ZERO;
    }
    if k == 1 {
        return z;
    }
    let (r, theta) = z.to_polar();
    Complex64::from_polar(r.powf(1.0 / k as f64), theta / k as f64)
}

/// Integer power with exact handling of negative exponents.
pub fn powi(z: ComplexScalar, e: i32) -> ComplexScalar {
    if e >= 0 {
        z.powu(e as u32)
    } else {
        ONE / z.powu((-e) as u32)
    }
}

/// Largest modulus in a slice (0 for an empty slice).
pub fn max_norm<'a, I: IntoIterator<Item = &'a ComplexScalar>>(values: I) -> f64 {
    values.into_iter().fold(0.0, |m, z| m.max(z.norm()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn approx_eq_contract() {
        let tol = Tolerance::default();
        assert!(tol.approx_eq(real(1.0), real(1.0 + 5e-10)));
        assert!(!tol.approx_eq(real(1.0), real(1.0 + 5e-9)));
        assert!(tol.approx_eq(ZERO, real(1e-13)));
        assert!(!tol.approx_eq(ZERO, real(1e-11)));
    }

    #[test]
    fn principal_root_branch() {
        assert_eq!(principal_root(ONE, 3), ONE);
        let r = principal_root(real(-4.0), 2);
        assert!((r - Complex64::new(0.0, 2.0)).norm() < 1e-15);
        // argument exactly π stays on the principal branch
        let r = principal_root(real(-1.0), 3);
        assert!((r.arg() - PI / 3.0).abs() < 1e-15);
        let z = Complex64::new(-0.3, -1.7);
        let r = principal_root(z, 5);
        assert!((r.powu(5) - z).norm() < 1e-14);
        assert!(r.arg() > -PI / 5.0 - 1e-15 && r.arg() <= PI / 5.0 + 1e-15);
    }

    #[test]
    fn negative_powers() {
        let z = Complex64::new(0.5, 0.25);
        assert!((powi(z, -3) * z.powu(3) - ONE).norm() < 1e-14);
        assert_eq!(powi(z, 0), ONE);
    }
}
