use serde::{Deserialize, Serialize};

use super::flags::{critical_quadratic, delta, subset_spec_of, Stratum};
use crate::error::{Error, Result};
use crate::family::ExtensionParams;
use crate::scalar::{powi, ComplexScalar, Tolerance};

/// Orbit function of the parametric subset containing `p`, or `None` when `p`
/// lies in a single-orbit subset or on a stratum where the function is undefined.
pub fn orbit_invariant(p: &ExtensionParams) -> Result<Option<ComplexScalar>> {
    orbit_invariant_with(p, &Tolerance::default())
}

pub fn orbit_invariant_with(p: &ExtensionParams, tol: &Tolerance) -> Result<Option<ComplexScalar>> {
    let (spec, f) = subset_spec_of(p, tol)?;
    if !spec.is_parametric() || f.stratum != Stratum::Generic {
        return Ok(None);
    }
    let t = spec.top.expect("parametric subsets have a chain top");
    let d = delta(p);
    let n = p.n;
    if n % 2 == 1 && t == n - 1 {
        let k = critical_quadratic(p);
        return Ok(Some(d * p.b * p.b / (k * k)));
    }
    let ratio = p.beta(t) / p.b11;
    let e = 2 * n as i32 - 4;
    let v = match (n, t) {
        // the one orbit function written with the reciprocal ratio
        (8, 4) => {
            if tol.is_zero(d, p.scale() * p.scale()) {
                return Ok(None);
            }
            powi(ratio, -4) / d
        }
        _ => powi(ratio, e) * powi(d, t as i32 - 1),
    };
    if !crate::scalar::is_finite(v) {
        return Err(Error::Inconsistent(format!("orbit function undefined at {p}")));
    }
    Ok(Some(v))
}

/// The orbit function exactly as printed for `U_9` of `CE(μ_7)`: `(b12/b11)^10·Δ³`.
/// It is not constant on orbits; `orbit_invariant` uses `(b12/b11)^10·Δ`.
pub fn printed_n7_u9_function(p: &ExtensionParams) -> ComplexScalar {
    powi(p.beta(2) / p.b11, 10) * delta(p).powu(3)
}

/// Invariant data reported alongside a classification.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvariantReport {
    pub delta: ComplexScalar,
    /// Is-zero verdict for every quantity the subset tree examined.
    pub flags: std::collections::BTreeMap<String, bool>,
    pub orbit_value: Option<ComplexScalar>,
    pub canonical_lambda: Option<ComplexScalar>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::real;

    fn p(n: usize, v: &[f64]) -> ExtensionParams {
        ExtensionParams::from_reals(n, v).unwrap()
    }

    #[test]
    fn printed_examples() {
        assert_eq!(orbit_invariant(&p(4, &[1.0, 0.0, 1.0, 1.0])).unwrap(), Some(real(-4.0)));
        let lam = 0.37;
        let v = orbit_invariant(&p(4, &[lam, 0.0, 1.0, 1.0])).unwrap().unwrap();
        assert!((v - real(-4.0 * lam)).norm() < 1e-15);
        let v = orbit_invariant(&p(8, &[1.0, 0.0, 1.0, 0.0, 1.0, 0.0])).unwrap().unwrap();
        assert!((v - real(-0.25)).norm() < 1e-15);
    }

    #[test]
    fn single_orbit_and_undefined() {
        assert_eq!(orbit_invariant(&p(4, &[1.0, 0.0, 1.0, 0.0])).unwrap(), None);
        assert_eq!(orbit_invariant(&p(5, &[0.0, 1.0, 0.5, 0.0, 1.0])).unwrap(), None);
        assert_eq!(orbit_invariant(&p(8, &[0.0, 0.0, 1.0, 0.0, 1.0, 0.0])).unwrap(), None);
    }
}
