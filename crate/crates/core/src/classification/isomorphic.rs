use serde::{Deserialize, Serialize};

use super::canonical::{canonicalize_with, stratum_representative};
use super::flags::Stratum;
use super::subsets::{is_b_level, representative, subsets, SubsetId, SubsetSpec};
use crate::action::AdaptedTransform;
use crate::error::{Error, Result};
use crate::family::ExtensionParams;
use crate::scalar::{ComplexScalar, Tolerance, ONE, ZERO};

/// λ values closer than this (relative) are treated as equal.
pub const LAMBDA_TOL: Tolerance = Tolerance::new(1e-10, 1e-8);

/// Transforms fixing the representative shape of a parametric subset; each maps
/// `rep(λ)` to `rep(λ·factor)`. Includes the identity first.
///
/// For a chain top `t` with `b = 0`, `A0 = ζ` with `ζ^{t−1} = 1`, `A1 = 0`,
/// `B1 = ζ^{n−1}` sends `λ` to `λ/ζ^{2n−4}`.
pub fn lambda_symmetries(n: usize, spec: &SubsetSpec) -> Vec<(AdaptedTransform, ComplexScalar)> {
    let id = (AdaptedTransform::identity(n), ONE);
    let Some(t) = spec.top.filter(|_| spec.is_parametric()) else { return vec![id] };
    if is_b_level(n, t) {
        return vec![id];
    }
    let order = t as u32 - 1;
    let mut out = Vec::new();
    for j in 0..order {
        let zeta = ComplexScalar::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / order as f64);
        let factor = ONE / zeta.powu(2 * n as u32 - 4);
        if out.iter().any(|(_, f): &(AdaptedTransform, ComplexScalar)| (f - factor).norm() < 1e-12) {
            continue;
        }
        let tr = if j == 0 { AdaptedTransform::identity(n) } else { AdaptedTransform::basic(n, zeta, ZERO, zeta.powu(n as u32 - 1)) };
        out.push((tr, factor));
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsomorphismResult {
    pub isomorphic: bool,
    /// Maps `p` to `q` when isomorphic.
    pub witness: Option<AdaptedTransform>,
}

pub fn isomorphic(p: &ExtensionParams, q: &ExtensionParams) -> Result<IsomorphismResult> {
    isomorphic_with(p, q, &Tolerance::default())
}

pub fn isomorphic_with(p: &ExtensionParams, q: &ExtensionParams, tol: &Tolerance) -> Result<IsomorphismResult> {
    if p.n != q.n {
        return Err(Error::DimensionMismatch { expected: p.n, got: q.n });
    }
    let n = p.n;
    let lp = canonicalize_with(p, tol)?;
    let lq = canonicalize_with(q, tol)?;
    let no = Ok(IsomorphismResult { isomorphic: false, witness: None });
    if lp.subset != lq.subset || lp.stratum != lq.stratum {
        return no;
    }
    let spec = super::subsets::subset_spec(n, lp.subset)?;
    let bridge = match (lp.lambda, lq.lambda) {
        (Some(a), Some(b)) => {
            match lambda_symmetries(n, &spec)
                .into_iter()
                .find(|(_, f)| LAMBDA_TOL.approx_eq(a * f, b))
            {
                Some((t, _)) => t,
                None => return no,
            }
        }
        _ => AdaptedTransform::identity(n),
    };
    let witness = lp.witness.then(&bridge).then(&lq.witness.inverse());
    Ok(IsomorphismResult { isomorphic: true, witness: Some(witness) })
}

/// One row of the golden table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RepresentativeEntry {
    pub subset: SubsetId,
    /// For parametric subsets the `b00` slot holds λ and is shown as 0.
    pub representative: ExtensionParams,
    pub parametric: bool,
}

pub fn representatives(n: usize) -> Result<Vec<RepresentativeEntry>> {
    Ok(subsets(n)?
        .iter()
        .map(|s| RepresentativeEntry {
            subset: s.id,
            representative: representative(n, s, ZERO),
            parametric: s.is_parametric(),
        })
        .collect())
}

/// Orbits beyond the listed table: for odd `n`, parts of the subsets with top
/// coordinate `b` where the listed normal form cannot be reached.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtraOrbit {
    pub subset: SubsetId,
    pub stratum: Stratum,
    pub representative: ExtensionParams,
}

pub fn exceptional_orbits(n: usize) -> Result<Vec<ExtraOrbit>> {
    let mut out = Vec::new();
    for s in subsets(n)? {
        let Some(t) = s.top else { continue };
        if !is_b_level(n, t) {
            continue;
        }
        let strata: &[Stratum] = match s.block {
            super::subsets::Block::B11 => &[Stratum::CriticalDeltaNonzero, Stratum::CriticalDeltaZero],
            super::subsets::Block::B01 => &[Stratum::CriticalLinear],
            _ => &[],
        };
        for &st in strata {
            out.push(ExtraOrbit {
                subset: s.id,
                stratum: st,
                representative: stratum_representative(n, &s, st),
            });
        }
    }
    Ok(out)
}
