use serde::{Deserialize, Serialize};

use super::flags::{delta, subset_spec_of, Flags, Stratum};
use super::invariants::{orbit_invariant_with, InvariantReport};
use super::newton::{solve_normalization, NewtonOptions};
use super::subsets::{is_b_level, levels_below, representative, Block, SubsetId, SubsetSpec};
use crate::action::{act_on_params, AdaptedTransform};
use crate::error::{Error, Result};
use crate::family::ExtensionParams;
use crate::scalar::{principal_root, ComplexScalar, Tolerance, ONE, ZERO};

/// Largest relative distance between `witness·p` and the representative
/// accepted from the closed-form recipes before falling back to Newton.
pub const WITNESS_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessMethod {
    ClosedForm,
    Newton,
}

/// Result of canonicalization.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitLabel {
    pub n: usize,
    pub subset: SubsetId,
    pub stratum: Stratum,
    pub representative: ExtensionParams,
    pub lambda: Option<ComplexScalar>,
    pub witness: AdaptedTransform,
    pub orbit_value: Option<ComplexScalar>,
    pub delta: ComplexScalar,
    pub flag_margin: f64,
    pub witness_residual: f64,
    pub method: WitnessMethod,
}

/// An [`OrbitLabel`] with the invariant data that produced it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    #[serde(flatten)]
    pub label: OrbitLabel,
    pub invariants: InvariantReport,
}

/// Representative of an extra orbit inside a subset whose top coordinate is `b` (odd `n`).
pub fn stratum_representative(n: usize, spec: &SubsetSpec, stratum: Stratum) -> ExtensionParams {
    let mut p = representative(n, spec, ZERO);
    let half = crate::scalar::real(0.5);
    match stratum {
        Stratum::Generic => {}
        Stratum::CriticalDeltaNonzero => {
            p.b00 = ZERO;
            p.b01 = ONE;
            p.b11 = half;
        }
        Stratum::CriticalDeltaZero => {
            p.b00 = half;
            p.b01 = ONE;
            p.b11 = half;
        }
        Stratum::CriticalLinear => {
            p.b00 = ONE;
            p.b01 = ONE;
        }
    }
    p
}

/// Closed-form `(A0, A1, B1)` normalizing the top chain value and the quadratic block.
fn leading_transform(p: &ExtensionParams, spec: &SubsetSpec, stratum: Stratum) -> (ComplexScalar, ComplexScalar, ComplexScalar) {
    let n = p.n;
    let ni = n as u32;
    let (b00, b01, b11, b) = (p.b00, p.b01, p.b11, p.b);
    let d = delta(p);
    match spec.top {
        Some(t) if is_b_level(n, t) => match (spec.block, stratum) {
            (Block::B11, Stratum::Generic) => {
                let a0 = principal_root(b11 / b, ni - 2);
                let a1 = -a0 * b01 / (2.0 * b11);
                (a0, a1, (a0 + a1 * b) / b)
            }
            (Block::B11, Stratum::CriticalDeltaNonzero) => {
                let a0 = principal_root(b01, ni - 2);
                let a1 = a0 * (-b01 + d.sqrt()) / (b01 * b);
                (a0, a1, (a0 + a1 * b) / b)
            }
            (Block::B11, _) => {
                let a0 = principal_root(b01, ni - 2);
                (a0, ZERO, a0 / b)
            }
            (Block::B01, Stratum::CriticalLinear) => {
                let a0 = principal_root(b01, ni - 2);
                (a0, ZERO, a0 / b)
            }
            (Block::B01, _) => {
                let a0 = principal_root(b01 * b01 / (b01 - b00 * b), ni - 2);
                let a1 = -a0 * b00 / b01;
                (a0, a1, (a0 + a1 * b) / b)
            }
            (Block::B00, _) => {
                let a0 = principal_root(b00 * b, ni - 2);
                (a0, ZERO, a0 / b)
            }
            _ => (ONE, ZERO, ONE / b),
        },
        Some(t) => {
            let beta = p.beta(t);
            let ti = t as u32;
            match spec.block {
                Block::B11 => {
                    let a0 = principal_root(b11 / beta, ti - 1);
                    (a0, -a0 * b01 / (2.0 * b11), a0.powu(ni - 1) / b11)
                }
                Block::B01 => {
                    let a0 = principal_root(b01, ni - 2);
                    (a0, -a0 * b00 / b01, a0.powu(ni - ti) / beta)
                }
                Block::B00 => {
                    let a0 = principal_root(b00 * beta, 2 * ni - 3 - ti);
                    (a0, ZERO, crate::scalar::powi(a0, 3 - n as i32) * b00)
                }
                _ => (ONE, ZERO, ONE / beta),
            }
        }
        None => match spec.block {
            Block::B11DeltaNonzero => {
                let a0 = principal_root(-d / 4.0, 2 * ni - 4);
                (a0, -a0 * b01 / (2.0 * b11), a0.powu(ni - 1) / b11)
            }
            Block::B11DeltaZero => (ONE, -b01 / (2.0 * b11), ONE / b11),
            Block::B01 => {
                let a0 = principal_root(b01, ni - 2);
                (a0, -a0 * b00 / b01, ONE)
            }
            Block::B00 => (ONE, ZERO, b00),
            _ => (ONE, ZERO, ONE),
        },
    }
}

/// `c_s(B) = Σ_{k+l=s+2} (−1)^{k−1} B_k B_l`.
fn chain_coefficient(t: &AdaptedTransform, s: usize) -> ComplexScalar {
    (1..=s + 1)
        .map(|k| {
            let v = t.bk(k) * t.bk(s + 2 - k);
            if k % 2 == 1 {
                v
            } else {
                -v
            }
        })
        .sum()
}

/// Choose the odd `B_k` so that every chain value below the top vanishes.
fn clear_lower_levels(t: &mut AdaptedTransform, p: &ExtensionParams, top: usize) {
    let beta_top = p.beta(top);
    for m in levels_below(p.n, top) {
        let k = top - m + 1;
        let pm: ComplexScalar = (m..=top)
            .step_by(2)
            .map(|l| chain_coefficient(t, l - m) * p.beta(l))
            .sum();
        t.b[k - 1] = -pm / (2.0 * t.b1() * beta_top);
    }
}

/// Closed-form canonical transform for `p`.
pub fn canonical_transform(p: &ExtensionParams, spec: &SubsetSpec, stratum: Stratum) -> AdaptedTransform {
    let (a0, a1, b1) = leading_transform(p, spec, stratum);
    let mut t = AdaptedTransform::basic(p.n, a0, a1, b1);
    if let Some(top) = spec.top {
        clear_lower_levels(&mut t, p, top);
    }
    t
}

/// Target tuple for `p`: the representative, with the λ slot taken from `image` on parametric subsets.
fn target(n: usize, spec: &SubsetSpec, stratum: Stratum, image: &ExtensionParams) -> (ExtensionParams, Option<ComplexScalar>) {
    if spec.is_parametric() && stratum == Stratum::Generic {
        (representative(n, spec, image.b00), Some(image.b00))
    } else {
        (stratum_representative(n, spec, stratum), None)
    }
}

pub fn canonicalize(p: &ExtensionParams) -> Result<OrbitLabel> {
    canonicalize_with(p, &Tolerance::default())
}

pub fn canonicalize_with(p: &ExtensionParams, tol: &Tolerance) -> Result<OrbitLabel> {
    let (spec, flags) = subset_spec_of(p, tol)?;
    let n = p.n;
    let stratum = flags.stratum;
    let mut witness = canonical_transform(p, &spec, stratum);
    let mut method = WitnessMethod::ClosedForm;
    let mut outcome = act_on_params(&witness, p).ok().map(|img| {
        let (rep, lambda) = target(n, &spec, stratum, &img);
        (img.max_rel_diff(&rep), rep, lambda)
    });
    if outcome.as_ref().is_none_or(|o| o.0 > WITNESS_TOL) {
        let lambda_free = spec.is_parametric() && stratum == Stratum::Generic;
        let goal = stratum_representative(n, &spec, stratum);
        let sol = solve_normalization(p, &goal, lambda_free, &NewtonOptions::default())
            .map_err(|e| match e {
                Error::Canonicalization { residual, attempts, .. } => Error::Canonicalization {
                    subset: format!("{} of CE(mu_{n})", spec.id),
                    residual,
                    attempts,
                },
                other => other,
            })?;
        witness = sol;
        method = WitnessMethod::Newton;
        let img = act_on_params(&witness, p)?;
        let (rep, lambda) = target(n, &spec, stratum, &img);
        outcome = Some((img.max_rel_diff(&rep), rep, lambda));
    }
    let (residual, rep, lambda) = outcome.expect("set above");
    Ok(OrbitLabel {
        n,
        subset: spec.id,
        stratum,
        representative: rep,
        lambda,
        witness,
        orbit_value: orbit_invariant_with(p, tol)?,
        delta: delta(p),
        flag_margin: flags.margin,
        witness_residual: residual,
        method,
    })
}

pub fn classify(p: &ExtensionParams) -> Result<Classification> {
    classify_with(p, &Tolerance::default())
}

pub fn classify_with(p: &ExtensionParams, tol: &Tolerance) -> Result<Classification> {
    let label = canonicalize_with(p, tol)?;
    let flags: Flags = super::flags::flags(p, tol)?;
    let invariants = InvariantReport {
        delta: label.delta,
        flags: flags.decisions,
        orbit_value: label.orbit_value,
        canonical_lambda: label.lambda,
    };
    Ok(Classification { label, invariants })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::real;

    fn p(n: usize, v: &[f64]) -> ExtensionParams {
        ExtensionParams::from_reals(n, v).unwrap()
    }

    #[test]
    fn u1_examples_n4() {
        let l = canonicalize(&p(4, &[1.0, 0.0, 1.0, 1.0])).unwrap();
        assert_eq!(l.subset, SubsetId(1));
        assert!((l.lambda.unwrap() - ONE).norm() < 1e-14);
        assert!(l.witness.max_rel_diff(&AdaptedTransform::identity(4)) < 1e-15);
        let l = canonicalize(&p(4, &[0.0, 2.0, 1.0, 1.0])).unwrap();
        assert!((l.lambda.unwrap() - real(-1.0)).norm() < 1e-14);
        assert_eq!(l.representative, p(4, &[-1.0, 0.0, 1.0, 1.0]));
    }

    #[test]
    fn single_orbit_examples() {
        let l = canonicalize(&p(5, &[0.0, 1.0, 0.0, 0.0, 1.0])).unwrap();
        assert_eq!((l.subset, l.representative.clone()), (SubsetId(2), p(5, &[0.0, 1.0, 0.0, 0.0, 1.0])));
        let l = canonicalize(&p(6, &[0.0; 5])).unwrap();
        assert_eq!(l.subset, SubsetId(13));
        let l = canonicalize(&p(8, &[0.0, 1.0, 0.0, 1.0, 0.0, 0.0])).unwrap();
        assert_eq!(l.subset, SubsetId(10));
        assert_eq!(l.method, WitnessMethod::ClosedForm);
    }

    #[test]
    fn odd_critical_strata_reach_their_representatives() {
        for (v, s) in [
            ([0.3, 1.4, 0.7, 0.2, 1.0], Stratum::CriticalDeltaNonzero),
            ([0.7, 1.4, 0.7, -0.6, 1.0], Stratum::CriticalDeltaZero),
            ([0.7, 1.4, 0.0, 0.3, 2.0], Stratum::CriticalLinear),
        ] {
            let l = canonicalize(&p(5, &v)).unwrap();
            assert_eq!(l.stratum, s);
            assert!(l.witness_residual < 1e-12, "{s:?}: {}", l.witness_residual);
        }
    }
}
