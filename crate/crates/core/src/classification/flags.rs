use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::subsets::{find_subset, is_b_level, Block, SubsetId, SubsetSpec};
use crate::error::Result;
use crate::family::{check_n, ExtensionParams, MAX_N};
use crate::scalar::{ComplexScalar, Tolerance};

/// Finer split inside the odd-`n` subsets whose top coordinate is `b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stratum {
    Generic,
    /// `b11 ≠ 0`, `b01·b = 2·b11`, `Δ ≠ 0`.
    CriticalDeltaNonzero,
    /// `b11 ≠ 0`, `b01·b = 2·b11`, `Δ = 0`.
    CriticalDeltaZero,
    /// `b11 = 0`, `b01 = b00·b`.
    CriticalLinear,
}

/// `Δ = b01² − 4·b00·b11`.
pub fn delta(p: &ExtensionParams) -> ComplexScalar {
    p.b01 * p.b01 - 4.0 * p.b00 * p.b11
}

/// `b01·b − 2·b11`, the denominator of the odd-`n` top-level orbit function.
pub fn critical_quadratic(p: &ExtensionParams) -> ComplexScalar {
    p.b01 * p.b - 2.0 * p.b11
}

/// `b01 − b00·b`.
pub fn critical_linear(p: &ExtensionParams) -> ComplexScalar {
    p.b01 - p.b00 * p.b
}

/// Zero/nonzero decisions driving the subset tree, with the smallest
/// relative distance of any consulted nonzero quantity from zero.
#[derive(Clone, Debug, PartialEq)]
pub struct Flags {
    pub top: Option<usize>,
    pub block: Block,
    pub stratum: Stratum,
    pub margin: f64,
    /// Every quantity examined, with its is-zero verdict.
    pub decisions: BTreeMap<String, bool>,
}

struct Judge<'a> {
    tol: &'a Tolerance,
    margin: f64,
    decisions: BTreeMap<String, bool>,
}

impl Judge<'_> {
    fn is_zero(&mut self, name: &str, v: ComplexScalar, scale: f64) -> bool {
        let z = scale == 0.0 || self.tol.is_zero(v, scale);
        if v.norm() > 0.0 && scale > 0.0 {
            self.margin = self.margin.min(v.norm() / scale);
        }
        self.decisions.insert(name.to_string(), z);
        z
    }
}

pub fn flags(p: &ExtensionParams, tol: &Tolerance) -> Result<Flags> {
    check_n(p.n, MAX_N)?;
    p.validate()?;
    let n = p.n;
    let scale = p.scale();
    let mut j = Judge { tol, margin: 1.0, decisions: BTreeMap::new() };

    let mut top = None;
    for t in crate::family::chain_levels(n).into_iter().rev() {
        let (name, v) = if is_b_level(n, t) { ("b".to_string(), p.b) } else { (format!("b1{t}"), p.beta(t)) };
        if !j.is_zero(&name, v, scale) {
            top = Some(t);
            break;
        }
    }
    let odd_top = top.is_some_and(|t| is_b_level(n, t));
    let mut stratum = Stratum::Generic;
    let block = if !j.is_zero("b11", p.b11, scale) {
        if top.is_some() {
            if odd_top {
                let k = critical_quadratic(p);
                let k_scale = (p.b01 * p.b).norm().max(2.0 * p.b11.norm());
                if j.is_zero("b01*b-2*b11", k, k_scale) {
                    let d = delta(p);
                    stratum = if j.is_zero("delta", d, delta_scale(p)) {
                        Stratum::CriticalDeltaZero
                    } else {
                        Stratum::CriticalDeltaNonzero
                    };
                }
            }
            Block::B11
        } else if j.is_zero("delta", delta(p), delta_scale(p)) {
            Block::B11DeltaZero
        } else {
            Block::B11DeltaNonzero
        }
    } else if !j.is_zero("b01", p.b01, scale) {
        if odd_top {
            let k2 = critical_linear(p);
            let k2_scale = p.b01.norm().max((p.b00 * p.b).norm());
            if j.is_zero("b01-b00*b", k2, k2_scale) {
                stratum = Stratum::CriticalLinear;
            }
        }
        Block::B01
    } else if !j.is_zero("b00", p.b00, scale) {
        Block::B00
    } else {
        Block::Zero
    };
    Ok(Flags {
        top,
        block,
        stratum,
        margin: j.margin,
        decisions: j.decisions,
    })
}

fn delta_scale(p: &ExtensionParams) -> f64 {
    (p.b01 * p.b01).norm().max(4.0 * (p.b00 * p.b11).norm())
}

pub fn subset_spec_of(p: &ExtensionParams, tol: &Tolerance) -> Result<(SubsetSpec, Flags)> {
    let f = flags(p, tol)?;
    Ok((find_subset(p.n, f.top, f.block)?, f))
}

/// The subset containing `p` under the default tolerance.
pub fn subset_of(p: &ExtensionParams) -> Result<SubsetId> {
    Ok(subset_spec_of(p, &Tolerance::default())?.0.id)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::real;

    fn p(n: usize, v: &[f64]) -> ExtensionParams {
        ExtensionParams::from_reals(n, v).unwrap()
    }

    #[test]
    fn delta_values() {
        assert_eq!(delta(&p(4, &[1.0, 0.0, 1.0, 0.0])), real(-4.0));
        assert_eq!(delta(&p(4, &[0.0; 4])), real(0.0));
        assert_eq!(delta(&p(4, &[1.0, 2.0, 1.0, 0.0])), real(0.0));
    }

    #[test]
    fn subset_examples() {
        assert_eq!(subset_of(&p(4, &[1.0, 0.0, 1.0, 1.0])).unwrap(), SubsetId(1));
        assert_eq!(subset_of(&p(4, &[0.0; 4])).unwrap(), SubsetId(9));
        assert_eq!(subset_of(&p(7, &[1.0, 0.0, 0.0, 0.3, 1.0, 0.0])).unwrap(), SubsetId(7));
        assert_eq!(subset_of(&p(5, &[0.0, 1.0, 0.0, 0.0, 1.0])).unwrap(), SubsetId(2));
        assert_eq!(subset_of(&p(5, &[0.0, 0.0, 0.0, 1.0, 0.0])).unwrap(), SubsetId(12));
    }

    #[test]
    fn strata_and_margin() {
        let f = flags(&p(5, &[0.0, 1.0, 0.5, 0.0, 1.0]), &Tolerance::default()).unwrap();
        assert_eq!(f.stratum, Stratum::CriticalDeltaNonzero);
        let f = flags(&p(5, &[0.5, 1.0, 0.5, 0.0, 1.0]), &Tolerance::default()).unwrap();
        assert_eq!(f.stratum, Stratum::CriticalDeltaZero);
        let f = flags(&p(7, &[1.0, 1.0, 0.0, 0.0, 0.0, 1.0]), &Tolerance::default()).unwrap();
        assert_eq!(f.stratum, Stratum::CriticalLinear);
        let f = flags(&p(4, &[1.0, 0.0, 1e-7, 0.0]), &Tolerance::default()).unwrap();
        assert_eq!(f.block, Block::B11DeltaNonzero);
        assert!(f.margin < 1e-6);
    }
}
