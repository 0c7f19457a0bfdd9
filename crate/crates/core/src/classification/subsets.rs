use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::family::{chain_levels, check_n, ExtensionParams, MAX_N};
use crate::scalar::{ComplexScalar, ONE};

/// Condition on the `(b00, b01, b11)` block of a subset.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Block {
    /// `b11 ≠ 0` (only together with a nonzero chain top).
    B11,
    /// `b11 ≠ 0`, `Δ ≠ 0`, chain identically zero.
    B11DeltaNonzero,
    /// `b11 ≠ 0`, `Δ = 0`, chain identically zero.
    B11DeltaZero,
    /// `b11 = 0`, `b01 ≠ 0`.
    B01,
    /// `b11 = b01 = 0`, `b00 ≠ 0`.
    B00,
    /// `b11 = b01 = b00 = 0`.
    Zero,
}

/// Subset index `U_i` (1-based) within a fixed `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubsetId(pub usize);

impl fmt::Display for SubsetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "U_{}", self.0)
    }
}

impl std::str::FromStr for SubsetId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        s.strip_prefix("U_")
            .or_else(|| s.strip_prefix('U'))
            .and_then(|d| d.parse().ok())
            .filter(|&i| i >= 1)
            .map(SubsetId)
            .ok_or_else(|| Error::InvalidArgument(format!("bad subset id {s:?}")))
    }
}

impl Serialize for SubsetId {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SubsetId {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// One subset: the highest nonzero chain level and the block condition.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SubsetSpec {
    pub id: SubsetId,
    pub top: Option<usize>,
    pub block: Block,
}

impl SubsetSpec {
    /// Subsets carrying a continuous parameter.
    pub fn is_parametric(&self) -> bool {
        self.block == Block::B11 && self.top.is_some()
    }
}

use Block::*;

// Chain tops are written as level indices `t` of `β_t`; for odd n, `n−1` is the `b` level.
const N4: &[(Option<usize>, Block)] = &[
    (Some(2), B11),
    (None, B11DeltaNonzero),
    (None, B11DeltaZero),
    (Some(2), B01),
    (None, B01),
    (Some(2), B00),
    (None, B00),
    (Some(2), Zero),
    (None, Zero),
];

const N5: &[(Option<usize>, Block)] = &[
    (Some(4), B11),
    (Some(4), B01),
    (Some(4), B00),
    (Some(4), Zero),
    (Some(2), B11),
    (None, B11DeltaNonzero),
    (None, B11DeltaZero),
    (Some(2), B01),
    (None, B01),
    (Some(2), B00),
    (None, B00),
    (Some(2), Zero),
    (None, Zero),
];

const N6: &[(Option<usize>, Block)] = &[
    (Some(4), B11),
    (Some(2), B11),
    (None, B11DeltaNonzero),
    (None, B11DeltaZero),
    (Some(4), B01),
    (Some(2), B01),
    (None, B01),
    (Some(4), B00),
    (Some(2), B00),
    (None, B00),
    (Some(4), Zero),
    (Some(2), Zero),
    (None, Zero),
];

// n = 7 and n = 8 share the layout (top level 6 is `b` for n = 7, `b16` for n = 8).
const N78: &[(Option<usize>, Block)] = &[
    (Some(6), B11),
    (Some(6), B01),
    (Some(6), B00),
    (Some(6), Zero),
    (Some(4), B11),
    (Some(4), B01),
    (Some(4), B00),
    (Some(4), Zero),
    (Some(2), B11),
    (Some(2), B01),
    (Some(2), B00),
    (Some(2), Zero),
    (None, B11DeltaNonzero),
    (None, B11DeltaZero),
    (None, B01),
    (None, B00),
    (None, Zero),
];

/// All subsets of `CE(μ_n)` in their listed order.
pub fn subsets(n: usize) -> Result<Vec<SubsetSpec>> {
    check_n(n, MAX_N)?;
    let table = match n {
        4 => N4,
        5 => N5,
        6 => N6,
        _ => N78,
    };
    Ok(table
        .iter()
        .enumerate()
        .map(|(i, &(top, block))| SubsetSpec {
            id: SubsetId(i + 1),
            top,
            block,
        })
        .collect())
}

pub fn subset_spec(n: usize, id: SubsetId) -> Result<SubsetSpec> {
    subsets(n)?
        .into_iter()
        .find(|s| s.id == id)
        .ok_or_else(|| Error::InvalidArgument(format!("{id} is not a subset of CE(mu_{n})")))
}

pub fn find_subset(n: usize, top: Option<usize>, block: Block) -> Result<SubsetSpec> {
    subsets(n)?
        .into_iter()
        .find(|s| s.top == top && s.block == block)
        .ok_or_else(|| Error::Inconsistent(format!("no subset for top {top:?}, block {block:?} at n = {n}")))
}

/// The listed representative of a subset; `lambda` fills the `b00` slot of parametric subsets.
pub fn representative(n: usize, spec: &SubsetSpec, lambda: ComplexScalar) -> ExtensionParams {
    let mut p = ExtensionParams::zero(n);
    match spec.block {
        B11 => {
            p.b00 = lambda;
            p.b11 = ONE;
        }
        B11DeltaNonzero => {
            p.b00 = ONE;
            p.b11 = ONE;
        }
        B11DeltaZero => p.b11 = ONE,
        B01 => p.b01 = ONE,
        B00 => p.b00 = ONE,
        Zero => {}
    }
    if let Some(t) = spec.top {
        set_top_one(&mut p, t);
    }
    p
}

/// Sets the top chain coordinate to 1: `b_{1,t} = 1`, or `b = 1` on the odd top level.
pub fn set_top_one(p: &mut ExtensionParams, t: usize) {
    if p.n % 2 == 1 && t == p.n - 1 {
        p.b = ONE;
    } else {
        p.set_beta(t, ONE);
    }
}

/// `true` for the odd-`n` top level, whose coordinate is `b = −β_{n−1}`.
pub fn is_b_level(n: usize, t: usize) -> bool {
    n % 2 == 1 && t == n - 1
}

/// Levels strictly below `t`, descending.
pub fn levels_below(n: usize, t: usize) -> Vec<usize> {
    chain_levels(n).into_iter().filter(|&l| l < t).rev().collect()
}
