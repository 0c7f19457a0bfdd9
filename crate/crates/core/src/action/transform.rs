use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::{check_n, MAX_BUILD_N};
use crate::scalar::{is_finite, ComplexScalar, Tolerance, ONE, ZERO};

/// Reduced adapted basis change:
/// `f(e_0) = A0·e_0 + A1·e_1`, `f(e_1) = B_1·e_1 + … + B_{n−2}·e_{n−2}`,
/// `f(e_{i+1}) = [f(e_i), f(e_0)]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TransformJson", into = "TransformJson")]
pub struct AdaptedTransform {
    pub n: usize,
    pub a0: ComplexScalar,
    pub a1: ComplexScalar,
    /// `B_1..B_{n−2}`.
    pub b: Vec<ComplexScalar>,
}

#[derive(Serialize, Deserialize)]
struct TransformJson {
    n: usize,
    #[serde(rename = "A0")]
    a0: ComplexScalar,
    #[serde(rename = "A1")]
    a1: ComplexScalar,
    #[serde(rename = "B")]
    b: Vec<ComplexScalar>,
}

impl TryFrom<TransformJson> for AdaptedTransform {
    type Error = Error;
    fn try_from(j: TransformJson) -> Result<Self> {
        AdaptedTransform::new(j.n, j.a0, j.a1, j.b)
    }
}

impl From<AdaptedTransform> for TransformJson {
    fn from(t: AdaptedTransform) -> Self {
        TransformJson {
            n: t.n,
            a0: t.a0,
            a1: t.a1,
            b: t.b,
        }
    }
}

impl AdaptedTransform {
    pub fn new(n: usize, a0: ComplexScalar, a1: ComplexScalar, b: Vec<ComplexScalar>) -> Result<Self> {
        check_n(n, MAX_BUILD_N)?;
        if b.len() != n - 2 {
            return Err(Error::InvalidArgument(format!(
                "B must have n-2 = {} entries, got {}",
                n - 2,
                b.len()
            )));
        }
        if !is_finite(a0) || !is_finite(a1) || !b.iter().all(|z| is_finite(*z)) {
            return Err(Error::NonFinite("adapted transform".into()));
        }
        Ok(AdaptedTransform { n, a0, a1, b })
    }

    pub fn identity(n: usize) -> Self {
        let mut b = vec![ZERO; n - 2];
        b[0] = ONE;
        AdaptedTransform { n, a0: ONE, a1: ZERO, b }
    }

    /// `(A0, A1, B_1)` with all higher `B_k = 0`.
    pub fn basic(n: usize, a0: ComplexScalar, a1: ComplexScalar, b1: ComplexScalar) -> Self {
        let mut t = Self::identity(n);
        t.a0 = a0;
        t.a1 = a1;
        t.b[0] = b1;
        t
    }

    #[inline]
    pub fn b1(&self) -> ComplexScalar {
        self.b[0]
    }

    /// `B_k` (1-based), zero outside `1..=n−2`.
    #[inline]
    pub fn bk(&self, k: usize) -> ComplexScalar {
        if k >= 1 && k <= self.b.len() {
            self.b[k - 1]
        } else {
            ZERO
        }
    }

    /// `A0 + A1·b`.
    pub fn d(&self, b: ComplexScalar) -> ComplexScalar {
        self.a0 + self.a1 * b
    }

    /// Rejects transforms with `A0·B1·(A0 + A1·b)` at or below `tol.abs`.
    pub fn check_nondegenerate(&self, b: ComplexScalar, tol: &Tolerance) -> Result<()> {
        for (name, v) in [("A0", self.a0), ("B1", self.b1()), ("A0 + A1*b", self.d(b))] {
            if v.norm() <= tol.abs {
                return Err(Error::DegenerateTransform(format!("{name} = {v} vanishes")));
            }
        }
        Ok(())
    }

    /// Apply `self` first, then `next` relative to the basis `self` produced.
    /// Terms that only feed parameter-trivial tails are dropped.
    pub fn then(&self, next: &AdaptedTransform) -> AdaptedTransform {
        assert_eq!(self.n, next.n, "transforms for different n");
        let m = self.n - 2;
        let mut b = vec![ZERO; m];
        let mut a0_pow = ONE;
        for j in 1..=m {
            let bj = next.bk(j) * a0_pow;
            if bj != ZERO {
                for k in 1..=m + 1 - j {
                    b[j + k - 2] += bj * self.bk(k);
                }
            }
            a0_pow *= self.a0;
        }
        AdaptedTransform {
            n: self.n,
            a0: next.a0 * self.a0,
            a1: next.a0 * self.a1 + next.a1 * self.b1(),
            b,
        }
    }

    /// The transform undoing `self` at parameter level.
    pub fn inverse(&self) -> AdaptedTransform {
        let m = self.n - 2;
        let mut g = vec![ZERO; m];
        g[0] = ONE / self.b1();
        for i in 2..=m {
            let mut s = ZERO;
            for j in 1..i {
                s += g[j - 1] * self.a0.powu(j as u32 - 1) * self.bk(i - j + 1);
            }
            g[i - 1] = -s / (self.a0.powu(i as u32 - 1) * self.b1());
        }
        AdaptedTransform {
            n: self.n,
            a0: ONE / self.a0,
            a1: -self.a1 / (self.a0 * self.b1()),
            b: g,
        }
    }

    pub fn max_rel_diff(&self, other: &AdaptedTransform) -> f64 {
        let a = std::iter::once(self.a0).chain([self.a1]).chain(self.b.iter().copied());
        let b = std::iter::once(other.a0).chain([other.a1]).chain(other.b.iter().copied());
        a.zip(b)
            .fold(0.0, |m, (x, y)| m.max((x - y).norm() / (1.0 + x.norm().max(y.norm()))))
    }
}

/// Generators of the adapted group.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ElementaryTransform {
    /// `f(e_0) = e_0`, `f(e_1) = e_1 + b·e_k`, `2 ≤ k ≤ n`.
    Sigma { b: ComplexScalar, k: usize },
    /// `f(e_0) = e_0 + a·e_k`, `f(e_1) = e_1`, `1 ≤ k ≤ n`.
    Tau { a: ComplexScalar, k: usize },
    /// `f(e_0) = a·e_0`, `f(e_1) = b·e_1`, `a, b ≠ 0`.
    Upsilon { a: ComplexScalar, b: ComplexScalar },
}

impl ElementaryTransform {
    pub fn validate(&self, n: usize) -> Result<()> {
        let ok = match *self {
            ElementaryTransform::Sigma { k, .. } => (2..=n).contains(&k),
            ElementaryTransform::Tau { k, .. } => (1..=n).contains(&k),
            ElementaryTransform::Upsilon { a, b } => a != ZERO && b != ZERO,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("invalid elementary transform {self:?} for n = {n}")))
        }
    }

    /// Coordinates of `f(e_0)` and `f(e_1)` on `e_0..e_n`, tails included.
    pub fn generators(&self, n: usize) -> (Vec<ComplexScalar>, Vec<ComplexScalar>) {
        let mut f0 = crate::algebra::unit(n + 1, 0);
        let mut f1 = crate::algebra::unit(n + 1, 1);
        match *self {
            ElementaryTransform::Sigma { b, k } => f1[k] += b,
            ElementaryTransform::Tau { a, k } => f0[k] += a,
            ElementaryTransform::Upsilon { a, b } => {
                f0[0] = a;
                f1[1] = b;
            }
        }
        (f0, f1)
    }
}

/// The reduced form of an elementary transform; tail generators map to the identity.
pub fn elementary_to_adapted(e: &ElementaryTransform, n: usize) -> Result<AdaptedTransform> {
    check_n(n, MAX_BUILD_N)?;
    e.validate(n)?;
    let mut t = AdaptedTransform::identity(n);
    match *e {
        ElementaryTransform::Sigma { b, k } if k <= n - 2 => t.b[k - 1] += b,
        ElementaryTransform::Tau { a, k: 1 } => t.a1 = a,
        ElementaryTransform::Upsilon { a, b } => {
            t.a0 = a;
            t.b[0] = b;
        }
        _ => {}
    }
    Ok(t)
}

/// Factor `t` into elementary transforms, listed in application order:
/// the `σ(c_k, k)` block, then `τ(A1/A0, 1)`, then `υ(A0, B1)`.
///
/// The `c_k` are peeled from `1 + Σ (B_k/B_1) x^{k−1}` by successive division by
/// `1 + c_k x^{k−1}`, so they equal `B_k/B_1` only while no cross terms fit (`n ≤ 5`).
pub fn decompose(t: &AdaptedTransform) -> Result<Vec<ElementaryTransform>> {
    if t.a0 == ZERO || t.b1() == ZERO {
        return Err(Error::DegenerateTransform("A0·B1 = 0".into()));
    }
    let m = t.n - 2;
    let mut poly: Vec<ComplexScalar> = t.b.iter().map(|v| v / t.b1()).collect();
    let mut out = Vec::new();
    for k in 2..=m {
        let c = poly[k - 1];
        if c != ZERO {
            out.push(ElementaryTransform::Sigma { b: c, k });
            // divide by (1 + c·x^{k−1}) modulo x^m
            let s = k - 1;
            for i in s..m {
                let sub = c * poly[i - s];
                poly[i] -= sub;
            }
        }
    }
    if t.a1 != ZERO {
        out.push(ElementaryTransform::Tau { a: t.a1 / t.a0, k: 1 });
    }
    out.push(ElementaryTransform::Upsilon { a: t.a0, b: t.b1() });
    Ok(out)
}

/// Compose elementary transforms given in application order.
pub fn compose_elementary(factors: &[ElementaryTransform], n: usize) -> Result<AdaptedTransform> {
    let mut acc = AdaptedTransform::identity(n);
    for e in factors {
        acc = acc.then(&elementary_to_adapted(e, n)?);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::real;

    fn sample(n: usize) -> AdaptedTransform {
        let b = (0..n - 2).map(|k| real(0.7 + 0.3 * k as f64)).collect();
        AdaptedTransform::new(n, real(1.3), real(-0.6), b).unwrap()
    }

    #[test]
    fn elementary_translation() {
        let u = elementary_to_adapted(&ElementaryTransform::Upsilon { a: real(2.0), b: real(3.0) }, 4).unwrap();
        assert_eq!(u, AdaptedTransform::basic(4, real(2.0), ZERO, real(3.0)));
        let s = elementary_to_adapted(&ElementaryTransform::Sigma { b: real(5.0), k: 2 }, 5).unwrap();
        assert_eq!(s.b, vec![ONE, real(5.0), ZERO]);
        let tail = elementary_to_adapted(&ElementaryTransform::Tau { a: real(1.0), k: 2 }, 4).unwrap();
        assert_eq!(tail, AdaptedTransform::identity(4));
        assert!(elementary_to_adapted(&ElementaryTransform::Sigma { b: ONE, k: 1 }, 4).is_err());
        assert!(elementary_to_adapted(&ElementaryTransform::Upsilon { a: ZERO, b: ONE }, 4).is_err());
    }

    #[test]
    fn inverse_composes_to_identity() {
        for n in 4..=8 {
            let t = sample(n);
            let id = AdaptedTransform::identity(n);
            assert!(t.then(&t.inverse()).max_rel_diff(&id) < 1e-13);
            assert!(t.inverse().then(&t).max_rel_diff(&id) < 1e-13);
        }
    }

    #[test]
    fn decomposition_recomposes() {
        for n in 4..=8 {
            let t = sample(n);
            let f = decompose(&t).unwrap();
            assert!(compose_elementary(&f, n).unwrap().max_rel_diff(&t) < 1e-13);
        }
    }

    #[test]
    fn wrong_b_length_rejected() {
        assert!(AdaptedTransform::new(4, ONE, ZERO, vec![ONE, ZERO, ZERO]).is_err());
        let s = r#"{"n":4,"A0":[1,0],"A1":[0,0],"B":[[1,0],[0,0]]}"#;
        let t: AdaptedTransform = serde_json::from_str(s).unwrap();
        assert_eq!(t, AdaptedTransform::identity(4));
    }
}
