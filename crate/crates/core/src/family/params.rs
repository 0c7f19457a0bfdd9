use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{is_finite, max_norm, ComplexScalar, ZERO};

/// Smallest supported `n`.
pub const MIN_N: usize = 4;
/// Largest `n` with a shipped classification.
pub const MAX_N: usize = 8;
/// Largest `n` the construction and constraint solver accept.
pub const MAX_BUILD_N: usize = 9;

/// Free parameters of an element of `CE(μ_n)`, the `(n+1)`-dimensional algebra
/// on `e_0..e_n`.
///
/// `b_even[m]` holds `b_{1,2m+2}`; `b` is the antisymmetric coefficient of
/// `[e_i, e_{n−i}]` and vanishes for even `n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ParamsJson", into = "ParamsJson")]
pub struct ExtensionParams {
    pub n: usize,
    pub b00: ComplexScalar,
    pub b01: ComplexScalar,
    pub b11: ComplexScalar,
    pub b_even: Vec<ComplexScalar>,
    pub b: ComplexScalar,
}

#[derive(Serialize, Deserialize)]
struct ParamsJson {
    n: usize,
    b00: ComplexScalar,
    b01: ComplexScalar,
    b11: ComplexScalar,
    b_even: Vec<ComplexScalar>,
    #[serde(default)]
    b: ComplexScalar,
}

impl TryFrom<ParamsJson> for ExtensionParams {
    type Error = Error;
    fn try_from(j: ParamsJson) -> Result<Self> {
        ExtensionParams::new(j.n, j.b00, j.b01, j.b11, j.b_even, j.b)
    }
}

impl From<ExtensionParams> for ParamsJson {
    fn from(p: ExtensionParams) -> Self {
        ParamsJson {
            n: p.n,
            b00: p.b00,
            b01: p.b01,
            b11: p.b11,
            b_even: p.b_even,
            b: p.b,
        }
    }
}

/// Number of `b_{1,even}` parameters: `⌊(n−2)/2⌋`.
pub fn even_len(n: usize) -> usize {
    (n - 2) / 2
}

/// Number of free parameters of `CE(μ_n)`.
pub fn arity(n: usize) -> usize {
    3 + even_len(n) + n % 2
}

/// Indices `t` with a free chain value `β_t`, ascending: `2, 4, …` and, for odd `n`, `n−1`.
pub fn chain_levels(n: usize) -> Vec<usize> {
    let mut v: Vec<usize> = (1..=even_len(n)).map(|m| 2 * m).collect();
    if n % 2 == 1 {
        v.push(n - 1);
    }
    v
}

pub fn check_n(n: usize, max: usize) -> Result<()> {
    if (MIN_N..=max).contains(&n) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("n = {n} outside {MIN_N}..={max}")))
    }
}

impl ExtensionParams {
    pub fn new(
        n: usize,
        b00: ComplexScalar,
        b01: ComplexScalar,
        b11: ComplexScalar,
        b_even: Vec<ComplexScalar>,
        b: ComplexScalar,
    ) -> Result<Self> {
        let p = ExtensionParams { n, b00, b01, b11, b_even, b };
        p.validate()?;
        Ok(p)
    }

    pub fn zero(n: usize) -> Self {
        ExtensionParams {
            n,
            b00: ZERO,
            b01: ZERO,
            b11: ZERO,
            b_even: vec![ZERO; even_len(n)],
            b: ZERO,
        }
    }

    /// From the tuple `(b00, b01, b11, b_{1,2}, b_{1,4}, …[, b])`.
    pub fn from_tuple(n: usize, values: &[ComplexScalar]) -> Result<Self> {
        check_n(n, MAX_BUILD_N)?;
        if values.len() != arity(n) {
            return Err(Error::DimensionMismatch {
                expected: arity(n),
                got: values.len(),
            });
        }
        let m = even_len(n);
        let b = if n % 2 == 1 { values[3 + m] } else { ZERO };
        Self::new(n, values[0], values[1], values[2], values[3..3 + m].to_vec(), b)
    }

    /// Same as [`from_tuple`](Self::from_tuple) with real entries.
    pub fn from_reals(n: usize, values: &[f64]) -> Result<Self> {
        let v: Vec<ComplexScalar> = values.iter().map(|&x| crate::scalar::real(x)).collect();
        Self::from_tuple(n, &v)
    }

    pub fn to_tuple(&self) -> Vec<ComplexScalar> {
        let mut v = vec![self.b00, self.b01, self.b11];
        v.extend_from_slice(&self.b_even);
        if self.n % 2 == 1 {
            v.push(self.b);
        }
        v
    }

    /// Names matching [`to_tuple`](Self::to_tuple).
    pub fn names(n: usize) -> Vec<String> {
        let mut v = vec!["b00".to_string(), "b01".into(), "b11".into()];
        v.extend((1..=even_len(n)).map(|m| format!("b1{}", 2 * m)));
        if n % 2 == 1 {
            v.push("b".into());
        }
        v
    }

    pub fn validate(&self) -> Result<()> {
        check_n(self.n, MAX_BUILD_N)?;
        if self.b_even.len() != even_len(self.n) {
            return Err(Error::InvalidArgument(format!(
                "b_even must have {} entries for n = {}, got {}",
                even_len(self.n),
                self.n,
                self.b_even.len()
            )));
        }
        if self.n % 2 == 0 && self.b != ZERO {
            return Err(Error::InvalidArgument("b must be 0 for even n".into()));
        }
        if !self.to_tuple().into_iter().chain([self.b]).all(is_finite) {
            return Err(Error::NonFinite("extension parameters".into()));
        }
        Ok(())
    }

    /// Chain value `β_t = b_{1,t}`; for odd `n`, `β_{n−1} = −b`.
    pub fn beta(&self, t: usize) -> ComplexScalar {
        if t >= 2 && t % 2 == 0 && t <= self.n - 2 {
            self.b_even[t / 2 - 1]
        } else if t == self.n - 1 && self.n % 2 == 1 {
            -self.b
        } else {
            ZERO
        }
    }

    pub fn set_beta(&mut self, t: usize, v: ComplexScalar) {
        if t == self.n - 1 && self.n % 2 == 1 {
            self.b = -v;
        } else {
            assert!(t >= 2 && t % 2 == 0 && t <= self.n - 2, "no chain value at level {t}");
            self.b_even[t / 2 - 1] = v;
        }
    }

    /// `b_{1,t}` for even `t` (`t ≤ n−2`).
    pub fn b1(&self, t: usize) -> ComplexScalar {
        self.b_even[t / 2 - 1]
    }

    /// Largest parameter modulus.
    pub fn scale(&self) -> f64 {
        max_norm(&self.to_tuple())
    }

    /// Componentwise `|a − b| / (1 + max(|a|, |b|))`, maximised.
    pub fn max_rel_diff(&self, other: &ExtensionParams) -> f64 {
        assert_eq!(self.n, other.n);
        self.to_tuple()
            .iter()
            .zip(other.to_tuple())
            .fold(0.0, |m, (a, b)| m.max((a - b).norm() / (1.0 + a.norm().max(b.norm()))))
    }

    pub fn approx_eq(&self, other: &ExtensionParams, tol: f64) -> bool {
        self.n == other.n && self.max_rel_diff(other) <= tol
    }
}

impl std::fmt::Display for ExtensionParams {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "L(")?;
        for (i, z) in self.to_tuple().iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            if z.im == 0.0 {
                write!(f, "{}", z.re)?;
            } else {
                write!(f, "{}{:+}i", z.re, z.im)?;
            }
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{real, ONE};

    #[test]
    fn arity_per_n() {
        let got: Vec<usize> = (4..=8).map(arity).collect();
        assert_eq!(got, vec![4, 5, 5, 6, 6]);
        assert_eq!(chain_levels(7), vec![2, 4, 6]);
        assert_eq!(chain_levels(8), vec![2, 4, 6]);
    }

    #[test]
    fn tuple_round_trip() {
        let p = ExtensionParams::from_reals(7, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        assert_eq!(p.b, real(6.0));
        assert_eq!(p.beta(6), real(-6.0));
        assert_eq!(p.beta(4), real(5.0));
        assert_eq!(p.beta(3), ZERO);
        assert_eq!(ExtensionParams::from_tuple(7, &p.to_tuple()).unwrap(), p);
    }

    #[test]
    fn invariants_enforced() {
        assert!(ExtensionParams::new(4, ZERO, ZERO, ZERO, vec![], ZERO).is_err());
        assert!(ExtensionParams::new(6, ZERO, ZERO, ZERO, vec![ZERO, ZERO], ONE).is_err());
        assert!(ExtensionParams::new(3, ZERO, ZERO, ZERO, vec![], ZERO).is_err());
        let nan = crate::scalar::real(f64::NAN);
        assert!(ExtensionParams::new(4, nan, ZERO, ZERO, vec![ZERO], ZERO).is_err());
    }

    #[test]
    fn json_optional_b() {
        let s = r#"{"n":4,"b00":[1,0],"b01":[0,0],"b11":[1,0],"b_even":[[1,0]]}"#;
        let p: ExtensionParams = serde_json::from_str(s).unwrap();
        assert_eq!(p, ExtensionParams::from_reals(4, &[1.0, 0.0, 1.0, 1.0]).unwrap());
        let bad = r#"{"n":5,"b00":[1,0],"b01":[0,0],"b11":[1,0],"b_even":[]}"#;
        assert!(serde_json::from_str::<ExtensionParams>(bad).is_err());
    }
}
