//! Closed-form action of adapted transforms on the parameters.

use super::transform::AdaptedTransform;
use crate::error::{Error, Result};
use crate::family::{even_len, ExtensionParams};
use crate::scalar::{ComplexScalar, Tolerance, ZERO};

/// `p' = t·p`, using the per-dimension systems for `n ≤ 8` and the general
/// formula beyond.
pub fn act_on_params(t: &AdaptedTransform, p: &ExtensionParams) -> Result<ExtensionParams> {
    prepare(t, p)?;
    match p.n {
        4..=8 => Ok(dimension_system(t, p)),
        _ => Ok(general_formula(t, p)),
    }
}

/// Same as [`act_on_params`] but always through the general double-sum formula.
pub fn act_general(t: &AdaptedTransform, p: &ExtensionParams) -> Result<ExtensionParams> {
    prepare(t, p)?;
    Ok(general_formula(t, p))
}

fn prepare(t: &AdaptedTransform, p: &ExtensionParams) -> Result<()> {
    if t.n != p.n {
        return Err(Error::DimensionMismatch { expected: p.n, got: t.n });
    }
    t.check_nondegenerate(p.b, &Tolerance::default())
}

/// The `(b00, b01, b11)` block, shared by every `n`.
fn quadratic_block(t: &AdaptedTransform, p: &ExtensionParams) -> (ComplexScalar, ComplexScalar, ComplexScalar) {
    let (a0, a1, b1) = (t.a0, t.a1, t.b1());
    let e = a0.powu(p.n as u32 - 2) * t.d(p.b);
    let q = a0 * a0 * p.b00 + a0 * a1 * p.b01 + a1 * a1 * p.b11;
    (q / (e * b1), (a0 * p.b01 + 2.0 * a1 * p.b11) / e, b1 * p.b11 / e)
}

fn dimension_system(t: &AdaptedTransform, p: &ExtensionParams) -> ExtensionParams {
    let (a0, b1) = (t.a0, t.b1());
    let bk = |k| t.bk(k);
    let d = t.d(p.b);
    let (b00, b01, b11) = quadratic_block(t, p);
    let mut out = ExtensionParams { b00, b01, b11, ..p.clone() };
    // c2 = 2B1B3 − B2², c4 = 2B1B5 − 2B2B4 + B3²
    let c2 = 2.0 * b1 * bk(3) - bk(2) * bk(2);
    let c4 = 2.0 * b1 * bk(5) - 2.0 * bk(2) * bk(4) + bk(3) * bk(3);
    match p.n {
        4 => {
            out.b_even[0] = b1 * p.b1(2) / (a0 * a0);
        }
        5 => {
            out.b_even[0] = (b1 * b1 * p.b1(2) - c2 * p.b) / (a0 * a0 * b1 * d);
            out.b = b1 * p.b / d;
        }
        6 => {
            out.b_even[0] = (b1 * b1 * p.b1(2) + c2 * p.b1(4)) / (a0.powu(4) * b1);
            out.b_even[1] = b1 * p.b1(4) / (a0 * a0);
        }
        7 => {
            out.b_even[0] = (b1 * b1 * p.b1(2) + c2 * p.b1(4) - c4 * p.b) / (a0.powu(4) * b1 * d);
            out.b_even[1] = (b1 * b1 * p.b1(4) - c2 * p.b) / (a0 * a0 * b1 * d);
            out.b = b1 * p.b / d;
        }
        8 => {
            out.b_even[0] = (b1 * b1 * p.b1(2) + c2 * p.b1(4) + c4 * p.b1(6)) / (a0.powu(6) * b1);
            out.b_even[1] = (b1 * b1 * p.b1(4) + c2 * p.b1(6)) / (a0.powu(4) * b1);
            out.b_even[2] = b1 * p.b1(6) / (a0 * a0);
        }
        _ => unreachable!("dimension systems exist for n = 4..8"),
    }
    out
}

/// `b'_{1,2j} = A0^{1+2j−n}/(B1·D)·( Σ_k Σ_{l=2j}^{n−k−1} (−1)^{k−1} B_k B_{l−2j+1} b_{1,k+l−1}
///              + Σ_{k=1}^{n−2} (−1)^k B_k B_{n−k−2j+1} b )`, with `B_i = 0` outside `1..=n−2`.
fn general_formula(t: &AdaptedTransform, p: &ExtensionParams) -> ExtensionParams {
    let n = p.n;
    let d = t.d(p.b);
    let (b00, b01, b11) = quadratic_block(t, p);
    let mut out = ExtensionParams { b00, b01, b11, ..p.clone() };
    let sign = |k: usize| if k % 2 == 1 { 1.0 } else { -1.0 };
    for j in 1..=even_len(n) {
        let m = 2 * j;
        let mut s = ZERO;
        for k in 1..n {
            for l in m..n.saturating_sub(k) {
                let idx = k + l - 1;
                let b1kl = if idx % 2 == 0 && idx <= n - 2 { p.b1(idx) } else { ZERO };
                s += sign(k) * t.bk(k) * t.bk(l + 1 - m) * b1kl;
            }
        }
        for k in 1..=n - 2 {
            if n + 1 >= k + m {
                s -= sign(k) * t.bk(k) * t.bk(n + 1 - k - m) * p.b;
            }
        }
        out.b_even[j - 1] = crate::scalar::powi(t.a0, 1 + m as i32 - n as i32) * s / (t.b1() * d);
    }
    out.b = t.b1() * p.b / d;
    out
}

/// One equation of the per-dimension systems in its printed form.
pub struct PrintedEquation {
    pub n: usize,
    /// Parameter the equation produces (`"b00"`, `"b12"`, …, `"b"`).
    pub target: &'static str,
    pub eval: fn(&AdaptedTransform, &ExtensionParams) -> ComplexScalar,
}

fn eq(n: usize, target: &'static str, eval: fn(&AdaptedTransform, &ExtensionParams) -> ComplexScalar) -> PrintedEquation {
    PrintedEquation { n, target, eval }
}

fn q(t: &AdaptedTransform, p: &ExtensionParams) -> ComplexScalar {
    t.a0 * t.a0 * p.b00 + t.a0 * t.a1 * p.b01 + t.a1 * t.a1 * p.b11
}

fn lin(t: &AdaptedTransform, p: &ExtensionParams) -> ComplexScalar {
    t.a0 * p.b01 + 2.0 * t.a1 * p.b11
}

/// The per-dimension systems exactly as printed, including the `n = 7` entries
/// whose printed form disagrees with the tensor action.
pub fn printed_equations() -> Vec<PrintedEquation> {
    vec![
        eq(4, "b00", |t, p| q(t, p) / (t.a0.powu(3) * t.b1())),
        eq(4, "b11", |t, p| t.b1() * p.b11 / t.a0.powu(3)),
        eq(4, "b01", |t, p| lin(t, p) / t.a0.powu(3)),
        eq(4, "b12", |t, p| t.b1() * p.b1(2) / t.a0.powu(2)),
        eq(5, "b00", |t, p| q(t, p) / (t.a0.powu(3) * t.b1() * t.d(p.b))),
        eq(5, "b01", |t, p| lin(t, p) / (t.a0.powu(3) * t.d(p.b))),
        eq(5, "b11", |t, p| t.b1() * p.b11 / (t.a0.powu(3) * t.d(p.b))),
        eq(5, "b12", |t, p| {
            let (b1, b2, b3) = (t.bk(1), t.bk(2), t.bk(3));
            (b1 * b1 * p.b1(2) + (-2.0 * b1 * b3 + b2 * b2) * p.b) / (t.a0.powu(2) * b1 * t.d(p.b))
        }),
        eq(5, "b", |t, p| t.b1() * p.b / t.d(p.b)),
        eq(6, "b00", |t, p| q(t, p) / (t.a0.powu(5) * t.b1())),
        eq(6, "b11", |t, p| t.b1() * p.b11 / t.a0.powu(5)),
        eq(6, "b01", |t, p| lin(t, p) / t.a0.powu(5)),
        eq(6, "b12", |t, p| {
            let (b1, b2, b3) = (t.bk(1), t.bk(2), t.bk(3));
            (b1 * b1 * p.b1(2) + (2.0 * b1 * b3 - b2 * b2) * p.b1(4)) / (t.a0.powu(4) * b1)
        }),
        eq(6, "b14", |t, p| t.b1() * p.b1(4) / t.a0.powu(2)),
        eq(7, "b00", |t, p| q(t, p) / (t.a0.powu(5) * t.b1() * t.d(p.b))),
        eq(7, "b01", |t, p| lin(t, p) / (t.a0.powu(5) * t.d(p.b))),
        eq(7, "b11", |t, p| t.b1() * p.b11 / (t.a0.powu(5) * t.d(p.b))),
        eq(7, "b12", |t, p| {
            let (b1, b2, b3, b4, b5) = (t.bk(1), t.bk(2), t.bk(3), t.bk(4), t.bk(5));
            (b1 * b1 * p.b1(2)
                + (2.0 * b1 * b3 - b2 * b2) * p.b1(4)
                + (2.0 * b2 * b4 - 2.0 * b1 * b5 - b3.powu(3)) * p.b)
                / (2.0 * t.a0.powu(4) * b1 * t.d(p.b))
        }),
        eq(7, "b14", |t, p| {
            let (b1, b2, b3) = (t.bk(1), t.bk(2), t.bk(3));
            (-b1 * p.b1(4) + (-2.0 * b1 * b3 + b2 * b2) * p.b) / (t.a0.powu(2) * b1 * t.d(p.b))
        }),
        // the printed bare `B` is read as B_1
        eq(7, "b", |t, p| t.b1() * p.b / t.d(p.b)),
        eq(8, "b00", |t, p| q(t, p) / (t.a0.powu(7) * t.b1())),
        eq(8, "b01", |t, p| lin(t, p) / t.a0.powu(7)),
        eq(8, "b11", |t, p| t.b1() * p.b11 / t.a0.powu(7)),
        eq(8, "b12", |t, p| {
            let (b1, b2, b3, b4, b5) = (t.bk(1), t.bk(2), t.bk(3), t.bk(4), t.bk(5));
            (b1 * b1 * p.b1(2)
                + (2.0 * b1 * b3 - b2 * b2) * p.b1(4)
                + (2.0 * b1 * b5 - 2.0 * b2 * b4 + b3 * b3) * p.b1(6))
                / (t.a0.powu(6) * b1)
        }),
        eq(8, "b14", |t, p| {
            let (b1, b2, b3) = (t.bk(1), t.bk(2), t.bk(3));
            (b1 * b1 * p.b1(4) + (2.0 * b1 * b3 - b2 * b2) * p.b1(6)) / (t.a0.powu(4) * b1)
        }),
        eq(8, "b16", |t, p| t.b1() * p.b1(6) / t.a0.powu(2)),
    ]
}

/// Value of the named parameter (`"b00"`, `"b1<t>"`, `"b"`).
pub fn param_by_name(p: &ExtensionParams, name: &str) -> Option<ComplexScalar> {
    match name {
        "b00" => Some(p.b00),
        "b01" => Some(p.b01),
        "b11" => Some(p.b11),
        "b" => Some(p.b),
        _ => {
            let t: usize = name.strip_prefix("b1")?.parse().ok()?;
            (t % 2 == 0 && t >= 2 && t <= p.n - 2).then(|| p.b1(t))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{real, ONE};

    #[test]
    fn upsilon_on_b11() {
        let (a, b) = (real(1.5), real(0.7));
        let p = ExtensionParams::from_reals(4, &[0.0, 0.0, 1.0, 0.0]).unwrap();
        let q = act_on_params(&AdaptedTransform::basic(4, a, ZERO, b), &p).unwrap();
        let want = ExtensionParams::from_tuple(4, &[ZERO, ZERO, b / a.powu(3), ZERO]).unwrap();
        assert!(q.max_rel_diff(&want) < 1e-15);
    }

    #[test]
    fn identity_fixes_params() {
        let p = ExtensionParams::from_reals(7, &[0.2, 0.5, 0.7, 1.1, -0.4, 0.8]).unwrap();
        let q = act_on_params(&AdaptedTransform::identity(7), &p).unwrap();
        assert_eq!(q, p);
    }

    #[test]
    fn general_matches_dimension_systems() {
        for n in 4..=8 {
            let tuple: Vec<f64> = (0..crate::family::arity(n)).map(|i| 0.3 + 0.17 * i as f64).collect();
            let p = ExtensionParams::from_reals(n, &tuple).unwrap();
            let b = (0..n - 2).map(|k| real(0.8 - 0.21 * k as f64)).collect();
            let t = AdaptedTransform::new(n, real(1.1), real(0.4), b).unwrap();
            let a = act_on_params(&t, &p).unwrap();
            let g = act_general(&t, &p).unwrap();
            assert!(a.max_rel_diff(&g) < 1e-13, "n = {n}");
        }
    }

    #[test]
    fn mismatched_n() {
        let p = ExtensionParams::zero(5);
        assert!(act_on_params(&AdaptedTransform::identity(4), &p).is_err());
        let _ = ONE;
    }
}
