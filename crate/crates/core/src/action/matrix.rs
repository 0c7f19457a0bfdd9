use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::transform::{AdaptedTransform, ElementaryTransform};
use crate::algebra::{matrix_from_columns, Matrix, StructureTensor};
use crate::error::{Error, Result};
use crate::family::{build_table, check_n, even_len, random_params, random_scalar, ExtensionParams, MAX_BUILD_N};
use crate::scalar::{ComplexScalar, Tolerance, ZERO};

/// Columns `f(e_0), …, f(e_n)` generated from `f(e_0)`, `f(e_1)` by `f(e_{i+1}) = [f(e_i), f(e_0)]`.
pub fn generated_matrix(t: &StructureTensor, f0: &[ComplexScalar], f1: &[ComplexScalar]) -> Result<Matrix> {
    let d = t.dim();
    let mut cols = vec![f0.to_vec(), f1.to_vec()];
    for i in 1..d - 1 {
        let next = t.bracket(&cols[i], f0)?;
        cols.push(next);
    }
    Ok(matrix_from_columns(&cols))
}

/// Basis matrix of the adapted transform on `L(p)`; column `i` is `f(e_i)`.
pub fn adapted_matrix(t: &AdaptedTransform, p: &ExtensionParams) -> Result<Matrix> {
    if t.n != p.n {
        return Err(Error::DimensionMismatch { expected: p.n, got: t.n });
    }
    t.check_nondegenerate(p.b, &Tolerance::default())?;
    let table = build_table(p)?;
    let d = p.n + 1;
    let mut f0 = vec![ZERO; d];
    f0[0] = t.a0;
    f0[1] = t.a1;
    let mut f1 = vec![ZERO; d];
    f1[1..=t.b.len()].copy_from_slice(&t.b);
    generated_matrix(&table, &f0, &f1)
}

/// Shape tolerance used by [`read_params`].
pub const SHAPE_TOL: Tolerance = Tolerance::new(1e-12, 1e-7);

/// Recover parameters from a tensor in adapted-basis form.
pub fn read_params(t: &StructureTensor) -> Result<ExtensionParams> {
    read_params_with_tol(t, &SHAPE_TOL)
}

pub fn read_params_with_tol(t: &StructureTensor, tol: &Tolerance) -> Result<ExtensionParams> {
    let d = t.dim();
    if d < 5 {
        return Err(Error::InvalidArgument(format!("dimension {d} too small for CE(mu_n)")));
    }
    let n = d - 1;
    check_n(n, MAX_BUILD_N)?;
    let b_even = (1..=even_len(n)).map(|m| t.get(1, 2 * m, n)).collect();
    let b = if n % 2 == 1 { -t.get(1, n - 1, n) } else { ZERO };
    let p = ExtensionParams::new(n, t.get(0, 0, n), t.get(0, 1, n), t.get(1, 1, n), b_even, b)?;
    let offending = build_table(&p)?.differing_entries(t, tol);
    if offending.is_empty() {
        Ok(p)
    } else {
        Err(Error::Shape { offending })
    }
}

/// Largest parameter change produced by the tail generators `τ(a, k ≥ 2)` and
/// `σ(b, k ∈ {n−1, n})`, applied with full basis matrices to a random `L(p)`.
pub fn tail_triviality_residual(n: usize, seed: u64) -> Result<f64> {
    check_n(n, MAX_BUILD_N)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = random_params(n, None, rng.random())?;
    let table = build_table(&p)?;
    let mut gens: Vec<ElementaryTransform> = (2..=n)
        .map(|k| ElementaryTransform::Tau { a: random_scalar(&mut rng), k })
        .collect();
    gens.extend([n - 1, n].map(|k| ElementaryTransform::Sigma { b: random_scalar(&mut rng), k }));
    let mut worst = 0.0_f64;
    for g in &gens {
        worst = worst.max(elementary_change(&table, &p, g, n)?);
    }
    Ok(worst)
}

fn elementary_change(table: &StructureTensor, p: &ExtensionParams, g: &ElementaryTransform, n: usize) -> Result<f64> {
    let (f0, f1) = g.generators(n);
    let m = generated_matrix(table, &f0, &f1)?;
    let q = read_params(&table.change_basis(&m)?)?;
    Ok(q.max_rel_diff(p))
}

/// `true` iff every tail generator leaves the parameters unchanged (≤ 1e−9).
pub fn verify_tail_triviality(n: usize, seed: u64) -> bool {
    tail_triviality_residual(n, seed).is_ok_and(|r| r <= 1e-9)
}

/// Parameters after a single elementary transform, computed at full basis level.
pub fn act_elementary_full(g: &ElementaryTransform, p: &ExtensionParams) -> Result<ExtensionParams> {
    g.validate(p.n)?;
    let table = build_table(p)?;
    let (f0, f1) = g.generators(p.n);
    let m = generated_matrix(&table, &f0, &f1)?;
    read_params(&table.change_basis(&m)?)
}
