//! Numerical normalization: find an adapted transform sending `p` to a target
//! tuple by damped Gauss–Newton from seeded random starts.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::action::{act_on_params, AdaptedTransform};
use crate::error::{Error, Result};
use crate::family::{random_transform, ExtensionParams};
use crate::scalar::ComplexScalar;

#[derive(Clone, Debug)]
pub struct NewtonOptions {
    pub starts: usize,
    pub max_iter: usize,
    pub accept: f64,
    pub seed: u64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions {
            starts: 20,
            max_iter: 200,
            accept: 1e-10,
            seed: 0x5eed,
        }
    }
}

fn pack(t: &AdaptedTransform) -> DVector<ComplexScalar> {
    let mut v = vec![t.a0, t.a1];
    v.extend_from_slice(&t.b);
    DVector::from_vec(v)
}

fn unpack(n: usize, x: &DVector<ComplexScalar>) -> AdaptedTransform {
    AdaptedTransform {
        n,
        a0: x[0],
        a1: x[1],
        b: x.iter().skip(2).copied().collect(),
    }
}

/// Residual vector: image coordinates minus the goal, skipping `b00` when it is free.
fn residual(p: &ExtensionParams, goal: &[ComplexScalar], skip_b00: bool, x: &DVector<ComplexScalar>) -> Option<DVector<ComplexScalar>> {
    let img = act_on_params(&unpack(p.n, x), p).ok()?.to_tuple();
    let r: Vec<ComplexScalar> = img
        .iter()
        .zip(goal)
        .enumerate()
        .filter(|(i, _)| !(skip_b00 && *i == 0))
        .map(|(_, (a, b))| a - b)
        .collect();
    r.iter().all(|z| crate::scalar::is_finite(*z)).then(|| DVector::from_vec(r))
}

fn norm_inf(v: &DVector<ComplexScalar>) -> f64 {
    v.iter().fold(0.0, |m, z| m.max(z.norm()))
}

/// Central-difference Jacobian; the residual is holomorphic in the unknowns.
fn jacobian(
    p: &ExtensionParams,
    goal: &[ComplexScalar],
    skip_b00: bool,
    x: &DVector<ComplexScalar>,
    rows: usize,
) -> Option<DMatrix<ComplexScalar>> {
    let mut j = DMatrix::zeros(rows, x.len());
    for c in 0..x.len() {
        let h = 1e-6 * (1.0 + x[c].norm());
        let mut xp = x.clone();
        let mut xm = x.clone();
        xp[c] += h;
        xm[c] -= h;
        let d = (residual(p, goal, skip_b00, &xp)? - residual(p, goal, skip_b00, &xm)?) / ComplexScalar::new(2.0 * h, 0.0);
        j.set_column(c, &d);
    }
    Some(j)
}

/// Find `t` with `act_on_params(t, p) ≈ goal` (ignoring `b00` when `lambda_free`).
pub fn solve_normalization(
    p: &ExtensionParams,
    goal: &ExtensionParams,
    lambda_free: bool,
    opts: &NewtonOptions,
) -> Result<AdaptedTransform> {
    let n = p.n;
    let goal = goal.to_tuple();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut best = f64::INFINITY;
    for _ in 0..opts.starts {
        let mut x = pack(&random_transform(n, p.b, &mut rng));
        let Some(mut r) = residual(p, &goal, lambda_free, &x) else { continue };
        let mut rn = norm_inf(&r);
        for _ in 0..opts.max_iter {
            if rn <= opts.accept * 1e-2 {
                break;
            }
            let Some(j) = jacobian(p, &goal, lambda_free, &x, r.len()) else { break };
            let Ok(pinv) = j.pseudo_inverse(1e-12) else { break };
            let step = pinv * &r;
            let mut alpha = 1.0;
            let mut improved = false;
            for _ in 0..30 {
                let trial = &x - &step * ComplexScalar::new(alpha, 0.0);
                if let Some(rt) = residual(p, &goal, lambda_free, &trial) {
                    let rtn = norm_inf(&rt);
                    if rtn < rn {
                        x = trial;
                        r = rt;
                        rn = rtn;
                        improved = true;
                        break;
                    }
                }
                alpha *= 0.5;
            }
            if !improved {
                break;
            }
        }
        best = best.min(rn);
        if rn <= opts.accept {
            return Ok(unpack(n, &x));
        }
    }
    Err(Error::Canonicalization {
        subset: format!("CE(mu_{n})"),
        residual: best,
        attempts: opts.starts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classification::{subset_spec, SubsetId};
    use crate::family::random_params;

    #[test]
    fn reaches_single_orbit_representatives() {
        for (n, id) in [(4, 7), (6, 9), (7, 11), (8, 6), (5, 3)] {
            let spec = subset_spec(n, SubsetId(id)).unwrap();
            let p = random_params(n, Some(spec.id), 4).unwrap();
            let goal = crate::classification::representative(n, &spec, crate::scalar::ZERO);
            let t = solve_normalization(&p, &goal, false, &NewtonOptions::default()).unwrap();
            let img = act_on_params(&t, &p).unwrap();
            assert!(img.max_rel_diff(&goal) <= 1e-10, "n = {n}, U_{id}");
        }
    }

    #[test]
    fn parametric_slot_left_free() {
        let spec = subset_spec(6, SubsetId(2)).unwrap();
        let p = random_params(6, Some(spec.id), 9).unwrap();
        let goal = crate::classification::representative(6, &spec, crate::scalar::ZERO);
        let t = solve_normalization(&p, &goal, true, &NewtonOptions::default()).unwrap();
        let img = act_on_params(&t, &p).unwrap();
        let mut g = goal.clone();
        g.b00 = img.b00;
        assert!(img.max_rel_diff(&g) <= 1e-10);
    }

    #[test]
    fn unreachable_goal_reports_failure() {
        // b11 = 0 cannot be moved to b11 = 1
        let p = ExtensionParams::from_reals(4, &[1.0, 0.0, 0.0, 0.0]).unwrap();
        let goal = ExtensionParams::from_reals(4, &[0.0, 0.0, 1.0, 0.0]).unwrap();
        let opts = NewtonOptions { starts: 3, max_iter: 20, ..Default::default() };
        assert!(matches!(solve_normalization(&p, &goal, false, &opts), Err(Error::Canonicalization { .. })));
    }
}
