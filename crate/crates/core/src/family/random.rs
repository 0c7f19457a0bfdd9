use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::params::{check_n, ExtensionParams, MAX_N};
use crate::action::AdaptedTransform;
use crate::classification::{levels_below, subset_spec, Block, SubsetId};
use crate::error::Result;
use crate::scalar::ComplexScalar;

/// Magnitude window for sampled nonzero scalars.
#[derive(Clone, Copy, Debug)]
pub struct SampleWindow {
    pub min: f64,
    pub max: f64,
}

pub const WINDOW: SampleWindow = SampleWindow { min: 0.5, max: 2.0 };

/// Lower bound enforced on derived quantities (`Δ`, `A0 + A1·b`, …) by resampling.
const SEPARATION: f64 = 0.25;

/// Modulus uniform in `[0.5, 2]`, argument uniform.
pub fn random_scalar<R: Rng + ?Sized>(rng: &mut R) -> ComplexScalar {
    let r = rng.random_range(WINDOW.min..=WINDOW.max);
    let theta = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
    ComplexScalar::from_polar(r, theta)
}

/// Seeded parameters; with a subset, the subset's zero pattern is imposed exactly.
pub fn random_params(n: usize, subset: Option<SubsetId>, seed: u64) -> Result<ExtensionParams> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match subset {
        None => {
            check_n(n, super::params::MAX_BUILD_N)?;
            let values: Vec<ComplexScalar> = (0..super::params::arity(n)).map(|_| random_scalar(&mut rng)).collect();
            ExtensionParams::from_tuple(n, &values)
        }
        Some(id) => {
            check_n(n, MAX_N)?;
            let spec = subset_spec(n, id)?;
            loop {
                let p = sample_member(n, spec.top, spec.block, &mut rng);
                if well_separated(&p, spec.top, spec.block) {
                    return Ok(p);
                }
            }
        }
    }
}

fn sample_member<R: Rng + ?Sized>(n: usize, top: Option<usize>, block: Block, rng: &mut R) -> ExtensionParams {
    let mut p = ExtensionParams::zero(n);
    if let Some(t) = top {
        p.set_beta(t, random_scalar(rng));
        for l in levels_below(n, t) {
            p.set_beta(l, random_scalar(rng));
        }
    }
    match block {
        Block::B11 | Block::B11DeltaNonzero => {
            p.b11 = random_scalar(rng);
            p.b01 = random_scalar(rng);
            p.b00 = random_scalar(rng);
        }
        Block::B11DeltaZero => {
            p.b11 = random_scalar(rng);
            p.b01 = random_scalar(rng);
            p.b00 = p.b01 * p.b01 / (4.0 * p.b11);
        }
        Block::B01 => {
            p.b01 = random_scalar(rng);
            p.b00 = random_scalar(rng);
        }
        Block::B00 => p.b00 = random_scalar(rng),
        Block::Zero => {}
    }
    p
}

fn well_separated(p: &ExtensionParams, top: Option<usize>, block: Block) -> bool {
    let delta = p.b01 * p.b01 - 4.0 * p.b00 * p.b11;
    let odd_top = top.is_some_and(|t| crate::classification::is_b_level(p.n, t));
    match block {
        Block::B11 if odd_top => (p.b01 * p.b - 2.0 * p.b11).norm() >= SEPARATION && delta.norm() >= SEPARATION,
        Block::B11 | Block::B11DeltaNonzero => delta.norm() >= SEPARATION,
        Block::B01 if odd_top => (p.b01 - p.b00 * p.b).norm() >= SEPARATION,
        _ => true,
    }
}

/// Random adapted transform with entries in the sampling window and
/// `|A0 + A1·b| ≥ 0.25`.
pub fn random_transform<R: Rng + ?Sized>(n: usize, b: ComplexScalar, rng: &mut R) -> AdaptedTransform {
    loop {
        let a0 = random_scalar(rng);
        let a1 = random_scalar(rng);
        let bs: Vec<ComplexScalar> = (0..n - 2).map(|_| random_scalar(rng)).collect();
        if (a0 + a1 * b).norm() >= SEPARATION {
            return AdaptedTransform::new(n, a0, a1, bs).expect("sampled transform is well-formed");
        }
    }
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::classification::{delta, subset_of};
    use crate::scalar::ZERO;

    #[test]
    fn deterministic() {
        let a = random_params(6, Some(SubsetId(2)), 11).unwrap();
        let b = random_params(6, Some(SubsetId(2)), 11).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, random_params(6, Some(SubsetId(2)), 12).unwrap());
    }

    #[test]
    fn zero_subset_and_delta_zero() {
        assert_eq!(random_params(4, Some(SubsetId(9)), 3).unwrap(), ExtensionParams::zero(4));
        let p = random_params(4, Some(SubsetId(3)), 3).unwrap();
        assert!(p.b11 != ZERO && p.b_even[0] == ZERO);
        assert!(delta(&p).norm() < 1e-14);
    }

    #[test]
    fn members_land_in_their_subset() {
        for n in 4..=8 {
            for s in crate::classification::subsets(n).unwrap() {
                for seed in 0..5 {
                    let p = random_params(n, Some(s.id), seed).unwrap();
                    assert_eq!(subset_of(&p).unwrap(), s.id, "n = {n}, {p}");
                }
            }
        }
    }

    #[test]
    fn unknown_subset() {
        assert!(random_params(4, Some(SubsetId(12)), 0).is_err());
    }
}
