//! Subsets, invariants, canonical forms and isomorphism for `CE(μ_n)`, `n = 4..8`.

mod canonical;
mod flags;
mod invariants;
mod isomorphic;
mod newton;
mod subsets;

pub use canonical::{
    canonical_transform, canonicalize, canonicalize_with, classify, classify_with, stratum_representative,
    Classification, OrbitLabel, WitnessMethod, WITNESS_TOL,
};
pub use flags::{critical_linear, critical_quadratic, delta, flags, subset_of, subset_spec_of, Flags, Stratum};
pub use invariants::{orbit_invariant, orbit_invariant_with, printed_n7_u9_function, InvariantReport};
pub use isomorphic::{
    exceptional_orbits, isomorphic, isomorphic_with, lambda_symmetries, representatives, ExtraOrbit,
    IsomorphismResult, RepresentativeEntry, LAMBDA_TOL,
};
pub use newton::{solve_normalization, NewtonOptions};
pub use subsets::{
    find_subset, is_b_level, levels_below, representative, set_top_one, subset_spec, subsets, Block, SubsetId,
    SubsetSpec,
};
