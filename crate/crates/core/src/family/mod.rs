//! The family `CE(μ_n)`: parameters, multiplication tables, constraint derivation
//! and seeded sampling.

mod build;
mod constraints;
mod params;
mod random;

pub use build::{build_mu, build_table, build_table_with_signs, pair_value};
pub use constraints::{
    pair_name, sign_table, solve_leibniz_constraints, ConstraintReport, Relation, SignTable, Term,
};
pub use params::{arity, chain_levels, check_n, even_len, ExtensionParams, MAX_BUILD_N, MAX_N, MIN_N};
pub use random::{random_params, random_scalar, random_transform, SampleWindow};
