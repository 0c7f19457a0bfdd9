//! The adapted transformation group and its action on `CE(μ_n)`.

mod act;
mod matrix;
mod transform;

pub use act::{act_general, act_on_params, param_by_name, printed_equations, PrintedEquation};
pub use matrix::{
    act_elementary_full, adapted_matrix, generated_matrix, read_params, read_params_with_tol,
    tail_triviality_residual, verify_tail_triviality, SHAPE_TOL,
};
pub use transform::{
    compose_elementary, decompose, elementary_to_adapted, AdaptedTransform, ElementaryTransform,
};

use crate::error::Result;
use crate::family::{build_table, ExtensionParams};

/// The tensor-level route: `read_params(change_basis(build_table(p), adapted_matrix(t, p)))`.
pub fn act_via_tensor(t: &AdaptedTransform, p: &ExtensionParams) -> Result<ExtensionParams> {
    let m = adapted_matrix(t, p)?;
    read_params(&build_table(p)?.change_basis(&m)?)
}
