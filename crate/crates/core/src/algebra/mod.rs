//! Finite-dimensional algebras given by structure constants.

mod series;
mod tensor;

pub use series::{column_span, is_filiform, lower_central_series, rank, SeriesProfile, RANK_TOL};
pub use tensor::{
    identity_matrix, matrix_from_columns, unit, LeibnizDefect, Matrix, StructureTensor,
};
