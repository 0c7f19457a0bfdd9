use serde::{Deserialize, Serialize};

use super::tensor::{Matrix, StructureTensor};
use crate::scalar::ComplexScalar;

/// Relative singular-value cutoff used for numerical rank.
pub const RANK_TOL: f64 = 1e-8;

/// Dimensions of the lower central series: `dims[t] = dim L^{t+1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesProfile {
    pub dims: Vec<usize>,
}

/// Orthonormal basis (as columns) of the column span of `m`, using the
/// singular-value cutoff `RANK_TOL · σ_max`.
pub fn column_span(m: &Matrix) -> Matrix {
    column_span_with_floor(m, 0.0)
}

/// As [`column_span`], but singular values at or below `RANK_TOL · floor` are
/// also dropped, so round-off in an otherwise zero matrix has rank 0.
pub fn column_span_with_floor(m: &Matrix, floor: f64) -> Matrix {
    let rows = m.nrows();
    if m.ncols() == 0 || rows == 0 {
        return Matrix::zeros(rows, 0);
    }
    let svd = m.clone().svd(true, false);
    let sigma_max = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let cutoff = RANK_TOL * sigma_max.max(floor);
    if sigma_max <= cutoff {
        return Matrix::zeros(rows, 0);
    }
    let u = svd.u.expect("left singular vectors requested");
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > cutoff)
        .collect();
    Matrix::from_fn(rows, keep.len(), |r, c| u[(r, keep[c])])
}

pub fn rank(m: &Matrix) -> usize {
    column_span(m).ncols()
}

/// `L¹ = L`, `L^{k+1} = [L^k, L]`, iterated until the dimension stops changing.
pub fn lower_central_series(t: &StructureTensor) -> SeriesProfile {
    let d = t.dim();
    let mut dims = vec![d];
    let floor = t.max_abs();
    let mut basis = Matrix::identity(d, d);
    while basis.ncols() > 0 {
        let mut products: Vec<Vec<ComplexScalar>> = Vec::with_capacity(basis.ncols() * d);
        for c in 0..basis.ncols() {
            let v: Vec<ComplexScalar> = basis.column(c).iter().cloned().collect();
            for j in 0..d {
                products.push(t.bracket_unchecked(&v, &super::tensor::unit(d, j)));
            }
        }
        let next = column_span_with_floor(&super::tensor::matrix_from_columns(&products), floor);
        if next.ncols() == basis.ncols() {
            break;
        }
        dims.push(next.ncols());
        basis = next;
    }
    SeriesProfile { dims }
}

/// `dim L^i = d − i` for `2 ≤ i ≤ d`.
pub fn is_filiform(t: &StructureTensor) -> bool {
    let d = t.dim();
    let dims = lower_central_series(t).dims;
    d >= 2 && dims.len() > d - 1 && (2..=d).all(|i| dims[i - 1] == d - i)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ONE;

    fn graded_filiform(n: usize) -> StructureTensor {
        let mut t = StructureTensor::zeros(n + 1);
        for i in 1..n {
            t.set(i, 0, i + 1, ONE);
            if i >= 2 {
                t.set(0, i, i + 1, -ONE);
            } else {
                t.set(0, 1, 2, -ONE);
            }
        }
        t
    }

    #[test]
    fn abelian_series() {
        let t = StructureTensor::zeros(3);
        assert_eq!(lower_central_series(&t).dims, vec![3, 0]);
        assert!(!is_filiform(&t));
    }

    #[test]
    fn graded_filiform_series() {
        assert_eq!(lower_central_series(&graded_filiform(4)).dims, vec![5, 3, 2, 1, 0]);
        assert!(is_filiform(&graded_filiform(4)));
        assert_eq!(lower_central_series(&graded_filiform(6)).dims, vec![7, 5, 4, 3, 2, 1, 0]);
    }

    #[test]
    fn rank_threshold() {
        let m = Matrix::from_row_slice(2, 2, &[ONE, ONE, ONE, ONE + 1e-12]);
        assert_eq!(rank(&m), 1);
        assert_eq!(rank(&Matrix::zeros(2, 2)), 0);
    }
}
