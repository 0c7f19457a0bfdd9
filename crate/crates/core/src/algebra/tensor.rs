use nalgebra::DMatrix;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result, Triple};
use crate::scalar::{is_finite, ComplexScalar, Tolerance, ZERO};

pub type Matrix = DMatrix<ComplexScalar>;

/// Structure constants of a `dim`-dimensional algebra: `[e_i, e_j] = Σ_k γ^k_{ij} e_k`.
///
/// Stored densely, row-major in `(i, j, k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct StructureTensor {
    dim: usize,
    gamma: Vec<ComplexScalar>,
}

impl StructureTensor {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "algebra dimension must be positive");
        StructureTensor {
            dim,
            gamma: vec![ZERO; dim * dim * dim],
        }
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize, usize) -> ComplexScalar) -> Self {
        let mut t = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    t.gamma[(i * dim + j) * dim + k] = f(i, j, k);
                }
            }
        }
        t
    }

    /// Builds from a flat row-major vector, rejecting wrong shapes and non-finite entries.
    pub fn from_flat(dim: usize, gamma: Vec<ComplexScalar>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("dimension must be positive".into()));
        }
        if gamma.len() != dim * dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim * dim,
                got: gamma.len(),
            });
        }
        if !gamma.iter().all(|z| is_finite(*z)) {
            return Err(Error::NonFinite("structure tensor".into()));
        }
        Ok(StructureTensor { dim, gamma })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    fn idx(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.dim + j) * self.dim + k
    }

    /// `γ^k_{ij}`.
    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> ComplexScalar {
        self.gamma[self.idx(i, j, k)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, v: ComplexScalar) {
        let at = self.idx(i, j, k);
        self.gamma[at] = v;
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, k: usize, v: ComplexScalar) {
        let at = self.idx(i, j, k);
        self.gamma[at] += v;
    }

    pub fn entries(&self) -> &[ComplexScalar] {
        &self.gamma
    }

    pub fn max_abs(&self) -> f64 {
        crate::scalar::max_norm(&self.gamma)
    }

    /// The product `[e_i, e_j]` as a coefficient slice.
    #[inline]
    pub fn product(&self, i: usize, j: usize) -> &[ComplexScalar] {
        let start = self.idx(i, j, 0);
        &self.gamma[start..start + self.dim]
    }

    /// `[x, y] = Σ_{i,j} x_i y_j [e_i, e_j]`.
    pub fn bracket(&self, x: &[ComplexScalar], y: &[ComplexScalar]) -> Result<Vec<ComplexScalar>> {
        for v in [x, y] {
            if v.len() != self.dim {
                return Err(Error::DimensionMismatch {
                    expected: self.dim,
                    got: v.len(),
                });
            }
        }
        Ok(self.bracket_unchecked(x, y))
    }

    pub(crate) fn bracket_unchecked(&self, x: &[ComplexScalar], y: &[ComplexScalar]) -> Vec<ComplexScalar> {
        let d = self.dim;
        let mut out = vec![ZERO; d];
        for (i, &xi) in x.iter().enumerate() {
            if xi == ZERO {
                continue;
            }
            for (j, &yj) in y.iter().enumerate() {
                if yj == ZERO {
                    continue;
                }
                let w = xi * yj;
                for (o, &g) in out.iter_mut().zip(self.product(i, j)) {
                    *o += w * g;
                }
            }
        }
        out
    }

    /// Residual of the Leibniz identity `[x,[y,z]] = [[x,y],z] − [[x,z],y]`
    /// maximised over basis triples (∞-norm of the defect vector).
    pub fn leibniz_residual(&self) -> f64 {
        self.leibniz_defect().max
    }

    /// Like [`leibniz_residual`](Self::leibniz_residual) but also names the worst triple.
    pub fn leibniz_defect(&self) -> LeibnizDefect {
        let d = self.dim;
        let mut worst = LeibnizDefect { max: 0.0, triple: (0, 0, 0) };
        let mut acc = vec![ZERO; d];
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    acc.iter_mut().for_each(|a| *a = ZERO);
                    // [e_i, [e_j, e_k]]
                    for (l, &g) in self.product(j, k).iter().enumerate() {
                        if g != ZERO {
                            axpy(&mut acc, g, self.product(i, l));
                        }
                    }
                    // − [[e_i, e_j], e_k]
                    for (l, &g) in self.product(i, j).iter().enumerate() {
                        if g != ZERO {
                            axpy(&mut acc, -g, self.product(l, k));
                        }
                    }
                    // + [[e_i, e_k], e_j]
                    for (l, &g) in self.product(i, k).iter().enumerate() {
                        if g != ZERO {
                            axpy(&mut acc, g, self.product(l, j));
                        }
                    }
                    let m = acc.iter().fold(0.0_f64, |m, z| m.max(z.norm()));
                    if m > worst.max {
                        worst = LeibnizDefect { max: m, triple: (i, j, k) };
                    }
                }
            }
        }
        worst
    }

    /// Structure constants with respect to the basis formed by the columns of `g`:
    /// `γ'(e_i, e_j) = g⁻¹ [g e_i, g e_j]`.
    ///
    /// Composition: `change_basis(change_basis(t, g), h) = change_basis(t, g·h)`.
    /// `g` counts as singular when `|det g| ≤ 1e−12 · Π ‖column‖`.
    pub fn change_basis(&self, g: &Matrix) -> Result<StructureTensor> {
        let d = self.dim;
        if g.nrows() != d || g.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: g.nrows().max(g.ncols()),
            });
        }
        let tol = Tolerance::default();
        let lu = g.clone().lu();
        let det = lu.determinant();
        // |det| against the Hadamard bound, so uniformly small bases are not rejected
        let hadamard: f64 = g.column_iter().map(|c| c.norm()).product();
        if hadamard == 0.0 || det.norm() <= tol.abs * hadamard {
            return Err(Error::SingularMatrix { det: det.norm() });
        }
        let ginv = lu
            .try_inverse()
            .ok_or(Error::SingularMatrix { det: det.norm() })?;

        // t1[i][b][c] = Σ_a g[a][i] γ[a][b][c]
        let mut t1 = vec![ZERO; d * d * d];
        for a in 0..d {
            for i in 0..d {
                let w = g[(a, i)];
                if w == ZERO {
                    continue;
                }
                for bc in 0..d * d {
                    t1[i * d * d + bc] += w * self.gamma[a * d * d + bc];
                }
            }
        }
        // t2[i][j][c] = Σ_b g[b][j] t1[i][b][c]
        let mut t2 = vec![ZERO; d * d * d];
        for i in 0..d {
            for b in 0..d {
                for j in 0..d {
                    let w = g[(b, j)];
                    if w == ZERO {
                        continue;
                    }
                    for c in 0..d {
                        t2[(i * d + j) * d + c] += w * t1[(i * d + b) * d + c];
                    }
                }
            }
        }
        // γ'[i][j][k] = Σ_c ginv[k][c] t2[i][j][c]
        let mut out = vec![ZERO; d * d * d];
        for ij in 0..d * d {
            for k in 0..d {
                let mut s = ZERO;
                for c in 0..d {
                    s += ginv[(k, c)] * t2[ij * d + c];
                }
                out[ij * d + k] = s;
            }
        }
        StructureTensor::from_flat(d, out)
    }

    /// Entrywise maximum difference.
    pub fn max_diff(&self, other: &StructureTensor) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.gamma
            .iter()
            .zip(&other.gamma)
            .fold(0.0, |m, (a, b)| m.max((a - b).norm()))
    }

    /// Entries differing from `other` by more than `tol` (relative to the larger tensor scale).
    pub fn differing_entries(&self, other: &StructureTensor, tol: &Tolerance) -> Vec<Triple> {
        assert_eq!(self.dim, other.dim);
        let scale = self.max_abs().max(other.max_abs());
        let d = self.dim;
        let mut out = Vec::new();
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    if !tol.is_zero(self.get(i, j, k) - other.get(i, j, k), scale) {
                        out.push((i, j, k));
                    }
                }
            }
        }
        out
    }
}

#[inline]
fn axpy(acc: &mut [ComplexScalar], a: ComplexScalar, x: &[ComplexScalar]) {
    for (o, &v) in acc.iter_mut().zip(x) {
        *o += a * v;
    }
}

/// Worst Leibniz-identity defect over basis triples.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LeibnizDefect {
    pub max: f64,
    pub triple: Triple,
}

/// Unit coordinate vector.
pub fn unit(dim: usize, i: usize) -> Vec<ComplexScalar> {
    let mut v = vec![ZERO; dim];
    v[i] = crate::scalar::ONE;
    v
}

pub fn identity_matrix(dim: usize) -> Matrix {
    Matrix::identity(dim, dim)
}

/// Matrix whose columns are the given coordinate vectors.
pub fn matrix_from_columns(columns: &[Vec<ComplexScalar>]) -> Matrix {
    let d = columns.first().map_or(0, Vec::len);
    Matrix::from_fn(d, columns.len(), |r, c| columns[c][r])
}

#[derive(Serialize, Deserialize)]
struct TensorJson {
    dim: usize,
    gamma: Vec<Vec<Vec<ComplexScalar>>>,
}

impl Serialize for StructureTensor {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let d = self.dim;
        let gamma = (0..d)
            .map(|i| (0..d).map(|j| self.product(i, j).to_vec()).collect())
            .collect();
        TensorJson { dim: d, gamma }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for StructureTensor {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let raw = TensorJson::deserialize(de)?;
        let d = raw.dim;
        let shape_ok = raw.gamma.len() == d
            && raw
                .gamma
                .iter()
                .all(|row| row.len() == d && row.iter().all(|v| v.len() == d));
        if !shape_ok {
            return Err(D::Error::custom(format!("gamma must have shape {d}x{d}x{d}")));
        }
        let flat = raw.gamma.into_iter().flatten().flatten().collect();
        StructureTensor::from_flat(d, flat).map_err(D::Error::custom)
    }
}
