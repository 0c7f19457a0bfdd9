use super::constraints::{sign_table, SignTable};
use super::params::ExtensionParams;
use crate::algebra::StructureTensor;
use crate::error::{Error, Result};
use crate::scalar::{ComplexScalar, ONE};

/// The graded filiform Lie algebra on `e_0..e_n`: `[e_i, e_0] = e_{i+1} = −[e_0, e_i]`, `1 ≤ i ≤ n−1`.
pub fn build_mu(n: usize) -> Result<StructureTensor> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("build_mu needs n >= 2, got {n}")));
    }
    let mut t = StructureTensor::zeros(n + 1);
    for i in 1..n {
        t.set(i, 0, i + 1, ONE);
        t.set(0, i, i + 1, -ONE);
    }
    Ok(t)
}

/// Multiplication table of `L(p)` with the solver's sign table.
pub fn build_table(p: &ExtensionParams) -> Result<StructureTensor> {
    p.validate()?;
    let signs = sign_table(p.n)?;
    Ok(table_with_signs(p, &signs))
}

/// Multiplication table with an explicit sign table (used to test sign sensitivity).
pub fn build_table_with_signs(p: &ExtensionParams, signs: &SignTable) -> Result<StructureTensor> {
    p.validate()?;
    Ok(table_with_signs(p, signs))
}

fn table_with_signs(p: &ExtensionParams, signs: &SignTable) -> StructureTensor {
    let n = p.n;
    let mut t = StructureTensor::zeros(n + 1);
    for i in 1..n {
        t.set(i, 0, i + 1, ONE);
        t.set(0, i, i + 1, -ONE);
    }
    t.set(0, 0, n, p.b00);
    t.set(0, 1, n, p.b01);
    t.set(1, 1, n, p.b11);
    for i in 1..n {
        for j in i + 1..n {
            let v = pair_value(p, signs, i, j);
            t.set(i, j, n, v);
            t.set(j, i, n, -v);
        }
    }
    t
}

/// `b_{i,j} = s(i)·β_{i+j−1}` for `1 ≤ i < j ≤ n−1`.
pub fn pair_value(p: &ExtensionParams, signs: &SignTable, i: usize, j: usize) -> ComplexScalar {
    let beta = p.beta(i + j - 1);
    if beta == crate::scalar::ZERO {
        return beta;
    }
    beta * f64::from(signs.sign(i))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{lower_central_series, unit};
    use crate::scalar::{real, ZERO};

    #[test]
    fn mu_is_lie() {
        for n in 4..=8 {
            let t = build_mu(n).unwrap();
            assert_eq!(t.leibniz_residual(), 0.0);
        }
        let t = build_mu(4).unwrap();
        assert_eq!(t.bracket(&unit(5, 1), &unit(5, 0)).unwrap(), unit(5, 2));
        assert_eq!(lower_central_series(&build_mu(6).unwrap()).dims, vec![7, 5, 4, 3, 2, 1, 0]);
        assert!(build_mu(1).is_err());
    }

    #[test]
    fn small_tables() {
        let p = ExtensionParams::from_reals(4, &[0.0, 0.0, 1.0, 1.0]).unwrap();
        let t = build_table(&p).unwrap();
        assert_eq!(t.get(1, 1, 4), ONE);
        assert_eq!(t.get(1, 2, 4), ONE);
        assert_eq!(t.get(2, 1, 4), -ONE);
        assert_eq!(t.get(2, 3, 4), ZERO);
        assert_eq!(t.bracket(&unit(5, 1), &unit(5, 1)).unwrap(), unit(5, 4));

        let p = ExtensionParams::from_reals(5, &[0.0, 0.0, 0.0, 0.0, 1.0]).unwrap();
        let t = build_table(&p).unwrap();
        assert_eq!(t.get(1, 4, 5), real(-1.0));
        assert_eq!(t.get(2, 3, 5), ONE);
        assert_eq!(t.get(3, 2, 5), real(-1.0));
        assert_eq!(t.leibniz_residual(), 0.0);
    }
}
