//! Exact re-derivation of the parameter reduction: impose the Leibniz identity on
//! a general ansatz and solve the resulting linear system over ℚ.

use std::sync::OnceLock;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::params::{check_n, MAX_BUILD_N};
use crate::error::{Error, Result};

type Q = Ratio<i64>;

/// `s(i)` in `b_{i,j} = s(i)·b_{1,i+j−1}`; `signs[i]` for `i ≥ 1`, 0 where unused.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignTable {
    pub signs: Vec<i8>,
}

impl SignTable {
    pub fn sign(&self, i: usize) -> i8 {
        self.signs.get(i).copied().unwrap_or(0)
    }

    /// Copy with `s(i)` negated.
    pub fn flipped(&self, i: usize) -> SignTable {
        let mut t = self.clone();
        t.signs[i] = -t.signs[i];
        t
    }

    /// Indices `i ≥ 2` whose sign actually multiplies some free parameter.
    pub fn used(&self) -> Vec<usize> {
        (2..self.signs.len()).filter(|&i| self.signs[i] != 0).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
    pub coefficient: String,
    pub source: String,
}

/// `target = Σ coefficient·source` over the free parameters (empty sum means 0).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Relation {
    pub target: String,
    pub terms: Vec<Term>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintReport {
    pub n: usize,
    pub unknowns: Vec<String>,
    pub total_unknowns: usize,
    pub rank: usize,
    pub free_count: usize,
    pub free_parameters: Vec<String>,
    /// One vector per free parameter, over `unknowns`, rational entries as strings.
    pub free_basis: Vec<Vec<String>>,
    pub implied_relations: Vec<Relation>,
    pub sign_table: SignTable,
}

impl ConstraintReport {
    /// Coefficient of `source` in the relation for `target` (0 if absent).
    /// A free parameter relates to itself with coefficient 1.
    pub fn coefficient(&self, target: &str, source: &str) -> Option<Q> {
        if self.free_parameters.iter().any(|f| f == target) {
            return Some(if target == source { Q::from_integer(1) } else { Q::from_integer(0) });
        }
        let rel = self.implied_relations.iter().find(|r| r.target == target)?;
        Some(
            rel.terms
                .iter()
                .find(|t| t.source == source)
                .map_or(Q::from_integer(0), |t| t.coefficient.parse().expect("rational")),
        )
    }

    /// The unknown `b_{i,j}` expressed on the free parameters, with antisymmetry applied.
    pub fn pair_expression(&self, i: usize, j: usize) -> Vec<(Q, String)> {
        let (a, c, sgn) = if i < j { (i, j, 1) } else { (j, i, -1) };
        let name = pair_name(a, c);
        self.free_parameters
            .iter()
            .filter_map(|f| {
                let q = self.coefficient(&name, f)? * sgn;
                (q != Q::from_integer(0)).then(|| (q, f.clone()))
            })
            .collect()
    }
}

pub fn pair_name(i: usize, j: usize) -> String {
    format!("b_{{{i},{j}}}")
}

/// Ansatz unknowns: `b_{0,0}, b_{0,1}, b_{1,1}`, then `b_{i,j}` for `1 ≤ i < j ≤ n−1`.
fn unknowns(n: usize) -> Vec<(usize, usize)> {
    let mut v = vec![(0, 0), (0, 1), (1, 1)];
    for i in 1..n {
        for j in i + 1..n {
            v.push((i, j));
        }
    }
    v
}

/// Integer tensor of the ansatz at the unknown values `x`.
fn ansatz_tensor(n: usize, x: &[i64]) -> Vec<i64> {
    let d = n + 1;
    let mut g = vec![0i64; d * d * d];
    let at = |i: usize, j: usize, k: usize| (i * d + j) * d + k;
    for i in 1..n {
        g[at(i, 0, i + 1)] = 1;
        g[at(0, i, i + 1)] = -1;
    }
    for (a, &(i, j)) in unknowns(n).iter().enumerate() {
        g[at(i, j, n)] += x[a];
        if i != j && i >= 1 {
            g[at(j, i, n)] -= x[a];
        }
    }
    g
}

/// Leibniz defect `[e_i,[e_j,e_k]] − [[e_i,e_j],e_k] + [[e_i,e_k],e_j]`, all triples and components.
fn int_defect(d: usize, g: &[i64]) -> Vec<i64> {
    let at = |i: usize, j: usize, k: usize| (i * d + j) * d + k;
    let mut out = vec![0i64; d * d * d * d];
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                let row = ((i * d + j) * d + k) * d;
                for l in 0..d {
                    let (jk, ij, ik) = (g[at(j, k, l)], g[at(i, j, l)], g[at(i, k, l)]);
                    for c in 0..d {
                        out[row + c] += jk * g[at(i, l, c)] - ij * g[at(l, k, c)] + ik * g[at(l, j, c)];
                    }
                }
            }
        }
    }
    out
}

fn rref(rows: &mut [Vec<Q>], ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&k| rows[k][c] != Q::from_integer(0)) else {
            continue;
        };
        rows.swap(r, p);
        let inv = Q::from_integer(1) / rows[r][c];
        for v in rows[r].iter_mut() {
            *v *= inv;
        }
        for k in 0..rows.len() {
            if k != r && rows[k][c] != Q::from_integer(0) {
                let f = rows[k][c];
                for cc in 0..ncols {
                    let sub = f * rows[r][cc];
                    rows[k][cc] -= sub;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    pivots
}

fn solve(n: usize) -> Result<ConstraintReport> {
    let unk = unknowns(n);
    let names: Vec<String> = unk.iter().map(|&(i, j)| pair_name(i, j)).collect();
    let d = n + 1;
    let m = unk.len();

    let base = int_defect(d, &ansatz_tensor(n, &vec![0; m]));
    if base.iter().any(|&v| v != 0) {
        return Err(Error::Inconsistent("graded part violates the Leibniz identity".into()));
    }
    let columns: Vec<Vec<i64>> = (0..m)
        .map(|a| {
            let mut x = vec![0; m];
            x[a] = 1;
            int_defect(d, &ansatz_tensor(n, &x))
        })
        .collect();

    // Preferred free variables go last so elimination pivots on the others first.
    let preferred: Vec<usize> = (0..m)
        .filter(|&a| {
            let (i, j) = unk[a];
            i == 0 || (i, j) == (1, 1) || (i == 1 && j % 2 == 0)
        })
        .collect();
    let order: Vec<usize> = (0..m)
        .filter(|a| !preferred.contains(a))
        .chain(preferred.iter().copied())
        .collect();

    let nrows = columns[0].len();
    let mut rows: Vec<Vec<Q>> = (0..nrows)
        .filter(|&r| columns.iter().any(|c| c[r] != 0))
        .map(|r| order.iter().map(|&a| Q::from_integer(columns[a][r])).collect())
        .collect();
    let pivots = rref(&mut rows, m);
    let rank = pivots.len();
    let free_pos: Vec<usize> = (0..m).filter(|c| !pivots.contains(c)).collect();
    let free_parameters: Vec<String> = free_pos.iter().map(|&c| names[order[c]].clone()).collect();

    let mut implied_relations = Vec::new();
    let mut value_on_free: Vec<Vec<Q>> = vec![vec![Q::from_integer(0); free_pos.len()]; m];
    for (f, &c) in free_pos.iter().enumerate() {
        value_on_free[order[c]][f] = Q::from_integer(1);
    }
    for (r, &pc) in pivots.iter().enumerate() {
        let target = order[pc];
        let mut terms = Vec::new();
        for (f, &c) in free_pos.iter().enumerate() {
            let coef = -rows[r][c];
            value_on_free[target][f] = coef;
            if coef != Q::from_integer(0) {
                terms.push(Term {
                    coefficient: coef.to_string(),
                    source: names[order[c]].clone(),
                });
            }
        }
        implied_relations.push(Relation {
            target: names[target].clone(),
            terms,
        });
    }
    implied_relations.sort_by_key(|r| names.iter().position(|x| *x == r.target));

    let free_basis = (0..free_pos.len())
        .map(|f| value_on_free.iter().map(|row| row[f].to_string()).collect())
        .collect();

    let mut report = ConstraintReport {
        n,
        total_unknowns: m,
        rank,
        free_count: m - rank,
        unknowns: names,
        free_parameters,
        free_basis,
        implied_relations,
        sign_table: SignTable { signs: vec![] },
    };
    report.sign_table = extract_signs(&report)?;
    Ok(report)
}

fn extract_signs(report: &ConstraintReport) -> Result<SignTable> {
    let n = report.n;
    let mut signs = vec![0i8; n];
    if n > 1 {
        signs[1] = 1;
    }
    for i in 2..n {
        for j in i + 1..n {
            let expr = report.pair_expression(i, j);
            let src = pair_name(1, i + j - 1);
            let s = match expr.as_slice() {
                [] => continue,
                [(q, f)] if *f == src && (*q == Q::from_integer(1) || *q == Q::from_integer(-1)) => {
                    if *q > Q::from_integer(0) {
                        1
                    } else {
                        -1
                    }
                }
                _ => {
                    return Err(Error::Inconsistent(format!(
                        "{} is not a signed multiple of {src}",
                        pair_name(i, j)
                    )))
                }
            };
            if signs[i] != 0 && signs[i] != s {
                return Err(Error::Inconsistent(format!("sign of row {i} depends on the column")));
            }
            signs[i] = s;
        }
    }
    Ok(SignTable { signs })
}

/// Solve the Leibniz constraints of the general ansatz for `CE(μ_n)`, `4 ≤ n ≤ 9`.
/// Results are cached per `n`.
pub fn solve_leibniz_constraints(n: usize) -> Result<ConstraintReport> {
    check_n(n, MAX_BUILD_N)?;
    static CACHE: [OnceLock<std::result::Result<ConstraintReport, String>>; MAX_BUILD_N + 1] =
        [const { OnceLock::new() }; MAX_BUILD_N + 1];
    CACHE[n]
        .get_or_init(|| solve(n).map_err(|e| e.to_string()))
        .clone()
        .map_err(Error::Inconsistent)
}

/// The solver-determined sign table for `n`.
pub fn sign_table(n: usize) -> Result<SignTable> {
    Ok(solve_leibniz_constraints(n)?.sign_table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_counts() {
        let counts: Vec<usize> = (4..=8)
            .map(|n| solve_leibniz_constraints(n).unwrap().free_count)
            .collect();
        assert_eq!(counts, vec![4, 5, 5, 6, 6]);
    }

    #[test]
    fn free_parameters_are_the_chain() {
        let r = solve_leibniz_constraints(7).unwrap();
        assert_eq!(
            r.free_parameters,
            vec!["b_{0,0}", "b_{0,1}", "b_{1,1}", "b_{1,2}", "b_{1,4}", "b_{1,6}"]
        );
        assert_eq!(r.rank + r.free_count, r.total_unknowns);
    }

    #[test]
    fn signs_alternate_from_one() {
        let t = sign_table(8).unwrap();
        assert_eq!(t.sign(1), 1);
        assert_eq!(t.sign(2), -1);
        assert_eq!(t.sign(3), 1);
        assert_eq!(t.used(), vec![2, 3]);
        assert!(sign_table(4).unwrap().used().is_empty());
    }

    #[test]
    fn out_of_range() {
        assert!(solve_leibniz_constraints(3).is_err());
        assert!(solve_leibniz_constraints(10).is_err());
    }
}
