//! Reproduction suite: every structural result about the family as a seeded
//! numeric check, assembled into a deterministic report.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::action::{
    act_elementary_full, act_general, act_on_params, act_via_tensor, adapted_matrix, compose_elementary, decompose,
    param_by_name, printed_equations, read_params, tail_triviality_residual, AdaptedTransform, ElementaryTransform,
};
use crate::algebra::is_filiform;
use crate::classification::{
    canonicalize, classify, exceptional_orbits, isomorphic, lambda_symmetries, orbit_invariant, printed_n7_u9_function,
    representative, subset_of, subset_spec, subsets, SubsetId, SubsetSpec, Stratum,
};
use crate::error::{Error, Result, Triple};
use crate::family::{
    build_table, build_table_with_signs, random_params, random_scalar, random_transform, solve_leibniz_constraints,
    ExtensionParams, SignTable, MAX_N, MIN_N,
};
use crate::scalar::{principal_root, ComplexScalar, ONE, ZERO};

/// Every check id the suite must produce, sorted.
pub const MANIFEST: &[&str] = &[
    "adapted-form/n=4",
    "adapted-form/n=5",
    "adapted-form/n=6",
    "adapted-form/n=7",
    "adapted-form/n=8",
    "canonical/n=4/U_1",
    "canonical/n=4/U_2",
    "canonical/n=4/U_3",
    "canonical/n=4/U_4",
    "canonical/n=4/U_5",
    "canonical/n=4/U_6",
    "canonical/n=4/U_7",
    "canonical/n=4/U_8",
    "canonical/n=4/U_9",
    "canonical/n=5/U_1",
    "canonical/n=5/U_10",
    "canonical/n=5/U_11",
    "canonical/n=5/U_12",
    "canonical/n=5/U_13",
    "canonical/n=5/U_2",
    "canonical/n=5/U_3",
    "canonical/n=5/U_4",
    "canonical/n=5/U_5",
    "canonical/n=5/U_6",
    "canonical/n=5/U_7",
    "canonical/n=5/U_8",
    "canonical/n=5/U_9",
    "canonical/n=6/U_1",
    "canonical/n=6/U_10",
    "canonical/n=6/U_11",
    "canonical/n=6/U_12",
    "canonical/n=6/U_13",
    "canonical/n=6/U_2",
    "canonical/n=6/U_3",
    "canonical/n=6/U_4",
    "canonical/n=6/U_5",
    "canonical/n=6/U_6",
    "canonical/n=6/U_7",
    "canonical/n=6/U_8",
    "canonical/n=6/U_9",
    "canonical/n=7/U_1",
    "canonical/n=7/U_10",
    "canonical/n=7/U_11",
    "canonical/n=7/U_12",
    "canonical/n=7/U_13",
    "canonical/n=7/U_14",
    "canonical/n=7/U_15",
    "canonical/n=7/U_16",
    "canonical/n=7/U_17",
    "canonical/n=7/U_2",
    "canonical/n=7/U_3",
    "canonical/n=7/U_4",
    "canonical/n=7/U_5",
    "canonical/n=7/U_6",
    "canonical/n=7/U_7",
    "canonical/n=7/U_8",
    "canonical/n=7/U_9",
    "canonical/n=8/U_1",
    "canonical/n=8/U_10",
    "canonical/n=8/U_11",
    "canonical/n=8/U_12",
    "canonical/n=8/U_13",
    "canonical/n=8/U_14",
    "canonical/n=8/U_15",
    "canonical/n=8/U_16",
    "canonical/n=8/U_17",
    "canonical/n=8/U_2",
    "canonical/n=8/U_3",
    "canonical/n=8/U_4",
    "canonical/n=8/U_5",
    "canonical/n=8/U_6",
    "canonical/n=8/U_7",
    "canonical/n=8/U_8",
    "canonical/n=8/U_9",
    "constraints/n=4",
    "constraints/n=5",
    "constraints/n=6",
    "constraints/n=7",
    "constraints/n=8",
    "decomposition/n=4",
    "decomposition/n=5",
    "decomposition/n=6",
    "decomposition/n=7",
    "decomposition/n=8",
    "exceptional-strata/n=5",
    "exceptional-strata/n=7",
    "general-action-formula/n=4",
    "general-action-formula/n=5",
    "general-action-formula/n=6",
    "general-action-formula/n=7",
    "general-action-formula/n=8",
    "group-action/n=4",
    "group-action/n=5",
    "group-action/n=6",
    "group-action/n=7",
    "group-action/n=8",
    "lambda-surjectivity/n=4/U_1",
    "lambda-surjectivity/n=5/U_1",
    "lambda-surjectivity/n=5/U_5",
    "lambda-surjectivity/n=6/U_1",
    "lambda-surjectivity/n=6/U_2",
    "lambda-surjectivity/n=7/U_1",
    "lambda-surjectivity/n=7/U_5",
    "lambda-surjectivity/n=7/U_9",
    "lambda-surjectivity/n=8/U_1",
    "lambda-surjectivity/n=8/U_5",
    "lambda-surjectivity/n=8/U_9",
    "leibniz-validity/n=4",
    "leibniz-validity/n=5",
    "leibniz-validity/n=6",
    "leibniz-validity/n=7",
    "leibniz-validity/n=8",
    "oracle-equivalence/n=4",
    "oracle-equivalence/n=5",
    "oracle-equivalence/n=6",
    "oracle-equivalence/n=7",
    "oracle-equivalence/n=8",
    "orbit-invariance/n=4/U_1",
    "orbit-invariance/n=5/U_1",
    "orbit-invariance/n=5/U_5",
    "orbit-invariance/n=6/U_1",
    "orbit-invariance/n=6/U_2",
    "orbit-invariance/n=7/U_1",
    "orbit-invariance/n=7/U_5",
    "orbit-invariance/n=7/U_9",
    "orbit-invariance/n=8/U_1",
    "orbit-invariance/n=8/U_5",
    "orbit-invariance/n=8/U_9",
    "printed-deviations",
    "printed-systems/n=4",
    "printed-systems/n=5",
    "printed-systems/n=6",
    "printed-systems/n=7",
    "printed-systems/n=8",
    "relations/n=4",
    "relations/n=5",
    "relations/n=6",
    "relations/n=7",
    "relations/n=8",
    "separation/n=4",
    "separation/n=5",
    "separation/n=6",
    "separation/n=7",
    "separation/n=8",
    "tail-triviality/n=4",
    "tail-triviality/n=5",
    "tail-triviality/n=6",
    "tail-triviality/n=7",
    "tail-triviality/n=8",
];

/// Discrepancies between the printed formulas and the computed action that the
/// suite expects to find.
pub const EXPECTED_DEVIATIONS: &[&str] = &[
    "n=4 U_2 closed-form recipe",
    "n=5 relation b_{2,3} = b_{1,4}",
    "n=7 U_9 orbit function",
    "n=7 b12 equation",
    "n=7 b14 equation",
];

const EXPECTED_FREE: [usize; 5] = [4, 5, 5, 6, 6];

/// Inputs that produced the worst residual of a check.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<ExtensionParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transform: Option<AdaptedTransform>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<ComplexScalar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub triple: Option<Triple>,
}

impl Witness {
    fn params(p: &ExtensionParams) -> Self {
        Witness { params: Some(p.clone()), ..Default::default() }
    }

    fn pair(p: &ExtensionParams, t: &AdaptedTransform) -> Self {
        Witness { params: Some(p.clone()), transform: Some(t.clone()), ..Default::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub id: String,
    pub n: Option<usize>,
    pub trials: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub notes: String,
    /// Present only on failure.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub passed: usize,
    pub total: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub seed: u64,
    pub trials: usize,
    pub checks: Vec<Check>,
    pub summary: Summary,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.summary.passed == self.summary.total
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn check(&self, id: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.id == id)
    }

    /// Plain-text table, one row per check.
    pub fn to_table(&self) -> String {
        let width = self.checks.iter().map(|c| c.id.len()).max().unwrap_or(2).max(5);
        let mut s = String::new();
        let _ = writeln!(s, "{:<6} {:<width$} {:>6} {:>12} {:>10}  notes", "status", "check", "trials", "residual", "tol");
        for c in &self.checks {
            let _ = writeln!(
                s,
                "{:<6} {:<width$} {:>6} {:>12.3e} {:>10.1e}  {}",
                if c.pass { "PASS" } else { "FAIL" },
                c.id,
                c.trials,
                c.max_residual,
                c.tolerance,
                c.notes
            );
        }
        let _ = writeln!(s, "{}/{} checks passed (seed {}, trials {})", self.summary.passed, self.summary.total, self.seed, self.trials);
        s
    }
}

/// Test hooks. `sign_override` replaces the sign table used by the constraint
/// check of one dimension.
#[derive(Clone, Debug, Default)]
pub struct VerifyOptions {
    pub sign_override: Option<(usize, SignTable)>,
}

#[derive(Clone, Copy, Debug)]
enum Kind {
    AdaptedForm,
    Constraints,
    Decomposition,
    GeneralFormula,
    GroupAction,
    LeibnizValidity,
    OracleEquivalence,
    PrintedSystems,
    Relations,
    Separation,
    TailTriviality,
    ExceptionalStrata,
    Canonical(SubsetId),
    OrbitInvariance(SubsetId),
    LambdaSurjectivity(SubsetId),
    PrintedDeviations,
}

#[derive(Clone, Copy, Debug)]
struct Entry {
    kind: Kind,
    n: Option<usize>,
}

impl Entry {
    fn id(&self) -> String {
        let base = match self.kind {
            Kind::AdaptedForm => "adapted-form",
            Kind::Constraints => "constraints",
            Kind::Decomposition => "decomposition",
            Kind::GeneralFormula => "general-action-formula",
            Kind::GroupAction => "group-action",
            Kind::LeibnizValidity => "leibniz-validity",
            Kind::OracleEquivalence => "oracle-equivalence",
            Kind::PrintedSystems => "printed-systems",
            Kind::Relations => "relations",
            Kind::Separation => "separation",
            Kind::TailTriviality => "tail-triviality",
            Kind::ExceptionalStrata => "exceptional-strata",
            Kind::Canonical(_) => "canonical",
            Kind::OrbitInvariance(_) => "orbit-invariance",
            Kind::LambdaSurjectivity(_) => "lambda-surjectivity",
            Kind::PrintedDeviations => "printed-deviations",
        };
        let mut id = base.to_string();
        if let Some(n) = self.n {
            let _ = write!(id, "/n={n}");
        }
        if let Kind::Canonical(u) | Kind::OrbitInvariance(u) | Kind::LambdaSurjectivity(u) = self.kind {
            let _ = write!(id, "/{u}");
        }
        id
    }
}

fn entries() -> Vec<Entry> {
    let mut out = Vec::new();
    for n in MIN_N..=MAX_N {
        use Kind::*;
        for kind in [
            AdaptedForm,
            Constraints,
            Decomposition,
            GeneralFormula,
            GroupAction,
            LeibnizValidity,
            OracleEquivalence,
            PrintedSystems,
            Relations,
            Separation,
            TailTriviality,
        ] {
            out.push(Entry { kind, n: Some(n) });
        }
        if n % 2 == 1 {
            out.push(Entry { kind: ExceptionalStrata, n: Some(n) });
        }
        for s in subsets(n).expect("n in range") {
            out.push(Entry { kind: Canonical(s.id), n: Some(n) });
            if s.is_parametric() {
                out.push(Entry { kind: OrbitInvariance(s.id), n: Some(n) });
                out.push(Entry { kind: LambdaSurjectivity(s.id), n: Some(n) });
            }
        }
    }
    out.push(Entry { kind: Kind::PrintedDeviations, n: None });
    out
}

/// Ids of every check the suite runs, sorted.
pub fn registry() -> Vec<String> {
    let mut ids: Vec<String> = entries().iter().map(Entry::id).collect();
    ids.sort();
    ids
}

pub fn verify_all(seed: u64, trials: usize) -> Result<VerificationReport> {
    verify_all_with(seed, trials, &VerifyOptions::default())
}

pub fn verify_all_with(seed: u64, trials: usize, opts: &VerifyOptions) -> Result<VerificationReport> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let mut checks: Vec<Check> = entries().par_iter().map(|e| run(e, seed, trials, opts)).collect();
    checks.sort_by(|a, b| a.id.cmp(&b.id));
    let passed = checks.iter().filter(|c| c.pass).count();
    let total = checks.len();
    Ok(VerificationReport { seed, trials, checks, summary: Summary { passed, total } })
}

fn fnv1a(s: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in s.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Running maximum of a check's residual with the inputs that produced it.
struct Acc {
    tol: f64,
    max: f64,
    count: usize,
    witness: Option<Witness>,
    errors: Vec<String>,
    notes: Vec<String>,
}

impl Acc {
    fn new(tol: f64) -> Self {
        Acc { tol, max: 0.0, count: 0, witness: None, errors: Vec::new(), notes: Vec::new() }
    }

    fn record(&mut self, r: f64, w: impl FnOnce() -> Witness) {
        if r.is_nan() {
            self.fail("residual is NaN".into(), w);
        } else if r > self.max {
            self.max = r;
            if self.errors.is_empty() {
                self.witness = Some(w());
            }
        }
    }

    fn fail(&mut self, msg: String, w: impl FnOnce() -> Witness) {
        if self.errors.is_empty() {
            self.witness = Some(w());
        }
        self.errors.push(msg);
    }

    fn note(&mut self, msg: impl Into<String>) {
        self.notes.push(msg.into());
    }

    fn trial(&mut self) {
        self.count += 1;
    }

    fn finish(mut self, id: String, n: Option<usize>) -> Check {
        let pass = self.errors.is_empty() && self.max <= self.tol;
        if !self.errors.is_empty() {
            let shown: Vec<&str> = self.errors.iter().take(3).map(String::as_str).collect();
            let mut msg = shown.join("; ");
            if self.errors.len() > 3 {
                let _ = write!(msg, "; {} more", self.errors.len() - 3);
            }
            self.notes.push(msg);
        }
        Check {
            id,
            n,
            trials: self.count,
            max_residual: self.max,
            tolerance: self.tol,
            pass,
            notes: self.notes.join("; "),
            witness: if pass { None } else { self.witness },
        }
    }
}

fn run(e: &Entry, seed: u64, trials: usize, opts: &VerifyOptions) -> Check {
    let id = e.id();
    let mut rng = ChaCha8Rng::seed_from_u64(fnv1a(&id) ^ seed.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let mut acc = Acc::new(tolerance(e.kind));
    let n = e.n.unwrap_or(0);
    let outcome = match e.kind {
        Kind::LeibnizValidity => leibniz_validity(n, trials, &mut rng, &mut acc),
        Kind::Constraints => constraints(n, trials, opts, &mut rng, &mut acc),
        Kind::Relations => relations(n, &mut acc),
        Kind::AdaptedForm => pairs(n, trials, &mut rng, &mut acc, adapted_form),
        Kind::OracleEquivalence => pairs(n, trials, &mut rng, &mut acc, |p, t| {
            Ok(act_on_params(t, p)?.max_rel_diff(&act_via_tensor(t, p)?))
        }),
        Kind::GeneralFormula => pairs(n, trials, &mut rng, &mut acc, |p, t| {
            Ok(act_general(t, p)?.max_rel_diff(&act_on_params(t, p)?))
        }),
        Kind::PrintedSystems => printed_systems(n, trials, &mut rng, &mut acc),
        Kind::Decomposition => pairs(n, trials, &mut rng, &mut acc, decomposition),
        Kind::TailTriviality => tail_triviality(n, trials, &mut rng, &mut acc),
        Kind::GroupAction => group_action(n, trials, &mut rng, &mut acc),
        Kind::Canonical(u) => canonical(n, u, trials, &mut rng, &mut acc),
        Kind::OrbitInvariance(u) => orbit_invariance(n, u, trials, &mut rng, &mut acc),
        Kind::LambdaSurjectivity(u) => lambda_surjectivity(n, u, trials, &mut rng, &mut acc),
        Kind::ExceptionalStrata => exceptional_strata(n, trials, &mut rng, &mut acc),
        Kind::Separation => separation(n, trials, &mut rng, &mut acc),
        Kind::PrintedDeviations => printed_deviations(trials, &mut rng, &mut acc),
    };
    if let Err(err) = outcome {
        acc.fail(format!("aborted: {err}"), Witness::default);
    }
    acc.finish(id, e.n)
}

fn tolerance(kind: Kind) -> f64 {
    match kind {
        Kind::LeibnizValidity | Kind::Constraints | Kind::AdaptedForm => 1e-9,
        Kind::OracleEquivalence => 1e-8,
        Kind::GeneralFormula | Kind::PrintedSystems | Kind::GroupAction | Kind::TailTriviality => 1e-9,
        Kind::Decomposition => 1e-9,
        Kind::Canonical(_) | Kind::OrbitInvariance(_) | Kind::ExceptionalStrata => 1e-6,
        Kind::LambdaSurjectivity(_) => 1e-9,
        Kind::Relations | Kind::Separation | Kind::PrintedDeviations => 0.0,
    }
}

fn rel(a: ComplexScalar, b: ComplexScalar) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1.0)
}

fn leibniz_validity(n: usize, trials: usize, rng: &mut ChaCha8Rng, acc: &mut Acc) -> Result<()> {
    for _ in 0..trials {
        acc.trial();
        let p = random_params(n, None, rng.random())?;
        let t = build_table(&p)?;
        let d = t.leibniz_defect();
        acc.record(d.max / p.scale().max(1.0), || Witness { triple: Some(d.triple), ..Witness::params(&p) });
        if !is_filiform(&t) {
            acc.fail(format!("{p} is not filiform"), || Witness::params(&p));
        }
    }
    Ok(())
}

fn constraints(n: usize, trials: usize, opts: &VerifyOptions, rng: &mut ChaCha8Rng, acc: &mut Acc) -> Result<()> {
    let report = solve_leibniz_constraints(n)?;
    acc.note(format!("{} free of {} unknowns", report.free_count, report.total_unknowns));
    if report.free_count != EXPECTED_FREE[n - MIN_N] {
        acc.fail(format!("expected {} free parameters", EXPECTED_FREE[n - MIN_N]), Witness::default);
    }
    let signs = match &opts.sign_override {
        Some((m, s)) if *m == n => {
            acc.note("sign table overridden");
            s.clone()
        }
        _ => report.sign_table.clone(),
    };
    for _ in 0..trials {
        acc.trial();
        let p = random_params(n, None, rng.random())?;
        let d = build_table_with_signs(&p, &signs)?.leibniz_defect();
        let r = d.max / p.scale().max(1.0);
        acc.record(r, || Witness { triple: Some(d.triple), ..Witness::params(&p) });
        if r > acc.tol {
            let (i, j, k) = d.triple;
            acc.fail(format!("identity fails at (e{i}, e{j}, e{k})"), || Witness { triple: Some(d.triple), ..Witness::params(&p) });
        }
    }
    Ok(())
}

type Expr = Vec<(Ratio<i64>, String)>;

fn normalized(mut e: Expr) -> Expr {
    e.sort_by(|a, b| a.1.cmp(&b.1));
    e
}

fn scaled(e: &Expr, s: i64) -> Expr {
    normalized(e.iter().map(|(q, f)| (q * s, f.clone())).collect())
}

fn relations(n: usize, acc: &mut Acc) -> Result<()> {
    acc.trial();
    let report = solve_leibniz_constraints(n)?;
    let expr = |i: usize, j: usize| normalized(report.pair_expression(i, j));
    let mut bad: Vec<String> = Vec::new();
    let mut checked = 0;
    // b_{i+1,j} = −b_{i,j+1}
    for i in 1..n - 1 {
        for j in i + 2..n - 1 {
            checked += 1;
            if expr(i + 1, j) != scaled(&expr(i, j + 1), -1) {
                bad.push(format!("b_{{{},{j}}} != -b_{{{i},{}}}", i + 1, j + 1));
            }
        }
    }
    // b_{1,2i+1} = 0
    for k in (3..n).step_by(2) {
        checked += 1;
        if !expr(1, k).is_empty() {
            bad.push(format!("b_{{1,{k}}} != 0"));
        }
    }
    // named relations per dimension: expr(i, j) = sign · expr(k, l)
    let named: &[(usize, usize, i64, usize, usize)] = match n {
        5 => &[(2, 3, -1, 1, 4)],
        6 => &[(1, 4, -1, 2, 3)],
        7 => &[(2, 5, -1, 3, 4), (2, 3, -1, 1, 4)],
        8 => &[(1, 6, 1, 3, 4), (3, 4, 1, 5, 2)],
        _ => &[],
    };
    for &(i, j, s, k, l) in named {
        checked += 1;
        if expr(i, j) != scaled(&expr(k, l), s) || expr(i, j).is_empty() {
            bad.push(format!("b_{{{i},{j}}} != {s}·b_{{{k},{l}}}"));
        }
    }
    // on odd n the coordinate b is b_{2,n−2}
    if n % 2 == 1 {
        checked += 1;
        let mut p = ExtensionParams::zero(n);
        p.b = ONE;
        if build_table(&p)?.get(2, n - 2, n) != ONE {
            bad.push(format!("b != b_{{2,{}}}", n - 2));
        }
    }
    acc.note(format!("{checked} relations"));
    acc.record(bad.len() as f64, Witness::default);
    for b in bad {
        acc.fail(b, Witness::default);
    }
    Ok(())
}

fn sample_pair(n: usize, rng: &mut ChaCha8Rng) -> Result<(ExtensionParams, AdaptedTransform)> {
    let p = random_params(n, None, rng.random())?;
    let t = random_transform(n, p.b, rng);
    Ok((p, t))
}

fn pairs(
    n: usize,
    trials: usize,
    rng: &mut ChaCha8Rng,
    acc: &mut Acc,
    f: impl Fn(&ExtensionParams, &AdaptedTransform) -> Result<f64>,
) -> Result<()> {
    for _ in 0..trials {
        acc.trial();
        let (p, t) = sample_pair(n, rng)?;
        match f(&p, &t) {
            Ok(r) => acc.record(r, || Witness::pair(&p, &t)),
            Err(Error::Shape { offending }) => {
                let triple = offending.first().copied();
                acc.fail(format!("not in adapted form at {:?}", triple), || Witness { triple, ..Witness::pair(&p, &t) });
            }
            Err(err) => acc.fail(err.to_string(), || Witness::pair(&p, &t)),
        }
    }
    Ok(())
}

fn adapted_form(p: &ExtensionParams, t: &AdaptedTransform) -> Result<f64> {
    let img = build_table(p)?.change_basis(&adapted_matrix(t, p)?)?;
    let q = read_params(&img)?;
    Ok(img.max_diff(&build_table(&q)?) / img.max_abs().max(1.0))
}

fn decomposition(p: &ExtensionParams, t: &AdaptedTransform) -> Result<f64> {
    let n = p.n;
    let factors = decompose(t)?;
    let mut r = compose_elementary(&factors, n)?.max_rel_diff(t);
    let mut q = p.clone();
    for g in &factors {
        q = act_elementary_full(g, &q)?;
    }
    r = r.max(q.max_rel_diff(&act_on_params(t, p)?));
    if n <= 5 {
        // below the first cross term the σ coefficients are the plain ratios B_k/B_1
        for g in &factors {
            if let ElementaryTransform::Sigma { b, k } = *g {
                r = r.max(rel(b, t.bk(k) / t.b1()));
            }
        }
    }
    Ok(r)
}

fn is_expected(name: &str) -> bool {
    EXPECTED_DEVIATIONS.contains(&name)
}

fn printed_systems(n: usize, trials: usize, rng: &mut ChaCha8Rng, acc: &mut Acc) -> Result<()> {
    let eqs: Vec<_> = printed_equations().into_iter().filter(|e| e.n == n).collect();
    let skipped: Vec<&str> =
        eqs.iter().filter(|e| is_expected(&format!("n={n} {} equation", e.target))).map(|e| e.target).collect();
    if !skipped.is_empty() {
        acc.note(format!("printed form of {} reported under printed-deviations", skipped.join(", ")));
    }
    for _ in 0..trials {
        acc.trial();
        let (p, t) = sample_pair(n, rng)?;
        let img = act_on_params(&t, &p)?;
        for e in eqs.iter().filter(|e| !skipped.contains(&e.target)) {
            let want = param_by_name(&img, e.target).expect("printed targets are parameters");
            acc.record(rel((e.eval)(&t, &p), want), || Witness::pair(&p, &t));
        }
    }
    Ok(())
}

fn tail_triviality(n: usize, trials: usize, rng: &mut ChaCha8Rng, acc: &mut Acc) -> Result<()> {
    for _ in 0..trials {
        acc.trial();
        let s: u64 = rng.random();
        let r = tail_triviality_residual(n, s)?;
        acc.record(r, Witness::default);
        if r > acc.tol {
            acc.note(format!("sampling seed {s}"));
        }
    }
    Ok(())
}

fn group_action(n: usize, trials: usize, rng: &mut ChaCha8Rng, acc: &mut Acc) -> Result<()> {
    for _ in 0..trials {
        acc.trial();
        let (p, t1) = sample_pair(n, rng)?;
        let q = act_on_params(&t1, &p)?;
        let t2 = random_transform(n, q.b, rng);
        let r1 = act_on_params(&t2, &q)?.max_rel_diff(&act_on_params(&t1.then(&t2), &p)?);
        let r2 = act_on_params(&t1.inverse(), &q)?.max_rel_diff(&p);
        let r3 = act_on_params(&AdaptedTransform::identity(n), &p)?.max_rel_diff(&p);
        acc.record(r1.max(r2).max(r3), || Witness::pair(&p, &t1));
    }
    Ok(())
}

fn expected_rep(n: usize, spec: &SubsetSpec, lambda: Option<ComplexScalar>) -> ExtensionParams {
    representative(n, spec, lambda.unwrap_or(ZERO))
}

fn canonical(n: usize, u: SubsetId, trials: usize, rng: &mut ChaCha8Rng, acc: &mut Acc) -> Result<()> {
    let spec = subset_spec(n, u)?;
    let mut methods = BTreeSet::new();
    for _ in 0..trials {
        acc.trial();
        let p = random_params(n, Some(u), rng.random())?;
        let label = match canonicalize(&p) {
            Ok(l) => l,
            Err(err) => {
                acc.fail(err.to_string(), || Witness::params(&p));
                continue;
            }
        };
        methods.insert(format!("{:?}", label.method).to_lowercase());
        if label.subset != u || label.stratum != Stratum::Generic {
            acc.fail(format!("classified as {} ({:?})", label.subset, label.stratum), || Witness::params(&p));
            continue;
        }
        if spec.is_parametric() != label.lambda.is_some() {
            acc.fail("λ presence disagrees with the subset".into(), || Witness::params(&p));
        }
        let want = expected_rep(n, &spec, label.lambda);
        let via_action = act_on_params(&label.witness, &p)?;
        let via_tensor = act_via_tensor(&label.witness, &p)?;
        let r = label
            .representative
            .max_rel_diff(&want)
            .max(via_action.max_rel_diff(&want))
            .max(via_tensor.max_rel_diff(&want));
        acc.record(r, || Witness { lambda: label.lambda, ..Witness::pair(&p, &label.witness) });
    }
    acc.note(format!("representative {}; witness {}", expected_rep(n, &spec, None), methods.into_iter().collect::<Vec<_>>().join("+")));
    Ok(())
}

fn orbit_invariance(n: usize, u: SubsetId, trials: usize, rng: &mut ChaCha8Rng, acc: &mut Acc) -> Result<()> {
    for _ in 0..trials {
        acc.trial();
        let p = random_params(n, Some(u), rng.random())?;
        let t = random_transform(n, p.b, rng);
        let q = act_on_params(&t, &p)?;
        let moved = subset_of(&q)?;
        if moved != u {
            acc.fail(format!("image lies in {moved}"), || Witness::pair(&p, &t));
            continue;
        }
        match (orbit_invariant(&p)?, orbit_invariant(&q)?) {
            (Some(a), Some(b)) => {
                let drift = (a - b).norm() / a.norm().max(b.norm());
                acc.record(drift, || Witness::pair(&p, &t));
            }
            _ => acc.fail("orbit function undefined".into(), || Witness::pair(&p, &t)),
        }
    }
    Ok(())
}

/// A λ not identified with `lambda` by any symmetry of the representative shape.
fn distinct_lambda(n: usize, spec: &SubsetSpec, lambda: ComplexScalar, rng: &mut ChaCha8Rng) -> ComplexScalar {
    let factors: Vec<ComplexScalar> = lambda_symmetries(n, spec).into_iter().map(|(_, f)| f).collect();
    loop {
        let mu = random_scalar(rng);
        if factors.iter().all(|f| (lambda * f - mu).norm() > 1e-3) {
            return mu;
        }
    }
}

fn lambda_surjectivity(n: usize, u: SubsetId, trials: usize, rng: &mut ChaCha8Rng, acc: &mut Acc) -> Result<()> {
    let spec = subset_spec(n, u)?;
    let symmetries = lambda_symmetries(n, &spec);
    acc.note(format!("{} λ symmetries", symmetries.len()));
    for _ in 0..trials {
        acc.trial();
        let lambda = random_scalar(rng);
        let r = representative(n, &spec, lambda);
        let c = classify(&r)?;
        let w = || Witness { lambda: Some(lambda), ..Witness::params(&r) };
        match c.invariants.canonical_lambda {
            Some(got) if c.label.subset == u => acc.record(rel(got, lambda), w),
            _ => {
                acc.fail(format!("representative classified as {}", c.label.subset), w);
                continue;
            }
        }
        let mu = distinct_lambda(n, &spec, lambda, rng);
        if isomorphic(&r, &representative(n, &spec, mu))?.isomorphic {
            acc.fail(format!("λ = {lambda} and λ = {mu} reported isomorphic"), w);
        }
        for (t, f) in symmetries.iter().skip(1) {
            let image = representative(n, &spec, lambda * f);
            acc.record(act_on_params(t, &r)?.max_rel_diff(&image), w);
            if !isomorphic(&r, &image)?.isomorphic {
                acc.fail(format!("λ and λ·{f} not identified"), w);
            }
        }
    }
    Ok(())
}

fn exceptional_strata(n: usize, trials: usize, rng: &mut ChaCha8Rng, acc: &mut Acc) -> Result<()> {
    let orbits = exceptional_orbits(n)?;
    acc.note(format!("{} extra orbits", orbits.len()));
    for _ in 0..trials {
        acc.trial();
        for o in &orbits {
            let t = random_transform(n, o.representative.b, rng);
            let q = act_on_params(&t, &o.representative)?;
            let label = match canonicalize(&q) {
                Ok(l) => l,
                Err(err) => {
                    acc.fail(err.to_string(), || Witness::params(&q));
                    continue;
                }
            };
            if label.subset != o.subset || label.stratum != o.stratum {
                acc.fail(format!("{:?} of {} classified as {:?} of {}", o.stratum, o.subset, label.stratum, label.subset), || {
                    Witness::params(&q)
                });
                continue;
            }
            let r = label
                .representative
                .max_rel_diff(&o.representative)
                .max(act_on_params(&label.witness, &q)?.max_rel_diff(&o.representative));
            acc.record(r, || Witness::pair(&q, &label.witness));
        }
    }
    Ok(())
}

fn separation(n: usize, trials: usize, rng: &mut ChaCha8Rng, acc: &mut Acc) -> Result<()> {
    let rounds = trials.min(3);
    let mut violations = 0usize;
    let mut size = 0;
    for _ in 0..rounds {
        acc.trial();
        // (representative, subset, stratum, λ)
        let mut reps: Vec<(ExtensionParams, SubsetId, Stratum, Option<ComplexScalar>)> = Vec::new();
        for s in subsets(n)? {
            if s.is_parametric() {
                let l1 = random_scalar(rng);
                let l2 = distinct_lambda(n, &s, l1, rng);
                for l in [l1, l2] {
                    reps.push((representative(n, &s, l), s.id, Stratum::Generic, Some(l)));
                }
            } else {
                reps.push((representative(n, &s, ZERO), s.id, Stratum::Generic, None));
            }
        }
        for o in exceptional_orbits(n)? {
            reps.push((o.representative, o.subset, o.stratum, None));
        }
        size = reps.len();
        for (r, u, st, l) in &reps {
            let c = canonicalize(r)?;
            let lambda_ok = match (c.lambda, l) {
                (Some(a), Some(b)) => rel(a, *b) <= 1e-9,
                (None, None) => true,
                _ => false,
            };
            if c.subset != *u || c.stratum != *st || !lambda_ok {
                violations += 1;
                acc.fail(format!("{r} classified as {} ({:?})", c.subset, c.stratum), || Witness::params(r));
            }
        }
        for i in 0..reps.len() {
            for j in i + 1..reps.len() {
                if isomorphic(&reps[i].0, &reps[j].0)?.isomorphic {
                    violations += 1;
                    let (a, b) = (&reps[i].0, &reps[j].0);
                    acc.fail(format!("{a} and {b} reported isomorphic"), || Witness::params(a));
                }
            }
        }
    }
    acc.note(format!("{size} representatives pairwise distinct"));
    acc.record(violations as f64, Witness::default);
    Ok(())
}

/// The closed-form witness printed for `U_2` of `CE(μ_4)`.
fn printed_n4_u2_recipe(p: &ExtensionParams) -> AdaptedTransform {
    let d = crate::classification::delta(p);
    let q = principal_root(d, 4);
    let r2 = std::f64::consts::SQRT_2;
    let a0 = q / r2;
    let a1 = -p.b01 * q / (2.0 * r2 * p.b11);
    let b1 = q * q * q / (2.0 * r2 * p.b11);
    AdaptedTransform::basic(4, a0, a1, b1)
}

fn printed_deviations(trials: usize, rng: &mut ChaCha8Rng, acc: &mut Acc) -> Result<()> {
    const DEVIATES: f64 = 1e-6;
    let mut found: BTreeSet<String> = BTreeSet::new();
    let eqs = printed_equations();
    for _ in 0..trials {
        acc.trial();
        for n in MIN_N..=MAX_N {
            let (p, t) = sample_pair(n, rng)?;
            let img = act_on_params(&t, &p)?;
            for e in eqs.iter().filter(|e| e.n == n) {
                let want = param_by_name(&img, e.target).expect("printed targets are parameters");
                if rel((e.eval)(&t, &p), want) > DEVIATES {
                    found.insert(format!("n={n} {} equation", e.target));
                }
            }
        }

        let p = random_params(4, Some(SubsetId(2)), rng.random())?;
        let img = act_on_params(&printed_n4_u2_recipe(&p), &p)?;
        if img.max_rel_diff(&representative(4, &subset_spec(4, SubsetId(2))?, ZERO)) > DEVIATES {
            found.insert("n=4 U_2 closed-form recipe".into());
        }

        let p = random_params(7, Some(SubsetId(9)), rng.random())?;
        let t = random_transform(7, p.b, rng);
        let q = act_on_params(&t, &p)?;
        let (a, b) = (printed_n7_u9_function(&p), printed_n7_u9_function(&q));
        if (a - b).norm() / a.norm().max(b.norm()) > DEVIATES {
            found.insert("n=7 U_9 orbit function".into());
        }
    }
    let r5 = solve_leibniz_constraints(5)?;
    if normalized(r5.pair_expression(2, 3)) != normalized(r5.pair_expression(1, 4)) {
        found.insert("n=5 relation b_{2,3} = b_{1,4}".into());
    }

    let expected: BTreeSet<String> = EXPECTED_DEVIATIONS.iter().map(|s| s.to_string()).collect();
    let missing: Vec<&String> = expected.difference(&found).collect();
    let extra: Vec<&String> = found.difference(&expected).collect();
    acc.note(format!("found: {}", found.iter().cloned().collect::<Vec<_>>().join(", ")));
    acc.record((missing.len() + extra.len()) as f64, Witness::default);
    if !missing.is_empty() {
        acc.fail(format!("not reproduced: {missing:?}"), Witness::default);
    }
    if !extra.is_empty() {
        acc.fail(format!("unexpected: {extra:?}"), Witness::default);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_matches_manifest() {
        let mut manifest: Vec<String> = MANIFEST.iter().map(|s| s.to_string()).collect();
        manifest.sort();
        assert_eq!(registry(), manifest);
        let unique: BTreeSet<&String> = manifest.iter().collect();
        assert_eq!(unique.len(), manifest.len());
    }

    #[test]
    fn fnv_reference_values() {
        assert_eq!(fnv1a(""), 0xcbf2_9ce4_8422_2325);
        assert_eq!(fnv1a("a"), 0xaf63_dc4c_8601_ec8c);
    }

    #[test]
    fn zero_trials_rejected() {
        assert!(verify_all(1, 0).is_err());
    }
}
