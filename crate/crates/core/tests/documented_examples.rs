//! Worked examples for each public operation.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use leibniz_ce::action::{
    act_elementary_full, act_on_params, adapted_matrix, elementary_to_adapted, read_params, AdaptedTransform,
    ElementaryTransform,
};
use leibniz_ce::algebra::{identity_matrix, is_filiform, lower_central_series, unit, Matrix, StructureTensor};
use leibniz_ce::classification::{
    canonicalize, delta, isomorphic, orbit_invariant, representatives, subset_of, SubsetId,
};
use leibniz_ce::family::{build_mu, build_table, random_params, random_transform, solve_leibniz_constraints, ExtensionParams};
use leibniz_ce::scalar::{real, ComplexScalar, ONE, ZERO};
use leibniz_ce::Error;

fn p(n: usize, v: &[f64]) -> ExtensionParams {
    ExtensionParams::from_reals(n, v).unwrap()
}

fn c(x: f64) -> ComplexScalar {
    real(x)
}

#[test]
fn brackets() {
    let mu4 = build_mu(4).unwrap();
    assert_eq!(mu4.bracket(&unit(5, 1), &unit(5, 0)).unwrap(), unit(5, 2));
    assert_eq!(mu4.bracket(&[ZERO; 5], &unit(5, 3)).unwrap(), vec![ZERO; 5]);
    let t = build_table(&p(4, &[0.0, 0.0, 1.0, 0.0])).unwrap();
    assert_eq!(t.bracket(&unit(5, 1), &unit(5, 1)).unwrap(), unit(5, 4));
}

#[test]
fn residuals() {
    assert_eq!(build_mu(5).unwrap().leibniz_residual(), 0.0);
    let q = random_params(4, None, 5).unwrap();
    let mut t = build_table(&q).unwrap();
    assert!(t.leibniz_residual() <= 1e-12 * q.scale());
    t.add(1, 2, 4, ONE);
    assert!(t.leibniz_residual() > 0.5);
}

#[test]
fn basis_changes() {
    let t = build_table(&p(4, &[0.0, 0.0, 1.0, 0.0])).unwrap();
    assert_eq!(t.change_basis(&identity_matrix(5)).unwrap(), t);
    let (a, b) = (c(1.5), c(0.7));
    let g = Matrix::from_diagonal(&nalgebra::DVector::from_vec(vec![a, b, a * b, a * a * b, a * a * a * b]));
    let q = read_params(&t.change_basis(&g).unwrap()).unwrap();
    assert!(q.max_rel_diff(&p(4, &[0.0, 0.0, 0.7 / 1.5f64.powi(3), 0.0])) < 1e-14);
    let back = t.change_basis(&g).unwrap().change_basis(&g.clone().try_inverse().unwrap()).unwrap();
    assert!(back.max_diff(&t) < 1e-13);
    assert!(matches!(t.change_basis(&Matrix::zeros(5, 5)), Err(Error::SingularMatrix { .. })));
}

#[test]
fn series_and_filiform() {
    let ce4 = build_table(&random_params(4, None, 2).unwrap()).unwrap();
    assert_eq!(lower_central_series(&ce4).dims, vec![5, 3, 2, 1, 0]);
    assert_eq!(lower_central_series(&StructureTensor::zeros(3)).dims, vec![3, 0]);
    assert_eq!(lower_central_series(&build_mu(5).unwrap()).dims, vec![6, 4, 3, 2, 1, 0]);
    assert_eq!(lower_central_series(&build_mu(6).unwrap()).dims, vec![7, 5, 4, 3, 2, 1, 0]);
    assert!(is_filiform(&build_table(&random_params(5, None, 3).unwrap()).unwrap()));
    assert!(!is_filiform(&StructureTensor::zeros(4)));
    assert!(is_filiform(&build_mu(4).unwrap()));
}

#[test]
fn graded_algebra_and_tables() {
    let mu4 = build_mu(4).unwrap();
    for i in 1..4 {
        assert_eq!(mu4.get(i, 0, i + 1), ONE);
    }
    for n in 4..=8 {
        assert_eq!(build_mu(n).unwrap().leibniz_residual(), 0.0);
    }
    assert_eq!(build_table(&ExtensionParams::zero(4)).unwrap(), mu4);

    let t = build_table(&p(4, &[0.0, 0.0, 1.0, 1.0])).unwrap();
    assert_eq!(t.get(1, 1, 4), ONE);
    assert_eq!(t.get(1, 2, 4), ONE);
    assert_eq!(t.get(2, 1, 4), -ONE);
    assert_eq!(t.product(2, 3), &[ZERO; 5]);

    let t = build_table(&p(5, &[0.0, 0.0, 0.0, 0.0, 1.0])).unwrap();
    assert_eq!(t.get(1, 4, 5), -ONE);
    assert_eq!(t.get(2, 3, 5), ONE);
}

#[test]
fn constraint_solver() {
    let r4 = solve_leibniz_constraints(4).unwrap();
    assert_eq!(r4.free_count, 4);
    assert_eq!(r4.free_parameters, ["b_{0,0}", "b_{0,1}", "b_{1,1}", "b_{1,2}"]);
    let r5 = solve_leibniz_constraints(5).unwrap();
    assert_eq!(r5.free_count, 5);
    let (b23, b14) = (r5.pair_expression(2, 3), r5.pair_expression(1, 4));
    assert_eq!(b23.len(), 1);
    assert_eq!(b23[0].1, b14[0].1);
    let r7 = solve_leibniz_constraints(7).unwrap();
    assert_eq!(r7.free_count, 6);
    let (b25, b34) = (r7.pair_expression(2, 5), r7.pair_expression(3, 4));
    assert_eq!(b25[0].1, "b_{1,6}");
    assert_eq!(b25[0].0, -b34[0].0);
}

#[test]
fn sampling() {
    assert_eq!(random_params(4, Some(SubsetId(9)), 1).unwrap(), ExtensionParams::zero(4));
    for seed in 0..20 {
        let q = random_params(4, Some(SubsetId(3)), seed).unwrap();
        assert!(q.b11 != ZERO && q.b_even[0] == ZERO);
        assert!(delta(&q).norm() <= 1e-15);
    }
    assert_eq!(random_params(6, Some(SubsetId(4)), 8).unwrap(), random_params(6, Some(SubsetId(4)), 8).unwrap());
}

#[test]
fn adapted_matrices() {
    let q = p(4, &[0.0, 0.0, 1.0, 1.0]);
    assert_eq!(adapted_matrix(&AdaptedTransform::identity(4), &q).unwrap(), identity_matrix(5));
    let m = adapted_matrix(&AdaptedTransform::basic(4, ONE, ONE, ONE), &q).unwrap();
    let col: Vec<ComplexScalar> = m.column(2).iter().copied().collect();
    assert_eq!(col, vec![ZERO, ZERO, ONE, ZERO, ONE]);
    let q = p(5, &[0.3, 0.2, 0.9, 0.4, 1.3]);
    let t = AdaptedTransform::new(5, c(1.1), c(0.4), vec![c(0.8), c(0.3), c(-0.2)]).unwrap();
    let m = adapted_matrix(&t, &q).unwrap();
    assert!((m[(5, 5)] - t.a0.powu(3) * t.b1() * (t.a0 + t.a1 * q.b)).norm() < 1e-14);
}

#[test]
fn parameter_action() {
    let (a, b) = (c(1.3), c(0.6));
    let q = act_on_params(&AdaptedTransform::basic(4, a, ZERO, b), &p(4, &[0.0, 0.0, 1.0, 0.0])).unwrap();
    assert!(q.max_rel_diff(&p(4, &[0.0, 0.0, 0.6 / 1.3f64.powi(3), 0.0])) < 1e-15);
    let r = random_params(6, None, 4).unwrap();
    assert_eq!(act_on_params(&AdaptedTransform::identity(6), &r).unwrap(), r);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let r = random_params(5, None, 6).unwrap();
    let t = random_transform(5, r.b, &mut rng);
    let img = act_on_params(&t, &r).unwrap();
    assert!((img.b - t.b1() * r.b / (t.a0 + t.a1 * r.b)).norm() < 1e-14);
}

#[test]
fn elementary_transforms() {
    assert_eq!(
        elementary_to_adapted(&ElementaryTransform::Upsilon { a: c(2.0), b: c(3.0) }, 4).unwrap(),
        AdaptedTransform::new(4, c(2.0), ZERO, vec![c(3.0), ZERO]).unwrap()
    );
    let k = c(0.4);
    assert_eq!(
        elementary_to_adapted(&ElementaryTransform::Sigma { b: k, k: 2 }, 5).unwrap(),
        AdaptedTransform::new(5, ONE, ZERO, vec![ONE, k, ZERO]).unwrap()
    );
    assert_eq!(
        elementary_to_adapted(&ElementaryTransform::Tau { a: c(0.5), k: 2 }, 4).unwrap(),
        AdaptedTransform::identity(4)
    );
}

#[test]
fn tail_generators() {
    let q = p(4, &[1.0, 0.0, 1.0, 1.0]);
    let img = act_elementary_full(&ElementaryTransform::Tau { a: ONE, k: 2 }, &q).unwrap();
    assert!(img.max_rel_diff(&q) < 1e-12);
    let q = random_params(6, None, 12).unwrap();
    let img = act_elementary_full(&ElementaryTransform::Sigma { b: c(3.0), k: 5 }, &q).unwrap();
    assert!(img.max_rel_diff(&q) < 1e-12);
    let q = p(5, &[0.4, 0.3, 1.0, 0.2, 0.7]);
    let img = act_elementary_full(&ElementaryTransform::Tau { a: ONE, k: 1 }, &q).unwrap();
    assert!(img.max_rel_diff(&q) > 0.1);
}

#[test]
fn reading_parameters() {
    let q = random_params(7, None, 21).unwrap();
    assert!(read_params(&build_table(&q).unwrap()).unwrap().max_rel_diff(&q) == 0.0);
    assert_eq!(read_params(&build_mu(4).unwrap()).unwrap(), ExtensionParams::zero(4));
    let mut t = build_table(&ExtensionParams::zero(4)).unwrap();
    t.set(1, 0, 3, c(0.1));
    match read_params(&t) {
        Err(Error::Shape { offending }) => assert!(offending.contains(&(1, 0, 3))),
        other => panic!("expected a shape error, got {other:?}"),
    }
}

#[test]
fn discriminant_and_subsets() {
    assert_eq!(delta(&p(4, &[1.0, 0.0, 1.0, 0.0])), c(-4.0));
    assert_eq!(delta(&p(4, &[0.0, 0.0, 0.0, 0.0])), ZERO);
    assert_eq!(delta(&p(4, &[1.0, 2.0, 1.0, 0.0])), ZERO);
    assert_eq!(subset_of(&p(4, &[1.0, 0.0, 1.0, 1.0])).unwrap(), SubsetId(1));
    assert_eq!(subset_of(&p(4, &[0.0, 0.0, 0.0, 0.0])).unwrap(), SubsetId(9));
    assert_eq!(subset_of(&p(7, &[0.8, 0.0, 0.0, 0.3, 1.2, 0.0])).unwrap(), SubsetId(7));
}

#[test]
fn orbit_functions() {
    assert_eq!(orbit_invariant(&p(4, &[1.0, 0.0, 1.0, 1.0])).unwrap(), Some(c(-4.0)));
    assert_eq!(orbit_invariant(&p(4, &[0.3, 0.0, 1.0, 1.0])).unwrap(), Some(c(-1.2)));
    assert_eq!(orbit_invariant(&p(8, &[1.0, 0.0, 1.0, 0.5, 1.0, 0.0])).unwrap(), Some(c(-0.25)));
}

#[test]
fn canonical_forms() {
    let l = canonicalize(&p(4, &[1.0, 0.0, 1.0, 1.0])).unwrap();
    assert_eq!((l.subset, l.lambda), (SubsetId(1), Some(ONE)));
    assert_eq!(l.representative, p(4, &[1.0, 0.0, 1.0, 1.0]));
    assert_eq!(l.witness, AdaptedTransform::identity(4));

    let l = canonicalize(&p(4, &[0.0, 2.0, 1.0, 1.0])).unwrap();
    assert_eq!(l.subset, SubsetId(1));
    assert!((l.lambda.unwrap() + ONE).norm() < 1e-12);
    assert!(l.representative.max_rel_diff(&p(4, &[-1.0, 0.0, 1.0, 1.0])) < 1e-12);

    let l = canonicalize(&p(4, &[0.3, 0.9, 1.4, 0.0])).unwrap();
    assert_eq!(l.subset, SubsetId(2));
    assert!(l.representative.max_rel_diff(&p(4, &[1.0, 0.0, 1.0, 0.0])) < 1e-12);

    for (n, i, v) in [
        (5, 2, vec![0.0, 1.0, 0.0, 0.0, 1.0]),
        (6, 13, vec![0.0; 5]),
        (8, 10, vec![0.0, 1.0, 0.0, 1.0, 0.0, 0.0]),
    ] {
        let l = canonicalize(&p(n, &v)).unwrap();
        assert_eq!(l.subset, SubsetId(i));
        assert_eq!(l.representative, p(n, &v));
    }
}

#[test]
fn isomorphism_examples() {
    let a = p(4, &[1.0, 0.0, 1.0, 1.0]);
    let same = isomorphic(&a, &a).unwrap();
    assert!(same.isomorphic);
    assert!(same.witness.unwrap().max_rel_diff(&AdaptedTransform::identity(4)) < 1e-15);
    assert!(!isomorphic(&a, &p(4, &[0.0, 2.0, 1.0, 1.0])).unwrap().isomorphic);
    let r = isomorphic(&p(4, &[0.0, 0.0, 1.0, 0.0]), &p(4, &[1.0, 2.0, 1.0, 0.0])).unwrap();
    assert!(r.isomorphic);
    let w = r.witness.unwrap();
    assert!(act_on_params(&w, &p(4, &[0.0, 0.0, 1.0, 0.0])).unwrap().max_rel_diff(&p(4, &[1.0, 2.0, 1.0, 0.0])) < 1e-12);
}

#[test]
fn representative_tables() {
    for (n, count, parametric) in [(4, 9, 1), (5, 13, 2), (6, 13, 2), (7, 17, 3), (8, 17, 3)] {
        let t = representatives(n).unwrap();
        assert_eq!(t.len(), count);
        assert_eq!(t.iter().filter(|e| e.parametric).count(), parametric);
    }
}
