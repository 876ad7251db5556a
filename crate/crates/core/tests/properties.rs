//! Property tests for the multilinear layer and the connection calculus.

use proptest::prelude::*;
use skewtor::catalog::{self, StructureData};
use skewtor::homogeneous::{levi_civita, torsion_of, with_torsion, LieModel};
use skewtor::tensor::{cyclic_sum, endo_action, interior_product, wedge, Tensor};
use skewtor::{d_invariant, Mat};

fn one_form(dim: usize, comps: &[f64]) -> Tensor<f64> {
    Tensor::form(dim, 1, comps[..dim].to_vec()).unwrap()
}

/// A generic alternating form of the requested degree, assembled from
/// wedges of 1-forms so antisymmetry holds by construction.
fn random_form(dim: usize, degree: usize, seeds: &[Vec<f64>]) -> Tensor<f64> {
    let mut total = Tensor::zero_form(dim, degree);
    for chunk in seeds.chunks(degree).take(2) {
        if chunk.len() < degree {
            break;
        }
        let mut acc = one_form(dim, &chunk[0]);
        for s in &chunk[1..] {
            acc = wedge(&acc, &one_form(dim, s)).unwrap();
        }
        total = total.add(&acc);
    }
    total
}

fn coeff() -> impl Strategy<Value = f64> {
    (-100i32..=100).prop_map(|x| f64::from(x) / 25.0)
}

fn seed_vectors(count: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    proptest::collection::vec(proptest::collection::vec(coeff(), 10), count)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Graded commutativity a∧b = (-1)^{pq} b∧a and bilinearity, for
    /// degrees up to 3 in dimensions up to 10.
    #[test]
    fn wedge_graded_commutative_and_bilinear(
        dim in prop_oneof![Just(3usize), Just(4), Just(6), Just(10)],
        p in 1usize..=3,
        q in 1usize..=3,
        seeds in seed_vectors(12),
        scale in coeff(),
    ) {
        prop_assume!(p + q <= dim);
        // Keep the largest case affordable.
        prop_assume!(dim < 10 || p + q <= 4);
        let a = random_form(dim, p, &seeds[0..6]);
        let b = random_form(dim, q, &seeds[6..12]);
        let ab = wedge(&a, &b).unwrap();
        let ba = wedge(&b, &a).unwrap();
        let sign = if (p * q) % 2 == 0 { 1.0 } else { -1.0 };
        let scale_ref = ab.max_abs().max(ba.max_abs()).max(1.0);
        prop_assert!(ab.sub(&ba.scale(&sign)).max_abs() / scale_ref < 1e-12);

        // Bilinearity in the first slot.
        let a2 = random_form(dim, p, &seeds[3..9]);
        let lhs = wedge(&a.add(&a2.scale(&scale)), &b).unwrap();
        let rhs = ab.add(&wedge(&a2, &b).unwrap().scale(&scale));
        let scale_ref2 = lhs.max_abs().max(rhs.max_abs()).max(1.0);
        prop_assert!(lhs.sub(&rhs).max_abs() / scale_ref2 < 1e-12);

        // Outputs are totally antisymmetric.
        prop_assert!(ab.alternation_residual() / scale_ref < 1e-12);
    }

    /// Interior product is an antiderivation:
    /// v⌟(a∧b) = (v⌟a)∧b + (-1)^p a∧(v⌟b).
    #[test]
    fn interior_product_antiderivation(
        dim in prop_oneof![Just(3usize), Just(5), Just(7)],
        p in 1usize..=2,
        q in 1usize..=2,
        seeds in seed_vectors(12),
        v in proptest::collection::vec(coeff(), 10),
    ) {
        prop_assume!(p + q <= dim);
        let a = random_form(dim, p, &seeds[0..6]);
        let b = random_form(dim, q, &seeds[6..12]);
        let vv = v[..dim].to_vec();
        let lhs = interior_product(&vv, &wedge(&a, &b).unwrap()).unwrap();
        let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
        let rhs = wedge(&interior_product(&vv, &a).unwrap(), &b)
            .unwrap()
            .add(&wedge(&a, &interior_product(&vv, &b).unwrap()).unwrap().scale(&sign));
        let scale_ref = lhs.max_abs().max(rhs.max_abs()).max(1.0);
        prop_assert!(lhs.sub(&rhs).max_abs() / scale_ref < 1e-12);
    }

    /// The derivation action represents the commutator:
    /// [A,B]·S = A·(B·S) - B·(A·S).
    #[test]
    fn endo_action_commutator_law(
        a_data in proptest::collection::vec(coeff(), 16),
        b_data in proptest::collection::vec(coeff(), 16),
        seeds in seed_vectors(6),
        deg in 1usize..=3,
    ) {
        let dim = 4;
        let a = Mat { rows: dim, cols: dim, data: a_data };
        let b = Mat { rows: dim, cols: dim, data: b_data };
        let s = random_form(dim, deg, &seeds);
        let lhs = endo_action(&a.commutator(&b), &s);
        let rhs = endo_action(&a, &endo_action(&b, &s))
            .sub(&endo_action(&b, &endo_action(&a, &s)));
        let scale_ref = lhs.max_abs().max(rhs.max_abs()).max(1.0);
        prop_assert!(lhs.sub(&rhs).max_abs() / scale_ref < 1e-11);

        // Same law on endomorphisms.
        let mut phi_data = seeds[0].clone();
        phi_data.extend_from_slice(&seeds[1]);
        phi_data.truncate(16);
        let phi = Mat { rows: dim, cols: dim, data: phi_data };
        let st = Tensor::endomorphism(phi);
        let lhs2 = endo_action(&a.commutator(&b), &st);
        let rhs2 = endo_action(&a, &endo_action(&b, &st))
            .sub(&endo_action(&b, &endo_action(&a, &st)));
        let scale_ref2 = lhs2.max_abs().max(rhs2.max_abs()).max(1.0);
        prop_assert!(lhs2.sub(&rhs2).max_abs() / scale_ref2 < 1e-11);
    }

    /// Wedge is associative in the shuffle normalization.
    #[test]
    fn wedge_associative(
        seeds in seed_vectors(3),
    ) {
        let dim = 6;
        let a = one_form(dim, &seeds[0]);
        let b = one_form(dim, &seeds[1]);
        let c = one_form(dim, &seeds[2]);
        let lhs = wedge(&wedge(&a, &b).unwrap(), &c).unwrap();
        let rhs = wedge(&a, &wedge(&b, &c).unwrap()).unwrap();
        let scale_ref = lhs.max_abs().max(1.0);
        prop_assert!(lhs.sub(&rhs).max_abs() / scale_ref < 1e-12);
    }

    /// The cyclic symmetrizer agrees with its three-term expansion and
    /// fixes alternating 3-forms up to the factor 3.
    #[test]
    fn cyclic_sum_expansion(
        seeds in seed_vectors(6),
    ) {
        let dim = 5;
        let t = random_form(dim, 3, &seeds);
        let f = |x: &[f64], y: &[f64], z: &[f64]| t.eval(&[x, y, z]);
        let c = cyclic_sum(f);
        let x = &seeds[0][..dim];
        let y = &seeds[1][..dim];
        let z = &seeds[2][..dim];
        let direct = f(x, y, z) + f(y, z, x) + f(z, x, y);
        prop_assert!((c(x, y, z) - direct).abs() < 1e-12 * direct.abs().max(1.0));
        prop_assert!((c(x, y, z) - 3.0 * f(x, y, z)).abs() < 1e-11 * f(x, y, z).abs().max(1.0));
    }

    /// Recomputing the torsion of a connection built with a prescribed
    /// skew torsion returns that torsion.
    #[test]
    fn with_torsion_roundtrip(t_scalar in coeff(), delta in 1i32..=4) {
        let entry = catalog::su2_3ad(1.0, f64::from(delta)).unwrap();
        let lc = levi_civita(&entry.model);
        let e: Vec<Tensor<f64>> = (0..3)
            .map(|i| {
                let mut c = vec![0.0; 3];
                c[i] = 1.0;
                Tensor::form(3, 1, c).unwrap()
            })
            .collect();
        let vol = wedge(&wedge(&e[0], &e[1]).unwrap(), &e[2]).unwrap();
        let t = vol.scale(&t_scalar);
        let conn = with_torsion(&entry.model, &lc, &t, 1e-12).unwrap();
        let back = torsion_of(&entry.model, &conn);
        prop_assert!(back.sub(&t).max_abs() < 1e-12);
        for la in &conn.lambda {
            prop_assert!(entry.model.fiber.skew_adjoint_residual(la) < 1e-12);
        }
    }

    /// d² = 0 on invariant 1-forms of the 7-dimensional sphere model.
    #[test]
    fn d_squared_vanishes_on_flagship(c1 in coeff(), c2 in coeff(), c3 in coeff()) {
        let entry = catalog::sp2_s7(1.0, 2.0).unwrap();
        let StructureData::ThreeAD(triple) = &entry.structure else {
            unreachable!()
        };
        // Invariant 1-forms are spanned by the eta_i.
        let mut comps = vec![0.0; 7];
        for (c, i) in [(c1, 0), (c2, 1), (c3, 2)] {
            for (slot, v) in triple.eta[i].iter().enumerate() {
                comps[slot] += c * v;
            }
        }
        let form = Tensor::form(7, 1, comps).unwrap();
        let d1 = d_invariant(&entry.model, &form, 1e-9).unwrap();
        let d2 = d_invariant(&entry.model, &d1, 1e-9).unwrap();
        prop_assert!(d2.max_abs() < 1e-12 * d1.max_abs().max(1.0));
    }
}

/// The exact-rational path keeps the same roundtrip exactly.
#[test]
fn rational_roundtrip_is_exact() {
    use skewtor::scalar::{Rational, Scalar};
    let entry = catalog::su2_3ad(
        <Rational as Scalar>::from_i64(1),
        <Rational as Scalar>::from_i64(2),
    )
    .unwrap();
    let lc = levi_civita(&entry.model);
    let mut comps = vec![<Rational as Scalar>::zero(); 27];
    let val = Rational::new(-7, 3);
    for (i, j, k, sign) in [
        (0usize, 1usize, 2usize, 1i64),
        (1, 2, 0, 1),
        (2, 0, 1, 1),
        (0, 2, 1, -1),
        (2, 1, 0, -1),
        (1, 0, 2, -1),
    ] {
        comps[(i * 3 + j) * 3 + k] = val.mul(&<Rational as Scalar>::from_i64(sign));
    }
    let t = Tensor::form(3, 3, comps).unwrap();
    let conn = with_torsion(&entry.model, &lc, &t, 1e-12).unwrap();
    let back = torsion_of(&entry.model, &conn);
    for (a, b) in back.comps.iter().zip(&t.comps) {
        assert_eq!(a, b);
    }
}

/// Invariant splitting checks reject non-spanning inputs instead of
/// reporting on them.
#[test]
fn invariant_splitting_requires_spanning_input() {
    let entry = catalog::su2_3ad(1.0, 1.0).unwrap();
    let lc = levi_civita(&entry.model);
    let err = skewtor::check_invariant_splitting(
        &entry.model,
        &lc,
        &[vec![vec![1.0, 0.0, 0.0]]],
        1e-10,
        &skewtor::HolonomyConfig::default(),
    );
    assert!(matches!(err, Err(skewtor::GeometryError::NotSpanning { .. })));
    let _ = LieModel::<f64>::new(
        "bad",
        vec!["a".into()],
        vec![0.0; 2],
        vec![],
        vec![0],
        Mat::identity(1),
    )
    .unwrap_err();
}
