//! Acceptance suite: one test per criterion, each printing a pass line
//! with the measured quantities. Tolerances are pinned here.

use skewtor::catalog::{self, StructureData};
use skewtor::homogeneous::{
    bianchi_check, holonomy_algebra, nabla_residual, validate_model, HolonomyConfig,
    NomizuConnection,
};
use skewtor::nk::{
    build_nk_quotient, check_characteristic_match, check_special_algebraic_torsion,
    check_tj_formulas, compute_f, NKQuotientResult,
};
use skewtor::qk::{
    build_qk_quotient, check_quaternionic_parallelism, einstein_check, measure_nabla_j_squared,
    weyl_self_dual_check, NearlyKahlerInput,
};
use skewtor::sasaki::{
    canonical_connection, check_lie_identities, check_nearly_kahler, measure_beta,
    validate_acm, NearlyKahlerStructure,
};
use skewtor::scalar::{Rational, Scalar};
use skewtor::suites::{resolve_model, run_tower, ModelSource, SuiteOptions};
use skewtor::Status;

fn cfg() -> HolonomyConfig {
    HolonomyConfig::default()
}

fn flagship_nk(alpha: f64) -> NKQuotientResult<f64> {
    let entry = catalog::sp2_s7(alpha, 2.0 * alpha).unwrap();
    let StructureData::ThreeAD(triple) = &entry.structure else {
        unreachable!()
    };
    build_nk_quotient(&entry.model, triple, None, 1e-10, &cfg()).unwrap()
}

fn triple_of(entry: &catalog::CatalogEntry<f64>) -> &skewtor::sasaki::AlmostContactTriple<f64> {
    match &entry.structure {
        StructureData::ThreeAD(t) => t,
        _ => panic!("expected a 3-contact structure"),
    }
}

/// Criterion 1: the measured derivative-law constant equals 2(delta - 2
/// alpha) on both model families across the parameter grid.
#[test]
fn criterion_01_beta_law() {
    let grid = [(1.0, 1.0), (1.0, 2.0), (2.0, 1.0), (1.0, 5.0)];
    let tol = 1e-9;
    for (alpha, delta) in grid {
        for name in ["su2_3ad", "sp2_s7"] {
            let entry = catalog::build_base::<f64>(name, alpha, delta).unwrap();
            let triple = triple_of(&entry);
            let canon = canonical_connection(&entry.model, triple, tol).unwrap();
            let (beta, fit) = measure_beta(&entry.model, &canon.connection, triple);
            let expected = 2.0 * (delta - 2.0 * alpha);
            assert!(
                (beta - expected).abs() < tol,
                "{name}({alpha},{delta}): beta {beta} vs {expected}"
            );
            assert!(fit < tol, "{name}({alpha},{delta}): law fit residual {fit}");
        }
    }
    println!("[PASS] criterion 1: beta = 2(delta - 2 alpha) on both families across {grid:?}");
}

/// Criterion 2: the canonical torsion is parallel on every catalog
/// 3-contact model; exactly zero in rational mode.
#[test]
fn criterion_02_parallel_torsion() {
    let tol = 1e-10;
    for (alpha, delta) in [(1.0, 1.0), (1.0, 2.0), (2.0, 1.0), (1.0, 5.0), (0.5, 1.0)] {
        for name in ["su2_3ad", "sp2_s7"] {
            let entry = catalog::build_base::<f64>(name, alpha, delta).unwrap();
            let triple = triple_of(&entry);
            let canon = canonical_connection(&entry.model, triple, tol).unwrap();
            let res = nabla_residual(&entry.model, &canon.connection, &canon.connection.torsion);
            assert!(res < tol, "{name}({alpha},{delta}): nabla T residual {res}");
        }
    }
    // Exact mode: symbolically zero.
    for (a, d) in [(1i64, 2i64), (1, 1)] {
        let entry = catalog::sp2_s7(
            <Rational as Scalar>::from_i64(a),
            <Rational as Scalar>::from_i64(d),
        )
        .unwrap();
        let StructureData::ThreeAD(triple) = &entry.structure else {
            unreachable!()
        };
        let canon = canonical_connection(&entry.model, triple, 1e-12).unwrap();
        let check = canon.report.find("parallel_torsion").unwrap();
        assert_eq!(check.exact_zero, Some(true), "rational mode not exact");
    }
    println!("[PASS] criterion 2: canonical torsion parallel (< 1e-10; exact zero in rational mode)");
}

/// Criterion 3: the first Bianchi identity with torsion holds on all
/// basis quadruples of the flagship; a one percent torsion tamper is
/// detected.
#[test]
fn criterion_03_bianchi() {
    let entry = catalog::sp2_s7(1.0, 2.0).unwrap();
    let triple = triple_of(&entry);
    let canon = canonical_connection(&entry.model, triple, 1e-10).unwrap();
    let rep = bianchi_check(&entry.model, &canon.connection, 1e-10);
    assert!(rep.passed(), "{}", rep.render_text());
    let residual = rep.find("first_bianchi_with_torsion").unwrap().residual;
    assert!(residual < 1e-10);

    let mut tampered_torsion = canon.connection.torsion.clone();
    let dm = 7;
    let idx = (0 * dm + 3) * dm + 4;
    let bump = tampered_torsion.comps[idx] * 0.01;
    tampered_torsion.comps[idx] += bump;
    tampered_torsion.comps[(3 * dm + 0) * dm + 4] -= bump;
    let tampered =
        NomizuConnection::from_parts_unchecked(canon.connection.lambda.clone(), tampered_torsion);
    let rep2 = bianchi_check(&entry.model, &tampered, 1e-10);
    let detected = rep2.find("first_bianchi_with_torsion").unwrap().residual;
    assert!(detected > 1e-4, "tamper residual only {detected}");
    println!(
        "[PASS] criterion 3: first Bianchi residual {residual:.2e} < 1e-10; 1% tamper detected at {detected:.2e} > 1e-4"
    );
}

/// Criterion 4: the Reeb Lie-derivative identities with the exact factor
/// 2 delta hold on every catalog model.
#[test]
fn criterion_04_lie_identities() {
    let tol = 1e-10;
    for (alpha, delta) in [(1.0, 1.0), (1.0, 2.0), (2.0, 1.0), (1.0, 5.0)] {
        for name in ["su2_3ad", "sp2_s7"] {
            let entry = catalog::build_base::<f64>(name, alpha, delta).unwrap();
            let triple = triple_of(&entry);
            let rep = check_lie_identities(&entry.model, triple, tol).unwrap();
            assert!(rep.passed(), "{name}({alpha},{delta}):\n{}", rep.render_text());
        }
    }
    println!("[PASS] criterion 4: Reeb Lie identities reproduce the factor 2 delta (< 1e-10)");
}

/// Criterion 5: the nearly Kähler quotient of the flagship passes every
/// structural identity at 1e-10.
#[test]
fn criterion_05_nk_quotient() {
    let tol = 1e-10;
    let nk = flagship_nk(1.0);
    for name in [
        "j_squared",
        "projected_torsion_formula",
        "projected_connection_hermitian",
        "nearly_kahler_condition",
    ] {
        let c = nk.report.find(name).unwrap();
        assert!(
            matches!(c.status, Status::Pass),
            "{name}: {}",
            nk.report.render_text()
        );
        assert!(c.residual < tol, "{name} residual {}", c.residual);
    }
    let tj = check_tj_formulas(&nk, tol);
    assert!(tj.passed(), "{}", tj.render_text());
    let cm = check_characteristic_match(&nk, tol).unwrap();
    assert!(cm.passed(), "{}", cm.render_text());
    println!(
        "[PASS] criterion 5: nearly Kähler quotient certified (J², torsion formula, Hermitian projected connection, nearly Kähler condition, ±4 alpha derivative pairings, characteristic identity; all < 1e-10)"
    );
}

/// Criterion 6: F = -8 alpha² id on the horizontal block by two
/// independent computation paths.
#[test]
fn criterion_06_f_scalar() {
    let tol = 1e-10;
    for alpha in [1.0, 0.5] {
        let nk = flagship_nk(alpha);
        let f = compute_f(&nk, tol).unwrap();
        assert!(f.report.passed(), "{}", f.report.render_text());
        assert!(f.report.find("f_two_paths_agree").unwrap().residual < tol);
        assert!(
            (f.scalar + 8.0 * alpha * alpha).abs() < tol,
            "alpha={alpha}: scalar {}",
            f.scalar
        );
    }
    println!("[PASS] criterion 6: F = -8 alpha² id on H for alpha in {{1, 1/2}}; paths agree to 1e-10");
}

/// Criterion 7: the quaternionic stage satisfies the quaternion
/// relations with the sqrt(2/k) normalization, the span of the derivative
/// closes, and the 4-dimensional base is Einstein and anti-self-dual.
#[test]
fn criterion_07_qk_stage() {
    let nk = flagship_nk(1.0);
    let input = NearlyKahlerInput::from_nk_quotient(&nk);
    let v = nk.base_vertical[0].clone();
    let qk = build_qk_quotient(&input, &nk.base_vertical, &v, 1e-10, &cfg()).unwrap();
    assert!(qk.report.passed(), "{}", qk.report.render_text());
    assert!(qk.report.find("quaternion_relations").unwrap().residual < 1e-10);
    assert!(qk.report.find("anticommutators").unwrap().residual < 1e-10);
    let par = check_quaternionic_parallelism(&qk, 1e-10).unwrap();
    assert!(par.passed(), "{}", par.render_text());
    let einstein = einstein_check(&qk.quotient.base, 1e-8);
    assert!(einstein.passed(), "{}", einstein.render_text());
    assert!(einstein.find("einstein_condition").unwrap().residual < 1e-8);
    let weyl = weyl_self_dual_check(&qk.quotient.base, 1e-8).unwrap();
    assert!(weyl.passed(), "{}", weyl.render_text());
    assert!(weyl.find("self_dual_weyl_vanishes").unwrap().residual < 1e-8);
    println!(
        "[PASS] criterion 7: quaternion relations with sqrt(2/k), span closure of the derivative, Einstein residual < 1e-8, self-dual Weyl residual < 1e-8"
    );
}

/// Criterion 8: the negative controls fail at their named gates and
/// nowhere earlier.
#[test]
fn criterion_08_negative_controls() {
    // (a) The 3-Sasaki point is refused at the named invariance gate.
    let entry = catalog::sp2_s7(1.0, 1.0).unwrap();
    let triple = triple_of(&entry);
    assert!(validate_acm(&entry.model, triple, 1e-10).unwrap().passed());
    let err = build_nk_quotient(&entry.model, triple, None, 1e-10, &cfg()).unwrap_err();
    assert_eq!(err.gate(), Some("span(xi1)-holonomy-invariance"));

    // (b) The non-flipped candidate fails the nearly Kähler check.
    let nk = flagship_nk(1.0);
    let (j_bad, defect) = nk
        .quotient
        .push_endomorphism(&nk.triple.phi[0])
        .unwrap();
    assert!(defect < 1e-12);
    let candidate = NearlyKahlerStructure {
        j: j_bad,
        characteristic_torsion: nk.quotient.projected_torsion.clone(),
    };
    let rep = check_nearly_kahler(&nk.quotient.base, &candidate, 1e-10).unwrap();
    assert!(!rep.passed());
    let failed = rep.find("nearly_kahler_condition").unwrap();
    assert!(matches!(failed.status, Status::Fail));
    // The algebraic invariants still hold; the defining condition fails.
    assert!(matches!(rep.find("j_squared").unwrap().status, Status::Pass));

    // (c) broken_jacobi fails validation at the Jacobi identity, with
    // antisymmetry still passing.
    let bj = catalog::broken_jacobi::<f64>();
    let val = validate_model(&bj.model, 1e-10);
    assert!(!val.passed());
    assert!(matches!(
        val.find("jacobi_identity").unwrap().status,
        Status::Fail
    ));
    assert!(matches!(
        val.find("bracket_antisymmetry").unwrap().status,
        Status::Pass
    ));
    println!(
        "[PASS] criterion 8: negative controls fail at their named gates (span(xi1)-holonomy-invariance; nearly_kahler_condition; jacobi_identity)"
    );
}

/// Criterion 9: the two-stage tower agrees with the direct quotient
/// along the whole Reeb space, in metric and quaternionic span.
#[test]
fn criterion_09_tower_consistency() {
    let opts = SuiteOptions {
        tol: 1e-9,
        ..SuiteOptions::default()
    };
    let resolved = resolve_model::<f64>(ModelSource::Catalog("sp2_s7"), 1.0, 2.0, &opts).unwrap();
    let outcome = run_tower(&resolved, &opts).unwrap();
    assert!(
        outcome.all_passed(),
        "{}",
        outcome
            .reports
            .iter()
            .map(|r| r.render_text())
            .collect::<Vec<_>>()
            .join("\n")
    );
    let consistency = outcome
        .reports
        .iter()
        .find(|r| r.suite == "tower-consistency")
        .unwrap();
    for c in &consistency.checks {
        assert!(c.residual < 1e-9, "{}: {}", c.name, c.residual);
    }
    println!("[PASS] criterion 9: tower agrees with the direct quotient (metric and quaternionic span, < 1e-9)");
}

/// Criterion 10: the squared vertical derivative of J is a scalar that
/// matches exactly one of the two candidate values, and the almost
/// complex squares hold regardless.
#[test]
fn criterion_10_nabla_j_squared_resolution() {
    let nk = flagship_nk(1.0);
    let input = NearlyKahlerInput::from_nk_quotient(&nk);
    let v = nk.base_vertical[0].clone();
    let (scalar, rep) = measure_nabla_j_squared(&input, &v, 1e-10).unwrap();
    assert!(rep.passed(), "{}", rep.render_text());
    let qk = build_qk_quotient(&input, &nk.base_vertical, &v, 1e-10, &cfg()).unwrap();
    let k = qk.k;
    let d_half_k = (scalar + k / 2.0).abs();
    let d_half_k2 = (scalar + k * k / 2.0).abs();
    // Exactly one candidate matches (k = 8 here).
    assert!(d_half_k < 1e-10 && d_half_k2 > 1.0, "scalar {scalar}, k {k}");
    let note = &rep.find("scalar_identification").unwrap().notes;
    assert!(note.contains("matches -k/2"), "note: {note}");
    // The almost complex squares hold with the chosen normalization.
    assert!(qk.report.find("almost_complex_squares").unwrap().residual < 1e-10);
    println!(
        "[PASS] criterion 10: (nabla_V J)² = {scalar} id matches -k/2 (report records the match); I_a² = -id holds"
    );
}

/// Supporting regression: holonomy output is closed under commutators and
/// every element is skew-adjoint, and the special-torsion projections of
/// the nearly Kähler base vanish.
#[test]
fn supporting_holonomy_and_special_torsion() {
    let entry = catalog::sp2_s7(1.0, 2.0).unwrap();
    let triple = triple_of(&entry);
    let canon = canonical_connection(&entry.model, triple, 1e-10).unwrap();
    let hol = holonomy_algebra(&entry.model, &canon.connection, &cfg());
    assert!(!hol.basis.is_empty());
    let mut span = skewtor::linalg::SpanBasis::new(49, 1e-9);
    for b in &hol.basis {
        span.insert(&b.data);
        assert!(entry.model.fiber.skew_adjoint_residual(b) < 1e-10);
    }
    for a in &hol.basis {
        for b in &hol.basis {
            let c = a.commutator(b);
            assert!(span.residual(&c.data) < 1e-10, "commutator escapes the span");
        }
    }
    // Every holonomy element annihilates each Reeb direction on the
    // parallel model.
    for b in &hol.basis {
        for xi in &triple.xi {
            let v = b.apply(xi);
            assert!(skewtor::linalg::vec_max_abs(&v) < 1e-10);
        }
    }

    let nk = flagship_nk(1.0);
    let rep = check_special_algebraic_torsion(&nk, 1e-10).unwrap();
    assert!(rep.passed(), "{}", rep.render_text());

    // Curvature of the parallel model commutes with every structure
    // endomorphism (the connection parallelizes them).
    let r = skewtor::curvature(&entry.model, &canon.connection);
    for a in 0..7 {
        for b in 0..7 {
            for phi in &triple.phi {
                assert!(r.at(a, b).commutator(phi).max_abs() < 1e-10);
            }
        }
    }
}
