//! Built-in model catalog with exact data, the scaling solver used to
//! derive metric parameters, and negative-control models.
//!
//! The sp(2) structure constants are generated from the quaternionic
//! matrix model (2x2 anti-Hermitian quaternion matrices) rather than
//! hand-typed, and cross-checked by the Jacobi residual in tests.

use crate::error::GeometryError;
use crate::homogeneous::LieModel;
use crate::linalg::Mat;
use crate::sasaki::AlmostContactTriple;
use crate::scalar::Scalar;
use crate::tensor::Tensor;

/// Quaternion as coefficients over (1, i, j, k).
type Quat<S> = [S; 4];

fn qzero<S: Scalar>() -> Quat<S> {
    [S::zero(), S::zero(), S::zero(), S::zero()]
}

fn qunit<S: Scalar>(a: usize) -> Quat<S> {
    let mut q = qzero();
    q[a] = S::one();
    q
}

fn qadd<S: Scalar>(x: &Quat<S>, y: &Quat<S>) -> Quat<S> {
    [
        x[0].add(&y[0]),
        x[1].add(&y[1]),
        x[2].add(&y[2]),
        x[3].add(&y[3]),
    ]
}

fn qsub<S: Scalar>(x: &Quat<S>, y: &Quat<S>) -> Quat<S> {
    [
        x[0].sub(&y[0]),
        x[1].sub(&y[1]),
        x[2].sub(&y[2]),
        x[3].sub(&y[3]),
    ]
}


fn qconj<S: Scalar>(x: &Quat<S>) -> Quat<S> {
    [x[0].clone(), x[1].neg(), x[2].neg(), x[3].neg()]
}

fn qmul<S: Scalar>(x: &Quat<S>, y: &Quat<S>) -> Quat<S> {
    [
        x[0].mul(&y[0])
            .sub(&x[1].mul(&y[1]))
            .sub(&x[2].mul(&y[2]))
            .sub(&x[3].mul(&y[3])),
        x[0].mul(&y[1])
            .add(&x[1].mul(&y[0]))
            .add(&x[2].mul(&y[3]))
            .sub(&x[3].mul(&y[2])),
        x[0].mul(&y[2])
            .sub(&x[1].mul(&y[3]))
            .add(&x[2].mul(&y[0]))
            .add(&x[3].mul(&y[1])),
        x[0].mul(&y[3])
            .add(&x[1].mul(&y[2]))
            .sub(&x[2].mul(&y[1]))
            .add(&x[3].mul(&y[0])),
    ]
}

/// Anti-Hermitian 2x2 quaternion matrix `[[a, b], [-conj(b), c]]` with
/// imaginary diagonal entries.
#[derive(Clone)]
struct Sp2Element<S> {
    a: Quat<S>,
    b: Quat<S>,
    c: Quat<S>,
}

impl<S: Scalar> Sp2Element<S> {
    fn zero() -> Self {
        Sp2Element {
            a: qzero(),
            b: qzero(),
            c: qzero(),
        }
    }

    fn commutator(&self, rhs: &Sp2Element<S>) -> Sp2Element<S> {
        let m11 = |x: &Self, y: &Self| qsub(&qmul(&x.a, &y.a), &qmul(&x.b, &qconj(&y.b)));
        let m12 = |x: &Self, y: &Self| qadd(&qmul(&x.a, &y.b), &qmul(&x.b, &y.c));
        let m22 = |x: &Self, y: &Self| {
            qsub(&qmul(&x.c, &y.c), &qmul(&qconj(&x.b), &y.b))
        };
        Sp2Element {
            a: qsub(&m11(self, rhs), &m11(rhs, self)),
            b: qsub(&m12(self, rhs), &m12(rhs, self)),
            c: qsub(&m22(self, rhs), &m22(rhs, self)),
        }
    }
}

/// Basis order of sp(2): V_1..V_3 (upper diagonal), B_1, B_i, B_j, B_k
/// (off-diagonal), W_1..W_3 (lower diagonal, the isotropy sp(1)).
fn sp2_basis<S: Scalar>() -> Vec<Sp2Element<S>> {
    let mut out = Vec::with_capacity(10);
    for m in 1..=3 {
        let mut e = Sp2Element::zero();
        e.a = qunit(m);
        out.push(e);
    }
    for q in 0..4 {
        let mut e = Sp2Element::zero();
        e.b = qunit(q);
        out.push(e);
    }
    for m in 1..=3 {
        let mut e = Sp2Element::zero();
        e.c = qunit(m);
        out.push(e);
    }
    out
}

/// Structure constants of sp(2) in the basis above.
pub fn sp2_structure_constants<S: Scalar>() -> Vec<S> {
    let basis = sp2_basis::<S>();
    let n = 10;
    let mut c = vec![S::zero(); n * n * n];
    for i in 0..n {
        for j in 0..n {
            let br = basis[i].commutator(&basis[j]);
            debug_assert!(br.a[0].is_zero() && br.c[0].is_zero());
            for m in 0..3 {
                c[(i * n + j) * n + m] = br.a[m + 1].clone();
                c[(i * n + j) * n + 7 + m] = br.c[m + 1].clone();
            }
            for q in 0..4 {
                c[(i * n + j) * n + 3 + q] = br.b[q].clone();
            }
        }
    }
    c
}

/// Left quaternion multiplication by the imaginary unit `e_{axis+1}`,
/// restricted to imaginary quaternions (3x3 block).
fn rot_block<S: Scalar>(axis: usize) -> Mat<S> {
    let mut m = Mat::zeros(3, 3);
    for n in 0..3 {
        let col = qmul(&qunit::<S>(axis + 1), &qunit(n + 1));
        for r in 0..3 {
            m.set(r, n, col[r + 1].clone());
        }
    }
    m
}

/// Left quaternion multiplication by `e_{axis+1}` on all of H (4x4 block).
fn left_mult_block<S: Scalar>(axis: usize) -> Mat<S> {
    let mut m = Mat::zeros(4, 4);
    for n in 0..4 {
        let col = qmul(&qunit::<S>(axis + 1), &qunit(n));
        for r in 0..4 {
            m.set(r, n, col[r].clone());
        }
    }
    m
}

fn block_diag<S: Scalar>(v_block: &Mat<S>, h_block: &Mat<S>) -> Mat<S> {
    let dm = v_block.rows + h_block.rows;
    let mut m = Mat::zeros(dm, dm);
    for i in 0..v_block.rows {
        for j in 0..v_block.cols {
            m.set(i, j, v_block.at(i, j).clone());
        }
    }
    for i in 0..h_block.rows {
        for j in 0..h_block.cols {
            m.set(v_block.rows + i, v_block.cols + j, h_block.at(i, j).clone());
        }
    }
    m
}

/// Structure data attached to a catalog model.
#[derive(Clone, Debug)]
pub enum StructureData<S> {
    ThreeAD(AlmostContactTriple<S>),
    /// A designated parallel skew torsion (product models).
    SkewTorsion(Tensor<S>),
    None,
}

/// Frozen scalar expectations derived by the pre-build oracles.
#[derive(Clone, Debug)]
pub struct ExpectedScalar<S> {
    pub name: &'static str,
    pub value: S,
    pub tol: f64,
}

#[derive(Clone, Debug)]
pub struct CatalogEntry<S> {
    pub name: String,
    pub description: String,
    pub model: LieModel<S>,
    pub structure: StructureData<S>,
    pub expected: Vec<ExpectedScalar<S>>,
    /// For negative controls: the named check that must fail, with every
    /// earlier pipeline stage passing.
    pub expect_failure_at: Option<&'static str>,
}

#[derive(Clone, Debug)]
pub struct CatalogSummary {
    pub name: &'static str,
    pub description: &'static str,
    pub takes_params: bool,
}

pub fn catalog_list() -> Vec<CatalogSummary> {
    vec![
        CatalogSummary {
            name: "su2_3ad",
            description: "3-dimensional model, [xi_i, xi_j] = 2 delta xi_k, unit Reeb frame; horizontal space is trivial",
            takes_params: true,
        },
        CatalogSummary {
            name: "sp2_s7",
            description: "7-dimensional sphere model Sp(2)/Sp(1) with solved metric scalings s_V = 1/delta^2, s_H = 1/(alpha delta)",
            takes_params: true,
        },
        CatalogSummary {
            name: "cp3_nk",
            description: "nearly Kahler 6-dimensional quotient of sp2_s7(alpha, 2 alpha) along the first Reeb direction",
            takes_params: true,
        },
        CatalogSummary {
            name: "s4_qk",
            description: "4-dimensional quaternionic Kahler base of the full tower from sp2_s7(alpha, 2 alpha)",
            takes_params: true,
        },
        CatalogSummary {
            name: "product_s3xs3",
            description: "direct sum of two 3-dimensional models with decomposable parallel torsion",
            takes_params: true,
        },
        CatalogSummary {
            name: "broken_jacobi",
            description: "negative control: structure constants violating the Jacobi identity",
            takes_params: false,
        },
        CatalogSummary {
            name: "broken_acm",
            description: "negative control: sphere model with phi_1 negated, violating the quaternionic product axiom",
            takes_params: false,
        },
    ]
}

fn epsilon<S: Scalar>(i: usize, j: usize, k: usize) -> S {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => S::one(),
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => S::one().neg(),
        _ => S::zero(),
    }
}

fn su2_constants<S: Scalar>(bracket_scale: &S) -> Vec<S> {
    let mut c = vec![S::zero(); 27];
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                c[(i * 3 + j) * 3 + k] = bracket_scale.mul(&epsilon::<S>(i, j, k));
            }
        }
    }
    c
}

fn standard_three_basis<S: Scalar>() -> [Vec<S>; 3] {
    let mut out: [Vec<S>; 3] = [vec![], vec![], vec![]];
    for (i, o) in out.iter_mut().enumerate() {
        let mut v = vec![S::zero(); 3];
        v[i] = S::one();
        *o = v;
    }
    out
}

/// 3-dimensional model with `[xi_i, xi_j] = 2 delta xi_k` and unit metric.
/// Valid for every real delta, including the degenerate abelian case.
pub fn su2_3ad<S: Scalar>(alpha: S, delta: S) -> Result<CatalogEntry<S>, GeometryError> {
    if alpha.is_zero() {
        return Err(GeometryError::InvalidParameter("alpha must be nonzero".into()));
    }
    let scale = S::from_i64(2).mul(&delta);
    let model = LieModel::new(
        "su2_3ad",
        vec!["xi1".into(), "xi2".into(), "xi3".into()],
        su2_constants(&scale),
        vec![],
        vec![0, 1, 2],
        Mat::identity(3),
    )?;
    let e = standard_three_basis::<S>();
    let triple = AlmostContactTriple {
        xi: e.clone(),
        eta: e,
        phi: [rot_block(0), rot_block(1), rot_block(2)],
        alpha: alpha.clone(),
        delta: delta.clone(),
    };
    let expected = base_expectations(&alpha, &delta);
    Ok(CatalogEntry {
        name: format!("su2_3ad({alpha},{delta})"),
        description: "3-dimensional catalog model".into(),
        model,
        structure: StructureData::ThreeAD(triple),
        expected,
        expect_failure_at: None,
    })
}

fn base_expectations<S: Scalar>(alpha: &S, delta: &S) -> Vec<ExpectedScalar<S>> {
    let two = S::from_i64(2);
    let beta = two.mul(&delta.sub(&two.mul(alpha)));
    // T(xi1, xi2, xi3) = 2 delta - 8 alpha, from expanding the canonical
    // torsion on the vertical space.
    let tv = two.mul(delta).sub(&S::from_i64(8).mul(alpha));
    vec![
        ExpectedScalar {
            name: "beta",
            value: beta,
            tol: 1e-9,
        },
        ExpectedScalar {
            name: "torsion_vertical_scalar",
            value: tv,
            tol: 1e-10,
        },
    ]
}

fn parallel_expectations<S: Scalar>(alpha: &S) -> Vec<ExpectedScalar<S>> {
    let eight_a2 = S::from_i64(8).mul(&alpha.mul(alpha));
    vec![
        ExpectedScalar {
            name: "nk_k",
            value: eight_a2.clone(),
            tol: 1e-10,
        },
        ExpectedScalar {
            name: "f_scalar",
            value: eight_a2.neg(),
            tol: 1e-10,
        },
        ExpectedScalar {
            name: "nabla_j_squared_scalar",
            value: S::from_i64(-4).mul(&alpha.mul(alpha)),
            tol: 1e-10,
        },
    ]
}

/// The 7-dimensional sphere model with the two-parameter invariant metric
/// solved for (alpha, delta): `s_V = 1/delta^2`, `s_H = 1/(alpha delta)`.
pub fn sp2_s7<S: Scalar>(alpha: S, delta: S) -> Result<CatalogEntry<S>, GeometryError> {
    if alpha.is_zero() || delta.is_zero() {
        return Err(GeometryError::InvalidParameter(
            "sp2_s7 needs alpha != 0 and delta != 0".into(),
        ));
    }
    let ad = alpha.mul(&delta);
    if !ad.is_positive() {
        return Err(GeometryError::InvalidParameter(
            "sp2_s7 needs alpha*delta > 0 for a positive definite metric".into(),
        ));
    }
    let s_v = S::one().div(&delta.mul(&delta));
    let s_h = S::one().div(&ad);
    let mut metric = Mat::zeros(7, 7);
    for i in 0..3 {
        metric.set(i, i, s_v.clone());
    }
    for i in 3..7 {
        metric.set(i, i, s_h.clone());
    }
    let labels = vec![
        "v1".into(),
        "v2".into(),
        "v3".into(),
        "b1".into(),
        "bi".into(),
        "bj".into(),
        "bk".into(),
        "w1".into(),
        "w2".into(),
        "w3".into(),
    ];
    let model = LieModel::new(
        "sp2_s7",
        labels,
        sp2_structure_constants::<S>(),
        vec![7, 8, 9],
        vec![0, 1, 2, 3, 4, 5, 6],
        metric,
    )?;

    // Unit Reeb fields xi_i = delta V_i, with eta_i = xi_i^flat = V^i/delta.
    let mut xi: [Vec<S>; 3] = [vec![], vec![], vec![]];
    let mut eta: [Vec<S>; 3] = [vec![], vec![], vec![]];
    for i in 0..3 {
        let mut x = vec![S::zero(); 7];
        x[i] = delta.clone();
        let mut w = vec![S::zero(); 7];
        w[i] = S::one().div(&delta);
        xi[i] = x;
        eta[i] = w;
    }
    let phi = [
        block_diag(&rot_block::<S>(0), &left_mult_block::<S>(0)),
        block_diag(&rot_block::<S>(1), &left_mult_block::<S>(1)),
        block_diag(&rot_block::<S>(2), &left_mult_block::<S>(2)),
    ];
    let triple = AlmostContactTriple {
        xi,
        eta,
        phi,
        alpha: alpha.clone(),
        delta: delta.clone(),
    };
    let mut expected = base_expectations(&alpha, &delta);
    if triple.is_parallel() {
        expected.extend(parallel_expectations(&alpha));
    }
    Ok(CatalogEntry {
        name: format!("sp2_s7({alpha},{delta})"),
        description: "7-dimensional sphere catalog model".into(),
        model,
        structure: StructureData::ThreeAD(triple),
        expected,
        expect_failure_at: None,
    })
}

/// Direct sum of two 3-dimensional models with torsion `T_1 + T_2`, each
/// factor carrying its canonical torsion. The torsion is decomposable by
/// construction.
pub fn product_s3xs3<S: Scalar>(alpha: S, delta: S) -> Result<CatalogEntry<S>, GeometryError> {
    let scale = S::from_i64(2).mul(&delta);
    let block = su2_constants(&scale);
    let n = 6;
    let mut c = vec![S::zero(); n * n * n];
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                c[(i * n + j) * n + k] = block[(i * 3 + j) * 3 + k].clone();
                c[((i + 3) * n + (j + 3)) * n + (k + 3)] = block[(i * 3 + j) * 3 + k].clone();
            }
        }
    }
    let model = LieModel::new(
        "product_s3xs3",
        (1..=6).map(|i| format!("e{i}")).collect(),
        c,
        vec![],
        (0..6).collect(),
        Mat::identity(6),
    )?;
    // Canonical scalar of each factor: 2 delta - 8 alpha on its volume form.
    let t_scalar = S::from_i64(2)
        .mul(&delta)
        .sub(&S::from_i64(8).mul(&alpha));
    let mut comps = vec![S::zero(); n * n * n];
    let mut put = |i: usize, j: usize, k: usize, v: S| {
        comps[(i * n + j) * n + k] = v;
    };
    for p in [(0usize, 1usize, 2usize), (3, 4, 5)] {
        let idx = [p.0, p.1, p.2];
        for (pi, perm) in [
            ([0, 1, 2], false),
            ([1, 2, 0], false),
            ([2, 0, 1], false),
            ([0, 2, 1], true),
            ([2, 1, 0], true),
            ([1, 0, 2], true),
        ]
        .iter()
        .map(|(p, odd)| (*p, *odd))
        {
            let v = if perm {
                t_scalar.neg()
            } else {
                t_scalar.clone()
            };
            put(idx[pi[0]], idx[pi[1]], idx[pi[2]], v);
        }
    }
    let torsion = Tensor::form(n, 3, comps)?;
    Ok(CatalogEntry {
        name: format!("product_s3xs3({alpha},{delta})"),
        description: "decomposable-torsion product control".into(),
        model,
        structure: StructureData::SkewTorsion(torsion),
        expected: vec![],
        expect_failure_at: None,
    })
}

/// Negative control: constants that violate the Jacobi identity.
pub fn broken_jacobi<S: Scalar>() -> CatalogEntry<S> {
    let mut c = su2_constants(&S::from_i64(2));
    // Give [e_1, e_2] a component along e_1, keeping antisymmetry.
    let idx = |i: usize, j: usize, k: usize| (i * 3 + j) * 3 + k;
    c[idx(0, 1, 0)] = S::one();
    c[idx(1, 0, 0)] = S::one().neg();
    let model = LieModel::new(
        "broken_jacobi",
        vec!["e1".into(), "e2".into(), "e3".into()],
        c,
        vec![],
        vec![0, 1, 2],
        Mat::identity(3),
    )
    .expect("construction succeeds; validation fails later");
    CatalogEntry {
        name: "broken_jacobi".into(),
        description: "fails validate_model at the Jacobi identity".into(),
        model,
        structure: StructureData::None,
        expected: vec![],
        expect_failure_at: Some("jacobi_identity"),
    }
}

/// Negative control: the sphere model with phi_1 negated.
pub fn broken_acm<S: Scalar>() -> Result<CatalogEntry<S>, GeometryError> {
    let mut entry = sp2_s7(S::one(), S::from_i64(2))?;
    if let StructureData::ThreeAD(triple) = &mut entry.structure {
        triple.phi[0] = triple.phi[0].neg();
    }
    entry.name = "broken_acm".into();
    entry.description = "fails validate_acm at the quaternionic product axiom".into();
    entry.expected = vec![];
    entry.expect_failure_at = Some("quaternionic_phi_product");
    Ok(entry)
}

/// Catalog dispatch by name for models that are not derived quotients.
///
/// Entries re-validate on load: algebra axioms and, where present, the
/// structure equation must pass (negative controls are exempt since they
/// exist to fail downstream).
pub fn build_base<S: Scalar>(
    name: &str,
    alpha: S,
    delta: S,
) -> Result<CatalogEntry<S>, GeometryError> {
    let entry = match name {
        "su2_3ad" => su2_3ad(alpha, delta),
        "sp2_s7" => sp2_s7(alpha, delta),
        "product_s3xs3" => product_s3xs3(alpha, delta),
        "broken_jacobi" => Ok(broken_jacobi()),
        "broken_acm" => broken_acm(),
        other => Err(GeometryError::UnknownModel(other.to_string())),
    }?;
    if entry.expect_failure_at.is_none() {
        let tol = 1e-10;
        let val = crate::homogeneous::validate_model(&entry.model, tol);
        if !val.passed() {
            return Err(GeometryError::Refused {
                gate: "catalog-load-validation".into(),
                reason: format!("{} failed model validation on load", entry.name),
            });
        }
        if let StructureData::ThreeAD(triple) = &entry.structure {
            let acm = crate::sasaki::validate_acm(&entry.model, triple, tol)?;
            let tad = crate::sasaki::check_3ad(&entry.model, triple, tol)?;
            if !acm.passed() || !tad.passed() {
                return Err(GeometryError::Refused {
                    gate: "catalog-load-validation".into(),
                    reason: format!("{} failed structure checks on load", entry.name),
                });
            }
        }
    }
    Ok(entry)
}

/// Two-parameter sphere families for the scaling solver.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SphereFamily {
    /// Background bracket `[e_i, e_j] = 2 e_k`, metric `s_V id`; one
    /// active parameter.
    Su2,
    /// The sp(2) model with vertical/horizontal scalings of the diagonal
    /// background metric; two active parameters.
    Sp2S7,
}

/// Signed structure-equation residuals of the scaled family at `(s_v, s_h)`.
fn family_residuals(family: SphereFamily, alpha: f64, delta: f64, s_v: f64, s_h: f64) -> Vec<f64> {
    match family {
        SphereFamily::Su2 => {
            // d eta_1(xi_2, xi_3) + 2 delta with xi = e / sqrt(s_V) and
            // bracket [e_2, e_3] = 2 e_1:
            // -2/sqrt(s_V) + 2 delta - (alpha terms cancel on V).
            vec![-2.0 / s_v.sqrt() + 2.0 * delta]
        }
        SphereFamily::Sp2S7 => {
            // Vertical slot: -2/sqrt(s_V) = -2 delta.
            // Horizontal slot: sqrt(s_V)/s_h = alpha.
            vec![
                -2.0 / s_v.sqrt() + 2.0 * delta,
                s_v.sqrt() / s_h - alpha,
            ]
        }
    }
}

/// Metric scalings `(s_V, s_H)` realizing the target `(alpha, delta)` on a
/// sphere family: coarse grid search followed by Newton refinement with a
/// finite-difference Jacobian. The catalog freezes the rational solutions
/// this solver finds.
pub fn solve_scalings(
    family: SphereFamily,
    alpha: f64,
    delta: f64,
) -> Result<(f64, f64), GeometryError> {
    let n_params = match family {
        SphereFamily::Su2 => 1,
        SphereFamily::Sp2S7 => 2,
    };
    let objective = |s: &[f64]| -> f64 {
        let r = family_residuals(family, alpha, delta, s[0], if n_params == 2 { s[1] } else { 1.0 });
        r.iter().map(|x| x * x).sum::<f64>()
    };
    // Coarse grid over (0, 50]^n.
    let grid: Vec<f64> = (1..=120).map(|i| i as f64 * i as f64 / 288.0).collect();
    let mut best = (f64::INFINITY, vec![1.0; n_params]);
    if n_params == 1 {
        for &a in &grid {
            let f = objective(&[a]);
            if f < best.0 {
                best = (f, vec![a]);
            }
        }
    } else {
        for &a in &grid {
            for &b in &grid {
                let f = objective(&[a, b]);
                if f < best.0 {
                    best = (f, vec![a, b]);
                }
            }
        }
    }
    // Newton on the residual system.
    let mut s = best.1.clone();
    for _ in 0..80 {
        let r: Vec<f64> = family_residuals(family, alpha, delta, s[0], if n_params == 2 { s[1] } else { 1.0 })
            [..n_params]
            .to_vec();
        if r.iter().map(|x| x.abs()).fold(0.0, f64::max) < 1e-14 {
            break;
        }
        let h = 1e-7;
        let mut jac = Mat::<f64>::zeros(n_params, n_params);
        for c in 0..n_params {
            let mut sp = s.clone();
            sp[c] += h;
            let rp = family_residuals(family, alpha, delta, sp[0], if n_params == 2 { sp[1] } else { 1.0 });
            for rix in 0..n_params {
                jac.set(rix, c, (rp[rix] - r[rix]) / h);
            }
        }
        let rhs = Mat {
            rows: n_params,
            cols: 1,
            data: r.clone(),
        };
        let step = match jac.solve(&rhs) {
            Ok(st) => st,
            Err(_) => break,
        };
        let mut ok = true;
        for i in 0..n_params {
            s[i] -= step.at(i, 0);
            if !(s[i].is_finite() && s[i] > 1e-9 && s[i] < 1e6) {
                ok = false;
            }
        }
        if !ok {
            break;
        }
    }
    let s_h = if n_params == 2 { s[1] } else { 1.0 };
    let final_res = family_residuals(family, alpha, delta, s[0], s_h)
        .iter()
        .map(|x| x.abs())
        .fold(0.0, f64::max);
    if !final_res.is_finite() || final_res > 1e-12 {
        return Err(GeometryError::NoSolution {
            summary: format!(
                "no scalings in the search box for (alpha, delta) = ({alpha}, {delta}); best residual {:.3e} at s = {:?}",
                objective(&s).sqrt(),
                s
            ),
        });
    }
    Ok((s[0], s_h))
}

/// Rational reconstruction by continued fractions; used to freeze solver
/// output into the catalog when the solution is (near-)rational.
pub fn snap_to_rational(x: f64, max_den: i64) -> Option<(i64, i64)> {
    if !x.is_finite() {
        return None;
    }
    let (mut p0, mut q0, mut p1, mut q1) = (1i64, 0i64, x.floor() as i64, 1i64);
    let mut frac = x - x.floor();
    for _ in 0..40 {
        if (p1 as f64 / q1 as f64 - x).abs() < 1e-12 * x.abs().max(1.0) {
            return Some((p1, q1));
        }
        if frac.abs() < 1e-15 {
            break;
        }
        let inv = 1.0 / frac;
        let a = inv.floor();
        frac = inv - a;
        let p2 = a as i64 * p1 + p0;
        let q2 = a as i64 * q1 + q0;
        if q2 > max_den {
            break;
        }
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
    }
    if (p1 as f64 / q1 as f64 - x).abs() < 1e-12 * x.abs().max(1.0) {
        Some((p1, q1))
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homogeneous::validate_model;
    use crate::sasaki::{canonical_connection, check_3ad, validate_acm};
    use crate::scalar::Rational;

    #[test]
    fn sp2_constants_satisfy_jacobi_exactly() {
        let entry = sp2_s7(Rational::from_i64(1), Rational::from_i64(2)).unwrap();
        let rep = validate_model(&entry.model, 1e-12);
        assert!(rep.passed(), "{}", rep.render_text());
        for c in &rep.checks {
            assert_eq!(c.exact_zero, Some(true), "{} not exactly zero", c.name);
        }
    }

    #[test]
    fn sp2_bracket_spot_checks() {
        // [V_1, V_2] = 2 V_3, [V_1, B_1] = B_i, [B_1, B_i] = 2V_1 - 2W_1,
        // [W_1, B_1] = -B_i, [V_a, W_b] = 0.
        let c = sp2_structure_constants::<f64>();
        let n = 10;
        let get = |i: usize, j: usize, k: usize| c[(i * n + j) * n + k];
        assert_eq!(get(0, 1, 2), 2.0);
        assert_eq!(get(0, 3, 4), 1.0);
        assert_eq!(get(3, 4, 0), 2.0);
        assert_eq!(get(3, 4, 7), -2.0);
        assert_eq!(get(7, 3, 4), -1.0);
        for a in 0..3 {
            for b in 7..10 {
                for k in 0..10 {
                    assert_eq!(get(a, b, k), 0.0);
                }
            }
        }
    }

    #[test]
    fn s7_validates_as_3ad_model() {
        for (alpha, delta) in [(1.0, 1.0), (1.0, 2.0), (2.0, 1.0), (1.0, 5.0)] {
            let entry = sp2_s7(alpha, delta).unwrap();
            assert!(validate_model(&entry.model, 1e-12).passed());
            let StructureData::ThreeAD(triple) = &entry.structure else {
                panic!("expected triple")
            };
            let acm = validate_acm(&entry.model, triple, 1e-12).unwrap();
            assert!(acm.passed(), "({alpha},{delta}):\n{}", acm.render_text());
            let tad = check_3ad(&entry.model, triple, 1e-12).unwrap();
            assert!(tad.passed(), "({alpha},{delta}):\n{}", tad.render_text());
        }
    }

    #[test]
    fn s7_structure_equation_fails_for_wrong_params() {
        let entry = sp2_s7(1.0, 2.0).unwrap();
        let StructureData::ThreeAD(triple) = &entry.structure else {
            panic!()
        };
        let mut wrong = triple.clone();
        wrong.alpha = 1.0;
        wrong.delta = 1.0;
        let rep = check_3ad(&entry.model, &wrong, 1e-10).unwrap();
        assert!(!rep.passed());
    }

    #[test]
    fn s7_canonical_connection_beta_and_torsion() {
        for (alpha, delta) in [(1.0, 1.0), (1.0, 2.0), (2.0, 1.0), (1.0, 5.0)] {
            let entry = sp2_s7(alpha, delta).unwrap();
            let StructureData::ThreeAD(triple) = &entry.structure else {
                panic!()
            };
            let canon = canonical_connection(&entry.model, triple, 1e-9).unwrap();
            assert!(canon.report.passed(), "{}", canon.report.render_text());
            let t = &canon.connection.torsion;
            let got = t.eval(&[&triple.xi[0], &triple.xi[1], &triple.xi[2]]);
            assert!(
                (got - (2.0 * delta - 8.0 * alpha)).abs() < 1e-10,
                "({alpha},{delta}): vertical torsion scalar {got}"
            );
        }
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(sp2_s7(1.0, -2.0).is_err());
        assert!(sp2_s7(0.0, 1.0).is_err());
        assert!(sp2_s7(1.0, 0.0).is_err());
        assert!(su2_3ad(0.0, 1.0).is_err());
        assert!(build_base("nope", 1.0, 1.0).is_err());
    }

    #[test]
    fn negative_controls_fail_where_expected() {
        let bj = broken_jacobi::<f64>();
        let rep = validate_model(&bj.model, 1e-10);
        assert!(!rep.passed());
        assert!(rep.find("jacobi_identity").unwrap().residual > 0.1);
        assert_eq!(rep.find("bracket_antisymmetry").unwrap().residual, 0.0);

        let ba = broken_acm::<f64>().unwrap();
        assert!(validate_model(&ba.model, 1e-10).passed());
        let StructureData::ThreeAD(triple) = &ba.structure else {
            panic!()
        };
        let acm = validate_acm(&ba.model, triple, 1e-10).unwrap();
        assert!(!acm.passed());
        assert!(acm.find("quaternionic_phi_product").unwrap().residual > 0.1);
    }

    #[test]
    fn product_model_validates_with_decomposable_torsion() {
        let entry = product_s3xs3(1.0, 1.0).unwrap();
        assert!(validate_model(&entry.model, 1e-12).passed());
        let StructureData::SkewTorsion(t) = &entry.structure else {
            panic!()
        };
        assert_eq!(t.alternation_residual(), 0.0);
        // No mixed components.
        for i in 0..3 {
            for j in 3..6 {
                for k in 0..6 {
                    assert_eq!(*t.component(&[i, j, k]), 0.0);
                }
            }
        }
    }

    #[test]
    fn scaling_solver_recovers_closed_forms() {
        for (alpha, delta) in [(1.0, 1.0), (1.0, 2.0), (2.0, 1.0), (1.0, 5.0), (0.5, 1.0)] {
            let (s_v, s_h) = solve_scalings(SphereFamily::Sp2S7, alpha, delta).unwrap();
            assert!((s_v - 1.0 / (delta * delta)).abs() < 1e-10, "({alpha},{delta})");
            assert!((s_h - 1.0 / (alpha * delta)).abs() < 1e-10, "({alpha},{delta})");
        }
        // Degenerate sanity point: equal scalings at (1,1).
        let (s_v, s_h) = solve_scalings(SphereFamily::Sp2S7, 1.0, 1.0).unwrap();
        assert!((s_v - s_h).abs() < 1e-10);

        let (s_v, _) = solve_scalings(SphereFamily::Su2, 1.0, 4.0).unwrap();
        assert!((s_v - 1.0 / 16.0).abs() < 1e-10);
    }

    #[test]
    fn scaling_solver_reports_failure_for_degenerate_target() {
        let err = solve_scalings(SphereFamily::Su2, 1.0, 0.0).unwrap_err();
        match err {
            GeometryError::NoSolution { summary } => {
                assert!(summary.contains("best residual"));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn snap_to_rational_recovers_solver_output() {
        let (s_v, s_h) = solve_scalings(SphereFamily::Sp2S7, 1.0, 2.0).unwrap();
        assert_eq!(snap_to_rational(s_v, 1000), Some((1, 4)));
        assert_eq!(snap_to_rational(s_h, 1000), Some((1, 2)));
        assert_eq!(snap_to_rational(0.333333333333333, 10), Some((1, 3)));
        assert_eq!(snap_to_rational(f64::NAN, 10), None);
    }

    #[test]
    fn rational_mode_has_exact_structure_equation() {
        let entry = sp2_s7(Rational::from_i64(1), Rational::from_i64(2)).unwrap();
        let StructureData::ThreeAD(triple) = &entry.structure else {
            panic!()
        };
        let rep = check_3ad(&entry.model, triple, 1e-12).unwrap();
        assert!(rep.passed());
        assert_eq!(
            rep.find("structure_equation").unwrap().exact_zero,
            Some(true)
        );
    }
}
