//! Almost-contact and 3-(α,δ)-Sasaki structure validation, the canonical
//! connection with skew torsion, and nearly Kähler structure checks.

use crate::error::GeometryError;
use crate::homogeneous::{
    basis_vectors, d_invariant, levi_civita, nabla_residual, torsion_of, with_torsion, LieModel,
    NomizuConnection,
};
use crate::linalg::Mat;
use crate::report::{ResidualMax, VerificationReport};
use crate::scalar::Scalar;
use crate::tensor::{wedge, Tensor};

/// Even permutations of (0,1,2); the (ijk) index triples of the axioms.
pub const EVEN_PERMS: [(usize, usize, usize); 3] = [(0, 1, 2), (1, 2, 0), (2, 0, 1)];

/// Three compatible almost contact metric structures with parameters
/// (α, δ) attached to a reductive model.
#[derive(Clone, Debug)]
pub struct AlmostContactTriple<S> {
    pub xi: [Vec<S>; 3],
    pub eta: [Vec<S>; 3],
    pub phi: [Mat<S>; 3],
    pub alpha: S,
    pub delta: S,
}

impl<S: Scalar> AlmostContactTriple<S> {
    /// The constant of the canonical-connection derivative law,
    /// `β = 2(δ - 2α)`.
    pub fn beta(&self) -> S {
        S::from_i64(2).mul(&self.delta.sub(&S::from_i64(2).mul(&self.alpha)))
    }

    /// True parallel case `δ = 2α` (exact); floats within `tol` are
    /// accepted by callers with a warning.
    pub fn is_parallel(&self) -> bool {
        self.delta.sub(&S::from_i64(2).mul(&self.alpha)).is_zero()
    }

    pub fn parallel_defect(&self) -> f64 {
        self.delta.sub(&S::from_i64(2).mul(&self.alpha)).abs_f64()
    }

    pub fn eta_form(&self, i: usize) -> Tensor<S> {
        Tensor::form_unchecked(self.eta[i].len(), 1, self.eta[i].clone())
    }

    /// Fundamental 2-form `Φ_i(X,Y) = g(X, φ_i Y)`.
    pub fn fundamental_form(&self, model: &LieModel<S>, i: usize) -> Tensor<S> {
        let gphi = model.fiber.metric.matmul(&self.phi[i]);
        Tensor::form_unchecked(model.dim_m(), 2, gphi.data)
    }

    /// Vertical projector `P_V = Σ ξ_i ⊗ η_i`.
    pub fn vertical_projector(&self) -> Mat<S> {
        let dm = self.xi[0].len();
        let mut p: Mat<S> = Mat::zeros(dm, dm);
        for i in 0..3 {
            for a in 0..dm {
                for b in 0..dm {
                    let v = p.at(a, b).add(&self.xi[i][a].mul(&self.eta[i][b]));
                    p.set(a, b, v);
                }
            }
        }
        p
    }

    /// Acts an orthogonal 3x3 parameter on the triple: the new structures
    /// are `ξ'_a = Σ_b R[b][a] ξ_b` and likewise for η and φ. Requires a
    /// special orthogonal matrix (the even-permutation axioms are not
    /// preserved under orientation reversal).
    pub fn rotated(&self, rot: &Mat<S>, tol: f64) -> Result<Self, GeometryError> {
        if rot.rows != 3 || rot.cols != 3 {
            return Err(GeometryError::DimMismatch {
                what: "reeb sphere rotation",
                expected: 3,
                got: rot.rows,
            });
        }
        let defect = rot.transpose().matmul(rot).sub(&Mat::identity(3)).max_abs();
        let det_defect = rot.det().sub(&S::one()).abs_f64();
        let bad = if S::EXACT {
            defect != 0.0 || det_defect != 0.0
        } else {
            defect > tol || det_defect > tol
        };
        if bad {
            return Err(GeometryError::InvalidParameter(format!(
                "rotation is not special orthogonal (orthogonality defect {defect:.3e}, det defect {det_defect:.3e})"
            )));
        }
        let dm = self.xi[0].len();
        let mut xi: [Vec<S>; 3] = [vec![], vec![], vec![]];
        let mut eta: [Vec<S>; 3] = [vec![], vec![], vec![]];
        let mut phi: [Mat<S>; 3] = [Mat::zeros(dm, dm), Mat::zeros(dm, dm), Mat::zeros(dm, dm)];
        for a in 0..3 {
            let mut nxi = vec![S::zero(); dm];
            let mut neta = vec![S::zero(); dm];
            let mut nphi = Mat::zeros(dm, dm);
            for b in 0..3 {
                let c = rot.at(b, a);
                crate::linalg::vec_axpy(&mut nxi, c, &self.xi[b]);
                crate::linalg::vec_axpy(&mut neta, c, &self.eta[b]);
                nphi = nphi.add(&self.phi[b].scale(c));
            }
            xi[a] = nxi;
            eta[a] = neta;
            phi[a] = nphi;
        }
        Ok(AlmostContactTriple {
            xi,
            eta,
            phi,
            alpha: self.alpha.clone(),
            delta: self.delta.clone(),
        })
    }
}

fn outer<S: Scalar>(xi: &[S], eta: &[S]) -> Mat<S> {
    let dm = xi.len();
    let mut m = Mat::zeros(dm, dm);
    for a in 0..dm {
        for b in 0..dm {
            m.set(a, b, xi[a].mul(&eta[b]));
        }
    }
    m
}

fn covector_compose<S: Scalar>(eta: &[S], phi: &Mat<S>) -> Vec<S> {
    let dm = eta.len();
    (0..dm)
        .map(|b| {
            let mut acc = S::zero();
            for a in 0..dm {
                acc = acc.add(&eta[a].mul(phi.at(a, b)));
            }
            acc
        })
        .collect()
}

/// Residual checks for every almost-3-contact axiom.
pub fn validate_acm<S: Scalar>(
    model: &LieModel<S>,
    triple: &AlmostContactTriple<S>,
    tol: f64,
) -> Result<VerificationReport, GeometryError> {
    let dm = model.dim_m();
    if dm % 4 != 3 {
        return Err(GeometryError::InvalidParameter(format!(
            "almost contact structures need dim m = 4n + 3, got {dm}"
        )));
    }
    if triple.alpha.is_zero() {
        return Err(GeometryError::InvalidParameter("alpha must be nonzero".into()));
    }
    let mut rep = VerificationReport::new(
        "acm",
        &model.name,
        &model.fingerprint(&[]),
        S::EXACT,
    );
    let id = Mat::identity(dm);

    let mut phi_xi = ResidualMax::new::<S>();
    let mut eta_phi = ResidualMax::new::<S>();
    let mut phi_sq = ResidualMax::new::<S>();
    let mut compat_metric = ResidualMax::new::<S>();
    let mut unit = ResidualMax::new::<S>();
    let mut dual = ResidualMax::new::<S>();
    for i in 0..3 {
        for v in triple.phi[i].apply(&triple.xi[i]) {
            phi_xi.push(&v);
        }
        for v in covector_compose(&triple.eta[i], &triple.phi[i]) {
            eta_phi.push(&v);
        }
        let want = outer(&triple.xi[i], &triple.eta[i]).sub(&id);
        let sq = triple.phi[i].matmul(&triple.phi[i]);
        for v in &sq.sub(&want).data {
            phi_sq.push(v);
        }
        // g(φX, φY) = g(X,Y) - η(X)η(Y) as matrices: φ^t G φ - G + η⊗η.
        let lhs = triple.phi[i]
            .transpose()
            .matmul(&model.fiber.metric)
            .matmul(&triple.phi[i]);
        let rhs = model.fiber.metric.sub(&outer(&triple.eta[i], &triple.eta[i]));
        for v in &lhs.sub(&rhs).data {
            compat_metric.push(v);
        }
        unit.push(
            &model
                .fiber
                .inner(&triple.xi[i], &triple.xi[i])
                .sub(&S::one()),
        );
        let flat = model.fiber.flat(&triple.xi[i]);
        for (a, b) in flat.iter().zip(&triple.eta[i]) {
            dual.push(&a.sub(b));
        }
    }
    rep.push("phi_annihilates_reeb", "φξ = 0", &phi_xi, tol, "");
    rep.push("eta_phi_vanishes", "η∘φ = 0", &eta_phi, tol, "");
    rep.push("phi_squared", "φ² = -id + ξ⊗η", &phi_sq, tol, "");
    rep.push(
        "phi_metric_compatibility",
        "g(φX,φY) = g(X,Y) - η(X)η(Y)",
        &compat_metric,
        tol,
        "",
    );
    rep.push("reeb_unit_length", "|ξ| = 1", &unit, tol, "");
    rep.push("eta_is_metric_dual", "η = ξ♭", &dual, tol, "");

    let mut perm_xi = ResidualMax::new::<S>();
    let mut perm_eta = ResidualMax::new::<S>();
    let mut perm_phi = ResidualMax::new::<S>();
    for (i, j, k) in EVEN_PERMS {
        for v in crate::linalg::vec_sub(&triple.phi[i].apply(&triple.xi[j]), &triple.xi[k]) {
            perm_xi.push(&v);
        }
        for v in
            crate::linalg::vec_sub(&covector_compose(&triple.eta[i], &triple.phi[j]), &triple.eta[k])
        {
            perm_eta.push(&v);
        }
        let want = triple.phi[k].add(&outer(&triple.xi[i], &triple.eta[j]));
        for v in &triple.phi[i].matmul(&triple.phi[j]).sub(&want).data {
            perm_phi.push(v);
        }
    }
    rep.push("quaternionic_reeb_action", "φ_i ξ_j = ξ_k", &perm_xi, tol, "");
    rep.push("quaternionic_eta_action", "η_i ∘ φ_j = η_k", &perm_eta, tol, "");
    rep.push(
        "quaternionic_phi_product",
        "φ_i φ_j = φ_k + ξ_i⊗η_j",
        &perm_phi,
        tol,
        "",
    );

    let mut inv = ResidualMax::new::<S>();
    for i in 0..3 {
        inv.push_f64(model.invariance_residual(&Tensor::vector(triple.xi[i].clone())));
        inv.push_f64(model.invariance_residual(&triple.eta_form(i)));
        inv.push_f64(model.invariance_residual(&Tensor::endomorphism(triple.phi[i].clone())));
    }
    rep.push(
        "structure_isotropy_invariance",
        "plumbing",
        &inv,
        tol,
        "",
    );
    Ok(rep)
}

/// Residuals of the structure equation
/// `dη_i = 2α Φ_i + 2(α - δ) η_j ∧ η_k` for every even permutation.
pub fn check_3ad<S: Scalar>(
    model: &LieModel<S>,
    triple: &AlmostContactTriple<S>,
    tol: f64,
) -> Result<VerificationReport, GeometryError> {
    let mut rep = VerificationReport::new(
        "3ad",
        &model.name,
        &model.fingerprint(&[]),
        S::EXACT,
    );
    let two_alpha = S::from_i64(2).mul(&triple.alpha);
    let two_ad = S::from_i64(2).mul(&triple.alpha.sub(&triple.delta));
    let mut res = ResidualMax::new::<S>();
    for (i, j, k) in EVEN_PERMS {
        let d_eta = d_invariant(model, &triple.eta_form(i), tol)?;
        let phi = triple.fundamental_form(model, i);
        let etajk = wedge(&triple.eta_form(j), &triple.eta_form(k))?;
        let want = phi.scale(&two_alpha).add(&etajk.scale(&two_ad));
        for v in &d_eta.sub(&want).comps {
            res.push(v);
        }
    }
    rep.push(
        "structure_equation",
        "dη_i = 2αΦ_i + 2(α-δ)η_j∧η_k",
        &res,
        tol,
        "",
    );
    Ok(rep)
}

/// Assembles the canonical torsion
/// `T = 2α Σ η_i ∧ Φ_i - 2(α - δ) η_1∧η_2∧η_3`.
pub fn canonical_torsion<S: Scalar>(
    model: &LieModel<S>,
    triple: &AlmostContactTriple<S>,
) -> Result<Tensor<S>, GeometryError> {
    let dm = model.dim_m();
    let two_alpha = S::from_i64(2).mul(&triple.alpha);
    let two_ad = S::from_i64(2).mul(&triple.alpha.sub(&triple.delta));
    let mut t = Tensor::zero_form(dm, 3);
    for (i, _, _) in EVEN_PERMS {
        let part = wedge(&triple.eta_form(i), &triple.fundamental_form(model, i))?;
        t = t.add(&part.scale(&two_alpha));
    }
    let eta123 = wedge(
        &wedge(&triple.eta_form(0), &triple.eta_form(1))?,
        &triple.eta_form(2),
    )?;
    Ok(t.sub(&eta123.scale(&two_ad)))
}

/// Least-squares fit of the constant in the derivative law
/// `∇_X φ_i = β(η_k(X) φ_j - η_j(X) φ_k)`, using the invariant inner
/// product on endomorphisms.
pub fn measure_beta<S: Scalar>(
    model: &LieModel<S>,
    conn: &NomizuConnection<S>,
    triple: &AlmostContactTriple<S>,
) -> (S, f64) {
    let dm = model.dim_m();
    let basis: Vec<Vec<S>> = basis_vectors(dm);
    let mut num = S::zero();
    let mut den = S::zero();
    let mut pieces: Vec<(Mat<S>, Mat<S>)> = Vec::new();
    for (i, j, k) in EVEN_PERMS {
        for x in &basis {
            let grad = conn.lambda_at(x).commutator(&triple.phi[i]);
            let dir = triple.phi[j]
                .scale(&crate::linalg::dot(&triple.eta[k], x))
                .sub(&triple.phi[k].scale(&crate::linalg::dot(&triple.eta[j], x)));
            num = num.add(&model.fiber.endo_inner(&dir, &grad));
            den = den.add(&model.fiber.endo_inner(&dir, &dir));
            pieces.push((grad, dir));
        }
    }
    let beta = if den.is_zero() { S::zero() } else { num.div(&den) };
    let mut fit: f64 = 0.0;
    for (grad, dir) in pieces {
        fit = fit.max(grad.sub(&dir.scale(&beta)).max_abs());
    }
    (beta, fit)
}

/// Canonical connection of a validated 3-(α,δ) structure plus its
/// postcondition report.
#[derive(Debug)]
pub struct CanonicalConnection<S> {
    pub connection: NomizuConnection<S>,
    pub report: VerificationReport,
}

/// Builds `∇ = ∇g + 1/2 T` with the canonical torsion and certifies:
/// (a) the derivative law with `β = 2(δ-2α)`, (b) parallel torsion,
/// (c) invariance of the splitting `V ⊕ H` under the connection.
pub fn canonical_connection<S: Scalar>(
    model: &LieModel<S>,
    triple: &AlmostContactTriple<S>,
    tol: f64,
) -> Result<CanonicalConnection<S>, GeometryError> {
    let structure = check_3ad(model, triple, tol)?;
    if !structure.passed() {
        let res = structure.find("structure_equation").map(|c| c.residual);
        return Err(GeometryError::Refused {
            gate: "3ad-structure-equation".into(),
            reason: format!(
                "dη_i = 2αΦ_i + 2(α-δ)η_j∧η_k fails with residual {:.3e}",
                res.unwrap_or(f64::NAN)
            ),
        });
    }
    let torsion = canonical_torsion(model, triple)?;
    let lc = levi_civita(model);
    let connection = with_torsion(model, &lc, &torsion, tol)?;

    let mut rep = VerificationReport::new(
        "canonical-connection",
        &model.name,
        &model.fingerprint(&[]),
        S::EXACT,
    );
    rep.merge(structure);

    // (a) derivative law with the pinned constant.
    let beta = triple.beta();
    let dm = model.dim_m();
    let basis: Vec<Vec<S>> = basis_vectors(dm);
    let mut law = ResidualMax::new::<S>();
    for (i, j, k) in EVEN_PERMS {
        for x in &basis {
            let grad = connection.lambda_at(x).commutator(&triple.phi[i]);
            let dir = triple.phi[j]
                .scale(&crate::linalg::dot(&triple.eta[k], x))
                .sub(&triple.phi[k].scale(&crate::linalg::dot(&triple.eta[j], x)));
            for v in &grad.sub(&dir.scale(&beta)).data {
                law.push(v);
            }
        }
    }
    rep.push(
        "nabla_phi_law",
        "∇_Xφ_i = β(η_k(X)φ_j - η_j(X)φ_k), β = 2(δ-2α)",
        &law,
        tol,
        "",
    );
    let (beta_meas, fit) = measure_beta(model, &connection, triple);
    rep.push_scalar(
        "beta_constant",
        "β = 2(δ-2α)",
        &beta_meas,
        &beta,
        tol,
        &format!("law fit residual {fit:.3e}"),
    );

    // (b) parallel torsion.
    let mut par = ResidualMax::new::<S>();
    par.push_f64(nabla_residual(model, &connection, &connection.torsion));
    rep.push("parallel_torsion", "∇T = 0", &par, tol, "");

    // (c) connection preserves V ⊕ H. Λ(X) is skew-adjoint, so preserving
    // V forces preservation of its orthogonal complement.
    let vertical: Vec<Vec<S>> = triple.xi.iter().cloned().collect();
    let mut split = ResidualMax::new::<S>();
    for x in &basis {
        let la = connection.lambda_at(x);
        for xi in &vertical {
            let y = la.apply(xi);
            let p = model.fiber.project_onto(&vertical, &y)?;
            for v in crate::linalg::vec_sub(&y, &p) {
                split.push(&v);
            }
        }
    }
    rep.push(
        "connection_preserves_splitting",
        "∇ preserves TM = V ⊕ H",
        &split,
        tol,
        "",
    );

    for (which, name) in [
        ("(a) nabla-phi law", "nabla_phi_law"),
        ("(b) parallel torsion", "parallel_torsion"),
        ("(c) V+H splitting", "connection_preserves_splitting"),
    ] {
        let check = rep.find(name).unwrap();
        if !matches!(check.status, crate::report::Status::Pass | crate::report::Status::Vacuous) {
            return Err(GeometryError::Postcondition {
                op: "canonical_connection",
                which: match which {
                    "(a) nabla-phi law" => "(a) nabla-phi law",
                    "(b) parallel torsion" => "(b) parallel torsion",
                    _ => "(c) V+H splitting",
                },
                residual: check.residual,
            });
        }
    }
    Ok(CanonicalConnection { connection, report: rep })
}

/// An almost Hermitian structure with its characteristic torsion.
#[derive(Clone, Debug)]
pub struct NearlyKahlerStructure<S> {
    pub j: Mat<S>,
    pub characteristic_torsion: Tensor<S>,
}

impl<S: Scalar> NearlyKahlerStructure<S> {
    /// Computes the characteristic torsion `T(X,Y,Z) = g((∇g_X J)JY, Z)`
    /// from the model data.
    pub fn from_model(model: &LieModel<S>, j: Mat<S>) -> Self {
        let t = characteristic_torsion_of(model, &j);
        NearlyKahlerStructure {
            j,
            characteristic_torsion: t,
        }
    }
}

/// `T(X,Y,Z) = g((∇g_X J) JY, Z)` as a component array.
pub fn characteristic_torsion_of<S: Scalar>(model: &LieModel<S>, j: &Mat<S>) -> Tensor<S> {
    let dm = model.dim_m();
    let lc = levi_civita(model);
    let basis: Vec<Vec<S>> = basis_vectors(dm);
    let mut comps = vec![S::zero(); dm * dm * dm];
    for (a, x) in basis.iter().enumerate() {
        let grad = lc.lambda_at(x).commutator(j);
        let gj = grad.matmul(j);
        for b in 0..dm {
            let col = gj.apply(&basis[b]);
            let fl = model.fiber.flat(&col);
            for (c, v) in fl.into_iter().enumerate() {
                comps[(a * dm + b) * dm + c] = v;
            }
        }
    }
    Tensor::form_unchecked(dm, 3, comps)
}

/// Nearly Kähler verification: `(∇g_X J)X = 0` in symmetrized and
/// polarized form, plus the characteristic-torsion identities.
pub fn check_nearly_kahler<S: Scalar>(
    model: &LieModel<S>,
    nk: &NearlyKahlerStructure<S>,
    tol: f64,
) -> Result<VerificationReport, GeometryError> {
    let dm = model.dim_m();
    let mut rep = VerificationReport::new(
        "nearly-kahler",
        &model.name,
        &model.fingerprint(&[]),
        S::EXACT,
    );
    let id = Mat::identity(dm);

    let mut almost = ResidualMax::new::<S>();
    for v in &nk.j.matmul(&nk.j).add(&id).data {
        almost.push(v);
    }
    rep.push("j_squared", "J² = -id", &almost, tol, "");

    let mut orth = ResidualMax::new::<S>();
    let lhs = nk.j.transpose().matmul(&model.fiber.metric).matmul(&nk.j);
    for v in &lhs.sub(&model.fiber.metric).data {
        orth.push(v);
    }
    rep.push("j_orthogonal", "g(JX,JY) = g(X,Y)", &orth, tol, "");

    let mut inv = ResidualMax::new::<S>();
    inv.push_f64(model.invariance_residual(&Tensor::endomorphism(nk.j.clone())));
    rep.push("j_isotropy_invariance", "plumbing", &inv, tol, "");

    // M(X,Y,Z) = g((∇g_X J)Y, Z).
    let lc = levi_civita(model);
    let basis: Vec<Vec<S>> = basis_vectors(dm);
    let grads: Vec<Mat<S>> = basis
        .iter()
        .map(|x| lc.lambda_at(x).commutator(&nk.j))
        .collect();
    let m_val = |a: usize, b: usize, c: usize| -> S {
        model
            .fiber
            .inner(&grads[a].apply(&basis[b]), &basis[c])
    };

    // Formulation 1: vanishing on the diagonal and on pairwise sums.
    let mut sym = ResidualMax::new::<S>();
    for a in 0..dm {
        for c in 0..dm {
            sym.push(&m_val(a, a, c));
        }
    }
    for a in 0..dm {
        for b in a + 1..dm {
            for c in 0..dm {
                // (∇_{X+Y} J)(X+Y) paired with Z, diagonal terms included.
                let total = m_val(a, a, c)
                    .add(&m_val(a, b, c))
                    .add(&m_val(b, a, c))
                    .add(&m_val(b, b, c));
                sym.push(&total);
            }
        }
    }
    rep.push(
        "nearly_kahler_condition",
        "(∇g_X J)X = 0 (basis and polarized pairs)",
        &sym,
        tol,
        "",
    );

    // Formulation 2: full antisymmetry of M in (X,Y).
    let mut anti = ResidualMax::new::<S>();
    for a in 0..dm {
        for b in 0..dm {
            for c in 0..dm {
                anti.push(&m_val(a, b, c).add(&m_val(b, a, c)));
            }
        }
    }
    rep.push(
        "nabla_j_skew_in_xy",
        "g((∇g_X J)Y,Z) antisymmetric in X,Y",
        &anti,
        tol,
        "polarization-equivalent form of the defining condition",
    );

    // Characteristic torsion: alternating, matches the stored tensor, and
    // the associated connection is Hermitian with parallel torsion.
    let tc = characteristic_torsion_of(model, &nk.j);
    let mut alt = ResidualMax::new::<S>();
    alt.push_f64(tc.alternation_residual());
    rep.push(
        "characteristic_torsion_alternating",
        "g((∇g_X J)JY, Z) is a 3-form",
        &alt,
        tol,
        "",
    );
    let mut pair_alt = ResidualMax::new::<S>();
    for a in 0..dm {
        for b in 0..dm {
            for c in 0..dm {
                // The plain pairing g((∇g_X J)Y, Z) is alternating as well.
                pair_alt.push(&m_val(a, b, c).add(&m_val(b, a, c)));
                pair_alt.push(&m_val(a, b, c).add(&m_val(a, c, b)));
            }
        }
    }
    rep.push(
        "nabla_j_pairing_alternating",
        "g((∇g_X J)Y, Z) is a 3-form",
        &pair_alt,
        tol,
        "",
    );

    let mut matches = ResidualMax::new::<S>();
    for (a, b) in tc.comps.iter().zip(&nk.characteristic_torsion.comps) {
        matches.push(&a.sub(b));
    }
    rep.push(
        "characteristic_torsion_matches",
        "T(X,Y,Z) = g((∇g_X J)JY, Z)",
        &matches,
        tol,
        "",
    );

    match with_torsion(model, &lc, &tc, tol) {
        Ok(conn) => {
            let mut hermitian = ResidualMax::new::<S>();
            for x in &basis {
                hermitian.push_f64(conn.lambda_at(x).commutator(&nk.j).max_abs());
            }
            rep.push(
                "characteristic_connection_hermitian",
                "∇c J = 0",
                &hermitian,
                tol,
                "",
            );
            let mut par = ResidualMax::new::<S>();
            par.push_f64(nabla_residual(model, &conn, &tc));
            rep.push(
                "characteristic_torsion_parallel",
                "∇c Tc = 0",
                &par,
                tol,
                "",
            );
        }
        Err(_) => {
            // The candidate torsion is not a 3-form, so there is no skew
            // connection to test; record the defect as a failure.
            let mut bad = ResidualMax::new::<S>();
            bad.push_f64(tc.alternation_residual().max(f64::MIN_POSITIVE));
            rep.push(
                "characteristic_connection_hermitian",
                "∇c J = 0",
                &bad,
                tol,
                "not applicable: candidate torsion is not alternating",
            );
            rep.push(
                "characteristic_torsion_parallel",
                "∇c Tc = 0",
                &bad,
                tol,
                "not applicable: candidate torsion is not alternating",
            );
        }
    }
    Ok(rep)
}

/// Lie-derivative identities of the Reeb frame: with even permutations
/// (ijk), `L_{ξ_i} ξ_i = 0`, `L_{ξ_i} ξ_j = -L_{ξ_j} ξ_i = 2δ ξ_k`,
/// `L_{ξ_i} φ_i = 0`, `L_{ξ_i} φ_j = -L_{ξ_j} φ_i = 2δ φ_k`, and the
/// Reeb fields are Killing.
pub fn check_lie_identities<S: Scalar>(
    model: &LieModel<S>,
    triple: &AlmostContactTriple<S>,
    tol: f64,
) -> Result<VerificationReport, GeometryError> {
    let mut rep = VerificationReport::new(
        "lie-identities",
        &model.name,
        &model.fingerprint(&[]),
        S::EXACT,
    );
    let two_delta = S::from_i64(2).mul(&triple.delta);

    let mut reeb_self = ResidualMax::new::<S>();
    let mut reeb_cross = ResidualMax::new::<S>();
    for (i, j, k) in EVEN_PERMS {
        let lii = crate::homogeneous::lie_derivative(
            model,
            &triple.xi[i],
            &Tensor::vector(triple.xi[i].clone()),
            tol,
        )?;
        reeb_self.push_f64(lii.max_abs());

        let lij = crate::homogeneous::lie_derivative(
            model,
            &triple.xi[i],
            &Tensor::vector(triple.xi[j].clone()),
            tol,
        )?;
        let want = Tensor::vector(triple.xi[k].clone()).scale(&two_delta);
        reeb_cross.push_f64(lij.sub(&want).max_abs());
        // Antisymmetry of the pairing.
        let lji = crate::homogeneous::lie_derivative(
            model,
            &triple.xi[j],
            &Tensor::vector(triple.xi[i].clone()),
            tol,
        )?;
        reeb_cross.push_f64(lji.add(&want).max_abs());
    }
    rep.push("reeb_lie_self", "L_{ξ_i} ξ_i = 0", &reeb_self, tol, "");
    rep.push(
        "reeb_lie_cross",
        "L_{ξ_i} ξ_j = -L_{ξ_j} ξ_i = 2δ ξ_k",
        &reeb_cross,
        tol,
        "",
    );

    let mut phi_self = ResidualMax::new::<S>();
    let mut phi_cross = ResidualMax::new::<S>();
    for (i, j, k) in EVEN_PERMS {
        let lii = crate::homogeneous::lie_derivative(
            model,
            &triple.xi[i],
            &Tensor::endomorphism(triple.phi[i].clone()),
            tol,
        )?;
        phi_self.push_f64(lii.max_abs());

        let lij = crate::homogeneous::lie_derivative(
            model,
            &triple.xi[i],
            &Tensor::endomorphism(triple.phi[j].clone()),
            tol,
        )?;
        let want = Tensor::endomorphism(triple.phi[k].clone()).scale(&two_delta);
        phi_cross.push_f64(lij.sub(&want).max_abs());
        let lji = crate::homogeneous::lie_derivative(
            model,
            &triple.xi[j],
            &Tensor::endomorphism(triple.phi[i].clone()),
            tol,
        )?;
        phi_cross.push_f64(lji.add(&want).max_abs());
    }
    rep.push("phi_lie_self", "L_{ξ_i} φ_i = 0", &phi_self, tol, "");
    rep.push(
        "phi_lie_cross",
        "L_{ξ_i} φ_j = -L_{ξ_j} φ_i = 2δ φ_k",
        &phi_cross,
        tol,
        "",
    );

    let g_tensor = Tensor::covariant(model.dim_m(), 2, model.fiber.metric.data.clone());
    let mut killing = ResidualMax::new::<S>();
    for i in 0..3 {
        let lg = crate::homogeneous::lie_derivative(model, &triple.xi[i], &g_tensor, tol)?;
        killing.push_f64(lg.max_abs());
    }
    rep.push("reeb_killing", "L_{ξ} g = 0", &killing, tol, "");
    Ok(rep)
}

/// Residual of `T` against the canonical torsion recomputed from the
/// structure data; used as the second expansion path in tests.
pub fn canonical_torsion_residual<S: Scalar>(
    model: &LieModel<S>,
    triple: &AlmostContactTriple<S>,
    conn: &NomizuConnection<S>,
) -> f64 {
    let recomputed = torsion_of(model, conn);
    match canonical_torsion(model, triple) {
        Ok(t) => recomputed.sub(&t).max_abs(),
        Err(_) => f64::INFINITY,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homogeneous::validate_model;

    fn rot(axis: usize) -> Mat<f64> {
        let mut r = Mat::zeros(3, 3);
        let (j, k) = match axis {
            0 => (1, 2),
            1 => (2, 0),
            _ => (0, 1),
        };
        r.set(k, j, 1.0);
        r.set(j, k, -1.0);
        r
    }

    fn epsilon_sign(i: usize, j: usize, k: usize) -> f64 {
        match (i, j, k) {
            (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
            (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
            _ => 0.0,
        }
    }

    fn s3_model(delta: f64) -> LieModel<f64> {
        let mut c = vec![0.0; 27];
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    c[(i * 3 + j) * 3 + k] = 2.0 * delta * epsilon_sign(i, j, k);
                }
            }
        }
        LieModel::new(
            "s3",
            vec!["xi1".into(), "xi2".into(), "xi3".into()],
            c,
            vec![],
            vec![0, 1, 2],
            Mat::identity(3),
        )
        .unwrap()
    }

    fn s3_triple(alpha: f64, delta: f64) -> AlmostContactTriple<f64> {
        let e: Vec<Vec<f64>> = (0..3)
            .map(|i| {
                let mut v = vec![0.0; 3];
                v[i] = 1.0;
                v
            })
            .collect();
        AlmostContactTriple {
            xi: [e[0].clone(), e[1].clone(), e[2].clone()],
            eta: [e[0].clone(), e[1].clone(), e[2].clone()],
            phi: [rot(0), rot(1), rot(2)],
            alpha,
            delta,
        }
    }

    #[test]
    fn standard_s3_triple_validates() {
        let m = s3_model(1.0);
        assert!(validate_model(&m, 1e-12).passed());
        let rep = validate_acm(&m, &s3_triple(1.0, 1.0), 1e-12).unwrap();
        assert!(rep.passed(), "{}", rep.render_text());
    }

    #[test]
    fn negated_phi_fails_quaternionic_product() {
        let m = s3_model(1.0);
        let mut t = s3_triple(1.0, 1.0);
        t.phi[0] = t.phi[0].neg();
        let rep = validate_acm(&m, &t, 1e-12).unwrap();
        assert!(!rep.passed());
        let check = rep.find("quaternionic_phi_product").unwrap();
        assert!(check.residual > 0.5);
    }

    #[test]
    fn structure_equation_on_s3_for_any_alpha() {
        // With no horizontal directions the alpha-terms cancel, so every
        // alpha passes, including the degenerate delta = 0 case.
        for (alpha, delta) in [(1.0, 1.0), (1.0, 2.0), (3.0, 1.0), (1.0, 0.0), (0.5, 5.0)] {
            let m = s3_model(delta);
            let rep = check_3ad(&m, &s3_triple(alpha, delta), 1e-12).unwrap();
            assert!(rep.passed(), "alpha={alpha} delta={delta}");
        }
    }

    #[test]
    fn structure_equation_detects_wrong_delta() {
        let m = s3_model(2.0);
        let rep = check_3ad(&m, &s3_triple(1.0, 1.0), 1e-12).unwrap();
        assert!(!rep.passed());
    }

    #[test]
    fn dimension_gate() {
        let bad = LieModel::new(
            "r4",
            (0..4).map(|i| format!("e{i}")).collect(),
            vec![0.0; 64],
            vec![],
            (0..4).collect(),
            Mat::identity(4),
        )
        .unwrap();
        let t = s3_triple(1.0, 1.0);
        assert!(validate_acm(&bad, &t, 1e-12).is_err());
    }

    /// Canonical torsion on the 3-dimensional model: both expansion paths
    /// agree and give T(ξ1,ξ2,ξ3) = 2δ - 8α.
    #[test]
    fn canonical_torsion_scalar_on_s3() {
        for (alpha, delta) in [(1.0, 1.0), (1.0, 2.0), (2.0, 1.0)] {
            let m = s3_model(delta);
            let triple = s3_triple(alpha, delta);
            let t = canonical_torsion(&m, &triple).unwrap();
            let e: Vec<Vec<f64>> = crate::homogeneous::basis_vectors(3);
            let got = t.eval(&[&e[0], &e[1], &e[2]]);
            assert!(
                (got - (2.0 * delta - 8.0 * alpha)).abs() < 1e-13,
                "alpha={alpha} delta={delta}: got {got}"
            );
        }
    }

    #[test]
    fn canonical_connection_beta_grid_on_s3() {
        for (alpha, delta) in [(1.0, 1.0), (1.0, 2.0), (2.0, 1.0), (1.0, 0.0), (1.0, 5.0)] {
            let m = s3_model(delta);
            let triple = s3_triple(alpha, delta);
            let canon = canonical_connection(&m, &triple, 1e-10).unwrap();
            assert!(canon.report.passed(), "{}", canon.report.render_text());
            let (beta, fit) = measure_beta(&m, &canon.connection, &triple);
            assert!((beta - 2.0 * (delta - 2.0 * alpha)).abs() < 1e-12);
            assert!(fit < 1e-12);
            assert!(canonical_torsion_residual(&m, &triple, &canon.connection) < 1e-13);
        }
    }

    #[test]
    fn canonical_connection_refuses_mismatched_structure() {
        let m = s3_model(2.0);
        let triple = s3_triple(1.0, 1.0); // claims delta = 1 on a delta = 2 model
        let err = canonical_connection(&m, &triple, 1e-10).unwrap_err();
        assert_eq!(err.gate(), Some("3ad-structure-equation"));
    }

    #[test]
    fn kahler_plane_is_vacuously_nearly_kahler() {
        let m = LieModel::new(
            "r2",
            vec!["e1".into(), "e2".into()],
            vec![0.0; 8],
            vec![],
            vec![0, 1],
            Mat::identity(2),
        )
        .unwrap();
        let mut j = Mat::zeros(2, 2);
        j.set(0, 1, -1.0);
        j.set(1, 0, 1.0);
        let nk = NearlyKahlerStructure::from_model(&m, j);
        assert_eq!(nk.characteristic_torsion.max_abs(), 0.0);
        let rep = check_nearly_kahler(&m, &nk, 1e-12).unwrap();
        assert!(rep.passed(), "{}", rep.render_text());
    }

    /// Two-path computation of the Levi-Civita derivative of the
    /// fundamental form: the direct derivation action against the
    /// canonical-connection law minus the torsion correction.
    #[test]
    fn levi_civita_derivative_of_fundamental_form_two_paths() {
        let (alpha, delta) = (1.0, 1.0);
        let m = s3_model(delta);
        let triple = s3_triple(alpha, delta);
        let canon = canonical_connection(&m, &triple, 1e-10).unwrap();
        let lc = levi_civita(&m);
        let beta = triple.beta();
        let phi_form = |i: usize| triple.fundamental_form(&m, i);
        let mut nonzero = false;
        for (x_idx, x) in crate::homogeneous::basis_vectors::<f64>(3).iter().enumerate() {
            // Path 1: derivation action of the Levi-Civita Nomizu map.
            let path1 = crate::tensor::endo_action(&lc.lambda_at(x), &phi_form(0));
            // Path 2: the canonical-connection law minus 1/2 T(X)-action.
            let law = phi_form(1)
                .scale(&(beta * triple.eta[2][x_idx]))
                .sub(&phi_form(2).scale(&(beta * triple.eta[1][x_idx])));
            let half_t = canon
                .connection
                .lambda_at(x)
                .sub(&lc.lambda_at(x));
            let path2 = law.sub(&crate::tensor::endo_action(&half_t, &phi_form(0)));
            assert!(path1.sub(&path2).max_abs() < 1e-12, "slot {x_idx}");
            nonzero |= path1.max_abs() > 0.1;
        }
        assert!(nonzero, "the Levi-Civita derivative should not vanish here");
    }

    #[test]
    fn rotated_triple_still_validates() {
        let m = s3_model(1.0);
        let triple = s3_triple(1.0, 1.0);
        // Rational rotation with first column (2/3, 2/3, 1/3).
        let rot3 = Mat::from_rows(vec![
            vec![2.0 / 3.0, -2.0 / 3.0, 1.0 / 3.0],
            vec![2.0 / 3.0, 1.0 / 3.0, -2.0 / 3.0],
            vec![1.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0],
        ]);
        let rotated = triple.rotated(&rot3, 1e-12).unwrap();
        let rep = validate_acm(&m, &rotated, 1e-10).unwrap();
        assert!(rep.passed(), "{}", rep.render_text());
        assert!(check_3ad(&m, &rotated, 1e-10).unwrap().passed());
        // The canonical torsion is rotation invariant.
        let t0 = canonical_torsion(&m, &triple).unwrap();
        let t1 = canonical_torsion(&m, &rotated).unwrap();
        assert!(t0.sub(&t1).max_abs() < 1e-12);

        // Orientation-reversing parameters are rejected.
        let mut flip = Mat::identity(3);
        flip.set(2, 2, -1.0);
        assert!(triple.rotated(&flip, 1e-12).is_err());
    }
}
