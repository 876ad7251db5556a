//! Canonical submersions: hypothesis checks for a holonomy-invariant
//! splitting with admissible torsion, quotient-model construction with
//! projected metric and torsion, and base-level structure transfer.
//!
//! Quotients are realized as enlarged-isotropy reductive models: the
//! fibers are orbits of a subgroup, so the base is again homogeneous and
//! every computation stays exact and pointwise.

use crate::error::GeometryError;
use crate::homogeneous::{
    basis_vectors, check_invariant_splitting, levi_civita, nabla_residual, torsion_of,
    with_torsion, HolonomyConfig, LieModel, NomizuConnection,
};
use crate::linalg::{vec_max_abs, vec_sub, Mat, SpanBasis};
use crate::report::{ResidualMax, VerificationReport};
use crate::sasaki::AlmostContactTriple;
use crate::scalar::Scalar;
use crate::tensor::{wedge, Fiber, Tensor};

/// Basis of the g-orthogonal complement of a subspace, preferring ambient
/// basis vectors so catalog quotients stay exact and deterministic.
pub fn orthocomplement_basis<S: Scalar>(
    fiber: &Fiber<S>,
    subspace: &[Vec<S>],
    rank_threshold: f64,
) -> Result<Vec<Vec<S>>, GeometryError> {
    let dim = fiber.dim;
    let mut span = SpanBasis::new(dim, rank_threshold);
    for v in subspace {
        span.insert(v);
    }
    let sub_rank = span.rank();
    let mut out = Vec::new();
    for e in basis_vectors::<S>(dim) {
        let proj = fiber.project_onto(subspace, &e)?;
        let cand = vec_sub(&e, &proj);
        if span.insert(&cand) {
            out.push(cand);
        }
    }
    if sub_rank + out.len() != dim {
        return Err(GeometryError::NotSpanning {
            rank: sub_rank + out.len(),
            dim,
        });
    }
    Ok(out)
}

/// g-orthogonal projector onto a subspace, as a matrix.
pub fn projector_onto<S: Scalar>(
    fiber: &Fiber<S>,
    subspace: &[Vec<S>],
) -> Result<Mat<S>, GeometryError> {
    let dim = fiber.dim;
    let mut p = Mat::zeros(dim, dim);
    for (b, e) in basis_vectors::<S>(dim).iter().enumerate() {
        let col = fiber.project_onto(subspace, e)?;
        for (a, v) in col.into_iter().enumerate() {
            p.set(a, b, v);
        }
    }
    Ok(p)
}

/// Pullback of a covariant 3-tensor through a linear map:
/// `(P*T)(X,Y,Z) = T(PX, PY, PZ)`.
pub fn pullback_3form<S: Scalar>(t: &Tensor<S>, p: &Mat<S>) -> Tensor<S> {
    assert_eq!(t.p, 3);
    let d = t.dim;
    // Contract one slot at a time.
    let mut cur = t.comps.clone();
    for slot in 0..3 {
        let mut next = vec![S::zero(); d * d * d];
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    let target = [i, j, k];
                    let mut acc = S::zero();
                    for m in 0..d {
                        let c = p.at(m, target[slot]);
                        if c.is_zero() {
                            continue;
                        }
                        let mut src = target;
                        src[slot] = m;
                        acc = acc.add(&c.mul(&cur[(src[0] * d + src[1]) * d + src[2]]));
                    }
                    next[(i * d + j) * d + k] = acc;
                }
            }
        }
        cur = next;
    }
    Tensor::form_unchecked(d, 3, cur)
}

/// Λ²V∧H-part of the torsion must vanish: residual of `T(V, W, X)` over
/// vertical pairs and horizontal X.
pub fn check_projecttau<S: Scalar>(
    model: &LieModel<S>,
    conn: &NomizuConnection<S>,
    vertical: &[Vec<S>],
    tol: f64,
) -> Result<VerificationReport, GeometryError> {
    let mut rep = VerificationReport::new(
        "projecttau",
        &model.name,
        &model.fingerprint(&[]),
        S::EXACT,
    );
    let horizontal = orthocomplement_basis(&model.fiber, vertical, 1e-9)?;
    let mut res = ResidualMax::new::<S>();
    for v in vertical {
        for w in vertical {
            for x in &horizontal {
                res.push(&conn.torsion.eval(&[v, w, x]));
            }
        }
    }
    rep.push(
        "no_mixed_vertical_pair",
        "T has no Λ²V∧H component",
        &res,
        tol,
        if vertical.len() == 1 {
            "one-dimensional vertical distribution: identically zero"
        } else {
            ""
        },
    );
    Ok(rep)
}

/// Cyclic compatibility of the horizontal torsion with vertical hooks:
/// `cyclic_{X,Y,Z} T_H(X, Y, T(V,Z)) = 0`.
pub fn check_torsion_in_torsion<S: Scalar>(
    model: &LieModel<S>,
    conn: &NomizuConnection<S>,
    vertical: &[Vec<S>],
    tol: f64,
) -> Result<VerificationReport, GeometryError> {
    let mut rep = VerificationReport::new(
        "torsion-in-torsion",
        &model.name,
        &model.fingerprint(&[]),
        S::EXACT,
    );
    rep.merge(check_projecttau(model, conn, vertical, tol)?);
    let mut par = ResidualMax::new::<S>();
    par.push_f64(nabla_residual(model, conn, &conn.torsion));
    rep.push("torsion_parallel_precondition", "∇T = 0", &par, tol, "");

    let dm = model.dim_m();
    let p_h = {
        let horizontal = orthocomplement_basis(&model.fiber, vertical, 1e-9)?;
        projector_onto(&model.fiber, &horizontal)?
    };
    let th = pullback_3form(&conn.torsion, &p_h);
    let basis = basis_vectors::<S>(dm);
    let mut res = ResidualMax::new::<S>();
    for v in vertical {
        // T(V, e_z) as vectors.
        let tv: Vec<Vec<S>> = (0..dm)
            .map(|z| {
                let w: Vec<S> = (0..dm)
                    .map(|c| {
                        let mut acc = S::zero();
                        for (a, va) in v.iter().enumerate() {
                            if va.is_zero() {
                                continue;
                            }
                            acc = acc.add(&va.mul(&conn.torsion.comps[(a * dm + z) * dm + c]));
                        }
                        acc
                    })
                    .collect();
                model.fiber.sharp(&w)
            })
            .collect();
        for a in 0..dm {
            for b in 0..dm {
                for c in 0..dm {
                    let term = th
                        .eval(&[&basis[a], &basis[b], &tv[c]])
                        .add(&th.eval(&[&basis[b], &basis[c], &tv[a]]))
                        .add(&th.eval(&[&basis[c], &basis[a], &tv[b]]));
                    res.push(&term);
                }
            }
        }
    }
    rep.push(
        "torsion_in_torsion",
        "cyclic T_H(X,Y,T(V,Z)) = 0",
        &res,
        tol,
        "",
    );
    Ok(rep)
}

/// Totally geodesic fibers and projectable horizontal data:
/// (a) `∇g_V W` stays vertical, (b) `L_V g` vanishes on horizontal pairs,
/// (c) `L_V T_H = 0`.
pub fn check_fiber_geometry<S: Scalar>(
    model: &LieModel<S>,
    conn: &NomizuConnection<S>,
    vertical: &[Vec<S>],
    tol: f64,
) -> Result<VerificationReport, GeometryError> {
    let mut rep = VerificationReport::new(
        "fiber-geometry",
        &model.name,
        &model.fingerprint(&[]),
        S::EXACT,
    );
    let lc = levi_civita(model);
    let horizontal = orthocomplement_basis(&model.fiber, vertical, 1e-9)?;

    let mut geodesic = ResidualMax::new::<S>();
    for v in vertical {
        for w in vertical {
            let y = lc.lambda_at(v).apply(w);
            let p = model.fiber.project_onto(vertical, &y)?;
            for u in vec_sub(&y, &p) {
                geodesic.push(&u);
            }
        }
    }
    rep.push(
        "totally_geodesic_fibers",
        "∇g_V W ∈ V for vertical V, W",
        &geodesic,
        tol,
        "",
    );

    let g_tensor = Tensor::covariant(model.dim_m(), 2, model.fiber.metric.data.clone());
    let mut metric_const = ResidualMax::new::<S>();
    for v in vertical {
        match crate::homogeneous::lie_derivative(model, v, &g_tensor, tol) {
            Ok(lg) => {
                for x in &horizontal {
                    for y in &horizontal {
                        metric_const.push(&lg.eval(&[x, y]));
                    }
                }
            }
            Err(_) => metric_const.push_f64(f64::INFINITY),
        }
    }
    rep.push(
        "horizontal_metric_projectable",
        "(L_V g)(X,Y) = 0 for horizontal X,Y",
        &metric_const,
        tol,
        "",
    );

    let p_h = projector_onto(&model.fiber, &horizontal)?;
    let th = pullback_3form(&conn.torsion, &p_h);
    let mut torsion_const = ResidualMax::new::<S>();
    for v in vertical {
        match crate::homogeneous::lie_derivative(model, v, &th, tol) {
            Ok(lt) => {
                for u in &lt.comps {
                    torsion_const.push(u);
                }
            }
            Err(e) => {
                torsion_const.push_f64(match e {
                    GeometryError::NotInvariant { residual, .. } => residual,
                    _ => f64::INFINITY,
                });
            }
        }
    }
    rep.push(
        "horizontal_torsion_projectable",
        "L_V T_H = 0",
        &torsion_const,
        tol,
        "",
    );
    Ok(rep)
}

/// Vertical/horizontal pairing of the connection against the torsion.
///
/// For a basic horizontal field Y and vertical X the derivative pairing
/// `g(∇_X Y, Z)` reduces to `T(X,Y,Z)`; the model-checkable ingredient is
/// that invariant vertical fields differentiate into the vertical space.
/// On parallel 3-(α,δ) models quotiented along the first Reeb direction
/// the tensorial right side expands to `2α(Φ_1|_H - 2 η_2∧η_3)`.
pub fn check_nablavert<S: Scalar>(
    model: &LieModel<S>,
    conn: &NomizuConnection<S>,
    vertical: &[Vec<S>],
    triple: Option<&AlmostContactTriple<S>>,
    tol: f64,
) -> Result<VerificationReport, GeometryError> {
    let mut rep = VerificationReport::new(
        "nablavert",
        &model.name,
        &model.fingerprint(&[]),
        S::EXACT,
    );
    let dm = model.dim_m();
    let basis = basis_vectors::<S>(dm);
    let horizontal = orthocomplement_basis(&model.fiber, vertical, 1e-9)?;

    let mut vert_stays = ResidualMax::new::<S>();
    for v in vertical {
        // Only isotropy-invariant vectors extend to invariant fields.
        if model.invariance_residual(&Tensor::vector(v.clone())) > tol {
            continue;
        }
        for y in &basis {
            let grad = conn.lambda_at(y).apply(v);
            for z in &horizontal {
                vert_stays.push(&model.fiber.inner(&grad, z));
            }
        }
    }
    rep.push(
        "invariant_vertical_fields_differentiate_vertically",
        "g(∇_Y X, Z) = 0 for vertical X, horizontal Z",
        &vert_stays,
        tol,
        "",
    );

    // Tensorial display on parallel 3-contact models with V = span(xi_1).
    let mut display = ResidualMax::new::<S>();
    let mut note = "requires a parallel 3-contact structure with V = span(xi_1)";
    if let Some(t) = triple {
        let span_ok = vertical.len() == 1
            && vec_max_abs(&vec_sub(
                &crate::linalg::vec_scale(
                    &t.xi[0],
                    &model
                        .fiber
                        .inner(&vertical[0], &t.xi[0])
                        .div(&model.fiber.inner(&t.xi[0], &t.xi[0])),
                ),
                &vertical[0],
            )) <= tol;
        if t.parallel_defect() <= tol && span_ok {
            note = "";
            let two_alpha = S::from_i64(2).mul(&t.alpha);
            let p_3ad_h = {
                let cols: Vec<Vec<S>> = t.xi.to_vec();
                let h = orthocomplement_basis(&model.fiber, &cols, 1e-9)?;
                projector_onto(&model.fiber, &h)?
            };
            let phi1_h = {
                let full = t.fundamental_form(model, 0);
                // Pull the 2-form back through the 3-contact horizontal
                // projector: (P*Φ)(X,Y) = Φ(PX, PY).
                let m = full.as_matrix();
                let restricted = p_3ad_h.transpose().matmul(&m).matmul(&p_3ad_h);
                Tensor::form_unchecked(dm, 2, restricted.data)
            };
            let eta23 = wedge(&t.eta_form(1), &t.eta_form(2))?;
            let rhs = phi1_h.add(&eta23.scale(&S::from_i64(-2))).scale(&two_alpha);
            for y in &horizontal {
                for z in &horizontal {
                    let lhs = conn.torsion.eval(&[&t.xi[0], y, z]);
                    display.push(&lhs.sub(&rhs.eval(&[y, z])));
                }
            }
        }
    }
    rep.push(
        "torsion_pairing_display",
        "T(ξ,Y,Z) = 2α(Φ_1|_H(Y,Z) - 2(η_2∧η_3)(Y,Z))",
        &display,
        tol,
        note,
    );
    Ok(rep)
}

/// Input data for a quotient construction.
#[derive(Clone, Debug)]
pub struct SubmersionSpec<S> {
    pub model: LieModel<S>,
    pub connection: NomizuConnection<S>,
    /// Basis of the vertical distribution inside m.
    pub vertical: Vec<Vec<S>>,
    /// Elements of the full algebra whose m-projections span the vertical
    /// space; defaults to the vertical vectors themselves.
    pub lifts: Vec<Vec<S>>,
}

impl<S: Scalar> SubmersionSpec<S> {
    pub fn new(
        model: LieModel<S>,
        connection: NomizuConnection<S>,
        vertical: Vec<Vec<S>>,
    ) -> Self {
        let lifts = vertical.iter().map(|v| model.embed_m(v)).collect();
        SubmersionSpec {
            model,
            connection,
            vertical,
            lifts,
        }
    }

    pub fn with_lifts(mut self, lifts: Vec<Vec<S>>) -> Self {
        self.lifts = lifts;
        self
    }
}

/// A constructed quotient: the base model with enlarged isotropy, the
/// horizontal lift identification, and the projected torsion.
#[derive(Clone, Debug)]
pub struct QuotientModel<S> {
    pub base: LieModel<S>,
    /// Base m'-basis vectors as horizontal m-vectors of the total space.
    pub lift: Vec<Vec<S>>,
    pub projected_torsion: Tensor<S>,
    pub base_connection: NomizuConnection<S>,
    pub total: LieModel<S>,
    pub total_connection: NomizuConnection<S>,
    pub report: VerificationReport,
}

impl<S: Scalar> QuotientModel<S> {
    /// Expresses a horizontal m-vector of the total space in base
    /// coordinates; the residual reports any non-horizontal component.
    pub fn to_base_coords(&self, v: &[S]) -> Result<(Vec<S>, f64), GeometryError> {
        let r = self.lift.len();
        let mut gram = Mat::zeros(r, r);
        let mut rhs = Mat::zeros(r, 1);
        for i in 0..r {
            for j in 0..r {
                gram.set(i, j, self.total.fiber.inner(&self.lift[i], &self.lift[j]));
            }
            rhs.set(i, 0, self.total.fiber.inner(&self.lift[i], v));
        }
        let coeff = gram.solve(&rhs)?;
        let coords: Vec<S> = (0..r).map(|i| coeff.at(i, 0).clone()).collect();
        let mut back = vec![S::zero(); self.total.dim_m()];
        for (c, l) in coords.iter().zip(&self.lift) {
            crate::linalg::vec_axpy(&mut back, c, l);
        }
        Ok((coords, vec_max_abs(&vec_sub(v, &back))))
    }

    /// Pushes a total-space endomorphism preserving the horizontal space
    /// down to the base: `E' = π_* ∘ E ∘ lift`.
    pub fn push_endomorphism(&self, e: &Mat<S>) -> Result<(Mat<S>, f64), GeometryError> {
        let r = self.lift.len();
        let mut out = Mat::zeros(r, r);
        let mut defect: f64 = 0.0;
        for (j, l) in self.lift.iter().enumerate() {
            let img = e.apply(l);
            let (coords, res) = self.to_base_coords(&img)?;
            defect = defect.max(res);
            for (i, c) in coords.into_iter().enumerate() {
                out.set(i, j, c);
            }
        }
        Ok((out, defect))
    }

    /// Restriction of a covariant total-space tensor along the lift.
    pub fn restrict_covariant(&self, t: &Tensor<S>) -> Tensor<S> {
        let r = self.lift.len();
        let k = t.p;
        let mut comps = vec![S::zero(); r.pow(k as u32)];
        crate::tensor::for_each_index(r, k, |idx| {
            let args: Vec<&[S]> = idx.iter().map(|&i| self.lift[i].as_slice()).collect();
            comps[crate::tensor::flat_index(r, idx)] = t.eval(&args);
        });
        Tensor {
            p: k,
            q: 0,
            dim: r,
            kind: t.kind,
            comps,
        }
    }
}

/// Builds the quotient model of a canonical submersion.
///
/// Gates: parallel torsion, holonomy invariance of the splitting, closure
/// of the enlarged isotropy, reductivity of the new decomposition, and
/// the Λ²V∧H torsion condition. After construction the projected
/// connection identity and the parallelism of the projected torsion are
/// verified.
pub fn build_quotient<S: Scalar>(
    spec: &SubmersionSpec<S>,
    tol: f64,
    config: &HolonomyConfig,
) -> Result<QuotientModel<S>, GeometryError> {
    let model = &spec.model;
    let conn = &spec.connection;
    let dm = model.dim_m();

    // Gate 1: parallel skew torsion.
    let par = nabla_residual(model, conn, &conn.torsion);
    if par > tol {
        return Err(GeometryError::Refused {
            gate: "parallel-torsion".into(),
            reason: format!("∇T residual {par:.3e} exceeds tolerance"),
        });
    }

    // Gate 2: the splitting is holonomy invariant.
    let horizontal = orthocomplement_basis(&model.fiber, &spec.vertical, config.rank_threshold)?;
    let split_rep = check_invariant_splitting(
        model,
        conn,
        &[spec.vertical.clone(), horizontal.clone()],
        tol,
        config,
    )?;
    if !split_rep.passed() {
        let res = split_rep
            .find("holonomy_preserves_splitting")
            .map(|c| c.residual)
            .unwrap_or(f64::NAN);
        return Err(GeometryError::Refused {
            gate: "vertical-holonomy-invariance".into(),
            reason: format!("splitting not holonomy invariant (residual {res:.3e})"),
        });
    }

    // Gate 3: torsion admissibility.
    let tau = check_projecttau(model, conn, &spec.vertical, tol)?;
    if !tau.passed() {
        let res = tau
            .find("no_mixed_vertical_pair")
            .map(|c| c.residual)
            .unwrap_or(f64::NAN);
        return Err(GeometryError::Refused {
            gate: "projecttau".into(),
            reason: format!("Λ²V∧H torsion component has residual {res:.3e}"),
        });
    }

    // Gate 4: lifts project onto the vertical space.
    if spec.lifts.len() != spec.vertical.len() {
        return Err(GeometryError::Refused {
            gate: "enlarged-isotropy-lifts".into(),
            reason: format!(
                "need {} lifts, got {}",
                spec.vertical.len(),
                spec.lifts.len()
            ),
        });
    }
    {
        let mut span = SpanBasis::new(dm, config.rank_threshold);
        for v in &spec.vertical {
            span.insert(v);
        }
        for l in &spec.lifts {
            let proj_m = model.project_m(l);
            if span.residual(&proj_m) > config.rank_threshold.max(1e-9) {
                return Err(GeometryError::Refused {
                    gate: "enlarged-isotropy-lifts".into(),
                    reason: "a lift does not project into the vertical space".into(),
                });
            }
        }
    }

    // New basis of the full algebra: old isotropy, lifts, horizontal.
    let n = model.dim;
    let mut new_basis: Vec<Vec<S>> = Vec::with_capacity(n);
    for w in 0..model.dim_h() {
        let mut h = vec![S::zero(); model.dim_h()];
        h[w] = S::one();
        new_basis.push(model.embed_h(&h));
    }
    for l in &spec.lifts {
        new_basis.push(l.clone());
    }
    for hvec in &horizontal {
        new_basis.push(model.embed_m(hvec));
    }
    let new_dim_h = model.dim_h() + spec.lifts.len();
    let new_dim_m = horizontal.len();
    if new_basis.len() != n {
        return Err(GeometryError::Refused {
            gate: "enlarged-isotropy-lifts".into(),
            reason: "lifts and horizontal space do not complete a basis".into(),
        });
    }

    let mut p = Mat::zeros(n, n);
    for (j, b) in new_basis.iter().enumerate() {
        for (i, v) in b.iter().enumerate() {
            p.set(i, j, v.clone());
        }
    }
    let p_inv = p.inverse().map_err(|_| GeometryError::Refused {
        gate: "enlarged-isotropy-lifts".into(),
        reason: "new basis is singular".into(),
    })?;

    // Structure constants in the new basis.
    let mut new_c = vec![S::zero(); n * n * n];
    for i in 0..n {
        for j in 0..n {
            let br = model.bracket_full(&new_basis[i], &new_basis[j]);
            let coords = p_inv.apply(&br);
            for (k, v) in coords.into_iter().enumerate() {
                new_c[(i * n + j) * n + k] = v;
            }
        }
    }

    // Gate 5: the enlarged isotropy closes under the bracket.
    let mut closure = ResidualMax::new::<S>();
    for i in 0..new_dim_h {
        for j in 0..new_dim_h {
            for k in new_dim_h..n {
                closure.push(&new_c[(i * n + j) * n + k]);
            }
        }
    }
    if closure.count > 0 && closure.max > tol {
        return Err(GeometryError::Refused {
            gate: "enlarged-isotropy-closure".into(),
            reason: format!(
                "[h', h'] has components outside h' (residual {:.3e})",
                closure.max
            ),
        });
    }

    // Gate 6: reductivity of the new decomposition.
    let mut reductive = ResidualMax::new::<S>();
    for i in 0..new_dim_h {
        for j in new_dim_h..n {
            for k in 0..new_dim_h {
                reductive.push(&new_c[(i * n + j) * n + k]);
            }
        }
    }
    if reductive.count > 0 && reductive.max > tol {
        return Err(GeometryError::Refused {
            gate: "enlarged-reductivity".into(),
            reason: format!(
                "[h', m'] has components outside m' (residual {:.3e})",
                reductive.max
            ),
        });
    }

    // Projected metric: restriction of g along the lift (the submersion
    // is Riemannian by construction; asserted below as a residual check).
    let mut metric = Mat::zeros(new_dim_m, new_dim_m);
    for i in 0..new_dim_m {
        for j in 0..new_dim_m {
            metric.set(i, j, model.fiber.inner(&horizontal[i], &horizontal[j]));
        }
    }

    let base = LieModel::new(
        &format!("{}/quotient", model.name),
        (0..n)
            .map(|i| {
                if i < new_dim_h {
                    format!("h{i}")
                } else {
                    format!("m{}", i - new_dim_h)
                }
            })
            .collect(),
        new_c,
        (0..new_dim_h).collect(),
        (new_dim_h..n).collect(),
        metric,
    )?;

    // Projected torsion: restriction of the purely horizontal part.
    let mut t_comps = vec![S::zero(); new_dim_m * new_dim_m * new_dim_m];
    for i in 0..new_dim_m {
        for j in 0..new_dim_m {
            for k in 0..new_dim_m {
                t_comps[(i * new_dim_m + j) * new_dim_m + k] =
                    conn.torsion
                        .eval(&[&horizontal[i], &horizontal[j], &horizontal[k]]);
            }
        }
    }
    let projected_torsion = Tensor::form_unchecked(new_dim_m, 3, t_comps);

    let base_lc = levi_civita(&base);
    let base_connection = with_torsion(&base, &base_lc, &projected_torsion, tol)?;

    let mut rep = VerificationReport::new(
        "build-quotient",
        &base.name,
        &base.fingerprint(&[]),
        S::EXACT,
    );
    rep.merge(split_rep);
    rep.merge(tau);
    rep.push(
        "enlarged_isotropy_closure",
        "h ⊕ span(ζ) closes under the bracket",
        &closure,
        tol,
        "",
    );
    rep.push(
        "enlarged_reductivity",
        "[h ⊕ span(ζ), V^⊥] ⊆ V^⊥",
        &reductive,
        tol,
        "",
    );

    // Riemannian submersion property (isometric lift).
    let mut isometric = ResidualMax::new::<S>();
    for i in 0..new_dim_m {
        for j in 0..new_dim_m {
            isometric.push(
                &base
                    .fiber
                    .inner(
                        &basis_vectors::<S>(new_dim_m)[i],
                        &basis_vectors::<S>(new_dim_m)[j],
                    )
                    .sub(&model.fiber.inner(&horizontal[i], &horizontal[j])),
            );
        }
    }
    rep.push(
        "riemannian_submersion",
        "g_N(π X, π Y) = g(X, Y) for horizontal X, Y",
        &isometric,
        tol,
        "",
    );

    let mut t_invariant = ResidualMax::new::<S>();
    t_invariant.push_f64(base.invariance_residual(&projected_torsion));
    rep.push(
        "projected_torsion_invariant",
        "Ť is invariant under the enlarged isotropy",
        &t_invariant,
        tol,
        "",
    );

    // Projected-connection identity: the base Nomizu map agrees with the
    // horizontal projection of the total-space Nomizu map on lifts.
    let quotient_stub = QuotientModel {
        base: base.clone(),
        lift: horizontal.clone(),
        projected_torsion: projected_torsion.clone(),
        base_connection: base_connection.clone(),
        total: model.clone(),
        total_connection: conn.clone(),
        report: VerificationReport::new("stub", "", "", S::EXACT),
    };
    let mut pinabla = ResidualMax::new::<S>();
    let base_basis = basis_vectors::<S>(new_dim_m);
    for i in 0..new_dim_m {
        let lam_tot = conn.lambda_at(&horizontal[i]);
        for j in 0..new_dim_m {
            let img = lam_tot.apply(&horizontal[j]);
            let hproj = {
                let pv = model.fiber.project_onto(&spec.vertical, &img)?;
                vec_sub(&img, &pv)
            };
            let (coords, defect) = quotient_stub.to_base_coords(&hproj)?;
            pinabla.push_f64(defect);
            let got = base_connection.lambda_at(&base_basis[i]).apply(&base_basis[j]);
            for v in vec_sub(&got, &coords) {
                pinabla.push(&v);
            }
        }
    }
    rep.push(
        "projected_connection",
        "∇̌_X Y = π(∇_{X̄} Ȳ) on horizontal lifts",
        &pinabla,
        tol,
        "",
    );
    if let Some(c) = rep.find("projected_connection") {
        if !matches!(c.status, crate::report::Status::Pass | crate::report::Status::Vacuous) {
            return Err(GeometryError::Postcondition {
                op: "build_quotient",
                which: "projected connection identity",
                residual: c.residual,
            });
        }
    }

    let mut t_par = ResidualMax::new::<S>();
    t_par.push_f64(nabla_residual(&base, &base_connection, &projected_torsion));
    rep.push(
        "projected_torsion_parallel",
        "∇̌ Ť = 0",
        &t_par,
        tol,
        "",
    );

    let mut t_match = ResidualMax::new::<S>();
    let recomputed = torsion_of(&base, &base_connection);
    for (a, b) in recomputed.comps.iter().zip(&projected_torsion.comps) {
        t_match.push(&a.sub(b));
    }
    rep.push(
        "base_torsion_matches",
        "torsion of ∇̌ equals Ť",
        &t_match,
        tol,
        "",
    );

    Ok(QuotientModel {
        base,
        lift: horizontal,
        projected_torsion,
        base_connection,
        total: model.clone(),
        total_connection: conn.clone(),
        report: rep,
    })
}

/// Reducibility of the base holonomy for a projectable splitting of the
/// horizontal space.
pub fn check_base_reducibility<S: Scalar>(
    quotient: &QuotientModel<S>,
    h1: &[Vec<S>],
    h2: &[Vec<S>],
    tol: f64,
    config: &HolonomyConfig,
) -> Result<VerificationReport, GeometryError> {
    // Projectability: both subspaces must be invariant under the enlarged
    // isotropy of the base model.
    for (name, sub) in [("H1", h1), ("H2", h2)] {
        let mut worst: f64 = 0.0;
        for w in 0..quotient.base.dim_h() {
            let mut h = vec![S::zero(); quotient.base.dim_h()];
            h[w] = S::one();
            let ad = quotient.base.ad_h_on_m(&h);
            for x in sub {
                let y = ad.apply(x);
                let p = quotient.base.fiber.project_onto(sub, &y)?;
                worst = worst.max(vec_max_abs(&vec_sub(&y, &p)));
            }
        }
        let bad = if S::EXACT { worst != 0.0 } else { worst > tol };
        if bad {
            return Err(GeometryError::NotInvariant {
                what: format!("{name} is not projectable (not isotropy invariant)"),
                residual: worst,
            });
        }
    }
    let mut rep = check_invariant_splitting(
        &quotient.base,
        &quotient.base_connection,
        &[h1.to_vec(), h2.to_vec()],
        tol,
        config,
    )?;
    rep.suite = "base-reducibility".into();
    Ok(rep)
}

/// Product splitting: the model decomposes as a product exactly when the
/// torsion is decomposable, `T = T_1 + T_2` with `T_i ∈ Λ³V_i`.
pub fn check_product_splitting<S: Scalar>(
    model: &LieModel<S>,
    conn: &NomizuConnection<S>,
    v1: &[Vec<S>],
    v2: &[Vec<S>],
    tol: f64,
    config: &HolonomyConfig,
) -> Result<VerificationReport, GeometryError> {
    let mut rep = check_invariant_splitting(model, conn, &[v1.to_vec(), v2.to_vec()], tol, config)?;
    rep.suite = "product-splitting".into();

    let p1 = projector_onto(&model.fiber, v1)?;
    let p2 = projector_onto(&model.fiber, v2)?;
    let t1 = pullback_3form(&conn.torsion, &p1);
    let t2 = pullback_3form(&conn.torsion, &p2);
    let mixed = conn.torsion.sub(&t1).sub(&t2);
    let mut decomp = ResidualMax::new::<S>();
    for v in &mixed.comps {
        decomp.push(v);
    }
    let decomposable = if S::EXACT {
        decomp.exact_zero
    } else {
        decomp.max < tol
    };
    rep.push(
        "torsion_decomposable",
        "T = T_1 + T_2 with T_i ∈ Λ³V_i",
        &decomp,
        tol,
        "",
    );
    if decomposable {
        let mut both = check_projecttau(model, conn, v1, tol)?;
        both.merge(check_projecttau(model, conn, v2, tol)?);
        for (i, mut c) in both.checks.into_iter().enumerate() {
            c.name = format!("projecttau_factor{}", i + 1);
            rep.checks.push(c);
        }
    }
    Ok(rep)
}
