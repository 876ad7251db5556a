//! Reductive homogeneous models from Lie-algebra structure constants:
//! invariant exterior derivative, Levi-Civita and skew-torsion connections
//! as Nomizu maps, curvature, covariant and Lie derivatives of invariant
//! tensors, holonomy algebra, and the first Bianchi identity for
//! connections with parallel skew torsion.

use crate::error::GeometryError;
use crate::linalg::{vec_max_abs, vec_sub, Mat, SpanBasis};
use crate::report::{fingerprint, ResidualMax, VerificationReport};
use crate::scalar::Scalar;
use crate::tensor::{endo_action, for_each_index, flat_index, Fiber, Tensor, TensorKind};

/// Configuration for rank decisions in the holonomy closure.
#[derive(Clone, Copy, Debug)]
pub struct HolonomyConfig {
    /// Relative threshold on elimination remainders (ignored in exact mode).
    pub rank_threshold: f64,
}

impl Default for HolonomyConfig {
    fn default() -> Self {
        HolonomyConfig {
            rank_threshold: 1e-9,
        }
    }
}

/// A Lie algebra with a reductive decomposition `g = h ⊕ m` and an
/// invariant metric on the complement `m`.
///
/// Both `h` and `m` are spanned by subsets of the ambient basis, so
/// projections are coordinate selections. `m`-vectors are coefficient
/// vectors over `complement` in its stored order.
#[derive(Clone, Debug)]
pub struct LieModel<S> {
    pub name: String,
    pub dim: usize,
    pub basis_labels: Vec<String>,
    constants: Vec<S>,
    pub isotropy: Vec<usize>,
    pub complement: Vec<usize>,
    pub fiber: Fiber<S>,
}

impl<S: Scalar> LieModel<S> {
    pub fn new(
        name: &str,
        basis_labels: Vec<String>,
        constants: Vec<S>,
        isotropy: Vec<usize>,
        complement: Vec<usize>,
        metric_on_m: Mat<S>,
    ) -> Result<Self, GeometryError> {
        let dim = basis_labels.len();
        if constants.len() != dim * dim * dim {
            return Err(GeometryError::DimMismatch {
                what: "structure constants",
                expected: dim * dim * dim,
                got: constants.len(),
            });
        }
        let mut seen = vec![false; dim];
        for &i in isotropy.iter().chain(&complement) {
            if i >= dim || seen[i] {
                return Err(GeometryError::InvalidParameter(format!(
                    "basis index {i} repeated or out of range in h/m partition"
                )));
            }
            seen[i] = true;
        }
        if seen.iter().any(|s| !s) {
            return Err(GeometryError::InvalidParameter(
                "isotropy and complement indices must partition the basis".into(),
            ));
        }
        if metric_on_m.rows != complement.len() {
            return Err(GeometryError::DimMismatch {
                what: "metric on m",
                expected: complement.len(),
                got: metric_on_m.rows,
            });
        }
        let fiber = Fiber::new(metric_on_m)?;
        Ok(LieModel {
            name: name.to_string(),
            dim,
            basis_labels,
            constants,
            isotropy,
            complement,
            fiber,
        })
    }

    pub fn dim_m(&self) -> usize {
        self.complement.len()
    }

    pub fn dim_h(&self) -> usize {
        self.isotropy.len()
    }

    #[inline]
    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> &S {
        &self.constants[(i * self.dim + j) * self.dim + k]
    }

    /// Bracket of full-algebra coefficient vectors.
    pub fn bracket_full(&self, x: &[S], y: &[S]) -> Vec<S> {
        let n = self.dim;
        let mut out = vec![S::zero(); n];
        for i in 0..n {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if y[j].is_zero() {
                    continue;
                }
                let c = x[i].mul(&y[j]);
                for k in 0..n {
                    let sc = self.structure_constant(i, j, k);
                    if !sc.is_zero() {
                        out[k] = out[k].add(&c.mul(sc));
                    }
                }
            }
        }
        out
    }

    pub fn embed_m(&self, x_m: &[S]) -> Vec<S> {
        let mut full = vec![S::zero(); self.dim];
        for (slot, &idx) in self.complement.iter().enumerate() {
            full[idx] = x_m[slot].clone();
        }
        full
    }

    pub fn embed_h(&self, w_h: &[S]) -> Vec<S> {
        let mut full = vec![S::zero(); self.dim];
        for (slot, &idx) in self.isotropy.iter().enumerate() {
            full[idx] = w_h[slot].clone();
        }
        full
    }

    pub fn project_m(&self, full: &[S]) -> Vec<S> {
        self.complement.iter().map(|&i| full[i].clone()).collect()
    }

    pub fn project_h(&self, full: &[S]) -> Vec<S> {
        self.isotropy.iter().map(|&i| full[i].clone()).collect()
    }

    /// m-projection of the bracket of two m-vectors.
    pub fn bracket_m(&self, x_m: &[S], y_m: &[S]) -> Vec<S> {
        self.project_m(&self.bracket_full(&self.embed_m(x_m), &self.embed_m(y_m)))
    }

    /// h-projection of the bracket of two m-vectors.
    pub fn bracket_m_h_part(&self, x_m: &[S], y_m: &[S]) -> Vec<S> {
        self.project_h(&self.bracket_full(&self.embed_m(x_m), &self.embed_m(y_m)))
    }

    fn m_basis_vector(&self, a: usize) -> Vec<S> {
        let mut v = vec![S::zero(); self.dim_m()];
        v[a] = S::one();
        v
    }

    /// Isotropy action `ad(w)|_m` for an h-coefficient vector.
    pub fn ad_h_on_m(&self, w_h: &[S]) -> Mat<S> {
        let dm = self.dim_m();
        let w_full = self.embed_h(w_h);
        let mut out = Mat::zeros(dm, dm);
        for b in 0..dm {
            let col = self.project_m(&self.bracket_full(&w_full, &self.embed_m(&self.m_basis_vector(b))));
            for (a, v) in col.into_iter().enumerate() {
                out.set(a, b, v);
            }
        }
        out
    }

    fn h_basis_vector(&self, a: usize) -> Vec<S> {
        let mut v = vec![S::zero(); self.dim_h()];
        v[a] = S::one();
        v
    }

    /// Isotropy-invariance defect of an invariant tensor candidate.
    pub fn invariance_residual(&self, s: &Tensor<S>) -> f64 {
        let mut res: f64 = 0.0;
        for w in 0..self.dim_h() {
            let ad = self.ad_h_on_m(&self.h_basis_vector(w));
            res = res.max(endo_action(&ad, s).max_abs());
        }
        res
    }

    pub fn fingerprint(&self, extra: &[String]) -> String {
        let mut parts = vec![
            self.name.clone(),
            self.dim.to_string(),
            self.basis_labels.join(","),
            self.constants
                .iter()
                .map(|c| c.encode())
                .collect::<Vec<_>>()
                .join(","),
            format!("{:?}", self.isotropy),
            format!("{:?}", self.complement),
            self.fiber
                .metric
                .data
                .iter()
                .map(|c| c.encode())
                .collect::<Vec<_>>()
                .join(","),
        ];
        parts.extend_from_slice(extra);
        fingerprint(&parts)
    }
}

/// Invariant metric connection as a Nomizu map `X -> Λ(X)` together with
/// its torsion 3-form.
#[derive(Clone, Debug)]
pub struct NomizuConnection<S> {
    pub lambda: Vec<Mat<S>>,
    pub torsion: Tensor<S>,
}

impl<S: Scalar> NomizuConnection<S> {
    pub fn from_parts_unchecked(lambda: Vec<Mat<S>>, torsion: Tensor<S>) -> Self {
        NomizuConnection { lambda, torsion }
    }

    /// Λ evaluated on an m-coefficient vector.
    pub fn lambda_at(&self, x_m: &[S]) -> Mat<S> {
        let dm = self.lambda[0].rows;
        let mut out = Mat::zeros(dm, dm);
        for (a, la) in self.lambda.iter().enumerate() {
            if x_m[a].is_zero() {
                continue;
            }
            out = out.add(&la.scale(&x_m[a]));
        }
        out
    }

    /// Metric compatibility and torsion consistency residuals.
    pub fn validate(&self, model: &LieModel<S>, tol: f64) -> VerificationReport {
        let mut rep = VerificationReport::new(
            "nomizu-connection",
            &model.name,
            &model.fingerprint(&[]),
            S::EXACT,
        );
        let mut skew = ResidualMax::new::<S>();
        for la in &self.lambda {
            skew.push_f64(model.fiber.skew_adjoint_residual(la));
        }
        rep.push(
            "lambda_skew_adjoint",
            "metric connection: g(Λ(X)Y,Z) = -g(Y,Λ(X)Z)",
            &skew,
            tol,
            "",
        );
        let recomputed = torsion_of(model, self);
        let mut cons = ResidualMax::new::<S>();
        for (a, b) in recomputed.comps.iter().zip(&self.torsion.comps) {
            cons.push(&a.sub(b));
        }
        rep.push(
            "torsion_consistency",
            "T(X,Y,Z) = g(Λ(X)Y - Λ(Y)X - [X,Y]_m, Z)",
            &cons,
            tol,
            "",
        );
        rep
    }
}

/// Curvature endomorphisms indexed by ordered basis pairs of m.
#[derive(Clone, Debug)]
pub struct CurvatureOperator<S> {
    pub dim_m: usize,
    ops: Vec<Mat<S>>,
}

impl<S: Scalar> CurvatureOperator<S> {
    pub fn at(&self, a: usize, b: usize) -> &Mat<S> {
        &self.ops[a * self.dim_m + b]
    }

    /// Antisymmetry in (X,Y) and skew-adjointness residuals.
    pub fn validate(&self, fiber: &Fiber<S>) -> (f64, f64) {
        let mut antisym: f64 = 0.0;
        let mut skew: f64 = 0.0;
        for a in 0..self.dim_m {
            for b in 0..self.dim_m {
                antisym = antisym.max(self.at(a, b).add(self.at(b, a)).max_abs());
                skew = skew.max(fiber.skew_adjoint_residual(self.at(a, b)));
            }
        }
        (antisym, skew)
    }
}

/// Validates algebra axioms and reductive structure as residual checks.
pub fn validate_model<S: Scalar>(model: &LieModel<S>, tol: f64) -> VerificationReport {
    let mut rep = VerificationReport::new(
        "validate-model",
        &model.name,
        &model.fingerprint(&[]),
        S::EXACT,
    );
    let n = model.dim;

    let mut antisym = ResidualMax::new::<S>();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                antisym.push(
                    &model
                        .structure_constant(i, j, k)
                        .add(model.structure_constant(j, i, k)),
                );
            }
        }
    }
    rep.push("bracket_antisymmetry", "c[i][j][k] = -c[j][i][k]", &antisym, tol, "");

    let mut jacobi = ResidualMax::new::<S>();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for m in 0..n {
                    let mut acc = S::zero();
                    for l in 0..n {
                        acc = acc.add(
                            &model
                                .structure_constant(i, j, l)
                                .mul(model.structure_constant(l, k, m)),
                        );
                        acc = acc.add(
                            &model
                                .structure_constant(j, k, l)
                                .mul(model.structure_constant(l, i, m)),
                        );
                        acc = acc.add(
                            &model
                                .structure_constant(k, i, l)
                                .mul(model.structure_constant(l, j, m)),
                        );
                    }
                    jacobi.push(&acc);
                }
            }
        }
    }
    rep.push("jacobi_identity", "[[X,Y],Z] + [[Y,Z],X] + [[Z,X],Y] = 0", &jacobi, tol, "");

    let mut hh = ResidualMax::new::<S>();
    for a in 0..model.dim_h() {
        for b in 0..model.dim_h() {
            let br = model.bracket_full(
                &model.embed_h(&model.h_basis_vector(a)),
                &model.embed_h(&model.h_basis_vector(b)),
            );
            for v in model.project_m(&br) {
                hh.push(&v);
            }
        }
    }
    rep.push("isotropy_subalgebra", "[h,h] ⊆ h", &hh, tol, "");

    let mut hm = ResidualMax::new::<S>();
    for a in 0..model.dim_h() {
        for b in 0..model.dim_m() {
            let br = model.bracket_full(
                &model.embed_h(&model.h_basis_vector(a)),
                &model.embed_m(&model.m_basis_vector(b)),
            );
            for v in model.project_h(&br) {
                hm.push(&v);
            }
        }
    }
    rep.push("reductive_complement", "[h,m] ⊆ m", &hm, tol, "");

    let mut inv = ResidualMax::new::<S>();
    for a in 0..model.dim_h() {
        let ad = model.ad_h_on_m(&model.h_basis_vector(a));
        let ga = model.fiber.metric.matmul(&ad);
        for v in &ga.add(&ga.transpose()).data {
            inv.push(v);
        }
    }
    rep.push(
        "metric_isotropy_invariance",
        "each ad(h)|_m is skew-adjoint for g",
        &inv,
        tol,
        "",
    );
    rep
}

/// Exterior derivative of an invariant form:
/// `(da)(X_0,...,X_k) = Σ_{i<j} (-1)^{i+j} a([X_i,X_j]_m, ..., ^X_i, ..., ^X_j, ...)`.
pub fn d_invariant<S: Scalar>(
    model: &LieModel<S>,
    a: &Tensor<S>,
    tol: f64,
) -> Result<Tensor<S>, GeometryError> {
    assert_eq!(a.q, 0);
    let inv = model.invariance_residual(a);
    let bad = if S::EXACT { inv != 0.0 } else { inv > tol };
    if bad {
        return Err(GeometryError::NotInvariant {
            what: "form passed to d".into(),
            residual: inv,
        });
    }
    let dm = model.dim_m();
    let k = a.p;
    if k + 1 > dm {
        return Ok(Tensor::zero_form(dm, (k + 1).min(dm)));
    }
    // Precompute m-brackets of basis pairs.
    let mut br = vec![vec![S::zero(); dm]; dm * dm];
    for i in 0..dm {
        for j in 0..dm {
            br[i * dm + j] = model.bracket_m(&model.m_basis_vector(i), &model.m_basis_vector(j));
        }
    }
    let mut comps = vec![S::zero(); dm.pow((k + 1) as u32)];
    for_each_index(dm, k + 1, |idx| {
        let mut acc = S::zero();
        for i in 0..k + 1 {
            for j in i + 1..k + 1 {
                let bracket = &br[idx[i] * dm + idx[j]];
                let mut rest = Vec::with_capacity(k);
                rest.push(0usize); // placeholder for the bracket slot
                for (pos, &v) in idx.iter().enumerate() {
                    if pos != i && pos != j {
                        rest.push(v);
                    }
                }
                let mut term = S::zero();
                for (m, bm) in bracket.iter().enumerate() {
                    if bm.is_zero() {
                        continue;
                    }
                    rest[0] = m;
                    term = term.add(&bm.mul(&a.comps[flat_index(dm, &rest)]));
                }
                if (i + j) % 2 == 0 {
                    acc = acc.add(&term);
                } else {
                    acc = acc.sub(&term);
                }
            }
        }
        comps[flat_index(dm, idx)] = acc;
    });
    Ok(Tensor::form_unchecked(dm, k + 1, comps))
}

/// Levi-Civita connection by the invariant Koszul formula:
/// `Λ(X)Y = 1/2 [X,Y]_m + U(X,Y)` with
/// `2 g(U(X,Y),Z) = g([Z,X]_m, Y) + g(X, [Z,Y]_m)`.
pub fn levi_civita<S: Scalar>(model: &LieModel<S>) -> NomizuConnection<S> {
    let dm = model.dim_m();
    let half = S::from_ratio(1, 2);
    let mut lambda = Vec::with_capacity(dm);
    let basis: Vec<Vec<S>> = (0..dm).map(|a| model.m_basis_vector(a)).collect();
    for a in 0..dm {
        let mut la = Mat::zeros(dm, dm);
        for b in 0..dm {
            let mut col = crate::linalg::vec_scale(&model.bracket_m(&basis[a], &basis[b]), &half);
            // U-term via its metric dual.
            let mut w = vec![S::zero(); dm];
            for (c, wc) in w.iter_mut().enumerate() {
                let t1 = model
                    .fiber
                    .inner(&model.bracket_m(&basis[c], &basis[a]), &basis[b]);
                let t2 = model
                    .fiber
                    .inner(&basis[a], &model.bracket_m(&basis[c], &basis[b]));
                *wc = half.mul(&t1.add(&t2));
            }
            let u = model.fiber.sharp(&w);
            for i in 0..dm {
                col[i] = col[i].add(&u[i]);
            }
            for (i, v) in col.into_iter().enumerate() {
                la.set(i, b, v);
            }
        }
        lambda.push(la);
    }
    let mut conn = NomizuConnection {
        lambda,
        torsion: Tensor::zero_form(dm, 3),
    };
    conn.torsion = torsion_of(model, &conn);
    conn
}

/// Adds skew torsion to a torsion-free connection: `Λ(X) = Λ_g(X) + 1/2 T(X,·,·)^♯`.
pub fn with_torsion<S: Scalar>(
    model: &LieModel<S>,
    base: &NomizuConnection<S>,
    torsion: &Tensor<S>,
    tol: f64,
) -> Result<NomizuConnection<S>, GeometryError> {
    if torsion.kind != TensorKind::AlternatingForm || torsion.p != 3 {
        return Err(GeometryError::NotAlternating {
            residual: torsion.alternation_residual(),
        });
    }
    let res = torsion.alternation_residual();
    let bad = if S::EXACT {
        res != 0.0
    } else {
        res > tol.max(crate::tensor::ALTERNATION_TOL * torsion.max_abs().max(1.0))
    };
    if bad {
        return Err(GeometryError::NotAlternating { residual: res });
    }
    let base_torsion = torsion_of(model, base);
    if base_torsion.max_abs() > tol {
        return Err(GeometryError::Postcondition {
            op: "with_torsion",
            which: "base connection must be torsion-free",
            residual: base_torsion.max_abs(),
        });
    }
    let dm = model.dim_m();
    let half = S::from_ratio(1, 2);
    let mut lambda = Vec::with_capacity(dm);
    for a in 0..dm {
        let mut la = base.lambda[a].clone();
        for b in 0..dm {
            // Column b gains 1/2 (T(e_a, e_b, ·))^♯.
            let mut w = vec![S::zero(); dm];
            for (c, wc) in w.iter_mut().enumerate() {
                *wc = torsion.comps[(a * dm + b) * dm + c].clone();
            }
            let v = model.fiber.sharp(&w);
            for i in 0..dm {
                la.set(i, b, la.at(i, b).add(&half.mul(&v[i])));
            }
        }
        lambda.push(la);
    }
    Ok(NomizuConnection {
        lambda,
        torsion: torsion.clone(),
    })
}

/// Torsion 3-form of a Nomizu map:
/// `T(X,Y,Z) = g(Λ(X)Y - Λ(Y)X - [X,Y]_m, Z)`.
pub fn torsion_of<S: Scalar>(model: &LieModel<S>, conn: &NomizuConnection<S>) -> Tensor<S> {
    let dm = model.dim_m();
    let basis: Vec<Vec<S>> = (0..dm).map(|a| model.m_basis_vector(a)).collect();
    let mut comps = vec![S::zero(); dm * dm * dm];
    for a in 0..dm {
        for b in 0..dm {
            let mut v = conn.lambda[a].apply(&basis[b]);
            let w = conn.lambda[b].apply(&basis[a]);
            let br = model.bracket_m(&basis[a], &basis[b]);
            for i in 0..dm {
                v[i] = v[i].sub(&w[i]).sub(&br[i]);
            }
            let flat = model.fiber.flat(&v);
            for (c, t) in flat.into_iter().enumerate() {
                comps[(a * dm + b) * dm + c] = t;
            }
        }
    }
    Tensor::form_unchecked(dm, 3, comps)
}

/// Curvature `R(X,Y) = [Λ(X),Λ(Y)] - Λ([X,Y]_m) - ad([X,Y]_h)|_m`.
pub fn curvature<S: Scalar>(model: &LieModel<S>, conn: &NomizuConnection<S>) -> CurvatureOperator<S> {
    let dm = model.dim_m();
    let basis: Vec<Vec<S>> = (0..dm).map(|a| model.m_basis_vector(a)).collect();
    let mut ops = Vec::with_capacity(dm * dm);
    for a in 0..dm {
        for b in 0..dm {
            let comm = conn.lambda[a].commutator(&conn.lambda[b]);
            let br_m = model.bracket_m(&basis[a], &basis[b]);
            let br_h = model.bracket_m_h_part(&basis[a], &basis[b]);
            let r = comm
                .sub(&conn.lambda_at(&br_m))
                .sub(&model.ad_h_on_m(&br_h));
            ops.push(r);
        }
    }
    CurvatureOperator { dim_m: dm, ops }
}

/// Covariant derivative of an invariant tensor: `∇_X S = Λ(X)·S`.
pub fn nabla_invariant<S: Scalar>(
    model: &LieModel<S>,
    conn: &NomizuConnection<S>,
    s: &Tensor<S>,
    x_m: &[S],
    tol: f64,
) -> Result<Tensor<S>, GeometryError> {
    let inv = model.invariance_residual(s);
    let bad = if S::EXACT { inv != 0.0 } else { inv > tol };
    if bad {
        return Err(GeometryError::NotInvariant {
            what: "tensor passed to nabla".into(),
            residual: inv,
        });
    }
    Ok(endo_action(&conn.lambda_at(x_m), s))
}

/// Max-norm of `∇S` over all basis directions.
pub fn nabla_residual<S: Scalar>(
    model: &LieModel<S>,
    conn: &NomizuConnection<S>,
    s: &Tensor<S>,
) -> f64 {
    let mut res: f64 = 0.0;
    for la in &conn.lambda {
        res = res.max(endo_action(la, s).max_abs());
    }
    // Invariance is part of parallelism for invariant data.
    res.max(model.invariance_residual(s))
}

/// Lie derivative of an invariant tensor along an m-vector, evaluated at
/// the origin: `L_V S = ∇g_V S - A_V · S` with `A_V(X) = Λ_g(X) V`.
pub fn lie_derivative<S: Scalar>(
    model: &LieModel<S>,
    v_m: &[S],
    s: &Tensor<S>,
    tol: f64,
) -> Result<Tensor<S>, GeometryError> {
    let lc = levi_civita(model);
    let inv = model.invariance_residual(s);
    let bad = if S::EXACT { inv != 0.0 } else { inv > tol };
    if bad {
        return Err(GeometryError::NotInvariant {
            what: "tensor passed to Lie derivative".into(),
            residual: inv,
        });
    }
    let dm = model.dim_m();
    let mut a_v = Mat::zeros(dm, dm);
    for b in 0..dm {
        let col = lc.lambda[b].apply(v_m);
        for (i, val) in col.into_iter().enumerate() {
            a_v.set(i, b, val);
        }
    }
    let nabla = endo_action(&lc.lambda_at(v_m), s);
    Ok(nabla.sub(&endo_action(&a_v, s)))
}

/// First Bianchi identity for a connection with parallel skew torsion:
/// cyclic sum of `R(X,Y,Z,V)` equals the cyclic sum of `g(T(X,Y),T(Z,V))`.
pub fn bianchi_check<S: Scalar>(
    model: &LieModel<S>,
    conn: &NomizuConnection<S>,
    tol: f64,
) -> VerificationReport {
    let mut rep = VerificationReport::new(
        "bianchi",
        &model.name,
        &model.fingerprint(&[]),
        S::EXACT,
    );
    let dm = model.dim_m();

    let mut parallel = ResidualMax::new::<S>();
    parallel.push_f64(nabla_residual(model, conn, &conn.torsion));
    rep.push(
        "torsion_parallel_precondition",
        "∇T = 0",
        &parallel,
        tol,
        if parallel.max > tol {
            "torsion is not parallel; the identity below is not expected to hold"
        } else {
            ""
        },
    );

    let r = curvature(model, conn);
    let basis: Vec<Vec<S>> = (0..dm).map(|a| {
        let mut v = vec![S::zero(); dm];
        v[a] = S::one();
        v
    }).collect();
    // R(a,b,c,d) = g(R(e_a,e_b)e_c, e_d).
    let mut r4 = vec![S::zero(); dm * dm * dm * dm];
    for a in 0..dm {
        for b in 0..dm {
            let op = r.at(a, b);
            for c in 0..dm {
                let col = op.apply(&basis[c]);
                let fl = model.fiber.flat(&col);
                for (d, v) in fl.into_iter().enumerate() {
                    r4[((a * dm + b) * dm + c) * dm + d] = v;
                }
            }
        }
    }
    // T(a,b) as a vector.
    let t = &conn.torsion;
    let mut tv = vec![vec![S::zero(); dm]; dm * dm];
    for a in 0..dm {
        for b in 0..dm {
            let w: Vec<S> = (0..dm)
                .map(|c| t.comps[(a * dm + b) * dm + c].clone())
                .collect();
            tv[a * dm + b] = model.fiber.sharp(&w);
        }
    }
    let mut res = ResidualMax::new::<S>();
    for a in 0..dm {
        for b in 0..dm {
            for c in 0..dm {
                for d in 0..dm {
                    let lhs = r4[((a * dm + b) * dm + c) * dm + d]
                        .add(&r4[((b * dm + c) * dm + a) * dm + d])
                        .add(&r4[((c * dm + a) * dm + b) * dm + d]);
                    let rhs = model
                        .fiber
                        .inner(&tv[a * dm + b], &tv[c * dm + d])
                        .add(&model.fiber.inner(&tv[b * dm + c], &tv[a * dm + d]))
                        .add(&model.fiber.inner(&tv[c * dm + a], &tv[b * dm + d]));
                    res.push(&lhs.sub(&rhs));
                }
            }
        }
    }
    rep.push(
        "first_bianchi_with_torsion",
        "cyclic R(X,Y,Z,V) = cyclic g(T(X,Y),T(Z,V))",
        &res,
        tol,
        "",
    );
    rep
}

/// Result of the algebraic holonomy closure.
pub struct HolonomyAlgebra<S> {
    /// Basis of the computed holonomy algebra inside End(m).
    pub basis: Vec<Mat<S>>,
    /// Set when the closure filled all of so(m) before stabilizing.
    pub full_so_warning: bool,
}

/// Computed holonomy algebra: the smallest subspace of End(m) containing
/// every curvature operator and closed under brackets with each Λ(X) and
/// with the isotropy action, found by iterated span closure with rank
/// stabilization.
pub fn holonomy_algebra<S: Scalar>(
    model: &LieModel<S>,
    conn: &NomizuConnection<S>,
    config: &HolonomyConfig,
) -> HolonomyAlgebra<S> {
    let dm = model.dim_m();
    let so_dim = dm * (dm - 1) / 2;
    let mut span = SpanBasis::new(dm * dm, config.rank_threshold);
    let mut worklist: Vec<Mat<S>> = Vec::new();

    let normalize = |m: &Mat<S>| -> Mat<S> {
        let pivot = m
            .data
            .iter()
            .max_by(|x, y| {
                x.abs_f64()
                    .partial_cmp(&y.abs_f64())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .cloned()
            .unwrap_or_else(S::zero);
        if pivot.is_zero() {
            m.clone()
        } else {
            m.scale(&S::one().div(&pivot))
        }
    };

    let r = curvature(model, conn);
    for a in 0..dm {
        for b in a + 1..dm {
            let op = normalize(r.at(a, b));
            if span.insert(&op.data) {
                worklist.push(op);
            }
        }
    }
    let mut gens: Vec<Mat<S>> = conn.lambda.clone();
    for w in 0..model.dim_h() {
        let mut h = vec![S::zero(); model.dim_h()];
        h[w] = S::one();
        gens.push(model.ad_h_on_m(&h));
    }

    let mut full_so_warning = false;
    let mut rounds = 0usize;
    while !worklist.is_empty() {
        if span.rank() >= so_dim {
            full_so_warning = true;
            break;
        }
        rounds += 1;
        if rounds > so_dim + 2 {
            full_so_warning = true;
            break;
        }
        let mut next = Vec::new();
        for m in &worklist {
            for g in &gens {
                let br = normalize(&g.commutator(m));
                if span.insert(&br.data) {
                    next.push(br);
                }
            }
        }
        worklist = next;
    }

    let basis = span
        .basis
        .iter()
        .map(|v| Mat {
            rows: dm,
            cols: dm,
            data: v.clone(),
        })
        .collect();
    HolonomyAlgebra {
        basis,
        full_so_warning,
    }
}

/// Checks that every subspace in `splitting` is preserved by the computed
/// holonomy algebra. Subspaces are given by bases of m-vectors.
pub fn check_invariant_splitting<S: Scalar>(
    model: &LieModel<S>,
    conn: &NomizuConnection<S>,
    splitting: &[Vec<Vec<S>>],
    tol: f64,
    config: &HolonomyConfig,
) -> Result<VerificationReport, GeometryError> {
    let dm = model.dim_m();
    let mut rank = SpanBasis::new(dm, config.rank_threshold);
    for sub in splitting {
        for v in sub {
            rank.insert(v);
        }
    }
    if rank.rank() < dm {
        return Err(GeometryError::NotSpanning {
            rank: rank.rank(),
            dim: dm,
        });
    }
    let mut rep = VerificationReport::new(
        "invariant-splitting",
        &model.name,
        &model.fingerprint(&[]),
        S::EXACT,
    );
    let mut ortho = ResidualMax::new::<S>();
    for (i, si) in splitting.iter().enumerate() {
        for sj in splitting.iter().skip(i + 1) {
            for x in si {
                for y in sj {
                    ortho.push(&model.fiber.inner(x, y));
                }
            }
        }
    }
    rep.push(
        "subspaces_orthogonal",
        "plumbing",
        &ortho,
        tol,
        "",
    );

    let hol = holonomy_algebra(model, conn, config);
    let mut res = ResidualMax::new::<S>();
    for a in &hol.basis {
        for sub in splitting {
            for x in sub {
                let y = a.apply(x);
                let proj = model.fiber.project_onto(sub, &y)?;
                for v in vec_sub(&y, &proj) {
                    res.push(&v);
                }
            }
        }
    }
    rep.push(
        "holonomy_preserves_splitting",
        "TM splits orthogonally as a holonomy representation",
        &res,
        tol,
        if hol.full_so_warning {
            "holonomy closure reached full so(m)"
        } else {
            ""
        },
    );
    Ok(rep)
}

/// Projection of an m-vector onto the g-orthogonal complement of a subspace.
pub fn complement_residual<S: Scalar>(
    fiber: &Fiber<S>,
    subspace: &[Vec<S>],
    v: &[S],
) -> f64 {
    match fiber.project_onto(subspace, v) {
        Ok(p) => vec_max_abs(&vec_sub(v, &p)),
        Err(_) => f64::INFINITY,
    }
}

pub(crate) fn basis_vectors<S: Scalar>(dim: usize) -> Vec<Vec<S>> {
    (0..dim)
        .map(|a| {
            let mut v = vec![S::zero(); dim];
            v[a] = S::one();
            v
        })
        .collect()
}

/// Derivative endomorphism `A_V: X -> Λ_g(X)V` used by the Lie derivative.
pub fn gradient_endomorphism<S: Scalar>(conn_g: &NomizuConnection<S>, v_m: &[S]) -> Mat<S> {
    let dm = conn_g.lambda[0].rows;
    let mut a_v = Mat::zeros(dm, dm);
    for b in 0..dm {
        let col = conn_g.lambda[b].apply(v_m);
        for (i, val) in col.into_iter().enumerate() {
            a_v.set(i, b, val);
        }
    }
    a_v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Mat;

    fn epsilon_sign(i: usize, j: usize, k: usize) -> i64 {
        match (i, j, k) {
            (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1,
            (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1,
            _ => 0,
        }
    }

    /// su(2) with [e_i, e_j] = 2 delta e_k and the unit metric; h = 0.
    pub fn su2_model(delta: f64) -> LieModel<f64> {
        let mut c = vec![0.0; 27];
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    c[(i * 3 + j) * 3 + k] = 2.0 * delta * epsilon_sign(i, j, k) as f64;
                }
            }
        }
        LieModel::new(
            "su2",
            vec!["x1".into(), "x2".into(), "x3".into()],
            c,
            vec![],
            vec![0, 1, 2],
            Mat::identity(3),
        )
        .unwrap()
    }

    fn abelian(dim: usize) -> LieModel<f64> {
        LieModel::new(
            "abelian",
            (0..dim).map(|i| format!("e{i}")).collect(),
            vec![0.0; dim * dim * dim],
            vec![],
            (0..dim).collect(),
            Mat::identity(dim),
        )
        .unwrap()
    }

    #[test]
    fn validate_abelian_and_su2() {
        let rep = validate_model(&abelian(4), 1e-12);
        assert!(rep.passed());
        for c in &rep.checks {
            assert_eq!(c.residual, 0.0);
        }
        assert!(validate_model(&su2_model(2.0), 1e-12).passed());
    }

    #[test]
    fn tampered_constants_fail_jacobi() {
        let mut m = su2_model(1.0);
        // Give [e_0,e_1] a component along e_0; antisymmetry is kept so
        // only Jacobi trips.
        m.constants[(0 * 3 + 1) * 3 + 0] += 0.5;
        m.constants[(1 * 3 + 0) * 3 + 0] -= 0.5;
        let rep = validate_model(&m, 1e-12);
        assert!(!rep.passed());
        let jac = rep.find("jacobi_identity").unwrap();
        assert!(jac.residual > 0.1);
        assert!(rep.find("bracket_antisymmetry").unwrap().residual == 0.0);
    }

    #[test]
    fn d_of_invariant_one_forms() {
        let ab = abelian(3);
        let eta = Tensor::form(3, 1, vec![1.0, 2.0, -1.0]).unwrap();
        let d = d_invariant(&ab, &eta, 1e-12).unwrap();
        assert_eq!(d.max_abs(), 0.0);

        // d eta_1 (xi_2, xi_3) = -eta_1([xi_2, xi_3]) = -2 delta.
        let delta = 1.5;
        let m = su2_model(delta);
        let eta1 = Tensor::form(3, 1, vec![1.0, 0.0, 0.0]).unwrap();
        let d1 = d_invariant(&m, &eta1, 1e-12).unwrap();
        let xi2 = [0.0, 1.0, 0.0];
        let xi3 = [0.0, 0.0, 1.0];
        assert!((d1.eval(&[&xi2, &xi3]) + 2.0 * delta).abs() < 1e-14);
    }

    #[test]
    fn d_squared_vanishes_on_su2() {
        let m = su2_model(1.0);
        let eta = Tensor::form(3, 1, vec![0.3, -1.2, 0.9]).unwrap();
        let dd = d_invariant(&m, &d_invariant(&m, &eta, 1e-12).unwrap(), 1e-12).unwrap();
        assert!(dd.max_abs() < 1e-14);
    }

    #[test]
    fn levi_civita_bi_invariant_is_half_bracket() {
        let m = su2_model(1.0);
        let lc = levi_civita(&m);
        // Λ(e_1) e_2 = 1/2 [e_1, e_2] = e_3.
        let out = lc.lambda[0].apply(&[0.0, 1.0, 0.0]);
        assert!((out[2] - 1.0).abs() < 1e-14 && out[0].abs() < 1e-14);
        assert_eq!(torsion_of(&m, &lc).max_abs(), 0.0);
        assert!(lc.validate(&m, 1e-12).passed());
    }

    #[test]
    fn levi_civita_abelian_vanishes_and_scaled_s3_torsion_free() {
        let lc = levi_civita(&abelian(3));
        for la in &lc.lambda {
            assert_eq!(la.max_abs(), 0.0);
        }

        let mut scaled = su2_model(1.0);
        scaled.fiber = Fiber::new(Mat::from_rows(vec![
            vec![0.3, 0.0, 0.0],
            vec![0.0, 0.3, 0.0],
            vec![0.0, 0.0, 0.3],
        ]))
        .unwrap();
        let lc2 = levi_civita(&scaled);
        assert!(torsion_of(&scaled, &lc2).max_abs() < 1e-14);
    }

    #[test]
    fn with_torsion_roundtrip_and_skewness() {
        let m = su2_model(2.0);
        let lc = levi_civita(&m);
        let zero = Tensor::zero_form(3, 3);
        let same = with_torsion(&m, &lc, &zero, 1e-12).unwrap();
        for (a, b) in same.lambda.iter().zip(&lc.lambda) {
            assert_eq!(a.sub(b).max_abs(), 0.0);
        }

        let mut t = vec![0.0; 27];
        let s = -4.0;
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    t[(i * 3 + j) * 3 + k] = s * epsilon_sign(i, j, k) as f64;
                }
            }
        }
        let torsion = Tensor::form(3, 3, t).unwrap();
        let conn = with_torsion(&m, &lc, &torsion, 1e-12).unwrap();
        assert_eq!(torsion_of(&m, &conn).sub(&torsion).max_abs(), 0.0);
        for la in &conn.lambda {
            assert!(m.fiber.skew_adjoint_residual(la) < 1e-14);
        }
    }

    #[test]
    fn torsion_of_flat_parallelizing_connection() {
        // Λ = 0 gives T(X,Y) = -[X,Y].
        let m = su2_model(1.0);
        let conn = NomizuConnection::from_parts_unchecked(
            vec![Mat::zeros(3, 3); 3],
            Tensor::zero_form(3, 3),
        );
        let t = torsion_of(&m, &conn);
        let xi: Vec<Vec<f64>> = basis_vectors(3);
        assert!((t.eval(&[&xi[0], &xi[1], &xi[2]]) + 2.0).abs() < 1e-14);
    }

    #[test]
    fn round_sphere_sectional_curvature_one() {
        let m = su2_model(1.0);
        let lc = levi_civita(&m);
        let r = curvature(&m, &lc);
        let (antisym, skew) = r.validate(&m.fiber);
        assert!(antisym < 1e-14 && skew < 1e-14);
        let e: Vec<Vec<f64>> = basis_vectors(3);
        for i in 0..3 {
            for j in 0..3 {
                if i == j {
                    continue;
                }
                let v = r.at(i, j).apply(&e[j]);
                let sect = m.fiber.inner(&v, &e[i]);
                assert!((sect - 1.0).abs() < 1e-13, "K(e{i},e{j}) = {sect}");
            }
        }
    }

    #[test]
    fn curvature_of_abelian_vanishes() {
        let m = abelian(4);
        let lc = levi_civita(&m);
        let r = curvature(&m, &lc);
        for a in 0..4 {
            for b in 0..4 {
                assert_eq!(r.at(a, b).max_abs(), 0.0);
            }
        }
    }

    #[test]
    fn nabla_metric_vanishes_for_metric_connections() {
        let m = su2_model(1.0);
        let lc = levi_civita(&m);
        let g = Tensor::covariant(3, 2, m.fiber.metric.data.clone());
        for a in 0..3 {
            let mut x = vec![0.0; 3];
            x[a] = 1.0;
            let d = nabla_invariant(&m, &lc, &g, &x, 1e-12).unwrap();
            assert_eq!(d.max_abs(), 0.0);
        }
    }

    #[test]
    fn canonical_parallelizing_connection_kills_invariant_tensors() {
        let m = su2_model(1.0);
        let conn = NomizuConnection::from_parts_unchecked(
            vec![Mat::zeros(3, 3); 3],
            torsion_of(
                &m,
                &NomizuConnection::from_parts_unchecked(
                    vec![Mat::zeros(3, 3); 3],
                    Tensor::zero_form(3, 3),
                ),
            ),
        );
        let s = Tensor::form(3, 1, vec![1.0, -2.0, 0.5]).unwrap();
        assert_eq!(nabla_residual(&m, &conn, &s), 0.0);
    }

    #[test]
    fn lie_derivative_reproduces_bracket_factor() {
        let delta = 1.25;
        let m = su2_model(delta);
        let e: Vec<Vec<f64>> = basis_vectors(3);

        let lxx = lie_derivative(&m, &e[0], &Tensor::vector(e[0].clone()), 1e-12).unwrap();
        assert_eq!(lxx.max_abs(), 0.0);

        let lxy = lie_derivative(&m, &e[0], &Tensor::vector(e[1].clone()), 1e-12).unwrap();
        let mut expected = Tensor::vector(e[2].clone()).scale(&(2.0 * delta));
        assert!(lxy.sub(&expected).max_abs() < 1e-13);

        // Reeb fields are Killing.
        let g = Tensor::covariant(3, 2, m.fiber.metric.data.clone());
        for a in 0..3 {
            let lg = lie_derivative(&m, &e[a], &g, 1e-12).unwrap();
            assert!(lg.max_abs() < 1e-14);
        }

        // L_{x1} phi_2 = 2 delta phi_3 for the rotation generators.
        let rot = |axis: usize| -> Mat<f64> {
            let mut r = Mat::zeros(3, 3);
            let (j, k) = match axis {
                0 => (1, 2),
                1 => (2, 0),
                _ => (0, 1),
            };
            r.set(k, j, 1.0);
            r.set(j, k, -1.0);
            r
        };
        let phi2 = Tensor::endomorphism(rot(1));
        let lphi = lie_derivative(&m, &e[0], &phi2, 1e-12).unwrap();
        expected = Tensor::endomorphism(rot(2)).scale(&(2.0 * delta));
        assert!(lphi.sub(&expected).max_abs() < 1e-13);
    }

    #[test]
    fn bianchi_classical_for_levi_civita() {
        let m = su2_model(1.0);
        let lc = levi_civita(&m);
        let rep = bianchi_check(&m, &lc, 1e-10);
        assert!(rep.passed());
    }

    #[test]
    fn holonomy_abelian_empty_and_round_su2_full() {
        let flat = NomizuConnection::from_parts_unchecked(
            vec![Mat::zeros(3, 3); 3],
            Tensor::zero_form(3, 3),
        );
        let hol = holonomy_algebra(&abelian(3), &flat, &HolonomyConfig::default());
        assert!(hol.basis.is_empty());
        assert!(!hol.full_so_warning);

        let m = su2_model(1.0);
        let lc = levi_civita(&m);
        let hol2 = holonomy_algebra(&m, &lc, &HolonomyConfig::default());
        assert_eq!(hol2.basis.len(), 3);
        for a in &hol2.basis {
            assert!(m.fiber.skew_adjoint_residual(a) < 1e-12);
        }
    }

    #[test]
    fn invariant_splitting_detects_rotation() {
        let m = su2_model(1.0);
        let lc = levi_civita(&m);
        let v1 = vec![vec![1.0, 0.0, 0.0]];
        let v23 = vec![vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]];
        let rep = check_invariant_splitting(
            &m,
            &lc,
            &[v1.clone(), v23.clone()],
            1e-10,
            &HolonomyConfig::default(),
        )
        .unwrap();
        assert!(!rep.passed());

        // Not spanning is an error, not a failed check.
        let err = check_invariant_splitting(&m, &lc, &[v1], 1e-10, &HolonomyConfig::default());
        assert!(matches!(err, Err(GeometryError::NotSpanning { .. })));
    }
}
