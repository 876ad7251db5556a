//! Suite runners shared by the command line and the acceptance tests:
//! model resolution (catalog or file), named verification suites, and the
//! two-stage quotient tower with its consistency comparison.

use crate::catalog::{self, CatalogEntry, StructureData};
use crate::error::GeometryError;
use crate::homogeneous::{validate_model, HolonomyConfig, LieModel, NomizuConnection};
use crate::linalg::Mat;
use crate::model_file;
use crate::nk::{
    build_nk_quotient, check_characteristic_match, check_special_algebraic_torsion,
    check_tj_formulas, compute_f, NKQuotientResult,
};
use crate::qk::{
    build_qk_quotient, check_quaternionic_parallelism, einstein_check, measure_nabla_j_squared,
    weyl_self_dual_check, NearlyKahlerInput, QKResult,
};
use crate::report::{ResidualMax, VerificationReport};
use crate::sasaki::{
    canonical_connection, check_3ad, check_lie_identities, check_nearly_kahler, validate_acm,
    AlmostContactTriple, NearlyKahlerStructure,
};
use crate::scalar::Scalar;
use crate::submersion::{
    build_quotient, check_base_reducibility, check_fiber_geometry, check_nablavert,
    check_product_splitting, check_projecttau, check_torsion_in_torsion, SubmersionSpec,
};
use crate::tensor::Tensor;

pub const SUITES: [&str; 8] = [
    "acm",
    "3ad",
    "canonical-connection",
    "bianchi",
    "submersion-hypotheses",
    "nk",
    "qk",
    "all",
];

#[derive(Clone, Copy, Debug)]
pub struct SuiteOptions {
    pub tol: f64,
    pub holonomy: HolonomyConfig,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            tol: 1e-9,
            holonomy: HolonomyConfig::default(),
        }
    }
}

/// Where the model comes from.
pub enum ModelSource<'a> {
    Catalog(&'a str),
    /// File contents (the caller performs the read).
    FileText(&'a str),
}

/// A resolved model with whatever structure data it carries.
pub struct ResolvedModel<S> {
    pub name: String,
    pub model: LieModel<S>,
    pub triple: Option<AlmostContactTriple<S>>,
    /// Designated parallel skew torsion (product controls).
    pub designated_torsion: Option<Tensor<S>>,
    /// Factor splitting for product controls.
    pub product_split: Option<(Vec<Vec<S>>, Vec<Vec<S>>)>,
    /// Nearly Kähler data for derived or file-supplied NK models.
    pub nk_input: Option<NearlyKahlerInput<S>>,
}

fn from_entry<S: Scalar>(entry: CatalogEntry<S>) -> ResolvedModel<S> {
    let name = entry.name.clone();
    let product_split = if entry.model.name == "product_s3xs3" {
        let dm = entry.model.dim_m();
        let e = crate::homogeneous::basis_vectors::<S>(dm);
        Some((e[0..dm / 2].to_vec(), e[dm / 2..].to_vec()))
    } else {
        None
    };
    let (triple, designated_torsion) = match entry.structure {
        StructureData::ThreeAD(t) => (Some(t), None),
        StructureData::SkewTorsion(t) => (None, Some(t)),
        StructureData::None => (None, None),
    };
    ResolvedModel {
        name,
        model: entry.model,
        triple,
        designated_torsion,
        product_split,
        nk_input: None,
    }
}

/// Resolves a model reference: a catalog name (including the derived
/// quotient entries) or model file text.
pub fn resolve_model<S: Scalar>(
    source: ModelSource<'_>,
    alpha: S,
    delta: S,
    opts: &SuiteOptions,
) -> Result<ResolvedModel<S>, GeometryError> {
    match source {
        ModelSource::Catalog(name) => match name {
            "cp3_nk" => {
                let two_alpha = S::from_i64(2).mul(&alpha);
                if !delta.sub(&two_alpha).is_zero() {
                    return Err(GeometryError::InvalidParameter(
                        "cp3_nk requires delta = 2 alpha".into(),
                    ));
                }
                let nk = flagship_nk(alpha.clone(), opts)?;
                let input = NearlyKahlerInput::from_nk_quotient(&nk);
                Ok(ResolvedModel {
                    name: format!("cp3_nk({alpha})"),
                    model: nk.quotient.base.clone(),
                    triple: None,
                    designated_torsion: Some(nk.quotient.projected_torsion.clone()),
                    product_split: None,
                    nk_input: Some(input),
                })
            }
            "s4_qk" => {
                let two_alpha = S::from_i64(2).mul(&alpha);
                if !delta.sub(&two_alpha).is_zero() {
                    return Err(GeometryError::InvalidParameter(
                        "s4_qk requires delta = 2 alpha".into(),
                    ));
                }
                let nk = flagship_nk(alpha.clone(), opts)?;
                let input = NearlyKahlerInput::from_nk_quotient(&nk);
                let v = nk.base_vertical[0].clone();
                let qk =
                    build_qk_quotient(&input, &nk.base_vertical, &v, opts.tol, &opts.holonomy)?;
                Ok(ResolvedModel {
                    name: format!("s4_qk({alpha})"),
                    model: qk.quotient.base.clone(),
                    triple: None,
                    designated_torsion: None,
                    product_split: None,
                    nk_input: None,
                })
            }
            other => Ok(from_entry(catalog::build_base(other, alpha, delta)?)),
        },
        ModelSource::FileText(text) => {
            let loaded = model_file::parse_model::<S>(text)?;
            let nk_input = match &loaded.nk_j {
                Some(j) if loaded.nk_vertical.len() == 2 => Some(NearlyKahlerInput::from_structure(
                    &loaded.model,
                    j,
                    &loaded.nk_vertical,
                    opts.tol,
                )?),
                _ => None,
            };
            let (triple, designated_torsion) = match loaded.structure {
                StructureData::ThreeAD(t) => (Some(t), None),
                StructureData::SkewTorsion(t) => (None, Some(t)),
                StructureData::None => (None, None),
            };
            Ok(ResolvedModel {
                name: loaded.model.name.clone(),
                model: loaded.model,
                triple,
                designated_torsion,
                product_split: None,
                nk_input,
            })
        }
    }
}

fn flagship_nk<S: Scalar>(
    alpha: S,
    opts: &SuiteOptions,
) -> Result<NKQuotientResult<S>, GeometryError> {
    let delta = S::from_i64(2).mul(&alpha);
    let entry = catalog::sp2_s7(alpha, delta)?;
    let StructureData::ThreeAD(triple) = &entry.structure else {
        unreachable!("sp2_s7 always carries a triple")
    };
    build_nk_quotient(&entry.model, triple, None, opts.tol, &opts.holonomy)
}

fn refusal_report<S: Scalar>(
    suite: &str,
    model: &LieModel<S>,
    gate: &str,
    reason: &str,
) -> VerificationReport {
    let mut rep =
        VerificationReport::new(suite, &model.name, &model.fingerprint(&[]), S::EXACT);
    rep.push_refusal(suite, "plumbing", gate, reason);
    rep
}

fn error_to_report<S: Scalar>(
    suite: &str,
    model: &LieModel<S>,
    err: &GeometryError,
) -> VerificationReport {
    let gate = err.gate().unwrap_or("construction").to_string();
    refusal_report(suite, model, &gate, &format!("{err}"))
}

/// Outcome of a suite run: the validation report comes first; a failed
/// validation is a load error for the exit-code contract.
pub struct SuiteOutcome {
    pub reports: Vec<VerificationReport>,
    pub validation_failed: bool,
}

impl SuiteOutcome {
    pub fn all_passed(&self) -> bool {
        self.reports.iter().all(|r| r.passed())
    }
}

fn canonical_for<S: Scalar>(
    resolved: &ResolvedModel<S>,
    opts: &SuiteOptions,
) -> Result<(AlmostContactTriple<S>, NomizuConnection<S>), GeometryError> {
    let triple = resolved
        .triple
        .clone()
        .ok_or_else(|| GeometryError::Refused {
            gate: "structure-data".into(),
            reason: "model carries no 3-contact structure".into(),
        })?;
    let canon = canonical_connection(&resolved.model, &triple, opts.tol)?;
    Ok((triple, canon.connection))
}

/// Runs one named suite. Unknown names give an error; every other outcome
/// is a report (gate refusals become refused checks).
pub fn run_suite<S: Scalar>(
    resolved: &ResolvedModel<S>,
    suite: &str,
    opts: &SuiteOptions,
) -> Result<SuiteOutcome, GeometryError> {
    if !SUITES.contains(&suite) {
        return Err(GeometryError::InvalidParameter(format!(
            "unknown suite `{suite}` (expected one of {})",
            SUITES.join(", ")
        )));
    }
    let mut reports = Vec::new();
    let validation = validate_model(&resolved.model, opts.tol);
    let validation_failed = !validation.passed();
    reports.push(validation);
    if validation_failed {
        return Ok(SuiteOutcome {
            reports,
            validation_failed,
        });
    }
    let selected: Vec<&str> = if suite == "all" {
        SUITES[..SUITES.len() - 1].to_vec()
    } else {
        vec![suite]
    };
    for s in selected {
        reports.extend(run_single(resolved, s, opts)?);
    }
    Ok(SuiteOutcome {
        reports,
        validation_failed,
    })
}

fn run_single<S: Scalar>(
    resolved: &ResolvedModel<S>,
    suite: &str,
    opts: &SuiteOptions,
) -> Result<Vec<VerificationReport>, GeometryError> {
    let model = &resolved.model;
    let tol = opts.tol;
    let mut out = Vec::new();
    match suite {
        "acm" => match &resolved.triple {
            Some(t) => out.push(validate_acm(model, t, tol)?),
            None => out.push(refusal_report(
                "acm",
                model,
                "structure-data",
                "model carries no 3-contact structure",
            )),
        },
        "3ad" => match &resolved.triple {
            Some(t) => {
                out.push(check_3ad(model, t, tol)?);
                out.push(check_lie_identities(model, t, tol)?);
            }
            None => out.push(refusal_report(
                "3ad",
                model,
                "structure-data",
                "model carries no 3-contact structure",
            )),
        },
        "canonical-connection" => match &resolved.triple {
            Some(t) => match canonical_connection(model, t, tol) {
                Ok(c) => out.push(c.report),
                Err(e) => out.push(error_to_report("canonical-connection", model, &e)),
            },
            None => out.push(refusal_report(
                "canonical-connection",
                model,
                "structure-data",
                "model carries no 3-contact structure",
            )),
        },
        "bianchi" => {
            let conn = match (&resolved.triple, &resolved.designated_torsion) {
                (Some(_), _) => canonical_for(resolved, opts).map(|(_, c)| c),
                (None, Some(t)) => {
                    let lc = crate::homogeneous::levi_civita(model);
                    crate::homogeneous::with_torsion(model, &lc, t, tol)
                }
                (None, None) => Err(GeometryError::Refused {
                    gate: "structure-data".into(),
                    reason: "no connection data on this model".into(),
                }),
            };
            match conn {
                Ok(c) => out.push(crate::homogeneous::bianchi_check(model, &c, tol)),
                Err(e) => out.push(error_to_report("bianchi", model, &e)),
            }
        }
        "submersion-hypotheses" => {
            if let Some((v1, v2)) = &resolved.product_split {
                let t = resolved
                    .designated_torsion
                    .clone()
                    .expect("product models carry a designated torsion");
                let lc = crate::homogeneous::levi_civita(model);
                let conn = crate::homogeneous::with_torsion(model, &lc, &t, tol)?;
                out.push(check_product_splitting(
                    model,
                    &conn,
                    v1,
                    v2,
                    tol,
                    &opts.holonomy,
                )?);
                return Ok(out);
            }
            match canonical_for(resolved, opts) {
                Ok((triple, conn)) => {
                    let vertical: Vec<Vec<S>> = triple.xi.to_vec();
                    out.push(check_projecttau(model, &conn, &vertical, tol)?);
                    out.push(check_torsion_in_torsion(model, &conn, &vertical, tol)?);
                    out.push(check_fiber_geometry(model, &conn, &vertical, tol)?);
                    out.push(check_nablavert(model, &conn, &vertical, Some(&triple), tol)?);
                    let spec = SubmersionSpec::new(model.clone(), conn, vertical);
                    match build_quotient(&spec, tol, &opts.holonomy) {
                        Ok(q) => out.push(q.report),
                        Err(e) => out.push(error_to_report("submersion-hypotheses", model, &e)),
                    }
                }
                Err(e) => out.push(error_to_report("submersion-hypotheses", model, &e)),
            }
        }
        "nk" => {
            if let Some(t) = &resolved.triple {
                match build_nk_quotient(model, t, None, tol, &opts.holonomy) {
                    Ok(nk) => {
                        out.push(nk.report.clone());
                        out.push(check_tj_formulas(&nk, tol));
                        out.push(check_characteristic_match(&nk, tol)?);
                        out.push(compute_f(&nk, tol)?.report);
                        out.push(check_special_algebraic_torsion(&nk, tol)?);
                        out.push(check_base_reducibility(
                            &nk.quotient,
                            &nk.base_vertical,
                            &nk.base_horizontal,
                            tol,
                            &opts.holonomy,
                        )?);
                    }
                    Err(e) => out.push(error_to_report("nk", model, &e)),
                }
            } else if let Some(input) = &resolved.nk_input {
                let nk = NearlyKahlerStructure {
                    j: input.j.clone(),
                    characteristic_torsion: input.torsion.clone(),
                };
                out.push(check_nearly_kahler(model, &nk, tol)?);
            } else {
                out.push(refusal_report(
                    "nk",
                    model,
                    "structure-data",
                    "model carries neither a 3-contact structure nor nearly Kähler data",
                ));
            }
        }
        "qk" => {
            let input = if let Some(t) = &resolved.triple {
                match build_nk_quotient(model, t, None, tol, &opts.holonomy) {
                    Ok(nk) => Some((NearlyKahlerInput::from_nk_quotient(&nk), Some(nk))),
                    Err(e) => {
                        out.push(error_to_report("qk", model, &e));
                        None
                    }
                }
            } else {
                resolved.nk_input.clone().map(|i| (i, None))
            };
            if let Some((input, _nk)) = input {
                if input.vertical.len() != 2 || input.model.dim_m() < 6 {
                    let mut rep = VerificationReport::new(
                        "qk-quotient",
                        &input.model.name,
                        &input.model.fingerprint(&[]),
                        S::EXACT,
                    );
                    let vac = ResidualMax::new::<S>();
                    rep.push(
                        "qk_stage",
                        "plumbing",
                        &vac,
                        tol,
                        "base too small for a vertical plane quotient",
                    );
                    out.push(rep);
                } else {
                    let v = input.vertical[0].clone();
                    match build_qk_quotient(&input, &input.vertical.clone(), &v, tol, &opts.holonomy)
                    {
                        Ok(qk) => {
                            out.push(qk.report.clone());
                            out.push(check_quaternionic_parallelism(&qk, tol)?);
                            let (_, nj_rep) = measure_nabla_j_squared(&input, &v, tol)?;
                            out.push(nj_rep);
                            if qk.quotient.base.dim_m() == 4 {
                                out.push(einstein_check(&qk.quotient.base, tol));
                                out.push(weyl_self_dual_check(&qk.quotient.base, tol)?);
                            }
                        }
                        Err(e) => out.push(error_to_report("qk", model, &e)),
                    }
                }
            } else if resolved.triple.is_none() && resolved.nk_input.is_none() {
                out.push(refusal_report(
                    "qk",
                    model,
                    "structure-data",
                    "model carries neither a 3-contact structure nor nearly Kähler data",
                ));
            }
        }
        other => {
            return Err(GeometryError::InvalidParameter(format!(
                "unknown suite `{other}`"
            )))
        }
    }
    Ok(out)
}

/// The full tower: total space to nearly Kähler base to quaternionic
/// base, compared against the direct quotient along the whole Reeb space.
pub struct TowerOutcome<S> {
    pub reports: Vec<VerificationReport>,
    pub nk: Option<NKQuotientResult<S>>,
    pub qk: Option<QKResult<S>>,
}

impl<S> TowerOutcome<S> {
    pub fn all_passed(&self) -> bool {
        self.reports.iter().all(|r| r.passed())
    }
}

/// Builds M -> N (nearly Kähler) -> Ň (quaternionic) together with the
/// direct quotient M -> Ň' along the full Reeb space, and verifies both
/// routes give the same base metric and the same quaternionic span.
pub fn run_tower<S: Scalar>(
    resolved: &ResolvedModel<S>,
    opts: &SuiteOptions,
) -> Result<TowerOutcome<S>, GeometryError> {
    let model = &resolved.model;
    let tol = opts.tol;
    let mut reports = Vec::new();
    let validation = validate_model(model, tol);
    let failed = !validation.passed();
    reports.push(validation);
    if failed {
        return Ok(TowerOutcome {
            reports,
            nk: None,
            qk: None,
        });
    }
    let Some(triple) = resolved.triple.clone() else {
        reports.push(refusal_report(
            "tower",
            model,
            "structure-data",
            "the tower needs a 3-contact structure",
        ));
        return Ok(TowerOutcome {
            reports,
            nk: None,
            qk: None,
        });
    };

    // Stage 1: nearly Kähler quotient.
    let nk = match build_nk_quotient(model, &triple, None, tol, &opts.holonomy) {
        Ok(nk) => nk,
        Err(e) => {
            reports.push(error_to_report("tower-stage1-nk", model, &e));
            return Ok(TowerOutcome {
                reports,
                nk: None,
                qk: None,
            });
        }
    };
    reports.push(nk.report.clone());

    // Stage 2: quaternionic quotient, vacuous for small bases.
    let input = NearlyKahlerInput::from_nk_quotient(&nk);
    if nk.quotient.base.dim_m() < 6 {
        let mut rep = VerificationReport::new(
            "tower-stage2-qk",
            &nk.quotient.base.name,
            &nk.quotient.base.fingerprint(&[]),
            S::EXACT,
        );
        let vac = ResidualMax::new::<S>();
        rep.push(
            "qk_stage",
            "plumbing",
            &vac,
            tol,
            "base too small for a vertical plane quotient",
        );
        reports.push(rep);
        return Ok(TowerOutcome {
            reports,
            nk: Some(nk),
            qk: None,
        });
    }
    let v = nk.base_vertical[0].clone();
    let qk = match build_qk_quotient(&input, &nk.base_vertical, &v, tol, &opts.holonomy) {
        Ok(qk) => qk,
        Err(e) => {
            reports.push(error_to_report("tower-stage2-qk", &nk.quotient.base, &e));
            return Ok(TowerOutcome {
                reports,
                nk: Some(nk),
                qk: None,
            });
        }
    };
    reports.push(qk.report.clone());
    reports.push(check_quaternionic_parallelism(&qk, tol)?);

    // Stage 3: direct quotient along the whole Reeb space.
    let canon = canonical_connection(model, &triple, tol)?;
    let spec = SubmersionSpec::new(model.clone(), canon.connection, triple.xi.to_vec());
    let direct = build_quotient(&spec, tol, &opts.holonomy)?;
    reports.push(direct.report.clone());

    // Consistency: compose the two lifts of the tower route and compare
    // with the direct route.
    let mut rep = VerificationReport::new(
        "tower-consistency",
        &direct.base.name,
        &direct.base.fingerprint(&[]),
        S::EXACT,
    );
    let dim4 = qk.quotient.base.dim_m();
    // Tower lift composed into the total space.
    let tower_lift: Vec<Vec<S>> = qk
        .quotient
        .lift
        .iter()
        .map(|mid| {
            let mut out = vec![S::zero(); model.dim_m()];
            for (c, l) in mid.iter().zip(&nk.quotient.lift) {
                crate::linalg::vec_axpy(&mut out, c, l);
            }
            out
        })
        .collect();
    // Identification map: tower base coordinates -> direct base coordinates.
    let mut ident = Mat::zeros(dim4, dim4);
    let mut ident_defect = ResidualMax::new::<S>();
    for (jx, l) in tower_lift.iter().enumerate() {
        let (coords, defect) = direct.to_base_coords(l)?;
        ident_defect.push_f64(defect);
        for (i, c) in coords.into_iter().enumerate() {
            ident.set(i, jx, c);
        }
    }
    rep.push(
        "tower_lift_is_horizontal",
        "the composed lift lands in the horizontal space of the direct quotient",
        &ident_defect,
        tol,
        "",
    );

    // Metric agreement through the identification.
    let pulled = ident
        .transpose()
        .matmul(&direct.base.fiber.metric)
        .matmul(&ident);
    let mut metric_res = ResidualMax::new::<S>();
    for v in &pulled.sub(&qk.quotient.base.fiber.metric).data {
        metric_res.push(v);
    }
    rep.push(
        "tower_metric_agreement",
        "both routes induce the same base metric",
        &metric_res,
        tol,
        "",
    );

    // Quaternionic spans agree: transport the tower structures and
    // project onto the span of the direct structures I_i = π φ_i lift.
    let ident_inv = ident.inverse()?;
    let mut direct_span = Vec::new();
    for i in 0..3 {
        let (ii, defect) = direct.push_endomorphism(&triple.phi[i])?;
        ident_defect.push_f64(defect);
        direct_span.push(ii);
    }
    let mut gram = Mat::zeros(3, 3);
    for a in 0..3 {
        for b in 0..3 {
            gram.set(
                a,
                b,
                direct.base.fiber.endo_inner(&direct_span[a], &direct_span[b]),
            );
        }
    }
    let mut span_res = ResidualMax::new::<S>();
    for m in [&qk.i1, &qk.i2, &qk.i3] {
        let transported = ident.matmul(m).matmul(&ident_inv);
        let mut rhs = Mat::zeros(3, 1);
        for a in 0..3 {
            rhs.set(
                a,
                0,
                direct.base.fiber.endo_inner(&direct_span[a], &transported),
            );
        }
        let coeff = gram.solve(&rhs)?;
        let mut residue = transported.clone();
        for a in 0..3 {
            residue = residue.sub(&direct_span[a].scale(coeff.at(a, 0)));
        }
        for v in &residue.data {
            span_res.push(v);
        }
    }
    rep.push(
        "tower_quaternionic_span_agreement",
        "the tower structures span the same subbundle as I_i = π φ_i lift",
        &span_res,
        tol,
        "",
    );
    reports.push(rep);

    Ok(TowerOutcome {
        reports,
        nk: Some(nk),
        qk: Some(qk),
    })
}

/// Reproduces the frozen expected-results table of a catalog entry; the
/// catalog is the regression corpus.
pub fn catalog_regression<S: Scalar>(
    entry: &CatalogEntry<S>,
    opts: &SuiteOptions,
) -> Result<VerificationReport, GeometryError> {
    let mut rep = VerificationReport::new(
        "catalog-regression",
        &entry.name,
        &entry.model.fingerprint(&[]),
        S::EXACT,
    );
    let StructureData::ThreeAD(triple) = &entry.structure else {
        return Ok(rep);
    };
    let canon = canonical_connection(&entry.model, triple, opts.tol)?;
    for exp in &entry.expected {
        match exp.name {
            "beta" => {
                let (beta, _) = crate::sasaki::measure_beta(&entry.model, &canon.connection, triple);
                rep.push_scalar("beta", "β = 2(δ-2α)", &beta, &exp.value, exp.tol, "");
            }
            "torsion_vertical_scalar" => {
                let got = canon.connection.torsion.eval(&[
                    &triple.xi[0],
                    &triple.xi[1],
                    &triple.xi[2],
                ]);
                rep.push_scalar(
                    "torsion_vertical_scalar",
                    "T(ξ_1,ξ_2,ξ_3) = 2δ - 8α",
                    &got,
                    &exp.value,
                    exp.tol,
                    "",
                );
            }
            "nk_k" | "f_scalar" | "nabla_j_squared_scalar" => {
                let nk = build_nk_quotient(&entry.model, triple, None, opts.tol, &opts.holonomy)?;
                let input = NearlyKahlerInput::from_nk_quotient(&nk);
                match exp.name {
                    "nk_k" => {
                        let (k, _) = crate::qk::measure_k(&input, opts.tol)?;
                        rep.push_scalar("nk_k", "F = k id on H", &k, &exp.value, exp.tol, "");
                    }
                    "f_scalar" => {
                        let f = compute_f(&nk, opts.tol)?;
                        rep.push_scalar(
                            "f_scalar",
                            "F = -8α² id",
                            &f.scalar,
                            &exp.value,
                            exp.tol,
                            "",
                        );
                    }
                    _ => {
                        let v = nk.base_vertical[0].clone();
                        let (scalar, _) = measure_nabla_j_squared(&input, &v, opts.tol)?;
                        rep.push_scalar(
                            "nabla_j_squared_scalar",
                            "(∇g_V J)² = -(k/2) id",
                            &scalar,
                            &exp.value,
                            exp.tol,
                            "",
                        );
                    }
                }
            }
            other => {
                return Err(GeometryError::InvalidParameter(format!(
                    "unknown expectation `{other}` in catalog entry {}",
                    entry.name
                )))
            }
        }
    }
    Ok(rep)
}
