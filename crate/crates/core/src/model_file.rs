//! Model file ingestion.
//!
//! Files are structured text (TOML) with 1-based indices. Values may be
//! decimals or exact rational strings like `"3/4"`. Unknown fields are
//! rejected with an error naming the field.

use crate::catalog::StructureData;
use crate::error::GeometryError;
use crate::homogeneous::LieModel;
use crate::linalg::Mat;
use crate::sasaki::AlmostContactTriple;
use crate::scalar::Scalar;
use serde::Deserialize;
use std::collections::BTreeMap;

#[derive(Deserialize, Debug, Clone)]
#[serde(untagged)]
enum Num {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Num {
    fn parse<S: Scalar>(&self) -> Result<S, GeometryError> {
        match self {
            Num::Int(n) => Ok(S::from_i64(*n)),
            Num::Float(x) => S::from_f64(*x)
                .ok_or_else(|| GeometryError::ModelFile(format!("non-finite value {x}"))),
            Num::Text(t) => parse_scalar::<S>(t),
        }
    }
}

/// Parses an integer, `p/q` fraction, or finite decimal into the active
/// scalar type; exact in both modes.
pub fn parse_scalar<S: Scalar>(t: &str) -> Result<S, GeometryError> {
    let r = crate::scalar::Rational::parse(t)
        .ok_or_else(|| GeometryError::ModelFile(format!("cannot parse value `{t}`")))?;
    let n: i64 = r.0.numer().try_into().map_err(|_| {
        GeometryError::ModelFile(format!("numerator of `{t}` exceeds the supported range"))
    })?;
    let d: i64 = r.0.denom().try_into().map_err(|_| {
        GeometryError::ModelFile(format!("denominator of `{t}` exceeds the supported range"))
    })?;
    Ok(S::from_ratio(n, d))
}

#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
struct ConstantRecord {
    i: usize,
    j: usize,
    k: usize,
    value: Num,
}

#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
struct Params {
    alpha: Option<Num>,
    delta: Option<Num>,
    k: Option<Num>,
}

#[derive(Deserialize, Debug, Clone)]
#[serde(untagged)]
enum TensorValue {
    Vector(Vec<Num>),
    Matrix(Vec<Vec<Num>>),
}

#[derive(Deserialize, Debug)]
#[serde(deny_unknown_fields)]
struct ModelFileRaw {
    name: String,
    dim: usize,
    basis: Vec<String>,
    #[serde(default)]
    isotropy: Vec<usize>,
    metric: Vec<Vec<Num>>,
    #[serde(default)]
    structure_constants: Vec<ConstantRecord>,
    #[serde(default)]
    params: Params,
    #[serde(default)]
    tensors: BTreeMap<String, TensorValue>,
}

/// A model loaded from a file, with whatever structure data it carried.
#[derive(Debug)]
pub struct LoadedModel<S> {
    pub model: LieModel<S>,
    pub structure: StructureData<S>,
    /// Nearly Kähler inputs: the almost Hermitian structure and a
    /// vertical plane, when supplied.
    pub nk_j: Option<Mat<S>>,
    pub nk_vertical: Vec<Vec<S>>,
    pub k_param: Option<S>,
}

fn parse_vector<S: Scalar>(v: &TensorValue, dim_m: usize, name: &str) -> Result<Vec<S>, GeometryError> {
    match v {
        TensorValue::Vector(xs) => {
            if xs.len() != dim_m {
                return Err(GeometryError::ModelFile(format!(
                    "tensor `{name}` must have {dim_m} components, got {}",
                    xs.len()
                )));
            }
            xs.iter().map(|x| x.parse()).collect()
        }
        TensorValue::Matrix(_) => Err(GeometryError::ModelFile(format!(
            "tensor `{name}` must be a vector of components"
        ))),
    }
}

fn parse_matrix<S: Scalar>(v: &TensorValue, dim_m: usize, name: &str) -> Result<Mat<S>, GeometryError> {
    match v {
        TensorValue::Matrix(rows) => {
            if rows.len() != dim_m || rows.iter().any(|r| r.len() != dim_m) {
                return Err(GeometryError::ModelFile(format!(
                    "tensor `{name}` must be a {dim_m}x{dim_m} matrix"
                )));
            }
            let mut out = Mat::zeros(dim_m, dim_m);
            for (i, row) in rows.iter().enumerate() {
                for (j, x) in row.iter().enumerate() {
                    out.set(i, j, x.parse()?);
                }
            }
            Ok(out)
        }
        TensorValue::Vector(_) => Err(GeometryError::ModelFile(format!(
            "tensor `{name}` must be a matrix"
        ))),
    }
}

/// Parses a model file from TOML text.
pub fn parse_model<S: Scalar>(text: &str) -> Result<LoadedModel<S>, GeometryError> {
    let raw: ModelFileRaw =
        toml::from_str(text).map_err(|e| GeometryError::ModelFile(e.to_string()))?;
    if raw.basis.len() != raw.dim {
        return Err(GeometryError::ModelFile(format!(
            "dim = {} but {} basis labels given",
            raw.dim,
            raw.basis.len()
        )));
    }
    let n = raw.dim;
    let mut constants = vec![S::zero(); n * n * n];
    for rec in &raw.structure_constants {
        for (label, v) in [("i", rec.i), ("j", rec.j), ("k", rec.k)] {
            if v == 0 || v > n {
                return Err(GeometryError::ModelFile(format!(
                    "structure constant index {label} = {v} out of range 1..={n}"
                )));
            }
        }
        let value: S = rec.value.parse()?;
        // Indices are 1-based in files; antisymmetry is filled in
        // automatically when only one orientation is given.
        let (i, j, k) = (rec.i - 1, rec.j - 1, rec.k - 1);
        constants[(i * n + j) * n + k] = value.clone();
        if constants[(j * n + i) * n + k].is_zero() {
            constants[(j * n + i) * n + k] = value.neg();
        }
    }
    let mut isotropy = Vec::new();
    for &idx in &raw.isotropy {
        if idx == 0 || idx > n {
            return Err(GeometryError::ModelFile(format!(
                "isotropy index {idx} out of range 1..={n}"
            )));
        }
        isotropy.push(idx - 1);
    }
    let complement: Vec<usize> = (0..n).filter(|i| !isotropy.contains(i)).collect();
    let dim_m = complement.len();
    if raw.metric.len() != dim_m || raw.metric.iter().any(|r| r.len() != dim_m) {
        return Err(GeometryError::ModelFile(format!(
            "metric must be a {dim_m}x{dim_m} matrix over the complement"
        )));
    }
    let mut metric = Mat::zeros(dim_m, dim_m);
    for (i, row) in raw.metric.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            metric.set(i, j, x.parse()?);
        }
    }
    let model = LieModel::new(&raw.name, raw.basis.clone(), constants, isotropy, complement, metric)?;

    // Structure tensors.
    let mut xi: [Option<Vec<S>>; 3] = [None, None, None];
    let mut eta: [Option<Vec<S>>; 3] = [None, None, None];
    let mut phi: [Option<Mat<S>>; 3] = [None, None, None];
    let mut nk_j: Option<Mat<S>> = None;
    let mut nk_vertical: Vec<Vec<S>> = Vec::new();
    for (name, value) in &raw.tensors {
        match name.as_str() {
            "xi1" | "xi2" | "xi3" => {
                let idx = name.as_bytes()[2] as usize - b'1' as usize;
                xi[idx] = Some(parse_vector(value, dim_m, name)?);
            }
            "eta1" | "eta2" | "eta3" => {
                let idx = name.as_bytes()[3] as usize - b'1' as usize;
                eta[idx] = Some(parse_vector(value, dim_m, name)?);
            }
            "phi1" | "phi2" | "phi3" => {
                let idx = name.as_bytes()[3] as usize - b'1' as usize;
                phi[idx] = Some(parse_matrix(value, dim_m, name)?);
            }
            "j" => nk_j = Some(parse_matrix(value, dim_m, name)?),
            "v1" | "v2" => nk_vertical.push(parse_vector(value, dim_m, name)?),
            other => {
                return Err(GeometryError::ModelFile(format!(
                    "unknown tensor field `{other}` (expected xi1..3, eta1..3, phi1..3, j, v1, v2)"
                )));
            }
        }
    }

    let structure = if xi.iter().all(Option::is_some) {
        let alpha: S = raw
            .params
            .alpha
            .as_ref()
            .ok_or_else(|| GeometryError::ModelFile("params.alpha required for a 3-contact structure".into()))?
            .parse()?;
        let delta: S = raw
            .params
            .delta
            .as_ref()
            .ok_or_else(|| GeometryError::ModelFile("params.delta required for a 3-contact structure".into()))?
            .parse()?;
        let mut eta_filled: [Vec<S>; 3] = [vec![], vec![], vec![]];
        for i in 0..3 {
            let x = xi[i].clone().unwrap();
            eta_filled[i] = match &eta[i] {
                Some(e) => e.clone(),
                // Default eta to the metric dual of xi.
                None => model.fiber.flat(&x),
            };
        }
        let phi_filled: [Mat<S>; 3] = match (&phi[0], &phi[1], &phi[2]) {
            (Some(a), Some(b), Some(c)) => [a.clone(), b.clone(), c.clone()],
            _ => {
                return Err(GeometryError::ModelFile(
                    "phi1, phi2, phi3 are all required for a 3-contact structure".into(),
                ))
            }
        };
        StructureData::ThreeAD(AlmostContactTriple {
            xi: [
                xi[0].clone().unwrap(),
                xi[1].clone().unwrap(),
                xi[2].clone().unwrap(),
            ],
            eta: eta_filled,
            phi: phi_filled,
            alpha,
            delta,
        })
    } else {
        StructureData::None
    };

    let k_param = match &raw.params.k {
        Some(v) => Some(v.parse()?),
        None => None,
    };
    Ok(LoadedModel {
        model,
        structure,
        nk_j,
        nk_vertical,
        k_param,
    })
}

/// Renders a catalog-style 3-contact model to the file format; used by
/// tests to round-trip the schema.
pub fn render_three_ad<S: Scalar>(model: &LieModel<S>, triple: &AlmostContactTriple<S>) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    writeln!(out, "name = \"{}\"", model.name).unwrap();
    writeln!(out, "dim = {}", model.dim).unwrap();
    let labels: Vec<String> = model
        .basis_labels
        .iter()
        .map(|l| format!("\"{l}\""))
        .collect();
    writeln!(out, "basis = [{}]", labels.join(", ")).unwrap();
    let iso: Vec<String> = model.isotropy.iter().map(|i| (i + 1).to_string()).collect();
    writeln!(out, "isotropy = [{}]", iso.join(", ")).unwrap();
    let dm = model.dim_m();
    let rows: Vec<String> = (0..dm)
        .map(|i| {
            let cells: Vec<String> = (0..dm)
                .map(|j| format!("\"{}\"", model.fiber.metric.at(i, j).encode()))
                .collect();
            format!("[{}]", cells.join(", "))
        })
        .collect();
    writeln!(out, "metric = [{}]", rows.join(", ")).unwrap();
    for i in 0..model.dim {
        for j in 0..model.dim {
            for k in 0..model.dim {
                let c = model.structure_constant(i, j, k);
                if !c.is_zero() && i < j {
                    writeln!(out, "\n[[structure_constants]]").unwrap();
                    writeln!(out, "i = {}", i + 1).unwrap();
                    writeln!(out, "j = {}", j + 1).unwrap();
                    writeln!(out, "k = {}", k + 1).unwrap();
                    writeln!(out, "value = \"{}\"", c.encode()).unwrap();
                }
            }
        }
    }
    writeln!(out, "\n[params]").unwrap();
    writeln!(out, "alpha = \"{}\"", triple.alpha.encode()).unwrap();
    writeln!(out, "delta = \"{}\"", triple.delta.encode()).unwrap();
    writeln!(out, "\n[tensors]").unwrap();
    let vec_line = |v: &[S]| -> String {
        let cells: Vec<String> = v.iter().map(|x| format!("\"{}\"", x.encode())).collect();
        format!("[{}]", cells.join(", "))
    };
    for i in 0..3 {
        writeln!(out, "xi{} = {}", i + 1, vec_line(&triple.xi[i])).unwrap();
        writeln!(out, "eta{} = {}", i + 1, vec_line(&triple.eta[i])).unwrap();
        let rows: Vec<String> = (0..dm)
            .map(|r| {
                let cells: Vec<String> = (0..dm)
                    .map(|c| format!("\"{}\"", triple.phi[i].at(r, c).encode()))
                    .collect();
                format!("[{}]", cells.join(", "))
            })
            .collect();
        writeln!(out, "phi{} = [{}]", i + 1, rows.join(", ")).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{sp2_s7, su2_3ad};
    use crate::sasaki::{check_3ad, validate_acm};

    #[test]
    fn roundtrip_catalog_model_through_file_format() {
        let entry = su2_3ad(1.0_f64, 2.0).unwrap();
        let StructureData::ThreeAD(triple) = &entry.structure else {
            panic!()
        };
        let text = render_three_ad(&entry.model, triple);
        let loaded: LoadedModel<f64> = parse_model(&text).unwrap();
        assert_eq!(loaded.model.dim, 3);
        let StructureData::ThreeAD(t2) = &loaded.structure else {
            panic!("structure not recovered")
        };
        assert!(validate_acm(&loaded.model, t2, 1e-12).unwrap().passed());
        assert!(check_3ad(&loaded.model, t2, 1e-12).unwrap().passed());
    }

    #[test]
    fn roundtrip_flagship_in_rational_mode() {
        use crate::scalar::Rational;
        let entry = sp2_s7(Rational::from_i64(1), Rational::from_i64(2)).unwrap();
        let StructureData::ThreeAD(triple) = &entry.structure else {
            panic!()
        };
        let text = render_three_ad(&entry.model, triple);
        let loaded: LoadedModel<Rational> = parse_model(&text).unwrap();
        let StructureData::ThreeAD(t2) = &loaded.structure else {
            panic!()
        };
        let rep = check_3ad(&loaded.model, t2, 1e-12).unwrap();
        assert!(rep.passed());
        assert_eq!(rep.find("structure_equation").unwrap().exact_zero, Some(true));
    }

    #[test]
    fn unknown_fields_rejected_by_name() {
        let text = r#"
name = "bad"
dim = 1
basis = ["e1"]
metric = [[1]]
frobnicator = 7
"#;
        let err = parse_model::<f64>(text).unwrap_err();
        let msg = format!("{err}");
        assert!(msg.contains("frobnicator"), "error was: {msg}");
    }

    #[test]
    fn unknown_tensor_names_rejected() {
        let text = r#"
name = "bad"
dim = 1
basis = ["e1"]
metric = [[1]]

[tensors]
zeta = [1]
"#;
        let err = parse_model::<f64>(text).unwrap_err();
        assert!(format!("{err}").contains("zeta"));
    }

    #[test]
    fn one_based_indices_and_rational_strings() {
        let text = r#"
name = "line"
dim = 2
basis = ["a", "b"]
metric = [["1/2", 0], [0, "1/2"]]

[[structure_constants]]
i = 1
j = 2
k = 2
value = "3/2"
"#;
        let loaded: LoadedModel<f64> = parse_model(text).unwrap();
        assert_eq!(*loaded.model.structure_constant(0, 1, 1), 1.5);
        // Antisymmetric partner filled in automatically.
        assert_eq!(*loaded.model.structure_constant(1, 0, 1), -1.5);
        assert_eq!(*loaded.model.fiber.metric.at(0, 0), 0.5);

        let bad = parse_model::<f64>(&text.replace("i = 1", "i = 9"));
        assert!(bad.is_err());
    }

    #[test]
    fn nk_inputs_parse() {
        let text = r#"
name = "nk"
dim = 2
basis = ["a", "b"]
metric = [[1, 0], [0, 1]]

[params]
k = "8"

[tensors]
j = [[0, -1], [1, 0]]
v1 = [1, 0]
v2 = [0, 1]
"#;
        let loaded: LoadedModel<f64> = parse_model(text).unwrap();
        assert!(loaded.nk_j.is_some());
        assert_eq!(loaded.nk_vertical.len(), 2);
        assert_eq!(loaded.k_param, Some(8.0));
    }
}
