//! Verification reports: named checks with residuals, tolerances and
//! pass/fail status, plus provenance metadata for reproducibility.

use crate::scalar::Scalar;
use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize, Clone, Copy, PartialEq, Eq, Debug)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Vacuous,
    Refused,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Vacuous => "vacuous",
            Status::Refused => "refused",
        };
        f.write_str(s)
    }
}

/// Max-norm residual accumulator. The reduction is a maximum, so it is
/// independent of evaluation order.
#[derive(Clone, Debug)]
pub struct ResidualMax {
    pub max: f64,
    pub count: usize,
    pub exact: bool,
    pub exact_zero: bool,
}

impl ResidualMax {
    pub fn new<S: Scalar>() -> Self {
        ResidualMax {
            max: 0.0,
            count: 0,
            exact: S::EXACT,
            exact_zero: true,
        }
    }

    pub fn push<S: Scalar>(&mut self, v: &S) {
        self.count += 1;
        let mag = v.abs_f64();
        self.max = self.max.max(if mag.is_finite() { mag } else { f64::INFINITY });
        self.exact_zero &= v.is_zero();
    }

    pub fn push_f64(&mut self, v: f64) {
        self.count += 1;
        // Non-finite residuals must fail, never fall out of the max.
        let mag = if v.is_finite() { v.abs() } else { f64::INFINITY };
        self.max = self.max.max(mag);
        self.exact_zero &= v == 0.0;
    }

    pub fn merge(&mut self, other: &ResidualMax) {
        self.count += other.count;
        self.max = self.max.max(other.max);
        self.exact_zero &= other.exact_zero;
        self.exact &= other.exact;
    }

    fn status(&self, tol: f64) -> Status {
        if self.count == 0 {
            Status::Vacuous
        } else if self.exact {
            if self.exact_zero {
                Status::Pass
            } else {
                Status::Fail
            }
        } else if self.max < tol {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

#[derive(Serialize, Clone, Debug)]
pub struct Check {
    pub name: String,
    /// Identity or construction the check certifies ("plumbing" when the
    /// check only guards artifact machinery).
    pub anchor: String,
    pub residual: f64,
    pub tolerance: f64,
    pub status: Status,
    /// Number of index tuples inspected; zero marks a vacuous check.
    pub evaluations: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact_zero: Option<bool>,
    #[serde(skip_serializing_if = "String::is_empty", default)]
    pub notes: String,
}

#[derive(Serialize, Clone, Debug)]
pub struct VerificationReport {
    pub schema_version: u32,
    pub suite: String,
    pub model: String,
    pub model_fingerprint: String,
    pub engine_version: String,
    pub arithmetic_mode: String,
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn new(suite: &str, model: &str, fingerprint: &str, exact_mode: bool) -> Self {
        VerificationReport {
            schema_version: SCHEMA_VERSION,
            suite: suite.to_string(),
            model: model.to_string(),
            model_fingerprint: fingerprint.to_string(),
            engine_version: env!("CARGO_PKG_VERSION").to_string(),
            arithmetic_mode: if exact_mode { "rational" } else { "float" }.to_string(),
            checks: Vec::new(),
        }
    }

    pub fn push(&mut self, name: &str, anchor: &str, res: &ResidualMax, tol: f64, notes: &str) {
        self.checks.push(Check {
            name: name.to_string(),
            anchor: anchor.to_string(),
            residual: res.max,
            tolerance: tol,
            status: res.status(tol),
            evaluations: res.count,
            exact_zero: if res.exact { Some(res.exact_zero) } else { None },
            notes: notes.to_string(),
        });
    }

    /// Records a scalar comparison `got` vs `expected` as a residual check.
    pub fn push_scalar<S: Scalar>(
        &mut self,
        name: &str,
        anchor: &str,
        got: &S,
        expected: &S,
        tol: f64,
        notes: &str,
    ) {
        let mut r = ResidualMax::new::<S>();
        r.push(&got.sub(expected));
        let full_notes = if notes.is_empty() {
            format!("measured {got}, expected {expected}")
        } else {
            format!("measured {got}, expected {expected}; {notes}")
        };
        self.push(name, anchor, &r, tol, &full_notes);
    }

    pub fn push_refusal(&mut self, name: &str, anchor: &str, gate: &str, reason: &str) {
        self.checks.push(Check {
            name: name.to_string(),
            anchor: anchor.to_string(),
            residual: f64::NAN,
            tolerance: 0.0,
            status: Status::Refused,
            evaluations: 0,
            exact_zero: None,
            notes: format!("refused at gate `{gate}`: {reason}"),
        });
    }

    pub fn merge(&mut self, other: VerificationReport) {
        self.checks.extend(other.checks);
    }

    /// True when every non-vacuous check passed.
    pub fn passed(&self) -> bool {
        self.checks
            .iter()
            .all(|c| matches!(c.status, Status::Pass | Status::Vacuous))
    }

    pub fn find(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }

    pub fn render_text(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        writeln!(
            out,
            "suite {}  model {}  mode {}  engine {}",
            self.suite, self.model, self.arithmetic_mode, self.engine_version
        )
        .unwrap();
        writeln!(out, "fingerprint {}", self.model_fingerprint).unwrap();
        for c in &self.checks {
            let res = if c.residual.is_nan() {
                "-".to_string()
            } else {
                format!("{:.3e}", c.residual)
            };
            writeln!(
                out,
                "  [{:<7}] {:<44} residual {:>9}  tol {:.1e}  n={}{}",
                c.status.to_string(),
                c.name,
                res,
                c.tolerance,
                c.evaluations,
                if c.notes.is_empty() {
                    String::new()
                } else {
                    format!("  ({})", c.notes)
                }
            )
            .unwrap();
        }
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        writeln!(out, "  => {verdict}").unwrap();
        out
    }
}

/// Content hash of canonical model data (hex SHA-256).
pub fn fingerprint(parts: &[String]) -> String {
    use sha2::{Digest, Sha256};
    let mut hasher = Sha256::new();
    for p in parts {
        hasher.update(p.as_bytes());
        hasher.update([0u8]);
    }
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    #[test]
    fn status_rules() {
        let mut r = ResidualMax::new::<f64>();
        assert_eq!(r.status(1e-9), Status::Vacuous);
        r.push_f64(1e-12);
        assert_eq!(r.status(1e-9), Status::Pass);
        r.push_f64(1e-3);
        assert_eq!(r.status(1e-9), Status::Fail);
    }

    #[test]
    fn exact_mode_requires_symbolic_zero() {
        let mut r = ResidualMax::new::<Rational>();
        r.push(&Rational::new(0, 1));
        assert_eq!(r.status(1e-9), Status::Pass);
        r.push(&Rational::new(1, 1_000_000_000_000));
        // Tiny but nonzero: fails in exact mode regardless of tolerance.
        assert_eq!(r.status(1e-9), Status::Fail);
    }

    #[test]
    fn report_passed_and_determinism() {
        let mut rep = VerificationReport::new("unit", "m", "ff", false);
        let mut r = ResidualMax::new::<f64>();
        r.push_f64(0.0);
        rep.push("a", "plumbing", &r, 1e-9, "");
        assert!(rep.passed());
        rep.push_refusal("b", "plumbing", "gate-x", "why");
        assert!(!rep.passed());
        assert_eq!(rep.to_json(), rep.to_json());
    }
}
