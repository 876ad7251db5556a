//! Structured run documents: one JSON document per CLI run, with a
//! top-level schema version. Output is deterministic for fixed inputs.

use crate::report::{VerificationReport, SCHEMA_VERSION};
use serde::Serialize;

#[derive(Serialize)]
pub struct RunDocument<'a> {
    pub schema_version: u32,
    pub command: &'a str,
    pub model: &'a str,
    pub params: &'a str,
    pub arithmetic_mode: &'a str,
    pub tolerance: f64,
    pub engine_version: &'a str,
    pub passed: bool,
    pub reports: &'a [VerificationReport],
}

pub fn run_document_json(
    command: &str,
    model: &str,
    params: &str,
    mode: &str,
    tolerance: f64,
    reports: &[VerificationReport],
) -> String {
    let doc = RunDocument {
        schema_version: SCHEMA_VERSION,
        command,
        model,
        params,
        arithmetic_mode: mode,
        tolerance,
        engine_version: env!("CARGO_PKG_VERSION"),
        passed: reports.iter().all(|r| r.passed()),
        reports,
    };
    serde_json::to_string_pretty(&doc).expect("document serialization cannot fail")
}
