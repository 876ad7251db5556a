//! Command-line front end: load models, run verification suites, build
//! quotient towers, and emit human-readable and machine-readable reports.

use clap::{Args, Parser, Subcommand};
use skewtor::catalog;
use skewtor::model_file::parse_scalar;
use skewtor::run_document::run_document_json;
use skewtor::scalar::{Rational, Scalar};
use skewtor::suites::{
    resolve_model, run_suite, run_tower, ModelSource, SuiteOptions, SUITES,
};
use skewtor::VerificationReport;
use std::process::ExitCode;

const EXIT_PASS: u8 = 0;
const EXIT_FAIL: u8 = 1;
const EXIT_LOAD_ERROR: u8 = 2;

#[derive(Parser)]
#[command(
    name = "skewtor",
    version,
    about = "Verification engine for metric connections with parallel skew torsion on reductive homogeneous models",
    long_about = "Loads a built-in or file-based model, runs verification suites \
(structure axioms, the canonical connection, the first Bianchi identity, \
submersion hypotheses, nearly Kähler and quaternionic Kähler quotients), \
and reports per-check residuals against a tolerance.\n\n\
Exit codes: 0 when every non-vacuous check passes, 1 on any failed or \
refused check, 2 on load or validation errors."
)]
struct Cli {
    /// List the built-in model catalog and exit.
    #[arg(long, global = true)]
    list: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Args, Clone)]
struct CommonOpts {
    /// Catalog model name (see --list) or a path to a model file.
    #[arg(long)]
    model: String,
    /// Structure parameters as `alpha,delta`; fractions like `1/2` work.
    #[arg(long, default_value = "1,2")]
    params: String,
    /// Residual tolerance for float mode. Values below ~1e-14 generally
    /// fail for models with non-dyadic parameters because of double
    /// rounding; use --mode rational for exact verification instead.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Arithmetic mode: `float` (f64) or `rational` (exact; requires a
    /// symbolically zero residual for every check).
    #[arg(long, default_value = "float")]
    mode: String,
    /// Write a structured JSON report document to this path.
    #[arg(long)]
    report: Option<std::path::PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite on a model.
    Verify {
        #[command(flatten)]
        common: CommonOpts,
        /// Suite to run: acm, 3ad, canonical-connection, bianchi,
        /// submersion-hypotheses, nk, qk, or all.
        #[arg(long, default_value = "all")]
        suite: String,
    },
    /// Build the full quotient tower and check its consistency against
    /// the direct quotient along the whole Reeb space.
    Tower {
        #[command(flatten)]
        common: CommonOpts,
    },
}

fn print_catalog() {
    println!("built-in models:");
    for entry in catalog::catalog_list() {
        let params = if entry.takes_params { " (alpha, delta)" } else { "" };
        println!("  {:<16}{params}\n      {}", entry.name, entry.description);
    }
    println!("\nsuites: {}", SUITES.join(", "));
}

struct RunOutput {
    reports: Vec<VerificationReport>,
    validation_failed: bool,
}

fn execute<S: Scalar>(
    common: &CommonOpts,
    suite: Option<&str>,
) -> Result<RunOutput, skewtor::GeometryError> {
    let parts: Vec<&str> = common.params.split(',').collect();
    if parts.len() != 2 {
        return Err(skewtor::GeometryError::InvalidParameter(
            "--params expects `alpha,delta`".into(),
        ));
    }
    let alpha: S = parse_scalar(parts[0].trim())?;
    let delta: S = parse_scalar(parts[1].trim())?;
    let opts = SuiteOptions {
        tol: common.tol,
        ..SuiteOptions::default()
    };
    let is_path = common.model.contains('/')
        || common.model.ends_with(".toml")
        || std::path::Path::new(&common.model).exists();
    let file_text;
    let source = if is_path {
        file_text = std::fs::read_to_string(&common.model)
            .map_err(|e| skewtor::GeometryError::ModelFile(format!("{}: {e}", common.model)))?;
        ModelSource::FileText(&file_text)
    } else {
        ModelSource::Catalog(&common.model)
    };
    let resolved = resolve_model::<S>(source, alpha, delta, &opts)?;
    match suite {
        Some(s) => {
            let outcome = run_suite(&resolved, s, &opts)?;
            Ok(RunOutput {
                reports: outcome.reports,
                validation_failed: outcome.validation_failed,
            })
        }
        None => {
            let outcome = run_tower(&resolved, &opts)?;
            let validation_failed = outcome
                .reports
                .first()
                .map(|r| r.suite == "validate-model" && !r.passed())
                .unwrap_or(false);
            Ok(RunOutput {
                reports: outcome.reports,
                validation_failed,
            })
        }
    }
}

fn run(cli: Cli) -> u8 {
    if cli.list {
        print_catalog();
        return EXIT_PASS;
    }
    let Some(command) = cli.command else {
        eprintln!("error: no command given (try --list, verify, or tower)");
        return EXIT_LOAD_ERROR;
    };
    let (common, suite, command_name) = match &command {
        Command::Verify { common, suite } => (common.clone(), Some(suite.clone()), "verify"),
        Command::Tower { common } => (common.clone(), None, "tower"),
    };
    let result = match common.mode.as_str() {
        "float" => execute::<f64>(&common, suite.as_deref()),
        "rational" => execute::<Rational>(&common, suite.as_deref()),
        other => {
            eprintln!("error: unknown mode `{other}` (expected float or rational)");
            return EXIT_LOAD_ERROR;
        }
    };
    let output = match result {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_LOAD_ERROR;
        }
    };
    for report in &output.reports {
        print!("{}", report.render_text());
    }
    if let Some(path) = &common.report {
        let doc = run_document_json(
            command_name,
            &common.model,
            &common.params,
            &common.mode,
            common.tol,
            &output.reports,
        );
        if let Err(e) = std::fs::write(path, doc) {
            eprintln!("error: cannot write report to {}: {e}", path.display());
            return EXIT_LOAD_ERROR;
        }
    }
    if output.validation_failed {
        eprintln!("model failed validation");
        return EXIT_LOAD_ERROR;
    }
    if output.reports.iter().all(|r| r.passed()) {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}

fn main() -> ExitCode {
    ExitCode::from(run(Cli::parse()))
}
