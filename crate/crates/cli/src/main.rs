//! `boxswitch` runs a scenario file, or checks a circuit file, and writes a
//! JSON report.
//!
//! Exit status: 0 when every verdict holds, 1 when a verdict fails, 2 when the
//! input could not be run. In the last case a diagnostic goes to stderr.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use boxswitch::circuit::{parse_circuit, serialize_circuit, validate_circuit};
use boxswitch::scenario::{
    parse_scenario, run_scenario, to_report_string, Diagnostic, ARTIFACT, ARTIFACT_VERSION,
    FORMAT_VERSION,
};
use clap::{ArgGroup, Parser};
use serde_json::{json, Value};

#[derive(Debug, Parser)]
#[command(
    name = "boxswitch",
    version,
    about = "Run higher-order quantum box scenarios"
)]
#[command(group(ArgGroup::new("input").required(true).args(["scenario", "circuit"])))]
struct Args {
    /// Scenario file (JSON).
    #[arg(long, value_name = "FILE")]
    scenario: Option<PathBuf>,

    /// Circuit file to parse and validate against its declared budget.
    #[arg(long, value_name = "FILE")]
    circuit: Option<PathBuf>,

    /// Report destination; standard output when omitted.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,

    /// Overrides the scenario seed.
    #[arg(long)]
    seed: Option<u64>,

    /// Overrides the scenario shot count.
    #[arg(long)]
    shots: Option<u64>,

    /// Overrides the scenario tolerance.
    #[arg(long = "tol", value_name = "REAL", allow_negative_numbers = true)]
    tolerance: Option<f64>,
}

fn read(path: &Path) -> Result<String, Diagnostic> {
    fs::read_to_string(path)
        .map_err(|e| Diagnostic::new("io", &path.display().to_string(), e.to_string()))
}

fn scenario_report(args: &Args, path: &Path) -> Result<(String, bool), Diagnostic> {
    let spec =
        parse_scenario(&read(path)?)?.with_overrides(args.seed, args.shots, args.tolerance)?;
    let result = run_scenario(&spec)?;
    Ok((to_report_string(&result)?, result.passed()))
}

fn circuit_report(path: &Path) -> Result<(String, bool), Diagnostic> {
    let circuit =
        parse_circuit(&read(path)?).map_err(|e| Diagnostic::from(boxswitch::Error::from(e)))?;
    let validation = validate_circuit(&circuit, &circuit.budget);
    let passed = validation.passed();
    let budget: serde_json::Map<String, Value> = circuit
        .budget
        .iter()
        .map(|(k, v)| (k.to_string(), json!(v)))
        .collect();
    let report = json!({
        "format_version": FORMAT_VERSION,
        "artifact": ARTIFACT,
        "version": ARTIFACT_VERSION,
        "circuit": {
            "wires": circuit.wires,
            "nodes": circuit.nodes.len(),
            "links": circuit.links.len(),
            "oracle_calls": circuit.oracle_calls(),
            "budget": budget,
        },
        "violations": validation.violations.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
        "canonical": serialize_circuit(&circuit)?,
        "verdict": if passed { "pass" } else { "fail" },
    });
    Ok((to_report_string(&report)?, passed))
}

fn run(args: &Args) -> Result<bool, Diagnostic> {
    let (text, passed) = match (&args.scenario, &args.circuit) {
        (Some(path), _) => scenario_report(args, path)?,
        (None, Some(path)) => circuit_report(path)?,
        (None, None) => unreachable!("clap requires one input"),
    };
    match &args.out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Diagnostic::new("io", &path.display().to_string(), e.to_string()))?,
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Diagnostic::new("io", "stdout", e.to_string()))?,
    }
    Ok(passed)
}

fn fail(d: &Diagnostic) -> ExitCode {
    let text = to_report_string(&json!({ "diagnostic": d })).unwrap_or_else(|_| format!("{d}\n"));
    eprint!("{text}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(args) => args,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let detail = e.to_string();
            let message: Vec<&str> = detail
                .lines()
                .take_while(|l| !l.starts_with("Usage:"))
                .map(|l| l.trim().trim_start_matches("error: "))
                .filter(|l| !l.is_empty())
                .collect();
            return fail(&Diagnostic::new("usage", "command line", message.join(" ")));
        }
    };
    match run(&args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(d) => fail(&d),
    }
}
