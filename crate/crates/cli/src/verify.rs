use delsarte::duality::{verify_dual_certificate, verify_primal_witness};
use delsarte::io::{parse_dual_certificate, parse_function, parse_scalar, ProblemSpec};
use delsarte::scalar::FLOAT_GAP_TOL;
use delsarte::zd::verify_sandwich_json;
use delsarte::{Error, Mode, Rational, Result, Scalar};
use serde_json::{json, Value};

use crate::construct::construct;
use crate::input::json_arg;
use crate::{Outcome, Report};

pub fn run(file: &str) -> Result<Report> {
    let v = json_arg(file)?;
    let (kind, failures) = match v.get("kind").and_then(Value::as_str) {
        Some("zd_sandwich") => ("zd_sandwich", verify_sandwich_json(&v)?),
        Some(kind @ ("kernel" | "sign_swap" | "decompose")) => (kind, verify_construction(kind, &v)?),
        Some(other) => return Err(Error::Parse(format!("unknown certificate kind {other:?}"))),
        None if v.get("dual_certificate").is_some() => ("delsarte", verify_gap(&v)?),
        None => return Err(Error::Parse("not a certificate file".into())),
    };
    let valid = failures.is_empty();
    let out = json!({"kind": kind, "valid": valid, "failures": failures});
    Ok(Report::json(&out, if valid { Outcome::Certified } else { Outcome::Tolerance }))
}

/// Replays the construction and compares every recorded field.
fn verify_construction(kind: &str, v: &Value) -> Result<Vec<String>> {
    let mode = match v.get("mode").and_then(Value::as_str) {
        Some(m) => Mode::parse(m)?,
        None => Mode::Exact,
    };
    let input = v.get("input").ok_or_else(|| Error::Parse("missing input".into()))?;
    let fresh = construct(kind, input, mode)?;
    let mut failures = Vec::new();
    if fresh["all_hold"] != json!(true) {
        failures.push("construction properties fail".to_string());
    }
    if let (Some(old), Some(new)) = (v.as_object(), fresh.as_object()) {
        for (key, value) in new {
            if old.get(key) != Some(value) {
                failures.push(format!("{key} differs from the recomputed value"));
            }
        }
    }
    Ok(failures)
}

fn verify_gap(v: &Value) -> Result<Vec<String>> {
    let problem = v.get("problem").ok_or_else(|| Error::Parse("missing problem".into()))?;
    let spec = ProblemSpec::parse(problem)?;
    match spec.mode.unwrap_or(Mode::Exact) {
        Mode::Exact => {
            spec.group.require_exact()?;
            verify_gap_as::<Rational>(&spec, v)
        }
        Mode::Float => verify_gap_as::<f64>(&spec, v),
    }
}

fn verify_gap_as<S: Scalar>(spec: &ProblemSpec, v: &Value) -> Result<Vec<String>> {
    let inst = spec.instance::<S>()?;
    let g = &inst.group;
    let get = |k: &str| v.get(k).ok_or_else(|| Error::Parse(format!("missing {k}")));
    let cert = parse_dual_certificate::<S>(g, get("dual_certificate")?)?;
    let alpha: S = parse_scalar(get("alpha")?)?;
    let omega: S = parse_scalar(get("omega")?)?;
    let mut failures: Vec<String> = verify_dual_certificate(&inst, &cert)?
        .failures
        .iter()
        .map(|f| f.to_string())
        .collect();
    if !(cert.s.clone() - omega.clone()).is_zero_tol() {
        failures.push(format!("certificate value {} differs from omega {}", cert.s.to_text(), omega.to_text()));
    }
    let witness = parse_function::<S>(g, get("primal_witness")?)?;
    let primal = verify_primal_witness(&inst, &witness)?;
    failures.extend(primal.failures);
    if !(primal.value.clone() - alpha.clone()).is_zero_tol() {
        failures.push(format!("witness value {} differs from alpha {}", primal.value.to_text(), alpha.to_text()));
    }
    let gap = alpha - omega;
    let closed = match S::MODE {
        Mode::Exact => gap.is_zero(),
        Mode::Float => gap.to_f64().abs() <= FLOAT_GAP_TOL,
    };
    if !closed {
        failures.push(format!("duality gap {}", gap.to_text()));
    }
    Ok(failures)
}
