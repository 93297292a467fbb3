//! Browser bindings. Every function takes JSON text and returns JSON text,
//! with `{"error": …}` in place of a result when the input is rejected.

use delsarte::constructions::sign_swap as build_sign_swap;
use delsarte::duality::{solve_instance, verify_dual_certificate, Extended};
use delsarte::io::{gap_certificate_to_json, parse_group, parse_region, ProblemSpec};
use delsarte::zd::{default_schedule, sandwich as run_sandwich, CSV_HEADER};
use delsarte::{Error, GroupSpec, Rational, Result, Scalar};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

fn parse(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

fn respond(r: Result<Value>) -> String {
    r.unwrap_or_else(|e| json!({ "error": e.to_string() })).to_string()
}

/// Delsarte constant of `Ω` in a finite group, with its certificate.
#[wasm_bindgen]
pub fn solve(group: &str, omega: &str) -> String {
    respond(solve_impl(group, omega))
}

fn solve_impl(group: &str, omega: &str) -> Result<Value> {
    let spec = ProblemSpec::parse(&json!({ "group": parse(group)?, "omega": parse(omega)? }))?;
    if spec.group.exact_spectral() {
        solve_as::<Rational>(&spec)
    } else {
        solve_as::<f64>(&spec)
    }
}

fn solve_as<S: Scalar>(spec: &ProblemSpec) -> Result<Value> {
    let inst = spec.instance::<S>()?;
    let sol = solve_instance(&inst)?;
    if let Extended::PlusInfinity = sol.primal.alpha {
        return Ok(json!({ "status": "infeasible", "mode": S::MODE.to_string() }));
    }
    let cert = sol.certify()?;
    let verdict = verify_dual_certificate(&inst, &cert.dual_certificate)?;
    let mut v = gap_certificate_to_json(&inst, &cert);
    v["delsarte_constant"] = json!((-cert.alpha.clone()).to_text());
    v["status"] = json!(if cert.certified && verdict.valid { "certified" } else { "tolerance_failure" });
    Ok(v)
}

/// The sign-swap function on `Z` for symmetric `S` and a window `V`.
#[wasm_bindgen]
pub fn sign_swap(s: &str, v: &str) -> String {
    respond(sign_swap_impl(s, v))
}

fn sign_swap_impl(s: &str, v: &str) -> Result<Value> {
    let g = GroupSpec::free(1, 400)?;
    let s = parse_region(&g, &parse(s)?)?;
    let v = parse_region(&g, &parse(v)?)?;
    Ok(build_sign_swap::<Rational>(&g, &s, &v)?.to_json())
}

/// Lower and upper bounds for `Ω ⊂ Z` as the windows grow.
#[wasm_bindgen]
pub fn sandwich(omega: &str) -> String {
    respond(sandwich_impl(omega))
}

fn sandwich_impl(omega: &str) -> Result<Value> {
    let g = parse_group(&json!({ "free": { "rank": 1, "window": 1 << 20 } }))?;
    let omega = parse_region(&g, &parse(omega)?)?;
    let rows = run_sandwich(1, &omega, &default_schedule(), Some(1e-9))?;
    let rows: Vec<Value> = rows
        .iter()
        .map(|r| {
            json!({
                "m": r.m,
                "n": r.n,
                "lower": r.lower.to_text(),
                "upper": r.upper.to_text(),
                "gap": r.gap().to_text(),
                "lower_approx": Scalar::to_f64(&r.lower),
                "upper_approx": r.upper.finite().map(Scalar::to_f64),
            })
        })
        .collect();
    Ok(json!({ "columns": CSV_HEADER, "rows": rows }))
}
