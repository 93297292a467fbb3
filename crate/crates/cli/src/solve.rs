use clap::Args;
use delsarte::duality::{solve_instance, verify_dual_certificate, verify_primal_witness, DelsarteInstance};
use delsarte::io::{gap_certificate_to_json, instance_to_json, ProblemSpec};
use delsarte::{Error, MeasureFunctional, Mode, Rational, Result, Scalar};
use serde_json::{json, Map, Value};

use crate::input::json_arg;
use crate::{par_map, Format, ModeChoice, Outcome, Report, Settings};

#[derive(Args)]
pub struct SolveArgs {
    /// Problem JSON, inline or as a path.
    #[arg(long)]
    problem: Option<String>,
    /// JSON array of problems; prints one CSV row each.
    #[arg(long, conflicts_with = "problem")]
    batch: Option<String>,
    #[arg(long)]
    group: Option<String>,
    #[arg(long)]
    omega: Option<String>,
    #[arg(long)]
    omega_minus: Option<String>,
    #[arg(long)]
    rho: Option<String>,
    #[arg(long)]
    sigma: Option<String>,
}

pub const CSV_HEADER: &str = "id,mode,alpha,omega,gap,status";

/// The JSON report of one solve and its CSV row.
pub struct Solved {
    pub json: Value,
    pub outcome: Outcome,
    pub row: [String; 5],
}

pub fn run(settings: &Settings, args: &SolveArgs) -> Result<Report> {
    if let Some(batch) = &args.batch {
        return run_batch(settings, &json_arg(batch)?);
    }
    let mut problem = match &args.problem {
        Some(p) => json_arg(p)?,
        None => Value::Object(Map::new()),
    };
    let obj = problem
        .as_object_mut()
        .ok_or_else(|| Error::Parse("problem must be an object".into()))?;
    let flags = [
        ("group", &args.group),
        ("omega", &args.omega),
        ("omega_minus", &args.omega_minus),
        ("rho", &args.rho),
        ("sigma", &args.sigma),
    ];
    for (key, flag) in flags {
        if let Some(text) = flag {
            obj.insert(key.into(), json_arg(text)?);
        }
    }
    let solved = solve_value(settings.mode, &problem)?;
    Ok(match settings.format {
        Some(Format::Csv) => csv_report(&[("0".into(), Ok(solved))]),
        _ => Report::json(&solved.json, solved.outcome),
    })
}

fn run_batch(settings: &Settings, batch: &Value) -> Result<Report> {
    let items = batch
        .as_array()
        .ok_or_else(|| Error::Parse("batch must be a JSON array of problems".into()))?;
    let ids: Vec<String> = items
        .iter()
        .enumerate()
        .map(|(i, p)| match p.get("id") {
            Some(Value::String(s)) => s.clone(),
            Some(v) if !v.is_null() => v.to_string(),
            _ => i.to_string(),
        })
        .collect();
    let results = par_map(items, settings.jobs, |p| solve_value(settings.mode, p));
    let rows: Vec<(String, Result<Solved>)> = ids.into_iter().zip(results).collect();
    Ok(match settings.format {
        Some(Format::Json) => {
            let outcome = rows.iter().map(|(_, r)| outcome_of(r)).max().unwrap_or(Outcome::Certified);
            let list: Vec<Value> = rows
                .iter()
                .map(|(id, r)| match r {
                    Ok(s) => json!({"id": id, "result": s.json}),
                    Err(e) => json!({"id": id, "status": "error", "message": e.to_string()}),
                })
                .collect();
            Report::json(&Value::Array(list), outcome)
        }
        _ => csv_report(&rows),
    })
}

fn outcome_of(r: &Result<Solved>) -> Outcome {
    r.as_ref().map_or(Outcome::Error, |s| s.outcome)
}

fn csv_report(rows: &[(String, Result<Solved>)]) -> Report {
    let mut text = format!("{CSV_HEADER}\n");
    for (id, r) in rows {
        match r {
            Ok(s) => text.push_str(&format!("{id},{}\n", s.row.join(","))),
            Err(e) => text.push_str(&format!("{id},,,,,\"error: {}\"\n", e.to_string().replace('"', "'"))),
        }
    }
    let outcome = rows.iter().map(|(_, r)| outcome_of(r)).max().unwrap_or(Outcome::Certified);
    Report { text, outcome }
}

pub fn solve_value(choice: ModeChoice, problem: &Value) -> Result<Solved> {
    let spec = ProblemSpec::parse(problem)?;
    match choice.resolve(spec.mode, &spec.group)? {
        Mode::Exact => solve_as::<Rational>(&spec),
        Mode::Float => solve_as::<f64>(&spec),
    }
}

fn is_standard<S: Scalar>(inst: &DelsarteInstance<S>) -> bool {
    let g = &inst.group;
    inst.omega_minus.is_none()
        && inst.rho == MeasureFunctional::haar(g).scale(&-S::one())
        && inst.sigma == MeasureFunctional::delta(g, &g.zero())
}

fn solve_as<S: Scalar>(spec: &ProblemSpec) -> Result<Solved> {
    let inst = spec.instance::<S>()?;
    let sol = solve_instance(&inst)?;
    let mode = S::MODE.to_string();
    if sol.primal.alpha.finite().is_none() {
        let status = match sol.primal.alpha {
            delsarte::duality::Extended::PlusInfinity => "infeasible",
            _ => "unbounded",
        };
        let alpha = sol.primal.alpha.to_text();
        let omega = sol.dual.omega.to_text();
        let json = json!({
            "status": status,
            "mode": mode,
            "problem": instance_to_json(&inst),
            "alpha": alpha,
            "omega": omega,
            "gap": Value::Null,
        });
        return Ok(Solved {
            json,
            outcome: Outcome::Infeasible,
            row: [mode, alpha, omega, String::new(), status.into()],
        });
    }
    let cert = match sol.certify() {
        Ok(c) => c,
        Err(Error::WeakDualityViolated { primal, dual }) => {
            let json = json!({
                "status": "weak_duality_violated",
                "mode": mode,
                "problem": instance_to_json(&inst),
                "alpha": primal,
                "omega": dual,
            });
            return Ok(Solved {
                json,
                outcome: Outcome::Tolerance,
                row: [mode, primal, dual, String::new(), "weak_duality_violated".into()],
            });
        }
        Err(e) => return Err(e),
    };
    let dual_check = verify_dual_certificate(&inst, &cert.dual_certificate)?;
    let primal_check = verify_primal_witness(&inst, &cert.primal_witness)?;
    let ok = cert.certified && dual_check.valid && primal_check.valid;
    let status = if ok { "certified" } else { "tolerance_failure" };
    let mut json = gap_certificate_to_json(&inst, &cert);
    json["status"] = json!(status);
    json["mode"] = json!(mode);
    if is_standard(&inst) {
        json["delsarte_constant"] = json!((-cert.alpha.clone()).to_text());
    }
    let failures: Vec<String> = dual_check
        .failures
        .iter()
        .map(|f| f.to_string())
        .chain(primal_check.failures.iter().cloned())
        .collect();
    if !failures.is_empty() {
        json["failures"] = json!(failures);
    }
    Ok(Solved {
        json,
        outcome: if ok { Outcome::Certified } else { Outcome::Tolerance },
        row: [mode, cert.alpha.to_text(), cert.omega.to_text(), cert.gap.to_text(), status.into()],
    })
}
