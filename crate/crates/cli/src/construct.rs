use clap::Subcommand;
use delsarte::constructions::{check_kernel, pd_minorant_decompose, sign_swap, urysohn_pd_kernel, DecomposeOptions};
use delsarte::io::{function_to_json, parse_function, parse_group, parse_region, parse_scalar};
use delsarte::{Error, Mode, Rational, Result, Scalar};
use serde_json::{json, Value};

use crate::input::json_arg;
use crate::{Outcome, Report, Settings};

#[derive(Subcommand)]
pub enum ConstructCommand {
    /// Nonnegative positive definite kernel, 1 at 0 and at least 1 - eps on K.
    Kernel {
        #[arg(long, default_value = r#"{"free":{"rank":1,"window":4096}}"#)]
        group: String,
        #[arg(long = "K")]
        k: String,
        #[arg(long, default_value = "1/4")]
        eps: String,
    },
    /// Positive definite k with k = -1 on S and positive part inside V - V.
    SignSwap {
        #[arg(long, default_value = r#"{"free":{"rank":1,"window":200}}"#)]
        group: String,
        #[arg(long = "S")]
        s: String,
        #[arg(long = "V", default_value = "[0]")]
        v: String,
    },
    /// Split f = p + q with p positive definite and q >= 0 on A.
    Decompose {
        #[arg(long, default_value = r#"{"free":{"rank":1,"window":200}}"#)]
        group: String,
        #[arg(long)]
        f: String,
        #[arg(long = "A")]
        a: String,
        #[arg(long, default_value_t = 1)]
        modulus: u64,
        #[arg(long = "V", default_value = "[0]")]
        v: String,
    },
}

pub fn run(settings: &Settings, cmd: &ConstructCommand) -> Result<Report> {
    let (kind, input) = match cmd {
        ConstructCommand::Kernel { group, k, eps } => (
            "kernel",
            json!({"group": json_arg(group)?, "K": json_arg(k)?, "eps": eps}),
        ),
        ConstructCommand::SignSwap { group, s, v } => (
            "sign_swap",
            json!({"group": json_arg(group)?, "S": json_arg(s)?, "V": json_arg(v)?}),
        ),
        ConstructCommand::Decompose { group, f, a, modulus, v } => (
            "decompose",
            json!({"group": json_arg(group)?, "f": json_arg(f)?, "A": json_arg(a)?, "modulus": modulus, "V": json_arg(v)?}),
        ),
    };
    let out = construct(kind, &input, settings.mode.construction_mode())?;
    let outcome = if out["all_hold"] == json!(true) {
        Outcome::Certified
    } else {
        Outcome::Violation
    };
    Ok(Report::json(&out, outcome))
}

/// Runs a construction from its recorded input; `verify` calls this again.
pub fn construct(kind: &str, input: &Value, mode: Mode) -> Result<Value> {
    let mut out = match mode {
        Mode::Exact => construct_as::<Rational>(kind, input)?,
        Mode::Float => construct_as::<f64>(kind, input)?,
    };
    out["kind"] = json!(kind);
    out["mode"] = json!(mode.to_string());
    out["input"] = input.clone();
    Ok(out)
}

fn field<'a>(input: &'a Value, key: &str) -> Result<&'a Value> {
    input.get(key).ok_or_else(|| Error::Parse(format!("missing {key}")))
}

fn construct_as<S: Scalar>(kind: &str, input: &Value) -> Result<Value> {
    let g = parse_group(field(input, "group")?)?;
    match kind {
        "kernel" => {
            let k_set = parse_region(&g, field(input, "K")?)?;
            let eps: S = parse_scalar(field(input, "eps")?)?;
            let kernel = urysohn_pd_kernel(&g, &k_set, &eps)?;
            let checks = check_kernel(&kernel, &k_set, &eps)?;
            Ok(json!({
                "k": function_to_json(&kernel.k),
                "H_radius": kernel.radius,
                "H_size": kernel.h.len(),
                "min_on_K": kernel.min_on_k.to_text(),
                "checks": {
                    "value_at_zero_one": checks.value_at_zero_one,
                    "nonnegative": checks.nonnegative,
                    "finitely_supported": checks.finitely_supported,
                    "positive_definite": checks.positive_definite,
                    "above_one_minus_eps_on_K": checks.above_threshold_on_k,
                },
                "all_hold": checks.all(),
            }))
        }
        "sign_swap" => {
            let s = parse_region(&g, field(input, "S")?)?;
            let v = parse_region(&g, field(input, "V")?)?;
            Ok(sign_swap::<S>(&g, &s, &v)?.to_json())
        }
        "decompose" => {
            let f = parse_function::<S>(&g, field(input, "f")?)?;
            let a = parse_region(&g, field(input, "A")?)?;
            let modulus = field(input, "modulus")?
                .as_u64()
                .ok_or_else(|| Error::Parse("modulus must be a positive integer".into()))?;
            let v = parse_region(&g, field(input, "V")?)?;
            Ok(pd_minorant_decompose(&f, &a, &DecomposeOptions { modulus, v })?.to_json())
        }
        other => Err(Error::Parse(format!("unknown construction {other:?}"))),
    }
}
