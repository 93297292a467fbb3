use std::path::PathBuf;

use clap::Args;
use delsarte::duality::Extended;
use delsarte::io::parse_region;
use delsarte::zd::{default_schedule, sandwich, sandwich_csv, sandwich_to_json};
use delsarte::{Error, GroupSpec, Result, Scalar};

use crate::input::json_arg;
use crate::{Format, Outcome, Report, Settings};

#[derive(Args)]
pub struct SandwichArgs {
    #[arg(long, default_value_t = 1)]
    dim: usize,
    /// Finite symmetric set containing 0, as JSON.
    #[arg(long)]
    omega: String,
    /// Window radii as `m:n` pairs, e.g. `0:1,1:2,2:3`.
    #[arg(long)]
    schedule: Option<String>,
    /// Stop once the gap is at most this; exit 3 if never reached.
    #[arg(long)]
    tolerance: Option<f64>,
    /// Also write both witnesses of every row here, in the form `verify` reads.
    #[arg(long)]
    witnesses: Option<PathBuf>,
}

fn parse_schedule(text: &str) -> Result<Vec<(u64, u64)>> {
    text.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|pair| {
            let (m, n) = pair
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("schedule entry {pair:?} is not m:n")))?;
            let num = |s: &str| {
                s.trim()
                    .parse::<u64>()
                    .map_err(|_| Error::Parse(format!("schedule entry {pair:?}")))
            };
            Ok((num(m)?, num(n)?))
        })
        .collect()
}

pub fn run(settings: &Settings, args: &SandwichArgs) -> Result<Report> {
    if let Some(t) = args.tolerance {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::InvalidParameter("tolerance must be a nonnegative number".into()));
        }
    }
    let schedule = match &args.schedule {
        Some(s) => parse_schedule(s)?,
        None => default_schedule(),
    };
    if schedule.is_empty() {
        return Err(Error::InvalidParameter("empty schedule".into()));
    }
    let g = GroupSpec::free(args.dim, 1 << 20)?;
    let omega = parse_region(&g, &json_arg(&args.omega)?)?;
    let rows = sandwich(args.dim, &omega, &schedule, args.tolerance)?;
    let doc = sandwich_to_json(args.dim, &omega, &rows);
    if let Some(path) = &args.witnesses {
        let text = serde_json::to_string_pretty(&doc).expect("json values serialize");
        std::fs::write(path, text + "\n").map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    }
    let last = rows.last().expect("schedule is nonempty");
    let reached = match (args.tolerance, last.gap()) {
        (None, _) => true,
        (Some(t), Extended::Finite(gap)) => Scalar::to_f64(&gap) <= t,
        (Some(_), _) => false,
    };
    let outcome = if reached { Outcome::Certified } else { Outcome::Tolerance };
    Ok(match settings.format {
        Some(Format::Json) => Report::json(&doc, outcome),
        _ => Report {
            text: sandwich_csv(&rows),
            outcome,
        },
    })
}
