use delsarte::zd::{default_schedule, sandwich};
use delsarte::{GroupSpec, Mode, Rational, Region};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::construct::construct;
use crate::solve::solve_value;
use crate::{par_map, ModeChoice, Outcome, Report, Settings};

type Check = Result<String, String>;

const SHAPES: &[&[u64]] = &[
    &[2],
    &[3],
    &[4],
    &[6],
    &[2, 2],
    &[2, 3],
    &[2, 4],
    &[3, 3],
    &[2, 6],
    &[4, 4],
    &[2, 2, 2],
    &[2, 2, 4],
    &[3, 6],
    &[6, 6],
];

pub fn run(settings: &Settings, count: usize) -> Report {
    let checks: Vec<(&str, Check)> = vec![
        ("z4-constant", z4_constant()),
        ("infeasible-without-zero", infeasible()),
        ("exact-unavailable", exact_unavailable()),
        ("sign-swap", sign_swap_example()),
        ("sandwich", sandwich_example()),
        ("round-trip", round_trip()),
        ("random-duality", random_duality(settings, count)),
    ];
    let mut text = String::new();
    let mut passed = 0;
    for (name, result) in &checks {
        match result {
            Ok(detail) => {
                passed += 1;
                text.push_str(&format!("PASS {name}: {detail}\n"));
            }
            Err(detail) => text.push_str(&format!("FAIL {name}: {detail}\n")),
        }
    }
    text.push_str(&format!("selftest seed {}: {passed}/{} passed\n", settings.seed, checks.len()));
    let outcome = if passed == checks.len() { Outcome::Certified } else { Outcome::Tolerance };
    Report { text, outcome }
}

fn expect(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn z4_constant() -> Check {
    let s = solve_value(ModeChoice::Auto, &json!({"group": {"finite": [4]}, "omega": [0, 1, 3]})).map_err(|e| e.to_string())?;
    expect(s.outcome == Outcome::Certified, "not certified")?;
    expect(s.json["delsarte_constant"] == json!("2"), format!("constant {}", s.json["delsarte_constant"]))?;
    expect(s.json["gap"] == json!("0"), "nonzero gap")?;
    Ok("constant 2, gap 0".into())
}

fn infeasible() -> Check {
    let s = solve_value(ModeChoice::Auto, &json!({"group": {"finite": [4]}, "omega": [1, 3]})).map_err(|e| e.to_string())?;
    expect(s.outcome == Outcome::Infeasible, format!("status {}", s.json["status"]))?;
    Ok(format!("status {}", s.json["status"].as_str().unwrap_or("")))
}

fn exact_unavailable() -> Check {
    let g = GroupSpec::cyclic(5).map_err(|e| e.to_string())?;
    match ModeChoice::Exact.resolve(None, &g) {
        Ok(_) => Err("exact mode accepted on Z_5".into()),
        Err(e) => {
            let msg = e.to_string();
            expect(msg.contains("exponent 5"), msg.clone())?;
            let auto = ModeChoice::Auto.resolve(None, &g).map_err(|e| e.to_string())?;
            expect(auto == Mode::Float, "auto mode did not fall back to float")?;
            Ok(msg)
        }
    }
}

fn sign_swap_example() -> Check {
    let input = json!({"group": {"free": {"rank": 1, "window": 200}}, "S": [2, -2], "V": [0]});
    let out = construct("sign_swap", &input, Mode::Exact).map_err(|e| e.to_string())?;
    expect(out["all_hold"] == json!(true), "checks fail")?;
    expect(
        out["k"] == json!({"-2": "-1", "0": "2", "2": "-1"}),
        format!("k = {}", out["k"]),
    )?;
    Ok("k = 2 at 0, -1 at +-2".into())
}

fn sandwich_example() -> Check {
    let rows = sandwich(1, &Region::from_ints(&[-1, 0, 1]), &default_schedule(), None).map_err(|e| e.to_string())?;
    let last = rows.last().ok_or("no rows")?;
    let two = Rational::from_integer(2.into());
    expect(last.closed() && last.lower == two, format!("last row {} .. {}", last.lower, last.upper))?;
    Ok(format!("closed at 2 after {} rows", rows.len()))
}

fn round_trip() -> Check {
    let problem = json!({"group": {"finite": [2, 4]}, "omega": [[0, 0], [0, 1], [0, 3], [1, 0]]});
    let s = solve_value(ModeChoice::Auto, &problem).map_err(|e| e.to_string())?;
    let good = verify_doc(&s.json)?;
    expect(good, "emitted certificate rejected")?;
    let mut bad = s.json.clone();
    bad["dual_certificate"]["s"] = json!("-1000");
    expect(!verify_doc(&bad)?, "tampered certificate accepted")?;
    Ok("certificate re-verifies, tampered copy rejected".into())
}

fn verify_doc(doc: &Value) -> Result<bool, String> {
    let text = doc.to_string();
    let report = crate::verify::run(&text).map_err(|e| e.to_string())?;
    Ok(report.outcome == Outcome::Certified)
}

/// Random problems, each solved and its certificate rechecked.
fn random_problems(seed: u64, count: usize) -> Vec<Value> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let shape = *SHAPES.choose(&mut rng).expect("nonempty");
            let g = GroupSpec::finite(shape).expect("valid shape");
            let mut omega = Vec::new();
            let mut omega_minus = Vec::new();
            for orbit in g.inversion_orbits() {
                let zero = g.is_zero(&orbit.rep);
                let keep = zero || rng.gen_bool(0.4);
                let keep_minus = zero || rng.gen_bool(0.6);
                for x in &orbit.members {
                    if keep {
                        omega.push(json!(x.coords()));
                    }
                    if keep_minus {
                        omega_minus.push(json!(x.coords()));
                    }
                }
            }
            let mut p = json!({"group": {"finite": shape}, "omega": omega});
            if rng.gen_bool(0.3) {
                p["omega_minus"] = json!(omega_minus);
            }
            p
        })
        .collect()
}

fn random_duality(settings: &Settings, count: usize) -> Check {
    let problems = random_problems(settings.seed, count);
    let results = par_map(&problems, settings.jobs, |p| -> Result<(), String> {
        let s = solve_value(ModeChoice::Exact, p).map_err(|e| e.to_string())?;
        expect(s.outcome == Outcome::Certified, format!("{p}: status {}", s.json["status"]))?;
        expect(verify_doc(&s.json)?, format!("{p}: certificate rejected"))
    });
    let failures: Vec<String> = results.into_iter().filter_map(Result::err).collect();
    match failures.first() {
        None => Ok(format!("{count}/{count} instances certified with zero gap")),
        Some(f) => Err(format!("{} of {count} failed, first: {f}", failures.len())),
    }
}
