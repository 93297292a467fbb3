//! JSON forms for groups, regions, functions, functionals, problems and
//! certificates. Scalars are written as strings (`"p/q"` in exact mode) so
//! that files round-trip losslessly; numbers are accepted on input.

use std::collections::BTreeMap;

use serde_json::{json, Map, Value};

use crate::duality::{DelsarteInstance, DualCertificate, GapCertificate};
use crate::error::{Error, Result};
use crate::function::GroupFunction;
use crate::functionals::MeasureFunctional;
use crate::group::{Element, GroupSpec, Region};
use crate::scalar::{Mode, Scalar};

fn bad(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

/// `{"finite":[4,2]}`, `{"free":{"rank":1,"window":10}}` or the short
/// forms `[4,2]` and `{"free":1}`.
pub fn parse_group(v: &Value) -> Result<GroupSpec> {
    if let Some(arr) = v.as_array() {
        return GroupSpec::finite(&orders(arr)?);
    }
    let obj = v.as_object().ok_or_else(|| bad("group must be an object or array"))?;
    if let Some(f) = obj.get("finite") {
        let arr = f.as_array().ok_or_else(|| bad("finite expects an array of orders"))?;
        return GroupSpec::finite(&orders(arr)?);
    }
    if let Some(f) = obj.get("free") {
        let (rank, window) = match f {
            Value::Number(n) => (n.as_u64().ok_or_else(|| bad("rank"))?, 64),
            Value::Object(o) => (
                o.get("rank").and_then(Value::as_u64).ok_or_else(|| bad("free.rank"))?,
                o.get("window").and_then(Value::as_u64).unwrap_or(64),
            ),
            _ => return Err(bad("free expects a rank or {rank, window}")),
        };
        return GroupSpec::free(rank as usize, window);
    }
    Err(Error::InvalidGroup("empty descriptor".into()))
}

fn orders(arr: &[Value]) -> Result<Vec<u64>> {
    arr.iter()
        .map(|x| x.as_u64().ok_or_else(|| bad(format!("order {x} is not a nonnegative integer"))))
        .collect()
}

pub fn group_to_json(g: &GroupSpec) -> Value {
    match g.orders() {
        Some(o) => json!({ "finite": o }),
        None => json!({ "free": { "rank": g.rank(), "window": g.window().unwrap_or(0) } }),
    }
}

/// `3`, `[1,2]`, `"3"`, `"(1,2)"`.
pub fn parse_element(g: &GroupSpec, v: &Value) -> Result<Element> {
    let coords: Vec<i64> = match v {
        Value::Number(n) => vec![n.as_i64().ok_or_else(|| bad(format!("element {n}")))?],
        Value::Array(a) => a
            .iter()
            .map(|c| c.as_i64().ok_or_else(|| bad(format!("coordinate {c}"))))
            .collect::<Result<_>>()?,
        Value::String(s) => return parse_element_key(g, s),
        _ => return Err(bad(format!("element {v}"))),
    };
    g.reduce(&coords)
}

pub fn parse_element_key(g: &GroupSpec, s: &str) -> Result<Element> {
    let t = s.trim().trim_start_matches(['(', '[']).trim_end_matches([')', ']']);
    let coords: Vec<i64> = t
        .split(',')
        .map(|c| c.trim().parse::<i64>().map_err(|_| bad(format!("element {s:?}"))))
        .collect::<Result<_>>()?;
    g.reduce(&coords)
}

/// A list of elements, `"all"`, `"empty"`, `{"members":[…],"complement":bool}`
/// or the short form `{"complement":[…]}`.
pub fn parse_region(g: &GroupSpec, v: &Value) -> Result<Region> {
    match v {
        Value::String(s) if s == "all" => Ok(Region::everything()),
        Value::String(s) if s == "empty" => Ok(Region::empty()),
        Value::Array(a) => Ok(Region::finite(
            a.iter().map(|x| parse_element(g, x)).collect::<Result<Vec<_>>>()?,
        )),
        Value::Object(o) => {
            let (list, complement) = match (o.get("complement"), o.get("members")) {
                (Some(Value::Bool(c)), Some(l)) => (l, *c),
                (Some(Value::Bool(_)), None) => return Err(bad("region object needs members")),
                (Some(l), None) => (l, true),
                (None, Some(l)) => (l, false),
                _ => return Err(bad("region object needs members or complement")),
            };
            let a = list.as_array().ok_or_else(|| bad("region list"))?;
            Ok(Region::new(
                a.iter().map(|x| parse_element(g, x)).collect::<Result<Vec<_>>>()?,
                complement,
            ))
        }
        _ => Err(bad(format!("region {v}"))),
    }
}

pub fn region_to_json(r: &Region) -> Value {
    let members: Vec<Value> = r.members.iter().map(element_json).collect();
    if r.complement {
        json!({ "members": members, "complement": true })
    } else {
        Value::Array(members)
    }
}

fn element_json(x: &Element) -> Value {
    if x.dim() == 1 {
        json!(x.coords()[0])
    } else {
        json!(x.coords())
    }
}

pub fn parse_scalar<S: Scalar>(v: &Value) -> Result<S> {
    match v {
        Value::String(s) => S::parse_text(s),
        Value::Number(n) => S::parse_text(&n.to_string()),
        _ => Err(bad(format!("scalar {v}"))),
    }
}

/// `{"element": "value", …}` keyed by element text.
pub fn function_to_json<S: Scalar>(f: &GroupFunction<S>) -> Value {
    let map: Map<String, Value> = f
        .iter()
        .map(|(x, v)| (x.to_string(), Value::String(v.to_text())))
        .collect();
    Value::Object(map)
}

/// An atom map, or a dense array on a finite group.
pub fn parse_function<S: Scalar>(g: &GroupSpec, v: &Value) -> Result<GroupFunction<S>> {
    match v {
        Value::Object(o) => {
            let pairs = o
                .iter()
                .map(|(k, val)| Ok((parse_element_key(g, k)?, parse_scalar::<S>(val)?)))
                .collect::<Result<Vec<_>>>()?;
            GroupFunction::from_pairs(g, pairs)
        }
        Value::Array(a) => {
            let vals = a.iter().map(parse_scalar::<S>).collect::<Result<Vec<_>>>()?;
            GroupFunction::from_dense(g, &vals)
        }
        _ => Err(bad(format!("function {v}"))),
    }
}

/// `{"constant": c, "atoms": {…}}`; also `"haar"`, `"-haar"`, `"delta0"`, a
/// bare atom map or a dense array.
pub fn parse_functional<S: Scalar>(g: &GroupSpec, v: &Value) -> Result<MeasureFunctional<S>> {
    match v {
        Value::String(s) => match s.as_str() {
            "haar" | "lambda" => Ok(MeasureFunctional::haar(g)),
            "-haar" | "-lambda" => Ok(MeasureFunctional::haar(g).scale(&-S::one())),
            "delta0" => Ok(MeasureFunctional::delta(g, &g.zero())),
            _ => Err(bad(format!("unknown functional {s:?}"))),
        },
        Value::Object(o) if o.contains_key("constant") || o.contains_key("atoms") => {
            let constant = match o.get("constant") {
                Some(c) => parse_scalar(c)?,
                None => S::zero(),
            };
            let atoms = match o.get("atoms") {
                Some(a) => parse_function(g, a)?,
                None => GroupFunction::zero(g),
            };
            Ok(MeasureFunctional::new(constant, atoms))
        }
        _ => Ok(MeasureFunctional::from_atoms(parse_function(g, v)?)),
    }
}

pub fn functional_to_json<S: Scalar>(m: &MeasureFunctional<S>) -> Value {
    json!({ "constant": m.constant().to_text(), "atoms": function_to_json(m.atoms()) })
}

/// The raw problem description before a mode is chosen.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    pub group: GroupSpec,
    pub raw: Value,
    pub mode: Option<Mode>,
}

impl ProblemSpec {
    pub fn parse(v: &Value) -> Result<Self> {
        let obj = v.as_object().ok_or_else(|| bad("problem must be an object"))?;
        let group = parse_group(obj.get("group").ok_or_else(|| bad("missing group"))?)?;
        let mode = obj
            .get("mode")
            .and_then(Value::as_str)
            .map(Mode::parse)
            .transpose()?;
        Ok(ProblemSpec {
            group,
            raw: v.clone(),
            mode,
        })
    }

    /// Defaults: `Ω = G`, `ρ = −λ`, `σ = δ_0`.
    pub fn instance<S: Scalar>(&self) -> Result<DelsarteInstance<S>> {
        let g = &self.group;
        let get = |k: &str| self.raw.get(k).filter(|v| !v.is_null());
        let omega = get("omega").map(|v| parse_region(g, v)).transpose()?.unwrap_or_else(Region::everything);
        let omega_minus = get("omega_minus").map(|v| parse_region(g, v)).transpose()?;
        let rho = match get("rho") {
            Some(v) => parse_functional(g, v)?,
            None => MeasureFunctional::haar(g).scale(&-S::one()),
        };
        let sigma = match get("sigma") {
            Some(v) => parse_functional(g, v)?,
            None => MeasureFunctional::delta(g, &g.zero()),
        };
        DelsarteInstance::new(g.clone(), omega, omega_minus, rho, sigma)
    }
}

pub fn instance_to_json<S: Scalar>(inst: &DelsarteInstance<S>) -> Value {
    json!({
        "group": group_to_json(&inst.group),
        "omega": region_to_json(&inst.omega),
        "omega_minus": inst.omega_minus.as_ref().map(region_to_json),
        "rho": functional_to_json(&inst.rho),
        "sigma": functional_to_json(&inst.sigma),
        "mode": S::MODE.to_string(),
    })
}

pub fn dual_certificate_to_json<S: Scalar>(c: &DualCertificate<S>) -> Value {
    json!({
        "s": c.s.to_text(),
        "kappa": functional_to_json(&c.kappa),
        "kappa_minus": c.kappa_minus.as_ref().map(functional_to_json),
        "nu": functional_to_json(&c.nu),
        "gap_to_primal": c.gap_to_primal.as_ref().map(|g| g.to_text()),
    })
}

pub fn parse_dual_certificate<S: Scalar>(g: &GroupSpec, v: &Value) -> Result<DualCertificate<S>> {
    let obj = v.as_object().ok_or_else(|| bad("certificate must be an object"))?;
    let field = |k: &str| obj.get(k).filter(|v| !v.is_null());
    Ok(DualCertificate {
        s: parse_scalar(field("s").ok_or_else(|| bad("missing s"))?)?,
        kappa: match field("kappa") {
            Some(k) => parse_functional(g, k)?,
            None => MeasureFunctional::zero(g),
        },
        kappa_minus: field("kappa_minus").map(|k| parse_functional(g, k)).transpose()?,
        nu: parse_functional(g, field("nu").ok_or_else(|| bad("missing nu"))?)?,
        gap_to_primal: field("gap_to_primal").map(parse_scalar).transpose()?,
    })
}

/// Self-contained certificate file: the instance plus both optimizers.
pub fn gap_certificate_to_json<S: Scalar>(inst: &DelsarteInstance<S>, c: &GapCertificate<S>) -> Value {
    json!({
        "problem": instance_to_json(inst),
        "alpha": c.alpha.to_text(),
        "omega": c.omega.to_text(),
        "gap": c.gap.to_text(),
        "certified": c.certified,
        "primal_witness": function_to_json(&c.primal_witness),
        "dual_certificate": dual_certificate_to_json(&c.dual_certificate),
    })
}

/// Elements sorted for stable output.
pub fn sorted_atoms<S: Scalar>(f: &GroupFunction<S>) -> BTreeMap<Element, String> {
    f.iter().map(|(x, v)| (x.clone(), v.to_text())).collect()
}
