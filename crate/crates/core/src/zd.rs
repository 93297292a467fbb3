//! Two-sided bounds for the Delsarte constant of a finite `Ω ⊂ Z^d`,
//! `d ≤ 2`.
//!
//! Lower bounds come from the primal restricted to functions supported in
//! `[−m, m]^d`; upper bounds from dual certificates of degree `n`. Both
//! searches are exact rational LPs in which positive definiteness on the
//! torus is approached by cutting planes at dyadic multiples of `π`, with
//! the cosines rounded to dyadic rationals. The cuts only steer the search:
//! the final witness or certificate is checked on its own and, if its
//! transform still dips below zero, shifted by a certified amount.
//!
//! A dual certificate is `(s, κ, ν)` with
//!
//! ```text
//! ν = ν_fin + Σ_θ a_θ χ_θ,   θ ∈ {0, π}^d,  a_θ ≥ 0,
//! ```
//!
//! so that `ν̂ = ν̂_fin + Σ a_θ δ_θ`. Off the window `κ = 1 + Σ a_θ χ_θ`,
//! which only depends on the parity class of `x`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::duality::Extended;
use crate::error::{Error, Result};
use crate::function::GroupFunction;
use crate::group::{box_elements, Element, GroupSpec, Region};
use crate::lp::{LPProblem, LpStatus, Relation, Sense, VarBound};
use crate::scalar::{Rational, Scalar};
use crate::spectral::{cosine_poly, Poly, TrigPolynomial};

/// Grid resolution of the first cutting-plane round, per dimension.
pub const START_RESOLUTION: usize = 1 << 10;
const MAX_RESOLUTION_1D: usize = 1 << 16;
const MAX_RESOLUTION_2D: usize = 1 << 11;
const MAX_ROUNDS: usize = 40;
const ANGLE_BITS: u32 = 16;
const CUT_TOLERANCE: f64 = 1e-12;

fn q(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Cut coefficients are multiples of `2^-COEFF_BITS`.
const COEFF_BITS: u32 = 40;
/// `2π` in units of `π/2^ANGLE_BITS`.
const PERIOD: i64 = 2 << ANGLE_BITS;

/// A cut direction with `θ_i = k_i π/2^ANGLE_BITS`.
#[derive(Debug, Clone, PartialEq)]
struct CutAngle(Vec<i64>);

impl CutAngle {
    /// Nearest multiple of `π/2^bits` per coordinate.
    fn snap(theta: &[f64], bits: u32) -> Self {
        let step = PI / (1u64 << bits) as f64;
        let shift = ANGLE_BITS - bits;
        CutAngle(
            theta
                .iter()
                .map(|t| (((t / step).round() as i64) << shift).rem_euclid(PERIOD))
                .collect(),
        )
    }

    fn theta(&self) -> Vec<f64> {
        let unit = PI / (1u64 << ANGLE_BITS) as f64;
        self.0.iter().map(|&k| k as f64 * unit).collect()
    }

    /// `cos(x·θ)` rounded to a dyadic rational. The phase is reduced as an
    /// integer first, so `0`, `±1` come out exact.
    fn coefficient(&self, x: &Element) -> Rational {
        let phase = x
            .coords()
            .iter()
            .zip(&self.0)
            .map(|(&c, &k)| (c.rem_euclid(PERIOD) * k).rem_euclid(PERIOD))
            .sum::<i64>()
            .rem_euclid(PERIOD);
        let c = (phase as f64 * PI / (1u64 << ANGLE_BITS) as f64).cos();
        let scale = (1u64 << COEFF_BITS) as f64;
        Rational::new(BigInt::from((c * scale).round() as i64), BigInt::from(1u64 << COEFF_BITS))
    }
}

/// Certified lower bound `b ≤ min_θ f̂(θ)` for an even `f` on `Z^d`.
///
/// `d = 1`: `b` is rational and checked exactly with Sturm sequences.
/// `d = 2`: the float torus bound, rounded down.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralLowerBound {
    pub bound: Rational,
    pub exact: bool,
    pub resolution: usize,
    pub grid_min: f64,
    pub argmin: Vec<f64>,
}

/// [`SpectralLowerBound`] at the finest resolution used by the searches.
pub fn spectral_lower_bound(f: &GroupFunction<Rational>) -> Result<SpectralLowerBound> {
    let cap = max_resolution(f.group().rank())?;
    spectral_check(f, cap)
}

fn max_resolution(d: usize) -> Result<usize> {
    match d {
        1 => Ok(MAX_RESOLUTION_1D),
        2 => Ok(MAX_RESOLUTION_2D),
        r => Err(Error::UnsupportedRank(r)),
    }
}

fn spectral_check(f: &GroupFunction<Rational>, resolution: usize) -> Result<SpectralLowerBound> {
    let d = f.group().rank();
    let trig = TrigPolynomial::from_function(f)?;
    let t = trig.certified_min(resolution)?;
    let mut out = SpectralLowerBound {
        bound: Rational::zero(),
        exact: d == 1,
        resolution,
        grid_min: t.grid_min,
        argmin: t.argmin,
    };
    match d {
        1 => {
            let poly = cosine_poly(f);
            if poly.nonnegative_on_unit_interval() {
                return Ok(out);
            }
            let mut slack = 1e-15_f64.max(t.bound.abs() * 1e-12);
            loop {
                let cand = float_floor(t.bound - slack);
                if poly.sub(&Poly::constant(cand.clone())).nonnegative_on_unit_interval() {
                    out.bound = cand;
                    return Ok(out);
                }
                slack *= 16.0;
            }
        }
        2 => {
            out.bound = float_floor(t.bound - 1e-12);
            Ok(out)
        }
        r => Err(Error::UnsupportedRank(r)),
    }
}

/// Resolution of round `k` (from 0): doubling from [`START_RESOLUTION`].
fn round_resolution(d: usize, k: usize) -> Result<usize> {
    let cap = max_resolution(d)?;
    Ok(START_RESOLUTION.checked_shl(k as u32).unwrap_or(cap).min(cap))
}

/// What the cutting-plane loop does after checking the current LP point.
enum Step {
    Done,
    Refine,
    Cut(CutAngle),
}

/// `f̂(θ) = Σ f(x) cos(x·θ)` in floating point.
fn transform_at(f: &GroupFunction<Rational>, theta: &[f64]) -> f64 {
    f.iter()
        .map(|(x, v)| {
            let phase: f64 = x.coords().iter().zip(theta).map(|(&k, t)| k as f64 * t).sum();
            Scalar::to_f64(v) * phase.cos()
        })
        .sum()
}

/// The coarsest dyadic angle near `theta` where `f̂` is still clearly
/// negative.
fn cut_angle(f: &GroupFunction<Rational>, theta: &[f64], grid_min: f64) -> CutAngle {
    for bits in 3..ANGLE_BITS {
        let angle = CutAngle::snap(theta, bits);
        if transform_at(f, &angle.theta()) < grid_min / 2.0 {
            return angle;
        }
    }
    CutAngle::snap(theta, ANGLE_BITS)
}

fn next_step(
    f: &GroupFunction<Rational>,
    check: &SpectralLowerBound,
    cuts: &[CutAngle],
    cap: usize,
    rounds: usize,
) -> Step {
    if !check.bound.is_negative() || rounds >= MAX_ROUNDS {
        return Step::Done;
    }
    if check.grid_min >= -CUT_TOLERANCE {
        return if check.resolution >= cap { Step::Done } else { Step::Refine };
    }
    let angle = cut_angle(f, &check.argmin, check.grid_min);
    if cuts.contains(&angle) {
        Step::Done
    } else {
        Step::Cut(angle)
    }
}

/// Shift making a certified lower bound `b < 0` nonnegative; the float
/// route in two dimensions gets extra room for rounding.
fn shift_for(check: &SpectralLowerBound) -> Rational {
    let c = -check.bound.clone();
    if check.exact {
        c
    } else {
        c + Rational::new(BigInt::from(1), BigInt::from(1u64 << 30))
    }
}

/// A rational `≤ x` with denominator `2^40`.
fn float_floor(x: f64) -> Rational {
    let scale = (1u64 << 40) as f64;
    Rational::new(BigInt::from((x * scale).floor() as i64), BigInt::from(1u64 << 40))
}

fn window_group(d: usize, radius: u64) -> Result<GroupSpec> {
    if d == 0 || d > 2 {
        return Err(Error::UnsupportedRank(d));
    }
    GroupSpec::free(d, radius)
}

/// Half of the window `[−r, r]^d` up to inversion: orbit representatives.
fn window_orbits(g: &GroupSpec, r: u64) -> Vec<(Element, usize)> {
    let mut out = Vec::new();
    for x in box_elements(&vec![(-(r as i64), r as i64); g.rank()]) {
        let nx = g.neg(&x);
        if x < nx {
            continue;
        }
        out.push((x.clone(), if x == nx { 1 } else { 2 }));
    }
    out
}

fn check_omega(g: &GroupSpec, omega: &Region) -> Result<Region> {
    if omega.complement {
        return Err(Error::InvalidParameter("Omega must be finite".into()));
    }
    for x in &omega.members {
        g.check(x)?;
    }
    let sym = omega.symmetrized(g);
    if !sym.contains(&g.zero()) {
        return Err(Error::ZeroNotInOmega);
    }
    Ok(sym)
}

#[derive(Debug, Clone)]
pub struct ZdLowerBound {
    pub m: u64,
    pub value: Rational,
    pub witness: GroupFunction<Rational>,
    /// Certified lower bound of `f̂` (nonnegative).
    pub margin: Rational,
    pub exact: bool,
    pub rounds: usize,
    /// Whether `f` was renormalised as `(f + cδ_0)/(1 + c)`.
    pub shifted: bool,
}

/// Maximises `Σ f` over even `f` on `[−m, m]^d` with `f(0) = 1`, `f ≤ 0`
/// off `Ω`, and `f̂ ≥ 0` on the torus.
pub fn primal_lower_bound(d: usize, omega: &Region, m: u64) -> Result<ZdLowerBound> {
    let g = window_group(d, m.max(1))?;
    let omega = check_omega(&g, omega)?;
    let orbits = window_orbits(&g, m);
    let zero = g.zero();
    let mut lp = LPProblem::<Rational>::new(Sense::Maximize);
    let mut vars = Vec::new();
    for (x, size) in &orbits {
        if *x == zero {
            continue;
        }
        let v = lp.add_var(format!("f[{x}]"), VarBound::Free);
        lp.set_objective(v, q(*size as i64));
        // PD with f(0) = 1 forces |f| ≤ 1
        lp.add_constraint(format!("upper[{x}]"), vec![(v, q(1))], Relation::Le, q(1));
        lp.add_constraint(format!("lower[{x}]"), vec![(v, q(1))], Relation::Ge, q(-1));
        if !omega.contains(x) {
            lp.add_constraint(format!("sign[{x}]"), vec![(v, q(1))], Relation::Le, q(0));
        }
        vars.push((x.clone(), *size, v));
    }
    let add_cut = |lp: &mut LPProblem<Rational>, angle: &CutAngle| {
        // 1 + Σ_O |O| f_O cos(x·θ) ≥ 0
        let coeffs: Vec<(usize, Rational)> = vars
            .iter()
            .map(|(x, size, v)| (*v, q(*size as i64) * angle.coefficient(x)))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        lp.add_constraint("cut", coeffs, Relation::Ge, q(-1));
    };
    let mut cuts = initial_angles(d);
    for angle in &cuts {
        add_cut(&mut lp, angle);
    }
    let build = |point: &[Rational]| {
        let mut f = GroupFunction::delta(&g, &zero);
        for (x, _, v) in &vars {
            f.set(x, point[*v].clone());
            f.set(&g.neg(x), point[*v].clone());
        }
        f
    };
    let cap = max_resolution(d)?;
    let mut rounds = 0;
    let mut refinements = 0;
    let mut f = GroupFunction::delta(&g, &zero);
    let mut resolve = true;
    loop {
        if resolve {
            rounds += 1;
            let sol = lp.solve()?;
            if sol.status != LpStatus::Optimal {
                return Err(Error::NumericFailure(format!("window LP {}", sol.status)));
            }
            f = build(&sol.point);
        }
        let check = spectral_check(&f, round_resolution(d, refinements)?)?;
        let step = if vars.is_empty() { Step::Done } else { next_step(&f, &check, &cuts, cap, rounds) };
        match step {
            Step::Refine => {
                refinements += 1;
                resolve = false;
            }
            Step::Cut(angle) => {
                add_cut(&mut lp, &angle);
                cuts.push(angle);
                refinements += 1;
                resolve = true;
            }
            Step::Done => {
                let last = spectral_check(&f, cap)?;
                let (witness, margin, shifted) = if !last.bound.is_negative() {
                    (f, last.bound, false)
                } else {
                    let c = shift_for(&last);
                    let shifted = f
                        .plus(&GroupFunction::scaled_delta(&g, &zero, c.clone()))
                        .scale(&(Rational::one() / (Rational::one() + c)));
                    let margin = spectral_check(&shifted, cap)?.bound;
                    (shifted, margin, true)
                };
                return Ok(ZdLowerBound {
                    m,
                    value: witness.sum(),
                    witness,
                    margin,
                    exact: last.exact,
                    rounds,
                    shifted,
                });
            }
        }
    }
}

fn initial_angles(d: usize) -> Vec<CutAngle> {
    let steps = if d == 1 { 8 } else { 4 };
    box_elements(&vec![(0, steps); d])
        .into_iter()
        .map(|p| {
            let theta: Vec<f64> = p.coords().iter().map(|&j| PI * j as f64 / steps as f64).collect();
            CutAngle::snap(&theta, ANGLE_BITS)
        })
        .collect()
}

/// Exact check of a lower-bound witness.
#[derive(Debug, Clone, PartialEq)]
pub struct LowerWitnessVerdict {
    pub valid: bool,
    pub value: Rational,
    pub margin: Rational,
    pub failures: Vec<String>,
}

pub fn verify_lower_witness(omega: &Region, f: &GroupFunction<Rational>) -> Result<LowerWitnessVerdict> {
    let g = f.group();
    let mut failures = Vec::new();
    if f.get(&g.zero()) != Rational::one() {
        failures.push("f(0) = 1".to_string());
    }
    if let Some(x) = f.evenness_defect() {
        failures.push(format!("f even at {x}"));
    }
    for (x, v) in f.iter() {
        if !omega.contains(x) && v.is_positive() {
            failures.push(format!("f <= 0 off Omega at {x}"));
        }
    }
    let lb = spectral_lower_bound(f)?;
    if lb.bound.is_negative() {
        failures.push(format!("transform lower bound {}", lb.bound));
    }
    Ok(LowerWitnessVerdict {
        valid: failures.is_empty(),
        value: f.sum(),
        margin: lb.bound,
        failures,
    })
}

/// Dual certificate on `Z^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZdCertificate {
    pub d: usize,
    pub n: u64,
    pub s: Rational,
    pub nu_fin: GroupFunction<Rational>,
    /// `(θ/π ∈ {0,1}^d, a_θ)`.
    pub characters: Vec<(Vec<u8>, Rational)>,
    /// `κ` on the window; off the window it is `1 + Σ a_θ χ_θ`.
    pub kappa: GroupFunction<Rational>,
}

fn character(theta: &[u8], x: &Element) -> i64 {
    let odd: i64 = theta
        .iter()
        .zip(x.coords())
        .map(|(&t, &c)| if t == 1 { c.rem_euclid(2) } else { 0 })
        .sum();
    if odd % 2 == 0 {
        1
    } else {
        -1
    }
}

impl ZdCertificate {
    pub fn nu_at(&self, x: &Element) -> Rational {
        self.characters.iter().fold(self.nu_fin.get(x), |acc, (t, a)| {
            acc + a.clone() * q(character(t, x))
        })
    }

    pub fn kappa_at(&self, x: &Element) -> Rational {
        if x.linf_norm() <= self.n {
            self.kappa.get(x)
        } else {
            Rational::one() + self.characters.iter().fold(Rational::zero(), |acc, (t, a)| acc + a.clone() * q(character(t, x)))
        }
    }

    pub fn upper_bound(&self) -> Rational {
        -self.s.clone()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "d": self.d,
            "n": self.n,
            "s": self.s.to_text(),
            "nu_finite": crate::io::function_to_json(&self.nu_fin),
            "characters": self.characters.iter().map(|(t, a)| json!({"theta_over_pi": t, "weight": a.to_text()})).collect::<Vec<_>>(),
            "kappa_window": crate::io::function_to_json(&self.kappa),
            "kappa_off_window": "1 + sum of weighted characters",
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |m: &str| Error::Parse(format!("zd certificate: {m}"));
        let d = v.get("d").and_then(Value::as_u64).ok_or_else(|| bad("missing d"))? as usize;
        let n = v.get("n").and_then(Value::as_u64).ok_or_else(|| bad("missing n"))?;
        let g = window_group(d, n.max(1))?;
        let s = crate::io::parse_scalar(v.get("s").ok_or_else(|| bad("missing s"))?)?;
        let nu_fin = crate::io::parse_function(&g, v.get("nu_finite").ok_or_else(|| bad("missing nu_finite"))?)?;
        let kappa = crate::io::parse_function(&g, v.get("kappa_window").ok_or_else(|| bad("missing kappa_window"))?)?;
        let mut characters = Vec::new();
        for c in v.get("characters").and_then(Value::as_array).ok_or_else(|| bad("missing characters"))? {
            let theta: Vec<u8> = c
                .get("theta_over_pi")
                .and_then(Value::as_array)
                .ok_or_else(|| bad("theta_over_pi"))?
                .iter()
                .map(|t| match t.as_u64() {
                    Some(b @ (0 | 1)) => Ok(b as u8),
                    _ => Err(bad("theta_over_pi entries must be 0 or 1")),
                })
                .collect::<Result<_>>()?;
            if theta.len() != d {
                return Err(bad("theta_over_pi has the wrong length"));
            }
            characters.push((theta, crate::io::parse_scalar(c.get("weight").ok_or_else(|| bad("weight"))?)?));
        }
        Ok(ZdCertificate { d, n, s, nu_fin, characters, kappa })
    }
}

#[derive(Debug, Clone)]
pub struct ZdUpperBound {
    pub n: u64,
    /// `+∞` when no certificate exists at this degree.
    pub value: Extended<Rational>,
    pub certificate: Option<ZdCertificate>,
    pub margin: Option<Rational>,
    pub exact: bool,
    pub rounds: usize,
}

/// Searches `max s` with `−λ − sδ_0 = ν − κ` on all of `Z^d`.
pub fn dual_upper_bound(d: usize, omega: &Region, n: u64) -> Result<ZdUpperBound> {
    let g = window_group(d, n.max(1))?;
    let omega = check_omega(&g, omega)?;
    let orbits = window_orbits(&g, n);
    let zero = g.zero();
    let thetas: Vec<Vec<u8>> = box_elements(&vec![(0, 1); d])
        .into_iter()
        .map(|p| p.coords().iter().map(|&c| c as u8).collect())
        .collect();
    let mut lp = LPProblem::<Rational>::new(Sense::Maximize);
    let s = lp.add_var("s", VarBound::Free);
    lp.set_objective(s, q(1));
    let a: Vec<usize> = thetas
        .iter()
        .map(|t| lp.add_var(format!("a{t:?}"), VarBound::NonNegative))
        .collect();
    let nu: Vec<usize> = orbits
        .iter()
        .map(|(x, _)| lp.add_var(format!("nu[{x}]"), VarBound::Free))
        .collect();
    let mut kappa = Vec::new();
    let nu0 = nu[orbits.iter().position(|(x, _)| *x == zero).unwrap()];
    for (i, (x, _)) in orbits.iter().enumerate() {
        // −1 − s[x=0] = ν_fin(x) + Σ a χ(x) − κ(x)
        let mut coeffs: Vec<(usize, Rational)> = vec![(nu[i], q(1))];
        for (j, t) in thetas.iter().enumerate() {
            coeffs.push((a[j], q(character(t, x))));
        }
        if *x == zero {
            coeffs.push((s, q(1)));
        }
        if !omega.contains(x) {
            let k = lp.add_var(format!("kappa[{x}]"), VarBound::NonNegative);
            coeffs.push((k, q(-1)));
            kappa.push((x.clone(), k));
        }
        lp.add_constraint(format!("identity[{x}]"), coeffs, Relation::Eq, q(-1));
        if *x != zero {
            // |ν_fin(x)| ≤ ν_fin(0)
            lp.add_constraint("bound+", vec![(nu0, q(1)), (nu[i], q(-1))], Relation::Ge, q(0));
            lp.add_constraint("bound-", vec![(nu0, q(1)), (nu[i], q(1))], Relation::Ge, q(0));
        }
    }
    // off the window: κ = 1 + Σ a χ ≥ 0 per parity class, = 0 on Ω
    for p in box_elements(&vec![(0, 1); d]) {
        let coeffs = thetas.iter().enumerate().map(|(j, t)| (a[j], q(character(t, &p)))).collect();
        lp.add_constraint(format!("parity{p}"), coeffs, Relation::Ge, q(-1));
    }
    for x in &omega.members {
        if x.linf_norm() > n {
            let coeffs = thetas.iter().enumerate().map(|(j, t)| (a[j], q(character(t, x)))).collect();
            lp.add_constraint(format!("omega[{x}]"), coeffs, Relation::Eq, q(-1));
        }
    }
    let add_cut = |lp: &mut LPProblem<Rational>, angle: &CutAngle| {
        let coeffs: Vec<(usize, Rational)> = orbits
            .iter()
            .zip(&nu)
            .map(|((x, size), v)| (*v, q(*size as i64) * angle.coefficient(x)))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        lp.add_constraint("cut", coeffs, Relation::Ge, q(0));
    };
    let mut cuts = initial_angles(d);
    for angle in &cuts {
        add_cut(&mut lp, angle);
    }
    let cap = max_resolution(d)?;
    let mut rounds = 0;
    let mut refinements = 0;
    loop {
        rounds += 1;
        let sol = lp.solve()?;
        match sol.status {
            LpStatus::Optimal => {}
            LpStatus::Infeasible => {
                return Ok(ZdUpperBound {
                    n,
                    value: Extended::PlusInfinity,
                    certificate: None,
                    margin: None,
                    exact: true,
                    rounds,
                })
            }
            LpStatus::Unbounded => return Err(Error::NumericFailure("dual LP unbounded".into())),
        }
        let p = &sol.point;
        let mut nu_fin = GroupFunction::zero(&g);
        for ((x, _), v) in orbits.iter().zip(&nu) {
            nu_fin.set(x, p[*v].clone());
            nu_fin.set(&g.neg(x), p[*v].clone());
        }
        let mut step;
        loop {
            let check = spectral_check(&nu_fin, round_resolution(d, refinements)?)?;
            step = next_step(&nu_fin, &check, &cuts, cap, rounds);
            if !matches!(step, Step::Refine) {
                break;
            }
            refinements += 1;
        }
        if let Step::Cut(angle) = step {
            add_cut(&mut lp, &angle);
            cuts.push(angle);
            refinements += 1;
            continue;
        }
        let last = spectral_check(&nu_fin, cap)?;
        let mut s_val = p[s].clone();
        if last.bound.is_negative() {
            // ν_fin + cδ_0 and s − c keep the identity at 0
            let c = shift_for(&last);
            nu_fin.add_at(&zero, c.clone());
            s_val = s_val - c;
        }
        let mut kappa_fn = GroupFunction::zero(&g);
        for (x, k) in &kappa {
            kappa_fn.set(x, p[*k].clone());
            kappa_fn.set(&g.neg(x), p[*k].clone());
        }
        let cert = ZdCertificate {
            d,
            n,
            s: s_val,
            nu_fin: nu_fin.clone(),
            characters: thetas
                .iter()
                .zip(&a)
                .filter(|(_, v)| !p[**v].is_zero())
                .map(|(t, v)| (t.clone(), p[*v].clone()))
                .collect(),
            kappa: kappa_fn,
        };
        let margin = spectral_check(&nu_fin, cap)?.bound;
        return Ok(ZdUpperBound {
            n,
            value: Extended::Finite(cert.upper_bound()),
            certificate: Some(cert),
            margin: Some(margin),
            exact: last.exact,
            rounds,
        });
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZdCertificateVerdict {
    pub valid: bool,
    pub failures: Vec<String>,
    pub margin: Rational,
}

/// Independent recheck: the identity at every window point, `κ ≥ 0` with
/// `κ = 0` on `Ω` (window and off-window), `a_θ ≥ 0` and `ν̂_fin ≥ 0`.
pub fn verify_zd_certificate(omega: &Region, cert: &ZdCertificate) -> Result<ZdCertificateVerdict> {
    let g = cert.nu_fin.group().clone();
    let zero = g.zero();
    let mut failures = Vec::new();
    for x in box_elements(&vec![(-(cert.n as i64), cert.n as i64); cert.d]) {
        let lhs = q(-1) - if x == zero { cert.s.clone() } else { Rational::zero() };
        let rhs = cert.nu_at(&x) - cert.kappa_at(&x);
        if lhs != rhs {
            failures.push(format!("identity fails at {x}"));
        }
        let k = cert.kappa_at(&x);
        if k.is_negative() {
            failures.push(format!("kappa negative at {x}"));
        }
        if !k.is_zero() && omega.contains(&x) {
            failures.push(format!("kappa nonzero on Omega at {x}"));
        }
    }
    for (x, _) in cert.nu_fin.iter() {
        if x.linf_norm() > cert.n {
            failures.push(format!("nu_fin leaves the window at {x}"));
        }
    }
    for x in cert.kappa.support() {
        if x.linf_norm() > cert.n {
            failures.push(format!("kappa window part leaves the window at {x}"));
        }
    }
    for p in box_elements(&vec![(0, 1); cert.d]) {
        // a representative of the parity class off the window
        let far = Element::new(p.coords().iter().map(|&c| 2 * cert.n as i64 + 2 + c).collect());
        if cert.kappa_at(&far).is_negative() {
            failures.push(format!("off-window kappa negative on parity class {p}"));
        }
    }
    for x in &omega.members {
        if x.linf_norm() > cert.n && !cert.kappa_at(x).is_zero() {
            failures.push(format!("off-window kappa nonzero on Omega at {x}"));
        }
    }
    for (t, a) in &cert.characters {
        if a.is_negative() {
            failures.push(format!("character weight negative at {t:?}"));
        }
    }
    if let Some(x) = cert.nu_fin.evenness_defect() {
        failures.push(format!("nu_fin not even at {x}"));
    }
    let lb = spectral_lower_bound(&cert.nu_fin)?;
    if lb.bound.is_negative() {
        failures.push(format!("nu_fin transform lower bound {}", lb.bound));
    }
    Ok(ZdCertificateVerdict {
        valid: failures.is_empty(),
        failures,
        margin: lb.bound,
    })
}

#[derive(Debug, Clone)]
pub struct SandwichRow {
    pub m: u64,
    pub n: u64,
    /// Running best lower bound.
    pub lower: Rational,
    /// Running best upper bound.
    pub upper: Extended<Rational>,
    pub lower_margin: Rational,
    pub upper_margin: Option<Rational>,
    pub lower_witness: GroupFunction<Rational>,
    pub upper_certificate: Option<ZdCertificate>,
}

impl SandwichRow {
    pub fn gap(&self) -> Extended<Rational> {
        match &self.upper {
            Extended::Finite(u) => Extended::Finite(u.clone() - self.lower.clone()),
            other => other.clone(),
        }
    }

    pub fn closed(&self) -> bool {
        matches!(self.gap(), Extended::Finite(g) if g.is_zero())
    }
}

pub fn default_schedule() -> Vec<(u64, u64)> {
    vec![(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (6, 7), (8, 9)]
}

/// Runs the schedule, keeping the best bounds seen so far, and stops once
/// the gap is zero or at most `tolerance`.
pub fn sandwich(d: usize, omega: &Region, schedule: &[(u64, u64)], tolerance: Option<f64>) -> Result<Vec<SandwichRow>> {
    let mut rows: Vec<SandwichRow> = Vec::new();
    let mut best_lower: Option<ZdLowerBound> = None;
    let mut best_upper: Option<ZdUpperBound> = None;
    let mut lower_cache: BTreeMap<u64, ZdLowerBound> = BTreeMap::new();
    for &(m, n) in schedule {
        let lo = match lower_cache.get(&m) {
            Some(l) => l.clone(),
            None => {
                let l = primal_lower_bound(d, omega, m)?;
                lower_cache.insert(m, l.clone());
                l
            }
        };
        if best_lower.as_ref().map_or(true, |b| lo.value > b.value) {
            best_lower = Some(lo);
        }
        let up = dual_upper_bound(d, omega, n)?;
        let better = match (&best_upper, &up.value) {
            (None, _) => true,
            (Some(b), Extended::Finite(v)) => match &b.value {
                Extended::Finite(bv) => v < bv,
                _ => true,
            },
            _ => false,
        };
        if better {
            best_upper = Some(up);
        }
        let bl = best_lower.as_ref().unwrap();
        let bu = best_upper.as_ref().unwrap();
        let row = SandwichRow {
            m,
            n,
            lower: bl.value.clone(),
            upper: bu.value.clone(),
            lower_margin: bl.margin.clone(),
            upper_margin: bu.margin.clone(),
            lower_witness: bl.witness.clone(),
            upper_certificate: bu.certificate.clone(),
        };
        let stop = row.closed()
            || matches!((row.gap(), tolerance), (Extended::Finite(gap), Some(t)) if Scalar::to_f64(&gap) <= t);
        rows.push(row);
        if stop {
            break;
        }
    }
    Ok(rows)
}

/// Rows with their witnesses, in the form `verify` reads back.
pub fn sandwich_to_json(d: usize, omega: &Region, rows: &[SandwichRow]) -> Value {
    json!({
        "kind": "zd_sandwich",
        "d": d,
        "omega": crate::io::region_to_json(omega),
        "rows": rows.iter().map(|r| json!({
            "m": r.m,
            "n": r.n,
            "lower": r.lower.to_text(),
            "upper": r.upper.to_text(),
            "gap": r.gap().to_text(),
            "lower_witness": crate::io::function_to_json(&r.lower_witness),
            "upper_certificate": r.upper_certificate.as_ref().map(ZdCertificate::to_json),
        })).collect::<Vec<_>>(),
    })
}

/// Rechecks every row of a [`sandwich_to_json`] file.
pub fn verify_sandwich_json(v: &Value) -> Result<Vec<String>> {
    let bad = |m: &str| Error::Parse(format!("sandwich file: {m}"));
    let d = v.get("d").and_then(Value::as_u64).ok_or_else(|| bad("missing d"))? as usize;
    let rows = v.get("rows").and_then(Value::as_array).ok_or_else(|| bad("missing rows"))?;
    let probe = window_group(d, 1)?;
    let omega = crate::io::parse_region(&probe, v.get("omega").ok_or_else(|| bad("missing omega"))?)?;
    let mut failures = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        let m = row.get("m").and_then(Value::as_u64).ok_or_else(|| bad("row m"))?;
        let g = window_group(d, m.max(1))?;
        let lower: Rational = crate::io::parse_scalar(row.get("lower").ok_or_else(|| bad("row lower"))?)?;
        let f = crate::io::parse_function(&g, row.get("lower_witness").ok_or_else(|| bad("row lower_witness"))?)?;
        let lv = verify_lower_witness(&omega, &f)?;
        if !lv.valid {
            failures.extend(lv.failures.iter().map(|e| format!("row {i} lower: {e}")));
        } else if lv.value < lower {
            failures.push(format!("row {i} lower: witness gives {} below claimed {}", lv.value.to_text(), lower.to_text()));
        }
        match row.get("upper_certificate").filter(|c| !c.is_null()) {
            Some(c) => {
                let cert = ZdCertificate::from_json(c)?;
                let cv = verify_zd_certificate(&omega, &cert)?;
                if !cv.valid {
                    failures.extend(cv.failures.iter().map(|e| format!("row {i} upper: {e}")));
                }
                let claimed = row.get("upper").and_then(Value::as_str).unwrap_or("inf");
                if claimed != "inf" {
                    let up: Rational = crate::io::parse_scalar(&Value::String(claimed.into()))?;
                    if cert.upper_bound() > up {
                        failures.push(format!("row {i} upper: certificate gives {} above claimed {}", cert.upper_bound().to_text(), up.to_text()));
                    }
                    if up < lower {
                        failures.push(format!("row {i}: upper below lower"));
                    }
                }
            }
            None => {
                if row.get("upper").and_then(Value::as_str) != Some("inf") {
                    failures.push(format!("row {i} upper: finite bound without certificate"));
                }
            }
        }
    }
    Ok(failures)
}

pub const CSV_HEADER: &str = "m,n,lower,upper,gap,lower_margin,upper_margin";

pub fn sandwich_csv(rows: &[SandwichRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.m,
            r.n,
            r.lower.to_text(),
            r.upper.to_text(),
            r.gap().to_text(),
            r.lower_margin.to_text(),
            r.upper_margin.as_ref().map(|m| m.to_text()).unwrap_or_default()
        ));
    }
    out
}
