//! The generalized Delsarte problem on a finite group and its dual.
//!
//! Both programs are posed on inversion orbits. The primal variables are the
//! transform values `ĝ(y) ≥ 0` of an even positive definite `f`, one per
//! dual orbit, so that
//!
//! ```text
//! f(x) = (1/|G|) Σ_O ĝ_O C[x][O],   C[x][O] = Σ_{y∈O} cos(2π⟨x,y⟩).
//! ```
//!
//! The primal minimises `⟨f,ρ_e⟩` subject to `⟨f,σ_e⟩ = 1`, `f ≤ 0` on
//! orbits leaving `Ω₊` and `f ≥ 0` on orbits leaving `Ω₋`. The dual
//! maximises `s` subject to `ρ_e − sσ_e = ν − κ⁺ + κ⁻` pointwise, with
//! `κ^± ≥ 0` on the respective complements and `ν̂ ≥ 0`.

use std::fmt;

use crate::error::{Error, Result};
use crate::function::GroupFunction;
use crate::functionals::{pair, MeasureFunctional};
use crate::group::{Element, GroupSpec, Orbit, Region};
use crate::lp::{LPProblem, LPSolution, LpStatus, Relation, Sense, VarBound};
use crate::scalar::{Mode, Scalar, FLOAT_GAP_TOL};
use crate::spectral::{self, CharacterTable};

/// A value in the extended reals, for infeasible or unbounded programs.
#[derive(Debug, Clone, PartialEq)]
pub enum Extended<S> {
    Finite(S),
    PlusInfinity,
    MinusInfinity,
}

impl<S: Scalar> Extended<S> {
    pub fn finite(&self) -> Option<&S> {
        match self {
            Extended::Finite(v) => Some(v),
            _ => None,
        }
    }

    pub fn to_text(&self) -> String {
        match self {
            Extended::Finite(v) => v.to_text(),
            Extended::PlusInfinity => "inf".into(),
            Extended::MinusInfinity => "-inf".into(),
        }
    }
}

impl<S: Scalar> fmt::Display for Extended<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// `(G, Ω₊, Ω₋, ρ, σ)`. `Ω₋ = None` means the one-sided problem.
#[derive(Debug, Clone, PartialEq)]
pub struct DelsarteInstance<S: Scalar> {
    pub group: GroupSpec,
    pub omega: Region,
    pub omega_minus: Option<Region>,
    pub rho: MeasureFunctional<S>,
    pub sigma: MeasureFunctional<S>,
}

impl<S: Scalar> DelsarteInstance<S> {
    pub fn new(
        group: GroupSpec,
        omega: Region,
        omega_minus: Option<Region>,
        rho: MeasureFunctional<S>,
        sigma: MeasureFunctional<S>,
    ) -> Result<Self> {
        if !group.is_finite() {
            return Err(Error::NeedFiniteGroup);
        }
        let omega = omega.normalized(&group)?;
        let omega_minus = omega_minus.map(|r| r.normalized(&group)).transpose()?;
        Ok(DelsarteInstance {
            group,
            omega,
            omega_minus,
            rho,
            sigma,
        })
    }

    /// `ρ = −λ`, `σ = δ_0`: the Delsarte constant is `−α`.
    pub fn standard(group: GroupSpec, omega: Region) -> Result<Self> {
        let rho = MeasureFunctional::haar(&group).scale(&-S::one());
        let sigma = MeasureFunctional::delta(&group, &group.zero());
        Self::new(group, omega, None, rho, sigma)
    }

    /// Deterministic fingerprint used to match primal and dual outcomes.
    pub fn tag(&self) -> String {
        let func = |m: &MeasureFunctional<S>| {
            let f = m.to_function().expect("finite group");
            f.iter()
                .map(|(x, v)| format!("{x}:{}", v.to_text()))
                .collect::<Vec<_>>()
                .join(",")
        };
        let region = |r: &Region| {
            let mut m: Vec<String> = r.materialize(&self.group).iter().map(|x| x.to_string()).collect();
            m.sort();
            m.join(",")
        };
        format!(
            "{}|{}|{}|{}|{}|{}",
            self.group,
            S::MODE,
            region(&self.omega),
            self.omega_minus.as_ref().map(region).unwrap_or_else(|| "*".into()),
            func(&self.rho),
            func(&self.sigma)
        )
    }

    fn in_omega_minus(&self, x: &Element) -> bool {
        self.omega_minus.as_ref().map_or(true, |r| r.contains(x))
    }
}

/// Shared orbit data for both programs.
struct Reduction<S: Scalar> {
    n: usize,
    orbits: Vec<Orbit>,
    /// `c[i][j] = C[rep_i][O_j]`, rows are x-orbits, columns dual orbits.
    c: Vec<Vec<S>>,
    rho_e: Vec<S>,
    sigma_e: Vec<S>,
    /// Transform weights `|O_y| ψ̂(y)/|G|` of ρ_e and σ_e.
    w_rho: Vec<S>,
    w_sigma: Vec<S>,
    plus_rows: Vec<usize>,
    minus_rows: Vec<usize>,
}

fn orbit_values<S: Scalar>(group: &GroupSpec, orbits: &[Orbit], f: &GroupFunction<S>) -> Vec<S> {
    let _ = group;
    orbits.iter().map(|o| f.get(&o.rep)).collect()
}

impl<S: Scalar> Reduction<S> {
    fn new(inst: &DelsarteInstance<S>) -> Result<Self> {
        let group = &inst.group;
        let n = group.order().ok_or(Error::NeedFiniteGroup)?;
        let table = CharacterTable::<S>::new(group)?;
        let sigma_e = inst.sigma.to_function()?.even_odd_split().0;
        let strict = spectral::is_strictly_positive_definite(&sigma_e)?;
        if !strict.holds {
            return Err(Error::NotStrictlyPositiveDefinite(format!(
                "sigma transform minimum {}",
                strict.margin
            )));
        }
        let rho_e = inst.rho.to_function()?.even_odd_split().0;
        let orbits = group.inversion_orbits();
        let idx: Vec<Vec<usize>> = orbits
            .iter()
            .map(|o| o.members.iter().map(|x| group.index_of(x)).collect())
            .collect();
        let c: Vec<Vec<S>> = idx
            .iter()
            .map(|xs| {
                idx.iter()
                    .map(|ys| {
                        ys.iter()
                            .fold(S::zero(), |acc, &y| acc + table.cos(xs[0], y).clone())
                    })
                    .collect()
            })
            .collect();
        let size = |i: usize| S::from_int(orbits[i].size() as i64);
        let nn = S::from_int(n as i64);
        let rho_v = orbit_values(group, &orbits, &rho_e);
        let sigma_v = orbit_values(group, &orbits, &sigma_e);
        // ⟨f,ψ_e⟩ = Σ_x f(x)ψ_e(x) = Σ_O ĝ_O (1/|G|) Σ_{x-orbits} |O_x| ψ_e(x) C[x][O]
        let weight = |vals: &[S], j: usize| {
            (0..orbits.len()).fold(S::zero(), |acc, i| {
                acc + size(i) * vals[i].clone() * c[i][j].clone()
            }) / nn.clone()
        };
        let w_rho = (0..orbits.len()).map(|j| weight(&rho_v, j)).collect();
        let w_sigma = (0..orbits.len()).map(|j| weight(&sigma_v, j)).collect();
        let plus_rows = (0..orbits.len())
            .filter(|&i| orbits[i].members.iter().any(|x| !inst.omega.contains(x)))
            .collect();
        let minus_rows = (0..orbits.len())
            .filter(|&i| orbits[i].members.iter().any(|x| !inst.in_omega_minus(x)))
            .collect();
        Ok(Reduction {
            n,
            orbits,
            c,
            rho_e: rho_v,
            sigma_e: sigma_v,
            w_rho,
            w_sigma,
            plus_rows,
            minus_rows,
        })
    }

    fn nn(&self) -> S {
        S::from_int(self.n as i64)
    }
}

/// The primal program with one variable `ghat[rep]` per dual orbit.
pub fn build_primal<S: Scalar>(inst: &DelsarteInstance<S>) -> Result<LPProblem<S>> {
    Ok(primal_lp(&Reduction::new(inst)?))
}

fn primal_lp<S: Scalar>(red: &Reduction<S>) -> LPProblem<S> {
    let mut lp = LPProblem::new(Sense::Minimize);
    let vars: Vec<usize> = red
        .orbits
        .iter()
        .map(|o| lp.add_var(format!("ghat[{}]", o.rep), VarBound::NonNegative))
        .collect();
    for (j, &v) in vars.iter().enumerate() {
        lp.set_objective(v, red.w_rho[j].clone());
    }
    let row = |i: usize| -> Vec<(usize, S)> {
        vars.iter()
            .enumerate()
            .filter(|(j, _)| !red.c[i][*j].is_zero())
            .map(|(j, &v)| (v, red.c[i][j].clone()))
            .collect()
    };
    for &i in &red.plus_rows {
        lp.add_constraint(format!("nonpositive[{}]", red.orbits[i].rep), row(i), Relation::Le, S::zero());
    }
    for &i in &red.minus_rows {
        lp.add_constraint(format!("nonnegative[{}]", red.orbits[i].rep), row(i), Relation::Ge, S::zero());
    }
    let norm: Vec<(usize, S)> = vars
        .iter()
        .enumerate()
        .filter(|(j, _)| !red.w_sigma[*j].is_zero())
        .map(|(j, &v)| (v, red.w_sigma[j].clone()))
        .collect();
    lp.add_constraint("normalization", norm, Relation::Eq, S::one());
    lp
}

/// The dual program: `s` free, `kappa[rep] ≥ 0` on orbits leaving `Ω₊`,
/// `kappa_minus[rep] ≥ 0` on orbits leaving `Ω₋`, `nuhat[rep] ≥ 0`.
pub fn build_dual<S: Scalar>(inst: &DelsarteInstance<S>) -> Result<LPProblem<S>> {
    Ok(dual_lp(&Reduction::new(inst)?).0)
}

struct DualVars {
    s: usize,
    kappa: Vec<(usize, usize)>,
    kappa_minus: Vec<(usize, usize)>,
    nu: Vec<usize>,
}

fn dual_lp<S: Scalar>(red: &Reduction<S>) -> (LPProblem<S>, DualVars) {
    let mut lp = LPProblem::new(Sense::Maximize);
    let s = lp.add_var("s", VarBound::Free);
    lp.set_objective(s, S::one());
    let kappa: Vec<(usize, usize)> = red
        .plus_rows
        .iter()
        .map(|&i| (i, lp.add_var(format!("kappa[{}]", red.orbits[i].rep), VarBound::NonNegative)))
        .collect();
    let kappa_minus: Vec<(usize, usize)> = red
        .minus_rows
        .iter()
        .map(|&i| (i, lp.add_var(format!("kappa_minus[{}]", red.orbits[i].rep), VarBound::NonNegative)))
        .collect();
    let nu: Vec<usize> = red
        .orbits
        .iter()
        .map(|o| lp.add_var(format!("nuhat[{}]", o.rep), VarBound::NonNegative))
        .collect();
    let nn = red.nn();
    // |G|σ_e(x)s + Σ_O C[x][O]ν̂_O − |G|κ⁺ + |G|κ⁻ = |G|ρ_e(x)
    for i in 0..red.orbits.len() {
        let mut coeffs = Vec::new();
        if !red.sigma_e[i].is_zero() {
            coeffs.push((s, nn.clone() * red.sigma_e[i].clone()));
        }
        for (j, &v) in nu.iter().enumerate() {
            if !red.c[i][j].is_zero() {
                coeffs.push((v, red.c[i][j].clone()));
            }
        }
        if let Some(&(_, v)) = kappa.iter().find(|(r, _)| *r == i) {
            coeffs.push((v, -nn.clone()));
        }
        if let Some(&(_, v)) = kappa_minus.iter().find(|(r, _)| *r == i) {
            coeffs.push((v, nn.clone()));
        }
        lp.add_constraint(
            format!("identity[{}]", red.orbits[i].rep),
            coeffs,
            Relation::Eq,
            nn.clone() * red.rho_e[i].clone(),
        );
    }
    (
        lp,
        DualVars {
            s,
            kappa,
            kappa_minus,
            nu,
        },
    )
}

/// `s` together with `κ ≥ 0` on `Ω^c`, optional `κ⁻ ≥ 0` on `Ω₋^c` and an
/// even `ν` of positive type, with `ρ_e − sσ_e = ν − κ_e + κ⁻_e`.
#[derive(Debug, Clone, PartialEq)]
pub struct DualCertificate<S: Scalar> {
    pub s: S,
    pub kappa: MeasureFunctional<S>,
    pub kappa_minus: Option<MeasureFunctional<S>>,
    pub nu: MeasureFunctional<S>,
    /// `α − s` when the primal value is known.
    pub gap_to_primal: Option<S>,
}

#[derive(Debug, Clone)]
pub struct PrimalOutcome<S: Scalar> {
    pub tag: String,
    pub solution: LPSolution<S>,
    pub alpha: Extended<S>,
    /// Optimal `f`, when the program is feasible.
    pub witness: Option<GroupFunction<S>>,
}

#[derive(Debug, Clone)]
pub struct DualOutcome<S: Scalar> {
    pub tag: String,
    pub solution: LPSolution<S>,
    pub omega: Extended<S>,
    pub certificate: Option<DualCertificate<S>>,
}

/// Spreads an orbit value over the members of the orbit outside `region`:
/// all of them if both are outside, twice the value on the single outside
/// member otherwise. The even part of the result is the orbit value.
fn place_outside<S: Scalar>(f: &mut GroupFunction<S>, orbit: &Orbit, value: &S, region: impl Fn(&Element) -> bool) {
    let outside: Vec<&Element> = orbit.members.iter().filter(|x| !region(x)).collect();
    if outside.len() == orbit.members.len() {
        for x in outside {
            f.set(x, value.clone());
        }
    } else if let Some(x) = outside.first() {
        f.set(x, value.clone() * S::from_int(2));
    }
}

fn expand_even<S: Scalar>(group: &GroupSpec, red: &Reduction<S>, hat: &[S]) -> GroupFunction<S> {
    let mut f = GroupFunction::zero(group);
    let nn = red.nn();
    for (i, o) in red.orbits.iter().enumerate() {
        let v = hat
            .iter()
            .enumerate()
            .fold(S::zero(), |acc, (j, h)| acc + h.clone() * red.c[i][j].clone())
            / nn.clone();
        for x in &o.members {
            f.set(x, v.clone());
        }
    }
    f
}

pub fn solve_primal<S: Scalar>(inst: &DelsarteInstance<S>) -> Result<PrimalOutcome<S>> {
    let red = Reduction::new(inst)?;
    let lp = primal_lp(&red);
    let solution = lp.solve()?;
    let (alpha, witness) = match solution.status {
        LpStatus::Optimal => (
            Extended::Finite(solution.value.clone()),
            Some(expand_even(&inst.group, &red, &solution.point)),
        ),
        LpStatus::Infeasible => (Extended::PlusInfinity, None),
        LpStatus::Unbounded => (Extended::MinusInfinity, None),
    };
    Ok(PrimalOutcome {
        tag: inst.tag(),
        solution,
        alpha,
        witness,
    })
}

pub fn solve_dual<S: Scalar>(inst: &DelsarteInstance<S>) -> Result<DualOutcome<S>> {
    let red = Reduction::new(inst)?;
    let (lp, vars) = dual_lp(&red);
    let solution = lp.solve()?;
    let (omega, certificate) = match solution.status {
        LpStatus::Optimal => {
            let p = &solution.point;
            let mut kappa = GroupFunction::zero(&inst.group);
            for &(i, v) in &vars.kappa {
                place_outside(&mut kappa, &red.orbits[i], &p[v], |x| inst.omega.contains(x));
            }
            let kappa_minus = inst.omega_minus.as_ref().map(|om| {
                let mut k = GroupFunction::zero(&inst.group);
                for &(i, v) in &vars.kappa_minus {
                    place_outside(&mut k, &red.orbits[i], &p[v], |x| om.contains(x));
                }
                MeasureFunctional::from_atoms(k)
            });
            let nu_hat: Vec<S> = vars.nu.iter().map(|&v| p[v].clone()).collect();
            let nu = expand_even(&inst.group, &red, &nu_hat);
            (
                Extended::Finite(p[vars.s].clone()),
                Some(DualCertificate {
                    s: p[vars.s].clone(),
                    kappa: MeasureFunctional::from_atoms(kappa),
                    kappa_minus,
                    nu: MeasureFunctional::from_atoms(nu),
                    gap_to_primal: None,
                }),
            )
        }
        LpStatus::Infeasible => (Extended::MinusInfinity, None),
        LpStatus::Unbounded => (Extended::PlusInfinity, None),
    };
    Ok(DualOutcome {
        tag: inst.tag(),
        solution,
        omega,
        certificate,
    })
}

/// Both optima with a checked gap.
#[derive(Debug, Clone)]
pub struct GapCertificate<S: Scalar> {
    pub tag: String,
    pub mode: Mode,
    pub alpha: S,
    pub omega: S,
    pub gap: S,
    /// Gap zero (exact) or within `1e-6` (float).
    pub certified: bool,
    pub primal_witness: GroupFunction<S>,
    pub dual_certificate: DualCertificate<S>,
}

pub fn certify_no_gap<S: Scalar>(primal: &PrimalOutcome<S>, dual: &DualOutcome<S>) -> Result<GapCertificate<S>> {
    if primal.tag != dual.tag {
        return Err(Error::Mismatch("primal and dual solve different instances".into()));
    }
    let (Extended::Finite(alpha), Extended::Finite(omega)) = (&primal.alpha, &dual.omega) else {
        return Err(Error::NotOptimal(format!(
            "primal {} ({}), dual {} ({})",
            primal.solution.status, primal.alpha, dual.solution.status, dual.omega
        )));
    };
    let gap = alpha.clone() - omega.clone();
    let violated = match S::MODE {
        Mode::Exact => gap < S::zero(),
        Mode::Float => gap.to_f64() < -FLOAT_GAP_TOL,
    };
    if violated {
        return Err(Error::WeakDualityViolated {
            primal: alpha.to_text(),
            dual: omega.to_text(),
        });
    }
    let certified = match S::MODE {
        Mode::Exact => gap.is_zero(),
        Mode::Float => gap.to_f64().abs() <= FLOAT_GAP_TOL,
    };
    let mut cert = dual.certificate.clone().expect("optimal dual carries a certificate");
    cert.gap_to_primal = Some(gap.clone());
    Ok(GapCertificate {
        tag: primal.tag.clone(),
        mode: S::MODE,
        alpha: alpha.clone(),
        omega: omega.clone(),
        gap,
        certified,
        primal_witness: primal.witness.clone().expect("optimal primal carries a witness"),
        dual_certificate: cert,
    })
}

/// Solves both programs.
#[derive(Debug, Clone)]
pub struct DelsarteSolution<S: Scalar> {
    pub primal: PrimalOutcome<S>,
    pub dual: DualOutcome<S>,
}

impl<S: Scalar> DelsarteSolution<S> {
    pub fn certify(&self) -> Result<GapCertificate<S>> {
        certify_no_gap(&self.primal, &self.dual)
    }
}

pub fn solve_instance<S: Scalar>(inst: &DelsarteInstance<S>) -> Result<DelsarteSolution<S>> {
    Ok(DelsarteSolution {
        primal: solve_primal(inst)?,
        dual: solve_dual(inst)?,
    })
}

#[derive(Debug, Clone)]
pub struct DelsarteConstant<S: Scalar> {
    pub value: S,
    pub certificate: GapCertificate<S>,
}

/// `D_G(Ω) = −α` for `ρ = −λ`, `σ = δ_0`.
pub fn delsarte_constant<S: Scalar>(group: &GroupSpec, omega: &Region) -> Result<DelsarteConstant<S>> {
    if !omega.contains(&group.zero()) {
        return Err(Error::ZeroNotInOmega);
    }
    let inst = DelsarteInstance::<S>::standard(group.clone(), omega.clone())?;
    let certificate = solve_instance(&inst)?.certify()?;
    Ok(DelsarteConstant {
        value: -certificate.alpha.clone(),
        certificate,
    })
}

/// One failed membership condition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CertificateFailure {
    KappaNegative(Element),
    KappaOutsideSupport(Element),
    KappaMinusNegative(Element),
    KappaMinusOutsideSupport(Element),
    NuNotEven(Element),
    NuNotPositiveType(String),
    IdentityFails(Element),
    GroupMismatch,
}

impl fmt::Display for CertificateFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CertificateFailure::KappaNegative(x) => write!(f, "kappa >= 0 violated at {x}"),
            CertificateFailure::KappaOutsideSupport(x) => write!(f, "kappa supported in Omega at {x}"),
            CertificateFailure::KappaMinusNegative(x) => write!(f, "kappa_minus >= 0 violated at {x}"),
            CertificateFailure::KappaMinusOutsideSupport(x) => {
                write!(f, "kappa_minus supported in Omega_minus at {x}")
            }
            CertificateFailure::NuNotEven(x) => write!(f, "nu not even at {x}"),
            CertificateFailure::NuNotPositiveType(m) => write!(f, "nu not of positive type ({m})"),
            CertificateFailure::IdentityFails(x) => write!(f, "rho_e - s sigma_e = nu - kappa fails at {x}"),
            CertificateFailure::GroupMismatch => f.write_str("certificate lives on another group"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertificateVerdict {
    pub valid: bool,
    pub failures: Vec<CertificateFailure>,
    pub nu_margin: f64,
}

/// Rechecks a certificate from scratch: signs and supports of `κ^±`,
/// `ν` even with nonnegative transform, and the even-part identity at every
/// point of the group.
pub fn verify_dual_certificate<S: Scalar>(inst: &DelsarteInstance<S>, cert: &DualCertificate<S>) -> Result<CertificateVerdict> {
    let group = &inst.group;
    let mut failures = Vec::new();
    let parts = [Some(&cert.kappa), Some(&cert.nu), cert.kappa_minus.as_ref()];
    if parts.iter().flatten().any(|m| m.group() != group) {
        return Ok(CertificateVerdict {
            valid: false,
            failures: vec![CertificateFailure::GroupMismatch],
            nu_margin: f64::NAN,
        });
    }
    let kappa = cert.kappa.to_function()?;
    for x in group.elements() {
        let v = kappa.get(&x);
        if v.is_negative_tol() {
            failures.push(CertificateFailure::KappaNegative(x.clone()));
        }
        if !v.is_zero_tol() && inst.omega.contains(&x) {
            failures.push(CertificateFailure::KappaOutsideSupport(x));
        }
    }
    let kappa_minus = match &cert.kappa_minus {
        Some(km) => km.to_function()?,
        None => GroupFunction::zero(group),
    };
    for x in group.elements() {
        let v = kappa_minus.get(&x);
        if v.is_negative_tol() {
            failures.push(CertificateFailure::KappaMinusNegative(x.clone()));
        }
        if !v.is_zero_tol() && inst.in_omega_minus(&x) {
            failures.push(CertificateFailure::KappaMinusOutsideSupport(x));
        }
    }
    let nu = cert.nu.to_function()?;
    for x in group.elements() {
        if !(nu.get(&x) - nu.get(&group.neg(&x))).is_zero_tol() {
            failures.push(CertificateFailure::NuNotEven(x));
            break;
        }
    }
    let pd = spectral::is_positive_definite(&nu.even_odd_split().0)?;
    if !pd.holds {
        failures.push(CertificateFailure::NuNotPositiveType(format!(
            "transform minimum {}",
            pd.margin
        )));
    }
    let rho_e = inst.rho.to_function()?.even_odd_split().0;
    let sigma_e = inst.sigma.to_function()?.even_odd_split().0;
    let kappa_e = kappa.even_odd_split().0;
    let kappa_minus_e = kappa_minus.even_odd_split().0;
    for x in group.elements() {
        let lhs = rho_e.get(&x) - cert.s.clone() * sigma_e.get(&x);
        let rhs = nu.get(&x) - kappa_e.get(&x) + kappa_minus_e.get(&x);
        if !(lhs - rhs).is_zero_tol() {
            failures.push(CertificateFailure::IdentityFails(x));
        }
    }
    Ok(CertificateVerdict {
        valid: failures.is_empty(),
        failures,
        nu_margin: pd.margin,
    })
}

/// Primal feasibility of a witness and its objective `⟨f, ρ⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct WitnessVerdict<S: Scalar> {
    pub valid: bool,
    pub value: S,
    pub failures: Vec<String>,
}

pub fn verify_primal_witness<S: Scalar>(inst: &DelsarteInstance<S>, f: &GroupFunction<S>) -> Result<WitnessVerdict<S>> {
    if f.group() != &inst.group {
        return Err(Error::Mismatch("witness lives on another group".into()));
    }
    let mut failures = Vec::new();
    let pd = spectral::is_positive_definite(f)?;
    if !pd.holds {
        failures.push(format!("witness not positive definite (transform minimum {})", pd.margin));
    }
    for x in inst.group.elements() {
        let v = f.get(&x);
        if !inst.omega.contains(&x) && v.is_positive_tol() {
            failures.push(format!("witness positive off Omega at {x}"));
        }
        if !inst.in_omega_minus(&x) && v.is_negative_tol() {
            failures.push(format!("witness negative off Omega_minus at {x}"));
        }
    }
    let norm = pair(f, &inst.sigma);
    if !(norm.clone() - S::one()).is_zero_tol() {
        failures.push(format!("<f, sigma> = {} instead of 1", norm.to_text()));
    }
    Ok(WitnessVerdict {
        valid: failures.is_empty(),
        value: pair(f, &inst.rho),
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn z(n: u64) -> GroupSpec {
        GroupSpec::cyclic(n).unwrap()
    }

    fn e(v: i64) -> Element {
        Element::scalar(v)
    }

    fn dense(g: &GroupSpec, v: &[i64]) -> GroupFunction<Rational> {
        GroupFunction::from_dense(g, &v.iter().map(|&a| q(a, 1)).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn primal_shape_for_z4() {
        let inst = DelsarteInstance::<Rational>::standard(z(4), Region::from_ints(&[0, 1, 3])).unwrap();
        let lp = build_primal(&inst).unwrap();
        assert_eq!(lp.num_vars(), 3);
        assert_eq!(lp.num_constraints(), 2);
        assert_eq!(lp.constraints()[0].name, "nonpositive[2]");
        let full = DelsarteInstance::<Rational>::standard(z(4), Region::everything()).unwrap();
        assert_eq!(build_primal(&full).unwrap().num_constraints(), 1);
    }

    #[test]
    fn constant_sigma_is_rejected() {
        let g = z(4);
        let inst = DelsarteInstance::<Rational>::new(
            g.clone(),
            Region::everything(),
            None,
            MeasureFunctional::haar(&g).scale(&q(-1, 1)),
            MeasureFunctional::haar(&g),
        )
        .unwrap();
        assert!(matches!(build_primal(&inst), Err(Error::NotStrictlyPositiveDefinite(_))));
    }

    #[test]
    fn golden_z4() {
        let g = z(4);
        let inst = DelsarteInstance::<Rational>::standard(g.clone(), Region::from_ints(&[0, 1, 3])).unwrap();
        let sol = solve_instance(&inst).unwrap();
        let cert = sol.certify().unwrap();
        assert_eq!(cert.alpha, q(-2, 1));
        assert_eq!(cert.omega, q(-2, 1));
        assert_eq!(cert.gap, q(0, 1));
        assert!(cert.certified);
        let f = GroupFunction::from_dense(&g, &[q(1, 1), q(1, 2), q(0, 1), q(1, 2)]).unwrap();
        assert_eq!(cert.primal_witness, f);
        let d = &cert.dual_certificate;
        assert_eq!(d.s, q(-2, 1));
        assert_eq!(d.kappa.to_function().unwrap(), GroupFunction::scaled_delta(&g, &e(2), q(2, 1)));
        assert_eq!(d.nu.to_function().unwrap(), dense(&g, &[1, -1, 1, -1]));
        assert!(verify_dual_certificate(&inst, d).unwrap().valid);
    }

    #[test]
    fn boundary_regions() {
        for n in [2u64, 3, 4, 6] {
            let g = z(n);
            let all = delsarte_constant::<Rational>(&g, &Region::everything()).unwrap();
            assert_eq!(all.value, q(n as i64, 1));
            let zero = delsarte_constant::<Rational>(&g, &Region::from_ints(&[0])).unwrap();
            assert_eq!(zero.value, q(1, 1));
        }
        let all = delsarte_constant::<f64>(&z(5), &Region::everything()).unwrap();
        assert!((all.value - 5.0).abs() < 1e-9);
    }

    #[test]
    fn omega_without_zero() {
        let g = z(4);
        assert!(matches!(
            delsarte_constant::<Rational>(&g, &Region::from_ints(&[1, 3])),
            Err(Error::ZeroNotInOmega)
        ));
        let inst = DelsarteInstance::<Rational>::standard(g, Region::from_ints(&[1, 3])).unwrap();
        let sol = solve_instance(&inst).unwrap();
        assert_eq!(sol.primal.alpha, Extended::PlusInfinity);
        assert_eq!(sol.dual.omega, Extended::PlusInfinity);
    }

    #[test]
    fn exact_mode_unavailable() {
        let r = delsarte_constant::<Rational>(&z(5), &Region::everything());
        assert!(matches!(r, Err(Error::ExactUnavailable(5))));
    }

    #[test]
    fn dual_examples() {
        let g = z(4);
        let inst = DelsarteInstance::<Rational>::standard(g.clone(), Region::from_ints(&[0])).unwrap();
        let d = solve_dual(&inst).unwrap();
        assert_eq!(d.omega, Extended::Finite(q(-1, 1)));
        assert!(verify_dual_certificate(&inst, d.certificate.as_ref().unwrap()).unwrap().valid);
        let g6 = z(6);
        let inst = DelsarteInstance::<Rational>::standard(g6, Region::everything()).unwrap();
        let cert = solve_instance(&inst).unwrap().certify().unwrap();
        assert_eq!(cert.alpha, q(-6, 1));
        assert_eq!(cert.omega, q(-6, 1));
    }

    #[test]
    fn verifier_rejects_bad_certificates() {
        let g = z(4);
        let inst = DelsarteInstance::<Rational>::standard(g.clone(), Region::from_ints(&[0, 1, 3])).unwrap();
        let good = solve_dual(&inst).unwrap().certificate.unwrap();
        let mut bad = good.clone();
        bad.kappa = MeasureFunctional::from_atoms(GroupFunction::scaled_delta(&g, &e(2), q(-2, 1)));
        let v = verify_dual_certificate(&inst, &bad).unwrap();
        assert!(!v.valid);
        assert!(v.failures.contains(&CertificateFailure::KappaNegative(e(2))));
        let mut bad = good.clone();
        bad.nu = MeasureFunctional::delta(&g, &e(0)).scale(&q(-1, 1));
        let v = verify_dual_certificate(&inst, &bad).unwrap();
        assert!(v.failures.iter().any(|f| matches!(f, CertificateFailure::NuNotPositiveType(_))));
    }

    #[test]
    fn weak_duality_violation_is_reported() {
        let inst = DelsarteInstance::<Rational>::standard(z(4), Region::from_ints(&[0, 1, 3])).unwrap();
        let sol = solve_instance(&inst).unwrap();
        let mut dual = sol.dual.clone();
        dual.omega = Extended::Finite(q(-1, 1));
        let r = certify_no_gap(&sol.primal, &dual);
        assert!(matches!(r, Err(Error::WeakDualityViolated { .. })));
        let other = DelsarteInstance::<Rational>::standard(z(4), Region::from_ints(&[0])).unwrap();
        let other_dual = solve_dual(&other).unwrap();
        assert!(matches!(certify_no_gap(&sol.primal, &other_dual), Err(Error::Mismatch(_))));
    }

    #[test]
    fn two_sided_reduces_to_one_sided() {
        let g = GroupSpec::finite(&[2, 4]).unwrap();
        let omega = Region::finite(g.elements().into_iter().filter(|x| x.coords()[1] != 2));
        let one = DelsarteInstance::<Rational>::standard(g.clone(), omega.clone()).unwrap();
        let mut two = one.clone();
        two.omega_minus = Some(Region::everything());
        assert_eq!(
            solve_primal(&one).unwrap().alpha,
            solve_primal(&two).unwrap().alpha
        );
        let mut strict = one.clone();
        strict.omega_minus = Some(Region::finite([g.zero()]));
        let cert = solve_instance(&strict).unwrap().certify().unwrap();
        assert!(cert.certified);
        assert!(verify_dual_certificate(&strict, &cert.dual_certificate).unwrap().valid);
    }
}
