//! Translation-bounded functionals on discrete groups, their pairing with
//! functions, the mixed norm `‖·‖_X` and its dual norm `‖·‖_M`, and
//! membership oracles for the dual cones that appear in the duality theory.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::function::GroupFunction;
use crate::group::{Element, GroupSpec, LatticeTiling, Region};
use crate::lp::{LPProblem, LpStatus, Relation, Sense, VarBound};
use crate::scalar::Scalar;
use crate::spectral::{self, CharacterTable, PdVerdict};

/// `ψ = c·λ + Σ a_x δ_x`: a constant multiple of Haar (counting) measure
/// plus finitely many atoms. On a discrete group this is the bounded
/// function `x ↦ c + a_x`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureFunctional<S: Scalar> {
    constant: S,
    atoms: GroupFunction<S>,
}

impl<S: Scalar> MeasureFunctional<S> {
    pub fn zero(group: &GroupSpec) -> Self {
        MeasureFunctional {
            constant: S::zero(),
            atoms: GroupFunction::zero(group),
        }
    }

    pub fn from_atoms(atoms: GroupFunction<S>) -> Self {
        MeasureFunctional {
            constant: S::zero(),
            atoms,
        }
    }

    pub fn new(constant: S, atoms: GroupFunction<S>) -> Self {
        MeasureFunctional { constant, atoms }
    }

    /// Haar measure `λ`.
    pub fn haar(group: &GroupSpec) -> Self {
        MeasureFunctional {
            constant: S::one(),
            atoms: GroupFunction::zero(group),
        }
    }

    pub fn delta(group: &GroupSpec, x: &Element) -> Self {
        Self::from_atoms(GroupFunction::delta(group, x))
    }

    pub fn group(&self) -> &GroupSpec {
        self.atoms.group()
    }

    pub fn constant(&self) -> &S {
        &self.constant
    }

    pub fn atoms(&self) -> &GroupFunction<S> {
        &self.atoms
    }

    pub fn value(&self, x: &Element) -> S {
        self.constant.clone() + self.atoms.get(x)
    }

    pub fn has_constant(&self) -> bool {
        !self.constant.is_zero()
    }

    /// Finite groups: the functional as a function (constant folded in).
    pub fn to_function(&self) -> Result<GroupFunction<S>> {
        let group = self.group();
        if !group.is_finite() {
            if self.has_constant() {
                return Err(Error::NeedFiniteGroup);
            }
            return Ok(self.atoms.clone());
        }
        let mut f = GroupFunction::zero(group);
        for x in group.elements() {
            f.set(&x, self.value(&x));
        }
        Ok(f)
    }

    /// Re-expresses a finite-group functional with its constant folded into
    /// the atoms.
    pub fn normalized(&self) -> Result<Self> {
        if self.group().is_finite() {
            Ok(Self::from_atoms(self.to_function()?))
        } else {
            Ok(self.clone())
        }
    }

    pub fn scale(&self, c: &S) -> Self {
        MeasureFunctional {
            constant: self.constant.clone() * c.clone(),
            atoms: self.atoms.scale(c),
        }
    }

    pub fn plus(&self, other: &Self) -> Self {
        MeasureFunctional {
            constant: self.constant.clone() + other.constant.clone(),
            atoms: self.atoms.plus(&other.atoms),
        }
    }

    pub fn minus(&self, other: &Self) -> Self {
        self.plus(&other.scale(&-S::one()))
    }

    pub fn reflect(&self) -> Self {
        MeasureFunctional {
            constant: self.constant.clone(),
            atoms: self.atoms.reflect(),
        }
    }

    /// `(ψ_e, ψ_o)`; the constant part is even.
    pub fn even_odd_split(&self) -> (Self, Self) {
        let (e, o) = self.atoms.even_odd_split();
        (
            MeasureFunctional {
                constant: self.constant.clone(),
                atoms: e,
            },
            Self::from_atoms(o),
        )
    }

    pub fn is_even(&self) -> bool {
        self.atoms.is_even()
    }

    pub fn is_odd(&self) -> bool {
        self.constant.is_zero_tol() && self.atoms.is_odd()
    }

    /// Jordan decomposition `ψ = ψ⁺ − ψ⁻` (finitely supported case).
    pub fn jordan(&self) -> Result<(GroupFunction<S>, GroupFunction<S>)> {
        Ok(self.finite_part()?.jordan())
    }

    /// The functional as a finitely supported function, when it is one.
    fn finite_part(&self) -> Result<GroupFunction<S>> {
        if self.group().is_finite() {
            self.to_function()
        } else if self.has_constant() {
            Err(Error::InvalidParameter(
                "functional with a Haar component on an infinite group is not finitely supported".into(),
            ))
        } else {
            Ok(self.atoms.clone())
        }
    }

    pub fn convert<T: Scalar>(&self) -> MeasureFunctional<T> {
        MeasureFunctional {
            constant: crate::scalar::convert(&self.constant),
            atoms: self.atoms.convert(),
        }
    }
}

/// `⟨f, ψ⟩ = Σ_x f(x) ψ(x)`; always finite since `f` is finitely supported.
pub fn pair<S: Scalar>(f: &GroupFunction<S>, psi: &MeasureFunctional<S>) -> S {
    f.iter()
        .fold(S::zero(), |acc, (x, v)| acc + v.clone() * psi.value(x))
}

/// Pairing of two functionals viewed as functions; diverges on an infinite
/// group when both carry a Haar component.
pub fn pair_functionals<S: Scalar>(a: &MeasureFunctional<S>, b: &MeasureFunctional<S>) -> Result<S> {
    let group = a.group();
    if group.is_finite() {
        return Ok(pair(&a.to_function()?, b));
    }
    match (a.has_constant(), b.has_constant()) {
        (true, true) => Err(Error::DivergentPairing(
            "both functionals have a nonzero Haar component".into(),
        )),
        (false, _) => Ok(pair(&a.atoms, b)),
        (true, false) => Ok(pair(&b.atoms, a)),
    }
}

/// `‖f‖_X = Σ_ℓ ‖f|_{B+ℓ}‖_∞`.
pub fn mixed_norm_x<S: Scalar>(tiling: &LatticeTiling, f: &GroupFunction<S>) -> S {
    cell_sups(tiling, f)
        .into_values()
        .fold(S::zero(), |acc, v| acc + v)
}

/// Cell sup-norms `c_ℓ` keyed by cell.
pub fn cell_sups<S: Scalar>(tiling: &LatticeTiling, f: &GroupFunction<S>) -> BTreeMap<Element, S> {
    let mut cells: BTreeMap<Element, S> = BTreeMap::new();
    for (x, v) in f.iter() {
        let entry = cells.entry(tiling.cell_key(x)).or_insert_with(S::zero);
        *entry = S::max_of(entry.clone(), v.abs_val());
    }
    cells
}

/// `‖ψ‖_M = sup_ℓ |ψ|(B+ℓ)`.
pub fn measure_norm_m<S: Scalar>(tiling: &LatticeTiling, psi: &MeasureFunctional<S>) -> S {
    let group = psi.group();
    if group.is_finite() {
        return group
            .elements()
            .iter()
            .fold(S::zero(), |acc, x| acc + psi.value(x).abs_val());
    }
    let keys: BTreeSet<Element> = psi.atoms.support().map(|x| tiling.cell_key(x)).collect();
    let mut best = if psi.has_constant() {
        // cells free of atoms exist on an infinite group
        psi.constant.abs_val() * S::from_int(tiling.tile_size() as i64)
    } else {
        S::zero()
    };
    for key in keys {
        let mass = tiling
            .cell_members(&key)
            .iter()
            .fold(S::zero(), |acc, x| acc + psi.value(x).abs_val());
        best = S::max_of(best, mass);
    }
    best
}

/// Membership in `Q_A* = {ψ ≤ 0, supp ψ ⊆ A}` (closures are trivial on a
/// discrete group).
pub fn in_qa_dual<S: Scalar>(psi: &MeasureFunctional<S>, a: &Region) -> bool {
    let group = psi.group();
    let check = |x: &Element| {
        let v = psi.value(x);
        !v.is_positive_tol() && (v.is_zero_tol() || a.contains(x))
    };
    if group.is_finite() {
        return group.elements().iter().all(check);
    }
    if psi.has_constant() {
        // the Haar part charges every point off the atoms
        if psi.constant.is_positive_tol() || !a.complement {
            return false;
        }
        if !a.members.iter().all(|x| psi.value(x).is_zero_tol()) {
            return false;
        }
    }
    psi.atoms.support().all(check)
}

/// Positive type: `ψ` even with nonnegative transform (on `Z^d` the Haar
/// part contributes a point mass at `θ = 0`, so its weight must be ≥ 0).
pub fn is_positive_type<S: Scalar>(psi: &MeasureFunctional<S>) -> Result<PdVerdict<S>> {
    let group = psi.group();
    if group.is_finite() {
        return spectral::is_positive_definite(&psi.to_function()?);
    }
    let mut verdict = spectral::is_positive_definite(&psi.atoms)?;
    if psi.constant.is_negative_tol() {
        verdict.holds = false;
        verdict.margin = verdict.margin.min(psi.constant.to_f64());
    }
    Ok(verdict)
}

/// Outcome of [`in_p_dual`]: `P* = 𝓜 + 𝓞`.
#[derive(Debug, Clone)]
pub struct PDualVerdict<S: Scalar> {
    pub member: bool,
    pub even: MeasureFunctional<S>,
    pub odd: MeasureFunctional<S>,
    pub spectral: PdVerdict<S>,
}

/// Membership in the dual of the positive definite cone: the even part is of
/// positive type, the odd part is arbitrary.
pub fn in_p_dual<S: Scalar>(psi: &MeasureFunctional<S>) -> Result<PDualVerdict<S>> {
    let (even, odd) = psi.even_odd_split();
    let spectral = is_positive_type(&even)?;
    Ok(PDualVerdict {
        member: spectral.holds,
        even,
        odd,
        spectral,
    })
}

/// Witness for membership in `(P ∩ Q_A)*`: `ψ = ν − κ + o`.
#[derive(Debug, Clone)]
pub struct JointDualWitness<S: Scalar> {
    /// `κ ≥ 0`, supported in `A = Ω^c`.
    pub kappa: MeasureFunctional<S>,
    /// Even, of positive type.
    pub nu: MeasureFunctional<S>,
    pub odd: MeasureFunctional<S>,
}

#[derive(Debug, Clone)]
pub struct JointDualVerdict<S: Scalar> {
    pub member: bool,
    pub witness: Option<JointDualWitness<S>>,
}

/// Membership in `(P ∩ Q_A)* = −M₊(A) + 𝓜 + 𝓞` with `A = Ω^c`, on a finite
/// group. Searches the minimal-mass `κ ≥ 0` on `A` (per inversion orbit)
/// for which `ψ_e + κ_e` has a nonnegative transform.
pub fn in_joint_dual<S: Scalar>(psi: &MeasureFunctional<S>, omega: &Region) -> Result<JointDualVerdict<S>> {
    let group = psi.group().clone();
    let n = group.order().ok_or(Error::NeedFiniteGroup)?;
    let omega = omega.normalized(&group)?;
    let orbits = group.inversion_orbits();
    let table = CharacterTable::<S>::new(&group)?;
    let psi_e = psi.even_odd_split().0.to_function()?;

    // κ variables: one per orbit meeting A
    let mut lp = LPProblem::new(Sense::Minimize);
    let mut kappa_vars = Vec::new();
    for (i, o) in orbits.iter().enumerate() {
        if o.members.iter().any(|x| !omega.contains(x)) {
            let v = lp.add_var(format!("kappa[{}]", o.rep), VarBound::NonNegative);
            lp.set_objective(v, S::from_int(o.size() as i64));
            kappa_vars.push((i, v));
        }
    }
    // (ψ_e + κ_e)^(y) ≥ 0 for each dual orbit representative
    for o_y in &orbits {
        let y = group.index_of(&o_y.rep);
        let mut rhs = S::zero();
        for x in 0..n {
            let v = psi_e.get(&group.element_at(x));
            if !v.is_zero() {
                rhs = rhs - v * table.cos(x, y).clone();
            }
        }
        let mut coeffs = Vec::new();
        for &(i, var) in &kappa_vars {
            let c = orbits[i]
                .members
                .iter()
                .fold(S::zero(), |acc, x| acc + table.cos(group.index_of(x), y).clone());
            if !c.is_zero() {
                coeffs.push((var, c));
            }
        }
        lp.add_constraint(format!("spectrum[{}]", o_y.rep), coeffs, Relation::Ge, rhs);
    }
    let sol = lp.solve()?;
    if sol.status != LpStatus::Optimal {
        return Ok(JointDualVerdict {
            member: false,
            witness: None,
        });
    }
    let two = S::from_int(2);
    let mut kappa_even = GroupFunction::zero(&group);
    let mut kappa = GroupFunction::zero(&group);
    for &(i, var) in &kappa_vars {
        let value = sol.point[var].clone();
        if value.is_zero() {
            continue;
        }
        let o = &orbits[i];
        let outside: Vec<&Element> = o.members.iter().filter(|x| !omega.contains(x)).collect();
        for x in &o.members {
            kappa_even.set(x, value.clone());
        }
        if outside.len() == o.members.len() {
            for x in outside {
                kappa.set(x, value.clone());
            }
        } else {
            // one member lies in Ω: put the whole orbit mass on the other
            kappa.set(outside[0], value.clone() * two.clone());
        }
    }
    let nu = psi_e.plus(&kappa_even);
    let (_, psi_o) = psi.even_odd_split();
    let odd = psi_o
        .to_function()?
        .plus(&kappa)
        .minus(&kappa_even);
    Ok(JointDualVerdict {
        member: true,
        witness: Some(JointDualWitness {
            kappa: MeasureFunctional::from_atoms(kappa),
            nu: MeasureFunctional::from_atoms(nu),
            odd: MeasureFunctional::from_atoms(odd),
        }),
    })
}
