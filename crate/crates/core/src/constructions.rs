//! Explicit positive definite functions: convolution-square kernels,
//! triangle functions, sign-swap functions and the decomposition of an
//! arbitrary finitely supported `f` as `p − q` with `p` positive definite
//! and `q ≤ 0` on a prescribed set.
//!
//! Every builder returns a sum-of-squares certificate `Σ w_j u_j ⋆ ũ_j`,
//! `w_j ≥ 0`, which is rechecked against the output in the mode's
//! arithmetic. Such a sum is positive definite on any group.

use std::collections::BTreeSet;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::function::GroupFunction;
use crate::functionals::{cell_sups, mixed_norm_x};
use crate::group::{Element, GroupSpec, LatticeTiling, Region};
use crate::scalar::Scalar;
use crate::spectral;

/// `f = Σ w_j u_j ⋆ ũ_j` with `ũ(x) = u(−x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SosCertificate<S: Scalar> {
    pub terms: Vec<(S, GroupFunction<S>)>,
}

impl<S: Scalar> SosCertificate<S> {
    pub fn empty() -> Self {
        SosCertificate { terms: Vec::new() }
    }

    pub fn expand(&self, group: &GroupSpec) -> GroupFunction<S> {
        let mut out = GroupFunction::zero(group);
        for (w, u) in &self.terms {
            out = out.plus(&u.convolve(&u.reflect()).scale(w));
        }
        out
    }

    /// Nonnegative weights and `expand() = f` (up to the mode's tolerance).
    pub fn certifies(&self, f: &GroupFunction<S>) -> bool {
        if self.terms.iter().any(|(w, _)| w.is_negative_tol()) {
            return false;
        }
        let diff = self.expand(f.group()).minus(f);
        let ok = diff.iter().all(|(_, v)| v.is_zero_tol());
        ok
    }

    fn extend_scaled(&mut self, other: &SosCertificate<S>, c: &S) {
        for (w, u) in &other.terms {
            self.terms.push((w.clone() * c.clone(), u.clone()));
        }
    }
}

fn require_finite(region: &Region, what: &str) -> Result<()> {
    if region.complement {
        return Err(Error::InvalidParameter(format!("{what} must be finite")));
    }
    Ok(())
}

fn elements_of(group: &GroupSpec, region: &Region) -> Result<Vec<Element>> {
    if group.is_finite() {
        Ok(region.normalized(group)?.materialize(group))
    } else {
        require_finite(region, "region")?;
        region.members.iter().map(|x| group.check(x).map(|_| x.clone())).collect()
    }
}

/// `A + B` for finite sets.
pub fn sumset(group: &GroupSpec, a: &[Element], b: &[Element]) -> Vec<Element> {
    let mut out = BTreeSet::new();
    for x in a {
        for y in b {
            out.insert(group.add(x, y));
        }
    }
    out.into_iter().collect()
}

/// `V − V`.
pub fn difference_set(group: &GroupSpec, v: &[Element]) -> Vec<Element> {
    let neg: Vec<Element> = v.iter().map(|x| group.neg(x)).collect();
    sumset(group, v, &neg)
}

#[derive(Debug, Clone)]
pub struct UrysohnKernel<S: Scalar> {
    pub k: GroupFunction<S>,
    /// The symmetric set `H` with `k = |H|⁻¹ 1_H ⋆ 1_H`.
    pub h: Vec<Element>,
    /// `n` with `H = [−n, n]^d` (free groups).
    pub radius: Option<u64>,
    pub min_on_k: S,
    pub sos: SosCertificate<S>,
}

/// `k = |H|⁻¹ 1_H ⋆ 1_H` with `H = [−n,n]^d` grown from the extent of `K`
/// until `min_K k ≥ 1 − ε`; on a finite group `H = G` and `k ≡ 1`.
pub fn urysohn_pd_kernel<S: Scalar>(group: &GroupSpec, k_set: &Region, eps: &S) -> Result<UrysohnKernel<S>> {
    if !eps.is_positive_tol() || !(S::one() - eps.clone()).is_positive_tol() {
        return Err(Error::InvalidParameter("epsilon must lie in (0, 1)".into()));
    }
    let target = S::one() - eps.clone();
    let kernel = |h: Vec<Element>, radius: Option<u64>, points: &[Element]| {
        let u = GroupFunction::indicator(group, h.iter().cloned());
        let w = S::one() / S::from_int(h.len() as i64);
        let k = u.convolve(&u.reflect()).scale(&w);
        let min_on_k = points
            .iter()
            .map(|x| k.get(x))
            .fold(None, |acc: Option<S>, v| Some(acc.map_or(v.clone(), |a| S::min_of(a, v))))
            .unwrap_or_else(S::one);
        UrysohnKernel {
            k,
            h,
            radius,
            min_on_k,
            sos: SosCertificate {
                terms: vec![(w, u)],
            },
        }
    };
    if group.is_finite() {
        let points = elements_of(group, k_set)?;
        return Ok(kernel(group.elements(), None, &points));
    }
    let points = elements_of(group, k_set)?;
    let d = group.rank();
    let m = points.iter().map(|x| x.linf_norm()).max().unwrap_or(0);
    let mut n = m;
    loop {
        let h = crate::group::box_elements(&vec![(-(n as i64), n as i64); d]);
        let out = kernel(h, Some(n), &points);
        if out.min_on_k >= target {
            return Ok(out);
        }
        n = (n + 1).max(2 * n);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelChecks {
    pub value_at_zero_one: bool,
    pub nonnegative: bool,
    pub finitely_supported: bool,
    pub positive_definite: bool,
    pub above_threshold_on_k: bool,
}

impl KernelChecks {
    pub fn all(&self) -> bool {
        self.value_at_zero_one
            && self.nonnegative
            && self.finitely_supported
            && self.positive_definite
            && self.above_threshold_on_k
    }
}

pub fn check_kernel<S: Scalar>(kernel: &UrysohnKernel<S>, k_set: &Region, eps: &S) -> Result<KernelChecks> {
    let group = kernel.k.group();
    let k = &kernel.k;
    let target = S::one() - eps.clone();
    let points = elements_of(group, k_set)?;
    Ok(KernelChecks {
        value_at_zero_one: (k.get(&group.zero()) - S::one()).is_zero_tol(),
        nonnegative: k.iter().all(|(_, v)| !v.is_negative_tol()),
        finitely_supported: true,
        positive_definite: kernel.sos.certifies(k),
        above_threshold_on_k: points.iter().all(|x| !(target.clone() - k.get(x)).is_positive_tol()),
    })
}

/// `r = μ(V)⁻¹ 1_V ⋆ 1_{−V}`.
pub fn triangle_function<S: Scalar>(group: &GroupSpec, v: &Region) -> Result<GroupFunction<S>> {
    Ok(triangle_with_sos(group, &elements_of(group, v)?)?.0)
}

fn triangle_with_sos<S: Scalar>(group: &GroupSpec, v: &[Element]) -> Result<(GroupFunction<S>, SosCertificate<S>)> {
    if v.is_empty() {
        return Err(Error::InvalidParameter("V must be nonempty".into()));
    }
    let u = GroupFunction::indicator(group, v.iter().cloned());
    let w = S::one() / S::from_int(v.len() as i64);
    let r = u.convolve(&u.reflect()).scale(&w);
    Ok((r, SosCertificate { terms: vec![(w, u)] }))
}

/// `2r − T_x r − T_{−x} r` with `r` the triangle function of `V`, and its
/// certificate `μ(V)⁻¹ (1_V − 1_{V+x}) ⋆ (…)~`.
pub fn second_difference<S: Scalar>(
    group: &GroupSpec,
    v: &Region,
    x: &Element,
) -> Result<(GroupFunction<S>, SosCertificate<S>)> {
    let v = elements_of(group, v)?;
    let (r, _) = triangle_with_sos::<S>(group, &v)?;
    let two = S::from_int(2);
    let f = r
        .scale(&two)
        .minus(&r.translate(x))
        .minus(&r.translate(&group.neg(x)));
    let u = GroupFunction::indicator(group, v.iter().cloned())
        .minus(&GroupFunction::indicator(group, v.iter().map(|y| group.add(y, x))));
    let w = S::one() / S::from_int(v.len() as i64);
    Ok((f, SosCertificate { terms: vec![(w, u)] }))
}

#[derive(Debug, Clone)]
pub struct SignSwapReport<S: Scalar> {
    pub k: GroupFunction<S>,
    pub s: Vec<Element>,
    pub v: Vec<Element>,
    pub w: Vec<Element>,
    pub positive_support: Region,
    pub negative_support: Region,
    pub total_sum: S,
    pub positive_mass: S,
    pub negative_mass: S,
    pub value_at_zero: S,
    /// `μ(S+W)/μ(V)`.
    pub expected_value_at_zero: S,
    pub positive_in_w: bool,
    pub negative_in_sww: bool,
    pub sum_zero: bool,
    pub masses_match: bool,
    pub minus_one_on_s: bool,
    pub positive_definite: bool,
    /// Spectral cross-check: minimum (or certified lower bound) of `k̂`.
    pub spectral_margin: Option<f64>,
    pub sos: SosCertificate<S>,
}

impl<S: Scalar> SignSwapReport<S> {
    pub fn all_hold(&self) -> bool {
        self.positive_in_w
            && self.negative_in_sww
            && self.sum_zero
            && self.masses_match
            && self.minus_one_on_s
            && self.positive_definite
            && self.value_at_zero == self.expected_value_at_zero
    }

    pub fn to_json(&self) -> Value {
        let elems = |v: &[Element]| v.iter().map(|x| json!(x)).collect::<Vec<_>>();
        let region = |r: &Region| r.members.iter().map(|x| json!(x)).collect::<Vec<_>>();
        json!({
            "k": crate::io::function_to_json(&self.k),
            "S": elems(&self.s),
            "V": elems(&self.v),
            "W": elems(&self.w),
            "positive_support": region(&self.positive_support),
            "negative_support": region(&self.negative_support),
            "total_sum": self.total_sum.to_text(),
            "positive_mass": self.positive_mass.to_text(),
            "negative_mass": self.negative_mass.to_text(),
            "value_at_zero": self.value_at_zero.to_text(),
            "checks": {
                "positive_support_in_W": self.positive_in_w,
                "negative_support_in_S_W_W": self.negative_in_sww,
                "sum_zero": self.sum_zero,
                "masses_equal_mu_S_W": self.masses_match,
                "minus_one_on_S": self.minus_one_on_s,
                "positive_definite": self.positive_definite,
            },
            "margins": {
                "spectral_min": self.spectral_margin,
                "sos_terms": self.sos.terms.len(),
            },
            "all_hold": self.all_hold(),
        })
    }
}

/// Checks the hypotheses of the sign-swap construction.
pub fn sign_swap_precondition(group: &GroupSpec, s: &[Element], v: &[Element]) -> Result<Vec<Element>> {
    if v.is_empty() || !v.contains(&group.zero()) {
        return Err(Error::Precondition("V must contain 0".into()));
    }
    if s.iter().any(|x| group.is_zero(x)) {
        return Err(Error::Precondition("0 must not lie in S".into()));
    }
    let set: BTreeSet<&Element> = s.iter().collect();
    if let Some(x) = s.iter().find(|x| !set.contains(&group.neg(x))) {
        return Err(Error::Precondition(format!("S is not symmetric: -{x} missing")));
    }
    let w = difference_set(group, v);
    let www = sumset(group, &sumset(group, &w, &w), &w);
    if let Some(x) = www.iter().find(|x| set.contains(x)) {
        return Err(Error::Precondition(format!(
            "separation violated: {x} lies in S and in W+W+W"
        )));
    }
    Ok(w)
}

/// `k = (2μ(V))⁻¹ Σ_{x∈S+W} (2r − T_x r − T_{−x} r)`, `W = V − V`: positive
/// definite, `k|_S ≡ −1`, `Σk = 0`.
pub fn sign_swap<S: Scalar>(group: &GroupSpec, s: &Region, v: &Region) -> Result<SignSwapReport<S>> {
    let s_el = elements_of(group, s)?;
    let v_el = elements_of(group, v)?;
    let w = sign_swap_precondition(group, &s_el, &v_el)?;
    let (k, sos) = sign_swap_raw::<S>(group, &s_el, &v_el, &w);
    let spectral_margin = spectral_cross_check(&k);
    Ok(report(group, k, sos, s_el, v_el, w, spectral_margin))
}

fn sign_swap_raw<S: Scalar>(
    group: &GroupSpec,
    s: &[Element],
    v: &[Element],
    w: &[Element],
) -> (GroupFunction<S>, SosCertificate<S>) {
    let mu_v = S::from_int(v.len() as i64);
    let u = GroupFunction::<S>::indicator(group, v.iter().cloned());
    let r = u.convolve(&u.reflect()).scale(&(S::one() / mu_v.clone()));
    let xs = sumset(group, s, w);
    let two = S::from_int(2);
    // 2r − T_x r − T_{−x} r summed over x ∈ S+W
    let mut k = r.scale(&(two.clone() * S::from_int(xs.len() as i64)));
    for x in &xs {
        k = k.minus(&r.translate(x)).minus(&r.translate(&group.neg(x)));
    }
    let norm = S::one() / (two * mu_v.clone());
    let k = k.scale(&norm);
    let weight = norm / mu_v;
    let terms = xs
        .iter()
        .map(|x| {
            let shifted = GroupFunction::indicator(group, v.iter().map(|y| group.add(y, x)));
            (weight.clone(), u.minus(&shifted))
        })
        .collect();
    (k, SosCertificate { terms })
}

fn spectral_cross_check<S: Scalar>(k: &GroupFunction<S>) -> Option<f64> {
    let group = k.group();
    if group.is_finite() {
        return spectral::is_positive_definite(k).ok().map(|v| v.margin);
    }
    if group.rank() == 1 && k.radius() <= spectral::EXACT_DEGREE_LIMIT {
        // exact Sturm route
        return spectral::is_positive_definite(&k.convert::<crate::scalar::Rational>())
            .ok()
            .map(|v| if v.holds { v.margin.max(0.0) } else { v.margin });
    }
    None
}

fn report<S: Scalar>(
    group: &GroupSpec,
    k: GroupFunction<S>,
    sos: SosCertificate<S>,
    s: Vec<Element>,
    v: Vec<Element>,
    w: Vec<Element>,
    spectral_margin: Option<f64>,
) -> SignSwapReport<S> {
    let (kp, km) = k.jordan();
    let positive: BTreeSet<Element> = kp.support().cloned().collect();
    let negative: BTreeSet<Element> = km.support().cloned().collect();
    let w_set: BTreeSet<&Element> = w.iter().collect();
    let sw = sumset(group, &s, &w);
    let sww: BTreeSet<Element> = sumset(group, &sw, &w).into_iter().collect();
    let mu_sw = S::from_int(sw.len() as i64);
    let mu_v = S::from_int(v.len() as i64);
    let positive_mass = kp.sum();
    let negative_mass = km.sum();
    let total_sum = k.sum();
    let minus_one = -S::one();
    let positive_definite = sos.certifies(&k);
    SignSwapReport {
        value_at_zero: k.get(&group.zero()),
        expected_value_at_zero: mu_sw.clone() / mu_v,
        positive_in_w: positive.iter().all(|x| w_set.contains(x)),
        negative_in_sww: negative.iter().all(|x| sww.contains(x)),
        sum_zero: total_sum.is_zero_tol(),
        masses_match: (positive_mass.clone() - mu_sw.clone()).is_zero_tol()
            && (negative_mass.clone() - mu_sw).is_zero_tol(),
        minus_one_on_s: s.iter().all(|x| (k.get(x) - minus_one.clone()).is_zero_tol()),
        positive_definite,
        positive_support: Region::finite(positive),
        negative_support: Region::finite(negative),
        total_sum,
        positive_mass,
        negative_mass,
        spectral_margin,
        k,
        s,
        v,
        w,
        sos,
    }
}

#[derive(Debug, Clone)]
pub struct Decomposition<S: Scalar> {
    pub p: GroupFunction<S>,
    pub q: GroupFunction<S>,
    pub sos: SosCertificate<S>,
    pub tiling: LatticeTiling,
    pub v: Vec<Element>,
    pub norm_f: S,
    pub norm_p: S,
    /// Bound factor `β` with `‖p‖_X ≤ β ‖f‖_X`.
    pub norm_factor: S,
    pub positive_definite: bool,
    pub below_f_on_a: bool,
    pub within_norm_bound: bool,
}

impl<S: Scalar> Decomposition<S> {
    pub fn all_hold(&self) -> bool {
        self.positive_definite && self.below_f_on_a && self.within_norm_bound
    }

    pub fn to_json(&self) -> Value {
        json!({
            "p": crate::io::function_to_json(&self.p),
            "q": crate::io::function_to_json(&self.q),
            "modulus": self.tiling.modulus(),
            "V": self.v.iter().map(|x| json!(x)).collect::<Vec<_>>(),
            "norm_f": self.norm_f.to_text(),
            "norm_p": self.norm_p.to_text(),
            "norm_factor": self.norm_factor.to_text(),
            "checks": {
                "p_positive_definite": self.positive_definite,
                "p_le_f_on_A": self.below_f_on_a,
                "norm_bound": self.within_norm_bound,
            },
            "all_hold": self.all_hold(),
        })
    }
}

#[derive(Debug, Clone)]
pub struct DecomposeOptions {
    /// Tile side `N`; ignored on finite groups.
    pub modulus: u64,
    pub v: Region,
}

impl Default for DecomposeOptions {
    fn default() -> Self {
        DecomposeOptions {
            modulus: 1,
            v: Region::finite([Element::scalar(0)]),
        }
    }
}

/// Number of lattice points in a finite set of group elements.
fn lattice_count(tiling: &LatticeTiling, set: &[Element]) -> usize {
    set.iter().filter(|x| tiling.is_lattice_point(x)).count()
}

/// `β = 2 n_W μ(B+W)/μ(V) + |L ∩ (B−B−(W+W))| + |L ∩ (−B−B−(W+W))|`,
/// `n_W` the number of cells meeting `W`.
///
/// Each `k_S` is bounded by `μ(S+W)/μ(V) ≤ 2μ(B+W)/μ(V)` on `W` and by 1 on
/// `S+W+W`, which meets at most the two lattice counts worth of cells.
pub fn decomposition_norm_factor<S: Scalar>(group: &GroupSpec, tiling: &LatticeTiling, v: &[Element]) -> S {
    let w = difference_set(group, v);
    let b = tiling.tile();
    let neg = |xs: &[Element]| xs.iter().map(|x| group.neg(x)).collect::<Vec<_>>();
    let ww = sumset(group, &w, &w);
    let b_minus_b = sumset(group, &b, &neg(&b));
    let mb_minus_b = sumset(group, &neg(&b), &neg(&b));
    let n1 = lattice_count(tiling, &sumset(group, &b_minus_b, &ww));
    let n2 = lattice_count(tiling, &sumset(group, &mb_minus_b, &ww));
    let n_w = w.iter().map(|x| tiling.cell_key(x)).collect::<BTreeSet<_>>().len();
    let mu_bw = sumset(group, &b, &w).len();
    S::from_int(2 * n_w as i64) * S::from_int(mu_bw as i64) / S::from_int(v.len() as i64)
        + S::from_int((n1 + n2) as i64)
}

/// `f = p − q` with `p = Σ_ℓ c_ℓ k_{S_ℓ}` positive definite and `p ≤ f` on
/// `A`, where `c_ℓ` are the cell sup-norms of `f` and `S_ℓ` the symmetrized
/// pieces `A ∩ (B+ℓ)` on cells where `f` lives.
pub fn pd_minorant_decompose<S: Scalar>(
    f: &GroupFunction<S>,
    a: &Region,
    options: &DecomposeOptions,
) -> Result<Decomposition<S>> {
    let group = f.group().clone();
    let tiling = LatticeTiling::for_group(&group, options.modulus)?;
    let v = if group.is_finite() {
        elements_of(&group, &options.v.normalized(&group)?)?
    } else {
        elements_of(&group, &options.v)?
    };
    if !v.contains(&group.zero()) {
        return Err(Error::Precondition("V must contain 0".into()));
    }
    let a = if group.is_finite() { a.normalized(&group)? } else { a.clone() };
    if a.contains(&group.zero()) {
        return Err(Error::Precondition("0 must not lie in A".into()));
    }
    let w = difference_set(&group, &v);
    let www = sumset(&group, &sumset(&group, &w, &w), &w);
    if let Some(x) = www.iter().find(|x| a.contains(x) || a.contains(&group.neg(x))) {
        return Err(Error::Precondition(format!(
            "separation violated: {x} lies in W+W+W and in A or -A"
        )));
    }
    // symmetric pieces per cell, merged when they coincide
    let mut pieces: Vec<(Vec<Element>, S)> = Vec::new();
    for (key, c) in cell_sups(&tiling, f) {
        if c.is_zero() {
            continue;
        }
        let mut piece: BTreeSet<Element> = BTreeSet::new();
        for x in tiling.cell_members(&key) {
            if a.contains(&x) {
                piece.insert(group.neg(&x));
                piece.insert(x);
            }
        }
        if piece.is_empty() {
            continue;
        }
        let piece: Vec<Element> = piece.into_iter().collect();
        match pieces.iter_mut().find(|(s, _)| *s == piece) {
            Some((_, existing)) => *existing = S::max_of(existing.clone(), c),
            None => pieces.push((piece, c)),
        }
    }
    let mut p = GroupFunction::zero(&group);
    let mut sos = SosCertificate::empty();
    for (piece, c) in &pieces {
        let (k, k_sos) = sign_swap_raw::<S>(&group, piece, &v, &w);
        p = p.plus(&k.scale(c));
        sos.extend_scaled(&k_sos, c);
    }
    let q = p.minus(f);
    let positive_definite = sos.certifies(&p);
    let below_f_on_a = q.iter().all(|(x, val)| !a.contains(x) || !val.is_positive_tol());
    let norm_f = mixed_norm_x(&tiling, f);
    let norm_p = mixed_norm_x(&tiling, &p);
    let norm_factor = decomposition_norm_factor::<S>(&group, &tiling, &v);
    let within_norm_bound = !(norm_p.clone() - norm_factor.clone() * norm_f.clone()).is_positive_tol();
    Ok(Decomposition {
        p,
        q,
        sos,
        tiling,
        v,
        norm_f,
        norm_p,
        norm_factor,
        positive_definite,
        below_f_on_a,
        within_norm_bound,
    })
}
