#![allow(dead_code)]

use delsarte::{Element, GroupFunction, GroupSpec, MeasureFunctional, Rational, Region, Scalar};
use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn e(v: i64) -> Element {
    Element::scalar(v)
}

/// Finite groups of order at most 64 whose exponent is 2, 3, 4 or 6.
pub fn exact_groups() -> Vec<GroupSpec> {
    let shapes: &[&[u64]] = &[
        &[2],
        &[3],
        &[4],
        &[6],
        &[2, 2],
        &[2, 4],
        &[2, 6],
        &[3, 3],
        &[3, 6],
        &[4, 4],
        &[6, 6],
        &[2, 2, 2],
        &[2, 2, 4],
        &[2, 2, 6],
        &[2, 4, 4],
        &[3, 3, 3],
        &[2, 2, 2, 2],
        &[2, 2, 2, 4],
        &[4, 4, 4],
        &[2, 2, 2, 2, 2, 2],
    ];
    shapes.iter().map(|s| GroupSpec::finite(s).unwrap()).collect()
}

pub fn random_exact_group(rng: &mut impl Rng) -> GroupSpec {
    exact_groups().choose(rng).unwrap().clone()
}

/// A symmetric region: each inversion orbit is kept with probability `p`.
pub fn random_symmetric_region(g: &GroupSpec, rng: &mut impl Rng, p: f64, with_zero: bool) -> Region {
    let mut members = Vec::new();
    for orbit in g.inversion_orbits() {
        let keep = if g.is_zero(&orbit.rep) { with_zero } else { rng.gen_bool(p) };
        if keep {
            members.extend(orbit.members.iter().cloned());
        }
    }
    Region::finite(members)
}

/// An even function with small integer values.
pub fn random_even<S: Scalar>(g: &GroupSpec, rng: &mut impl Rng, lo: i64, hi: i64) -> GroupFunction<S> {
    let mut f = GroupFunction::zero(g);
    for orbit in g.inversion_orbits() {
        let v = S::from_int(rng.gen_range(lo..=hi));
        for x in &orbit.members {
            f.set(x, v.clone());
        }
    }
    f
}

/// `u ⋆ ũ` for a random small-integer `u` on a finite group.
pub fn random_autocorrelation<S: Scalar>(g: &GroupSpec, rng: &mut impl Rng, support: usize) -> GroupFunction<S> {
    let elems = g.elements();
    let mut u = GroupFunction::zero(g);
    for _ in 0..support {
        let x = elems.choose(rng).unwrap();
        u.add_at(x, S::from_int(rng.gen_range(-2..=2)));
    }
    u.convolve(&u.reflect())
}

/// `δ_0 + Σ w_j u_j ⋆ ũ_j`: even with transform at least 1.
pub fn random_strict_pd<S: Scalar>(g: &GroupSpec, rng: &mut impl Rng) -> MeasureFunctional<S> {
    let mut s = GroupFunction::delta(g, &g.zero());
    for _ in 0..rng.gen_range(0..3) {
        let w = S::from_ratio(rng.gen_range(1..=4), rng.gen_range(1..=4));
        s = s.plus(&random_autocorrelation::<S>(g, rng, 3).scale(&w));
    }
    MeasureFunctional::from_atoms(s)
}

pub fn random_even_functional<S: Scalar>(g: &GroupSpec, rng: &mut impl Rng) -> MeasureFunctional<S> {
    MeasureFunctional::new(S::from_int(rng.gen_range(-1..=0)), random_even(g, rng, -3, 3))
}

/// Symmetric `S ⊂ Z` with `|s| ∈ [lo, hi]`.
pub fn random_symmetric_ints(rng: &mut impl Rng, lo: i64, hi: i64, count: usize) -> Vec<i64> {
    let mut out = Vec::new();
    for _ in 0..count.max(1) {
        let s = rng.gen_range(lo..=hi);
        out.push(s);
        out.push(-s);
    }
    out.sort();
    out.dedup();
    out
}
