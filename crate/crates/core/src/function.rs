//! Finitely supported real functions on a group.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::group::{Element, GroupSpec, Region};
use crate::scalar::{convert, Scalar};

/// A real-valued, finitely supported function. Zero values are not stored.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupFunction<S: Scalar> {
    group: GroupSpec,
    values: BTreeMap<Element, S>,
}

impl<S: Scalar> GroupFunction<S> {
    pub fn zero(group: &GroupSpec) -> Self {
        GroupFunction {
            group: group.clone(),
            values: BTreeMap::new(),
        }
    }

    /// Builds a function from `(element, value)` pairs; coordinates are
    /// reduced and repeated elements accumulate.
    pub fn from_pairs(group: &GroupSpec, pairs: impl IntoIterator<Item = (Element, S)>) -> Result<Self> {
        let mut f = Self::zero(group);
        for (x, v) in pairs {
            let x = group.reduce(&x.0)?;
            f.add_at(&x, v);
        }
        Ok(f)
    }

    /// Rank-one convenience: values at consecutive points starting at `start`.
    pub fn from_slice(group: &GroupSpec, start: i64, values: &[S]) -> Result<Self> {
        Self::from_pairs(
            group,
            values
                .iter()
                .enumerate()
                .map(|(i, v)| (Element::scalar(start + i as i64), v.clone())),
        )
    }

    /// Finite groups: values listed in lexicographic element order.
    pub fn from_dense(group: &GroupSpec, values: &[S]) -> Result<Self> {
        let n = group.order().ok_or(Error::NeedFiniteGroup)?;
        if values.len() != n {
            return Err(Error::InvalidParameter(format!(
                "expected {n} values, got {}",
                values.len()
            )));
        }
        Self::from_pairs(
            group,
            values.iter().enumerate().map(|(i, v)| (group.element_at(i), v.clone())),
        )
    }

    pub fn delta(group: &GroupSpec, x: &Element) -> Self {
        Self::scaled_delta(group, x, S::one())
    }

    pub fn scaled_delta(group: &GroupSpec, x: &Element, v: S) -> Self {
        let mut f = Self::zero(group);
        f.set(&group.element(&x.0), v);
        f
    }

    pub fn indicator(group: &GroupSpec, elements: impl IntoIterator<Item = Element>) -> Self {
        let mut f = Self::zero(group);
        for x in elements {
            f.set(&group.element(&x.0), S::one());
        }
        f
    }

    /// Constant function on a finite group.
    pub fn constant(group: &GroupSpec, v: S) -> Result<Self> {
        if !group.is_finite() {
            return Err(Error::NeedFiniteGroup);
        }
        Ok(Self::indicator(group, group.elements()).scale(&v))
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn get(&self, x: &Element) -> S {
        self.values.get(x).cloned().unwrap_or_else(S::zero)
    }

    pub fn set(&mut self, x: &Element, v: S) {
        if v.is_zero() {
            self.values.remove(x);
        } else {
            self.values.insert(x.clone(), v);
        }
    }

    pub fn add_at(&mut self, x: &Element, v: S) {
        let cur = self.get(x);
        self.set(x, cur + v);
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Element, &S)> {
        self.values.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &Element> {
        self.values.keys()
    }

    pub fn support_len(&self) -> usize {
        self.values.len()
    }

    pub fn is_zero_fn(&self) -> bool {
        self.values.is_empty()
    }

    /// Largest `‖x‖_∞` over the support.
    pub fn radius(&self) -> u64 {
        self.values.keys().map(Element::linf_norm).max().unwrap_or(0)
    }

    /// Finite groups: all values in lexicographic element order.
    pub fn to_dense(&self) -> Result<Vec<S>> {
        let n = self.group.order().ok_or(Error::NeedFiniteGroup)?;
        let mut out = vec![S::zero(); n];
        for (x, v) in &self.values {
            out[self.group.index_of(x)] = v.clone();
        }
        Ok(out)
    }

    pub fn map<T: Scalar>(&self, mut f: impl FnMut(&S) -> T) -> GroupFunction<T> {
        let mut out = GroupFunction::zero(&self.group);
        for (x, v) in &self.values {
            out.set(x, f(v));
        }
        out
    }

    pub fn convert<T: Scalar>(&self) -> GroupFunction<T> {
        self.map(convert)
    }

    pub fn scale(&self, c: &S) -> Self {
        self.map(|v| v.clone() * c.clone())
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (x, v) in &other.values {
            out.add_at(x, v.clone());
        }
        out
    }

    pub fn minus(&self, other: &Self) -> Self {
        self.plus(&other.scale(&-S::one()))
    }

    /// `x ↦ f(−x)`.
    pub fn reflect(&self) -> Self {
        let mut out = Self::zero(&self.group);
        for (x, v) in &self.values {
            out.set(&self.group.neg(x), v.clone());
        }
        out
    }

    /// `T_t f = f(· − t)`.
    pub fn translate(&self, t: &Element) -> Self {
        let mut out = Self::zero(&self.group);
        for (x, v) in &self.values {
            out.set(&self.group.add(x, t), v.clone());
        }
        out
    }

    pub fn convolve(&self, other: &Self) -> Self {
        let mut out = Self::zero(&self.group);
        for (x, a) in &self.values {
            for (y, b) in &other.values {
                out.add_at(&self.group.add(x, y), a.clone() * b.clone());
            }
        }
        out
    }

    pub fn sum(&self) -> S {
        self.values.values().fold(S::zero(), |acc, v| acc + v.clone())
    }

    pub fn max_abs(&self) -> S {
        self.values
            .values()
            .fold(S::zero(), |acc, v| S::max_of(acc, v.abs_val()))
    }

    pub fn l1_norm(&self) -> S {
        self.values
            .values()
            .fold(S::zero(), |acc, v| acc + v.abs_val())
    }

    /// First element where `f(x) ≠ f(−x)` under the mode's tolerance.
    pub fn evenness_defect(&self) -> Option<Element> {
        self.values
            .keys()
            .find(|x| {
                let d = self.get(x) - self.get(&self.group.neg(x));
                !d.is_zero_tol()
            })
            .cloned()
    }

    pub fn is_even(&self) -> bool {
        self.evenness_defect().is_none()
    }

    pub fn is_odd(&self) -> bool {
        self.values.keys().all(|x| {
            let d = self.get(x) + self.get(&self.group.neg(x));
            d.is_zero_tol()
        })
    }

    /// `(f + f̃)/2`, `(f − f̃)/2`.
    pub fn even_odd_split(&self) -> (Self, Self) {
        let half = S::from_ratio(1, 2);
        let r = self.reflect();
        (self.plus(&r).scale(&half), self.minus(&r).scale(&half))
    }

    /// Restriction to a region.
    pub fn restrict(&self, region: &Region) -> Self {
        let mut out = Self::zero(&self.group);
        for (x, v) in &self.values {
            if region.contains(x) {
                out.set(x, v.clone());
            }
        }
        out
    }

    /// Pointwise positive and negative parts, `f = f⁺ − f⁻`.
    pub fn jordan(&self) -> (Self, Self) {
        let mut pos = Self::zero(&self.group);
        let mut neg = Self::zero(&self.group);
        for (x, v) in &self.values {
            if *v > S::zero() {
                pos.set(x, v.clone());
            } else {
                neg.set(x, -v.clone());
            }
        }
        (pos, neg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn even_odd_split_of_delta_one() {
        let z4 = GroupSpec::cyclic(4).unwrap();
        let d1 = GroupFunction::<Rational>::delta(&z4, &Element::scalar(1));
        let (e, o) = d1.even_odd_split();
        assert_eq!(e.to_dense().unwrap(), vec![q(0, 1), q(1, 2), q(0, 1), q(1, 2)]);
        assert_eq!(o.to_dense().unwrap(), vec![q(0, 1), q(1, 2), q(0, 1), q(-1, 2)]);
        assert!(e.is_even());
        assert!(o.is_odd());
        assert_eq!(e.plus(&o), d1);
    }

    #[test]
    fn split_of_even_and_odd() {
        let z4 = GroupSpec::cyclic(4).unwrap();
        let f = GroupFunction::from_dense(&z4, &[q(1, 1), q(1, 2), q(0, 1), q(1, 2)]).unwrap();
        let (e, o) = f.even_odd_split();
        assert_eq!(e, f);
        assert!(o.is_zero_fn());
        let g = GroupFunction::from_dense(&z4, &[q(0, 1), q(1, 1), q(0, 1), q(-1, 1)]).unwrap();
        let (e, o) = g.even_odd_split();
        assert!(e.is_zero_fn());
        assert_eq!(o, g);
    }

    #[test]
    fn convolution_on_z() {
        let z = GroupSpec::free(1, 10).unwrap();
        let v = GroupFunction::<Rational>::indicator(&z, [Element::scalar(0), Element::scalar(1)]);
        let r = v.convolve(&v.reflect()).scale(&q(1, 2));
        assert_eq!(r.get(&Element::scalar(0)), q(1, 1));
        assert_eq!(r.get(&Element::scalar(1)), q(1, 2));
        assert_eq!(r.get(&Element::scalar(-1)), q(1, 2));
        assert_eq!(r.support_len(), 3);
    }

    #[test]
    fn jordan_parts_disjoint() {
        let z = GroupSpec::free(1, 10).unwrap();
        let f = GroupFunction::from_slice(&z, -1, &[q(3, 1), q(-4, 1), q(5, 1)]).unwrap();
        let (p, n) = f.jordan();
        assert!(p.support().all(|x| num_traits::Zero::is_zero(&n.get(x))));
        assert_eq!(p.minus(&n), f);
        assert_eq!(p.plus(&n).sum(), f.l1_norm());
    }
}
