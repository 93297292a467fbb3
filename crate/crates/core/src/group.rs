//! Finite Abelian groups `Z_{n_1} × … × Z_{n_k}` and free groups `Z^d` seen
//! through a finite symmetric working window, together with regions and the
//! lattice/tile decomposition used by the mixed norm.
//!
//! Haar measure is counting measure throughout.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::exact_exponent;

/// A group element: one integer coordinate per cyclic factor (or per rank
/// of `Z^d`). Finite coordinates are kept reduced to `[0, n_i)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Element(pub Vec<i64>);

impl Element {
    pub fn new(coords: Vec<i64>) -> Self {
        Element(coords)
    }

    pub fn scalar(v: i64) -> Self {
        Element(vec![v])
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn l1_norm(&self) -> u64 {
        self.0.iter().map(|c| c.unsigned_abs()).sum()
    }

    pub fn linf_norm(&self) -> u64 {
        self.0.iter().map(|c| c.unsigned_abs()).max().unwrap_or(0)
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0.as_slice() {
            [x] => write!(f, "{x}"),
            coords => {
                f.write_str("(")?;
                for (i, c) in coords.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{c}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GroupKind {
    Finite { orders: Vec<u64> },
    Free { rank: usize, window: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupSpec {
    kind: GroupKind,
    exponent: Option<u64>,
}

impl GroupSpec {
    pub fn finite(orders: &[u64]) -> Result<Self> {
        if orders.is_empty() {
            return Err(Error::InvalidGroup("empty descriptor".into()));
        }
        if let Some(i) = orders.iter().position(|&n| n == 0) {
            return Err(Error::InvalidGroup(format!("factor {i} has order 0")));
        }
        if orders.iter().any(|&n| n > i64::MAX as u64 / 4) {
            return Err(Error::InvalidGroup("factor order too large".into()));
        }
        let exponent = orders.iter().fold(1u64, |acc, &n| num_integer::lcm(acc, n));
        Ok(GroupSpec {
            kind: GroupKind::Finite {
                orders: orders.to_vec(),
            },
            exponent: Some(exponent),
        })
    }

    pub fn cyclic(n: u64) -> Result<Self> {
        Self::finite(&[n])
    }

    /// `Z^rank` with the working window `[-window, window]^rank`.
    pub fn free(rank: usize, window: u64) -> Result<Self> {
        if rank == 0 {
            return Err(Error::InvalidGroup("rank must be at least 1".into()));
        }
        if window > (1 << 20) {
            return Err(Error::InvalidGroup("window too large".into()));
        }
        Ok(GroupSpec {
            kind: GroupKind::Free { rank, window },
            exponent: None,
        })
    }

    pub fn kind(&self) -> &GroupKind {
        &self.kind
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.kind, GroupKind::Finite { .. })
    }

    pub fn orders(&self) -> Option<&[u64]> {
        match &self.kind {
            GroupKind::Finite { orders } => Some(orders),
            GroupKind::Free { .. } => None,
        }
    }

    pub fn rank(&self) -> usize {
        match &self.kind {
            GroupKind::Finite { orders } => orders.len(),
            GroupKind::Free { rank, .. } => *rank,
        }
    }

    pub fn window(&self) -> Option<u64> {
        match &self.kind {
            GroupKind::Finite { .. } => None,
            GroupKind::Free { window, .. } => Some(*window),
        }
    }

    /// Group order for finite groups.
    pub fn order(&self) -> Option<usize> {
        self.orders().map(|o| o.iter().product::<u64>() as usize)
    }

    /// Least common multiple of the factor orders (finite groups only).
    pub fn exponent(&self) -> Option<u64> {
        self.exponent
    }

    /// Whether spectral tests can run in exact rational arithmetic: finite
    /// groups of exponent 1, 2, 3, 4 or 6, and `Z` itself (univariate
    /// trigonometric polynomials are certified exactly).
    pub fn exact_spectral(&self) -> bool {
        match &self.kind {
            GroupKind::Finite { .. } => self.exponent.is_some_and(exact_exponent),
            GroupKind::Free { rank, .. } => *rank == 1,
        }
    }

    /// Errors with [`Error::ExactUnavailable`] unless exact mode applies.
    pub fn require_exact(&self) -> Result<()> {
        if self.exact_spectral() {
            Ok(())
        } else {
            match self.exponent {
                Some(e) => Err(Error::ExactUnavailable(e)),
                None => Err(Error::UnsupportedRank(self.rank())),
            }
        }
    }

    pub fn zero(&self) -> Element {
        Element(vec![0; self.rank()])
    }

    /// Reduces raw coordinates into canonical form.
    pub fn reduce(&self, coords: &[i64]) -> Result<Element> {
        if coords.len() != self.rank() {
            return Err(Error::InvalidElement {
                element: format!("{coords:?}"),
                reason: format!("expected {} coordinates", self.rank()),
            });
        }
        Ok(self.reduce_unchecked(coords))
    }

    fn reduce_unchecked(&self, coords: &[i64]) -> Element {
        match &self.kind {
            GroupKind::Finite { orders } => Element(
                coords
                    .iter()
                    .zip(orders)
                    .map(|(&c, &n)| c.rem_euclid(n as i64))
                    .collect(),
            ),
            GroupKind::Free { .. } => Element(coords.to_vec()),
        }
    }

    pub fn element(&self, coords: &[i64]) -> Element {
        self.reduce(coords).expect("coordinate count matches rank")
    }

    pub fn check(&self, x: &Element) -> Result<()> {
        if x.dim() != self.rank() {
            return Err(Error::InvalidElement {
                element: x.to_string(),
                reason: format!("expected {} coordinates", self.rank()),
            });
        }
        if let GroupKind::Finite { orders } = &self.kind {
            if x.0.iter().zip(orders).any(|(&c, &n)| c < 0 || c >= n as i64) {
                return Err(Error::InvalidElement {
                    element: x.to_string(),
                    reason: "coordinate out of range".into(),
                });
            }
        }
        Ok(())
    }

    pub fn add(&self, x: &Element, y: &Element) -> Element {
        let raw: Vec<i64> = x.0.iter().zip(&y.0).map(|(a, b)| a + b).collect();
        self.reduce_unchecked(&raw)
    }

    pub fn sub(&self, x: &Element, y: &Element) -> Element {
        let raw: Vec<i64> = x.0.iter().zip(&y.0).map(|(a, b)| a - b).collect();
        self.reduce_unchecked(&raw)
    }

    pub fn neg(&self, x: &Element) -> Element {
        let raw: Vec<i64> = x.0.iter().map(|a| -a).collect();
        self.reduce_unchecked(&raw)
    }

    pub fn is_zero(&self, x: &Element) -> bool {
        x.0.iter().all(|&c| c == 0)
    }

    pub fn in_window(&self, x: &Element) -> bool {
        match &self.kind {
            GroupKind::Finite { .. } => true,
            GroupKind::Free { window, .. } => x.linf_norm() <= *window,
        }
    }

    /// All elements of a finite group, or of the window of `Z^d`, in
    /// lexicographic order.
    pub fn elements(&self) -> Vec<Element> {
        let ranges: Vec<(i64, i64)> = match &self.kind {
            GroupKind::Finite { orders } => orders.iter().map(|&n| (0, n as i64 - 1)).collect(),
            GroupKind::Free { rank, window } => vec![(-(*window as i64), *window as i64); *rank],
        };
        box_elements(&ranges)
    }

    /// Lexicographic index of an element of a finite group.
    pub fn index_of(&self, x: &Element) -> usize {
        let orders = self.orders().expect("index_of on a finite group");
        x.0.iter()
            .zip(orders)
            .fold(0usize, |acc, (&c, &n)| acc * n as usize + c as usize)
    }

    pub fn element_at(&self, mut index: usize) -> Element {
        let orders = self.orders().expect("element_at on a finite group");
        let mut coords = vec![0i64; orders.len()];
        for (c, &n) in coords.iter_mut().zip(orders).rev() {
            *c = (index % n as usize) as i64;
            index /= n as usize;
        }
        Element(coords)
    }

    /// Character phase `k` with `χ_y(x) = exp(2πi k / e)`, `e` the exponent.
    pub fn phase(&self, x: &Element, y: &Element) -> u64 {
        let orders = self.orders().expect("characters of a finite group");
        let e = self.exponent.unwrap() as u128;
        let mut acc: u128 = 0;
        for ((&a, &b), &n) in x.0.iter().zip(&y.0).zip(orders) {
            let scale = e / n as u128;
            acc = (acc + (a as u128 * b as u128 % n as u128) * scale) % e;
        }
        acc as u64
    }

    /// Partition of the group (or window) into inversion orbits `{x, -x}`.
    /// Each orbit lists its representative (the smaller element) first.
    pub fn inversion_orbits(&self) -> Vec<Orbit> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for x in self.elements() {
            if seen.contains(&x) {
                continue;
            }
            let nx = self.neg(&x);
            seen.insert(x.clone());
            let members = if nx == x {
                vec![x.clone()]
            } else {
                seen.insert(nx.clone());
                vec![x.clone(), nx]
            };
            out.push(Orbit { rep: x, members });
        }
        out
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            GroupKind::Finite { orders } => {
                for (i, n) in orders.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" x ")?;
                    }
                    write!(f, "Z_{n}")?;
                }
                Ok(())
            }
            GroupKind::Free { rank, window } => write!(f, "Z^{rank} (window {window})"),
        }
    }
}

pub(crate) fn box_elements(ranges: &[(i64, i64)]) -> Vec<Element> {
    let mut out = vec![Vec::with_capacity(ranges.len())];
    for &(lo, hi) in ranges {
        let mut next = Vec::with_capacity(out.len() * (hi - lo + 1).max(0) as usize);
        for prefix in &out {
            for c in lo..=hi {
                let mut v = prefix.clone();
                v.push(c);
                next.push(v);
            }
        }
        out = next;
    }
    out.into_iter().map(Element).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Orbit {
    pub rep: Element,
    pub members: Vec<Element>,
}

impl Orbit {
    pub fn size(&self) -> usize {
        self.members.len()
    }
}

/// A finite set of elements, or the complement of one.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Region {
    pub members: BTreeSet<Element>,
    #[serde(default)]
    pub complement: bool,
}

impl Region {
    pub fn new(members: impl IntoIterator<Item = Element>, complement: bool) -> Self {
        Region {
            members: members.into_iter().collect(),
            complement,
        }
    }

    pub fn finite(members: impl IntoIterator<Item = Element>) -> Self {
        Self::new(members, false)
    }

    pub fn co_finite(excluded: impl IntoIterator<Item = Element>) -> Self {
        Self::new(excluded, true)
    }

    /// Convenience for rank-one groups.
    pub fn from_ints(values: &[i64]) -> Self {
        Self::finite(values.iter().map(|&v| Element::scalar(v)))
    }

    pub fn empty() -> Self {
        Self::finite([])
    }

    pub fn everything() -> Self {
        Self::co_finite([])
    }

    pub fn contains(&self, x: &Element) -> bool {
        self.members.contains(x) != self.complement
    }

    /// Reduces member coordinates into canonical form for `group`.
    pub fn normalized(&self, group: &GroupSpec) -> Result<Region> {
        let members = self
            .members
            .iter()
            .map(|x| group.reduce(&x.0))
            .collect::<Result<BTreeSet<_>>>()?;
        Ok(Region {
            members,
            complement: self.complement,
        })
    }

    pub fn complemented(&self) -> Region {
        Region {
            members: self.members.clone(),
            complement: !self.complement,
        }
    }

    pub fn negated(&self, group: &GroupSpec) -> Region {
        Region {
            members: self.members.iter().map(|x| group.neg(x)).collect(),
            complement: self.complement,
        }
    }

    pub fn is_symmetric(&self, group: &GroupSpec) -> bool {
        self.members.iter().all(|x| self.members.contains(&group.neg(x)))
    }

    /// `Ω ∩ (−Ω)`.
    pub fn symmetrized(&self, group: &GroupSpec) -> Region {
        if self.complement {
            // (M^c) ∩ (−M)^c = (M ∪ −M)^c
            let mut members = self.members.clone();
            members.extend(self.members.iter().map(|x| group.neg(x)));
            Region {
                members,
                complement: true,
            }
        } else {
            Region {
                members: self
                    .members
                    .iter()
                    .filter(|x| self.members.contains(&group.neg(x)))
                    .cloned()
                    .collect(),
                complement: false,
            }
        }
    }

    /// Elements of the region inside the group (finite) or its window.
    pub fn materialize(&self, group: &GroupSpec) -> Vec<Element> {
        if self.complement || group.is_finite() {
            group.elements().into_iter().filter(|x| self.contains(x)).collect()
        } else {
            self.members.iter().cloned().collect()
        }
    }

    /// Number of members for finite regions.
    pub fn len(&self) -> Option<usize> {
        (!self.complement).then_some(self.members.len())
    }

    pub fn is_empty(&self) -> bool {
        !self.complement && self.members.is_empty()
    }
}

/// `Ω ∩ (−Ω)`; idempotent, output closed under negation.
pub fn symmetrize_region(group: &GroupSpec, region: &Region) -> Region {
    region.symmetrized(group)
}

/// Lattice `L = N·Z^d` with tile `B = {0,…,N−1}^d`. On a finite group the
/// tiling is trivial: `L = {0}`, `B = G`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeTiling {
    rank: usize,
    modulus: u64,
    finite: Option<Vec<u64>>,
}

impl LatticeTiling {
    pub fn new(rank: usize, modulus: u64) -> Result<Self> {
        if rank == 0 {
            return Err(Error::InvalidParameter("tiling rank must be >= 1".into()));
        }
        if modulus == 0 {
            return Err(Error::InvalidParameter("tiling modulus must be >= 1".into()));
        }
        Ok(LatticeTiling {
            rank,
            modulus,
            finite: None,
        })
    }

    /// The natural tiling for `group`; `modulus` is ignored for finite groups.
    pub fn for_group(group: &GroupSpec, modulus: u64) -> Result<Self> {
        match group.kind() {
            GroupKind::Finite { orders } => Ok(LatticeTiling {
                rank: orders.len(),
                modulus: 1,
                finite: Some(orders.clone()),
            }),
            GroupKind::Free { rank, .. } => Self::new(*rank, modulus),
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn is_trivial(&self) -> bool {
        self.finite.is_some()
    }

    /// `μ(B)`.
    pub fn tile_size(&self) -> u64 {
        match &self.finite {
            Some(orders) => orders.iter().product(),
            None => self.modulus.pow(self.rank as u32),
        }
    }

    pub fn tile(&self) -> Vec<Element> {
        match &self.finite {
            Some(orders) => box_elements(
                &orders.iter().map(|&n| (0, n as i64 - 1)).collect::<Vec<_>>(),
            ),
            None => box_elements(&vec![(0, self.modulus as i64 - 1); self.rank]),
        }
    }

    /// Unique `g = ℓ + b` with `ℓ ∈ L`, `b ∈ B`.
    pub fn decompose(&self, g: &Element) -> (Element, Element) {
        if self.finite.is_some() {
            return (Element(vec![0; self.rank]), g.clone());
        }
        let n = self.modulus as i64;
        let (l, b): (Vec<i64>, Vec<i64>) = g
            .0
            .iter()
            .map(|&c| {
                let b = c.rem_euclid(n);
                (c - b, b)
            })
            .unzip();
        (Element(l), Element(b))
    }

    /// Generator coefficients of the cell containing `g`; the cell is
    /// `B + N·key`.
    pub fn cell_key(&self, g: &Element) -> Element {
        let (l, _) = self.decompose(g);
        if self.finite.is_some() {
            return l;
        }
        Element(l.0.iter().map(|c| c / self.modulus as i64).collect())
    }

    pub fn cell_members(&self, key: &Element) -> Vec<Element> {
        if self.finite.is_some() {
            return self.tile();
        }
        let n = self.modulus as i64;
        let ranges: Vec<(i64, i64)> = key.0.iter().map(|&k| (k * n, k * n + n - 1)).collect();
        box_elements(&ranges)
    }

    pub fn is_lattice_point(&self, l: &Element) -> bool {
        if l.dim() != self.rank {
            return false;
        }
        match &self.finite {
            Some(_) => l.0.iter().all(|&c| c == 0),
            None => l.0.iter().all(|&c| c.rem_euclid(self.modulus as i64) == 0),
        }
    }

    /// `‖ℓ‖_L = max_j |n_j|` for `ℓ = N·(n_1,…,n_d)`.
    pub fn lattice_norm(&self, l: &Element) -> Result<u64> {
        if !self.is_lattice_point(l) {
            return Err(Error::NotLatticePoint(l.to_string()));
        }
        Ok(l.0
            .iter()
            .map(|c| (c / self.modulus as i64).unsigned_abs())
            .max()
            .unwrap_or(0))
    }

    /// Lattice points `ℓ` with `‖ℓ‖_L ≤ n`, as cell keys.
    pub fn keys_within(&self, n: u64) -> Vec<Element> {
        if self.finite.is_some() {
            return vec![Element(vec![0; self.rank])];
        }
        box_elements(&vec![(-(n as i64), n as i64); self.rank])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(v: i64) -> Element {
        Element::scalar(v)
    }

    #[test]
    fn make_group_examples() {
        let g = GroupSpec::finite(&[2]).unwrap();
        assert_eq!(g.exponent(), Some(2));
        assert!(g.exact_spectral());
        let g = GroupSpec::finite(&[2, 3]).unwrap();
        assert_eq!(g.order(), Some(6));
        assert_eq!(g.exponent(), Some(6));
        assert!(g.exact_spectral());
        let g = GroupSpec::finite(&[5]).unwrap();
        assert_eq!(g.exponent(), Some(5));
        assert!(!g.exact_spectral());
        assert_eq!(g.require_exact(), Err(Error::ExactUnavailable(5)));
    }

    #[test]
    fn make_group_errors() {
        assert!(GroupSpec::finite(&[]).is_err());
        assert!(GroupSpec::finite(&[3, 0]).is_err());
        assert!(GroupSpec::free(0, 3).is_err());
        assert!(GroupSpec::free(2, 0).is_ok());
    }

    #[test]
    fn symmetrize_examples() {
        let z5 = GroupSpec::cyclic(5).unwrap();
        let r = Region::from_ints(&[0, 1]);
        assert_eq!(symmetrize_region(&z5, &r), Region::from_ints(&[0]));

        let z4 = GroupSpec::cyclic(4).unwrap();
        let r = Region::from_ints(&[0, 1, 3]);
        assert_eq!(symmetrize_region(&z4, &r), r);

        let full = Region::everything();
        assert_eq!(symmetrize_region(&z4, &full), full);
    }

    #[test]
    fn symmetrize_complement_on_z() {
        let g = GroupSpec::free(1, 10).unwrap();
        let r = Region::co_finite([z(3)]);
        let s = symmetrize_region(&g, &r);
        assert!(!s.contains(&z(3)));
        assert!(!s.contains(&z(-3)));
        assert!(s.contains(&z(4)));
        assert!(s.is_symmetric(&g));
    }

    #[test]
    fn coset_decompose_examples() {
        let t = LatticeTiling::new(1, 3).unwrap();
        assert_eq!(t.decompose(&z(7)), (z(6), z(1)));
        assert_eq!(t.decompose(&z(-1)), (z(-3), z(2)));
        let t = LatticeTiling::new(2, 2).unwrap();
        assert_eq!(
            t.decompose(&Element::new(vec![3, -1])),
            (Element::new(vec![2, -2]), Element::new(vec![1, 1]))
        );
    }

    #[test]
    fn lattice_norm_examples() {
        let t = LatticeTiling::new(1, 3).unwrap();
        assert_eq!(t.lattice_norm(&z(-6)).unwrap(), 2);
        assert_eq!(t.lattice_norm(&z(0)).unwrap(), 0);
        assert!(matches!(t.lattice_norm(&z(4)), Err(Error::NotLatticePoint(_))));
        let t = LatticeTiling::new(2, 3).unwrap();
        assert_eq!(t.lattice_norm(&Element::new(vec![-6, 3])).unwrap(), 2);
    }

    #[test]
    fn negation_is_involution_on_small_groups() {
        for orders in [vec![4], vec![2, 3], vec![2, 2, 4], vec![8, 8], vec![3, 6]] {
            let g = GroupSpec::finite(&orders).unwrap();
            for x in g.elements() {
                assert_eq!(g.neg(&g.neg(&x)), x);
                assert_eq!(g.add(&x, &g.neg(&x)), g.zero());
            }
        }
    }

    #[test]
    fn orbits_partition_group() {
        for orders in [vec![4], vec![2, 3], vec![2, 2, 2], vec![6, 4], vec![7]] {
            let g = GroupSpec::finite(&orders).unwrap();
            let orbits = g.inversion_orbits();
            let mut all: Vec<Element> = orbits.iter().flat_map(|o| o.members.clone()).collect();
            all.sort();
            assert_eq!(all, g.elements());
            assert!(orbits.iter().all(|o| o.size() == 1 || o.size() == 2));
        }
        let z4 = GroupSpec::cyclic(4).unwrap();
        let reps: Vec<_> = z4.inversion_orbits().into_iter().map(|o| o.rep).collect();
        assert_eq!(reps, vec![z(0), z(1), z(2)]);
    }

    #[test]
    fn index_roundtrip() {
        let g = GroupSpec::finite(&[2, 3, 4]).unwrap();
        for (i, x) in g.elements().iter().enumerate() {
            assert_eq!(g.index_of(x), i);
            assert_eq!(&g.element_at(i), x);
        }
    }

    #[test]
    fn phases_are_bilinear() {
        let g = GroupSpec::finite(&[4, 6]).unwrap();
        let e = g.exponent().unwrap();
        let els = g.elements();
        for x in &els {
            for y in &els {
                for w in els.iter().step_by(5) {
                    let lhs = g.phase(&g.add(x, w), y);
                    let rhs = (g.phase(x, y) + g.phase(w, y)) % e;
                    assert_eq!(lhs, rhs);
                }
                assert_eq!(g.phase(x, y), g.phase(y, x));
            }
        }
    }
}
