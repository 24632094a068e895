//! Finite topological spaces.
//!
//! Opens are stored explicitly together with the minimal neighbourhood of
//! every point. Convention: opens are the up-sets of the specialization
//! preorder, so `min_nbhd(x) = { y : x <= y }`.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Upper bound on carrier size imposed by the word-packed set representation.
pub const MAX_POINTS: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TopologyError {
    #[error("point {point} out of range for a space of {points} points")]
    IndexOutOfRange { point: usize, points: usize },
    #[error("{0} points exceeds the supported maximum of 64")]
    TooManyPoints(usize),
    #[error("relation is not transitive: {0} <= {1} and {1} <= {2} but not {0} <= {2}")]
    NotTransitive(usize, usize, usize),
    #[error("not a topology: {0}")]
    NotATopology(String),
    #[error("topology JSON must contain exactly one of `opens`, `subbasis`, `preorder`")]
    AmbiguousSpec,
}

/// A subset of `0..n`, packed into one machine word.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct PointSet(u64);

impl PointSet {
    pub const EMPTY: PointSet = PointSet(0);

    pub fn from_bits(bits: u64) -> PointSet {
        PointSet(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn full(n: usize) -> PointSet {
        if n >= 64 {
            PointSet(u64::MAX)
        } else {
            PointSet((1u64 << n) - 1)
        }
    }

    pub fn singleton(x: usize) -> PointSet {
        PointSet(1u64 << x)
    }

    pub fn contains(self, x: usize) -> bool {
        x < 64 && self.0 & (1u64 << x) != 0
    }

    pub fn insert(&mut self, x: usize) {
        self.0 |= 1u64 << x;
    }

    pub fn remove(&mut self, x: usize) {
        self.0 &= !(1u64 << x);
    }

    pub fn union(self, other: PointSet) -> PointSet {
        PointSet(self.0 | other.0)
    }

    pub fn intersection(self, other: PointSet) -> PointSet {
        PointSet(self.0 & other.0)
    }

    pub fn difference(self, other: PointSet) -> PointSet {
        PointSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: PointSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn intersects(self, other: PointSet) -> bool {
        self.0 & other.0 != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn min(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let x = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(x)
            }
        })
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }

    /// All subsets of `0..n` in increasing bit order.
    pub fn all_subsets(n: usize) -> impl Iterator<Item = PointSet> {
        assert!(n < 64, "cannot enumerate subsets of {n} points");
        (0u64..(1u64 << n)).map(PointSet)
    }

    /// Canonical witness order: by cardinality, then lexicographically on
    /// the sorted element list.
    pub fn witness_cmp(&self, other: &PointSet) -> std::cmp::Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.to_vec().cmp(&other.to_vec()))
    }

    pub fn check_range(self, n: usize) -> Result<(), TopologyError> {
        match self.difference(PointSet::full(n)).min() {
            Some(point) => Err(TopologyError::IndexOutOfRange { point, points: n }),
            None => Ok(()),
        }
    }
}

impl FromIterator<usize> for PointSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> PointSet {
        let mut s = PointSet::EMPTY;
        for x in iter {
            s.insert(x);
        }
        s
    }
}

impl fmt::Debug for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, x) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "}}")
    }
}

impl Serialize for PointSet {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for PointSet {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<PointSet, D::Error> {
        let items = Vec::<usize>::deserialize(deserializer)?;
        if let Some(&bad) = items.iter().find(|&&x| x >= MAX_POINTS) {
            return Err(serde::de::Error::custom(format!("point index {bad} exceeds 63")));
        }
        Ok(items.into_iter().collect())
    }
}

/// A finite topological space on points `0..n`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TopoSpace {
    n: usize,
    /// Sorted in witness order; always contains the empty and full sets.
    opens: Vec<PointSet>,
    min_nbhd: Vec<PointSet>,
}

impl TopoSpace {
    /// The topology whose minimal neighbourhoods are `nbhd`. Each `nbhd[x]`
    /// must contain `x` and satisfy `y in nbhd[x] => nbhd[y] ⊆ nbhd[x]`.
    fn from_min_nbhds(n: usize, nbhd: Vec<PointSet>) -> TopoSpace {
        let mut opens = BTreeSet::new();
        opens.insert(PointSet::EMPTY);
        for x in 0..n {
            let with_x: Vec<PointSet> = opens.iter().map(|&o| o.union(nbhd[x])).collect();
            opens.extend(with_x);
        }
        let mut opens: Vec<PointSet> = opens.into_iter().collect();
        opens.sort_by(PointSet::witness_cmp);
        TopoSpace {
            n,
            opens,
            min_nbhd: nbhd,
        }
    }

    fn check_size(n: usize) -> Result<(), TopologyError> {
        if n > MAX_POINTS {
            Err(TopologyError::TooManyPoints(n))
        } else {
            Ok(())
        }
    }

    pub fn discrete(n: usize) -> TopoSpace {
        TopoSpace::from_min_nbhds(n, (0..n).map(PointSet::singleton).collect())
    }

    pub fn indiscrete(n: usize) -> TopoSpace {
        TopoSpace::from_min_nbhds(n, vec![PointSet::full(n); n])
    }

    /// Two points, opens `{}, {1}, {0,1}`.
    pub fn sierpinski() -> TopoSpace {
        TopoSpace::from_preorder(2, &[(0, 1)]).expect("chain is a preorder")
    }

    /// Smallest topology containing every set of `sub`.
    pub fn from_subbasis(n: usize, sub: &[PointSet]) -> Result<TopoSpace, TopologyError> {
        TopoSpace::check_size(n)?;
        for s in sub {
            s.check_range(n)?;
        }
        let nbhd = (0..n)
            .map(|x| {
                sub.iter()
                    .filter(|s| s.contains(x))
                    .fold(PointSet::full(n), |acc, s| acc.intersection(*s))
            })
            .collect();
        Ok(TopoSpace::from_min_nbhds(n, nbhd))
    }

    /// The Alexandrov topology of up-sets of `le`. Reflexive pairs are
    /// implied; a non-transitive relation is rejected.
    pub fn from_preorder(n: usize, le: &[(usize, usize)]) -> Result<TopoSpace, TopologyError> {
        TopoSpace::check_size(n)?;
        let mut up: Vec<PointSet> = (0..n).map(PointSet::singleton).collect();
        for &(x, y) in le {
            for p in [x, y] {
                if p >= n {
                    return Err(TopologyError::IndexOutOfRange { point: p, points: n });
                }
            }
            up[x].insert(y);
        }
        for x in 0..n {
            for y in up[x].iter() {
                if let Some(z) = up[y].difference(up[x]).min() {
                    return Err(TopologyError::NotTransitive(x, y, z));
                }
            }
        }
        Ok(TopoSpace::from_min_nbhds(n, up))
    }

    /// Validates an explicit family of opens.
    pub fn from_opens(n: usize, family: &[PointSet]) -> Result<TopoSpace, TopologyError> {
        TopoSpace::check_size(n)?;
        for s in family {
            s.check_range(n)?;
        }
        let set: BTreeSet<PointSet> = family.iter().copied().collect();
        if !set.contains(&PointSet::EMPTY) {
            return Err(TopologyError::NotATopology("empty set missing".into()));
        }
        if !set.contains(&PointSet::full(n)) {
            return Err(TopologyError::NotATopology("full set missing".into()));
        }
        for &a in &set {
            for &b in &set {
                if !set.contains(&a.union(b)) {
                    return Err(TopologyError::NotATopology(format!("{a} ∪ {b} missing")));
                }
                if !set.contains(&a.intersection(b)) {
                    return Err(TopologyError::NotATopology(format!("{a} ∩ {b} missing")));
                }
            }
        }
        let nbhd: Vec<PointSet> = (0..n)
            .map(|x| {
                set.iter()
                    .filter(|o| o.contains(x))
                    .fold(PointSet::full(n), |acc, o| acc.intersection(*o))
            })
            .collect();
        let space = TopoSpace::from_min_nbhds(n, nbhd);
        debug_assert_eq!(space.opens.len(), set.len());
        Ok(space)
    }

    pub fn points(&self) -> usize {
        self.n
    }

    pub fn carrier(&self) -> PointSet {
        PointSet::full(self.n)
    }

    /// Opens in witness order (cardinality, then lexicographic).
    pub fn opens(&self) -> &[PointSet] {
        &self.opens
    }

    pub fn min_nbhd(&self, x: usize) -> PointSet {
        self.min_nbhd[x]
    }

    pub fn min_nbhds(&self) -> &[PointSet] {
        &self.min_nbhd
    }

    pub fn is_open(&self, a: PointSet) -> bool {
        a.iter().all(|x| self.min_nbhd[x].is_subset(a))
    }

    pub fn interior(&self, a: PointSet) -> PointSet {
        a.iter().filter(|&x| self.min_nbhd[x].is_subset(a)).collect()
    }

    pub fn closure(&self, a: PointSet) -> PointSet {
        (0..self.n).filter(|&x| self.min_nbhd[x].intersects(a)).collect()
    }

    /// Specialization preorder as pairs `(x, y)` with `x <= y`, i.e.
    /// `y ∈ min_nbhd(x)`, reflexive pairs included.
    pub fn specialization_preorder(&self) -> Vec<(usize, usize)> {
        (0..self.n)
            .flat_map(|x| self.min_nbhd[x].iter().map(move |y| (x, y)))
            .collect()
    }

    /// Index of an open set in [`TopoSpace::opens`].
    pub fn open_index(&self, a: PointSet) -> Option<usize> {
        self.opens.iter().position(|&o| o == a)
    }

    /// Every topology on `n` labeled points, one per preorder, in a fixed
    /// order: relations are enumerated as bitmasks over the off-diagonal
    /// pairs in row-major order and non-transitive ones skipped.
    pub fn enumerate(n: usize) -> Vec<TopoSpace> {
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|x| (0..n).filter(move |&y| y != x).map(move |y| (x, y)))
            .collect();
        assert!(pairs.len() < 32, "too many points to enumerate topologies");
        let mut out = Vec::new();
        for mask in 0u32..(1u32 << pairs.len()) {
            let rel: Vec<(usize, usize)> = pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, &p)| p)
                .collect();
            if let Ok(space) = TopoSpace::from_preorder(n, &rel) {
                out.push(space);
            }
        }
        out
    }
}

impl fmt::Debug for TopoSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TopoSpace")
            .field("points", &self.n)
            .field("opens", &self.opens)
            .finish()
    }
}

/// JSON form of a space: `points` plus exactly one of `opens`, `subbasis`
/// or `preorder`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopologySpec {
    pub points: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub opens: Option<Vec<PointSet>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub subbasis: Option<Vec<PointSet>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub preorder: Option<Vec<(usize, usize)>>,
}

impl TopologySpec {
    pub fn build(&self) -> Result<TopoSpace, TopologyError> {
        match (&self.opens, &self.subbasis, &self.preorder) {
            (Some(opens), None, None) => TopoSpace::from_opens(self.points, opens),
            (None, Some(sub), None) => TopoSpace::from_subbasis(self.points, sub),
            (None, None, Some(le)) => TopoSpace::from_preorder(self.points, le),
            _ => Err(TopologyError::AmbiguousSpec),
        }
    }
}

impl From<&TopoSpace> for TopologySpec {
    fn from(space: &TopoSpace) -> TopologySpec {
        TopologySpec {
            points: space.n,
            opens: Some(space.opens.clone()),
            subbasis: None,
            preorder: None,
        }
    }
}

impl Serialize for TopoSpace {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        TopologySpec::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for TopoSpace {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<TopoSpace, D::Error> {
        TopologySpec::deserialize(deserializer)?
            .build()
            .map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(xs: &[usize]) -> PointSet {
        xs.iter().copied().collect()
    }

    /// Closes a family under pairwise union and intersection by brute force
    /// and adds the empty and full sets.
    fn brute_closure(n: usize, sub: &[PointSet]) -> BTreeSet<PointSet> {
        let mut family: BTreeSet<PointSet> = sub.iter().copied().collect();
        family.insert(PointSet::EMPTY);
        family.insert(PointSet::full(n));
        loop {
            let mut next = family.clone();
            for &a in &family {
                for &b in &family {
                    next.insert(a.union(b));
                    next.insert(a.intersection(b));
                }
            }
            if next == family {
                return family;
            }
            family = next;
        }
    }

    fn opens_set(t: &TopoSpace) -> BTreeSet<PointSet> {
        t.opens().iter().copied().collect()
    }

    #[test]
    fn subbasis_examples() {
        let t = TopoSpace::from_subbasis(2, &[]).unwrap();
        assert_eq!(opens_set(&t), [set(&[]), set(&[0, 1])].into_iter().collect());
        let t = TopoSpace::from_subbasis(2, &[set(&[0]), set(&[1])]).unwrap();
        assert_eq!(t.opens().len(), 4);
        let sub = [set(&[0, 1]), set(&[1, 2])];
        let t = TopoSpace::from_subbasis(3, &sub).unwrap();
        assert_eq!(opens_set(&t), brute_closure(3, &sub));
        assert_eq!(
            opens_set(&t),
            [set(&[]), set(&[1]), set(&[0, 1]), set(&[1, 2]), set(&[0, 1, 2])]
                .into_iter()
                .collect()
        );
    }

    #[test]
    fn subbasis_is_idempotent() {
        let t = TopoSpace::from_subbasis(3, &[set(&[0, 1]), set(&[1, 2])]).unwrap();
        let again = TopoSpace::from_subbasis(3, t.opens()).unwrap();
        assert_eq!(t, again);
    }

    #[test]
    fn subbasis_out_of_range() {
        assert_eq!(
            TopoSpace::from_subbasis(2, &[set(&[2])]),
            Err(TopologyError::IndexOutOfRange { point: 2, points: 2 })
        );
    }

    #[test]
    fn preorder_examples() {
        let t = TopoSpace::from_preorder(3, &[]).unwrap();
        assert_eq!(t.opens().len(), 8);
        let t = TopoSpace::from_preorder(2, &[(0, 1), (1, 0)]).unwrap();
        assert_eq!(t, TopoSpace::indiscrete(2));
        let t = TopoSpace::sierpinski();
        assert_eq!(opens_set(&t), [set(&[]), set(&[1]), set(&[0, 1])].into_iter().collect());
        assert!(matches!(
            TopoSpace::from_preorder(3, &[(0, 1), (1, 2)]),
            Err(TopologyError::NotTransitive(0, 1, 2))
        ));
    }

    #[test]
    fn interior_and_closure_examples() {
        let s = TopoSpace::sierpinski();
        assert_eq!(s.interior(set(&[0])), PointSet::EMPTY);
        assert_eq!(s.interior(s.carrier()), s.carrier());
        assert_eq!(s.closure(set(&[1])), set(&[0, 1]));
        assert_eq!(s.closure(PointSet::EMPTY), PointSet::EMPTY);
        let t = TopoSpace::from_subbasis(3, &[set(&[0, 1]), set(&[1, 2])]).unwrap();
        assert_eq!(t.interior(set(&[1, 2])), set(&[1, 2]));
        assert_eq!(t.closure(set(&[0])), set(&[0]));
    }

    #[test]
    fn min_nbhd_examples() {
        let d = TopoSpace::discrete(3);
        let i = TopoSpace::indiscrete(3);
        for x in 0..3 {
            assert_eq!(d.min_nbhd(x), PointSet::singleton(x));
            assert_eq!(i.min_nbhd(x), i.carrier());
        }
        let s = TopoSpace::sierpinski();
        assert_eq!(s.min_nbhd(0), set(&[0, 1]));
        assert_eq!(s.min_nbhd(1), set(&[1]));
    }

    #[test]
    fn topology_counts() {
        assert_eq!(TopoSpace::enumerate(1).len(), 1);
        assert_eq!(TopoSpace::enumerate(2).len(), 4);
        assert_eq!(TopoSpace::enumerate(3).len(), 29);
        assert_eq!(TopoSpace::enumerate(4).len(), 355);
    }

    #[test]
    fn from_opens_validates() {
        assert!(TopoSpace::from_opens(2, &[set(&[]), set(&[0]), set(&[1])]).is_err());
        let t = TopoSpace::from_opens(2, &[set(&[]), set(&[1]), set(&[0, 1])]).unwrap();
        assert_eq!(t, TopoSpace::sierpinski());
    }

    /// Interior computed straight from the definition: the union of all
    /// opens contained in the set.
    fn interior_by_opens(t: &TopoSpace, a: PointSet) -> PointSet {
        t.opens()
            .iter()
            .filter(|o| o.is_subset(a))
            .fold(PointSet::EMPTY, |acc, o| acc.union(*o))
    }

    #[test]
    fn kuratowski_exhaustive_up_to_four_points() {
        for n in 1..=4 {
            for t in TopoSpace::enumerate(n) {
                let x = t.carrier();
                assert_eq!(t.interior(x), x);
                for a in PointSet::all_subsets(n) {
                    let ia = t.interior(a);
                    assert_eq!(ia, interior_by_opens(&t, a));
                    assert!(ia.is_subset(a));
                    assert_eq!(t.interior(ia), ia);
                    assert_eq!(t.closure(a), x.difference(t.interior(x.difference(a))));
                    assert_eq!(t.is_open(a), t.interior(a) == a);
                    let union_of_nbhds = a.iter().fold(PointSet::EMPTY, |acc, y| acc.union(t.min_nbhd(y)));
                    assert_eq!(t.is_open(a), union_of_nbhds == a);
                    for b in PointSet::all_subsets(n) {
                        assert_eq!(t.interior(a.intersection(b)), ia.intersection(t.interior(b)));
                    }
                }
            }
        }
    }

    #[test]
    fn alexandrov_correspondence_round_trips() {
        for n in 1..=4 {
            for t in TopoSpace::enumerate(n) {
                let le = t.specialization_preorder();
                let back = TopoSpace::from_preorder(n, &le).unwrap();
                assert_eq!(back, t);
                assert_eq!(back.specialization_preorder(), le);
            }
        }
    }

    #[test]
    fn json_fragment_forms() {
        let from_opens: TopoSpace = serde_json::from_str(r#"{"points":2,"opens":[[],[1],[0,1]]}"#).unwrap();
        let from_sub: TopoSpace = serde_json::from_str(r#"{"points":2,"subbasis":[[1]]}"#).unwrap();
        let from_pre: TopoSpace = serde_json::from_str(r#"{"points":2,"preorder":[[0,1]]}"#).unwrap();
        assert_eq!(from_opens, TopoSpace::sierpinski());
        assert_eq!(from_sub, TopoSpace::sierpinski());
        assert_eq!(from_pre, TopoSpace::sierpinski());
        assert!(serde_json::from_str::<TopoSpace>(r#"{"points":2,"subbasis":[[1]],"preorder":[]}"#).is_err());
        assert!(serde_json::from_str::<TopoSpace>(r#"{"points":2}"#).is_err());
        let text = serde_json::to_string(&TopoSpace::sierpinski()).unwrap();
        assert_eq!(text, r#"{"points":2,"opens":[[],[1],[0,1]]}"#);
    }
}
