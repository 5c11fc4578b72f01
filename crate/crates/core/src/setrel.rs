//! Finite carriers, subsets as characteristic bitmasks, and binary relations.
//!
//! Subsets are indexed little-endian by element order: element `i` is bit `i`
//! of the mask, so the subsets of an `n`-point carrier are exactly the masks
//! `0..2^n` and enumeration order is fixed.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Largest carrier representable with `u32` row masks.
pub const MAX_CARRIER: usize = 31;
/// Cap applied by [`Carrier::new`].
pub const DEFAULT_CARRIER_CAP: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Carrier {
    names: Vec<String>,
}

pub type CarrierRef = Arc<Carrier>;

impl Carrier {
    pub fn new<I, S>(names: I) -> Result<CarrierRef>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self::with_cap(names, DEFAULT_CARRIER_CAP)
    }

    pub fn with_cap<I, S>(names: I, cap: usize) -> Result<CarrierRef>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(Error::invalid(
                "carrier",
                "a carrier needs at least one element",
            ));
        }
        let cap = cap.min(MAX_CARRIER);
        if names.len() > cap {
            return Err(Error::ResourceCap {
                what: "carrier",
                size: names.len(),
                cap,
            });
        }
        let mut seen = HashSet::new();
        for name in &names {
            if !seen.insert(name.as_str()) {
                return Err(Error::invalid(
                    "carrier",
                    format!("element `{name}` is listed twice"),
                ));
            }
        }
        Ok(Arc::new(Carrier { names }))
    }

    /// Carrier `{0, 1, ..., n-1}` named by decimal indices.
    pub fn range(n: usize) -> Result<CarrierRef> {
        Self::new((0..n).map(|i| i.to_string()))
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn full(&self) -> Subset {
        Subset::full(self.len())
    }

    pub fn subset_count(&self) -> usize {
        1usize << self.len()
    }

    /// All subsets, in characteristic-vector order.
    pub fn subsets(&self) -> impl Iterator<Item = Subset> + Clone {
        (0..self.subset_count() as u32).map(Subset)
    }

    pub fn complement(&self, a: Subset) -> Subset {
        Subset(!a.0 & self.full().0)
    }

    pub fn subset_from_names<I, S>(&self, names: I) -> Result<Subset>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut s = Subset::EMPTY;
        for name in names {
            let name = name.as_ref();
            let i = self.index_of(name).ok_or_else(|| {
                Error::invalid("subset", format!("`{name}` is not a carrier element"))
            })?;
            s = s.with(i);
        }
        Ok(s)
    }

    pub fn format_subset(&self, s: Subset) -> String {
        let inner: Vec<&str> = s.iter().map(|i| self.name(i)).collect();
        format!("{{{}}}", inner.join(","))
    }
}

/// A subset of a carrier as a characteristic bitmask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Subset(pub u32);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub fn full(n: usize) -> Subset {
        if n >= 32 {
            Subset(u32::MAX)
        } else {
            Subset((1u32 << n) - 1)
        }
    }

    pub fn singleton(i: usize) -> Subset {
        Subset(1 << i)
    }

    pub fn from_elements<I: IntoIterator<Item = usize>>(elements: I) -> Subset {
        elements.into_iter().fold(Subset::EMPTY, Subset::with)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn with(self, i: usize) -> Subset {
        Subset(self.0 | 1 << i)
    }

    pub fn union(self, other: Subset) -> Subset {
        Subset(self.0 | other.0)
    }

    pub fn intersection(self, other: Subset) -> Subset {
        Subset(self.0 & other.0)
    }

    pub fn difference(self, other: Subset) -> Subset {
        Subset(self.0 & !other.0)
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn meets(self, other: Subset) -> bool {
        self.0 & other.0 != 0
    }

    pub fn is_subset_of(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(self) -> SubsetIter {
        SubsetIter(self.0)
    }
}

/// Iterates the elements of a subset in increasing order.
#[derive(Debug, Clone)]
pub struct SubsetIter(u32);

impl Iterator for SubsetIter {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(i)
    }
}

/// A binary relation on a carrier, stored extensionally as one row mask per
/// element: bit `y` of row `x` is set iff `(x, y)` is in the relation.
#[derive(Debug, Clone)]
pub struct Rel {
    carrier: CarrierRef,
    rows: Vec<u32>,
}

pub(crate) fn same_carrier(a: &CarrierRef, b: &CarrierRef) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

impl PartialEq for Rel {
    fn eq(&self, other: &Self) -> bool {
        same_carrier(&self.carrier, &other.carrier) && self.rows == other.rows
    }
}

impl Eq for Rel {}

impl std::hash::Hash for Rel {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.rows.hash(state);
    }
}

impl Rel {
    pub fn empty(carrier: &CarrierRef) -> Rel {
        Rel {
            carrier: carrier.clone(),
            rows: vec![0; carrier.len()],
        }
    }

    /// The diagonal `Δ_X`.
    pub fn diagonal(carrier: &CarrierRef) -> Rel {
        Rel {
            carrier: carrier.clone(),
            rows: (0..carrier.len()).map(|i| 1 << i).collect(),
        }
    }

    /// The full relation `X × X`.
    pub fn full(carrier: &CarrierRef) -> Rel {
        Rel {
            carrier: carrier.clone(),
            rows: vec![carrier.full().0; carrier.len()],
        }
    }

    pub fn from_pairs<I>(carrier: &CarrierRef, pairs: I) -> Result<Rel>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let n = carrier.len();
        let mut rows = vec![0u32; n];
        for (x, y) in pairs {
            if x >= n || y >= n {
                return Err(Error::invalid(
                    "relation",
                    format!("pair ({x},{y}) leaves a carrier of size {n}"),
                ));
            }
            rows[x] |= 1 << y;
        }
        Ok(Rel {
            carrier: carrier.clone(),
            rows,
        })
    }

    pub fn from_rows(carrier: &CarrierRef, rows: Vec<Subset>) -> Result<Rel> {
        if rows.len() != carrier.len() {
            return Err(Error::invalid(
                "relation",
                format!(
                    "{} rows for a carrier of size {}",
                    rows.len(),
                    carrier.len()
                ),
            ));
        }
        let full = carrier.full();
        if let Some(x) = rows.iter().position(|r| !r.is_subset_of(full)) {
            return Err(Error::invalid(
                "relation",
                format!("row {x} names elements outside the carrier"),
            ));
        }
        Ok(Rel {
            carrier: carrier.clone(),
            rows: rows.into_iter().map(|r| r.0).collect(),
        })
    }

    pub fn from_fn(carrier: &CarrierRef, f: impl Fn(usize, usize) -> bool) -> Rel {
        let n = carrier.len();
        let rows = (0..n)
            .map(|x| {
                (0..n)
                    .filter(|&y| f(x, y))
                    .fold(0u32, |acc, y| acc | 1 << y)
            })
            .collect();
        Rel {
            carrier: carrier.clone(),
            rows,
        }
    }

    pub fn carrier(&self) -> &CarrierRef {
        &self.carrier
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        self.rows[x] >> y & 1 == 1
    }

    /// The neighborhood `ε(x) = {y : (x, y) ∈ ε}`.
    pub fn row(&self, x: usize) -> Subset {
        Subset(self.rows[x])
    }

    pub fn rows(&self) -> impl Iterator<Item = Subset> + '_ {
        self.rows.iter().map(|&r| Subset(r))
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(x, &r)| Subset(r).iter().map(move |y| (x, y)))
    }

    pub fn pair_count(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones() as usize).sum()
    }

    fn check_carrier(&self, other: &Rel, op: &str) -> Result<()> {
        if same_carrier(&self.carrier, &other.carrier) {
            Ok(())
        } else {
            Err(Error::CarrierMismatch(format!(
                "{op} of relations over different carriers"
            )))
        }
    }

    /// `{(x, z) : ∃y, (x, y) ∈ self and (y, z) ∈ other}`.
    pub fn compose(&self, other: &Rel) -> Result<Rel> {
        self.check_carrier(other, "composition")?;
        let rows = self
            .rows
            .iter()
            .map(|&r| Subset(r).iter().fold(0u32, |acc, y| acc | other.rows[y]))
            .collect();
        Ok(Rel {
            carrier: self.carrier.clone(),
            rows,
        })
    }

    pub fn invert(&self) -> Rel {
        let n = self.carrier.len();
        let mut rows = vec![0u32; n];
        for (x, y) in self.pairs() {
            rows[y] |= 1 << x;
        }
        Rel {
            carrier: self.carrier.clone(),
            rows,
        }
    }

    /// `⋃_{a ∈ A} ε(a)`.
    pub fn image_of_set(&self, a: Subset) -> Subset {
        Subset(a.iter().fold(0u32, |acc, x| acc | self.rows[x]))
    }

    /// Whether the relation meets the product `A × B`.
    pub fn meets_product(&self, a: Subset, b: Subset) -> bool {
        a.iter().any(|x| self.rows[x] & b.0 != 0)
    }

    pub fn is_subset_of(&self, other: &Rel) -> bool {
        debug_assert!(same_carrier(&self.carrier, &other.carrier));
        self.rows.iter().zip(&other.rows).all(|(a, b)| a & !b == 0)
    }

    pub fn intersection(&self, other: &Rel) -> Rel {
        debug_assert!(same_carrier(&self.carrier, &other.carrier));
        Rel {
            carrier: self.carrier.clone(),
            rows: self
                .rows
                .iter()
                .zip(&other.rows)
                .map(|(a, b)| a & b)
                .collect(),
        }
    }

    pub fn union(&self, other: &Rel) -> Rel {
        debug_assert!(same_carrier(&self.carrier, &other.carrier));
        Rel {
            carrier: self.carrier.clone(),
            rows: self
                .rows
                .iter()
                .zip(&other.rows)
                .map(|(a, b)| a | b)
                .collect(),
        }
    }

    pub fn is_reflexive(&self) -> bool {
        self.rows.iter().enumerate().all(|(x, r)| r >> x & 1 == 1)
    }

    pub fn is_symmetric(&self) -> bool {
        *self == self.invert()
    }

    pub fn is_transitive(&self) -> bool {
        self.compose(self)
            .map(|c| c.is_subset_of(self))
            .unwrap_or(false)
    }

    pub fn is_equivalence(&self) -> bool {
        self.is_reflexive() && self.is_symmetric() && self.is_transitive()
    }

    /// The image `{(p(x), p(y)) : (x, y) ∈ self}` under a carrier permutation.
    pub fn map_by(&self, perm: &[usize]) -> Rel {
        let mut rows = vec![0u32; self.rows.len()];
        for (x, y) in self.pairs() {
            rows[perm[x]] |= 1 << perm[y];
        }
        Rel {
            carrier: self.carrier.clone(),
            rows,
        }
    }
}

impl fmt::Display for Rel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pairs: Vec<String> = self
            .pairs()
            .map(|(x, y)| format!("({},{})", self.carrier.name(x), self.carrier.name(y)))
            .collect();
        write!(f, "{{{}}}", pairs.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn abc() -> CarrierRef {
        Carrier::new(["a", "b", "c"]).unwrap()
    }

    /// Composition by enumerating every triple.
    fn compose_oracle(r: &Rel, s: &Rel) -> Vec<(usize, usize)> {
        let n = r.carrier().len();
        let mut out = Vec::new();
        for x in 0..n {
            for z in 0..n {
                if (0..n).any(|y| r.contains(x, y) && s.contains(y, z)) {
                    out.push((x, z));
                }
            }
        }
        out
    }

    #[test]
    fn carrier_rejects_duplicates_and_empty() {
        assert!(Carrier::new(["a", "a"]).is_err());
        assert!(Carrier::new(Vec::<String>::new()).is_err());
        assert!(matches!(
            Carrier::range(13),
            Err(Error::ResourceCap { cap: 12, .. })
        ));
        assert_eq!(
            Carrier::with_cap((0..20).map(|i| i.to_string()), 20)
                .unwrap()
                .len(),
            20
        );
    }

    #[test]
    fn subsets_are_little_endian() {
        let c = abc();
        let subsets: Vec<_> = c.subsets().collect();
        assert_eq!(subsets.len(), 8);
        assert_eq!(c.format_subset(subsets[5]), "{a,c}");
        assert_eq!(c.subset_from_names(["c", "a"]).unwrap(), Subset(5));
    }

    #[test]
    fn compose_examples() {
        let c = abc();
        let r = Rel::from_pairs(&c, [(0, 1)]).unwrap();
        let s = Rel::from_pairs(&c, [(1, 2)]).unwrap();
        let d = Rel::diagonal(&c);
        assert_eq!(d.compose(&r).unwrap(), r);
        assert_eq!(r.compose(&d).unwrap(), r);
        let rs = r.compose(&s).unwrap();
        assert_eq!(rs.pairs().collect::<Vec<_>>(), compose_oracle(&r, &s));
        assert_eq!(rs.pairs().collect::<Vec<_>>(), vec![(0, 2)]);
    }

    #[test]
    fn compose_rejects_foreign_carrier() {
        let r = Rel::diagonal(&abc());
        let s = Rel::diagonal(&Carrier::new(["x", "y", "z"]).unwrap());
        assert!(matches!(r.compose(&s), Err(Error::CarrierMismatch(_))));
        // Equal-valued carriers in different allocations are the same carrier.
        assert!(r.compose(&Rel::diagonal(&abc())).is_ok());
    }

    #[test]
    fn invert_examples() {
        let c = abc();
        assert_eq!(Rel::diagonal(&c).invert(), Rel::diagonal(&c));
        let r = Rel::from_pairs(&c, [(0, 1)]).unwrap();
        assert_eq!(r.invert().pairs().collect::<Vec<_>>(), vec![(1, 0)]);
    }

    #[test]
    fn image_examples() {
        let c = abc();
        let a = Subset::from_elements([0, 1]);
        assert_eq!(Rel::diagonal(&c).image_of_set(a), a);
        assert_eq!(Rel::full(&c).image_of_set(Subset::singleton(0)), c.full());
        let r = Rel::from_pairs(&c, [(0, 1), (1, 2)]).unwrap();
        assert_eq!(r.image_of_set(a), Subset::from_elements([1, 2]));
    }

    fn rel_on(n: usize) -> impl Strategy<Value = Rel> {
        prop::collection::vec(0u32..(1 << n), n).prop_map(move |rows| {
            let c = Carrier::range(n).unwrap();
            Rel::from_rows(&c, rows.into_iter().map(Subset).collect()).unwrap()
        })
    }

    fn triple(n: usize) -> impl Strategy<Value = (Rel, Rel, Rel)> {
        (rel_on(n), rel_on(n), rel_on(n))
    }

    proptest! {
        #[test]
        fn compose_matches_triple_enumeration((r, s, _) in triple(4)) {
            prop_assert_eq!(r.compose(&s).unwrap().pairs().collect::<Vec<_>>(), compose_oracle(&r, &s));
        }

        #[test]
        fn compose_is_associative((r, s, t) in triple(4)) {
            let left = r.compose(&s).unwrap().compose(&t).unwrap();
            let right = r.compose(&s.compose(&t).unwrap()).unwrap();
            prop_assert_eq!(left, right);
        }

        #[test]
        fn invert_is_involutive_anti_homomorphism((r, s, _) in triple(3)) {
            prop_assert_eq!(r.invert().invert(), r.clone());
            prop_assert_eq!(
                r.compose(&s).unwrap().invert(),
                s.invert().compose(&r.invert()).unwrap()
            );
        }

        #[test]
        fn image_distributes_over_union(r in rel_on(5), a in 0u32..32, b in 0u32..32) {
            let (a, b) = (Subset(a), Subset(b));
            prop_assert_eq!(
                r.image_of_set(a.union(b)),
                r.image_of_set(a).union(r.image_of_set(b))
            );
        }
    }

    #[test]
    fn sparse_relations_compose_associatively_exhaustively() {
        // Every relation on three points with at most two pairs.
        let c = Carrier::range(3).unwrap();
        let all_pairs: Vec<(usize, usize)> =
            (0..3).flat_map(|x| (0..3).map(move |y| (x, y))).collect();
        let mut sparse = vec![Rel::empty(&c)];
        for (i, &p) in all_pairs.iter().enumerate() {
            sparse.push(Rel::from_pairs(&c, [p]).unwrap());
            for &q in &all_pairs[i + 1..] {
                sparse.push(Rel::from_pairs(&c, [p, q]).unwrap());
            }
        }
        for r in &sparse {
            for s in &sparse {
                let rs = r.compose(s).unwrap();
                for t in &sparse {
                    assert_eq!(
                        rs.compose(t).unwrap(),
                        r.compose(&s.compose(t).unwrap()).unwrap()
                    );
                }
            }
        }
    }
}
