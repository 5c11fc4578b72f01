//! Proximity relations on finite carriers.
//!
//! A [`Prox`] is a fully materialized `2^n × 2^n` nearness table. It is not
//! validated at construction beyond forcing `∅` to be far from everything in
//! the first argument; [`check_axioms`] decides the axioms exhaustively, so
//! deliberately broken tables can serve as negative fixtures.

use std::fmt;

use crate::error::{Error, Result};
use crate::report::{AxiomReport, Verdict};
use crate::setrel::{same_carrier, CarrierRef, Rel, Subset};
use crate::uniformity::UnifBase;

/// Largest carrier whose nearness table is materialized.
pub const DEFAULT_PROX_CAP: usize = 12;

/// Anything that can answer "is `A` near `B`" on a carrier.
///
/// Above [`DEFAULT_PROX_CAP`] tables are not materialized and callers work
/// with a lazy implementation instead.
pub trait Nearness {
    fn carrier(&self) -> &CarrierRef;
    fn near(&self, a: Subset, b: Subset) -> bool;
}

#[derive(Clone, PartialEq, Eq)]
pub struct Prox {
    carrier: CarrierRef,
    words: usize,
    bits: Vec<u64>,
}

impl fmt::Debug for Prox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Prox")
            .field("carrier", &self.carrier.names())
            .field("near_pairs", &self.near_pair_count())
            .finish()
    }
}

fn words_for(n: usize) -> usize {
    (1usize << n).div_ceil(64)
}

#[inline]
fn bit(words: &[u64], i: usize) -> bool {
    words[i >> 6] >> (i & 63) & 1 == 1
}

#[inline]
fn set_bit(words: &mut [u64], i: usize) {
    words[i >> 6] |= 1 << (i & 63);
}

fn any_common(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).any(|(x, y)| x & y != 0)
}

impl Prox {
    fn blank(carrier: &CarrierRef) -> Result<Prox> {
        let n = carrier.len();
        if n > DEFAULT_PROX_CAP {
            return Err(Error::ResourceCap {
                what: "proximity table carrier",
                size: n,
                cap: DEFAULT_PROX_CAP,
            });
        }
        let words = words_for(n);
        Ok(Prox {
            carrier: carrier.clone(),
            words,
            bits: vec![0; words << n],
        })
    }

    pub fn from_fn(carrier: &CarrierRef, near: impl Fn(Subset, Subset) -> bool) -> Result<Prox> {
        let mut p = Prox::blank(carrier)?;
        for a in carrier.subsets().skip(1) {
            for b in carrier.subsets() {
                if near(a, b) {
                    p.set(a, b, true);
                }
            }
        }
        Ok(p)
    }

    pub fn materialize(near: &impl Nearness) -> Result<Prox> {
        Prox::from_fn(near.carrier(), |a, b| near.near(a, b))
    }

    /// `A` near `B` iff some `a ∈ A`, `b ∈ B` are related.
    pub fn from_point_relation(r: &Rel) -> Result<Prox> {
        let carrier = r.carrier().clone();
        let mut p = Prox::blank(&carrier)?;
        for a in carrier.subsets().skip(1) {
            let image = r.image_of_set(a);
            for b in carrier.subsets() {
                if image.meets(b) {
                    p.set(a, b, true);
                }
            }
        }
        Ok(p)
    }

    /// `A` near `B` iff `A ∩ B ≠ ∅`: the discrete proximity.
    pub fn overlap(carrier: &CarrierRef) -> Result<Prox> {
        Prox::from_point_relation(&Rel::diagonal(carrier))
    }

    /// `A` near `B` iff both are nonempty.
    pub fn nonempty_pairs(carrier: &CarrierRef) -> Result<Prox> {
        Prox::from_point_relation(&Rel::full(carrier))
    }

    pub fn carrier(&self) -> &CarrierRef {
        &self.carrier
    }

    #[inline]
    fn row(&self, a: Subset) -> &[u64] {
        let start = a.index() * self.words;
        &self.bits[start..start + self.words]
    }

    fn set(&mut self, a: Subset, b: Subset, value: bool) {
        let i = a.index() * self.words + (b.index() >> 6);
        let mask = 1u64 << (b.index() & 63);
        if value {
            self.bits[i] |= mask;
        } else {
            self.bits[i] &= !mask;
        }
    }

    #[inline]
    pub fn near(&self, a: Subset, b: Subset) -> bool {
        bit(self.row(a), b.index())
    }

    #[inline]
    pub fn far(&self, a: Subset, b: Subset) -> bool {
        !self.near(a, b)
    }

    /// A copy with one table entry overwritten. Entries with an empty first
    /// argument stay far.
    pub fn with_pair(mut self, a: Subset, b: Subset, near: bool) -> Prox {
        if !a.is_empty() {
            self.set(a, b, near);
        }
        self
    }

    pub fn near_pair_count(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// `cl(A) = {x : {x} near A}`.
    pub fn closure(&self, a: Subset) -> Subset {
        Subset::from_elements(
            (0..self.carrier.len()).filter(|&x| self.near(Subset::singleton(x), a)),
        )
    }

    /// `x ~ y` iff `{x}` near `{y}`.
    pub fn point_relation(&self) -> Rel {
        Rel::from_fn(&self.carrier, |x, y| {
            self.near(Subset::singleton(x), Subset::singleton(y))
        })
    }

    /// Whether distinct points are far (axiom P6).
    pub fn is_separated(&self) -> bool {
        separation_violation(self).is_none()
    }

    fn check_same_carrier(&self, other: &Prox) -> Result<()> {
        if same_carrier(&self.carrier, &other.carrier) {
            Ok(())
        } else {
            Err(Error::CarrierMismatch(
                "proximities live on different carriers".into(),
            ))
        }
    }

    /// Least pair (in subset order) that is near here and far in `other`.
    pub fn domination_witness(&self, other: &Prox) -> Result<Option<(Subset, Subset)>> {
        self.check_same_carrier(other)?;
        for a in self.carrier.subsets() {
            let (mine, theirs) = (self.row(a), other.row(a));
            if let Some(w) = (0..self.words).find(|&w| mine[w] & !theirs[w] != 0) {
                let word = mine[w] & !theirs[w];
                let b = (w << 6) + word.trailing_zeros() as usize;
                return Ok(Some((a, Subset(b as u32))));
            }
        }
        Ok(None)
    }

    /// `self` dominates `other` (written `other ⪯ self`) iff every pair near
    /// in `self` is near in `other`.
    pub fn dominates(&self, other: &Prox) -> Result<bool> {
        Ok(self.domination_witness(other)?.is_none())
    }

    /// Least pair on which the two tables disagree.
    pub fn first_difference(&self, other: &Prox) -> Result<Option<(Subset, Subset)>> {
        self.check_same_carrier(other)?;
        for a in self.carrier.subsets() {
            let (mine, theirs) = (self.row(a), other.row(a));
            if let Some(w) = (0..self.words).find(|&w| mine[w] != theirs[w]) {
                let b = (w << 6) + (mine[w] ^ theirs[w]).trailing_zeros() as usize;
                return Ok(Some((a, Subset(b as u32))));
            }
        }
        Ok(None)
    }

    /// The quotient by `x ~ y ⇔ {x} near {y}`, which is separated when `self`
    /// is a proximity. Fails if `~` is not an equivalence.
    pub fn separated_reflection(&self) -> Result<SeparatedReflection> {
        let points = self.point_relation();
        if !points.is_equivalence() {
            return Err(Error::precondition(
                "separated_reflection",
                "point nearness is not an equivalence relation",
            ));
        }
        let n = self.carrier.len();
        let mut class_of = vec![usize::MAX; n];
        let mut classes: Vec<Subset> = Vec::new();
        for x in 0..n {
            if class_of[x] == usize::MAX {
                let class = points.row(x);
                for y in class.iter() {
                    class_of[y] = classes.len();
                }
                classes.push(class);
            }
        }
        let names: Vec<String> = classes
            .iter()
            .map(|c| self.carrier.format_subset(*c))
            .collect();
        let quotient_carrier = crate::setrel::Carrier::new(names)?;
        let lift = |s: Subset| s.iter().fold(Subset::EMPTY, |acc, i| acc.union(classes[i]));
        let prox = Prox::from_fn(&quotient_carrier, |a, b| self.near(lift(a), lift(b)))?;
        Ok(SeparatedReflection { prox, class_of })
    }
}

impl Nearness for Prox {
    fn carrier(&self) -> &CarrierRef {
        &self.carrier
    }

    fn near(&self, a: Subset, b: Subset) -> bool {
        Prox::near(self, a, b)
    }
}

#[derive(Debug, Clone)]
pub struct SeparatedReflection {
    pub prox: Prox,
    /// Quotient class of each original point.
    pub class_of: Vec<usize>,
}

/// The proximity `δ_𝒰` induced by a uniformity: `A` near `B` iff every basis
/// entourage meets `A × B`. A basis suffices since every member of the
/// generated filter contains a basis entourage.
pub fn from_uniformity(u: &UnifBase) -> Result<Prox> {
    let carrier = u.carrier().clone();
    let mut p = Prox::blank(&carrier)?;
    let mut images = Vec::with_capacity(u.basis().len());
    for a in carrier.subsets().skip(1) {
        images.clear();
        images.extend(u.basis().iter().map(|e| e.image_of_set(a)));
        for b in carrier.subsets().skip(1) {
            if images.iter().all(|img| img.meets(b)) {
                p.set(a, b, true);
            }
        }
    }
    Ok(p)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ProxAxiom {
    P1,
    P2,
    P3,
    P4,
    P5,
    P5Prime,
    P6,
}

impl ProxAxiom {
    pub const ALL: [ProxAxiom; 7] = [
        ProxAxiom::P1,
        ProxAxiom::P2,
        ProxAxiom::P3,
        ProxAxiom::P4,
        ProxAxiom::P5,
        ProxAxiom::P5Prime,
        ProxAxiom::P6,
    ];
    /// The axioms of a (not necessarily separated) proximity.
    pub const PROXIMITY: [ProxAxiom; 5] = [
        ProxAxiom::P1,
        ProxAxiom::P2,
        ProxAxiom::P3,
        ProxAxiom::P4,
        ProxAxiom::P5,
    ];
}

impl fmt::Display for ProxAxiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ProxAxiom::P1 => "P1",
            ProxAxiom::P2 => "P2",
            ProxAxiom::P3 => "P3",
            ProxAxiom::P4 => "P4",
            ProxAxiom::P5 => "P5",
            ProxAxiom::P5Prime => "P5'",
            ProxAxiom::P6 => "P6",
        };
        f.write_str(s)
    }
}

/// Counterexample to a proximity axiom: the pair `(a, b)`, plus `c` for P4.
/// For P6 the pair consists of the two offending singletons.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProxWitness {
    pub a: Subset,
    pub b: Subset,
    pub c: Option<Subset>,
}

impl ProxWitness {
    fn pair(a: Subset, b: Subset) -> Self {
        ProxWitness { a, b, c: None }
    }

    pub fn describe(&self, carrier: &crate::setrel::Carrier) -> String {
        let mut s = format!(
            "A={} B={}",
            carrier.format_subset(self.a),
            carrier.format_subset(self.b)
        );
        if let Some(c) = self.c {
            s.push_str(&format!(" C={}", carrier.format_subset(c)));
        }
        s
    }
}

impl fmt::Display for ProxWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |s: Subset| {
            s.iter()
                .map(|i| i.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        write!(f, "A={{{}}} B={{{}}}", list(self.a), list(self.b))?;
        if let Some(c) = self.c {
            write!(f, " C={{{}}}", list(c))?;
        }
        Ok(())
    }
}

pub type ProxReport = AxiomReport<ProxAxiom, ProxWitness>;

/// Exhaustive axiom check with the default cap.
pub fn check_axioms(p: &Prox) -> Result<ProxReport> {
    check_axioms_capped(p, DEFAULT_PROX_CAP)
}

/// Decides P1–P6 and P5′ by quantifying over all subsets. Witnesses are the
/// least violating tuples in subset order.
pub fn check_axioms_capped(p: &Prox, cap: usize) -> Result<ProxReport> {
    let n = p.carrier.len();
    if n > cap {
        return Err(Error::ResourceCap {
            what: "axiom check carrier",
            size: n,
            cap,
        });
    }
    let mut report = ProxReport::new();
    report.record(ProxAxiom::P1, p1_violation(p));
    report.record(ProxAxiom::P2, p2_violation(p));
    report.record(ProxAxiom::P3, p3_violation(p));
    report.record(ProxAxiom::P4, p4_violation(p));
    let (p5, p5_prime) = p5_violations(p);
    report.record(ProxAxiom::P5, p5);
    report.record(ProxAxiom::P5Prime, p5_prime);
    report.record(ProxAxiom::P6, separation_violation(p));
    Ok(report)
}

fn p1_violation(p: &Prox) -> Option<ProxWitness> {
    let c = &p.carrier;
    c.subsets()
        .flat_map(|a| c.subsets().map(move |b| (a, b)))
        .find(|&(a, b)| a.meets(b) && p.far(a, b))
        .map(|(a, b)| ProxWitness::pair(a, b))
}

fn p2_violation(p: &Prox) -> Option<ProxWitness> {
    let c = &p.carrier;
    c.subsets()
        .flat_map(|a| c.subsets().map(move |b| (a, b)))
        .find(|&(a, b)| p.near(a, b) && p.far(b, a))
        .map(|(a, b)| ProxWitness::pair(a, b))
}

fn p3_violation(p: &Prox) -> Option<ProxWitness> {
    let c = &p.carrier;
    c.subsets()
        .find(|&b| p.near(Subset::EMPTY, b))
        .map(|b| ProxWitness::pair(Subset::EMPTY, b))
}

/// Row `A` satisfies P4 for all `B, C` iff `near(A, B) = near(A, ∅) ∨
/// ⋁_{x ∈ B} near(A, {x})` for every `B`; rows failing that are searched
/// exhaustively for the least `(B, C)`.
fn p4_violation(p: &Prox) -> Option<ProxWitness> {
    let c = &p.carrier;
    let size = c.subset_count();
    let mut expected = vec![false; size];
    for a in c.subsets() {
        expected[0] = p.near(a, Subset::EMPTY);
        for b in 1..size {
            let low = b.trailing_zeros() as usize;
            expected[b] = expected[b & (b - 1)] || p.near(a, Subset::singleton(low));
        }
        let consistent = (0..size).all(|b| expected[b] == p.near(a, Subset(b as u32)));
        if consistent {
            continue;
        }
        for b in c.subsets() {
            for cc in c.subsets() {
                let lhs = p.near(a, b.union(cc));
                if lhs != (p.near(a, b) || p.near(a, cc)) {
                    return Some(ProxWitness { a, b, c: Some(cc) });
                }
            }
        }
        unreachable!("row decomposition and pairwise P4 disagree");
    }
    None
}

/// P5 searches a separating `C`; P5′ searches `A ⋐ A₁`, `B ⋐ B₁` with
/// `A₁ ∩ B₁ = ∅`. Both are evaluated with word-parallel set intersections
/// over precomputed candidate families.
fn p5_violations(p: &Prox) -> (Option<ProxWitness>, Option<ProxWitness>) {
    let c = &p.carrier;
    let size = c.subset_count();
    let words = p.words;
    let full = c.full();
    let comp = |s: usize| (!(s as u32) & full.0) as usize;

    let tail_mask = if size.is_multiple_of(64) {
        u64::MAX
    } else {
        (1u64 << (size % 64)) - 1
    };
    // far_rows[A] = {C : A far C}
    let mut far_rows = vec![0u64; words * size];
    for a in 0..size {
        let row = p.row(Subset(a as u32));
        let out = &mut far_rows[a * words..(a + 1) * words];
        for w in 0..words {
            out[w] = !row[w];
        }
        out[words - 1] &= tail_mask;
    }
    // reach[B] = {C : (X∖C) far B}
    let mut reach = vec![0u64; words * size];
    for cc in 0..size {
        let row = p.row(Subset(comp(cc) as u32));
        for b in 0..size {
            if !bit(row, b) {
                set_bit(&mut reach[b * words..(b + 1) * words], cc);
            }
        }
    }
    // strong[A] = {A₁ : A ⋐ A₁}, i.e. A far X∖A₁
    let mut strong = vec![0u64; words * size];
    for a in 0..size {
        let row = p.row(Subset(a as u32));
        let out = &mut strong[a * words..(a + 1) * words];
        for a1 in 0..size {
            if !bit(row, comp(a1)) {
                set_bit(out, a1);
            }
        }
    }
    // room[B] = {A₁ : ∃B₁ ⊆ X∖A₁ with B ⋐ B₁}
    let mut room = vec![0u64; words * size];
    let mut down = vec![false; size];
    for b in 0..size {
        let sb = &strong[b * words..(b + 1) * words];
        for (m, slot) in down.iter_mut().enumerate() {
            *slot = bit(sb, m);
        }
        for i in 0..c.len() {
            let step = 1usize << i;
            for m in 0..size {
                if m & step != 0 && down[m ^ step] {
                    down[m] = true;
                }
            }
        }
        let out = &mut room[b * words..(b + 1) * words];
        for a1 in 0..size {
            if down[comp(a1)] {
                set_bit(out, a1);
            }
        }
    }

    let mut p5 = None;
    let mut p5_prime = None;
    'outer: for a in 0..size {
        let fa = &far_rows[a * words..(a + 1) * words];
        let sa = &strong[a * words..(a + 1) * words];
        for b in 0..size {
            if !bit(fa, b) {
                continue;
            }
            let w = ProxWitness::pair(Subset(a as u32), Subset(b as u32));
            if p5.is_none() && !any_common(fa, &reach[b * words..(b + 1) * words]) {
                p5 = Some(w);
            }
            if p5_prime.is_none() && !any_common(sa, &room[b * words..(b + 1) * words]) {
                p5_prime = Some(w);
            }
            if p5.is_some() && p5_prime.is_some() {
                break 'outer;
            }
        }
    }
    (p5, p5_prime)
}

fn separation_violation(p: &Prox) -> Option<ProxWitness> {
    let n = p.carrier.len();
    (0..n)
        .flat_map(|x| (0..n).map(move |y| (x, y)))
        .find(|&(x, y)| x != y && p.near(Subset::singleton(x), Subset::singleton(y)))
        .map(|(x, y)| ProxWitness::pair(Subset::singleton(x), Subset::singleton(y)))
}

/// Checks P1–P4 and P6 on caller-supplied sample triples `(A, B, C)`; P5 and
/// P5′ need full quantification and are not sampled. Used for lazy relations
/// on carriers too large to materialize.
pub fn check_axioms_on_samples<N, I>(near: &N, samples: I) -> ProxReport
where
    N: Nearness,
    I: IntoIterator<Item = (Subset, Subset, Subset)>,
{
    let n = near.carrier().len();
    let mut found: [Option<ProxWitness>; 5] = [None; 5];
    for (a, b, c) in samples {
        let ab = near.near(a, b);
        if found[0].is_none() && a.meets(b) && !ab {
            found[0] = Some(ProxWitness::pair(a, b));
        }
        if found[1].is_none() && ab && !near.near(b, a) {
            found[1] = Some(ProxWitness::pair(a, b));
        }
        if found[2].is_none() && a.is_empty() && ab {
            found[2] = Some(ProxWitness::pair(a, b));
        }
        if found[3].is_none() && near.near(a, b.union(c)) != (ab || near.near(a, c)) {
            found[3] = Some(ProxWitness { a, b, c: Some(c) });
        }
    }
    for x in 0..n {
        for y in 0..n {
            if found[4].is_none() && x != y && near.near(Subset::singleton(x), Subset::singleton(y))
            {
                found[4] = Some(ProxWitness::pair(
                    Subset::singleton(x),
                    Subset::singleton(y),
                ));
            }
        }
    }
    let mut report = ProxReport::new();
    let axioms = [
        ProxAxiom::P1,
        ProxAxiom::P2,
        ProxAxiom::P3,
        ProxAxiom::P4,
        ProxAxiom::P6,
    ];
    for (axiom, w) in axioms.into_iter().zip(found) {
        report.record(axiom, Verdict::from(w));
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::setrel::Carrier;

    fn singles(x: usize) -> Subset {
        Subset::singleton(x)
    }

    /// Reference P5 and P5′ by direct quantification.
    fn p5_oracle(p: &Prox) -> (bool, bool) {
        let c = p.carrier().clone();
        let mut p5 = true;
        let mut p5p = true;
        for a in c.subsets() {
            for b in c.subsets() {
                if p.near(a, b) {
                    continue;
                }
                if !c
                    .subsets()
                    .any(|cc| p.far(a, cc) && p.far(c.complement(cc), b))
                {
                    p5 = false;
                }
                let found = c.subsets().any(|a1| {
                    p.far(a, c.complement(a1))
                        && c.subsets()
                            .any(|b1| !a1.meets(b1) && p.far(b, c.complement(b1)))
                });
                if !found {
                    p5p = false;
                }
            }
        }
        (p5, p5p)
    }

    #[test]
    fn overlap_proximity_satisfies_all_axioms() {
        let c = Carrier::range(3).unwrap();
        let report = check_axioms(&Prox::overlap(&c).unwrap()).unwrap();
        assert!(report.all_pass(), "{report}");
    }

    #[test]
    fn nonempty_pairs_is_a_proximity_but_not_separated() {
        let c = Carrier::new(["a", "b"]).unwrap();
        let report = check_axioms(&Prox::nonempty_pairs(&c).unwrap()).unwrap();
        assert!(report.all_of(&ProxAxiom::PROXIMITY));
        assert!(report.passes(ProxAxiom::P5Prime));
        let w = report.verdict(ProxAxiom::P6).unwrap().witness().unwrap();
        assert_eq!((w.a, w.b), (singles(0), singles(1)));
    }

    #[test]
    fn deleting_one_symmetric_entry_breaks_p2() {
        let c = Carrier::range(3).unwrap();
        let (a, b) = (Subset::from_elements([0, 1]), Subset::from_elements([1, 2]));
        let corrupted = Prox::overlap(&c).unwrap().with_pair(b, a, false);
        let report = check_axioms(&corrupted).unwrap();
        let w = report.verdict(ProxAxiom::P2).unwrap().witness().unwrap();
        assert_eq!((w.a, w.b), (a, b));
    }

    #[test]
    fn closure_examples() {
        let c = Carrier::new(["a", "b"]).unwrap();
        let overlap = Prox::overlap(&c).unwrap();
        for a in c.subsets() {
            assert_eq!(overlap.closure(a), a);
        }
        assert_eq!(overlap.closure(Subset::EMPTY), Subset::EMPTY);
        let np = Prox::nonempty_pairs(&c).unwrap();
        assert_eq!(np.closure(singles(0)), c.full());
    }

    #[test]
    fn domination_examples() {
        let c = Carrier::new(["a", "b"]).unwrap();
        let overlap = Prox::overlap(&c).unwrap();
        let np = Prox::nonempty_pairs(&c).unwrap();
        assert!(overlap.dominates(&overlap).unwrap());
        assert!(overlap.dominates(&np).unwrap());
        assert_eq!(
            np.domination_witness(&overlap).unwrap(),
            Some((singles(0), singles(1)))
        );
    }

    #[test]
    fn fast_p5_matches_direct_quantification() {
        // Every reflexive symmetric point relation on 3 points, plus corrupted copies.
        let c = Carrier::range(3).unwrap();
        let pairs = [(0, 1), (0, 2), (1, 2)];
        for mask in 0..8u32 {
            let edges = pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .flat_map(|(_, &(x, y))| [(x, y), (y, x)]);
            let rel = Rel::from_pairs(&c, (0..3).map(|i| (i, i)).chain(edges)).unwrap();
            let p = Prox::from_point_relation(&rel).unwrap();
            for q in [
                p.clone(),
                p.clone()
                    .with_pair(singles(0), Subset::from_elements([1, 2]), true),
                p.clone()
                    .with_pair(Subset::from_elements([0, 1]), singles(2), false),
            ] {
                let report = check_axioms(&q).unwrap();
                let (p5, p5p) = p5_oracle(&q);
                assert_eq!(report.passes(ProxAxiom::P5), p5);
                assert_eq!(report.passes(ProxAxiom::P5Prime), p5p);
            }
            let report = check_axioms(&p).unwrap();
            assert_eq!(report.passes(ProxAxiom::P5), rel.is_transitive());
        }
    }

    #[test]
    fn p4_witness_is_pairwise_violation() {
        let c = Carrier::range(3).unwrap();
        let p =
            Prox::overlap(&c)
                .unwrap()
                .with_pair(singles(0), Subset::from_elements([1, 2]), true);
        let report = check_axioms(&p).unwrap();
        let w = *report.verdict(ProxAxiom::P4).unwrap().witness().unwrap();
        let cc = w.c.unwrap();
        assert_ne!(
            p.near(w.a, w.b.union(cc)),
            p.near(w.a, w.b) || p.near(w.a, cc)
        );
    }

    #[test]
    fn cap_is_enforced() {
        let c = Carrier::range(6).unwrap();
        let p = Prox::overlap(&c).unwrap();
        assert!(matches!(
            check_axioms_capped(&p, 5),
            Err(Error::ResourceCap {
                size: 6,
                cap: 5,
                ..
            })
        ));
        let big = Carrier::with_cap((0..13).map(|i| i.to_string()), 20).unwrap();
        assert!(matches!(
            Prox::overlap(&big),
            Err(Error::ResourceCap { .. })
        ));
    }

    #[test]
    fn separated_reflection_collapses_point_classes() {
        let c = Carrier::range(3).unwrap();
        let rel = Rel::from_pairs(&c, [(0, 0), (1, 1), (2, 2), (0, 1), (1, 0)]).unwrap();
        let p = Prox::from_point_relation(&rel).unwrap();
        let r = p.separated_reflection().unwrap();
        assert_eq!(r.class_of, vec![0, 0, 1]);
        assert_eq!(r.prox.carrier().len(), 2);
        assert!(r.prox.is_separated());
        assert!(check_axioms(&r.prox).unwrap().all_pass());
    }

    #[test]
    fn sampled_check_flags_broken_symmetry() {
        let c = Carrier::range(3).unwrap();
        let (a, b) = (singles(0), Subset::from_elements([0, 2]));
        let p = Prox::overlap(&c).unwrap().with_pair(b, a, false);
        let report = check_axioms_on_samples(&p, [(a, b, Subset::EMPTY)]);
        assert!(!report.passes(ProxAxiom::P2));
        assert!(report.passes(ProxAxiom::P1));
    }
}
