//! A symbolic model of `(ℚ, ≤)` acted on by its order automorphisms.
//!
//! The stabilizer of a finite chain `F = {t₁ < … < t_m}` has exactly the
//! `2m+1` orbits `(−∞,t₁), {t₁}, (t₁,t₂), …, {t_m}, (t_m,+∞)`, so every
//! saturation is a finite union of such cells. Arithmetic is exact.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let bad = || Error::invalid("rational", format!("cannot parse `{s}`"));
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num = BigInt::from_str(num).map_err(|_| bad())?;
    let den = BigInt::from_str(den).map_err(|_| bad())?;
    if den.is_zero() {
        return Err(Error::invalid(
            "rational",
            format!("zero denominator in `{s}`"),
        ));
    }
    Ok(Rat::new(num, den))
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Endpoint {
    NegInf,
    Finite(Rat),
    PosInf,
}

impl Endpoint {
    pub fn finite(&self) -> Option<&Rat> {
        match self {
            Endpoint::Finite(q) => Some(q),
            _ => None,
        }
    }

    fn parse(s: &str) -> Result<Endpoint> {
        match s.trim() {
            "-inf" | "-∞" => Ok(Endpoint::NegInf),
            "inf" | "+inf" | "∞" | "+∞" => Ok(Endpoint::PosInf),
            other => parse_rat(other).map(Endpoint::Finite),
        }
    }
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Endpoint::NegInf => f.write_str("-inf"),
            Endpoint::Finite(q) => write!(f, "{q}"),
            Endpoint::PosInf => f.write_str("inf"),
        }
    }
}

/// A rational point or a nonempty open interval.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Atom {
    Point(Rat),
    Open(Endpoint, Endpoint),
}

impl Atom {
    pub fn open(lo: Endpoint, hi: Endpoint) -> Result<Atom> {
        if lo >= hi || lo == Endpoint::PosInf || hi == Endpoint::NegInf {
            return Err(Error::invalid("interval", format!("({lo},{hi}) is empty")));
        }
        Ok(Atom::Open(lo, hi))
    }

    pub fn contains(&self, q: &Rat) -> bool {
        let e = Endpoint::Finite(q.clone());
        match self {
            Atom::Point(p) => p == q,
            Atom::Open(lo, hi) => *lo < e && e < *hi,
        }
    }

    /// Intervals of a dense order meet iff the larger lower end is below
    /// the smaller upper end.
    pub fn meets(&self, other: &Atom) -> bool {
        match (self, other) {
            (Atom::Point(p), a) | (a, Atom::Point(p)) => a.contains(p),
            (Atom::Open(l1, h1), Atom::Open(l2, h2)) => l1.max(l2) < h1.min(h2),
        }
    }

    fn finite_ends(&self) -> Vec<Rat> {
        match self {
            Atom::Point(p) => vec![p.clone()],
            Atom::Open(lo, hi) => [lo, hi]
                .into_iter()
                .filter_map(|e| e.finite().cloned())
                .collect(),
        }
    }

    /// Some rational inside the atom.
    pub fn representative(&self) -> Rat {
        match self {
            Atom::Point(p) => p.clone(),
            Atom::Open(Endpoint::Finite(l), Endpoint::Finite(h)) => (l + h) / rat(2, 1),
            Atom::Open(Endpoint::Finite(l), _) => l + Rat::one(),
            Atom::Open(_, Endpoint::Finite(h)) => h - Rat::one(),
            Atom::Open(_, _) => Rat::zero(),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Point(p) => write!(f, "{{{p}}}"),
            Atom::Open(lo, hi) => write!(f, "({lo},{hi})"),
        }
    }
}

/// A strictly increasing finite list of rationals.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Chain(Vec<Rat>);

impl Chain {
    pub fn new(points: Vec<Rat>) -> Result<Chain> {
        if let Some(w) = points.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::invalid(
                "chain",
                format!("not strictly increasing at {} ≥ {}", w[0], w[1]),
            ));
        }
        Ok(Chain(points))
    }

    /// Sorts and deduplicates.
    pub fn from_points<I: IntoIterator<Item = Rat>>(points: I) -> Chain {
        Chain(
            points
                .into_iter()
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect(),
        )
    }

    pub fn empty() -> Chain {
        Chain(Vec::new())
    }

    pub fn points(&self) -> &[Rat] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_subset_of(&self, other: &Chain) -> bool {
        self.0.iter().all(|q| other.0.binary_search(q).is_ok())
    }

    pub fn union(&self, other: &Chain) -> Chain {
        Chain::from_points(self.0.iter().chain(&other.0).cloned())
    }

    pub fn parse(s: &str) -> Result<Chain> {
        let inner = s
            .trim()
            .strip_prefix('{')
            .and_then(|t| t.strip_suffix('}'))
            .ok_or_else(|| Error::invalid("chain", format!("expected {{…}}, got `{s}`")))?;
        if inner.trim().is_empty() {
            return Ok(Chain::empty());
        }
        Chain::new(inner.split(',').map(parse_rat).collect::<Result<_>>()?)
    }
}

impl fmt::Display for Chain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.0.iter().join(","))
    }
}

/// The cells of `X_F`, alternating interval, point, …, interval.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitSpace {
    chain: Chain,
    cells: Vec<Atom>,
}

pub fn orbit_space(f: &Chain) -> OrbitSpace {
    let mut ends = vec![Endpoint::NegInf];
    ends.extend(f.0.iter().cloned().map(Endpoint::Finite));
    ends.push(Endpoint::PosInf);
    let mut cells = Vec::with_capacity(2 * f.len() + 1);
    for (i, w) in ends.windows(2).enumerate() {
        if i > 0 {
            cells.push(Atom::Point(f.0[i - 1].clone()));
        }
        cells.push(Atom::Open(w[0].clone(), w[1].clone()));
    }
    OrbitSpace {
        chain: f.clone(),
        cells,
    }
}

impl OrbitSpace {
    pub fn chain(&self) -> &Chain {
        &self.chain
    }

    pub fn cells(&self) -> &[Atom] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Index of the cell holding `q`.
    pub fn cell_of(&self, q: &Rat) -> usize {
        match self.chain.0.binary_search(q) {
            Ok(i) => 2 * i + 1,
            Err(i) => 2 * i,
        }
    }
}

/// A finite union of points and open intervals in canonical form: atoms are
/// disjoint and sorted, and an interval, a point and an interval that abut
/// as `(a,q) ∪ {q} ∪ (q,b)` are stored as `(a,b)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct RatSet {
    atoms: Vec<Atom>,
}

impl RatSet {
    pub fn empty() -> RatSet {
        RatSet::default()
    }

    pub fn all() -> RatSet {
        RatSet {
            atoms: vec![Atom::Open(Endpoint::NegInf, Endpoint::PosInf)],
        }
    }

    pub fn point(q: Rat) -> RatSet {
        RatSet {
            atoms: vec![Atom::Point(q)],
        }
    }

    pub fn open(lo: Endpoint, hi: Endpoint) -> Result<RatSet> {
        Ok(RatSet {
            atoms: vec![Atom::open(lo, hi)?],
        })
    }

    pub fn from_atoms(atoms: Vec<Atom>) -> RatSet {
        let chain = endpoint_chain(atoms.iter());
        let space = orbit_space(&chain);
        let members = space
            .cells
            .iter()
            .map(|c| atoms.iter().any(|a| a.meets(c)))
            .collect::<Vec<_>>();
        from_cells(&space, &members)
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn contains(&self, q: &Rat) -> bool {
        self.atoms.iter().any(|a| a.contains(q))
    }

    /// Finite interval ends and isolated points.
    pub fn endpoints(&self) -> Chain {
        endpoint_chain(self.atoms.iter())
    }

    fn combine(&self, other: &RatSet, op: impl Fn(bool, bool) -> bool) -> RatSet {
        let chain = endpoint_chain(self.atoms.iter().chain(&other.atoms));
        let space = orbit_space(&chain);
        let members: Vec<bool> = space
            .cells
            .iter()
            .map(|c| {
                op(
                    self.atoms.iter().any(|a| a.meets(c)),
                    other.atoms.iter().any(|a| a.meets(c)),
                )
            })
            .collect();
        from_cells(&space, &members)
    }

    pub fn union(&self, other: &RatSet) -> RatSet {
        self.combine(other, |a, b| a || b)
    }

    pub fn intersection(&self, other: &RatSet) -> RatSet {
        self.combine(other, |a, b| a && b)
    }

    pub fn difference(&self, other: &RatSet) -> RatSet {
        self.combine(other, |a, b| a && !b)
    }

    pub fn complement(&self) -> RatSet {
        RatSet::all().difference(self)
    }

    pub fn meets(&self, other: &RatSet) -> bool {
        self.atoms
            .iter()
            .any(|a| other.atoms.iter().any(|b| a.meets(b)))
    }

    pub fn is_subset_of(&self, other: &RatSet) -> bool {
        self.difference(other).is_empty()
    }

    /// Order-convex: no gap between consecutive atoms.
    pub fn is_convex(&self) -> bool {
        self.atoms.windows(2).all(|w| match (&w[0], &w[1]) {
            (Atom::Open(_, Endpoint::Finite(h)), Atom::Point(p)) => h == p,
            (Atom::Point(p), Atom::Open(Endpoint::Finite(l), _)) => l == p,
            _ => false,
        })
    }

    /// Parses comma-separated pieces: `{q,…}` points, `(a,b)` open,
    /// `[a,b]`, `[a,b)`, `(a,b]` with `inf`/`-inf` ends; `{}` is empty.
    pub fn parse(s: &str) -> Result<RatSet> {
        let s = s.trim_end();
        // Errors report the 1-based column where the offending piece starts.
        let err = |rest: &str, detail: String| {
            Error::invalid(
                "set",
                format!("column {}: {detail} in `{s}`", s.len() - rest.len() + 1),
            )
        };
        let mut atoms = Vec::new();
        let mut rest = s.trim_start();
        while !rest.is_empty() {
            let open = rest.chars().next().expect("nonempty");
            let close = match open {
                '{' => '}',
                '(' | '[' => rest[1..]
                    .find([')', ']'])
                    .map(|i| rest.as_bytes()[i + 1] as char)
                    .ok_or_else(|| err(rest, "unclosed interval".into()))?,
                c => return Err(err(rest, format!("unexpected `{c}`"))),
            };
            let end = rest[1..]
                .find(close)
                .map(|i| i + 1)
                .ok_or_else(|| err(rest, format!("missing `{close}`")))?;
            let body = &rest[1..end];
            let wrap = |e: Error| err(rest, e.to_string());
            if open == '{' {
                for p in body.split(',').map(str::trim).filter(|p| !p.is_empty()) {
                    atoms.push(Atom::Point(parse_rat(p).map_err(wrap)?));
                }
            } else {
                let (lo, hi) = body
                    .split_once(',')
                    .ok_or_else(|| err(rest, "an interval needs two ends".into()))?;
                let (lo, hi) = (
                    Endpoint::parse(lo).map_err(wrap)?,
                    Endpoint::parse(hi).map_err(wrap)?,
                );
                for (included, e) in [(open == '[', &lo), (close == ']', &hi)] {
                    if included {
                        let q = e.finite().ok_or_else(|| {
                            err(rest, "an infinite end cannot be included".into())
                        })?;
                        atoms.push(Atom::Point(q.clone()));
                    }
                }
                if lo < hi {
                    atoms.push(Atom::Open(lo, hi));
                } else if !(lo == hi && open == '[' && close == ']') {
                    return Err(err(rest, "empty interval".into()));
                }
            }
            rest = rest[end + 1..].trim_start();
            if let Some(r) = rest.strip_prefix(',') {
                rest = r.trim_start();
            } else if !rest.is_empty() {
                return Err(err(rest, "expected `,`".into()));
            }
        }
        Ok(RatSet::from_atoms(atoms))
    }
}

impl fmt::Display for RatSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.atoms.is_empty() {
            return f.write_str("{}");
        }
        write!(f, "{}", self.atoms.iter().join(","))
    }
}

impl FromStr for RatSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<RatSet> {
        RatSet::parse(s)
    }
}

fn endpoint_chain<'a>(atoms: impl Iterator<Item = &'a Atom>) -> Chain {
    Chain::from_points(atoms.flat_map(Atom::finite_ends))
}

/// Rebuilds a canonical set from included cells of `space`, fusing each
/// maximal run of cells into points at its ends and one open interval.
fn from_cells(space: &OrbitSpace, members: &[bool]) -> RatSet {
    let cells = &space.cells;
    let mut atoms = Vec::new();
    let mut i = 0;
    while i < cells.len() {
        if !members[i] {
            i += 1;
            continue;
        }
        let mut j = i;
        while j + 1 < cells.len() && members[j + 1] {
            j += 1;
        }
        // Cells alternate, so a run is: optional point, intervals fused
        // across interior points, optional point.
        let mut lo = i;
        if let Atom::Point(p) = &cells[i] {
            atoms.push(Atom::Point(p.clone()));
            lo += 1;
        }
        let mut trailing = None;
        let mut hi = j + 1;
        if j >= lo {
            if let Atom::Point(p) = &cells[j] {
                trailing = Some(Atom::Point(p.clone()));
                hi = j;
            }
        }
        if lo < hi {
            if let (Atom::Open(start, _), Atom::Open(_, stop)) = (&cells[lo], &cells[hi - 1]) {
                atoms.push(Atom::Open(start.clone(), stop.clone()));
            }
        }
        atoms.extend(trailing);
        i = j + 1;
    }
    RatSet { atoms }
}

/// Union of the cells of `X_F` meeting `a`: the `St_F`-saturation of `a`.
pub fn saturate(f: &Chain, a: &RatSet) -> RatSet {
    let space = orbit_space(f);
    let members: Vec<bool> = space
        .cells
        .iter()
        .map(|c| a.atoms.iter().any(|x| x.meets(c)))
        .collect();
    from_cells(&space, &members)
}

/// `saturate` as a set of cell indices of `X_F`.
pub fn saturated_cells(f: &Chain, a: &RatSet) -> Vec<usize> {
    orbit_space(f)
        .cells
        .iter()
        .positions(|c| a.atoms.iter().any(|x| x.meets(c)))
        .collect()
}

/// Whether the saturations of `a` and `b` under `St_F` are disjoint.
pub fn separates(f: &Chain, a: &RatSet, b: &RatSet) -> bool {
    let (sa, sb) = (saturated_cells(f, a), saturated_cells(f, b));
    !sa.iter().any(|c| sb.binary_search(c).is_ok())
}

/// Maps each cell of `X_{big}` to the cell of `X_{small}` containing it.
pub fn bonding_map(big: &Chain, small: &Chain) -> Result<Vec<usize>> {
    if !small.is_subset_of(big) {
        return Err(Error::precondition(
            "bonding_map",
            format!("{small} is not contained in {big}"),
        ));
    }
    let target = orbit_space(small);
    Ok(orbit_space(big)
        .cells
        .iter()
        .map(|c| target.cell_of(&c.representative()))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FarVerdict {
    Near,
    /// A chain whose stabilizer separates the two sets.
    Far(Chain),
}

impl FarVerdict {
    pub fn is_far(&self) -> bool {
        matches!(self, FarVerdict::Far(_))
    }
}

/// Subchains of `e` by size, then lexicographically.
fn subchains(e: &Chain) -> impl Iterator<Item = Chain> + '_ {
    (0..=e.len()).flat_map(move |k| e.0.iter().cloned().combinations(k).map(Chain))
}

/// `A` far `B` iff the saturations under some finite-chain stabilizer are
/// disjoint. Witnesses are drawn from the endpoint chain of `A ∪ B`; if the
/// whole endpoint chain does not separate, no subchain does.
pub fn decide_far(a: &RatSet, b: &RatSet) -> FarVerdict {
    if a.meets(b) {
        return FarVerdict::Near;
    }
    let e = a.endpoints().union(&b.endpoints());
    if !separates(&e, a, b) {
        return FarVerdict::Near;
    }
    let witness = subchains(&e)
        .find(|f| separates(f, a, b))
        .expect("the full endpoint chain separates");
    debug_assert!(!saturate(&witness, a).meets(&saturate(&witness, b)));
    FarVerdict::Far(witness)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClaimVerdict {
    Witness(Chain),
    /// No chain over the endpoints works; this contradicts the claim.
    Alarm,
}

/// Finds `F` with `St_F·A ⊆ O` for a convex `O ⊇ A`: first among subchains
/// of the endpoints of `O`, then of the endpoints of `A ∪ O`.
pub fn check_ordcomp_claim(a: &RatSet, o: &RatSet) -> Result<ClaimVerdict> {
    if !o.is_convex() {
        return Err(Error::precondition(
            "check_ordcomp_claim",
            format!("{o} is not convex"),
        ));
    }
    if !a.is_subset_of(o) {
        return Err(Error::precondition(
            "check_ordcomp_claim",
            format!("{a} is not contained in {o}"),
        ));
    }
    let fits = |f: &Chain| saturate(f, a).is_subset_of(o);
    let own = o.endpoints();
    if let Some(f) = subchains(&own).find(|f| fits(f)) {
        return Ok(ClaimVerdict::Witness(f));
    }
    let all = own.union(&a.endpoints());
    let found = subchains(&all).find(|f| fits(f));
    Ok(found.map_or(ClaimVerdict::Alarm, ClaimVerdict::Witness))
}

/// A directed family of chains with their orbit spaces.
#[derive(Debug, Clone)]
pub struct Tower {
    levels: Vec<OrbitSpace>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TowerReport {
    /// `(big, small)` level pairs failing surjectivity.
    pub not_surjective: Option<(usize, usize)>,
    pub not_monotone: Option<(usize, usize)>,
    /// `(top, middle, bottom)` where the composite differs from the direct map.
    pub not_functorial: Option<(usize, usize, usize)>,
}

impl TowerReport {
    pub fn holds(&self) -> bool {
        self.not_surjective.is_none()
            && self.not_monotone.is_none()
            && self.not_functorial.is_none()
    }
}

/// Closes `chains` under pairwise union and orders levels by size, then
/// lexicographically.
pub fn build_tower(chains: &[Chain]) -> Tower {
    let mut family: BTreeSet<Chain> = chains.iter().cloned().collect();
    if family.is_empty() {
        family.insert(Chain::empty());
    }
    loop {
        let unions: Vec<Chain> = family
            .iter()
            .tuple_combinations()
            .map(|(x, y)| x.union(y))
            .filter(|u| !family.contains(u))
            .collect();
        if unions.is_empty() {
            break;
        }
        family.extend(unions);
    }
    let mut levels: Vec<Chain> = family.into_iter().collect();
    levels.sort_by(|x, y| x.len().cmp(&y.len()).then_with(|| x.cmp(y)));
    Tower {
        levels: levels.iter().map(orbit_space).collect(),
    }
}

impl Tower {
    pub fn levels(&self) -> &[OrbitSpace] {
        &self.levels
    }

    pub fn level_of(&self, f: &Chain) -> Option<usize> {
        self.levels.iter().position(|l| l.chain() == f)
    }

    /// Bonding map between levels `big ⊇ small`.
    pub fn bonding(&self, big: usize, small: usize) -> Result<Vec<usize>> {
        bonding_map(self.levels[big].chain(), self.levels[small].chain())
    }

    fn included_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.levels.len();
        (0..n)
            .cartesian_product(0..n)
            .filter(move |&(b, s)| self.levels[s].chain().is_subset_of(self.levels[b].chain()))
    }

    pub fn validate(&self) -> TowerReport {
        let mut report = TowerReport::default();
        for (big, small) in self.included_pairs() {
            let map = self.bonding(big, small).expect("included pair");
            let image: BTreeSet<usize> = map.iter().copied().collect();
            if report.not_surjective.is_none() && image.len() != self.levels[small].len() {
                report.not_surjective = Some((big, small));
            }
            if report.not_monotone.is_none() && map.windows(2).any(|w| w[0] > w[1]) {
                report.not_monotone = Some((big, small));
            }
        }
        'outer: for (top, mid) in self.included_pairs() {
            for (mid2, bottom) in self.included_pairs() {
                if mid2 != mid {
                    continue;
                }
                let upper = self.bonding(top, mid).expect("included");
                let lower = self.bonding(mid, bottom).expect("included");
                let direct = self.bonding(top, bottom).expect("included");
                if upper.iter().map(|&c| lower[c]).ne(direct.iter().copied()) {
                    report.not_functorial = Some((top, mid, bottom));
                    break 'outer;
                }
            }
        }
        report
    }

    /// Compatible choices of one cell per listed level, in lexicographic
    /// order of cell indices.
    pub fn threads(&self, through: &[usize]) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut current = Vec::with_capacity(through.len());
        self.extend_threads(through, &mut current, &mut out);
        out
    }

    fn extend_threads(
        &self,
        through: &[usize],
        current: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        let k = current.len();
        if k == through.len() {
            out.push(current.clone());
            return;
        }
        let level = through[k];
        for cell in 0..self.levels[level].len() {
            let compatible = (0..k).all(|j| {
                let other = through[j];
                let (oc, lc) = (self.levels[other].chain(), self.levels[level].chain());
                if lc.is_subset_of(oc) {
                    self.bonding(other, level).expect("included")[current[j]] == cell
                } else if oc.is_subset_of(lc) {
                    self.bonding(level, other).expect("included")[cell] == current[j]
                } else {
                    true
                }
            });
            if compatible {
                current.push(cell);
                self.extend_threads(through, current, out);
                current.pop();
            }
        }
    }

    /// One cluster per level; edges follow covering inclusions and carry
    /// the source level's chain.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph tower {\n  rankdir=TB;\n");
        for (i, level) in self.levels.iter().enumerate() {
            out += &format!(
                "  subgraph cluster_{i} {{\n    label=\"F = {}\";\n",
                level.chain()
            );
            for (j, cell) in level.cells().iter().enumerate() {
                out += &format!("    n{i}_{j} [label=\"{cell}\"];\n");
            }
            out += "  }\n";
        }
        let covers = self.included_pairs().filter(|&(b, s)| {
            b != s
                && !self.included_pairs().any(|(b2, m)| {
                    b2 == b
                        && m != b
                        && m != s
                        && self.levels[s].chain().is_subset_of(self.levels[m].chain())
                })
        });
        for (big, small) in covers {
            let map = self.bonding(big, small).expect("included");
            for (j, k) in map.iter().enumerate() {
                out += &format!(
                    "  n{big}_{j} -> n{small}_{k} [label=\"{}\"];\n",
                    self.levels[big].chain()
                );
            }
        }
        out += "}\n";
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(s: &str) -> RatSet {
        RatSet::parse(s).unwrap()
    }

    fn chain(s: &str) -> Chain {
        Chain::parse(s).unwrap()
    }

    #[test]
    fn orbit_space_examples() {
        let x = orbit_space(&chain("{0,1}"));
        assert_eq!(x.cells().iter().join(" "), "(-inf,0) {0} (0,1) {1} (1,inf)");
        assert_eq!(orbit_space(&Chain::empty()).len(), 1);
        for m in 0..=10 {
            let f = Chain::from_points((0..m).map(|i| rat(i * 3 - 7, 2)));
            assert_eq!(orbit_space(&f).len(), 2 * m as usize + 1);
        }
    }

    #[test]
    fn parse_and_format() {
        assert_eq!(set("{0,1/2},(0,1)").to_string(), "{0},(0,1)");
        assert_eq!(set("[0,1]").to_string(), "{0},(0,1),{1}");
        assert_eq!(set("(0,1),{1},(1,2)").to_string(), "(0,2)");
        assert_eq!(set("(0,1),{1}").to_string(), "(0,1),{1}");
        assert_eq!(set("(-inf,0],(0,inf)").to_string(), "(-inf,inf)");
        assert_eq!(set("{}").to_string(), "{}");
        assert_eq!(set("{2/4}").to_string(), "{1/2}");
        assert!(RatSet::parse("(1,0)").is_err());
        assert!(RatSet::parse("{1/0}").is_err());
        assert!(RatSet::parse("[inf,2)").is_err());
        assert_eq!(set("(0,1),(1/2,2)"), set("(0,2)"));
    }

    #[test]
    fn set_algebra() {
        let a = set("(0,2)");
        let b = set("{1},(3,4)");
        assert_eq!(a.difference(&b).to_string(), "(0,1),(1,2)");
        assert_eq!(a.intersection(&b).to_string(), "{1}");
        assert_eq!(a.complement().to_string(), "(-inf,0),{0},{2},(2,inf)");
        assert!(set("{0},(0,1)").is_convex());
        assert!(!set("(0,1),(1,2)").is_convex());
        assert!(set("(0,1)").is_subset_of(&a));
    }

    #[test]
    fn saturate_examples() {
        assert_eq!(saturate(&chain("{0,1}"), &RatSet::empty()), RatSet::empty());
        assert_eq!(
            saturate(&chain("{1/2}"), &set("{0}")).to_string(),
            "(-inf,1/2)"
        );
        assert_eq!(
            saturate(&chain("{0,1}"), &set("(0,1)")).to_string(),
            "(0,1)"
        );
        assert_eq!(
            saturate(&chain("{0,1}"), &set("(1,2)")).to_string(),
            "(1,inf)"
        );
    }

    #[test]
    fn bonding_examples() {
        let f = chain("{0,1}");
        assert_eq!(bonding_map(&f, &f).unwrap(), vec![0, 1, 2, 3, 4]);
        assert_eq!(bonding_map(&f, &chain("{0}")).unwrap(), vec![0, 1, 2, 2, 2]);
        assert!(bonding_map(&chain("{0}"), &f).is_err());
        let (a, b, c) = (chain("{0}"), chain("{0,1}"), chain("{0,1,2}"));
        let outer = bonding_map(&c, &b).unwrap();
        let inner = bonding_map(&b, &a).unwrap();
        let direct = bonding_map(&c, &a).unwrap();
        assert_eq!(outer.iter().map(|&x| inner[x]).collect::<Vec<_>>(), direct);
    }

    #[test]
    fn decide_far_examples() {
        assert_eq!(
            decide_far(&set("{0}"), &set("{1}")),
            FarVerdict::Far(chain("{0}"))
        );
        assert_eq!(decide_far(&set("(0,1)"), &set("(1/2,2)")), FarVerdict::Near);
        assert_eq!(
            decide_far(&set("(0,1)"), &set("{1}")),
            FarVerdict::Far(chain("{1}"))
        );
        assert_eq!(
            decide_far(&set("(0,1)"), &set("(1,2)")),
            FarVerdict::Far(chain("{1}"))
        );
        assert_eq!(
            decide_far(&RatSet::empty(), &set("{1}")),
            FarVerdict::Far(Chain::empty())
        );
        assert_eq!(
            decide_far(&set("(0,1),(1,2)"), &set("{1}")),
            FarVerdict::Far(chain("{1}"))
        );
        assert_eq!(decide_far(&set("(0,2)"), &set("{1}")), FarVerdict::Near);
    }

    #[test]
    fn ordcomp_examples() {
        let w = |a: &str, o: &str| check_ordcomp_claim(&set(a), &set(o)).unwrap();
        assert_eq!(w("[0,1]", "(-1,2)"), ClaimVerdict::Witness(chain("{-1,2}")));
        assert_eq!(
            w("{0}", "(-inf,inf)"),
            ClaimVerdict::Witness(Chain::empty())
        );
        assert_eq!(w("{0}", "(-inf,0]"), ClaimVerdict::Witness(chain("{0}")));
        assert!(check_ordcomp_claim(&set("{0}"), &set("(0,1),(1,2)")).is_err());
        assert!(check_ordcomp_claim(&set("{5}"), &set("(0,1)")).is_err());
    }

    #[test]
    fn tower_examples() {
        let single = build_tower(&[Chain::empty()]);
        assert_eq!(single.levels().len(), 1);
        let t = build_tower(&[Chain::empty(), chain("{0}"), chain("{1}"), chain("{0,1}")]);
        assert_eq!(
            t.levels().iter().map(OrbitSpace::len).collect::<Vec<_>>(),
            vec![1, 3, 3, 5]
        );
        assert!(t.validate().holds());
        let closed = build_tower(&[chain("{0}"), chain("{1}")]);
        assert_eq!(closed.levels().len(), 3);

        let line = build_tower(&[Chain::empty(), chain("{0}"), chain("{0,1}")]);
        let through: Vec<usize> = (0..3).collect();
        assert_eq!(line.threads(&through).len(), 5);
        let dot = line.to_dot();
        assert!(dot.contains("label=\"(-inf,0)\""));
        assert!(dot.contains("n2_3 -> n1_2 [label=\"{0,1}\"]"));
        assert!(!dot.contains("n2_0 -> n0_0"));
    }
}
