//! Finite groups acting on finite carriers, with a descending chain of
//! identity neighborhoods standing in for a topological-group germ.
//!
//! Composition convention: `act(g·h) = act(g) ∘ act(h)`, so `(g·h)x = g(hx)`.
//! Neighborhoods of a point `g₀` are the left translates `g₀·Vᵢ`.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::report::AxiomReport;
use crate::setrel::{CarrierRef, Rel, Subset};
use crate::uniformity::UnifBase;

pub const DEFAULT_GROUP_CAP: usize = 48;

/// A subset of a group as a bitmask over element indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct GroupSet(pub u64);

impl GroupSet {
    pub const EMPTY: GroupSet = GroupSet(0);

    pub fn singleton(g: usize) -> GroupSet {
        GroupSet(1 << g)
    }

    pub fn from_elements<I: IntoIterator<Item = usize>>(elements: I) -> GroupSet {
        GroupSet(elements.into_iter().fold(0, |acc, g| acc | 1 << g))
    }

    pub fn contains(self, g: usize) -> bool {
        self.0 >> g & 1 == 1
    }

    pub fn with(self, g: usize) -> GroupSet {
        GroupSet(self.0 | 1 << g)
    }

    pub fn union(self, other: GroupSet) -> GroupSet {
        GroupSet(self.0 | other.0)
    }

    pub fn intersection(self, other: GroupSet) -> GroupSet {
        GroupSet(self.0 & other.0)
    }

    pub fn is_subset_of(self, other: GroupSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(self) -> impl Iterator<Item = usize> + Clone {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let g = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(g)
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    names: Vec<String>,
    mul: Vec<usize>,
    inv: Vec<usize>,
    identity: usize,
}

impl FiniteGroup {
    pub fn from_table(names: Vec<String>, table: Vec<Vec<usize>>) -> Result<FiniteGroup> {
        Self::from_table_capped(names, table, DEFAULT_GROUP_CAP)
    }

    /// Validates closure, associativity, identity and inverses.
    pub fn from_table_capped(
        names: Vec<String>,
        table: Vec<Vec<usize>>,
        cap: usize,
    ) -> Result<FiniteGroup> {
        let n = names.len();
        let cap = cap.min(64);
        if n == 0 {
            return Err(Error::invalid(
                "group table",
                "a group needs at least one element",
            ));
        }
        if n > cap {
            return Err(Error::ResourceCap {
                what: "group",
                size: n,
                cap,
            });
        }
        if names.iter().collect::<HashSet<_>>().len() != n {
            return Err(Error::invalid("group table", "element names repeat"));
        }
        if table.len() != n || table.iter().any(|row| row.len() != n) {
            return Err(Error::invalid(
                "group table",
                format!("the table must be {n} × {n}"),
            ));
        }
        if let Some((a, b)) = (0..n)
            .cartesian_product(0..n)
            .find(|&(a, b)| table[a][b] >= n)
        {
            return Err(Error::invalid(
                "group table",
                format!("product {}·{} leaves the group", names[a], names[b]),
            ));
        }
        let mul: Vec<usize> = table.into_iter().flatten().collect();
        let at = |a: usize, b: usize| mul[a * n + b];
        for (a, b, c) in (0..n)
            .cartesian_product(0..n)
            .cartesian_product(0..n)
            .map(|((a, b), c)| (a, b, c))
        {
            if at(at(a, b), c) != at(a, at(b, c)) {
                return Err(Error::invalid(
                    "group table",
                    format!(
                        "not associative: ({a}·{b})·{c} ≠ {a}·({b}·{c})",
                        a = names[a],
                        b = names[b],
                        c = names[c]
                    ),
                ));
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|g| at(e, g) == g && at(g, e) == g))
            .ok_or_else(|| Error::invalid("group table", "no identity element"))?;
        let mut inv = Vec::with_capacity(n);
        for (g, name) in names.iter().enumerate() {
            let h = (0..n)
                .find(|&h| at(g, h) == identity && at(h, g) == identity)
                .ok_or_else(|| Error::invalid("group table", format!("{name} has no inverse")))?;
            inv.push(h);
        }
        Ok(FiniteGroup {
            names,
            mul,
            inv,
            identity,
        })
    }

    /// Closes a set of named permutations of `0..degree` under composition.
    /// Elements are named by their shortest generator word (breadth-first,
    /// generators tried in the given order); the identity is `e`. Returns the
    /// group together with the permutation of each element.
    pub fn from_generators(
        degree: usize,
        generators: &[(String, Vec<usize>)],
        cap: usize,
    ) -> Result<(FiniteGroup, Vec<Vec<usize>>)> {
        for (name, p) in generators {
            if !is_permutation(p, degree) {
                return Err(Error::invalid(
                    "generator",
                    format!("`{name}` is not a permutation of {degree} points"),
                ));
            }
        }
        let identity: Vec<usize> = (0..degree).collect();
        let mut perms = vec![identity.clone()];
        let mut words: Vec<Vec<usize>> = vec![vec![]];
        let mut index: HashMap<Vec<usize>, usize> = HashMap::from([(identity, 0)]);
        let mut queue = VecDeque::from([0usize]);
        while let Some(h) = queue.pop_front() {
            for (s, (_, gen)) in generators.iter().enumerate() {
                let product: Vec<usize> = (0..degree).map(|x| perms[h][gen[x]]).collect();
                if !index.contains_key(&product) {
                    if perms.len() == cap.min(64) {
                        return Err(Error::ResourceCap {
                            what: "generated group",
                            size: perms.len() + 1,
                            cap: cap.min(64),
                        });
                    }
                    let mut word = words[h].clone();
                    word.push(s);
                    index.insert(product.clone(), perms.len());
                    queue.push_back(perms.len());
                    perms.push(product);
                    words.push(word);
                }
            }
        }
        let n = perms.len();
        let table = (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| {
                        let ab: Vec<usize> = (0..degree).map(|x| perms[a][perms[b][x]]).collect();
                        index[&ab]
                    })
                    .collect()
            })
            .collect();
        let gen_names: Vec<&str> = generators.iter().map(|(s, _)| s.as_str()).collect();
        let names = words.iter().map(|w| word_name(w, &gen_names)).collect();
        let group = FiniteGroup::from_table_capped(names, table, cap)?;
        Ok((group, perms))
    }

    pub fn trivial() -> FiniteGroup {
        FiniteGroup {
            names: vec!["e".into()],
            mul: vec![0],
            inv: vec![0],
            identity: 0,
        }
    }

    /// `ℤ_n` generated by `g`, with its regular action on `0..n` by `x ↦ x+1`.
    pub fn cyclic(n: usize) -> (FiniteGroup, Vec<Vec<usize>>) {
        let rot: Vec<usize> = (0..n).map(|x| (x + 1) % n).collect();
        FiniteGroup::from_generators(n, &[("g".into(), rot)], DEFAULT_GROUP_CAP)
            .expect("cyclic groups within the cap")
    }

    /// `S_k` generated by the rotation `r = (0 1 … k-1)` and the swap
    /// `s = (0 1)`, with its natural action on `0..k`.
    pub fn symmetric(k: usize) -> (FiniteGroup, Vec<Vec<usize>>) {
        let rot: Vec<usize> = (0..k).map(|x| (x + 1) % k).collect();
        let mut swap: Vec<usize> = (0..k).collect();
        if k >= 2 {
            swap.swap(0, 1);
        }
        FiniteGroup::from_generators(
            k,
            &[("r".into(), rot), ("s".into(), swap)],
            DEFAULT_GROUP_CAP,
        )
        .expect("small symmetric groups within the cap")
    }

    pub fn order(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, g: usize) -> &str {
        &self.names[g]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.order() + b]
    }

    pub fn inv(&self, g: usize) -> usize {
        self.inv[g]
    }

    pub fn all(&self) -> GroupSet {
        GroupSet::from_elements(0..self.order())
    }

    pub fn format_set(&self, s: GroupSet) -> String {
        format!("{{{}}}", s.iter().map(|g| self.name(g)).join(","))
    }

    /// `V·W`.
    pub fn product_set(&self, v: GroupSet, w: GroupSet) -> GroupSet {
        GroupSet::from_elements(
            v.iter()
                .cartesian_product(w.iter().collect::<Vec<_>>())
                .map(|(a, b)| self.mul(a, b)),
        )
    }

    pub fn inverse_set(&self, v: GroupSet) -> GroupSet {
        GroupSet::from_elements(v.iter().map(|g| self.inv(g)))
    }

    /// `g·V·g⁻¹`.
    pub fn conjugate_set(&self, g: usize, v: GroupSet) -> GroupSet {
        GroupSet::from_elements(v.iter().map(|x| self.mul(self.mul(g, x), self.inv(g))))
    }

    /// `g·V`.
    pub fn left_translate(&self, g: usize, v: GroupSet) -> GroupSet {
        GroupSet::from_elements(v.iter().map(|x| self.mul(g, x)))
    }

    pub fn generated_subgroup(&self, s: GroupSet) -> GroupSet {
        let mut h = s.with(self.identity);
        loop {
            let next = h.union(self.product_set(h, h)).union(self.inverse_set(h));
            if next == h {
                return h;
            }
            h = next;
        }
    }

    pub fn is_subgroup(&self, h: GroupSet) -> bool {
        h.contains(self.identity) && self.product_set(h, h).is_subset_of(h)
    }

    pub fn is_normal(&self, h: GroupSet) -> bool {
        self.is_subgroup(h) && (0..self.order()).all(|g| self.conjugate_set(g, h) == h)
    }

    /// All subgroups, sorted by size then mask.
    pub fn subgroups(&self) -> Vec<GroupSet> {
        let trivial = GroupSet::singleton(self.identity);
        let mut found: HashSet<GroupSet> = HashSet::from([trivial]);
        let mut frontier = vec![trivial];
        while let Some(h) = frontier.pop() {
            for g in 0..self.order() {
                if !h.contains(g) {
                    let k = self.generated_subgroup(h.with(g));
                    if found.insert(k) {
                        frontier.push(k);
                    }
                }
            }
        }
        let mut out: Vec<GroupSet> = found.into_iter().collect();
        out.sort_by_key(|h| (h.len(), h.0));
        out
    }

    /// A small generating set, chosen greedily in element order.
    pub fn generators(&self) -> Vec<usize> {
        let mut gens = Vec::new();
        let mut h = GroupSet::singleton(self.identity);
        for g in 0..self.order() {
            if !h.contains(g) {
                gens.push(g);
                h = self.generated_subgroup(h.with(g));
            }
        }
        gens
    }
}

fn word_name(word: &[usize], gens: &[&str]) -> String {
    if word.is_empty() {
        return "e".into();
    }
    let sep = if gens.iter().all(|g| g.chars().count() == 1) {
        ""
    } else {
        "*"
    };
    word.iter()
        .chunk_by(|s| **s)
        .into_iter()
        .map(|(s, run)| match run.count() {
            1 => gens[s].to_string(),
            k => format!("{}^{k}", gens[s]),
        })
        .join(sep)
}

fn is_permutation(p: &[usize], degree: usize) -> bool {
    p.len() == degree && {
        let mut seen = vec![false; degree];
        p.iter()
            .all(|&x| x < degree && !std::mem::replace(&mut seen[x], true))
    }
}

/// A descending chain `V₁ ⊇ V₂ ⊇ … ⊇ V_k` of identity neighborhoods.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeighborhoodBase {
    levels: Vec<GroupSet>,
}

impl NeighborhoodBase {
    /// Validates: each level contains `e`; levels descend; every level
    /// contains `V_j·V_j` and `V_j⁻¹` for some `j`; every level contains some
    /// conjugate `g·V_j·g⁻¹` for each `g`.
    pub fn new(group: &FiniteGroup, levels: Vec<GroupSet>) -> Result<NeighborhoodBase> {
        let what = "neighborhood base";
        if levels.is_empty() {
            return Err(Error::invalid(what, "the chain has no levels"));
        }
        let all = group.all();
        for (i, v) in levels.iter().enumerate() {
            if !v.is_subset_of(all) {
                return Err(Error::invalid(what, format!("level {i} leaves the group")));
            }
            if !v.contains(group.identity()) {
                return Err(Error::invalid(
                    what,
                    format!("level {i} {} omits the identity", group.format_set(*v)),
                ));
            }
        }
        for (i, pair) in levels.windows(2).enumerate() {
            if !pair[1].is_subset_of(pair[0]) {
                return Err(Error::invalid(
                    what,
                    format!(
                        "not descending: level {} {} is not contained in level {} {}",
                        i + 1,
                        group.format_set(pair[1]),
                        i,
                        group.format_set(pair[0])
                    ),
                ));
            }
        }
        for (i, v) in levels.iter().enumerate() {
            let germ = levels.iter().any(|w| {
                group.product_set(*w, *w).is_subset_of(*v) && group.inverse_set(*w).is_subset_of(*v)
            });
            if !germ {
                return Err(Error::invalid(
                    what,
                    format!("no level W with W·W ⊆ V and W⁻¹ ⊆ V for level {i}"),
                ));
            }
            if let Some(g) = (0..group.order()).find(|&g| {
                !levels
                    .iter()
                    .any(|w| group.conjugate_set(g, *w).is_subset_of(*v))
            }) {
                return Err(Error::invalid(
                    what,
                    format!(
                        "conjugation by {} moves every level out of level {i}",
                        group.name(g)
                    ),
                ));
            }
        }
        Ok(NeighborhoodBase { levels })
    }

    /// `{{e}}`: the discrete group topology.
    pub fn discrete(group: &FiniteGroup) -> NeighborhoodBase {
        NeighborhoodBase {
            levels: vec![GroupSet::singleton(group.identity())],
        }
    }

    /// `{G}`: the indiscrete group topology.
    pub fn indiscrete(group: &FiniteGroup) -> NeighborhoodBase {
        NeighborhoodBase {
            levels: vec![group.all()],
        }
    }

    pub fn levels(&self) -> &[GroupSet] {
        &self.levels
    }

    pub fn deepest(&self) -> GroupSet {
        *self.levels.last().expect("chains are nonempty")
    }

    /// Every valid chain of `1..=max_levels` strictly descending levels drawn
    /// from `pool`, in pool order.
    pub fn enumerate(
        group: &FiniteGroup,
        pool: &[GroupSet],
        max_levels: usize,
    ) -> Vec<NeighborhoodBase> {
        let mut out = Vec::new();
        for k in 1..=max_levels {
            for combo in pool.iter().copied().permutations(k) {
                let descending = combo
                    .windows(2)
                    .all(|w| w[1].is_subset_of(w[0]) && w[1] != w[0]);
                if descending {
                    if let Ok(base) = NeighborhoodBase::new(group, combo) {
                        out.push(base);
                    }
                }
            }
        }
        out
    }
}

/// A group action with a neighborhood germ at the identity.
#[derive(Debug, Clone)]
pub struct GActionGerm {
    group: Arc<FiniteGroup>,
    base: NeighborhoodBase,
    carrier: CarrierRef,
    act: Vec<Vec<usize>>,
}

impl GActionGerm {
    /// Validates that each `act[g]` is a permutation, `act(e) = id` and
    /// `act(g·h) = act(g) ∘ act(h)`.
    pub fn new(
        group: Arc<FiniteGroup>,
        base: NeighborhoodBase,
        carrier: CarrierRef,
        act: Vec<Vec<usize>>,
    ) -> Result<GActionGerm> {
        let n = carrier.len();
        if act.len() != group.order() {
            return Err(Error::invalid(
                "action",
                format!(
                    "{} permutations for a group of order {}",
                    act.len(),
                    group.order()
                ),
            ));
        }
        if let Some(g) = (0..group.order()).find(|&g| !is_permutation(&act[g], n)) {
            return Err(Error::invalid(
                "action",
                format!(
                    "{} does not act as a bijection of the carrier",
                    group.name(g)
                ),
            ));
        }
        if act[group.identity()]
            .iter()
            .enumerate()
            .any(|(x, &y)| x != y)
        {
            return Err(Error::invalid(
                "action",
                "the identity does not act trivially",
            ));
        }
        for (g, h) in (0..group.order()).cartesian_product(0..group.order()) {
            let gh = group.mul(g, h);
            if (0..n).any(|x| act[gh][x] != act[g][act[h][x]]) {
                return Err(Error::invalid(
                    "action",
                    format!("action law fails for {}·{}", group.name(g), group.name(h)),
                ));
            }
        }
        Ok(GActionGerm {
            group,
            base,
            carrier,
            act,
        })
    }

    /// The trivial group acting on `carrier`.
    pub fn trivial(carrier: &CarrierRef) -> GActionGerm {
        let group = FiniteGroup::trivial();
        let base = NeighborhoodBase::discrete(&group);
        GActionGerm {
            group: Arc::new(group),
            base,
            carrier: carrier.clone(),
            act: vec![(0..carrier.len()).collect()],
        }
    }

    /// The same action with a different neighborhood chain.
    pub fn with_base(&self, base: NeighborhoodBase) -> GActionGerm {
        GActionGerm {
            base,
            ..self.clone()
        }
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn group_arc(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn base(&self) -> &NeighborhoodBase {
        &self.base
    }

    pub fn levels(&self) -> &[GroupSet] {
        self.base.levels()
    }

    pub fn carrier(&self) -> &CarrierRef {
        &self.carrier
    }

    pub fn permutations(&self) -> &[Vec<usize>] {
        &self.act
    }

    pub fn apply(&self, g: usize, x: usize) -> usize {
        self.act[g][x]
    }

    /// `gA`.
    pub fn image(&self, g: usize, a: Subset) -> Subset {
        Subset::from_elements(a.iter().map(|x| self.act[g][x]))
    }

    /// `VA = {v(x) : v ∈ V, x ∈ A}`.
    pub fn translate_set(&self, v: GroupSet, a: Subset) -> Subset {
        v.iter()
            .fold(Subset::EMPTY, |acc, g| acc.union(self.image(g, a)))
    }

    /// `gε = {(gx, gy) : (x, y) ∈ ε}`.
    pub fn translate_rel(&self, g: usize, eps: &Rel) -> Rel {
        eps.map_by(&self.act[g])
    }

    pub fn is_trivial_action(&self) -> bool {
        self.act
            .iter()
            .all(|p| p.iter().enumerate().all(|(x, &y)| x == y))
    }

    /// The sub-germ on a subgroup `K`: elements of `K`, levels `Vᵢ ∩ K`.
    pub fn restrict_to_subgroup(&self, k: GroupSet) -> Result<GActionGerm> {
        let g = &self.group;
        if !g.is_subgroup(k) {
            return Err(Error::precondition(
                "restrict_to_subgroup",
                format!("{} is not a subgroup", g.format_set(k)),
            ));
        }
        let elements: Vec<usize> = k.iter().collect();
        let pos = |x: usize| {
            elements
                .iter()
                .position(|&y| y == x)
                .expect("closed subgroup")
        };
        let names = elements.iter().map(|&x| g.name(x).to_string()).collect();
        let table = elements
            .iter()
            .map(|&a| elements.iter().map(|&b| pos(g.mul(a, b))).collect())
            .collect();
        let sub = FiniteGroup::from_table_capped(names, table, 64)?;
        let levels = self
            .levels()
            .iter()
            .map(|v| GroupSet::from_elements(v.intersection(k).iter().map(pos)))
            .collect();
        let base = NeighborhoodBase::new(&sub, levels)?;
        let act = elements.iter().map(|&x| self.act[x].clone()).collect();
        GActionGerm::new(Arc::new(sub), base, self.carrier.clone(), act)
    }

    /// Whether every `ε` contains some basis entourage after translation by
    /// every group element; a basis-level reading of "every translation is
    /// uniformly continuous" (covers `π^g` and its inverse `π^{g⁻¹}`).
    fn saturation_violation(&self, u: &UnifBase) -> Option<ActionWitness> {
        for g in 0..self.group.order() {
            for (i, eps) in u.basis().iter().enumerate() {
                let moved = self.translate_rel(g, eps);
                if !u.basis().iter().any(|b| b.is_subset_of(&moved)) {
                    return Some(ActionWitness {
                        g: Some(g),
                        ..ActionWitness::entourage(i)
                    });
                }
            }
        }
        None
    }

    fn bounded_violation(&self, u: &UnifBase) -> Option<ActionWitness> {
        let moves_within = |v: GroupSet, eps: &Rel| {
            v.iter()
                .all(|g| (0..self.carrier.len()).all(|x| eps.contains(self.apply(g, x), x)))
        };
        for (i, eps) in u.basis().iter().enumerate() {
            if self.levels().iter().any(|v| moves_within(*v, eps)) {
                continue;
            }
            let level = self.levels().len() - 1;
            let (g, x) = self
                .base
                .deepest()
                .iter()
                .cartesian_product(0..self.carrier.len())
                .find(|&(g, x)| !eps.contains(self.apply(g, x), x))
                .expect("a failing level has a violating pair");
            return Some(ActionWitness {
                level: Some(level),
                g: Some(g),
                x: Some(x),
                ..ActionWitness::entourage(i)
            });
        }
        None
    }

    /// Least `(v, x, y)` with `v ∈ p`, `(x, y) ∈ δ` and `(vx, vy) ∉ ε`.
    fn equicontinuity_gap(
        &self,
        p: GroupSet,
        delta: &Rel,
        eps: &Rel,
    ) -> Option<(usize, usize, usize)> {
        p.iter()
            .flat_map(|v| delta.pairs().map(move |(x, y)| (v, x, y)))
            .find(|&(v, x, y)| !eps.contains(self.apply(v, x), self.apply(v, y)))
    }

    fn quasibounded_violation(&self, u: &UnifBase) -> Option<ActionWitness> {
        for (i, eps) in u.basis().iter().enumerate() {
            let ok = self.levels().iter().any(|v| {
                u.basis()
                    .iter()
                    .any(|d| self.equicontinuity_gap(*v, d, eps).is_none())
            });
            if ok {
                continue;
            }
            let (g, x, y) = self
                .equicontinuity_gap(self.base.deepest(), &u.basis()[0], eps)
                .expect("a failing level has a violating triple");
            return Some(ActionWitness {
                delta: Some(0),
                level: Some(self.levels().len() - 1),
                g: Some(g),
                x: Some(x),
                y: Some(y),
                ..ActionWitness::entourage(i)
            });
        }
        None
    }

    /// `P` acts uniformly equicontinuously: `∀ε ∃δ ∀(x,y)∈δ ∀g∈P (gx,gy) ∈ ε`.
    pub fn uniform_equicontinuity_violation(
        &self,
        u: &UnifBase,
        p: GroupSet,
    ) -> Option<ActionWitness> {
        for (i, eps) in u.basis().iter().enumerate() {
            if u.basis()
                .iter()
                .any(|d| self.equicontinuity_gap(p, d, eps).is_none())
            {
                continue;
            }
            let (g, x, y) = self
                .equicontinuity_gap(p, &u.basis()[0], eps)
                .expect("a failing entourage has a violating triple");
            return Some(ActionWitness {
                delta: Some(0),
                g: Some(g),
                x: Some(x),
                y: Some(y),
                ..ActionWitness::entourage(i)
            });
        }
        None
    }

    /// `P` acts equicontinuously: `∀x₀ ∀ε ∃δ ∀x ∈ δ(x₀) ∀g ∈ P (gx₀, gx) ∈ ε`.
    pub fn equicontinuity_violation(&self, u: &UnifBase, p: GroupSet) -> Option<ActionWitness> {
        let gap = |x0: usize, delta: &Rel, eps: &Rel| {
            p.iter()
                .cartesian_product(delta.row(x0).iter().collect::<Vec<_>>())
                .find(|&(g, x)| !eps.contains(self.apply(g, x0), self.apply(g, x)))
        };
        for x0 in 0..self.carrier.len() {
            for (i, eps) in u.basis().iter().enumerate() {
                if u.basis().iter().any(|d| gap(x0, d, eps).is_none()) {
                    continue;
                }
                let (g, x) = gap(x0, &u.basis()[0], eps).expect("violating pair");
                return Some(ActionWitness {
                    delta: Some(0),
                    g: Some(g),
                    x: Some(x0),
                    y: Some(x),
                    ..ActionWitness::entourage(i)
                });
            }
        }
        None
    }

    /// Joint continuity of the action at every `(g₀, x₀)`:
    /// `∀ε ∃Vᵢ ∃δ  g₀Vᵢ·δ(x₀) ⊆ ε(g₀x₀)`.
    pub fn check_action_continuity(&self, u: &UnifBase) -> ContinuityReport {
        let g = &self.group;
        for g0 in 0..g.order() {
            for x0 in 0..self.carrier.len() {
                let target_point = self.apply(g0, x0);
                for (i, eps) in u.basis().iter().enumerate() {
                    let target = eps.row(target_point);
                    let ok = self.levels().iter().any(|v| {
                        let nbhd = g.left_translate(g0, *v);
                        u.basis()
                            .iter()
                            .any(|d| self.translate_set(nbhd, d.row(x0)).is_subset_of(target))
                    });
                    if !ok {
                        return ContinuityReport {
                            witness: Some(ActionWitness {
                                g: Some(g0),
                                x: Some(x0),
                                ..ActionWitness::entourage(i)
                            }),
                        };
                    }
                }
            }
        }
        ContinuityReport { witness: None }
    }

    /// Decides every property exhaustively over basis entourages, chain
    /// levels, group elements and carrier pairs.
    pub fn classify(&self, u: &UnifBase) -> ClassificationReport {
        let saturated = self.saturation_violation(u);
        let bounded = self.bounded_violation(u);
        let quasibounded = self.quasibounded_violation(u);
        let all = self.group.all();

        let mut verdicts = AxiomReport::new();
        verdicts.record(Property::Saturated, saturated);
        verdicts.record(Property::Bounded, bounded);
        verdicts.record(Property::Quasibounded, quasibounded);
        verdicts.record(Property::Equiuniform, bounded.or(saturated));
        verdicts.record(Property::PiUniform, quasibounded.or(saturated));
        verdicts.record(
            Property::Equicontinuous,
            self.equicontinuity_violation(u, all),
        );
        verdicts.record(
            Property::UniformlyEquicontinuous,
            self.uniform_equicontinuity_violation(u, all),
        );
        verdicts.record(
            Property::ActionContinuous,
            self.check_action_continuity(u).witness,
        );
        ClassificationReport { verdicts }
    }

    /// The saturation `{⋂_g gε : ε ∈ basis}`: every translation becomes
    /// uniformly continuous and each new entourage lies inside its source.
    pub fn saturate_uniformity(&self, u: &UnifBase) -> Result<UnifBase> {
        let basis = u
            .basis()
            .iter()
            .map(|eps| {
                (0..self.group.order())
                    .map(|g| self.translate_rel(g, eps))
                    .reduce(|a, b| a.intersection(&b))
                    .expect("groups are nonempty")
            })
            .collect();
        UnifBase::new(u.carrier(), basis)
    }
}

/// Every homomorphism from `group` into the symmetric group on `n` points,
/// as one permutation per group element.
pub fn enumerate_actions(group: &FiniteGroup, n: usize) -> Vec<Vec<Vec<usize>>> {
    let gens = group.generators();
    let perms: Vec<Vec<usize>> = (0..n).permutations(n).collect();
    let mut out = Vec::new();
    let choices = gens
        .iter()
        .map(|_| 0..perms.len())
        .multi_cartesian_product();
    let choices: Box<dyn Iterator<Item = Vec<usize>>> = if gens.is_empty() {
        Box::new(std::iter::once(vec![]))
    } else {
        Box::new(choices)
    };
    for choice in choices {
        if let Some(act) = extend_to_action(group, &gens, choice.iter().map(|&i| &perms[i]), n) {
            out.push(act);
        }
    }
    out
}

fn extend_to_action<'a>(
    group: &FiniteGroup,
    gens: &[usize],
    images: impl Iterator<Item = &'a Vec<usize>>,
    n: usize,
) -> Option<Vec<Vec<usize>>> {
    let images: Vec<&Vec<usize>> = images.collect();
    let mut act: Vec<Option<Vec<usize>>> = vec![None; group.order()];
    act[group.identity()] = Some((0..n).collect());
    let mut queue = VecDeque::from([group.identity()]);
    while let Some(h) = queue.pop_front() {
        for (s, &gen) in gens.iter().enumerate() {
            let hs = group.mul(h, gen);
            let image: Vec<usize> = {
                let ph = act[h].as_ref().expect("visited");
                (0..n).map(|x| ph[images[s][x]]).collect()
            };
            match &act[hs] {
                Some(existing) if *existing != image => return None,
                Some(_) => {}
                None => {
                    act[hs] = Some(image);
                    queue.push_back(hs);
                }
            }
        }
    }
    let act: Vec<Vec<usize>> = act.into_iter().collect::<Option<_>>()?;
    let hom = (0..group.order())
        .cartesian_product(0..group.order())
        .all(|(a, b)| {
            let ab = group.mul(a, b);
            (0..n).all(|x| act[ab][x] == act[a][act[b][x]])
        });
    hom.then_some(act)
}

/// One representative per isomorphism class of actions on `n` points (up
/// to relabeling the carrier), as the lexicographically least relabeling.
pub fn canonical_actions(group: &FiniteGroup, n: usize) -> Vec<Vec<Vec<usize>>> {
    let relabelings: Vec<Vec<usize>> = (0..n).permutations(n).collect();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for act in enumerate_actions(group, n) {
        let canonical = relabelings
            .iter()
            .map(|sigma| {
                let mut inv = vec![0; n];
                for (x, &y) in sigma.iter().enumerate() {
                    inv[y] = x;
                }
                act.iter()
                    .map(|p| (0..n).map(|x| sigma[p[inv[x]]]).collect::<Vec<_>>())
                    .collect::<Vec<_>>()
            })
            .min()
            .expect("at least one relabeling");
        if seen.insert(canonical.clone()) {
            out.push(canonical);
        }
    }
    out.sort();
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Property {
    Saturated,
    Bounded,
    Quasibounded,
    Equiuniform,
    PiUniform,
    Equicontinuous,
    UniformlyEquicontinuous,
    ActionContinuous,
}

impl Property {
    pub const ALL: [Property; 8] = [
        Property::Saturated,
        Property::Bounded,
        Property::Quasibounded,
        Property::Equiuniform,
        Property::PiUniform,
        Property::Equicontinuous,
        Property::UniformlyEquicontinuous,
        Property::ActionContinuous,
    ];

    /// Inverse of `Display`.
    pub fn parse(s: &str) -> Option<Property> {
        Property::ALL.into_iter().find(|p| p.to_string() == s)
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Property::Saturated => "saturated",
            Property::Bounded => "bounded",
            Property::Quasibounded => "quasibounded",
            Property::Equiuniform => "equiuniform",
            Property::PiUniform => "pi_uniform",
            Property::Equicontinuous => "equicontinuous",
            Property::UniformlyEquicontinuous => "uniformly_equicontinuous",
            Property::ActionContinuous => "action_continuous",
        };
        f.write_str(s)
    }
}

/// Witness data for a failed property; fields not relevant to the property
/// are `None`. Indices refer to basis entourages, chain levels, group
/// elements and carrier points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ActionWitness {
    pub entourage: usize,
    pub delta: Option<usize>,
    pub level: Option<usize>,
    pub g: Option<usize>,
    pub x: Option<usize>,
    pub y: Option<usize>,
}

impl ActionWitness {
    fn entourage(i: usize) -> Self {
        ActionWitness {
            entourage: i,
            ..Default::default()
        }
    }

    pub fn describe(&self, germ: &GActionGerm) -> String {
        let mut parts = vec![format!("eps=#{}", self.entourage)];
        if let Some(d) = self.delta {
            parts.push(format!("delta=#{d}"));
        }
        if let Some(l) = self.level {
            parts.push(format!("level={l}"));
        }
        if let Some(g) = self.g {
            parts.push(format!("g={}", germ.group().name(g)));
        }
        if let Some(x) = self.x {
            parts.push(format!("x={}", germ.carrier().name(x)));
        }
        if let Some(y) = self.y {
            parts.push(format!("y={}", germ.carrier().name(y)));
        }
        parts.join(" ")
    }
}

impl fmt::Display for ActionWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "eps=#{}", self.entourage)?;
        for (label, v) in [
            ("delta", self.delta),
            ("level", self.level),
            ("g", self.g),
            ("x", self.x),
            ("y", self.y),
        ] {
            if let Some(v) = v {
                write!(f, " {label}={v}")?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassificationReport {
    pub verdicts: AxiomReport<Property, ActionWitness>,
}

impl ClassificationReport {
    pub fn passes(&self, p: Property) -> bool {
        self.verdicts.passes(p)
    }

    pub fn witness(&self, p: Property) -> Option<&ActionWitness> {
        self.verdicts.verdict(p).and_then(|v| v.witness())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContinuityReport {
    /// The least violating `(g₀, x₀, ε)`, if any.
    pub witness: Option<ActionWitness>,
}

impl ContinuityReport {
    pub fn holds(&self) -> bool {
        self.witness.is_none()
    }
}
