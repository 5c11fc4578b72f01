//! Exhaustive and seeded property suites over generated instance families.
//!
//! Every invariant is evaluated per instance in parallel and aggregated in
//! instance order, so reports do not depend on scheduling.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use gprox::equivariant::{
    beta_g_proximity, bracket_entourage, check_equinormal, check_g_proximity, check_maximality,
    compute_ug, nu_proximity,
};
use gprox::gaction::{
    canonical_actions, FiniteGroup, GActionGerm, GroupSet, NeighborhoodBase, Property,
};
use gprox::metricprox::{
    is_isometric, metric_g_proximity, metric_ug_proximity, metric_uniformity, sup_pseudometric,
    xi_uniformity, FiniteMetric, Pseudometric, PseudometricFamily,
};
use gprox::proximity::{check_axioms, from_uniformity, Prox, ProxAxiom};
use gprox::rationals::{
    bonding_map, build_tower, check_ordcomp_claim, decide_far, orbit_space, rat, saturate,
    separates, Atom, Chain, ClaimVerdict, Endpoint, FarVerdict, Rat, RatSet,
};
use gprox::setrel::{Carrier, CarrierRef, Rel, Subset};
use gprox::uniformity::UnifBase;
use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mutation {
    /// Brackets keep only pairs `(x, y)` with `x ≤ y`.
    Bracket,
    /// One far entry of each `β_G` table is flipped in one direction only.
    BetagTable,
    /// `ν` is evaluated at the top chain level only.
    NuTop,
}

impl Mutation {
    pub const ALL: [Mutation; 3] = [Mutation::Bracket, Mutation::BetagTable, Mutation::NuTop];

    pub fn name(self) -> &'static str {
        match self {
            Mutation::Bracket => "bracket",
            Mutation::BetagTable => "betag-table",
            Mutation::NuTop => "nu-top",
        }
    }

    pub fn parse(s: &str) -> Option<Mutation> {
        Mutation::ALL.into_iter().find(|m| m.name() == s)
    }
}

#[derive(Debug, Clone)]
pub struct SuiteOptions {
    pub max_n: usize,
    pub max_group: usize,
    pub seed: u64,
    pub filter: Option<String>,
    pub mutation: Option<Mutation>,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            max_n: 5,
            max_group: 24,
            seed: 20240601,
            filter: None,
            mutation: None,
        }
    }
}

/// Invariant names with the acceptance criterion each one backs.
pub const INVARIANTS: [(&str, u8, &str); 10] = [
    ("tgprox", 1, "nu equals the proximity of U^G"),
    ("betag", 2, "beta_G equals nu of the discrete uniformity"),
    (
        "lemma-qb",
        3,
        "U^G is a valid bounded basis, saturated and equivalent when expected",
    ),
    (
        "axioms",
        4,
        "uniform proximities satisfy the axioms; P5 agrees with P5'",
    ),
    (
        "strong",
        5,
        "far pairs have far translates at some chain level",
    ),
    (
        "rationals",
        6,
        "orbit spaces, bonding maps, saturation and farness on Q",
    ),
    (
        "ordcomp",
        7,
        "convex neighborhoods contain a stabilizer saturation",
    ),
    (
        "metric",
        8,
        "metric G-proximity formula equals the proximity of U(d)^G",
    ),
    (
        "maximality",
        9,
        "nu dominates every smaller uniform G-proximity",
    ),
    ("sigma", 10, "sup-pseudometric uniformity conclusions"),
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvariantResult {
    pub name: &'static str,
    pub criterion: u8,
    pub instances: usize,
    pub failures: usize,
    /// Lowest-indexed counterexample.
    pub first_failure: Option<String>,
}

impl InvariantResult {
    pub fn passed(&self) -> bool {
        self.failures == 0 && self.instances > 0
    }
}

impl fmt::Display for InvariantResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} [{:>2}] {:<11} instances={} failures={}",
            if self.passed() { "PASS" } else { "FAIL" },
            self.criterion,
            self.name,
            self.instances,
            self.failures
        )?;
        if let Some(w) = &self.first_failure {
            write!(f, "\n      counterexample: {w}")?;
        }
        Ok(())
    }
}

pub fn run(opts: &SuiteOptions) -> Vec<InvariantResult> {
    let wanted = |name: &str| opts.filter.as_deref().is_none_or(|f| name.contains(f));
    let mut family = None;
    let mut out = Vec::new();
    for (name, criterion, _) in INVARIANTS {
        if !wanted(name) {
            continue;
        }
        let needs_family = matches!(criterion, 1 | 2 | 3 | 5 | 9);
        if needs_family && family.is_none() {
            family = Some(family_one(opts.max_n, opts.max_group));
        }
        let fam = family.as_ref();
        let outcomes = match criterion {
            1 => tgprox(fam.unwrap(), opts.mutation),
            2 => betag(&family_germs(fam.unwrap()), opts.mutation),
            3 => lemma_qb(fam.unwrap()),
            4 => axioms(opts),
            5 => strong(fam.unwrap(), opts.mutation),
            6 => rationals(opts),
            7 => ordcomp(opts),
            8 => metric(opts),
            9 => maximality(fam.unwrap()),
            _ => sigma(opts),
        };
        out.push(summarize(name, criterion, outcomes));
    }
    out
}

type Outcome = std::result::Result<(), String>;

fn summarize(name: &'static str, criterion: u8, outcomes: Vec<Outcome>) -> InvariantResult {
    let failures = outcomes.iter().filter(|o| o.is_err()).count();
    let first_failure = outcomes
        .iter()
        .enumerate()
        .find_map(|(i, o)| o.as_ref().err().map(|e| format!("#{i} {e}")));
    InvariantResult {
        name,
        criterion,
        instances: outcomes.len(),
        failures,
        first_failure,
    }
}

fn rng(opts: &SuiteOptions, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(opts.seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

// ----- instance families -----

pub fn groups(max_group: usize) -> Vec<(&'static str, FiniteGroup)> {
    [
        ("Z2", FiniteGroup::cyclic(2).0),
        ("Z3", FiniteGroup::cyclic(3).0),
        ("Z4", FiniteGroup::cyclic(4).0),
        ("S3", FiniteGroup::symmetric(3).0),
    ]
    .into_iter()
    .filter(|(_, g)| g.order() <= max_group)
    .collect()
}

#[derive(Debug, Clone)]
pub struct Germ {
    pub label: String,
    pub germ: GActionGerm,
}

/// One germ per (group, carrier size, action up to relabeling, valid chain
/// of at most two subgroup levels).
pub fn germs(names: &[&str], max_n: usize, max_group: usize) -> Vec<Germ> {
    let mut out = Vec::new();
    for (gname, group) in groups(max_group)
        .into_iter()
        .filter(|(n, _)| names.contains(n))
    {
        let group = Arc::new(group);
        let chains = NeighborhoodBase::enumerate(&group, &group.subgroups(), 2);
        let gens = group.generators();
        for n in 1..=max_n {
            let carrier = Carrier::range(n).expect("small carrier");
            for act in canonical_actions(&group, n) {
                let act_label = gens
                    .iter()
                    .map(|&g| format!("{}->[{}]", group.name(g), act[g].iter().join(",")))
                    .join(" ");
                for base in &chains {
                    let chain_label = base.levels().iter().map(|v| group.format_set(*v)).join(">");
                    let germ =
                        GActionGerm::new(group.clone(), base.clone(), carrier.clone(), act.clone())
                            .expect("enumerated actions are valid");
                    out.push(Germ {
                        label: format!("{gname} n={n} act {act_label} chain {chain_label}"),
                        germ,
                    });
                }
            }
        }
    }
    out
}

/// Set partitions of `0..n` as equivalence relations.
pub fn equivalences(carrier: &CarrierRef) -> Vec<Rel> {
    let n = carrier.len();
    let mut out = Vec::new();
    let mut labels = vec![0usize; n];
    fn go(i: usize, max: usize, labels: &mut Vec<usize>, carrier: &CarrierRef, out: &mut Vec<Rel>) {
        if i == labels.len() {
            out.push(Rel::from_fn(carrier, |x, y| labels[x] == labels[y]));
            return;
        }
        for l in 0..=max + 1 {
            labels[i] = l;
            go(i + 1, max.max(l), labels, carrier, out);
        }
    }
    if n == 0 {
        return out;
    }
    go(1, 0, &mut labels, carrier, &mut out);
    out
}

/// Bases of at most two entourages: single equivalences, nested pairs of
/// equivalences, and an equivalence under its one-edge symmetric extension.
pub fn basis_pool(carrier: &CarrierRef) -> Vec<UnifBase> {
    let eqs = equivalences(carrier);
    let n = carrier.len();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    let mut push = |basis: Vec<Rel>| {
        let key: Vec<Vec<u32>> = basis
            .iter()
            .map(|r| r.rows().map(|s| s.0).collect())
            .collect();
        if seen.insert(key) {
            let u = UnifBase::new(carrier, basis).expect("nonempty");
            if u.is_valid() {
                out.push(u);
            }
        }
    };
    for e in &eqs {
        push(vec![e.clone()]);
    }
    for (big, small) in eqs.iter().cartesian_product(&eqs) {
        if small != big && small.is_subset_of(big) {
            push(vec![big.clone(), small.clone()]);
        }
    }
    for e in &eqs {
        for (x, y) in (0..n).tuple_combinations() {
            if !e.contains(x, y) {
                let edge = Rel::from_pairs(carrier, [(x, y), (y, x)]).expect("in range");
                push(vec![e.union(&edge), e.clone()]);
            }
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct Instance {
    pub label: String,
    pub germ: GActionGerm,
    pub u: UnifBase,
}

fn describe_basis(u: &UnifBase) -> String {
    u.basis().iter().map(|r| r.to_string()).join(" ; ")
}

/// Whether `(germ, u)` meets the hypotheses of the ν-equality theorem.
pub fn admissible(germ: &GActionGerm, u: &UnifBase) -> bool {
    u.is_valid()
        && germ.classify(u).passes(Property::PiUniform)
        && germ.check_action_continuity(u).holds()
}

/// Family (1): every admissible pairing of a germ with a pooled basis.
pub fn family_one(max_n: usize, max_group: usize) -> Vec<Instance> {
    let all = germs(&["Z2", "Z3", "Z4", "S3"], max_n, max_group);
    let pools: HashMap<usize, Vec<UnifBase>> = (1..=max_n)
        .map(|n| (n, basis_pool(&Carrier::range(n).expect("small"))))
        .collect();
    let per_germ: Vec<Vec<Instance>> = all
        .par_iter()
        .map(|g| {
            pools[&g.germ.carrier().len()]
                .iter()
                .filter(|u| admissible(&g.germ, u))
                .map(|u| Instance {
                    label: format!("{} u {}", g.label, describe_basis(u)),
                    germ: g.germ.clone(),
                    u: u.clone(),
                })
                .collect()
        })
        .collect();
    per_germ.into_iter().flatten().collect()
}

/// Distinct germs of the family, in order of first appearance.
fn family_germs(family: &[Instance]) -> Vec<(String, GActionGerm)> {
    let mut seen = BTreeSet::new();
    family
        .iter()
        .filter_map(|i| {
            let label = i.label.split(" u ").next().unwrap_or_default().to_string();
            seen.insert(label.clone()).then(|| (label, i.germ.clone()))
        })
        .collect()
}

fn pair(carrier: &CarrierRef, (a, b): (Subset, Subset)) -> String {
    format!(
        "A={} B={}",
        carrier.format_subset(a),
        carrier.format_subset(b)
    )
}

// ----- criteria over family (1) -----

fn nu_for(inst: &Instance, mutation: Option<Mutation>) -> gprox::Result<Prox> {
    if mutation == Some(Mutation::NuTop) {
        let delta = from_uniformity(&inst.u)?;
        let top = inst.germ.levels()[0];
        let g = &inst.germ;
        Prox::from_fn(g.carrier(), |a, b| {
            delta.near(g.translate_set(top, a), g.translate_set(top, b))
        })
    } else {
        nu_proximity(&inst.germ, &inst.u)
    }
}

fn ug_proximity_for(inst: &Instance, mutation: Option<Mutation>) -> gprox::Result<Prox> {
    if mutation == Some(Mutation::Bracket) {
        let g = &inst.germ;
        let basis = g
            .levels()
            .iter()
            .flat_map(|v| {
                inst.u
                    .basis()
                    .iter()
                    .map(move |e| bracket_entourage(g, *v, e))
            })
            .map(|r| Rel::from_fn(g.carrier(), |x, y| x <= y && r.contains(x, y)))
            .collect();
        from_uniformity(&UnifBase::new(g.carrier(), basis)?)
    } else {
        from_uniformity(&compute_ug(&inst.germ, &inst.u)?)
    }
}

fn tgprox(family: &[Instance], mutation: Option<Mutation>) -> Vec<Outcome> {
    family
        .par_iter()
        .map(|inst| {
            let nu = nu_for(inst, mutation).map_err(|e| format!("{}: {e}", inst.label))?;
            let ug =
                ug_proximity_for(inst, mutation).map_err(|e| format!("{}: {e}", inst.label))?;
            match nu.first_difference(&ug).expect("same carrier") {
                None => Ok(()),
                Some(d) => Err(format!(
                    "{}: nu={} but U^G proximity={} at {}",
                    inst.label,
                    verdict(nu.near(d.0, d.1)),
                    verdict(ug.near(d.0, d.1)),
                    pair(inst.germ.carrier(), d)
                )),
            }
        })
        .collect()
}

fn verdict(near: bool) -> &'static str {
    if near {
        "near"
    } else {
        "far"
    }
}

/// Flips the least far pair of nonempty sets to near in one direction.
fn corrupt(p: Prox) -> Prox {
    let carrier = p.carrier().clone();
    let target = carrier
        .subsets()
        .skip(1)
        .flat_map(|a| carrier.subsets().skip(1).map(move |b| (a, b)))
        .find(|&(a, b)| p.far(a, b));
    match target {
        Some((a, b)) => p.with_pair(a, b, true),
        None => p,
    }
}

fn betag_for(germ: &GActionGerm, mutation: Option<Mutation>) -> gprox::Result<Prox> {
    let beta = beta_g_proximity(germ)?;
    Ok(if mutation == Some(Mutation::BetagTable) {
        corrupt(beta)
    } else {
        beta
    })
}

fn betag(germs: &[(String, GActionGerm)], mutation: Option<Mutation>) -> Vec<Outcome> {
    germs
        .par_iter()
        .map(|(label, germ)| {
            let beta = betag_for(germ, mutation).map_err(|e| format!("{label}: {e}"))?;
            let report = check_axioms(&beta).map_err(|e| format!("{label}: {e}"))?;
            if let Some((axiom, w)) = report
                .failures()
                .find(|(a, _)| ProxAxiom::PROXIMITY.contains(a))
            {
                return Err(format!(
                    "{label}: beta_G fails {axiom} at {}",
                    w.describe(germ.carrier())
                ));
            }
            let nu = nu_proximity(germ, &UnifBase::discrete(germ.carrier()))
                .map_err(|e| e.to_string())?;
            if let Some(d) = beta.first_difference(&nu).expect("same carrier") {
                return Err(format!(
                    "{label}: beta_G and nu differ at {}",
                    pair(germ.carrier(), d)
                ));
            }
            let eq = check_equinormal(germ).map_err(|e| e.to_string())?;
            if !eq.is_equinormal() || !eq.consistent() {
                return Err(format!("{label}: not equinormal"));
            }
            Ok(())
        })
        .collect()
}

fn lemma_qb(family: &[Instance]) -> Vec<Outcome> {
    family
        .par_iter()
        .map(|inst| {
            let fail = |what: &str| Err(format!("{}: {what}", inst.label));
            let ug = match compute_ug(&inst.germ, &inst.u) {
                Ok(ug) => ug,
                Err(e) => return fail(&e.to_string()),
            };
            if !ug.validate_basis().all_pass() {
                return fail("U^G basis is invalid");
            }
            let input = inst.germ.classify(&inst.u);
            let output = inst.germ.classify(&ug);
            if !output.passes(Property::Bounded) {
                return fail("U^G is not bounded");
            }
            if input.passes(Property::Saturated) && !output.passes(Property::Saturated) {
                return fail("U^G lost saturation");
            }
            let totally_bounded = inst.u.totally_bounded().is_totally_bounded();
            if totally_bounded
                && input.passes(Property::PiUniform)
                && !ug.equivalent(&inst.u).expect("same carrier")
            {
                return fail("pi-uniform input is not equivalent to U^G");
            }
            Ok(())
        })
        .collect()
}

fn strong(family: &[Instance], mutation: Option<Mutation>) -> Vec<Outcome> {
    let mut out: Vec<Outcome> = family
        .par_iter()
        .map(|inst| {
            let nu = nu_for(inst, mutation).map_err(|e| format!("{}: {e}", inst.label))?;
            check_strong(&inst.germ, &nu).map_err(|e| format!("{} nu: {e}", inst.label))
        })
        .collect();
    out.extend(
        family_germs(family)
            .par_iter()
            .map(|(label, germ)| {
                let beta = betag_for(germ, mutation).map_err(|e| format!("{label}: {e}"))?;
                check_strong(germ, &beta).map_err(|e| format!("{label} beta_G: {e}"))
            })
            .collect::<Vec<_>>(),
    );
    out
}

fn check_strong(germ: &GActionGerm, p: &Prox) -> Outcome {
    let report = check_g_proximity(germ, p);
    if let Some(d) = report.strong_compatibility {
        return Err(format!(
            "no level with far translates for {}",
            pair(germ.carrier(), d)
        ));
    }
    if let Some(d) = report.compatibility {
        return Err(format!(
            "no level with disjoint translates for {}",
            pair(germ.carrier(), d)
        ));
    }
    if let Some((g, a, b)) = report.invariance {
        return Err(format!(
            "not invariant under {} at {}",
            germ.group().name(g),
            pair(germ.carrier(), (a, b))
        ));
    }
    Ok(())
}

fn maximality(family: &[Instance]) -> Vec<Outcome> {
    family
        .par_iter()
        .filter(|inst| inst.germ.carrier().len() <= 4)
        .map(|inst| {
            let report = check_maximality(&inst.germ, &inst.u).map_err(|e| e.to_string())?;
            match report.failure {
                None => Ok(()),
                Some((i, a, b)) => Err(format!(
                    "{}: candidate #{i} not dominated by nu at {}",
                    inst.label,
                    pair(inst.germ.carrier(), (a, b))
                )),
            }
        })
        .collect()
}

// ----- criterion 4 -----

fn axiom_outcome(
    label: impl Fn() -> String,
    p: &Prox,
    expect_proximity: bool,
    core_is_diagonal: Option<bool>,
) -> Outcome {
    let report = check_axioms(p).map_err(|e| e.to_string())?;
    if expect_proximity {
        if let Some((a, w)) = report
            .failures()
            .find(|(a, _)| ProxAxiom::PROXIMITY.contains(a))
        {
            return Err(format!(
                "{}: {a} fails at {}",
                label(),
                w.describe(p.carrier())
            ));
        }
    }
    if let Some(diag) = core_is_diagonal {
        if report.passes(ProxAxiom::P6) != diag {
            return Err(format!("{}: P6 disagrees with the basis core", label()));
        }
    }
    let p1_to_p4 = [ProxAxiom::P1, ProxAxiom::P2, ProxAxiom::P3, ProxAxiom::P4];
    if report.all_of(&p1_to_p4) && report.passes(ProxAxiom::P5) != report.passes(ProxAxiom::P5Prime)
    {
        return Err(format!("{}: P5 and P5' disagree", label()));
    }
    Ok(())
}

fn uniform_outcome(u: &UnifBase) -> Outcome {
    let p = from_uniformity(u).map_err(|e| e.to_string())?;
    let valid = u.is_valid();
    let diag = u.core() == Rel::diagonal(u.carrier());
    axiom_outcome(
        || format!("basis {}", describe_basis(u)),
        &p,
        valid,
        valid.then_some(diag),
    )
}

fn point_outcome(r: &Rel) -> Outcome {
    let p = Prox::from_point_relation(r).map_err(|e| e.to_string())?;
    axiom_outcome(
        || format!("point relation {r}"),
        &p,
        r.is_equivalence(),
        None,
    )
}

fn reflexive_relations(carrier: &CarrierRef) -> Vec<Rel> {
    let n = carrier.len();
    let off: Vec<(usize, usize)> = (0..n)
        .cartesian_product(0..n)
        .filter(|(x, y)| x != y)
        .collect();
    (0u64..1 << off.len())
        .map(|mask| {
            let chosen = off
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, p)| *p);
            Rel::diagonal(carrier).union(&Rel::from_pairs(carrier, chosen).expect("in range"))
        })
        .collect()
}

/// Every relation containing `e`, starting with `e` itself. Together these
/// give every valid basis of at most two entourages with minimum `e`.
fn supersets(carrier: &CarrierRef, e: &Rel) -> impl Iterator<Item = Rel> {
    let n = carrier.len();
    let free: Vec<(usize, usize)> = (0..n)
        .cartesian_product(0..n)
        .filter(|&(x, y)| !e.contains(x, y))
        .collect();
    let (carrier, e) = (carrier.clone(), e.clone());
    (0u64..1 << free.len()).map(move |mask| {
        let chosen = free
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, p)| *p);
        e.union(&Rel::from_pairs(&carrier, chosen).expect("in range"))
    })
}

fn symmetric_reflexive(carrier: &CarrierRef) -> Vec<Rel> {
    reflexive_relations(carrier)
        .into_iter()
        .filter(Rel::is_symmetric)
        .collect()
}

fn random_partition(rng: &mut ChaCha8Rng, carrier: &CarrierRef) -> Rel {
    let n = carrier.len();
    let k = rng.gen_range(1..=n);
    let labels: Vec<usize> = (0..n).map(|_| rng.gen_range(0..k)).collect();
    Rel::from_fn(carrier, |x, y| labels[x] == labels[y])
}

fn random_symmetric(rng: &mut ChaCha8Rng, carrier: &CarrierRef, base: &Rel, edges: usize) -> Rel {
    let n = carrier.len();
    let mut r = base.clone();
    for _ in 0..edges {
        let (x, y) = (rng.gen_range(0..n), rng.gen_range(0..n));
        r = r.union(&Rel::from_pairs(carrier, [(x, y), (y, x)]).expect("in range"));
    }
    r
}

fn axioms(opts: &SuiteOptions) -> Vec<Outcome> {
    let mut out = Vec::new();
    for n in 1..=opts.max_n.min(3) {
        let c = Carrier::range(n).expect("small");
        let rels = reflexive_relations(&c);
        let lists: Vec<Vec<Rel>> = rels
            .iter()
            .map(|r| vec![r.clone()])
            .chain(
                rels.iter()
                    .cartesian_product(&rels)
                    .map(|(a, b)| vec![a.clone(), b.clone()]),
            )
            .collect();
        out.extend(
            lists
                .par_iter()
                .map(|basis| uniform_outcome(&UnifBase::new(&c, basis.clone()).expect("nonempty")))
                .collect::<Vec<_>>(),
        );
        out.extend(symmetric_reflexive(&c).iter().map(point_outcome));
    }
    for n in 4..=opts.max_n.min(5) {
        let c = Carrier::range(n).expect("small");
        let eqs = equivalences(&c);
        out.extend(
            eqs.par_iter()
                .flat_map_iter(|e| {
                    let c = c.clone();
                    supersets(&c, e).map(move |s| {
                        let basis = if s == *e { vec![s] } else { vec![s, e.clone()] };
                        uniform_outcome(&UnifBase::new(&c, basis).expect("nonempty"))
                    })
                })
                .collect::<Vec<_>>(),
        );
        out.extend(
            symmetric_reflexive(&c)
                .par_iter()
                .map(point_outcome)
                .collect::<Vec<_>>(),
        );
    }
    let mut rng = rng(opts, 4);
    let random: Vec<(UnifBase, Rel)> = (0..1000)
        .map(|i| {
            let c = Carrier::range(6 + i % 3).expect("small");
            let fine = random_partition(&mut rng, &c);
            let edges = rng.gen_range(0..4);
            let coarse = random_symmetric(&mut rng, &c, &fine, edges);
            let basis = if rng.gen_bool(0.5) {
                vec![coarse, fine]
            } else {
                vec![fine]
            };
            let loose = random_symmetric(&mut rng, &c, &Rel::diagonal(&c), 3);
            (UnifBase::new(&c, basis).expect("nonempty"), loose)
        })
        .collect();
    out.extend(
        random
            .par_iter()
            .map(|(u, r)| uniform_outcome(u).and_then(|()| point_outcome(r)))
            .collect::<Vec<_>>(),
    );
    out
}

// ----- criteria 6 and 7 -----

/// `{k/2 : −4 ≤ k ≤ 4}`.
fn half_grid() -> Vec<Rat> {
    (-4..=4).map(|k| rat(k, 2)).collect()
}

fn random_ratset(rng: &mut ChaCha8Rng, grid: &[Rat]) -> RatSet {
    let k = rng.gen_range(0..=3);
    let atoms = (0..k)
        .map(|_| {
            if rng.gen_bool(0.4) {
                Atom::Point(grid.choose(rng).expect("nonempty").clone())
            } else {
                let mut ends: Vec<Endpoint> = grid.iter().cloned().map(Endpoint::Finite).collect();
                ends.push(Endpoint::NegInf);
                ends.push(Endpoint::PosInf);
                loop {
                    let (a, b) = (
                        ends.choose(rng).expect("nonempty"),
                        ends.choose(rng).expect("nonempty"),
                    );
                    if a < b && *a != Endpoint::PosInf && *b != Endpoint::NegInf {
                        break Atom::Open(a.clone(), b.clone());
                    }
                }
            }
        })
        .collect();
    RatSet::from_atoms(atoms)
}

fn random_chain(rng: &mut ChaCha8Rng, grid: &[Rat], max: usize) -> Chain {
    let k = rng.gen_range(0..=max.min(grid.len()));
    Chain::from_points(grid.choose_multiple(rng, k).cloned())
}

fn rationals(opts: &SuiteOptions) -> Vec<Outcome> {
    let mut out = Vec::new();
    let mut rng = rng(opts, 6);
    let fine: Vec<Rat> = (-40..=40).map(|k| rat(k, 7)).collect();

    // Cell-count law.
    for m in 0..=10 {
        for _ in 0..10 {
            let f = Chain::from_points(fine.choose_multiple(&mut rng, m).cloned());
            let cells = orbit_space(&f).len();
            out.push(if cells == 2 * m + 1 {
                Ok(())
            } else {
                Err(format!("|X_F| = {cells} for F = {f}"))
            });
        }
    }

    // Bonding maps over every pair and triple of chains on the half grid.
    let grid = half_grid();
    let chain_of = |mask: u32| {
        Chain::from_points(
            grid.iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, q)| q.clone()),
        )
    };
    let masks: Vec<u32> = (0..1u32 << grid.len()).collect();
    let maps: HashMap<(u32, u32), Vec<usize>> = masks
        .par_iter()
        .flat_map_iter(|&big| {
            let big_chain = chain_of(big);
            submasks(big)
                .map(move |small| {
                    (
                        (big, small),
                        bonding_map(&big_chain, &chain_of(small)).expect("included"),
                    )
                })
                .collect::<Vec<_>>()
        })
        .collect();
    let mut bonding: Vec<((u32, u32), &Vec<usize>)> = maps.iter().map(|(k, v)| (*k, v)).collect();
    bonding.sort_by_key(|(k, _)| *k);
    for ((big, small), map) in &bonding {
        let target = 2 * small.count_ones() as usize + 1;
        let image: BTreeSet<usize> = map.iter().copied().collect();
        out.push(if image.len() != target {
            Err(format!(
                "bonding {} -> {} is not surjective",
                chain_of(*big),
                chain_of(*small)
            ))
        } else if map.windows(2).any(|w| w[0] > w[1]) {
            Err(format!(
                "bonding {} -> {} is not monotone",
                chain_of(*big),
                chain_of(*small)
            ))
        } else {
            Ok(())
        });
    }
    let functorial: Vec<Outcome> = masks
        .par_iter()
        .map(|&top| {
            for mid in submasks(top) {
                for bottom in submasks(mid) {
                    let (upper, lower, direct) = (
                        &maps[&(top, mid)],
                        &maps[&(mid, bottom)],
                        &maps[&(top, bottom)],
                    );
                    if upper.iter().map(|&c| lower[c]).ne(direct.iter().copied()) {
                        return Err(format!(
                            "bonding not functorial over {} ⊆ {} ⊆ {}",
                            chain_of(bottom),
                            chain_of(mid),
                            chain_of(top)
                        ));
                    }
                }
            }
            Ok(())
        })
        .collect();
    out.extend(functorial);
    for _ in 0..200 {
        let k = rng.gen_range(1..=6);
        let chains: Vec<Chain> = (0..k).map(|_| random_chain(&mut rng, &grid, 4)).collect();
        let tower = build_tower(&chains);
        out.push(if tower.validate().holds() {
            Ok(())
        } else {
            Err(format!(
                "tower over {} fails validation",
                chains.iter().join(" ")
            ))
        });
    }

    // Farness fixtures.
    for (a, b) in [("{0}", "{1}"), ("(0,1)", "{1}"), ("(0,1)", "(1,2)")] {
        let (sa, sb) = (
            RatSet::parse(a).expect("fixture"),
            RatSet::parse(b).expect("fixture"),
        );
        out.push(match decide_far(&sa, &sb) {
            FarVerdict::Far(f) if !saturate(&f, &sa).meets(&saturate(&f, &sb)) => Ok(()),
            v => Err(format!("decide_far({a}, {b}) = {v:?}")),
        });
    }

    // Near on intersecting pairs, soundness of far witnesses, endpoint completeness.
    for _ in 0..1000 {
        let (a, b) = (
            random_ratset(&mut rng, &grid),
            random_ratset(&mut rng, &grid),
        );
        out.push(far_outcome(&mut rng, &a, &b));
    }

    // Saturation monotonicity.
    for _ in 0..1000 {
        let f = random_chain(&mut rng, &grid, 4);
        let extra = random_chain(&mut rng, &grid, 4);
        let bigger = f.union(&extra);
        let a = random_ratset(&mut rng, &grid);
        out.push(if saturate(&bigger, &a).is_subset_of(&saturate(&f, &a)) {
            Ok(())
        } else {
            Err(format!("saturate({bigger}, {a}) ⊄ saturate({f}, {a})"))
        });
    }
    out
}

fn submasks(mask: u32) -> impl Iterator<Item = u32> {
    let mut next = Some(mask);
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == 0 {
            None
        } else {
            Some((cur - 1) & mask)
        };
        Some(cur)
    })
}

fn far_outcome(rng: &mut ChaCha8Rng, a: &RatSet, b: &RatSet) -> Outcome {
    let v = decide_far(a, b);
    if a.meets(b) {
        return if v.is_far() {
            Err(format!("{a} and {b} intersect but were declared far"))
        } else {
            Ok(())
        };
    }
    match v {
        FarVerdict::Far(f) => {
            if saturate(&f, a).meets(&saturate(&f, b)) {
                Err(format!("witness {f} does not separate {a} and {b}"))
            } else {
                Ok(())
            }
        }
        FarVerdict::Near => {
            // No chain on a refinement of the endpoint grid separates.
            let e = a.endpoints().union(&b.endpoints());
            let refined = refinement(&e);
            if separates(&refined, a, b) {
                return Err(format!(
                    "{refined} separates {a} and {b} though the endpoints do not"
                ));
            }
            for _ in 0..8 {
                let sub = Chain::from_points(
                    refined
                        .points()
                        .iter()
                        .filter(|_| rng.gen_bool(0.5))
                        .cloned(),
                );
                if separates(&sub, a, b) {
                    return Err(format!(
                        "{sub} separates {a} and {b} though the endpoints do not"
                    ));
                }
            }
            Ok(())
        }
    }
}

/// Multiples of `1/(4·D)` spanning the endpoints with one unit of margin,
/// where `D` is the largest endpoint denominator.
fn refinement(e: &Chain) -> Chain {
    let pts = e.points();
    if pts.is_empty() {
        return Chain::from_points((-4..=4).map(|k| rat(k, 4)));
    }
    let den = pts
        .iter()
        .map(|q| q.denom().clone())
        .max()
        .expect("nonempty");
    let step = Rat::new(1.into(), den * 4);
    let lo = pts[0].clone() - rat(1, 1);
    let hi = pts[pts.len() - 1].clone() + rat(1, 1);
    let mut grid = Vec::new();
    let mut q = (lo.clone() / step.clone()).floor() * step.clone();
    while q <= hi {
        grid.push(q.clone());
        q += step.clone();
    }
    Chain::from_points(grid.into_iter().chain(pts.iter().cloned()))
}

fn ordcomp(opts: &SuiteOptions) -> Vec<Outcome> {
    let mut rng = rng(opts, 7);
    let grid = half_grid();
    let mut ends: Vec<Endpoint> = vec![Endpoint::NegInf];
    ends.extend(grid.iter().cloned().map(Endpoint::Finite));
    ends.push(Endpoint::PosInf);
    (0..500)
        .map(|_| {
            let i = rng.gen_range(0..ends.len() - 1);
            let j = rng.gen_range(i + 1..ends.len());
            let mut atoms = vec![Atom::Open(ends[i].clone(), ends[j].clone())];
            for e in [&ends[i], &ends[j]] {
                if let (Some(q), true) = (e.finite(), rng.gen_bool(0.5)) {
                    atoms.push(Atom::Point(q.clone()));
                }
            }
            let o = RatSet::from_atoms(atoms);
            let a = random_ratset(&mut rng, &grid).intersection(&o);
            match check_ordcomp_claim(&a, &o) {
                Ok(ClaimVerdict::Witness(f)) if saturate(&f, &a).is_subset_of(&o) => Ok(()),
                Ok(ClaimVerdict::Witness(f)) => {
                    Err(format!("witness {f} for A={a}, O={o} does not fit"))
                }
                Ok(ClaimVerdict::Alarm) => Err(format!("ALARM: no witness for A={a}, O={o}")),
                Err(e) => Err(format!("A={a}, O={o}: {e}")),
            }
        })
        .collect()
}

// ----- criteria 8 and 10 -----

/// Every metric on `0..n` with values in `{1, 2}`.
pub fn small_metrics(n: usize) -> Vec<FiniteMetric> {
    let c = Carrier::range(n).expect("small");
    let pairs: Vec<(usize, usize)> = (0..n).tuple_combinations().collect();
    (0u64..1 << pairs.len())
        .map(|mask| {
            let value = |x: usize, y: usize| {
                if x == y {
                    return rat(0, 1);
                }
                let i = pairs
                    .iter()
                    .position(|&p| p == (x.min(y), x.max(y)))
                    .expect("pair");
                rat(1 + (mask >> i & 1) as i64, 1)
            };
            FiniteMetric::from_pseudometric(
                Pseudometric::from_fn(&c, value).expect("values in {1,2}"),
            )
            .expect("positive off the diagonal")
        })
        .collect()
}

fn metric(opts: &SuiteOptions) -> Vec<Outcome> {
    let all = germs(&["Z2", "Z4", "S3"], opts.max_n.min(4), opts.max_group);
    let metrics: HashMap<usize, Vec<FiniteMetric>> = (1..=opts.max_n.min(4))
        .map(|n| (n, small_metrics(n)))
        .collect();
    let per_germ: Vec<Vec<Outcome>> = all
        .par_iter()
        .map(|g| {
            metrics[&g.germ.carrier().len()]
                .iter()
                .filter(|m| {
                    g.germ
                        .classify(&metric_uniformity(m))
                        .passes(Property::PiUniform)
                })
                .map(|m| {
                    let label = format!(
                        "{} metric [{}] {}",
                        g.label,
                        m.pseudometric().to_string().trim().replace('\n', "; "),
                        if is_isometric(m, &g.germ) {
                            "isometric"
                        } else {
                            "non-isometric"
                        }
                    );
                    let p = metric_g_proximity(m, &g.germ).map_err(|e| format!("{label}: {e}"))?;
                    let q = metric_ug_proximity(m, &g.germ).map_err(|e| format!("{label}: {e}"))?;
                    match p.first_difference(&q).expect("same carrier") {
                        None => Ok(()),
                        Some(d) => Err(format!(
                            "{label}: formula and U(d)^G differ at {}",
                            pair(g.germ.carrier(), d)
                        )),
                    }
                })
                .collect()
        })
        .collect();
    per_germ.into_iter().flatten().collect()
}

fn sigma(opts: &SuiteOptions) -> Vec<Outcome> {
    let all = germs(&["Z2", "Z3", "S3"], opts.max_n.min(4), opts.max_group);
    let metrics: HashMap<usize, Vec<FiniteMetric>> = (1..=opts.max_n.min(4))
        .map(|n| (n, small_metrics(n)))
        .collect();
    let per_germ: Vec<Vec<Outcome>> = all
        .par_iter()
        .map(|g| {
            let germ = &g.germ;
            let group = germ.group();
            let e = GroupSet::singleton(group.identity());
            let mut ms: Vec<Vec<GroupSet>> =
                vec![vec![e], vec![group.all()], germ.levels().to_vec()];
            for x in 0..group.order() {
                ms.push(vec![GroupSet::singleton(x)]);
                ms.push(vec![e.with(x)]);
            }
            let mut out = Vec::new();
            for m in &metrics[&germ.carrier().len()] {
                let d = m.pseudometric().clone();
                let blocks =
                    Pseudometric::from_fn(germ.carrier(), |x, y| rat((x / 2 != y / 2) as i64, 1))
                        .expect("block pseudometric");
                for members in [vec![d.clone()], vec![d.clone(), blocks]] {
                    let fam = PseudometricFamily::new(members, rat(2, 1)).expect("bounded by 2");
                    if !germ.check_action_continuity(&fam.uniformity()).holds() {
                        continue;
                    }
                    for mset in &ms {
                        let label = format!(
                            "{} sigma of {} M={}",
                            g.label,
                            fam.members().len(),
                            mset.iter().map(|s| group.format_set(*s)).join(",")
                        );
                        out.push(
                            sigma_outcome(&fam, germ, mset).map_err(|e| format!("{label}: {e}")),
                        );
                    }
                }
            }
            out
        })
        .collect();
    per_germ.into_iter().flatten().collect()
}

fn sigma_outcome(fam: &PseudometricFamily, germ: &GActionGerm, m: &[GroupSet]) -> Outcome {
    for set in m {
        for i in 0..fam.members().len() {
            sup_pseudometric(fam, germ, *set, i).map_err(|e| e.to_string())?;
        }
    }
    let report = xi_uniformity(fam, germ, m).map_err(|e| e.to_string())?;
    if report.holds() {
        Ok(())
    } else {
        Err(format!(
            "conclusions: topology {}, quasibounded {}, refines {}",
            report.same_topology, report.quasibounded, report.refines_family
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_counts_are_bell_numbers() {
        let bell = [1, 2, 5, 15, 52];
        for n in 1..=5 {
            assert_eq!(equivalences(&Carrier::range(n).unwrap()).len(), bell[n - 1]);
        }
    }

    #[test]
    fn pool_bases_are_valid() {
        let c = Carrier::range(3).unwrap();
        let pool = basis_pool(&c);
        assert!(pool.iter().all(UnifBase::is_valid));
        assert!(pool.len() > 5);
    }

    #[test]
    fn submask_enumeration() {
        assert_eq!(
            submasks(0b101).collect::<Vec<_>>(),
            vec![0b101, 0b100, 0b001, 0]
        );
    }

    #[test]
    fn refinement_spans_the_endpoints() {
        let e = Chain::parse("{0,1/2}").unwrap();
        let r = refinement(&e);
        assert!(e.is_subset_of(&r));
        assert_eq!(r.points()[1].clone() - r.points()[0].clone(), rat(1, 8));
    }
}
