//! Randomized checks of the algebraic laws each module promises.

use std::sync::Arc;

use gprox::equivariant::{
    beta_g_proximity, check_g_proximity, compute_ug, nu_proximity, nu_proximity_deepest,
};
use gprox::gaction::{
    canonical_actions, FiniteGroup, GActionGerm, GroupSet, NeighborhoodBase, Property,
};
use gprox::metricprox::{
    is_isometric, metric_g_proximity, metric_uniformity, sup_pseudometric, xi_uniformity,
    FiniteMetric, Pseudometric, PseudometricFamily,
};
use gprox::proximity::{check_axioms, from_uniformity, ProxAxiom};
use gprox::rationals::{
    decide_far, orbit_space, rat, saturate, Atom, Chain, Endpoint, FarVerdict, RatSet,
};
use gprox::setrel::{Carrier, CarrierRef, Rel, Subset};
use gprox::uniformity::UnifBase;
use proptest::prelude::*;

fn rel_on(c: &CarrierRef, rows: &[u32]) -> Rel {
    let mask = c.full().0;
    Rel::from_rows(c, rows.iter().map(|r| Subset(r & mask)).collect()).unwrap()
}

fn equivalence(c: &CarrierRef, labels: &[usize]) -> Rel {
    Rel::from_fn(c, |x, y| labels[x] == labels[y])
}

/// A valid basis: an equivalence, optionally under a reflexive superset.
fn valid_basis(c: &CarrierRef, labels: &[usize], extra: Option<&[u32]>) -> UnifBase {
    let e = equivalence(c, labels);
    let basis = match extra {
        None => vec![e],
        Some(rows) => vec![e.union(&rel_on(c, rows)), e],
    };
    let u = UnifBase::new(c, basis).unwrap();
    assert!(u.is_valid());
    u
}

fn germs(n: usize) -> Vec<GActionGerm> {
    let groups = [
        FiniteGroup::cyclic(2).0,
        FiniteGroup::cyclic(3).0,
        FiniteGroup::symmetric(3).0,
    ];
    let c = Carrier::range(n).unwrap();
    let mut out = Vec::new();
    for g in groups {
        let g = Arc::new(g);
        let chains = NeighborhoodBase::enumerate(&g, &g.subgroups(), 2);
        for act in canonical_actions(&g, n) {
            for base in &chains {
                out.push(
                    GActionGerm::new(g.clone(), base.clone(), c.clone(), act.clone()).unwrap(),
                );
            }
        }
    }
    out
}

prop_compose! {
    fn carrier_and_rows(max_n: usize, count: usize)(n in 1..=max_n)
        (rows in prop::collection::vec(prop::collection::vec(any::<u32>(), n), count), n in Just(n))
        -> (CarrierRef, Vec<Vec<u32>>) {
        (Carrier::range(n).unwrap(), rows)
    }
}

prop_compose! {
    /// A germ on at most 4 points with a valid basis.
    fn germ_and_basis()(n in 1..=4usize)
        (pick in any::<prop::sample::Index>(), labels in prop::collection::vec(0..n, n),
         extra in prop::option::of(prop::collection::vec(any::<u32>(), n)), n in Just(n))
        -> (GActionGerm, UnifBase) {
        let all = germs(n);
        let germ = all[pick.index(all.len())].clone();
        let u = valid_basis(germ.carrier(), &labels, extra.as_deref());
        (germ, u)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn compose_is_associative((c, rows) in carrier_and_rows(4, 3)) {
        let [r, s, t] = [&rows[0], &rows[1], &rows[2]].map(|x| rel_on(&c, x));
        prop_assert_eq!(r.compose(&s).unwrap().compose(&t).unwrap(), r.compose(&s.compose(&t).unwrap()).unwrap());
    }

    #[test]
    fn invert_is_an_anti_involution((c, rows) in carrier_and_rows(4, 2)) {
        let (r, s) = (rel_on(&c, &rows[0]), rel_on(&c, &rows[1]));
        prop_assert_eq!(r.invert().invert(), r.clone());
        prop_assert_eq!(r.compose(&s).unwrap().invert(), s.invert().compose(&r.invert()).unwrap());
    }

    #[test]
    fn image_distributes_over_union((c, rows) in carrier_and_rows(5, 1), a in any::<u32>(), b in any::<u32>()) {
        let r = rel_on(&c, &rows[0]);
        let (a, b) = (Subset(a & c.full().0), Subset(b & c.full().0));
        prop_assert_eq!(r.image_of_set(a.union(b)), r.image_of_set(a).union(r.image_of_set(b)));
    }

    #[test]
    fn valid_bases_give_proximities(n in 1..=5usize, seed in any::<u64>(), with_extra in any::<bool>()) {
        let c = Carrier::range(n).unwrap();
        let labels: Vec<usize> = (0..n).map(|i| (seed >> (3 * i)) as usize % n).collect();
        let rows: Vec<u32> = (0..n).map(|i| (seed >> (7 * i + 1)) as u32).collect();
        let u = valid_basis(&c, &labels, with_extra.then_some(&rows[..]));
        let report = check_axioms(&from_uniformity(&u).unwrap()).unwrap();
        prop_assert!(report.all_of(&ProxAxiom::PROXIMITY));
        prop_assert_eq!(report.passes(ProxAxiom::P6), u.core() == Rel::diagonal(&c));
        prop_assert_eq!(report.passes(ProxAxiom::P6), u.is_hausdorff());
    }

    #[test]
    fn closure_is_monotone((_g, u) in germ_and_basis(), a in any::<u32>(), b in any::<u32>()) {
        let p = from_uniformity(&u).unwrap();
        let full = u.carrier().full().0;
        let (a, b) = (Subset(a & full), Subset(a & b & full));
        prop_assert!(p.closure(b).is_subset_of(p.closure(a)));
    }

    #[test]
    fn domination_is_a_partial_order(n in 1..=4usize, l in prop::collection::vec(prop::collection::vec(0..4usize, 4), 3)) {
        let c = Carrier::range(n).unwrap();
        let ps: Vec<_> = l.iter().map(|labels| {
            let labels: Vec<usize> = labels[..n].to_vec();
            from_uniformity(&UnifBase::new(&c, vec![equivalence(&c, &labels)]).unwrap()).unwrap()
        }).collect();
        for p in &ps {
            prop_assert!(p.dominates(p).unwrap());
        }
        for p in &ps {
            for q in &ps {
                if p.dominates(q).unwrap() && q.dominates(p).unwrap() {
                    prop_assert_eq!(p, q);
                }
                for r in &ps {
                    if p.dominates(q).unwrap() && q.dominates(r).unwrap() {
                        prop_assert!(p.dominates(r).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn equivalent_bases_agree((_g, u) in germ_and_basis()) {
        let core_only = UnifBase::new(u.carrier(), vec![u.core()]).unwrap();
        prop_assert!(core_only.equivalent(&u).unwrap());
        prop_assert_eq!(from_uniformity(&core_only).unwrap(), from_uniformity(&u).unwrap());
        prop_assert_eq!(core_only.induced_topology(), u.induced_topology());
    }

    #[test]
    fn constructions_return_valid_bases((g, u) in germ_and_basis()) {
        let sat = g.saturate_uniformity(&u).unwrap();
        prop_assert!(sat.is_valid());
        prop_assert!(g.classify(&sat).passes(Property::Saturated));
        prop_assert!(sat.refines(&u).unwrap());
        if g.classify(&u).passes(Property::Quasibounded) {
            prop_assert!(compute_ug(&g, &u).unwrap().is_valid());
        }
    }

    #[test]
    fn equiuniform_implies_pi_uniform((g, u) in germ_and_basis()) {
        let report = g.classify(&u);
        if report.passes(Property::Equiuniform) {
            prop_assert!(report.passes(Property::PiUniform));
            // An equiuniform uniformity already gives a G-proximity.
            let p = from_uniformity(&u).unwrap();
            let gp = check_g_proximity(&g, &p);
            prop_assert!(gp.invariance.is_none() && gp.compatibility.is_none());
        }
    }

    #[test]
    fn translation_laws((g, _u) in germ_and_basis(), v in any::<u64>(), w in any::<u64>(), a in any::<u32>(), b in any::<u32>()) {
        let group = g.group();
        let all = group.all().0;
        let (v, w) = (GroupSet(v & all), GroupSet(w & all));
        let full = g.carrier().full().0;
        let (a, b) = (Subset(a & full), Subset(a & b & full));
        prop_assert!(g.translate_set(v, b).is_subset_of(g.translate_set(v, a)));
        prop_assert!(g.translate_set(GroupSet(v.0 & w.0), a).is_subset_of(g.translate_set(v, a)));
        prop_assert_eq!(g.translate_set(group.product_set(v, w), a), g.translate_set(v, g.translate_set(w, a)));
    }

    #[test]
    fn pi_uniform_continuous_inputs_are_reproduced((g, u) in germ_and_basis()) {
        let report = g.classify(&u);
        if report.passes(Property::PiUniform) && g.check_action_continuity(&u).holds() {
            prop_assert!(compute_ug(&g, &u).unwrap().equivalent(&u).unwrap());
        }
    }

    #[test]
    fn beta_g_is_nu_of_the_discrete_uniformity((g, _u) in germ_and_basis()) {
        let discrete = UnifBase::discrete(g.carrier());
        prop_assert_eq!(beta_g_proximity(&g).unwrap(), nu_proximity(&g, &discrete).unwrap());
    }

    #[test]
    fn deepest_level_decides_for_saturated_uniformities((g, u) in germ_and_basis()) {
        if g.classify(&u).passes(Property::Saturated) {
            prop_assert_eq!(nu_proximity(&g, &u).unwrap(), nu_proximity_deepest(&g, &u).unwrap());
        }
    }

    #[test]
    fn dense_subgroups_keep_beta_g((g, _u) in germ_and_basis()) {
        // Continuity for the discrete uniformity makes the deepest level act
        // trivially, which is the finite reading of a continuous action.
        prop_assume!(g.check_action_continuity(&UnifBase::discrete(g.carrier())).holds());
        let group = g.group();
        let deepest = g.base().deepest();
        let beta = beta_g_proximity(&g).unwrap();
        for h in group.subgroups() {
            if group.product_set(h, deepest) == group.all() {
                let sub = g.restrict_to_subgroup(h).unwrap();
                prop_assert_eq!(&beta_g_proximity(&sub).unwrap(), &beta);
            }
        }
    }
}

// ----- metrics -----

fn metric_from(n: usize, bits: u64) -> FiniteMetric {
    let c = Carrier::range(n).unwrap();
    let m = Pseudometric::from_fn(&c, |x, y| {
        if x == y {
            return rat(0, 1);
        }
        let (i, j) = (x.min(y), x.max(y));
        rat(1 + (bits >> (i * n + j) & 1) as i64, 1)
    })
    .unwrap();
    FiniteMetric::from_pseudometric(m).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn sup_pseudometrics_are_valid_and_monotone(n in 1..=4usize, bits in any::<u64>(), pick in any::<prop::sample::Index>(), a in any::<u64>(), b in any::<u64>()) {
        let m = metric_from(n, bits);
        let all = germs(n);
        let g = &all[pick.index(all.len())];
        let fam = PseudometricFamily::new(vec![m.pseudometric().clone()], rat(2, 1)).unwrap();
        let full = g.group().all().0;
        let big = GroupSet((a & full) | 1 << g.group().identity());
        let small = GroupSet(big.0 & b | 1 << g.group().identity());
        let d_big = sup_pseudometric(&fam, g, big, 0).unwrap();
        let d_small = sup_pseudometric(&fam, g, small, 0).unwrap();
        for x in 0..n {
            for y in 0..n {
                prop_assert!(d_small.get(x, y) <= d_big.get(x, y));
            }
        }
        if g.check_action_continuity(&fam.uniformity()).holds() {
            prop_assert!(xi_uniformity(&fam, g, &[big]).unwrap().xi.is_valid());
        }
    }

    #[test]
    fn isometric_actions_are_uniformly_equicontinuous(n in 1..=4usize, bits in any::<u64>(), pick in any::<prop::sample::Index>()) {
        let m = metric_from(n, bits);
        let all = germs(n);
        let g = &all[pick.index(all.len())];
        if is_isometric(&m, g) {
            prop_assert!(g.classify(&metric_uniformity(&m)).passes(Property::UniformlyEquicontinuous));
            prop_assert!(metric_g_proximity(&m, g).is_ok());
        }
    }
}

// ----- rationals -----

fn grid() -> Vec<gprox::rationals::Rat> {
    (-6..=6).map(|k| rat(k, 3)).collect()
}

fn ratset_from(picks: &[(bool, usize, usize)]) -> RatSet {
    let g = grid();
    let ends: Vec<Endpoint> = std::iter::once(Endpoint::NegInf)
        .chain(g.iter().cloned().map(Endpoint::Finite))
        .chain(std::iter::once(Endpoint::PosInf))
        .collect();
    RatSet::from_atoms(
        picks
            .iter()
            .map(|&(point, i, j)| {
                if point {
                    Atom::Point(g[i % g.len()].clone())
                } else {
                    let (i, j) = (i % ends.len(), j % ends.len());
                    let (lo, hi) = (i.min(j), i.max(j).max(i.min(j) + 1).min(ends.len() - 1));
                    if lo == hi {
                        Atom::Point(g[0].clone())
                    } else {
                        Atom::Open(ends[lo].clone(), ends[hi].clone())
                    }
                }
            })
            .collect(),
    )
}

fn chain_from(mask: u16) -> Chain {
    Chain::from_points(
        grid()
            .into_iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, q)| q),
    )
}

fn atoms() -> impl Strategy<Value = Vec<(bool, usize, usize)>> {
    prop::collection::vec((any::<bool>(), 0..20usize, 0..20usize), 0..4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn cell_count_law(mask in any::<u16>()) {
        let f = chain_from(mask);
        prop_assert_eq!(orbit_space(&f).len(), 2 * f.len() + 1);
    }

    #[test]
    fn set_algebra_laws(a in atoms(), b in atoms(), probe in -20i64..=20) {
        let (a, b) = (ratset_from(&a), ratset_from(&b));
        let q = rat(probe, 6);
        prop_assert_eq!(a.union(&b).contains(&q), a.contains(&q) || b.contains(&q));
        prop_assert_eq!(a.intersection(&b).contains(&q), a.contains(&q) && b.contains(&q));
        prop_assert_eq!(a.complement().contains(&q), !a.contains(&q));
        prop_assert_eq!(a.union(&b).complement(), a.complement().intersection(&b.complement()));
        prop_assert_eq!(a.complement().complement(), a.clone());
        prop_assert_eq!(RatSet::parse(&a.to_string()).unwrap(), a);
    }

    #[test]
    fn saturation_shrinks_as_chains_grow(m1 in any::<u16>(), m2 in any::<u16>(), a in atoms()) {
        let a = ratset_from(&a);
        let (f, bigger) = (chain_from(m1), chain_from(m1 | m2));
        prop_assert!(saturate(&bigger, &a).is_subset_of(&saturate(&f, &a)));
        prop_assert!(a.is_subset_of(&saturate(&f, &a)));
    }

    #[test]
    fn far_verdicts_are_sound(a in atoms(), b in atoms()) {
        let (a, b) = (ratset_from(&a), ratset_from(&b));
        match decide_far(&a, &b) {
            FarVerdict::Far(f) => {
                prop_assert!(!a.meets(&b));
                prop_assert!(!saturate(&f, &a).meets(&saturate(&f, &b)));
            }
            FarVerdict::Near => {}
        }
        if a.meets(&b) {
            prop_assert_eq!(decide_far(&a, &b), FarVerdict::Near);
        }
    }
}
