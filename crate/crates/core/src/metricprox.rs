//! Finite (pseudo)metric G-spaces with exact rational distances.

use std::collections::BTreeSet;
use std::fmt;

use itertools::Itertools;
use num_traits::Zero;

use crate::equivariant::compute_ug;
use crate::error::{Error, Result};
use crate::gaction::{GActionGerm, GroupSet, Property};
use crate::proximity::{from_uniformity, Prox};
use crate::rationals::Rat;
use crate::setrel::{same_carrier, CarrierRef, Rel, Subset};
use crate::uniformity::UnifBase;

/// Symmetric, nonnegative, zero on the diagonal, triangle inequality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pseudometric {
    carrier: CarrierRef,
    dist: Vec<Rat>,
}

impl Pseudometric {
    pub fn new(carrier: &CarrierRef, rows: Vec<Vec<Rat>>) -> Result<Pseudometric> {
        let n = carrier.len();
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::invalid(
                "metric",
                format!("the matrix must be {n} × {n}"),
            ));
        }
        let p = Pseudometric {
            carrier: carrier.clone(),
            dist: rows.into_iter().flatten().collect(),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn from_fn(carrier: &CarrierRef, f: impl Fn(usize, usize) -> Rat) -> Result<Pseudometric> {
        let n = carrier.len();
        Pseudometric::new(
            carrier,
            (0..n).map(|x| (0..n).map(|y| f(x, y)).collect()).collect(),
        )
    }

    fn validate(&self) -> Result<()> {
        let n = self.carrier.len();
        let name = |x: usize| self.carrier.name(x);
        for (x, y) in (0..n).cartesian_product(0..n) {
            let d = self.get(x, y);
            if *d < Rat::zero() {
                return Err(Error::invalid(
                    "metric",
                    format!("d({},{}) is negative", name(x), name(y)),
                ));
            }
            if x == y && !d.is_zero() {
                return Err(Error::invalid(
                    "metric",
                    format!("d({0},{0}) is not 0", name(x)),
                ));
            }
            if d != self.get(y, x) {
                return Err(Error::invalid(
                    "metric",
                    format!("d({a},{b}) ≠ d({b},{a})", a = name(x), b = name(y)),
                ));
            }
        }
        for ((x, y), z) in (0..n).cartesian_product(0..n).cartesian_product(0..n) {
            if self.get(x, z) > &(self.get(x, y) + self.get(y, z)) {
                return Err(Error::invalid(
                    "metric",
                    format!(
                        "triangle inequality fails: d({x},{z}) > d({x},{y}) + d({y},{z})",
                        x = name(x),
                        y = name(y),
                        z = name(z)
                    ),
                ));
            }
        }
        Ok(())
    }

    pub fn carrier(&self) -> &CarrierRef {
        &self.carrier
    }

    pub fn get(&self, x: usize, y: usize) -> &Rat {
        &self.dist[x * self.carrier.len() + y]
    }

    /// Whether distinct points have positive distance.
    pub fn is_metric(&self) -> bool {
        let n = self.carrier.len();
        (0..n)
            .cartesian_product(0..n)
            .all(|(x, y)| x == y || !self.get(x, y).is_zero())
    }

    /// Distinct values, ascending; always includes 0.
    pub fn values(&self) -> Vec<Rat> {
        self.dist
            .iter()
            .cloned()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    }

    pub fn max_value(&self) -> Rat {
        self.values().pop().expect("nonempty carrier")
    }

    /// `{(x, y) : d(x, y) ≤ r}`.
    pub fn within(&self, r: &Rat) -> Rel {
        Rel::from_fn(&self.carrier, |x, y| self.get(x, y) <= r)
    }

    /// `inf {d(a, b) : a ∈ A, b ∈ B}`; `None` when either set is empty.
    pub fn set_distance(&self, a: Subset, b: Subset) -> Option<Rat> {
        a.iter()
            .cartesian_product(b.iter().collect::<Vec<_>>())
            .map(|(x, y)| self.get(x, y).clone())
            .min()
    }

    pub fn is_isometry(&self, perm: &[usize]) -> bool {
        let n = self.carrier.len();
        (0..n)
            .cartesian_product(0..n)
            .all(|(x, y)| self.get(perm[x], perm[y]) == self.get(x, y))
    }

    /// Threshold basis `{d ≤ v}` over every distinct value `v`, including 0.
    pub fn uniformity(&self) -> UnifBase {
        let basis = self.values().iter().map(|v| self.within(v)).collect();
        UnifBase::new(&self.carrier, basis).expect("nonempty basis on the carrier")
    }
}

impl fmt::Display for Pseudometric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.carrier.len();
        for x in 0..n {
            writeln!(f, "{}", (0..n).map(|y| self.get(x, y)).join(" "))?;
        }
        Ok(())
    }
}

/// A pseudometric separating points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteMetric(Pseudometric);

impl FiniteMetric {
    pub fn new(carrier: &CarrierRef, rows: Vec<Vec<Rat>>) -> Result<FiniteMetric> {
        FiniteMetric::from_pseudometric(Pseudometric::new(carrier, rows)?)
    }

    pub fn from_pseudometric(p: Pseudometric) -> Result<FiniteMetric> {
        if !p.is_metric() {
            return Err(Error::invalid(
                "metric",
                "two distinct points are at distance 0",
            ));
        }
        Ok(FiniteMetric(p))
    }

    pub fn pseudometric(&self) -> &Pseudometric {
        &self.0
    }

    pub fn carrier(&self) -> &CarrierRef {
        self.0.carrier()
    }

    pub fn get(&self, x: usize, y: usize) -> &Rat {
        self.0.get(x, y)
    }
}

/// `𝒰(d)` with basis `{d ≤ v}` for each distinct distance `v`; the `v = 0`
/// level is `Δ_X`.
pub fn metric_uniformity(m: &FiniteMetric) -> UnifBase {
    m.0.uniformity()
}

#[derive(Debug, Clone)]
pub struct PseudometricFamily {
    members: Vec<Pseudometric>,
    bound: Rat,
}

impl PseudometricFamily {
    pub fn new(members: Vec<Pseudometric>, bound: Rat) -> Result<PseudometricFamily> {
        let first = members
            .first()
            .ok_or_else(|| Error::invalid("pseudometric family", "no members"))?;
        if members
            .iter()
            .any(|d| !same_carrier(d.carrier(), first.carrier()))
        {
            return Err(Error::CarrierMismatch(
                "pseudometrics on different carriers".into(),
            ));
        }
        if let Some(i) = members.iter().position(|d| d.max_value() > bound) {
            return Err(Error::invalid(
                "pseudometric family",
                format!("member {i} exceeds the bound {bound}"),
            ));
        }
        Ok(PseudometricFamily { members, bound })
    }

    pub fn members(&self) -> &[Pseudometric] {
        &self.members
    }

    pub fn bound(&self) -> &Rat {
        &self.bound
    }

    pub fn carrier(&self) -> &CarrierRef {
        self.members[0].carrier()
    }

    /// The uniformity generated by the family.
    pub fn uniformity(&self) -> UnifBase {
        family_uniformity(self.carrier(), &self.members)
    }
}

/// Basis: the common zero level `⋂ {dᵢ = 0}` followed by every threshold
/// `{dᵢ ≤ v}`. The zero level lies inside every threshold, which keeps the
/// list a filter base.
fn family_uniformity(carrier: &CarrierRef, members: &[Pseudometric]) -> UnifBase {
    let zero = members
        .iter()
        .map(|d| d.within(&Rat::zero()))
        .reduce(|a, b| a.intersection(&b))
        .expect("nonempty family");
    let mut basis = vec![zero];
    for d in members {
        for v in d.values() {
            let r = d.within(&v);
            if !basis.contains(&r) {
                basis.push(r);
            }
        }
    }
    UnifBase::new(carrier, basis).expect("nonempty basis")
}

/// `d_{A,i}(x, y) = max_{g ∈ A} dᵢ(gx, gy)`.
pub fn sup_pseudometric(
    fam: &PseudometricFamily,
    a: &GActionGerm,
    set: GroupSet,
    i: usize,
) -> Result<Pseudometric> {
    if set.is_empty() {
        return Err(Error::precondition(
            "sup_pseudometric",
            "the group subset is empty",
        ));
    }
    let d = fam
        .members
        .get(i)
        .ok_or_else(|| Error::precondition("sup_pseudometric", format!("no member {i}")))?;
    Pseudometric::from_fn(d.carrier(), |x, y| {
        set.iter()
            .map(|g| d.get(a.apply(g, x), a.apply(g, y)).clone())
            .max()
            .expect("nonempty subset")
    })
    .map_err(|e| Error::Internal {
        op: "sup_pseudometric",
        detail: e.to_string(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Conclusion {
    Holds,
    Fails,
    NotApplicable,
}

impl Conclusion {
    fn decide(hypothesis: bool, conclusion: bool) -> Conclusion {
        match (hypothesis, conclusion) {
            (false, _) => Conclusion::NotApplicable,
            (true, true) => Conclusion::Holds,
            (true, false) => Conclusion::Fails,
        }
    }

    pub fn acceptable(self) -> bool {
        self != Conclusion::Fails
    }
}

impl fmt::Display for Conclusion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Conclusion::Holds => "holds",
            Conclusion::Fails => "fails",
            Conclusion::NotApplicable => "not applicable",
        })
    }
}

#[derive(Debug, Clone)]
pub struct XiReport {
    pub xi: UnifBase,
    /// Same topology as the family when every member of `M` acts
    /// equicontinuously.
    pub same_topology: Conclusion,
    /// Quasibounded when every `A ∈ M` has a level `V` and `B ∈ M` with
    /// `A·V ⊆ B`.
    pub quasibounded: Conclusion,
    /// Finer than the family when some `A ∈ M` contains `e`.
    pub refines_family: Conclusion,
    /// The quasibounded verdict regardless of the hypothesis.
    pub xi_is_quasibounded: bool,
}

impl XiReport {
    pub fn holds(&self) -> bool {
        self.same_topology.acceptable()
            && self.quasibounded.acceptable()
            && self.refines_family.acceptable()
    }
}

/// The uniformity `ξ` of all `d_{A,i}` for `A ∈ M`, with the three
/// instance-level conclusions.
pub fn xi_uniformity(
    fam: &PseudometricFamily,
    a: &GActionGerm,
    m: &[GroupSet],
) -> Result<XiReport> {
    if m.is_empty() {
        return Err(Error::precondition("xi_uniformity", "M is empty"));
    }
    let sups = m
        .iter()
        .flat_map(|set| (0..fam.members.len()).map(move |i| (*set, i)))
        .map(|(set, i)| sup_pseudometric(fam, a, set, i))
        .collect::<Result<Vec<_>>>()?;
    let xi = family_uniformity(fam.carrier(), &sups);
    let base = fam.uniformity();
    let group = a.group();

    let equicontinuous = m
        .iter()
        .all(|set| a.equicontinuity_violation(&base, *set).is_none());
    let same_topology = Conclusion::decide(
        equicontinuous,
        xi.induced_topology() == base.induced_topology(),
    );

    let absorbs = m.iter().all(|set| {
        a.levels().iter().any(|v| {
            m.iter()
                .any(|b| group.product_set(*set, *v).is_subset_of(*b))
        })
    });
    let xi_is_quasibounded = a.classify(&xi).passes(Property::Quasibounded);
    let quasibounded = Conclusion::decide(absorbs, xi_is_quasibounded);

    let has_identity = m.iter().any(|set| set.contains(group.identity()));
    let refines_family = Conclusion::decide(has_identity, xi.refines(&base)?);

    Ok(XiReport {
        xi,
        same_topology,
        quasibounded,
        refines_family,
        xi_is_quasibounded,
    })
}

/// `A` far `B` iff some level `V` has `d(VA, VB) > 0`. Requires `𝒰(d)` to
/// be π-uniform.
pub fn metric_g_proximity(m: &FiniteMetric, a: &GActionGerm) -> Result<Prox> {
    let u = metric_uniformity(m);
    if let Some(w) = a.classify(&u).witness(Property::PiUniform) {
        return Err(Error::precondition(
            "metric_g_proximity",
            format!("metric uniformity is not pi_uniform: {}", w.describe(a)),
        ));
    }
    Prox::from_fn(m.carrier(), |x, y| {
        a.levels().iter().all(|v| {
            m.0.set_distance(a.translate_set(*v, x), a.translate_set(*v, y))
                .is_some_and(|d| d.is_zero())
        })
    })
}

/// The proximity of `𝒰(d)^G`, for comparison with [`metric_g_proximity`].
pub fn metric_ug_proximity(m: &FiniteMetric, a: &GActionGerm) -> Result<Prox> {
    from_uniformity(&compute_ug(a, &metric_uniformity(m))?)
}

pub fn is_isometric(m: &FiniteMetric, a: &GActionGerm) -> bool {
    a.permutations().iter().all(|p| m.0.is_isometry(p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaction::{FiniteGroup, NeighborhoodBase};
    use crate::rationals::rat;
    use crate::setrel::Carrier;
    use std::sync::Arc;

    fn int(n: i64) -> Rat {
        rat(n, 1)
    }

    fn cycle4() -> FiniteMetric {
        let c = Carrier::range(4).unwrap();
        let d = Pseudometric::from_fn(&c, |x, y| {
            let k = (x as i64 - y as i64).rem_euclid(4);
            int(k.min(4 - k))
        })
        .unwrap();
        FiniteMetric::from_pseudometric(d).unwrap()
    }

    fn z4(levels: fn(&FiniteGroup) -> NeighborhoodBase) -> GActionGerm {
        let (g, perms) = FiniteGroup::cyclic(4);
        let base = levels(&g);
        GActionGerm::new(Arc::new(g), base, Carrier::range(4).unwrap(), perms).unwrap()
    }

    fn path3() -> FiniteMetric {
        let c = Carrier::range(3).unwrap();
        let d = [[0, 1, 2], [1, 0, 1], [2, 1, 0]];
        FiniteMetric::new(
            &c,
            d.iter()
                .map(|r| r.iter().map(|&v| int(v)).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn validation() {
        let c = Carrier::range(3).unwrap();
        let bad = [[0, 1, 5], [1, 0, 1], [5, 1, 0]];
        let err = FiniteMetric::new(
            &c,
            bad.iter()
                .map(|r| r.iter().map(|&v| int(v)).collect())
                .collect(),
        )
        .unwrap_err();
        assert!(err.to_string().contains("triangle"), "{err}");
        let pseudo =
            Pseudometric::from_fn(&c, |x, y| int(((x / 2) as i64 - (y / 2) as i64).abs())).unwrap();
        assert!(!pseudo.is_metric());
        assert!(FiniteMetric::from_pseudometric(pseudo).is_err());
    }

    #[test]
    fn metric_uniformity_examples() {
        let c = Carrier::new(["a", "b"]).unwrap();
        let m = FiniteMetric::new(&c, vec![vec![int(0), int(1)], vec![int(1), int(0)]]).unwrap();
        let u = metric_uniformity(&m);
        assert_eq!(u.basis(), [Rel::diagonal(&c), Rel::full(&c)]);
        let u = metric_uniformity(&path3());
        assert_eq!(u.basis().len(), 3);
        assert!(u.validate_basis().all_pass());
        assert_eq!(u.basis()[0], Rel::diagonal(u.carrier()));
    }

    #[test]
    fn sup_examples() {
        let m = cycle4();
        let fam = PseudometricFamily::new(vec![m.pseudometric().clone()], int(2)).unwrap();
        let a = z4(NeighborhoodBase::discrete);
        assert_eq!(
            sup_pseudometric(&fam, &a, GroupSet(1), 0).unwrap(),
            *m.pseudometric()
        );
        assert_eq!(
            sup_pseudometric(&fam, &a, a.group().all(), 0).unwrap(),
            *m.pseudometric()
        );
        assert!(sup_pseudometric(&fam, &a, GroupSet::EMPTY, 0).is_err());

        let (s3, perms) = FiniteGroup::symmetric(3);
        let base = NeighborhoodBase::discrete(&s3);
        let all = s3.all();
        let a = GActionGerm::new(Arc::new(s3), base, Carrier::range(3).unwrap(), perms).unwrap();
        let fam = PseudometricFamily::new(vec![path3().pseudometric().clone()], int(2)).unwrap();
        let sup = sup_pseudometric(&fam, &a, all, 0).unwrap();
        assert_eq!(*sup.get(0, 1), int(2));
    }

    #[test]
    fn sup_is_monotone_and_valid_over_s3_subsets() {
        let (s3, perms) = FiniteGroup::symmetric(3);
        let base = NeighborhoodBase::discrete(&s3);
        let a = GActionGerm::new(Arc::new(s3), base, Carrier::range(3).unwrap(), perms).unwrap();
        let fam = PseudometricFamily::new(vec![path3().pseudometric().clone()], int(2)).unwrap();
        for small in 1u64..64 {
            for big in (small..64).filter(|b| b & small == small) {
                let ds = sup_pseudometric(&fam, &a, GroupSet(small), 0).unwrap();
                let db = sup_pseudometric(&fam, &a, GroupSet(big), 0).unwrap();
                assert!((0..3)
                    .cartesian_product(0..3)
                    .all(|(x, y)| ds.get(x, y) <= db.get(x, y)));
            }
        }
    }

    #[test]
    fn xi_examples() {
        let m = cycle4();
        let fam = PseudometricFamily::new(vec![m.pseudometric().clone()], int(2)).unwrap();
        let a = z4(NeighborhoodBase::indiscrete);
        let report = xi_uniformity(&fam, &a, &[GroupSet(1)]).unwrap();
        assert!(report.xi.equivalent(&fam.uniformity()).unwrap());
        assert!(report.holds());

        let report = xi_uniformity(&fam, &a, &[a.group().all()]).unwrap();
        assert!(report.xi.equivalent(&fam.uniformity()).unwrap());
        assert_eq!(report.quasibounded, Conclusion::Holds);

        // {e} · G is not inside {e}.
        let report = xi_uniformity(&fam, &a, &[GroupSet(1)]).unwrap();
        assert_eq!(report.quasibounded, Conclusion::NotApplicable);
        assert!(report.xi_is_quasibounded);
    }

    #[test]
    fn metric_g_proximity_examples() {
        let m = cycle4();
        let discrete = z4(NeighborhoodBase::discrete);
        let p = metric_g_proximity(&m, &discrete).unwrap();
        assert_eq!(
            p.first_difference(&Prox::overlap(m.carrier()).unwrap())
                .unwrap(),
            None
        );

        let indiscrete = z4(NeighborhoodBase::indiscrete);
        assert!(is_isometric(&m, &indiscrete));
        let p = metric_g_proximity(&m, &indiscrete).unwrap();
        assert!(p.near(Subset::singleton(0), Subset::singleton(2)));
        let q = metric_ug_proximity(&m, &indiscrete).unwrap();
        assert_eq!(p.first_difference(&q).unwrap(), None);
    }

    #[test]
    fn isometric_actions_are_uniformly_equicontinuous() {
        let m = cycle4();
        let a = z4(NeighborhoodBase::indiscrete);
        let report = a.classify(&metric_uniformity(&m));
        assert!(report.passes(Property::UniformlyEquicontinuous));
    }
}
