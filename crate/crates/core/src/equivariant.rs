//! Bracket entourages, the derived bounded uniformity `𝒰^G`, the
//! G-proximity `ν`, the maximal G-proximity `β_G`, equinormality and
//! massiveness, each with a direct checker.

use crate::error::{Error, Result};
use crate::gaction::{GActionGerm, GroupSet, Property};
use crate::proximity::{check_axioms, from_uniformity, Prox, ProxAxiom, ProxReport};
use crate::setrel::{Rel, Subset};
use crate::uniformity::{TotalBoundedness, UnifBase};

/// `[V, ε] = {(x, y) : ∃ v₁, v₂ ∈ V, (v₁x, v₂y) ∈ ε}`.
pub fn bracket_entourage(a: &GActionGerm, v: GroupSet, eps: &Rel) -> Rel {
    let inverse = a.group().inverse_set(v);
    let rows = (0..a.carrier().len()).map(|x| {
        let reach = v
            .iter()
            .fold(Subset::EMPTY, |acc, g| acc.union(eps.row(a.apply(g, x))));
        a.translate_set(inverse, reach)
    });
    Rel::from_rows(a.carrier(), rows.collect()).expect("rows match the carrier")
}

/// The bracket entourages `[Vᵢ, ε_j]` indexed by chain level and basis entry.
#[derive(Debug, Clone)]
pub struct BracketBasis {
    levels: usize,
    entries: Vec<Rel>,
}

impl BracketBasis {
    pub fn new(a: &GActionGerm, u: &UnifBase) -> BracketBasis {
        let entries = a
            .levels()
            .iter()
            .flat_map(|v| {
                u.basis()
                    .iter()
                    .map(move |eps| bracket_entourage(a, *v, eps))
            })
            .collect();
        BracketBasis {
            levels: a.levels().len(),
            entries,
        }
    }

    pub fn get(&self, level: usize, entourage: usize) -> &Rel {
        let width = self.entries.len() / self.levels;
        &self.entries[level * width + entourage]
    }

    pub fn entries(&self) -> &[Rel] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<Rel> {
        self.entries
    }
}

fn require(a: &GActionGerm, u: &UnifBase, op: &'static str, properties: &[Property]) -> Result<()> {
    let report = a.classify(u);
    for &p in properties {
        if let Some(w) = report.witness(p) {
            return Err(Error::precondition(
                op,
                format!("uniformity is not {p}: {}", w.describe(a)),
            ));
        }
    }
    Ok(())
}

/// `𝒰^G`, generated by every `[Vᵢ, ε_j]`. Requires a quasibounded `u`; the
/// result is re-validated and a failure is reported as an internal error.
pub fn compute_ug(a: &GActionGerm, u: &UnifBase) -> Result<UnifBase> {
    require(a, u, "compute_ug", &[Property::Quasibounded])?;
    let ug = UnifBase::new(u.carrier(), BracketBasis::new(a, u).into_entries())?;
    let report = ug.validate_basis();
    if let Some((axiom, w)) = report.first_failure() {
        return Err(Error::Internal {
            op: "compute_ug",
            detail: format!("bracket basis fails {axiom} at {w}"),
        });
    }
    Ok(ug)
}

/// `A ν B ⇔ ∀ Vᵢ: VᵢA δ_𝒰 VᵢB`, evaluated at every chain level.
pub fn nu_proximity(a: &GActionGerm, u: &UnifBase) -> Result<Prox> {
    let delta = from_uniformity(u)?;
    Prox::from_fn(a.carrier(), |x, y| {
        a.levels()
            .iter()
            .all(|v| delta.near(a.translate_set(*v, x), a.translate_set(*v, y)))
    })
}

/// `ν` evaluated at the deepest chain level only.
pub fn nu_proximity_deepest(a: &GActionGerm, u: &UnifBase) -> Result<Prox> {
    let delta = from_uniformity(u)?;
    let v = a.base().deepest();
    Prox::from_fn(a.carrier(), |x, y| {
        delta.near(a.translate_set(v, x), a.translate_set(v, y))
    })
}

/// `A β_G B ⇔ ∀ Vᵢ: VᵢA ∩ VᵢB ≠ ∅`; the overlap proximity is maximal on a
/// finite discrete carrier.
pub fn beta_g_proximity(a: &GActionGerm) -> Result<Prox> {
    Prox::from_fn(a.carrier(), |x, y| {
        a.levels()
            .iter()
            .all(|v| a.translate_set(*v, x).meets(a.translate_set(*v, y)))
    })
}

/// How a relation behaves as a G-proximity. Each field holds the least
/// violating tuple.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GProxReport {
    /// `(g, A, B)` where nearness of `(A, B)` and `(gA, gB)` differ.
    pub invariance: Option<(usize, Subset, Subset)>,
    /// A far pair whose translates meet at every level.
    pub compatibility: Option<(Subset, Subset)>,
    /// A far pair whose translates are near at every level.
    pub strong_compatibility: Option<(Subset, Subset)>,
}

impl GProxReport {
    pub fn holds(&self) -> bool {
        self.invariance.is_none()
            && self.compatibility.is_none()
            && self.strong_compatibility.is_none()
    }
}

pub fn check_g_proximity(a: &GActionGerm, p: &Prox) -> GProxReport {
    let carrier = a.carrier();
    let mut report = GProxReport::default();
    let far_pairs = || {
        carrier
            .subsets()
            .flat_map(move |x| carrier.subsets().map(move |y| (x, y)))
            .filter(|&(x, y)| p.far(x, y))
    };
    'outer: for g in 0..a.group().order() {
        for x in carrier.subsets() {
            let gx = a.image(g, x);
            for y in carrier.subsets() {
                if p.near(x, y) != p.near(gx, a.image(g, y)) {
                    report.invariance = Some((g, x, y));
                    break 'outer;
                }
            }
        }
    }
    report.compatibility = far_pairs().find(|&(x, y)| {
        !a.levels()
            .iter()
            .any(|v| !a.translate_set(*v, x).meets(a.translate_set(*v, y)))
    });
    report.strong_compatibility = far_pairs().find(|&(x, y)| {
        !a.levels()
            .iter()
            .any(|v| p.far(a.translate_set(*v, x), a.translate_set(*v, y)))
    });
    report
}

#[derive(Debug, Clone)]
pub struct TgProxReport {
    pub nu: Prox,
    pub ug: UnifBase,
    /// Least pair where `ν` and `δ_{𝒰^G}` disagree.
    pub equality: Option<(Subset, Subset)>,
    pub g_proximity: GProxReport,
}

impl TgProxReport {
    pub fn holds(&self) -> bool {
        self.equality.is_none() && self.g_proximity.holds()
    }
}

/// Compares `ν` with `δ_{𝒰^G}` and checks `ν` is a G-proximity. Requires a
/// π-uniform `u` and a jointly continuous action.
pub fn verify_tgprox(a: &GActionGerm, u: &UnifBase) -> Result<TgProxReport> {
    require(a, u, "verify_tgprox", &[Property::PiUniform])?;
    if let Some(w) = a.check_action_continuity(u).witness {
        return Err(Error::precondition(
            "verify_tgprox",
            format!("action is not continuous: {}", w.describe(a)),
        ));
    }
    let nu = nu_proximity(a, u)?;
    let ug = compute_ug(a, u)?;
    let equality = nu.first_difference(&from_uniformity(&ug)?)?;
    let g_proximity = check_g_proximity(a, &nu);
    Ok(TgProxReport {
        nu,
        ug,
        equality,
        g_proximity,
    })
}

#[derive(Debug, Clone)]
pub struct EquinormalReport {
    pub axioms: ProxReport,
    /// A π-disjoint pair with no π-disjoint open enlargements.
    pub unseparated: Option<(Subset, Subset)>,
}

impl EquinormalReport {
    pub fn axioms_pass(&self) -> bool {
        self.axioms.all_of(&ProxAxiom::PROXIMITY)
    }

    pub fn is_equinormal(&self) -> bool {
        self.axioms_pass() && self.unseparated.is_none()
    }

    /// The two characterizations agree.
    pub fn consistent(&self) -> bool {
        self.axioms_pass() == self.unseparated.is_none()
    }
}

/// Runs the proximity axioms on `β_G` and searches open enlargements of
/// every π-disjoint pair directly. Every subset of a discrete carrier is
/// open and closed.
pub fn check_equinormal(a: &GActionGerm) -> Result<EquinormalReport> {
    let beta = beta_g_proximity(a)?;
    let axioms = check_axioms(&beta)?;
    let carrier = a.carrier();
    let supersets = |s: Subset| carrier.subsets().filter(move |o| s.is_subset_of(*o));
    let unseparated = carrier
        .subsets()
        .flat_map(|x| carrier.subsets().map(move |y| (x, y)))
        .filter(|&(x, y)| beta.far(x, y))
        .find(|&(x, y)| !supersets(x).any(|o1| supersets(y).any(|o2| beta.far(o1, o2))));
    Ok(EquinormalReport {
        axioms,
        unseparated,
    })
}

/// Total boundedness of `𝒰^G`, with a minimum net per entourage.
pub fn massiveness(a: &GActionGerm, u: &UnifBase) -> Result<TotalBoundedness> {
    Ok(compute_ug(a, u)?.totally_bounded())
}

pub fn is_massive(a: &GActionGerm, u: &UnifBase) -> Result<bool> {
    Ok(massiveness(a, u)?.is_totally_bounded())
}

#[derive(Debug, Clone)]
pub struct MaximalityReport {
    /// Candidates that are G-proximities dominated by `δ_𝒰`.
    pub candidates: Vec<Prox>,
    /// First candidate not dominated by `ν`, with a pair near in `ν` and far
    /// in the candidate.
    pub failure: Option<(usize, Subset, Subset)>,
}

impl MaximalityReport {
    pub fn holds(&self) -> bool {
        self.failure.is_none()
    }
}

/// Enumerates proximities generated by reflexive symmetric point relations,
/// keeps those that are G-proximities with `ρ ⪯ δ_𝒰`, and checks `ρ ⪯ ν`.
pub fn check_maximality(a: &GActionGerm, u: &UnifBase) -> Result<MaximalityReport> {
    let carrier = a.carrier();
    let n = carrier.len();
    if n > 5 {
        return Err(Error::ResourceCap {
            what: "maximality carrier",
            size: n,
            cap: 5,
        });
    }
    let delta = from_uniformity(u)?;
    let nu = nu_proximity(a, u)?;
    let edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|x| (x + 1..n).map(move |y| (x, y)))
        .collect();
    let mut candidates = Vec::new();
    for mask in 0u32..1 << edges.len() {
        let chosen = edges
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .flat_map(|(_, &(x, y))| [(x, y), (y, x)]);
        let points = Rel::diagonal(carrier).union(&Rel::from_pairs(carrier, chosen)?);
        let rho = Prox::from_point_relation(&points)?;
        if check_axioms(&rho)?.all_of(&ProxAxiom::PROXIMITY)
            && delta.dominates(&rho)?
            && check_g_proximity(a, &rho).holds()
        {
            candidates.push(rho);
        }
    }
    let mut failure = None;
    for (i, rho) in candidates.iter().enumerate() {
        if let Some((x, y)) = nu.domination_witness(rho)? {
            failure = Some((i, x, y));
            break;
        }
    }
    Ok(MaximalityReport {
        candidates,
        failure,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaction::{FiniteGroup, NeighborhoodBase};
    use crate::setrel::{Carrier, CarrierRef};
    use std::sync::Arc;

    fn germ(group: (FiniteGroup, Vec<Vec<usize>>), levels: Vec<GroupSet>) -> GActionGerm {
        let (g, perms) = group;
        let n = perms[0].len();
        let base = NeighborhoodBase::new(&g, levels).unwrap();
        GActionGerm::new(Arc::new(g), base, Carrier::range(n).unwrap(), perms).unwrap()
    }

    fn z3(levels: Vec<GroupSet>) -> GActionGerm {
        germ(FiniteGroup::cyclic(3), levels)
    }

    /// Direct quantification over `v₁, v₂`.
    fn bracket_oracle(a: &GActionGerm, v: GroupSet, eps: &Rel) -> Rel {
        Rel::from_fn(a.carrier(), |x, y| {
            v.iter().any(|v1| {
                v.iter()
                    .any(|v2| eps.contains(a.apply(v1, x), a.apply(v2, y)))
            })
        })
    }

    #[test]
    fn bracket_examples() {
        let a = z3(vec![GroupSet(0b111)]);
        let c = a.carrier().clone();
        let diag = Rel::diagonal(&c);
        assert_eq!(bracket_entourage(&a, GroupSet::singleton(0), &diag), diag);
        assert_eq!(bracket_entourage(&a, GroupSet(0b011), &diag), Rel::full(&c));
        let trivial = GActionGerm::trivial(&c);
        let block = Rel::from_fn(&c, |x, y| x == y || x + y == 1);
        assert_eq!(bracket_entourage(&trivial, GroupSet(1), &block), block);
    }

    #[test]
    fn bracket_matches_oracle_on_s3() {
        let a = germ(FiniteGroup::symmetric(3), vec![GroupSet(1)]);
        let c = a.carrier().clone();
        for bits in 0u32..1 << 9 {
            let eps =
                Rel::diagonal(&c).union(&Rel::from_fn(&c, |x, y| bits >> (3 * x + y) & 1 == 1));
            for v in [1u64, 3, 5, 7, 63] {
                let v = GroupSet(v);
                let got = bracket_entourage(&a, v, &eps);
                assert_eq!(got, bracket_oracle(&a, v, &eps));
                assert!(eps.is_subset_of(&got));
            }
        }
    }

    #[test]
    fn compute_ug_examples() {
        let a = z3(vec![GroupSet(0b111)]);
        let c = a.carrier().clone();
        let ug = compute_ug(&a, &UnifBase::discrete(&c)).unwrap();
        assert_eq!(ug.basis(), [Rel::full(&c)]);
        let d = z3(vec![GroupSet(1)]);
        let u = UnifBase::discrete(&c);
        assert!(compute_ug(&d, &u).unwrap().equivalent(&u).unwrap());
    }

    #[test]
    fn compute_ug_rejects_non_quasibounded() {
        // Z2 swapping two of three points: the indiscrete germ moves the
        // block {0,2} to {1,2}, so no level keeps it.
        let c = Carrier::range(3).unwrap();
        let (z2, _) = FiniteGroup::cyclic(2);
        let base = NeighborhoodBase::indiscrete(&z2);
        let a = GActionGerm::new(
            Arc::new(z2),
            base,
            c.clone(),
            vec![vec![0, 1, 2], vec![1, 0, 2]],
        )
        .unwrap();
        let block = Rel::from_fn(&c, |x, y| x == y || x + y == 2);
        let u = UnifBase::new(&c, vec![block]).unwrap();
        let err = compute_ug(&a, &u).unwrap_err();
        assert!(
            matches!(
                err,
                Error::Precondition {
                    op: "compute_ug",
                    ..
                }
            ),
            "{err}"
        );
    }

    #[test]
    fn nu_examples() {
        let a = z3(vec![GroupSet(0b111)]);
        let c = a.carrier().clone();
        let nu = nu_proximity(&a, &UnifBase::discrete(&c)).unwrap();
        assert_eq!(
            nu.first_difference(&Prox::nonempty_pairs(&c).unwrap())
                .unwrap(),
            None
        );
        assert!(!check_axioms(&nu).unwrap().passes(ProxAxiom::P6));

        let discrete = z3(vec![GroupSet(1)]);
        let u = UnifBase::discrete(&c);
        assert_eq!(
            nu_proximity(&discrete, &u)
                .unwrap()
                .first_difference(&from_uniformity(&u).unwrap())
                .unwrap(),
            None
        );

        // Z2 swapping a and b, fixing c; the chain {e,s} ⊇ {e}.
        let xs: CarrierRef = Carrier::new(["a", "b", "c"]).unwrap();
        let (z2, _) = FiniteGroup::cyclic(2);
        let base = NeighborhoodBase::new(&z2, vec![GroupSet(0b11), GroupSet(1)]).unwrap();
        let swap = GActionGerm::new(
            Arc::new(z2),
            base,
            xs.clone(),
            vec![vec![0, 1, 2], vec![1, 0, 2]],
        )
        .unwrap();
        let nu = nu_proximity(&swap, &UnifBase::discrete(&xs)).unwrap();
        assert!(nu.far(Subset::singleton(0), Subset::singleton(1)));
    }

    #[test]
    fn beta_g_examples() {
        let a = z3(vec![GroupSet(0b111)]);
        let c = a.carrier().clone();
        let beta = beta_g_proximity(&a).unwrap();
        assert_eq!(
            beta.first_difference(&Prox::nonempty_pairs(&c).unwrap())
                .unwrap(),
            None
        );
        let d = z3(vec![GroupSet(1)]);
        assert_eq!(
            beta_g_proximity(&d)
                .unwrap()
                .first_difference(&Prox::overlap(&c).unwrap())
                .unwrap(),
            None
        );

        let (s3, perms) = FiniteGroup::symmetric(3);
        let s = s3.index_of("s").unwrap();
        let levels = vec![GroupSet::from_elements([0, s]), GroupSet(1)];
        // A non-normal upper level is allowed: only the deepest level must
        // absorb conjugation.
        let a = germ((s3, perms), levels.clone());
        let near_at = |v: GroupSet| {
            a.translate_set(v, Subset::singleton(0))
                .meets(a.translate_set(v, Subset::singleton(1)))
        };
        assert!(near_at(levels[0]) && !near_at(levels[1]));
        assert!(beta_g_proximity(&a)
            .unwrap()
            .far(Subset::singleton(0), Subset::singleton(1)));
    }

    #[test]
    fn beta_g_matches_nu_of_discrete_uniformity() {
        let (s3, perms) = FiniteGroup::symmetric(3);
        for levels in [
            vec![GroupSet(1)],
            vec![s3.all()],
            vec![s3.all(), GroupSet(1)],
        ] {
            let a = germ((s3.clone(), perms.clone()), levels);
            let u = UnifBase::discrete(a.carrier());
            let nu = nu_proximity(&a, &u).unwrap();
            assert_eq!(
                nu.first_difference(&beta_g_proximity(&a).unwrap()).unwrap(),
                None
            );
        }
    }

    #[test]
    fn verify_tgprox_on_small_instances() {
        let a = z3(vec![GroupSet(0b111), GroupSet(1)]);
        let u = UnifBase::discrete(a.carrier());
        let report = verify_tgprox(&a, &u).unwrap();
        assert!(report.holds(), "{:?}", report.equality);

        // Indiscrete germ with a transitive action is not continuous.
        let b = z3(vec![GroupSet(0b111)]);
        let err = verify_tgprox(&b, &u).unwrap_err();
        assert!(err.to_string().contains("not continuous"), "{err}");
    }

    #[test]
    fn verify_tgprox_rejects_non_saturated() {
        let c = Carrier::range(3).unwrap();
        let (z2, _) = FiniteGroup::cyclic(2);
        let base = NeighborhoodBase::discrete(&z2);
        let a = GActionGerm::new(
            Arc::new(z2),
            base,
            c.clone(),
            vec![vec![0, 1, 2], vec![1, 0, 2]],
        )
        .unwrap();
        let block = Rel::from_fn(&c, |x, y| x == y || x + y == 2);
        let u = UnifBase::new(&c, vec![block]).unwrap();
        let err = verify_tgprox(&a, &u).unwrap_err();
        assert!(err.to_string().contains("not pi_uniform"), "{err}");
    }

    #[test]
    fn equinormal_and_corrupted_control() {
        let a = z3(vec![GroupSet(0b111), GroupSet(1)]);
        let report = check_equinormal(&a).unwrap();
        assert!(report.is_equinormal() && report.consistent());

        let beta = beta_g_proximity(&z3(vec![GroupSet(1)])).unwrap();
        let corrupted = beta.with_pair(Subset::singleton(0), Subset::singleton(1), true);
        assert!(!check_axioms(&corrupted).unwrap().passes(ProxAxiom::P2));
    }

    #[test]
    fn massive_examples() {
        let a = z3(vec![GroupSet(0b111)]);
        let u = UnifBase::discrete(a.carrier());
        let tb = massiveness(&a, &u).unwrap();
        assert_eq!(tb.net_sizes(), vec![1]);
        let t = GActionGerm::trivial(a.carrier());
        assert!(is_massive(&t, &u).unwrap());
        assert_eq!(massiveness(&t, &u).unwrap().net_sizes(), vec![3]);
    }

    #[test]
    fn maximality_on_z2_swap() {
        let c = Carrier::range(4).unwrap();
        let (z2, _) = FiniteGroup::cyclic(2);
        for levels in [
            vec![GroupSet(1)],
            vec![GroupSet(3)],
            vec![GroupSet(3), GroupSet(1)],
        ] {
            let base = NeighborhoodBase::new(&z2, levels).unwrap();
            let a = GActionGerm::new(
                Arc::new(z2.clone()),
                base,
                c.clone(),
                vec![vec![0, 1, 2, 3], vec![1, 0, 3, 2]],
            )
            .unwrap();
            let u = UnifBase::discrete(&c);
            let report = check_maximality(&a, &u).unwrap();
            assert!(report.holds());
            assert!(!report.candidates.is_empty());
        }
    }
}
