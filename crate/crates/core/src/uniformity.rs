//! Uniformities represented by finite entourage bases.
//!
//! Two bases describe the same uniformity iff each refines the other; the
//! generated filter is never materialized.

use std::fmt;

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::proximity::Nearness;
use crate::report::AxiomReport;
use crate::setrel::{same_carrier, CarrierRef, Rel, Subset};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnifBase {
    carrier: CarrierRef,
    basis: Vec<Rel>,
}

impl UnifBase {
    /// Stores the basis unvalidated; see [`UnifBase::validate_basis`].
    pub fn new(carrier: &CarrierRef, basis: Vec<Rel>) -> Result<UnifBase> {
        if basis.is_empty() {
            return Err(Error::invalid("uniformity basis", "the basis is empty"));
        }
        if basis.iter().any(|e| !same_carrier(e.carrier(), carrier)) {
            return Err(Error::CarrierMismatch(
                "basis entourage over a different carrier".into(),
            ));
        }
        Ok(UnifBase {
            carrier: carrier.clone(),
            basis,
        })
    }

    /// `{Δ_X}`: the discrete (finest) uniformity.
    pub fn discrete(carrier: &CarrierRef) -> UnifBase {
        UnifBase {
            carrier: carrier.clone(),
            basis: vec![Rel::diagonal(carrier)],
        }
    }

    /// `{X × X}`.
    pub fn indiscrete(carrier: &CarrierRef) -> UnifBase {
        UnifBase {
            carrier: carrier.clone(),
            basis: vec![Rel::full(carrier)],
        }
    }

    pub fn carrier(&self) -> &CarrierRef {
        &self.carrier
    }

    pub fn basis(&self) -> &[Rel] {
        &self.basis
    }

    /// Checks the four basis conditions: (1) every entourage contains `Δ_X`;
    /// for every `ε` (and `δ`) there is a basis entourage (2) inside `ε⁻¹`,
    /// (3) inside `ε ∩ δ`, (4) whose square lies inside `ε`.
    pub fn validate_basis(&self) -> BasisReport {
        let basis = &self.basis;
        let diagonal = Rel::diagonal(&self.carrier);
        let mut report = BasisReport::new();

        report.record(
            BasisAxiom::Reflexive,
            basis
                .iter()
                .position(|e| !diagonal.is_subset_of(e))
                .map(EntourageWitness::single),
        );
        report.record(
            BasisAxiom::Inverse,
            basis
                .iter()
                .position(|e| {
                    let inv = e.invert();
                    !basis.iter().any(|d| d.is_subset_of(&inv))
                })
                .map(EntourageWitness::single),
        );
        report.record(
            BasisAxiom::FilterBase,
            (0..basis.len())
                .cartesian_product(0..basis.len())
                .find(|&(i, j)| {
                    let meet = basis[i].intersection(&basis[j]);
                    !basis.iter().any(|g| g.is_subset_of(&meet))
                })
                .map(|(i, j)| EntourageWitness {
                    first: i,
                    second: Some(j),
                }),
        );
        report.record(
            BasisAxiom::Composition,
            basis
                .iter()
                .position(|e| {
                    !basis
                        .iter()
                        .any(|d| d.compose(d).map(|dd| dd.is_subset_of(e)).unwrap_or(false))
                })
                .map(EntourageWitness::single),
        );
        report
    }

    pub fn is_valid(&self) -> bool {
        self.validate_basis().all_pass()
    }

    /// The intersection of all basis entourages.
    pub fn core(&self) -> Rel {
        self.basis[1..]
            .iter()
            .fold(self.basis[0].clone(), |acc, e| acc.intersection(e))
    }

    /// Hausdorff iff the basis entourages intersect to `Δ_X`.
    pub fn is_hausdorff(&self) -> bool {
        self.core() == Rel::diagonal(&self.carrier)
    }

    /// `A` near `B` iff every basis entourage meets `A × B`.
    pub fn near(&self, a: Subset, b: Subset) -> bool {
        self.basis.iter().all(|e| e.meets_product(a, b))
    }

    /// The open sets: `A` such that each `a ∈ A` has a basis neighborhood
    /// `ε(a) ⊆ A`.
    pub fn induced_topology(&self) -> Topology {
        let open = self
            .carrier
            .subsets()
            .map(|a| {
                a.iter()
                    .all(|x| self.basis.iter().any(|e| e.row(x).is_subset_of(a)))
            })
            .collect();
        Topology {
            carrier: self.carrier.clone(),
            open,
        }
    }

    /// Whether `self` is finer than `coarser`: every entourage of `coarser`
    /// contains one of `self`.
    pub fn refines(&self, coarser: &UnifBase) -> Result<bool> {
        if !same_carrier(&self.carrier, &coarser.carrier) {
            return Err(Error::CarrierMismatch(
                "refinement between uniformities on different carriers".into(),
            ));
        }
        Ok(coarser
            .basis
            .iter()
            .all(|e| self.basis.iter().any(|d| d.is_subset_of(e))))
    }

    pub fn equivalent(&self, other: &UnifBase) -> Result<bool> {
        Ok(self.refines(other)? && other.refines(self)?)
    }

    /// Always bounded on a finite carrier. The witness for each entourage `ε`
    /// is a minimum-cardinality ε-net: points whose `ε`-neighborhoods cover `X`.
    pub fn totally_bounded(&self) -> TotalBoundedness {
        let n = self.carrier.len();
        let full = self.carrier.full();
        let nets = self
            .basis
            .iter()
            .map(|e| {
                (1..=n)
                    .find_map(|k| {
                        (0..n).combinations(k).find(|pts| {
                            e.image_of_set(Subset::from_elements(pts.iter().copied())) == full
                        })
                    })
                    .expect("the whole carrier is always a net")
            })
            .collect();
        TotalBoundedness { nets }
    }
}

/// Lazy `δ_𝒰`, usable above the table cap.
pub struct UniformNearness<'a>(pub &'a UnifBase);

impl Nearness for UniformNearness<'_> {
    fn carrier(&self) -> &CarrierRef {
        &self.0.carrier
    }

    fn near(&self, a: Subset, b: Subset) -> bool {
        self.0.near(a, b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BasisAxiom {
    Reflexive,
    Inverse,
    FilterBase,
    Composition,
}

impl fmt::Display for BasisAxiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            BasisAxiom::Reflexive => "(1) diagonal",
            BasisAxiom::Inverse => "(2) inverse",
            BasisAxiom::FilterBase => "(3) filter base",
            BasisAxiom::Composition => "(4) composition",
        };
        f.write_str(s)
    }
}

/// Basis indices of the offending entourage(s).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EntourageWitness {
    pub first: usize,
    pub second: Option<usize>,
}

impl EntourageWitness {
    fn single(first: usize) -> Self {
        EntourageWitness {
            first,
            second: None,
        }
    }
}

impl fmt::Display for EntourageWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.second {
            None => write!(f, "entourage #{}", self.first),
            Some(s) => write!(f, "entourages #{} and #{}", self.first, s),
        }
    }
}

pub type BasisReport = AxiomReport<BasisAxiom, EntourageWitness>;

/// An explicit family of open sets, indexed by subset mask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Topology {
    carrier: CarrierRef,
    open: Vec<bool>,
}

impl Topology {
    pub fn is_open(&self, a: Subset) -> bool {
        self.open[a.index()]
    }

    pub fn open_sets(&self) -> impl Iterator<Item = Subset> + '_ {
        self.carrier.subsets().filter(|a| self.is_open(*a))
    }

    pub fn len(&self) -> usize {
        self.open.iter().filter(|o| **o).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_discrete(&self) -> bool {
        self.open.iter().all(|o| *o)
    }

    /// Contains `∅` and `X` and is closed under pairwise union and intersection.
    pub fn is_topology(&self) -> bool {
        let opens: Vec<Subset> = self.open_sets().collect();
        self.is_open(Subset::EMPTY)
            && self.is_open(self.carrier.full())
            && opens.iter().all(|a| {
                opens
                    .iter()
                    .all(|b| self.is_open(a.union(*b)) && self.is_open(a.intersection(*b)))
            })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TotalBoundedness {
    /// Per basis entourage, the points of a minimum ε-net.
    pub nets: Vec<Vec<usize>>,
}

impl TotalBoundedness {
    pub fn is_totally_bounded(&self) -> bool {
        true
    }

    pub fn net_sizes(&self) -> Vec<usize> {
        self.nets.iter().map(Vec::len).collect()
    }
}
