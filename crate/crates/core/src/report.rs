//! Pass/fail verdict tables shared by the axiom checkers.

use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict<W> {
    Pass,
    /// A failed verdict always carries a concrete counterexample.
    Fail(W),
}

impl<W> Verdict<W> {
    pub fn passed(&self) -> bool {
        matches!(self, Verdict::Pass)
    }

    pub fn witness(&self) -> Option<&W> {
        match self {
            Verdict::Pass => None,
            Verdict::Fail(w) => Some(w),
        }
    }
}

impl<W> From<Option<W>> for Verdict<W> {
    /// `None` means no violation was found.
    fn from(violation: Option<W>) -> Self {
        match violation {
            None => Verdict::Pass,
            Some(w) => Verdict::Fail(w),
        }
    }
}

/// One verdict per named axiom, iterated in the axiom enum's order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomReport<A: Ord, W> {
    verdicts: BTreeMap<A, Verdict<W>>,
}

impl<A: Ord + Copy, W> AxiomReport<A, W> {
    pub fn new() -> Self {
        Self {
            verdicts: BTreeMap::new(),
        }
    }

    pub fn record(&mut self, axiom: A, verdict: impl Into<Verdict<W>>) {
        self.verdicts.insert(axiom, verdict.into());
    }

    pub fn verdict(&self, axiom: A) -> Option<&Verdict<W>> {
        self.verdicts.get(&axiom)
    }

    /// `false` for axioms that were not checked.
    pub fn passes(&self, axiom: A) -> bool {
        self.verdicts.get(&axiom).is_some_and(Verdict::passed)
    }

    pub fn all_pass(&self) -> bool {
        self.verdicts.values().all(Verdict::passed)
    }

    pub fn all_of(&self, axioms: &[A]) -> bool {
        axioms.iter().all(|a| self.passes(*a))
    }

    pub fn iter(&self) -> impl Iterator<Item = (A, &Verdict<W>)> {
        self.verdicts.iter().map(|(a, v)| (*a, v))
    }

    pub fn failures(&self) -> impl Iterator<Item = (A, &W)> {
        self.verdicts
            .iter()
            .filter_map(|(a, v)| v.witness().map(|w| (*a, w)))
    }

    pub fn first_failure(&self) -> Option<(A, &W)> {
        self.failures().next()
    }
}

impl<A: Ord + Copy, W> Default for AxiomReport<A, W> {
    fn default() -> Self {
        Self::new()
    }
}

impl<A: Ord + Copy + fmt::Display, W: fmt::Display> fmt::Display for AxiomReport<A, W> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (axiom, verdict) in self.iter() {
            match verdict {
                Verdict::Pass => writeln!(f, "{axiom}: pass")?,
                Verdict::Fail(w) => writeln!(f, "{axiom}: FAIL ({w})")?,
            }
        }
        Ok(())
    }
}
