//! Ordered proximities on finite linearly ordered carriers.
//!
//! The interval topology of a finite chain is discrete, so every convex set
//! is open here and the separation condition reduces to covering by the
//! convex components of a complement.

use crate::error::{Error, Result};
use crate::proximity::Prox;
use crate::setrel::{CarrierRef, Subset};

#[derive(Debug, Clone)]
pub struct OrderedCarrier {
    carrier: CarrierRef,
    /// Elements listed from least to greatest.
    order: Vec<usize>,
    rank: Vec<usize>,
}

impl OrderedCarrier {
    /// `order` lists every element once, least first.
    pub fn new(carrier: &CarrierRef, order: Vec<usize>) -> Result<OrderedCarrier> {
        let n = carrier.len();
        let mut rank = vec![usize::MAX; n];
        if order.len() != n {
            return Err(Error::invalid(
                "order",
                format!("{} ranks for {n} elements", order.len()),
            ));
        }
        for (r, &x) in order.iter().enumerate() {
            if x >= n || rank[x] != usize::MAX {
                return Err(Error::invalid("order", "not a permutation of the carrier"));
            }
            rank[x] = r;
        }
        Ok(OrderedCarrier {
            carrier: carrier.clone(),
            order,
            rank,
        })
    }

    /// Element order as the linear order.
    pub fn natural(carrier: &CarrierRef) -> OrderedCarrier {
        OrderedCarrier::new(carrier, (0..carrier.len()).collect()).expect("identity order")
    }

    pub fn carrier(&self) -> &CarrierRef {
        &self.carrier
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn less(&self, x: usize, y: usize) -> bool {
        self.rank[x] < self.rank[y]
    }

    /// `(−∞, x]`.
    pub fn ray_down(&self, x: usize) -> Subset {
        Subset::from_elements(self.order[..=self.rank[x]].iter().copied())
    }

    /// `[y, +∞)`.
    pub fn ray_up(&self, y: usize) -> Subset {
        Subset::from_elements(self.order[self.rank[y]..].iter().copied())
    }

    /// `[x, y]`, empty when `y < x`.
    pub fn interval(&self, x: usize, y: usize) -> Subset {
        if self.rank[y] < self.rank[x] {
            return Subset::EMPTY;
        }
        Subset::from_elements(self.order[self.rank[x]..=self.rank[y]].iter().copied())
    }

    pub fn is_convex(&self, c: Subset) -> bool {
        let ranks: Vec<usize> = self.order.iter().map(|&x| c.contains(x) as usize).collect();
        let first = ranks.iter().position(|&b| b == 1);
        let last = ranks.iter().rposition(|&b| b == 1);
        match (first, last) {
            (Some(i), Some(j)) => ranks[i..=j].iter().all(|&b| b == 1),
            _ => true,
        }
    }

    /// Maximal convex subsets of `s`, least first.
    pub fn convex_components(&self, s: Subset) -> Vec<Subset> {
        let mut out = Vec::new();
        let mut current = Subset::EMPTY;
        for &x in &self.order {
            if s.contains(x) {
                current = current.with(x);
            } else if !current.is_empty() {
                out.push(std::mem::take(&mut current));
            }
        }
        if !current.is_empty() {
            out.push(current);
        }
        out
    }

    /// Every subset is open in the interval topology of a finite chain.
    pub fn interval_topology_is_discrete(&self) -> bool {
        true
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderedReport {
    /// Least `x < y` (by rank) with `(−∞,x]` near `[y,+∞)`.
    pub op1: Option<(usize, usize)>,
    /// Least far pair `(A, B)` not covered by convex components of `X∖B`.
    pub op2: Option<(Subset, Subset)>,
    pub discrete_topology: bool,
}

impl OrderedReport {
    pub fn is_ordered(&self) -> bool {
        self.op1.is_none() && self.op2.is_none()
    }
}

pub fn check_ordered_proximity(oc: &OrderedCarrier, p: &Prox) -> OrderedReport {
    let n = oc.order.len();
    let op1 = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .map(|(i, j)| (oc.order[i], oc.order[j]))
        .find(|&(x, y)| p.near(oc.ray_down(x), oc.ray_up(y)));
    let carrier = oc.carrier();
    let op2 = carrier
        .subsets()
        .flat_map(|a| carrier.subsets().map(move |b| (a, b)))
        .filter(|&(a, b)| p.far(a, b))
        .find(|&(a, b)| {
            let cover = oc
                .convex_components(carrier.complement(b))
                .into_iter()
                .fold(Subset::EMPTY, Subset::union);
            !a.is_subset_of(cover)
        });
    OrderedReport {
        op1,
        op2,
        discrete_topology: oc.interval_topology_is_discrete(),
    }
}
