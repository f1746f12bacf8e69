//! Partitions and allocations of connected pieces with separation.

use crate::error::{Error, Result};
use crate::rational::{one, Q};
use crate::valuation::{arc_length, Interval, Topology, Valuation};
use num::{Signed, Zero};

/// Pieces listed left to right (clockwise on the pie).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    pub s: Q,
    pub pieces: Vec<Interval>,
}

/// `pieces[i]` is the piece of agent `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Allocation {
    pub topology: Topology,
    pub s: Q,
    pub pieces: Vec<Interval>,
}

impl Partition {
    pub fn new(s: Q, pieces: Vec<Interval>) -> Self {
        Partition { s, pieces }
    }

    pub fn values(&self, v: &Valuation) -> Result<Vec<Q>> {
        self.pieces.iter().map(|p| v.value(p)).collect()
    }

    pub fn min_value(&self, v: &Valuation) -> Result<Q> {
        let vals = self.values(v)?;
        vals.into_iter()
            .min()
            .ok_or_else(|| Error::Parameter("empty partition".into()))
    }

    /// Pie pieces in clockwise order starting with the piece that contains
    /// 0, or with the first piece after the separator containing 0.
    pub fn pie_ordered(s: Q, mut pieces: Vec<Interval>) -> Self {
        pieces.sort_by(|a, b| a.left.cmp(&b.left));
        if let Some(i) = pieces.iter().position(|p| p.right < p.left) {
            pieces.rotate_left(i);
        }
        Partition::new(s, pieces)
    }

    pub fn is_s_separated(&self, topology: Topology) -> bool {
        gaps(&self.pieces, topology).is_some_and(|g| g.iter().all(|x| x >= &self.s))
    }

    pub fn is_exactly_s_separated(&self, topology: Topology) -> bool {
        exact_separation(&self.pieces, topology, &self.s)
    }
}

impl Allocation {
    pub fn new(topology: Topology, s: Q, pieces: Vec<Interval>) -> Self {
        Allocation { topology, s, pieces }
    }

    pub fn values(&self, vs: &[Valuation]) -> Result<Vec<Q>> {
        if vs.len() != self.pieces.len() {
            return Err(Error::Parameter(format!(
                "{} valuations for {} pieces",
                vs.len(),
                self.pieces.len()
            )));
        }
        vs.iter().zip(&self.pieces).map(|(v, p)| v.value(p)).collect()
    }

    /// Pieces sorted into positional order.
    pub fn partition(&self) -> Partition {
        let mut pieces = self.pieces.clone();
        pieces.sort_by(|a, b| a.left.cmp(&b.left).then(a.right.cmp(&b.right)));
        Partition::new(self.s.clone(), pieces)
    }

    pub fn is_s_separated(&self) -> bool {
        self.partition().is_s_separated(self.topology)
    }

    pub fn is_exactly_s_separated(&self) -> bool {
        self.partition().is_exactly_s_separated(self.topology)
    }
}

/// Gap lengths between consecutive pieces in positional order (sorted by
/// left end), including the wrap gap on the pie. `None` if pieces are
/// malformed or overlap.
pub fn gaps(pieces: &[Interval], topology: Topology) -> Option<Vec<Q>> {
    let mut ps: Vec<&Interval> = pieces.iter().collect();
    ps.sort_by(|a, b| a.left.cmp(&b.left).then(a.right.cmp(&b.right)));
    let in_unit = |x: &Q| !x.is_negative() && x <= &one();
    match topology {
        Topology::Cake => {
            if ps.iter().any(|p| !in_unit(&p.left) || !in_unit(&p.right) || p.left > p.right) {
                return None;
            }
            let g: Vec<Q> = ps.windows(2).map(|w| &w[1].left - &w[0].right).collect();
            if g.iter().any(|x| x.is_negative()) {
                return None;
            }
            Some(g)
        }
        Topology::Pie => {
            if ps.iter().any(|p| !in_unit(&p.left) || !in_unit(&p.right)) || ps.is_empty() {
                return None;
            }
            let n = ps.len();
            let g: Vec<Q> = (0..n)
                .map(|i| arc_length(&ps[i].right, &ps[(i + 1) % n].left))
                .collect();
            // Pieces plus gaps must go around exactly once.
            let total: Q = ps.iter().map(|p| p.length(topology)).sum::<Q>() + g.iter().sum::<Q>();
            if total != one() {
                return None;
            }
            Some(g)
        }
    }
}

fn exact_separation(pieces: &[Interval], topology: Topology, s: &Q) -> bool {
    let Some(g) = gaps(pieces, topology) else {
        return false;
    };
    if g.iter().any(|x| x != s) {
        return false;
    }
    match topology {
        Topology::Cake => {
            let lo = pieces.iter().map(|p| &p.left).min().unwrap();
            let hi = pieces.iter().map(|p| &p.right).max().unwrap();
            lo.is_zero() && hi == &one()
        }
        Topology::Pie => true,
    }
}
