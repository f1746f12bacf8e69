//! Piecewise-constant valuations on the unit cake `[0,1]` or the unit pie
//! (the circle obtained by gluing 0 and 1).

use crate::error::{Error, Result};
use crate::rational::{fmt_q, mod1, one, parse_q, zero, Q};
use num::{Signed, Zero};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Topology {
    Cake,
    Pie,
}

/// A closed connected piece. On the pie, `right < left` means the piece
/// wraps through 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Interval {
    pub left: Q,
    pub right: Q,
}

impl Interval {
    pub fn new(left: Q, right: Q) -> Self {
        Interval { left, right }
    }

    pub fn length(&self, topology: Topology) -> Q {
        match topology {
            Topology::Cake => &self.right - &self.left,
            Topology::Pie => arc_length(&self.left, &self.right),
        }
    }

    pub fn is_degenerate(&self) -> bool {
        self.left == self.right
    }
}

/// Clockwise distance from `x` to `y` on the pie.
pub fn arc_length(x: &Q, y: &Q) -> Q {
    if y >= x {
        y - x
    } else {
        y - x + one()
    }
}

/// Density `densities[j]` on `[breakpoints[j], breakpoints[j+1]]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Valuation {
    topology: Topology,
    breakpoints: Vec<Q>,
    densities: Vec<Q>,
    /// `prefix[j] = v(0, p_j)`.
    prefix: Vec<Q>,
}

impl Valuation {
    /// Validates breakpoints, nonnegativity and total value exactly 1.
    pub fn new(topology: Topology, breakpoints: Vec<Q>, densities: Vec<Q>) -> Result<Self> {
        let v = Self::unnormalized(topology, breakpoints, densities)?;
        if v.prefix.last().unwrap() != &one() {
            return Err(Error::InvalidValuation(format!(
                "total value is {}, expected 1",
                fmt_q(v.prefix.last().unwrap())
            )));
        }
        Ok(v)
    }

    /// Like `new` but rescales densities so the total is 1.
    pub fn normalized(topology: Topology, breakpoints: Vec<Q>, densities: Vec<Q>) -> Result<Self> {
        let v = Self::unnormalized(topology, breakpoints, densities)?;
        let total = v.prefix.last().unwrap().clone();
        if !total.is_positive() {
            return Err(Error::InvalidValuation("total value is zero".into()));
        }
        let dens = v.densities.iter().map(|g| g / &total).collect();
        Self::new(topology, v.breakpoints, dens)
    }

    fn unnormalized(topology: Topology, breakpoints: Vec<Q>, densities: Vec<Q>) -> Result<Self> {
        let bad = |m: &str| Err(Error::InvalidValuation(m.to_string()));
        if breakpoints.len() < 2 || densities.len() + 1 != breakpoints.len() {
            return bad("need d+1 breakpoints for d densities, d >= 1");
        }
        if !breakpoints[0].is_zero() || breakpoints.last().unwrap() != &one() {
            return bad("breakpoints must start at 0 and end at 1");
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return bad("breakpoints must be strictly increasing");
        }
        if densities.iter().any(|g| g.is_negative()) {
            return bad("densities must be nonnegative");
        }
        let mut prefix = Vec::with_capacity(breakpoints.len());
        prefix.push(zero());
        for j in 0..densities.len() {
            let w = &prefix[j] + &densities[j] * (&breakpoints[j + 1] - &breakpoints[j]);
            prefix.push(w);
        }
        Ok(Valuation { topology, breakpoints, densities, prefix })
    }

    pub fn uniform(topology: Topology) -> Self {
        Self::new(topology, vec![zero(), one()], vec![one()]).unwrap()
    }

    /// Builds a valuation from `(left, right, weight)` blocks with zero
    /// density elsewhere, then normalizes.
    pub fn from_blocks(topology: Topology, blocks: &[(Q, Q, Q)]) -> Result<Self> {
        let mut pts: Vec<Q> = vec![zero(), one()];
        for (l, r, _) in blocks {
            pts.push(l.clone());
            pts.push(r.clone());
        }
        pts.sort();
        pts.dedup();
        let mut dens = vec![zero(); pts.len() - 1];
        for (l, r, w) in blocks {
            if l >= r || l.is_negative() || r > &one() {
                return Err(Error::InvalidValuation("bad block".into()));
            }
            let g = w / (r - l);
            for j in 0..dens.len() {
                if &pts[j] >= l && &pts[j + 1] <= r {
                    dens[j] += &g;
                }
            }
        }
        Self::normalized(topology, pts, dens)
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn with_topology(&self, topology: Topology) -> Self {
        Valuation { topology, ..self.clone() }
    }

    /// Number of pieces `d`.
    pub fn pieces(&self) -> usize {
        self.densities.len()
    }

    pub fn breakpoints(&self) -> &[Q] {
        &self.breakpoints
    }

    pub fn densities(&self) -> &[Q] {
        &self.densities
    }

    /// `w_j = v(0, p_j)` for `j = 0..=d`.
    pub fn prefix_values(&self) -> &[Q] {
        &self.prefix
    }

    pub fn max_density(&self) -> Q {
        self.densities.iter().max().unwrap().clone()
    }

    pub fn has_zero_segment(&self) -> bool {
        self.densities.iter().any(|g| g.is_zero())
    }

    /// Index `j` of the segment `[p_j, p_{j+1}]` containing `x`, preferring
    /// the left one at breakpoints.
    fn segment_of(&self, x: &Q) -> usize {
        let idx = self.breakpoints.partition_point(|p| p < x);
        idx.saturating_sub(1).min(self.densities.len() - 1)
    }

    /// `W(x) = v(0, x)` for `x` in `[0, 1]`.
    pub fn cdf(&self, x: &Q) -> Q {
        let j = self.segment_of(x);
        &self.prefix[j] + &self.densities[j] * (x - &self.breakpoints[j])
    }

    fn check_point(&self, x: &Q) -> Result<()> {
        if x.is_negative() || x > &one() {
            return Err(Error::Domain(format!("point {} outside [0,1]", fmt_q(x))));
        }
        Ok(())
    }

    /// Value between two points: `[x, y]` on the cake (requires `x <= y`),
    /// the clockwise arc from `x` to `y` on the pie.
    pub fn value_between(&self, x: &Q, y: &Q) -> Result<Q> {
        self.check_point(x)?;
        self.check_point(y)?;
        match self.topology {
            Topology::Cake => {
                if x > y {
                    return Err(Error::Domain(format!(
                        "cake interval [{}, {}] is reversed",
                        fmt_q(x),
                        fmt_q(y)
                    )));
                }
                Ok(self.cdf(y) - self.cdf(x))
            }
            Topology::Pie => {
                if y >= x {
                    Ok(self.cdf(y) - self.cdf(x))
                } else {
                    Ok(one() - self.cdf(x) + self.cdf(y))
                }
            }
        }
    }

    pub fn value(&self, iv: &Interval) -> Result<Q> {
        self.value_between(&iv.left, &iv.right)
    }

    /// Leftmost `y` clockwise from `x` with `v(x, y) = alpha`. Pie answers
    /// are reduced to `[0, 1)`.
    pub fn cut_leftmost(&self, x: &Q, alpha: &Q) -> Result<Option<Q>> {
        self.check_point(x)?;
        if alpha.is_negative() {
            return Err(Error::Domain("negative cut value".into()));
        }
        let target = self.cdf(x) + alpha;
        match self.topology {
            Topology::Cake => Ok(self.first_reaching(&target).map(|y| if &y < x { x.clone() } else { y })),
            Topology::Pie => {
                if alpha > &one() {
                    return Ok(None);
                }
                if alpha.is_zero() {
                    return Ok(Some(mod1(x)));
                }
                let y = if target <= one() {
                    self.first_reaching(&target).unwrap()
                } else {
                    self.first_reaching(&(target - one())).unwrap()
                };
                Ok(Some(mod1(&y)))
            }
        }
    }

    /// Smallest `y` with `W(y) >= target`, or none if `target > 1`.
    fn first_reaching(&self, target: &Q) -> Option<Q> {
        if target > &one() {
            return None;
        }
        if !target.is_positive() {
            return Some(zero());
        }
        let j = self.prefix.partition_point(|w| w < target);
        // prefix[j-1] < target <= prefix[j], so segment j-1 has positive density.
        let seg = j - 1;
        Some(&self.breakpoints[seg] + (target - &self.prefix[seg]) / &self.densities[seg])
    }

    /// Rightmost `y >= x` with `v(x, y) = alpha`. Only for explicit cake
    /// valuations; query sessions never offer it.
    pub fn cut_rightmost(&self, x: &Q, alpha: &Q) -> Result<Option<Q>> {
        if self.topology == Topology::Pie {
            return Err(Error::Unsupported("rightmost cut on a pie".into()));
        }
        self.check_point(x)?;
        if alpha.is_negative() {
            return Err(Error::Domain("negative cut value".into()));
        }
        let target = self.cdf(x) + alpha;
        if target > one() {
            return Ok(None);
        }
        let j = self.prefix.partition_point(|w| w <= &target);
        if j == self.prefix.len() {
            return Ok(Some(one()));
        }
        // prefix[j-1] <= target < prefix[j].
        let seg = j - 1;
        Ok(Some(&self.breakpoints[seg] + (&target - &self.prefix[seg]) / &self.densities[seg]))
    }

    /// Mirror image `x -> 1 - x` of a cake valuation.
    pub fn flip(&self) -> Result<Self> {
        if self.topology == Topology::Pie {
            return Err(Error::Unsupported("a pie has no orientation to flip".into()));
        }
        let bps = self.breakpoints.iter().rev().map(|p| one() - p).collect();
        let dens = self.densities.iter().rev().cloned().collect();
        Self::new(Topology::Cake, bps, dens)
    }

    /// `(1 - eta) v + eta * uniform`.
    pub fn mix_uniform(&self, eta: &Q) -> Self {
        let dens = self
            .densities
            .iter()
            .map(|g| (one() - eta) * g + eta)
            .collect();
        Self::new(self.topology, self.breakpoints.clone(), dens).unwrap()
    }

    pub fn to_file(&self) -> AgentFile {
        AgentFile {
            breakpoints: self.breakpoints.iter().map(fmt_q).collect(),
            densities: self.densities.iter().map(fmt_q).collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AgentFile {
    pub breakpoints: Vec<String>,
    pub densities: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceFile {
    pub topology: Topology,
    pub s: String,
    pub agents: Vec<AgentFile>,
}

/// A parsed problem instance: agents sharing one topology and separation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub topology: Topology,
    pub s: Q,
    pub agents: Vec<Valuation>,
}

impl Instance {
    pub fn from_json(text: &str) -> Result<Self> {
        let file: InstanceFile = serde_json::from_str(text).map_err(|e| {
            Error::Parse(format!("line {} column {}: {}", e.line(), e.column(), e))
        })?;
        Self::from_file(&file)
    }

    pub fn from_file(file: &InstanceFile) -> Result<Self> {
        let s = parse_q(&file.s)?;
        if s.is_negative() || s >= one() {
            return Err(Error::Parameter(format!("separation {} outside [0,1)", file.s)));
        }
        if file.agents.is_empty() {
            return Err(Error::Parameter("instance has no agents".into()));
        }
        let mut agents = Vec::new();
        for (i, a) in file.agents.iter().enumerate() {
            let bps = a.breakpoints.iter().map(|t| parse_q(t)).collect::<Result<Vec<_>>>()?;
            let dens = a.densities.iter().map(|t| parse_q(t)).collect::<Result<Vec<_>>>()?;
            let v = Valuation::new(file.topology, bps, dens).map_err(|e| match e {
                Error::InvalidValuation(m) => Error::InvalidValuation(format!("agent {i}: {m}")),
                other => other,
            })?;
            agents.push(v);
        }
        Ok(Instance { topology: file.topology, s, agents })
    }

    pub fn to_file(&self) -> InstanceFile {
        InstanceFile {
            topology: self.topology,
            s: fmt_q(&self.s),
            agents: self.agents.iter().map(Valuation::to_file).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};
    use proptest::prelude::*;

    fn worked() -> Valuation {
        Valuation::new(
            Topology::Cake,
            vec![qi(0), q(1, 3), q(2, 3), qi(1)],
            vec![q(6, 5), qi(0), q(9, 5)],
        )
        .unwrap()
    }

    #[test]
    fn value_examples() {
        let u = Valuation::uniform(Topology::Cake);
        assert_eq!(u.value(&Interval::new(q(1, 5), q(1, 2))).unwrap(), q(3, 10));
        assert_eq!(worked().value_between(&qi(0), &q(1, 3)).unwrap(), q(2, 5));
        assert_eq!(worked().value_between(&q(1, 7), &q(1, 7)).unwrap(), qi(0));
        assert!(u.value_between(&qi(0), &q(3, 2)).is_err());
        assert!(u.value_between(&q(1, 2), &q(1, 4)).is_err());
    }

    #[test]
    fn pie_value_wraps() {
        let u = Valuation::uniform(Topology::Pie);
        assert_eq!(u.value_between(&q(9, 10), &q(1, 10)).unwrap(), q(1, 5));
        assert_eq!(u.value_between(&qi(0), &qi(1)).unwrap(), qi(1));
    }

    #[test]
    fn cut_examples() {
        let u = Valuation::uniform(Topology::Cake);
        assert_eq!(u.cut_leftmost(&qi(0), &q(1, 2)).unwrap(), Some(q(1, 2)));
        assert_eq!(worked().cut_leftmost(&qi(0), &q(2, 5)).unwrap(), Some(q(1, 3)));
        assert_eq!(u.cut_leftmost(&q(4, 5), &q(1, 2)).unwrap(), None);
        assert_eq!(worked().cut_rightmost(&qi(0), &q(2, 5)).unwrap(), Some(q(2, 3)));
        assert_eq!(u.cut_rightmost(&qi(0), &q(1, 2)).unwrap(), Some(q(1, 2)));
        // zero value from inside the zero run reaches its right end
        assert_eq!(worked().cut_rightmost(&q(1, 2), &qi(0)).unwrap(), Some(q(2, 3)));
        assert_eq!(worked().cut_leftmost(&q(1, 2), &qi(0)).unwrap(), Some(q(1, 2)));
    }

    #[test]
    fn pie_cut_wraps() {
        let u = Valuation::uniform(Topology::Pie);
        assert_eq!(u.cut_leftmost(&q(3, 4), &q(1, 2)).unwrap(), Some(q(1, 4)));
        assert_eq!(u.cut_leftmost(&q(1, 4), &qi(1)).unwrap(), Some(q(1, 4)));
    }

    #[test]
    fn flip_examples() {
        let u = Valuation::uniform(Topology::Cake);
        assert_eq!(u.flip().unwrap(), u);
        let f = worked().flip().unwrap();
        assert_eq!(f.breakpoints(), &[qi(0), q(1, 3), q(2, 3), qi(1)]);
        assert_eq!(f.densities(), &[q(9, 5), qi(0), q(6, 5)]);
        assert!(Valuation::uniform(Topology::Pie).flip().is_err());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(Valuation::new(Topology::Cake, vec![qi(0), qi(1)], vec![qi(2)]).is_err());
        assert!(Valuation::new(Topology::Cake, vec![qi(0), q(1, 2), q(1, 2), qi(1)], vec![qi(1); 3]).is_err());
        assert!(Valuation::new(Topology::Cake, vec![qi(0), q(1, 2), qi(1)], vec![qi(3), qi(-1)]).is_err());
    }

    #[test]
    fn instance_round_trip() {
        let text = r#"{"topology":"cake","s":"1/3","agents":[{"breakpoints":["0","1/3","2/3","1"],"densities":["6/5","0","9/5"]}]}"#;
        let inst = Instance::from_json(text).unwrap();
        assert_eq!(inst.agents[0], worked());
        assert_eq!(Instance::from_json(&inst.to_json()).unwrap(), inst);
        let err = Instance::from_json("{\"topology\": \"cake\",").unwrap_err();
        assert!(matches!(err, Error::Parse(m) if m.contains("line 1")));
    }

    fn arb_valuation() -> impl Strategy<Value = Valuation> {
        (1usize..6)
            .prop_flat_map(|d| {
                (
                    proptest::collection::btree_set(1i64..60, d - 1),
                    proptest::collection::vec(0i64..5, d),
                )
            })
            .prop_filter_map("all-zero densities", |(cuts, mut dens)| {
                if dens.iter().all(|&g| g == 0) {
                    dens[0] = 1;
                }
                let mut bps = vec![qi(0)];
                bps.extend(cuts.iter().map(|&c| q(c, 60)));
                bps.push(qi(1));
                Valuation::normalized(Topology::Cake, bps, dens.into_iter().map(qi).collect()).ok()
            })
    }

    fn arb_point() -> impl Strategy<Value = Q> {
        (0i64..=97).prop_map(|k| q(k, 97))
    }

    proptest! {
        #[test]
        fn partition_values_sum_to_one(v in arb_valuation(), cuts in proptest::collection::vec(arb_point(), 0..6)) {
            let mut pts = cuts;
            pts.push(qi(0));
            pts.push(qi(1));
            pts.sort();
            let total: Q = pts.windows(2).map(|w| v.value_between(&w[0], &w[1]).unwrap()).sum();
            prop_assert_eq!(total, qi(1));
        }

        #[test]
        fn leftmost_cut_is_not_past_y(v in arb_valuation(), a in arb_point(), b in arb_point()) {
            let (x, y) = if a <= b { (a, b) } else { (b, a) };
            let alpha = v.value_between(&x, &y).unwrap();
            let c = v.cut_leftmost(&x, &alpha).unwrap().unwrap();
            prop_assert!(c <= y);
            prop_assert_eq!(v.value_between(&x, &c).unwrap(), alpha);
        }

        #[test]
        fn rightmost_dominates_leftmost(v in arb_valuation(), x in arb_point(), k in 0i64..=20) {
            let alpha = q(k, 20);
            let l = v.cut_leftmost(&x, &alpha).unwrap();
            let r = v.cut_rightmost(&x, &alpha).unwrap();
            prop_assert_eq!(l.is_some(), r.is_some());
            if let (Some(l), Some(r)) = (l, r) {
                prop_assert!(r >= l);
                prop_assert_eq!(v.value_between(&x, &r).unwrap(), alpha);
                // equal exactly when there is positive density just right of l
                let strictly_positive = l < qi(1) && {
                    let j = v.breakpoints().partition_point(|p| p <= &l) - 1;
                    v.densities()[j] > qi(0)
                };
                prop_assert_eq!(r == l, strictly_positive || l == qi(1));
            }
        }

        #[test]
        fn flip_reflects_values(v in arb_valuation(), a in arb_point(), b in arb_point()) {
            let (x, y) = if a <= b { (a, b) } else { (b, a) };
            let f = v.flip().unwrap();
            prop_assert_eq!(f.value_between(&x, &y).unwrap(), v.value_between(&(qi(1) - &y), &(qi(1) - &x)).unwrap());
            prop_assert_eq!(f.flip().unwrap(), v);
        }
    }
}
