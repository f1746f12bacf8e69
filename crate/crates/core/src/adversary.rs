//! Adaptive adversaries that answer queries without committing to a
//! valuation, then produce a valuation consistent with every answer that
//! contradicts whatever the algorithm concluded.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::Bound::{Excluded, Unbounded};

use crate::error::{Error, Result};
use crate::oracle::{check_alpha, check_unit, QueryKind, QueryRecord, RwOracle};
use crate::partition::Partition;
use crate::rational::{fmt_q, mod1, one, q, qi, zero, Q};
use crate::valuation::{arc_length, Interval, Topology, Valuation};
use num::Signed;

/// Increasing bijection `g` of `[0, 1]` revealed one point at a time, such
/// that no two recorded points at distance `s` have values summing to 1.
#[derive(Debug, Clone)]
pub struct FindSum {
    s: Q,
    recorded: BTreeMap<Q, Q>,
    queries: usize,
}

impl FindSum {
    pub fn new(s: Q) -> Result<Self> {
        if !s.is_positive() || s >= one() {
            return Err(Error::Parameter("need 0 < s < 1".into()));
        }
        let recorded = BTreeMap::from([(zero(), zero()), (one(), one())]);
        Ok(FindSum { s, recorded, queries: 0 })
    }

    pub fn s(&self) -> &Q {
        &self.s
    }

    pub fn recorded(&self) -> &BTreeMap<Q, Q> {
        &self.recorded
    }

    /// Queries to `g` and its inverse so far.
    pub fn query_count(&self) -> usize {
        self.queries
    }

    fn neighbours(&self, x: &Q) -> ((Q, Q), (Q, Q)) {
        let below = self.recorded.range(..x.clone()).next_back().unwrap();
        let above = self.recorded.range((Excluded(x.clone()), Unbounded)).next().unwrap();
        ((below.0.clone(), below.1.clone()), (above.0.clone(), above.1.clone()))
    }

    fn forbidden_value(&self, x: &Q, v: &Q) -> bool {
        [x + &self.s, x - &self.s]
            .iter()
            .any(|p| self.recorded.get(p).is_some_and(|g| g + v == one()))
    }

    /// `g(x)`: the midpoint of the values allowed by monotonicity, halved
    /// towards the lower neighbour while it would sum to 1 with a recorded
    /// point at distance `s`.
    pub fn g(&mut self, x: &Q) -> Result<Q> {
        check_unit(x)?;
        self.queries += 1;
        if let Some(v) = self.recorded.get(x) {
            return Ok(v.clone());
        }
        let ((_, lo), (_, hi)) = self.neighbours(x);
        let mut v = (&lo + &hi) / qi(2);
        while self.forbidden_value(x, &v) {
            v = (&lo + &v) / qi(2);
        }
        self.recorded.insert(x.clone(), v.clone());
        Ok(v)
    }

    /// `g^{-1}(alpha)`: a point strictly between the recorded neighbours
    /// such that neither it nor its two points at distance `s` are
    /// recorded.
    pub fn g_inv(&mut self, alpha: &Q) -> Result<Q> {
        check_alpha(alpha)?;
        self.queries += 1;
        if let Some((x, _)) = self.recorded.iter().find(|(_, v)| *v == alpha) {
            return Ok(x.clone());
        }
        let (lo, hi) = self
            .recorded
            .iter()
            .zip(self.recorded.iter().skip(1))
            .find(|(a, b)| a.1 < alpha && alpha < b.1)
            .map(|(a, b)| (a.0.clone(), b.0.clone()))
            .unwrap();
        let mut x = (&lo + &hi) / qi(2);
        while self.recorded.contains_key(&(&x + &self.s)) || self.recorded.contains_key(&(&x - &self.s)) {
            x = (&lo + &x) / qi(2);
        }
        self.recorded.insert(x.clone(), alpha.clone());
        Ok(x)
    }

    /// Records `g(x0)` and `g(x0 + s)` by the same rules and returns the
    /// recorded points of the piecewise linear completion of `g`; then
    /// `g(x0) + g(x0 + s) != 1`.
    pub fn finalize(&mut self, x0: &Q) -> Result<Vec<(Q, Q)>> {
        if x0.is_negative() || x0 > &(one() - &self.s) {
            return Err(Error::Domain(format!("x0 = {} outside [0, 1 - s]", fmt_q(x0))));
        }
        self.g(x0)?;
        self.g(&(x0 + &self.s))?;
        Ok(self.table())
    }

    pub fn table(&self) -> Vec<(Q, Q)> {
        self.recorded.iter().map(|(x, v)| (x.clone(), v.clone())).collect()
    }

    /// The valuation `v(x, y) = g(y) - g(x)` of the piecewise linear
    /// completion: its density is the slope of `g`.
    pub fn valuation(&self) -> Valuation {
        let t = self.table();
        let bps = t.iter().map(|p| p.0.clone()).collect();
        let dens = t.windows(2).map(|w| (&w[1].1 - &w[0].1) / (&w[1].0 - &w[0].0)).collect();
        Valuation::new(Topology::Cake, bps, dens).expect("g is an increasing bijection")
    }
}

/// Cake queries answered through [`FindSum`]: `Eval(x, y) = g(y) - g(x)`,
/// `Cut(x, alpha) = g^{-1}(alpha + g(x))`.
#[derive(Debug, Clone)]
pub struct FindSumRw {
    pub inner: FindSum,
    transcript: Vec<QueryRecord>,
}

impl FindSumRw {
    pub fn new(s: Q) -> Result<Self> {
        Ok(FindSumRw { inner: FindSum::new(s)?, transcript: Vec::new() })
    }

    pub fn transcript(&self) -> &[QueryRecord] {
        &self.transcript
    }

    /// Given a claimed two-agent maximin share `r`, asks `g^{-1}(r)`, records
    /// its partner point and returns a consistent valuation whose share
    /// differs from `r`.
    pub fn falsify(&mut self, r: &Q) -> Result<Valuation> {
        if !r.is_negative() && r <= &one() {
            let x0 = self.inner.g_inv(r)?;
            if x0 <= one() - self.inner.s() {
                self.inner.finalize(&x0)?;
            }
        }
        Ok(self.inner.valuation())
    }
}

impl RwOracle for FindSumRw {
    fn topology(&self) -> Topology {
        Topology::Cake
    }

    fn eval(&mut self, x: &Q, y: &Q) -> Result<Q> {
        check_unit(x)?;
        check_unit(y)?;
        if x > y {
            return Err(Error::Domain("reversed cake interval".into()));
        }
        let a = self.inner.g(y)? - self.inner.g(x)?;
        self.transcript.push(QueryRecord {
            kind: QueryKind::Eval { x: x.clone(), y: y.clone() },
            answer: Some(a.clone()),
        });
        Ok(a)
    }

    fn cut(&mut self, x: &Q, alpha: &Q) -> Result<Option<Q>> {
        check_unit(x)?;
        check_alpha(alpha)?;
        let target = self.inner.g(x)? + alpha;
        let a = if target > one() { None } else { Some(self.inner.g_inv(&target)?) };
        self.transcript.push(QueryRecord {
            kind: QueryKind::Cut { x: x.clone(), alpha: alpha.clone() },
            answer: a.clone(),
        });
        Ok(a)
    }

    fn query_count(&self) -> usize {
        self.transcript.len()
    }
}

/// Smallest value of a length-`s` arc of a pie valuation, and a start point
/// attaining it.
pub fn min_window_value(v: &Valuation, s: &Q) -> Result<(Q, Q)> {
    let mut best: Option<(Q, Q)> = None;
    let bps = v.breakpoints();
    for b in bps.iter().take(bps.len() - 1) {
        for x in [b.clone(), mod1(&(b - s))] {
            let val = v.value_between(&x, &mod1(&(&x + s)))?;
            if best.as_ref().is_none_or(|(bv, _)| &val < bv) {
                best = Some((val, x));
            }
        }
    }
    best.ok_or_else(|| Error::Internal("empty valuation".into()))
}

/// Pie adversary that keeps a length-`s` arc of value exactly `q` (density
/// `q/s`, strictly higher density elsewhere) with both ends unrecorded,
/// shifting it clockwise whenever a query would pin an end down.
#[derive(Debug, Clone)]
pub struct HasLowValue {
    s: Q,
    q: Q,
    current: Valuation,
    window: Q,
    /// Points `p` with `v(0, p)` known to the algorithm.
    recorded: BTreeSet<Q>,
    transcript: Vec<QueryRecord>,
}

impl HasLowValue {
    pub fn new(s: Q, q: Q) -> Result<Self> {
        if !q.is_positive() || q >= s || s >= one() {
            return Err(Error::Parameter("need 0 < q < s < 1".into()));
        }
        let x0 = (one() - &s) / qi(2);
        let low = &q / &s;
        let high = (one() - &q) / (one() - &s);
        let current = Valuation::new(
            Topology::Pie,
            vec![zero(), x0.clone(), &x0 + &s, one()],
            vec![high.clone(), low, high],
        )?;
        Ok(HasLowValue { s, q, current, window: x0, recorded: BTreeSet::from([zero()]), transcript: Vec::new() })
    }

    pub fn current(&self) -> &Valuation {
        &self.current
    }

    /// Start of the arc of value `q`.
    pub fn window(&self) -> &Q {
        &self.window
    }

    pub fn recorded(&self) -> &BTreeSet<Q> {
        &self.recorded
    }

    pub fn transcript(&self) -> &[QueryRecord] {
        &self.transcript
    }

    fn window_end(&self) -> Q {
        mod1(&(&self.window + &self.s))
    }

    /// Closest recorded point strictly clockwise of `x`, as a number in
    /// `(x, 1]` (0 is recorded and reappears as 1).
    fn next_recorded(&self, x: &Q) -> Q {
        self.recorded
            .range((Excluded(x.clone()), Unbounded))
            .next()
            .cloned()
            .unwrap_or_else(one)
    }

    fn prev_recorded(&self, x: &Q) -> Q {
        self.recorded.range(..x.clone()).next_back().cloned().unwrap()
    }

    fn has_recorded_between(&self, a: &Q, b: &Q) -> bool {
        // open clockwise arc (a, b)
        if a < b {
            self.recorded.range((Excluded(a.clone()), Excluded(b.clone()))).next().is_some()
        } else {
            self.recorded.range((Excluded(a.clone()), Unbounded)).next().is_some()
                || self.recorded.range(..b.clone()).next().is_some()
        }
    }

    /// Records the arc midpoint of each side of the window that has no
    /// recorded point inside.
    fn fill_sides(&mut self) {
        let (y, ys) = (self.window.clone(), self.window_end());
        for (a, b) in [(y.clone(), ys.clone()), (ys, y)] {
            if !self.has_recorded_between(&a, &b) {
                self.recorded.insert(mod1(&(&a + arc_length(&a, &b) / qi(2))));
            }
        }
    }

    /// Moves the window from `y` to `z = y + eps/2` keeping the value of
    /// every arc between recorded points.
    fn shift(&mut self) -> Result<()> {
        let y = self.window.clone();
        let ys = self.window_end();
        let eps = crate::rational::min_q(&(self.next_recorded(&y) - &y), &(self.next_recorded(&ys) - &ys));
        let half = &eps / qi(2);
        let z = &y + &half;
        let zs = &ys + &half;
        let y_lo = self.prev_recorded(&y);
        let ys_hi = self.next_recorded(&ys);
        let v = &self.current;
        let a_dens = v.value_between(&y_lo, &z)? / (&z - &y_lo);
        let low = &self.q / &self.s;
        let tail = v.value_between(&ys, &mod1(&ys_hi))? - &half * &low;
        let d_dens = tail / (&ys_hi - &zs);
        let mut bps: BTreeSet<Q> = v.breakpoints().iter().cloned().collect();
        bps.extend([y_lo.clone(), z.clone(), ys.clone(), zs.clone(), ys_hi.clone()]);
        let bps: Vec<Q> = bps.into_iter().collect();
        let dens = bps
            .windows(2)
            .map(|w| {
                let m = (&w[0] + &w[1]) / qi(2);
                if y_lo < m && m < z {
                    a_dens.clone()
                } else if ys < m && m < zs {
                    low.clone()
                } else if zs < m && m < ys_hi {
                    d_dens.clone()
                } else {
                    v.densities()[v.breakpoints().partition_point(|b| b <= &m) - 1].clone()
                }
            })
            .collect();
        self.current = Valuation::new(Topology::Pie, bps, dens)?;
        self.window = mod1(&z);
        Ok(())
    }

    /// One query in normal form, `Eval(0, x)` or `Cut(0, beta)`; returns the
    /// point it records and its prefix value.
    fn normal_query(&mut self, point: Option<&Q>, beta: Option<&Q>) -> Result<(Q, Q)> {
        self.fill_sides();
        let would = |v: &Valuation| -> Result<Q> {
            match (point, beta) {
                (Some(x), _) => Ok(mod1(x)),
                (None, Some(b)) => Ok(mod1(&v.cut_leftmost(&zero(), b)?.unwrap())),
                _ => unreachable!(),
            }
        };
        let p = would(&self.current)?;
        if p == self.window || p == self.window_end() {
            self.shift()?;
        }
        let p = would(&self.current)?;
        self.recorded.insert(p.clone());
        let w = self.current.cdf(&p);
        Ok((p, w))
    }

    /// Yes: the window neighbourhood is flattened so every length-`s` arc
    /// is worth more than `q`. No: the current valuation, whose window is
    /// worth exactly `q`.
    pub fn finalize(&self, answered_yes: bool) -> Result<Valuation> {
        if !answered_yes {
            return Ok(self.current.clone());
        }
        let y = &self.window;
        let lo = self.prev_recorded(y);
        let hi = self.next_recorded(y);
        let v = &self.current;
        let flat = v.value_between(&lo, &mod1(&hi))? / (&hi - &lo);
        let mut bps: BTreeSet<Q> = v.breakpoints().iter().cloned().collect();
        bps.extend([lo.clone(), hi.clone()]);
        let bps: Vec<Q> = bps.into_iter().collect();
        let dens = bps
            .windows(2)
            .map(|w| {
                let m = (&w[0] + &w[1]) / qi(2);
                if lo < m && m < hi {
                    flat.clone()
                } else {
                    v.densities()[v.breakpoints().partition_point(|b| b <= &m) - 1].clone()
                }
            })
            .collect();
        Valuation::new(Topology::Pie, bps, dens)
    }
}

impl RwOracle for HasLowValue {
    fn topology(&self) -> Topology {
        Topology::Pie
    }

    fn eval(&mut self, x: &Q, y: &Q) -> Result<Q> {
        check_unit(x)?;
        check_unit(y)?;
        self.normal_query(Some(x), None)?;
        self.normal_query(Some(y), None)?;
        let a = self.current.value_between(x, y)?;
        self.transcript.push(QueryRecord {
            kind: QueryKind::Eval { x: x.clone(), y: y.clone() },
            answer: Some(a.clone()),
        });
        Ok(a)
    }

    fn cut(&mut self, x: &Q, alpha: &Q) -> Result<Option<Q>> {
        check_unit(x)?;
        check_alpha(alpha)?;
        let (_, w) = self.normal_query(Some(x), None)?;
        let mut beta = w + alpha;
        if beta > one() {
            beta -= one();
        }
        self.normal_query(None, Some(&beta))?;
        let a = self.current.cut_leftmost(x, alpha)?;
        self.transcript.push(QueryRecord {
            kind: QueryKind::Cut { x: x.clone(), alpha: alpha.clone() },
            answer: a.clone(),
        });
        Ok(a)
    }

    fn query_count(&self) -> usize {
        self.transcript.len()
    }
}

/// Two pie valuations that answer a transcript exactly like the uniform
/// valuation: `low` is uniform (1-out-of-`k` share `1/k - s`), `high` has
/// share strictly above `1/k - s`.
#[derive(Debug, Clone)]
pub struct PieWitnesses {
    pub low: Valuation,
    pub high: Valuation,
    /// `k` pieces of length `1/k - s`, each worth more under `high`.
    pub partition: Partition,
}

/// Builds [`PieWitnesses`] for a transcript answered as if uniform. Value
/// is moved off the separators of an exactly separated partition whose
/// endpoints avoid all recorded points, without changing the value between
/// consecutive recorded points.
pub fn pie_threshold_witnesses(k: usize, s: &Q, transcript: &[QueryRecord]) -> Result<PieWitnesses> {
    if k < 2 || !s.is_positive() || s * qi(k as i64) >= one() {
        return Err(Error::Parameter(format!("need k >= 2 and 0 < s < 1/{k}")));
    }
    let low = Valuation::uniform(Topology::Pie);
    let mut recorded: BTreeSet<Q> = BTreeSet::from([zero()]);
    for (i, r) in transcript.iter().enumerate() {
        let fresh = match &r.kind {
            QueryKind::Eval { x, y } => low.value_between(x, y).map(Some),
            QueryKind::Cut { x, alpha } => low.cut_leftmost(x, alpha),
        };
        if fresh.as_ref().ok() != Some(&r.answer) {
            return Err(Error::Parameter(format!("query {i} was not answered as if uniform")));
        }
        match &r.kind {
            QueryKind::Eval { x, y } => recorded.extend([mod1(x), mod1(y)]),
            QueryKind::Cut { x, .. } => {
                recorded.insert(mod1(x));
                recorded.extend(r.answer.iter().map(mod1));
            }
        }
    }
    let step = q(1, k as i64);
    let len = &step - s;
    let ends = |theta: &Q| -> Vec<(Q, Q)> {
        (0..k as i64)
            .map(|i| {
                let a = theta + &step * qi(i);
                (mod1(&a), mod1(&(a + &len)))
            })
            .collect()
    };
    let mut j = 2;
    let pieces = loop {
        let p = ends(&q(1, k as i64 * j));
        if p.iter().all(|(a, b)| !recorded.contains(a) && !recorded.contains(b)) {
            break p;
        }
        j += 1;
    };
    // Every piece and separator gets a recorded interior point, so each
    // gap between recorded points holds at most one partition endpoint.
    for i in 0..k {
        let (a, b) = &pieces[i];
        let next = &pieces[(i + 1) % k].0;
        for (u, w) in [(a, b), (b, next)] {
            let inside = if u < w {
                recorded.range((Excluded(u.clone()), Excluded(w.clone()))).next().is_some()
            } else {
                recorded.range((Excluded(u.clone()), Unbounded)).next().is_some()
                    || recorded.range(..w.clone()).next().is_some()
            };
            if !inside {
                recorded.insert(mod1(&(u + arc_length(u, w) / qi(2))));
            }
        }
    }
    let starts: BTreeSet<Q> = pieces.iter().map(|p| p.0.clone()).collect();
    let finishes: BTreeSet<Q> = pieces.iter().map(|p| p.1.clone()).collect();
    let mut pts: Vec<Q> = recorded.into_iter().collect();
    pts.push(one());
    let half = q(1, 2);
    let mut bps = vec![zero()];
    let mut dens = Vec::new();
    for w in pts.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let inner = starts
            .range((Excluded(a.clone()), Excluded(b.clone())))
            .map(|e| (e.clone(), true))
            .chain(finishes.range((Excluded(a.clone()), Excluded(b.clone()))).map(|e| (e.clone(), false)))
            .next();
        match inner {
            None => dens.push(one()),
            Some((e, is_start)) => {
                // Separator side keeps half its length as value.
                let (sep, piece) = if is_start { (&e - a, b - &e) } else { (b - &e, &e - a) };
                let piece_dens = (b - a - &sep * &half) / &piece;
                bps.push(e);
                if is_start {
                    dens.extend([half.clone(), piece_dens]);
                } else {
                    dens.extend([piece_dens, half.clone()]);
                }
            }
        }
        bps.push(b.clone());
    }
    let high = Valuation::new(Topology::Pie, bps, dens)?;
    let partition =
        Partition::pie_ordered(s.clone(), pieces.into_iter().map(|(a, b)| Interval::new(a, b)).collect());
    Ok(PieWitnesses { low, high, partition })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cake::approx_mms;
    use crate::exact::{exact_mms, pie_mms_enum};
    use crate::oracle::{replay_matches, QuerySession};

    #[test]
    fn findsum_basics() {
        let mut f = FindSum::new(q(1, 10)).unwrap();
        assert_eq!(f.g(&zero()).unwrap(), zero());
        let x = f.g_inv(&q(1, 2)).unwrap();
        let r = f.recorded();
        assert!(!r.contains_key(&(&x + q(1, 10))) && !r.contains_key(&(&x - q(1, 10))));
        let x0 = q(1, 3);
        let table = f.finalize(&x0).unwrap();
        assert!(table.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 < w[1].1));
        let g = |p: &Q| table.iter().find(|t| &t.0 == p).unwrap().1.clone();
        assert_ne!(g(&x0) + g(&(&x0 + q(1, 10))), one());
    }

    #[test]
    fn findsum_avoids_partner_sum() {
        let mut f = FindSum::new(q(1, 4)).unwrap();
        // g(1/4) is recorded, so g(1/2) must avoid 1 - g(1/4) = 1/2.
        assert_eq!(f.g(&q(1, 4)).unwrap(), q(1, 2));
        let v = f.g(&q(1, 2)).unwrap();
        assert_ne!(v, q(1, 2));
        assert!(v > q(1, 2) && v < one());
    }

    #[test]
    fn findsum_rw_falsifies_approx() {
        for s in [q(1, 10), q(1, 4)] {
            let mut o = FindSumRw::new(s.clone()).unwrap();
            assert_eq!(o.eval(&zero(), &one()).unwrap(), one());
            let (r, _) = approx_mms(&mut o, 2, &s, &q(1, 64)).unwrap();
            let v = o.falsify(&r).unwrap();
            assert!(replay_matches(o.transcript(), &v));
            assert_ne!(exact_mms(&v, 2, &s).unwrap().0, r);
        }
    }

    #[test]
    fn low_value_keeps_window() {
        let (s, qv) = (q(1, 4), q(1, 8));
        let mut a = HasLowValue::new(s.clone(), qv.clone()).unwrap();
        assert_eq!(a.eval(&zero(), &one()).unwrap(), one());
        let probes = [q(3, 8), q(5, 8), q(1, 2), q(7, 16), q(9, 16)];
        for (i, x) in probes.iter().enumerate() {
            if i % 2 == 0 {
                a.eval(x, &mod1(&(x + &s))).unwrap();
            } else {
                a.cut(x, &qv).unwrap();
            }
            let w = a.window().clone();
            assert!(!a.recorded().contains(&w));
            assert!(!a.recorded().contains(&mod1(&(&w + &s))));
            assert_eq!(min_window_value(a.current(), &s).unwrap().0, qv);
            assert!(replay_matches(a.transcript(), a.current()));
        }
        let yes = a.finalize(true).unwrap();
        assert!(min_window_value(&yes, &s).unwrap().0 > qv);
        assert!(replay_matches(a.transcript(), &yes));
        let no = a.finalize(false).unwrap();
        assert_eq!(min_window_value(&no, &s).unwrap().0, qv);
    }

    #[test]
    fn low_value_cut_on_window_end() {
        let (s, qv) = (q(1, 4), q(1, 8));
        let mut a = HasLowValue::new(s.clone(), qv).unwrap();
        let y = a.window().clone();
        a.eval(&zero(), &y).unwrap();
        assert_ne!(a.window(), &y);
        let w = a.window().clone();
        let beta = a.current().cdf(&mod1(&(&w + &s)));
        a.cut(&zero(), &beta).unwrap();
        assert!(!a.recorded().contains(a.window()));
        assert!(replay_matches(a.transcript(), a.current()));
    }

    #[test]
    fn witnesses_empty_transcript() {
        let s = q(3, 10);
        let w = pie_threshold_witnesses(2, &s, &[]).unwrap();
        assert_eq!(pie_mms_enum(&w.low, 2, &s).unwrap().0, q(1, 5));
        assert!(pie_mms_enum(&w.high, 2, &s).unwrap().0 > q(1, 5));
        for p in &w.partition.pieces {
            assert!(w.high.value(p).unwrap() > q(1, 5));
        }
    }

    #[test]
    fn witnesses_replay() {
        let mut o = QuerySession::new(Valuation::uniform(Topology::Pie));
        o.eval(&zero(), &q(1, 2)).unwrap();
        o.cut(&q(1, 3), &q(1, 2)).unwrap();
        o.cut(&q(9, 10), &q(1, 5)).unwrap();
        let w = pie_threshold_witnesses(2, &q(1, 4), o.transcript()).unwrap();
        assert!(o.replays_on(&w.low) && o.replays_on(&w.high));
        assert!(w.partition.pieces.iter().all(|p| w.high.value(p).unwrap() > q(1, 4)));

        let mut bad = QuerySession::new(Valuation::from_blocks(Topology::Pie, &[(zero(), q(1, 2), one())]).unwrap());
        bad.eval(&zero(), &q(1, 4)).unwrap();
        assert!(pie_threshold_witnesses(2, &q(1, 4), bad.transcript()).is_err());
    }
}
