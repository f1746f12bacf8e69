//! Exact maximin shares of explicit valuations: interval-list selection
//! followed by one linear program, and an exhaustive enumeration oracle.

use crate::cake::{at_least_on, check_separation, greater_on, mms_fair_allocation, zero_witness};
use crate::error::{Error, Result};
use crate::lp::{ChainEnd, ChainStart, IntervalList, LpInstance, LpSolution, Segments};
use crate::oracle::{Explicit, QuerySession, RwOracle, Span};
use crate::partition::{Allocation, Partition};
use crate::rational::{mod1, one, qi, zero, Q};
use crate::valuation::{Interval, Topology, Valuation};
use num::Signed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScanMode {
    #[default]
    Linear,
    /// Binary search for the first failing candidate.
    Binary,
}

/// Largest number of interval lists the enumeration oracles will try.
pub const ENUM_LIMIT: u64 = 200_000;

fn require_cake(v: &Valuation) -> Result<()> {
    if v.topology() != Topology::Cake {
        return Err(Error::Unsupported("cake computation on a pie valuation".into()));
    }
    Ok(())
}

/// `MMS^{m,s}(a, 1) >= c`, with `None` standing for an unattainable
/// bound (always true) and a nonpositive bound only asking for room.
fn subcake_at_least(v: &Valuation, a: &Q, m: usize, s: &Q, c: Option<&Q>) -> Result<bool> {
    let Some(c) = c else {
        return Ok(true);
    };
    if a > &one() {
        return Ok(false);
    }
    if !c.is_positive() {
        return Ok(s * qi(m as i64 - 1) <= one() - a);
    }
    let span = Span::new(a.clone(), one(), None);
    Ok(at_least_on(&mut Explicit::new(v), &span, m, s, c)?.is_some())
}

fn first_failing(cands: &[usize], mode: ScanMode, mut holds: impl FnMut(usize) -> Result<bool>) -> Result<usize> {
    match mode {
        ScanMode::Linear => {
            for &j in cands {
                if !holds(j)? {
                    return Ok(j);
                }
            }
        }
        ScanMode::Binary => {
            let (mut lo, mut hi) = (0usize, cands.len());
            while lo < hi {
                let mid = (lo + hi) / 2;
                if holds(cands[mid])? {
                    lo = mid + 1;
                } else {
                    hi = mid;
                }
            }
            if lo < cands.len() {
                return Ok(cands[lo]);
            }
        }
    }
    Err(Error::Internal("interval selection found no candidate".into()))
}

fn objective(sol: LpSolution) -> Option<Q> {
    sol.is_optimal().then_some(sol.objective)
}

/// Assigns each piece endpoint of some maximin partition to the density
/// segment containing it. Requires `MMS^{n,s} > 0`.
///
/// The candidate for `l(k)` is priced with the last cut of the first
/// `k - 1` pieces at most `p_j - s` rather than equal to it: pinning it
/// there can make the program infeasible at exactly the index the
/// selection must return.
pub fn select_interval_list(v: &Valuation, n: usize, s: &Q, mode: ScanMode) -> Result<IntervalList> {
    require_cake(v)?;
    let segs = Segments::cake(v);
    let d = segs.len();
    let p = &segs.p;
    if n == 1 {
        return Ok(vec![(1, d)]);
    }
    let all: Vec<usize> = (1..=d).collect();
    let r1 = first_failing(&all, mode, |j| subcake_at_least(v, &(&p[j] + s), n - 1, s, Some(&segs.w[j])))?;
    let mut list: IntervalList = vec![(1, r1)];
    for k in 2..=n {
        let rp = list.last().unwrap().1;
        let lo = &p[rp - 1] + s;
        let hi = &p[rp] + s;
        let ls: Vec<usize> = (1..=d).filter(|&j| p[j - 1] <= hi && p[j] >= lo).collect();
        let lk = first_failing(&ls, mode, |j| {
            let lp = LpInstance {
                segs: &segs,
                s: s.clone(),
                list: list.clone(),
                start: ChainStart::At(zero()),
                end: ChainEnd::AtMost(&p[j] - s),
            };
            let c = objective(lp.solve()?);
            subcake_at_least(v, &p[j], n - k + 1, s, c.as_ref())
        })?;
        if k == n {
            list.push((lk, d));
            break;
        }
        let rs: Vec<usize> = (lk..=d).collect();
        let rk = first_failing(&rs, mode, |j| {
            let mut l = list.clone();
            l.push((lk, j));
            let lp = LpInstance { segs: &segs, s: s.clone(), list: l, start: ChainStart::At(zero()), end: ChainEnd::At(p[j].clone()) };
            let c = objective(lp.solve()?);
            subcake_at_least(v, &(&p[j] + s), n - k, s, c.as_ref())
        })?;
        list.push((lk, rk));
    }
    Ok(list)
}

/// `MMS^{n,s}` of an explicit cake valuation together with a partition
/// attaining it.
pub fn exact_mms(v: &Valuation, n: usize, s: &Q) -> Result<(Q, Partition)> {
    exact_mms_with(v, n, s, ScanMode::Linear)
}

pub fn exact_mms_with(v: &Valuation, n: usize, s: &Q, mode: ScanMode) -> Result<(Q, Partition)> {
    require_cake(v)?;
    if n == 1 {
        return Ok((one(), Partition::new(s.clone(), vec![Interval::new(zero(), one())])));
    }
    check_separation(n, s)?;
    if !greater_on(&mut Explicit::new(v), &Span::unit(), n, s, &zero())? {
        return Ok((zero(), zero_witness(&Span::unit(), n, s).unwrap()));
    }
    let list = select_interval_list(v, n, s, mode)?;
    let segs = Segments::cake(v);
    let sol = LpInstance { segs: &segs, s: s.clone(), list, start: ChainStart::At(zero()), end: ChainEnd::At(one()) }
        .solve()?;
    if !sol.is_optimal() {
        return Err(Error::Internal("selected interval list is infeasible".into()));
    }
    let pieces = sol.pieces(s).into_iter().map(|(a, b)| Interval::new(a, b)).collect();
    let part = Partition::new(s.clone(), pieces);
    if part.min_value(v)? != sol.objective {
        return Err(Error::Internal("maximin partition does not attain the program value".into()));
    }
    Ok((sol.objective, part))
}

fn binom(n: u64, k: u64) -> u64 {
    (0..k).fold(1u64, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// Maximum of the chain program over every monotone interval list with
/// `l(1) = 1` and `r(n) = d`.
pub fn brute_mms_interval_enum(v: &Valuation, n: usize, s: &Q) -> Result<Q> {
    require_cake(v)?;
    if n == 1 {
        return Ok(one());
    }
    check_separation(n, s)?;
    let segs = Segments::cake(v);
    let d = segs.len();
    let free = 2 * n - 2;
    if binom((d + free - 1) as u64, free as u64) > ENUM_LIMIT {
        return Err(Error::TooLarge(format!("{d} segments with {n} pieces")));
    }
    let mut best: Option<Q> = None;
    let mut seq = vec![1usize; free];
    loop {
        let mut list = Vec::with_capacity(n);
        let mut prev = 1;
        for q in 0..n {
            let r = if q + 1 == n { d } else { seq[2 * q] };
            list.push((prev, r));
            if q + 1 < n {
                prev = seq[2 * q + 1];
            }
        }
        let sol = LpInstance { segs: &segs, s: s.clone(), list, start: ChainStart::At(zero()), end: ChainEnd::At(one()) }
            .solve()?;
        if sol.is_optimal() && best.as_ref().is_none_or(|b| &sol.objective > b) {
            best = Some(sol.objective);
        }
        // Next nondecreasing sequence over 1..=d.
        let Some(i) = (0..free).rev().find(|&i| seq[i] < d) else {
            break;
        };
        seq[i] += 1;
        for t in i + 1..free {
            seq[t] = seq[i];
        }
    }
    best.ok_or_else(|| Error::Internal("no feasible interval list".into()))
}

/// Exact 1-out-of-`k` share of a pie valuation, by enumerating interval
/// lists on the circle unrolled twice, with a free start point.
pub fn pie_mms_enum(v: &Valuation, k: usize, s: &Q) -> Result<(Q, Partition)> {
    if v.topology() != Topology::Pie {
        return Err(Error::Unsupported("pie enumeration on a cake valuation".into()));
    }
    if k == 0 || !s.is_positive() || s * qi(k as i64) >= one() {
        return Err(Error::Parameter("need k >= 1 and 0 < s < 1/k".into()));
    }
    let segs = Segments::pie_unrolled(v);
    let d = v.pieces();
    let mut best: Option<(Q, LpSolution)> = None;
    let mut tried = 0u64;
    let touches = |j: usize, lo: &Q, hi: &Q| &segs.p[j - 1] <= hi && &segs.p[j] >= lo;
    // Depth-first over monotone lists whose consecutive segments can be
    // exactly s apart.
    let mut stack: Vec<IntervalList> = (1..=d).map(|l| vec![(l, 0)]).collect();
    while let Some(list) = stack.pop() {
        let q = list.len();
        let (l, r) = *list.last().unwrap();
        if r == 0 {
            for r in l..=2 * d {
                let mut nl = list.clone();
                nl.last_mut().unwrap().1 = r;
                stack.push(nl);
            }
            continue;
        }
        if q == k {
            let l1 = list[0].0;
            let lo = &segs.p[l1 - 1] + one() - s;
            let hi = &segs.p[l1] + one() - s;
            if !touches(r, &lo, &hi) {
                continue;
            }
            tried += 1;
            if tried > ENUM_LIMIT {
                return Err(Error::TooLarge(format!("{d} segments with {k} pieces")));
            }
            let sol = LpInstance { segs: &segs, s: s.clone(), list, start: ChainStart::Wrap, end: ChainEnd::At(zero()) }
                .solve()?;
            if sol.is_optimal() && best.as_ref().is_none_or(|(b, _)| &sol.objective > b) {
                best = Some((sol.objective.clone(), sol));
            }
            continue;
        }
        let lo = &segs.p[r - 1] + s;
        let hi = &segs.p[r] + s;
        for nl_idx in r..=2 * d {
            if touches(nl_idx, &lo, &hi) {
                let mut nl = list.clone();
                nl.push((nl_idx, 0));
                stack.push(nl);
            }
        }
    }
    let (val, sol) = best.ok_or_else(|| Error::Internal("no feasible pie interval list".into()))?;
    let pieces = sol
        .pieces(s)
        .into_iter()
        .map(|(a, b)| Interval::new(mod1(&a), mod1(&b)))
        .collect();
    Ok((val, Partition::pie_ordered(s.clone(), pieces)))
}

/// Exact shares for every agent, then the moving-knife allocation with
/// those thresholds.
pub fn exact_mms_allocation(vs: &[Valuation], s: &Q) -> Result<(Allocation, Vec<Q>, usize)> {
    let n = vs.len();
    let mut thresholds = Vec::with_capacity(n);
    for v in vs {
        require_cake(v)?;
        thresholds.push(exact_mms(v, n, s)?.0);
    }
    let mut sessions: Vec<QuerySession> = vs.iter().cloned().map(QuerySession::new).collect();
    let alloc = mms_fair_allocation(&mut sessions, s, &thresholds)?;
    let queries = sessions.iter().map(|o| o.query_count()).sum();
    Ok((alloc, thresholds, queries))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cake::{decide, Relation};
    use crate::rational::q;
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
    fn worked_example() {
        assert_eq!(select_interval_list(&worked(), 2, &q(1, 3), ScanMode::Linear).unwrap(), vec![(1, 2), (3, 3)]);
        assert_eq!(select_interval_list(&worked(), 2, &q(1, 3), ScanMode::Binary).unwrap(), vec![(1, 2), (3, 3)]);
        let (m, part) = exact_mms(&worked(), 2, &q(1, 3)).unwrap();
        assert_eq!(m, q(2, 5));
        assert!(part.is_s_separated(Topology::Cake));
        assert_eq!(brute_mms_interval_enum(&worked(), 2, &q(1, 3)).unwrap(), q(2, 5));
    }

    #[test]
    fn uniform_values() {
        let u = Valuation::uniform(Topology::Cake);
        for n in 1..=4 {
            assert_eq!(select_interval_list(&u, n, &q(1, 10), ScanMode::Linear).unwrap(), vec![(1, 1); n]);
        }
        assert_eq!(exact_mms(&u, 3, &q(1, 10)).unwrap().0, q(4, 15));
        assert_eq!(brute_mms_interval_enum(&u, 2, &q(1, 5)).unwrap(), q(2, 5));
        assert_eq!(exact_mms(&u, 1, &q(1, 10)).unwrap().0, qi(1));
    }

    #[test]
    fn zero_share_short_circuits() {
        let v = Valuation::from_blocks(Topology::Cake, &[(q(2, 5), q(1, 2), qi(1))]).unwrap();
        let (m, part) = exact_mms(&v, 2, &q(1, 5)).unwrap();
        assert_eq!(m, qi(0));
        assert!(part.is_s_separated(Topology::Cake));
    }

    #[test]
    fn allocation_examples() {
        let (a, th, _) = exact_mms_allocation(&[worked(), worked()], &q(1, 3)).unwrap();
        assert_eq!(th, vec![q(2, 5), q(2, 5)]);
        assert_eq!(a.values(&[worked(), worked()]).unwrap(), vec![q(2, 5), q(3, 5)]);
        let us = vec![Valuation::uniform(Topology::Cake); 3];
        let (a, _, _) = exact_mms_allocation(&us, &q(1, 10)).unwrap();
        assert!(a.values(&us).unwrap().iter().all(|x| x >= &q(4, 15)));
    }

    #[test]
    fn pie_enum_examples() {
        let u = Valuation::uniform(Topology::Pie);
        assert_eq!(pie_mms_enum(&u, 2, &q(1, 5)).unwrap().0, q(3, 10));
        assert_eq!(pie_mms_enum(&u, 3, &q(1, 10)).unwrap().0, q(7, 30));
        let alice = Valuation::from_blocks(
            Topology::Pie,
            &[(q(23, 100), q(27, 100), q(1, 2)), (q(73, 100), q(77, 100), q(1, 2))],
        )
        .unwrap();
        let (m, part) = pie_mms_enum(&alice, 2, &q(3, 10)).unwrap();
        assert_eq!(m, q(1, 2));
        assert!(part.is_s_separated(Topology::Pie));
        assert_eq!(part.min_value(&alice).unwrap(), q(1, 2));
    }

    pub(crate) fn arb_cake(max_d: usize) -> impl Strategy<Value = Valuation> {
        (1..=max_d)
            .prop_flat_map(|d| {
                (
                    proptest::collection::btree_set(1i64..24, d - 1),
                    proptest::collection::vec(0i64..4, d),
                )
            })
            .prop_filter_map("zero", |(cuts, mut dens)| {
                if dens.iter().all(|&g| g == 0) {
                    dens[0] = 1;
                }
                let mut bps = vec![qi(0)];
                bps.extend(cuts.iter().map(|&c| q(c, 24)));
                bps.push(qi(1));
                Valuation::normalized(Topology::Cake, bps, dens.into_iter().map(qi).collect()).ok()
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn matches_enumeration(v in arb_cake(5), n in 2usize..=3, sk in 1i64..12) {
            let s = q(sk, 12 * (n as i64));
            let (m, part) = exact_mms(&v, n, &s).unwrap();
            prop_assert_eq!(&m, &brute_mms_interval_enum(&v, n, &s).unwrap());
            prop_assert!(part.is_s_separated(Topology::Cake));
            prop_assert!(part.min_value(&v).unwrap() >= m);
            prop_assert_eq!(&exact_mms_with(&v, n, &s, ScanMode::Binary).unwrap().0, &m);
        }

        #[test]
        fn consistent_with_decide(v in arb_cake(4), n in 2usize..=3, sk in 1i64..12) {
            let s = q(sk, 12 * (n as i64));
            let m = exact_mms(&v, n, &s).unwrap().0;
            let mut o = QuerySession::new(v.clone());
            prop_assert!(decide(&mut o, n, &s, &m, Relation::AtLeast).unwrap().answer);
            prop_assert!(!decide(&mut o, n, &s, &m, Relation::Greater).unwrap().answer);
        }

        #[test]
        fn monotone_in_s_and_n(v in arb_cake(4)) {
            let mut prev = None;
            for k in 1..=8 {
                let m = exact_mms(&v, 2, &q(k, 20)).unwrap().0;
                if let Some(p) = &prev {
                    prop_assert!(&m <= p);
                }
                prev = Some(m);
            }
            let s = q(1, 10);
            let m2 = exact_mms(&v, 2, &s).unwrap().0;
            let m3 = exact_mms(&v, 3, &s).unwrap().0;
            let m4 = exact_mms(&v, 4, &s).unwrap().0;
            prop_assert!(m3 <= m2 && m4 <= m3);
        }
    }
}
