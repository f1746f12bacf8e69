//! Pie protocols: ordinal allocation from given thresholds, exact tests for
//! the extreme shares `1/k` and `0`, the marking approximation, and the
//! reduction to a cake by removing `[0, s]`.

use crate::cake::{approx_mms_on_span, greater_on, mms_fair_on_span, ordinal_on_span};
use crate::error::{Error, Result};
use crate::oracle::{pie_offset, ArcView, RwOracle, Span};
use crate::partition::{Allocation, Partition};
use crate::rational::{fmt_q, mod1, one, q, qi, zero, Q};
use crate::valuation::{Interval, Topology};
use num::{BigInt, Integer, Signed, ToPrimitive, Zero};

fn require_pie<O: RwOracle + ?Sized>(o: &O) -> Result<()> {
    if o.topology() != Topology::Pie {
        return Err(Error::Unsupported("pie protocol on a cake session".into()));
    }
    Ok(())
}

fn check_k(k: usize, s: &Q) -> Result<()> {
    if k < 2 {
        return Err(Error::Parameter("need k >= 2".into()));
    }
    if !s.is_positive() || s * qi(k as i64) >= one() {
        return Err(Error::Parameter(format!("need 0 < s < 1/{k}, got {}", fmt_q(s))));
    }
    Ok(())
}

/// Clockwise from 0, every remaining agent marks the shortest piece from
/// the current point worth its threshold; the earliest mark wins (ties to
/// the lower index) and is followed by a separator of length exactly `s`.
/// The last agent also receives a piece worth exactly its threshold, which
/// must end at least `s` before 0. Uses `n(n+1)/2` cuts.
///
/// With `thresholds[i]` at most agent `i`'s `ells[i]`-out-of-`(ells[i] n + 1)`
/// share, every agent is served.
pub fn pie_allocation_ordinal<O: RwOracle>(
    sessions: &mut [O],
    s: &Q,
    ells: &[usize],
    thresholds: &[Q],
) -> Result<Allocation> {
    let n = sessions.len();
    if n == 0 || ells.len() != n || thresholds.len() != n {
        return Err(Error::Parameter("one ell and one threshold per agent required".into()));
    }
    for (i, o) in sessions.iter().enumerate() {
        require_pie(o)?;
        let k = ells[i] * n + 1;
        if ells[i] == 0 || !s.is_positive() || s * qi(k as i64) >= one() {
            return Err(Error::Parameter(format!("agent {i}: need ell >= 1 and 0 < s < 1/{k}")));
        }
        if thresholds[i].is_negative() || thresholds[i] > one() {
            return Err(Error::Parameter(format!("agent {i}: threshold outside [0,1]")));
        }
    }
    let mut pieces: Vec<Option<Interval>> = vec![None; n];
    let mut remaining: Vec<usize> = (0..n).collect();
    // Absolute clockwise position from 0, in [0, 1].
    let mut start = zero();
    while !remaining.is_empty() {
        let limit = if remaining.len() == 1 { one() - s } else { one() };
        let mut best: Option<(usize, Q)> = None;
        for &i in &remaining {
            let p = mod1(&start);
            let y = sessions[i]
                .cut(&p, &thresholds[i])?
                .ok_or_else(|| Error::Internal("pie cut below value 1 failed".into()))?;
            let end = &start + pie_offset(&p, &y, &thresholds[i]);
            if end > limit {
                return Err(Error::ProtocolFailure {
                    agent: i,
                    reason: format!("no room left for a piece worth {}", fmt_q(&thresholds[i])),
                });
            }
            if best.as_ref().is_none_or(|(_, b)| &end < b) {
                best = Some((i, end));
            }
        }
        let (i, end) = best.unwrap();
        pieces[i] = Some(Interval::new(mod1(&start), mod1(&end)));
        remaining.retain(|&j| j != i);
        start = end + s;
    }
    Ok(Allocation::new(Topology::Pie, s.clone(), pieces.into_iter().map(Option::unwrap).collect()))
}

/// Whether the 1-out-of-`k` share equals `1/k`, with a witness of `k`
/// pieces worth `1/k` separated by zero-value arcs.
///
/// Splits the pie into `ceil(2/s)` equal arcs; from each zero-value arc
/// jumps to the start `z` of its zero run (`Cut(x, 1)`) and tries to lay
/// out separator, piece, separator, ... from `z`. Each distinct `z` is
/// tried once, which keeps the query count below `6k/s`.
pub fn pie_decide_equals_one_over_k<O: RwOracle + ?Sized>(
    o: &mut O,
    k: usize,
    s: &Q,
) -> Result<(bool, Option<Partition>)> {
    require_pie(o)?;
    check_k(k, s)?;
    let m = (qi(2) / s).ceil().to_integer().to_usize().ok_or_else(|| Error::TooLarge("1/s".into()))?;
    let share = q(1, k as i64);
    let mut tried: Vec<Q> = Vec::new();
    for i in 0..m {
        let x = q(i as i64, m as i64);
        let y = q(i as i64 + 1, m as i64);
        if !o.eval(&x, &y)?.is_zero() {
            continue;
        }
        let z0 = o.cut(&x, &one())?.ok_or_else(|| Error::Internal("full-value pie cut failed".into()))?;
        if tried.contains(&z0) {
            continue;
        }
        tried.push(z0.clone());
        let mut z = z0;
        let mut pieces = Vec::with_capacity(k);
        let mut works = true;
        for _ in 0..k {
            let a = mod1(&(&z + s));
            if !o.eval(&z, &a)?.is_zero() {
                works = false;
                break;
            }
            let b = o.cut(&a, &share)?.ok_or_else(|| Error::Internal("pie cut failed".into()))?;
            pieces.push(Interval::new(a, b.clone()));
            z = b;
        }
        if works {
            return Ok((true, Some(Partition::pie_ordered(s.clone(), pieces))));
        }
    }
    Ok((false, None))
}

/// Whether the 1-out-of-`k` share is positive, for `s <= 1/(2k)`: either
/// all `2k` equal arcs have value (alternate arcs then serve as
/// separators), or a zero arc is cut out and the remaining cake is tested
/// for `k` pieces of positive value.
pub fn pie_decide_positive<O: RwOracle + ?Sized>(o: &mut O, k: usize, s: &Q) -> Result<bool> {
    require_pie(o)?;
    if k < 2 || !s.is_positive() || s * qi(2 * k as i64) > one() {
        return Err(Error::Parameter(format!("need k >= 2 and 0 < s <= 1/(2k), got s = {}", fmt_q(s))));
    }
    let m = 2 * k as i64;
    for i in 0..m {
        let (x, y) = (q(i, m), q(i + 1, m));
        if o.eval(&x, &y)?.is_zero() {
            let len = one() - q(1, m);
            let mut view = ArcView::new(o, y, len.clone())?;
            return greater_on(&mut view, &Span::new(zero(), len, None), k, s, &zero());
        }
    }
    Ok(true)
}

/// Greedy over marked points for a fixed first piece `[a, b]` (indices
/// into the twice-unrolled marks). Returns the piece end indices.
struct Marks {
    /// Unrolled positions: `pos[i + count] = pos[i] + 1`.
    pos: Vec<Q>,
    /// Cumulative value numerators over a common denominator.
    val: Vec<BigInt>,
    denom: BigInt,
    count: usize,
    /// First mark at distance at least `s` after each mark.
    sep_next: Vec<usize>,
    /// Last mark `e` with `pos[e] + s <= pos[i] + 1`, per start `i < count`.
    wrap_limit: Vec<usize>,
}

impl Marks {
    fn build(positions: Vec<Q>, alpha: &Q, s: &Q) -> Self {
        let count = positions.len();
        let gap_last = one() - alpha * qi(count as i64 - 1);
        let denom = alpha.denom().lcm(gap_last.denom());
        let a_num = alpha.numer() * (&denom / alpha.denom());
        let g_num = gap_last.numer() * (&denom / gap_last.denom());
        let mut pos = positions.clone();
        pos.extend(positions.iter().map(|p| p + one()));
        let mut val = Vec::with_capacity(2 * count);
        let mut acc = BigInt::zero();
        for i in 0..2 * count {
            val.push(acc.clone());
            acc += if i % count == count - 1 { &g_num } else { &a_num };
        }
        let mut sep_next = vec![2 * count; 2 * count];
        let mut j = 0;
        for i in 0..2 * count {
            let need = &pos[i] + s;
            j = j.max(i);
            while j < 2 * count && pos[j] < need {
                j += 1;
            }
            sep_next[i] = j;
        }
        let mut wrap_limit = vec![0; count];
        let mut e = 0;
        for i in 0..count {
            let cap = &pos[i] + one() - s;
            while e + 1 < 2 * count && pos[e + 1] <= cap {
                e += 1;
            }
            wrap_limit[i] = e;
        }
        Marks { pos, val, denom, count, sep_next, wrap_limit }
    }

    fn greedy(&self, k: usize, a: usize, b: usize) -> Option<Vec<(usize, usize)>> {
        let r = &self.val[b] - &self.val[a];
        let mut pieces = vec![(a, b)];
        let mut end = b;
        for _ in 1..k {
            let c = *self.sep_next.get(end)?;
            if c >= self.val.len() {
                return None;
            }
            let target = &self.val[c] + &r;
            let e = c + self.val[c..].partition_point(|v| v < &target);
            if e >= self.val.len() {
                return None;
            }
            pieces.push((c, e));
            end = e;
        }
        (end <= self.wrap_limit[a]).then_some(pieces)
    }
}

/// Approximates the 1-out-of-`k` share within `eps` using only the
/// marking cuts: marks from 0 clockwise by `Cut(., eps/2)` until the next
/// mark would pass 0, then the best greedy partition over marks.
pub fn pie_approx_mms<O: RwOracle + ?Sized>(o: &mut O, k: usize, s: &Q, eps: &Q) -> Result<(Q, Partition)> {
    require_pie(o)?;
    check_k(k, s)?;
    if !eps.is_positive() {
        return Err(Error::Parameter("epsilon must be positive".into()));
    }
    let alpha = if eps >= &qi(2) { one() } else { eps / qi(2) };
    let mut positions = vec![zero()];
    let mut pos = zero();
    loop {
        let p = mod1(&pos);
        let y = o.cut(&p, &alpha)?.ok_or_else(|| Error::Internal("pie cut failed".into()))?;
        let next = &pos + pie_offset(&p, &y, &alpha);
        if next >= one() {
            break;
        }
        positions.push(next.clone());
        pos = next;
    }
    let marks = Marks::build(positions, &alpha, s);
    let mut best: Option<(BigInt, Vec<(usize, usize)>)> = None;
    for a in 0..marks.count {
        let hi_b = marks.wrap_limit[a];
        if hi_b < a {
            continue;
        }
        // Feasibility is monotone in the first piece's end.
        let (mut lo, mut hi) = (a, hi_b + 1);
        let mut found = None;
        while lo < hi {
            let mid = (lo + hi) / 2;
            match marks.greedy(k, a, mid) {
                Some(p) => {
                    found = Some(p);
                    lo = mid + 1;
                }
                None => hi = mid,
            }
        }
        if let Some(p) = found {
            let r = &marks.val[p[0].1] - &marks.val[p[0].0];
            if best.as_ref().is_none_or(|(b, _)| &r > b) {
                best = Some((r, p));
            }
        }
    }
    let Some((r, idx)) = best else {
        // Only when the share itself is at most eps.
        let pieces = (0..k).map(|i| {
            let x = q(i as i64, k as i64);
            Interval::new(x.clone(), x)
        });
        return Ok((zero(), Partition::new(s.clone(), pieces.collect())));
    };
    let pieces = idx
        .into_iter()
        .map(|(a, b)| Interval::new(mod1(&marks.pos[a]), mod1(&marks.pos[b])))
        .collect();
    Ok((Q::new(r, marks.denom.clone()), Partition::pie_ordered(s.clone(), pieces)))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PieCakeMode {
    /// Approximate shares of the cake `[s, 1]`, then the moving knife.
    Approx(Q),
    /// The 1-out-of-`(2n-1)` knife sweep on `[s, 1]`.
    Ordinal2n,
}

/// Removes `[0, s]` and runs a cake protocol on `[s, 1]`. Every agent gets
/// at least its 1-out-of-`(n+1)` pie share (minus `eps` in approximate
/// mode), or its 1-out-of-`2n` share in ordinal mode.
pub fn pie_via_cake_allocation<O: RwOracle>(sessions: &mut [O], s: &Q, mode: &PieCakeMode) -> Result<Allocation> {
    let n = sessions.len();
    for o in sessions.iter() {
        require_pie(o)?;
    }
    if n == 0 || !s.is_positive() || s * qi(n as i64 + 1) >= one() {
        return Err(Error::Parameter(format!("need 0 < s < 1/(n+1), got {}", fmt_q(s))));
    }
    let len = one() - s;
    let span = Span::new(zero(), len.clone(), None);
    let mut views = sessions
        .iter_mut()
        .map(|o| ArcView::new(o, s.clone(), len.clone()))
        .collect::<Result<Vec<_>>>()?;
    let pieces = match mode {
        PieCakeMode::Approx(eps) => {
            let mut th = Vec::with_capacity(n);
            for v in views.iter_mut() {
                th.push(approx_mms_on_span(v, &span, n, s, eps)?.0);
            }
            mms_fair_on_span(&mut views, &span, s, &th)?
        }
        PieCakeMode::Ordinal2n => ordinal_on_span(&mut views, &span, s)?,
    };
    let pieces = pieces
        .into_iter()
        .map(|p| Interval::new(mod1(&(s + &p.left)), mod1(&(s + &p.right))))
        .collect();
    Ok(Allocation::new(Topology::Pie, s.clone(), pieces))
}
