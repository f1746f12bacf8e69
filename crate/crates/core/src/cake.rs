//! Cake protocols that talk to agents only through [`RwOracle`].

use crate::error::{Error, Result};
use crate::oracle::{Flipped, RwOracle, Span};
use crate::partition::{Allocation, Partition};
use crate::rational::{fmt_q, min_q, one, qi, zero, Q};
use crate::valuation::{Interval, Topology};
use num::{Signed, Zero};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    AtLeast,
    Greater,
    Equal,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decision {
    pub answer: bool,
    /// For a positive `AtLeast`/`Equal` answer: pieces each worth at least `r`.
    pub witness: Option<Partition>,
}

pub(crate) fn check_separation(n: usize, s: &Q) -> Result<()> {
    if n == 0 {
        return Err(Error::Parameter("need at least one piece".into()));
    }
    if !s.is_positive() {
        return Err(Error::Parameter("separation must be positive".into()));
    }
    if n >= 2 && s * qi(n as i64 - 1) >= one() {
        return Err(Error::Parameter(format!(
            "separation {} too large for {} pieces",
            fmt_q(s),
            n
        )));
    }
    Ok(())
}

fn require_cake<O: RwOracle + ?Sized>(o: &O) -> Result<()> {
    if o.topology() != Topology::Cake {
        return Err(Error::Unsupported("cake protocol on a pie session".into()));
    }
    Ok(())
}

/// Decides `MMS^{n,s}` against `r` on the whole cake. `AtLeast` uses at
/// most `n` queries, `Greater` at most `2n - 1`, `Equal` at most `3n - 1`.
pub fn decide<O: RwOracle + ?Sized>(o: &mut O, n: usize, s: &Q, r: &Q, rel: Relation) -> Result<Decision> {
    require_cake(o)?;
    check_separation(n, s)?;
    if r.is_negative() {
        return Err(Error::Parameter("threshold must be nonnegative".into()));
    }
    decide_on_span(o, &Span::unit(), n, s, r, rel)
}

/// [`decide`] restricted to `[span.lo, span.hi]`, without range checks on `s`.
pub fn decide_on_span<O: RwOracle + ?Sized>(
    o: &mut O,
    span: &Span,
    n: usize,
    s: &Q,
    r: &Q,
    rel: Relation,
) -> Result<Decision> {
    match rel {
        Relation::AtLeast => {
            let w = at_least_on(o, span, n, s, r)?;
            Ok(Decision { answer: w.is_some(), witness: w })
        }
        Relation::Greater => Ok(Decision { answer: greater_on(o, span, n, s, r)?, witness: None }),
        Relation::Equal => {
            let w = at_least_on(o, span, n, s, r)?;
            if w.is_none() {
                return Ok(Decision { answer: false, witness: None });
            }
            let g = greater_on(o, span, n, s, r)?;
            Ok(Decision { answer: !g, witness: if g { None } else { w } })
        }
    }
}

/// `[lo, lo], [lo+s, lo+s], ..., [lo+(n-1)s, hi]`: a zero-query partition
/// certifying the threshold 0.
pub fn zero_witness(span: &Span, n: usize, s: &Q) -> Option<Partition> {
    let last = &span.lo + s * qi(n as i64 - 1);
    if last > span.hi {
        return None;
    }
    let mut pieces: Vec<Interval> = (0..n - 1)
        .map(|i| {
            let p = &span.lo + s * qi(i as i64);
            Interval::new(p.clone(), p)
        })
        .collect();
    pieces.push(Interval::new(last, span.hi.clone()));
    Some(Partition::new(s.clone(), pieces))
}

/// Left-to-right greedy: each piece is the shortest one worth `r`, the next
/// starts exactly `s` later, the last piece takes the rest.
pub fn at_least_on<O: RwOracle + ?Sized>(
    o: &mut O,
    span: &Span,
    n: usize,
    s: &Q,
    r: &Q,
) -> Result<Option<Partition>> {
    if r.is_zero() {
        return Ok(zero_witness(span, n, s));
    }
    let mut pieces = Vec::with_capacity(n);
    let mut start = span.lo.clone();
    for _ in 0..n - 1 {
        if start > span.hi {
            return Ok(None);
        }
        let Some(y) = o.cut(&start, r)? else {
            return Ok(None);
        };
        if y > span.hi {
            return Ok(None);
        }
        let next = &y + s;
        pieces.push(Interval::new(start, y));
        start = next;
    }
    if start > span.hi {
        return Ok(None);
    }
    let last = match (&span.total, start == span.lo) {
        (Some(t), true) => t.clone(),
        _ => o.eval(&start, &span.hi)?,
    };
    if &last < r {
        return Ok(None);
    }
    pieces.push(Interval::new(start, span.hi.clone()));
    Ok(Some(Partition::new(s.clone(), pieces)))
}

/// Right-to-left greedy on the mirrored span: each piece is the longest
/// one worth exactly `r`; the answer is whether value strictly remains
/// after `n` such pieces.
pub fn greater_on<O: RwOracle + ?Sized>(o: &mut O, span: &Span, n: usize, s: &Q, r: &Q) -> Result<bool> {
    let mut f = Flipped::new(o, span.clone())?;
    let mut start = span.lo.clone();
    for _ in 0..n {
        if start > span.hi {
            return Ok(false);
        }
        match f.cut(&start, r)? {
            None => return Ok(false),
            Some(y) => start = y + s,
        }
    }
    Ok(f.last_leftover().is_some_and(|x| x.is_positive()))
}

/// Binary search on `[0, 1]` with the `AtLeast` test; returns the lower
/// bracket end and its witness once the bracket is at most `eps` wide.
pub fn approx_mms<O: RwOracle + ?Sized>(o: &mut O, n: usize, s: &Q, eps: &Q) -> Result<(Q, Partition)> {
    require_cake(o)?;
    check_separation(n, s)?;
    approx_mms_on_span(o, &Span::unit(), n, s, eps)
}

pub fn approx_mms_on_span<O: RwOracle + ?Sized>(
    o: &mut O,
    span: &Span,
    n: usize,
    s: &Q,
    eps: &Q,
) -> Result<(Q, Partition)> {
    if !eps.is_positive() {
        return Err(Error::Parameter("epsilon must be positive".into()));
    }
    let mut witness = zero_witness(span, n, s)
        .ok_or_else(|| Error::Parameter("span too short for the separators".into()))?;
    let (mut lo, mut hi) = (zero(), one());
    while &(&hi - &lo) > eps {
        let mid = (&lo + &hi) / qi(2);
        match at_least_on(o, span, n, s, &mid)? {
            Some(w) => {
                witness = w;
                lo = mid;
            }
            None => hi = mid,
        }
    }
    Ok((lo, witness))
}

/// Left-to-right moving-knife allocation: every remaining agent marks the
/// shortest piece from the current start worth its threshold; the lowest
/// mark wins (ties to the lower index) and the next start is `s` later.
/// The last agent also marks, so a threshold above its share is detected,
/// and then receives everything that is left. Uses `n(n+1)/2` cuts.
pub fn mms_fair_allocation<O: RwOracle>(sessions: &mut [O], s: &Q, thresholds: &[Q]) -> Result<Allocation> {
    for o in sessions.iter() {
        require_cake(o)?;
    }
    let pieces = mms_fair_on_span(sessions, &Span::unit(), s, thresholds)?;
    Ok(Allocation::new(Topology::Cake, s.clone(), pieces))
}

pub fn mms_fair_on_span<O: RwOracle>(
    sessions: &mut [O],
    span: &Span,
    s: &Q,
    thresholds: &[Q],
) -> Result<Vec<Interval>> {
    let n = sessions.len();
    if thresholds.len() != n || n == 0 {
        return Err(Error::Parameter("one threshold per agent required".into()));
    }
    let mut pieces: Vec<Option<Interval>> = vec![None; n];
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut start = span.lo.clone();
    while !remaining.is_empty() {
        if start > span.hi {
            return Err(Error::ProtocolFailure {
                agent: remaining[0],
                reason: "no cake left".into(),
            });
        }
        let mut best: Option<(usize, Q)> = None;
        for &i in &remaining {
            let mark = sessions[i].cut(&start, &thresholds[i])?;
            match mark {
                Some(y) if y <= span.hi => {
                    if best.as_ref().is_none_or(|(_, b)| &y < b) {
                        best = Some((i, y));
                    }
                }
                _ => {
                    return Err(Error::ProtocolFailure {
                        agent: i,
                        reason: format!("remaining cake is worth less than {}", fmt_q(&thresholds[i])),
                    })
                }
            }
        }
        let (i, y) = best.unwrap();
        remaining.retain(|&j| j != i);
        if remaining.is_empty() {
            pieces[i] = Some(Interval::new(start.clone(), span.hi.clone()));
        } else {
            pieces[i] = Some(Interval::new(start.clone(), y.clone()));
            start = y + s;
        }
    }
    Ok(pieces.into_iter().map(Option::unwrap).collect())
}

/// `C` in the query bound `C n^2 / s` of [`ordinal_allocation_2n_minus_1`]:
/// at most `1/s + n <= 2/s` knife positions, each asking at most `n` agents
/// `4n - 2` queries.
pub const ORDINAL_QUERY_CONSTANT: i64 = 8;

/// Knife sweep in steps of `s`, first stop `s` past the current start: at
/// each position every remaining agent reports whether the piece from the
/// current start is worth at least its 1-out-of-`(2n-1)` share (one `Eval`
/// and the negated `Greater` test).
/// The first agent to say yes (lowest index) takes the piece; the last
/// agent takes what is left.
pub fn ordinal_allocation_2n_minus_1<O: RwOracle>(sessions: &mut [O], s: &Q) -> Result<Allocation> {
    for o in sessions.iter() {
        require_cake(o)?;
    }
    let n = sessions.len();
    if n >= 2 && s * qi(2 * n as i64 - 2) >= one() {
        return Err(Error::Parameter("separation too large for the 1-out-of-(2n-1) protocol".into()));
    }
    if !s.is_positive() {
        return Err(Error::Parameter("separation must be positive".into()));
    }
    let pieces = ordinal_on_span(sessions, &Span::unit(), s)?;
    Ok(Allocation::new(Topology::Cake, s.clone(), pieces))
}

pub fn ordinal_on_span<O: RwOracle>(sessions: &mut [O], span: &Span, s: &Q) -> Result<Vec<Interval>> {
    let n = sessions.len();
    if n == 0 {
        return Err(Error::Parameter("no agents".into()));
    }
    let parts = 2 * n - 1;
    let mut pieces: Vec<Option<Interval>> = vec![None; n];
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut start = span.lo.clone();
    while remaining.len() > 1 {
        let mut m = 1i64;
        let winner = loop {
            let t = min_q(&(&start + s * qi(m)), &span.hi);
            let mut yes = None;
            for &i in &remaining {
                let v = sessions[i].eval(&start, &t)?;
                let full = Span::new(span.lo.clone(), span.hi.clone(), span.total.clone());
                if !greater_on(&mut sessions[i], &full, parts, s, &v)? {
                    yes = Some(i);
                    break;
                }
            }
            if let Some(i) = yes {
                break (i, t);
            }
            if t == span.hi {
                return Err(Error::Internal("knife reached the end without a taker".into()));
            }
            m += 1;
        };
        let (i, t) = winner;
        pieces[i] = Some(Interval::new(start.clone(), t.clone()));
        remaining.retain(|&j| j != i);
        start = t + s;
        if start > span.hi {
            return Err(Error::Internal("no cake left for the remaining agents".into()));
        }
    }
    pieces[remaining[0]] = Some(Interval::new(start, span.hi.clone()));
    Ok(pieces.into_iter().map(Option::unwrap).collect())
}
