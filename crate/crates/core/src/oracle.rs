//! Robertson–Webb query sessions. Protocols see agents only through
//! [`RwOracle`]: `Eval(x, y)` and leftmost `Cut(x, alpha)`.

use crate::error::{Error, Result};
use crate::rational::{fmt_q, mod1, one, zero, Q};
use crate::valuation::{Topology, Valuation};
use num::{Signed, Zero};
use serde::Serialize;

pub trait RwOracle {
    fn topology(&self) -> Topology;
    /// Value of `[x, y]` (cake) or of the clockwise arc from `x` to `y` (pie).
    fn eval(&mut self, x: &Q, y: &Q) -> Result<Q>;
    /// Leftmost point `y` clockwise from `x` with `v(x, y) = alpha`.
    fn cut(&mut self, x: &Q, alpha: &Q) -> Result<Option<Q>>;
    fn query_count(&self) -> usize;
}

impl<T: RwOracle + ?Sized> RwOracle for &mut T {
    fn topology(&self) -> Topology {
        (**self).topology()
    }
    fn eval(&mut self, x: &Q, y: &Q) -> Result<Q> {
        (**self).eval(x, y)
    }
    fn cut(&mut self, x: &Q, alpha: &Q) -> Result<Option<Q>> {
        (**self).cut(x, alpha)
    }
    fn query_count(&self) -> usize {
        (**self).query_count()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QueryKind {
    Eval { x: Q, y: Q },
    Cut { x: Q, alpha: Q },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryRecord {
    pub kind: QueryKind,
    pub answer: Option<Q>,
}

#[derive(Serialize)]
struct RecordLine {
    index: usize,
    kind: &'static str,
    args: [String; 2],
    answer: Option<String>,
}

/// One JSON object per line: `{index, kind, args, answer}`.
pub fn transcript_jsonl(records: &[QueryRecord]) -> String {
    let mut out = String::new();
    for (index, r) in records.iter().enumerate() {
        let (kind, args) = match &r.kind {
            QueryKind::Eval { x, y } => ("eval", [fmt_q(x), fmt_q(y)]),
            QueryKind::Cut { x, alpha } => ("cut", [fmt_q(x), fmt_q(alpha)]),
        };
        let line = RecordLine { index, kind, args, answer: r.answer.as_ref().map(fmt_q) };
        out.push_str(&serde_json::to_string(&line).unwrap());
        out.push('\n');
    }
    out
}

/// Re-asks every recorded query of `v` and compares answers.
pub fn replay_matches(records: &[QueryRecord], v: &Valuation) -> bool {
    records.iter().all(|r| {
        let fresh = match &r.kind {
            QueryKind::Eval { x, y } => v.value_between(x, y).ok().map(Some),
            QueryKind::Cut { x, alpha } => v.cut_leftmost(x, alpha).ok(),
        };
        fresh == Some(r.answer.clone())
    })
}

/// An agent with a hidden explicit valuation.
#[derive(Debug, Clone)]
pub struct QuerySession {
    valuation: Valuation,
    transcript: Vec<QueryRecord>,
}

impl QuerySession {
    pub fn new(valuation: Valuation) -> Self {
        QuerySession { valuation, transcript: Vec::new() }
    }

    pub fn transcript(&self) -> &[QueryRecord] {
        &self.transcript
    }

    pub fn transcript_jsonl(&self) -> String {
        transcript_jsonl(&self.transcript)
    }

    /// Whether the transcript is reproduced by `v`.
    pub fn replays_on(&self, v: &Valuation) -> bool {
        replay_matches(&self.transcript, v)
    }
}

pub(crate) fn check_unit(x: &Q) -> Result<()> {
    if x.is_negative() || x > &one() {
        return Err(Error::Domain(format!("point {} outside [0,1]", fmt_q(x))));
    }
    Ok(())
}

pub(crate) fn check_alpha(alpha: &Q) -> Result<()> {
    if alpha.is_negative() || alpha > &one() {
        return Err(Error::Domain(format!("cut value {} outside [0,1]", fmt_q(alpha))));
    }
    Ok(())
}

impl RwOracle for QuerySession {
    fn topology(&self) -> Topology {
        self.valuation.topology()
    }

    fn eval(&mut self, x: &Q, y: &Q) -> Result<Q> {
        let a = self.valuation.value_between(x, y)?;
        self.transcript.push(QueryRecord {
            kind: QueryKind::Eval { x: x.clone(), y: y.clone() },
            answer: Some(a.clone()),
        });
        Ok(a)
    }

    fn cut(&mut self, x: &Q, alpha: &Q) -> Result<Option<Q>> {
        check_unit(x)?;
        check_alpha(alpha)?;
        let a = self.valuation.cut_leftmost(x, alpha)?;
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

/// Direct access to an explicit valuation through the query interface,
/// counting but not recording queries.
#[derive(Debug, Clone, Copy)]
pub struct Explicit<'a> {
    v: &'a Valuation,
    count: usize,
}

impl<'a> Explicit<'a> {
    pub fn new(v: &'a Valuation) -> Self {
        Explicit { v, count: 0 }
    }
}

impl RwOracle for Explicit<'_> {
    fn topology(&self) -> Topology {
        self.v.topology()
    }

    fn eval(&mut self, x: &Q, y: &Q) -> Result<Q> {
        let a = self.v.value_between(x, y)?;
        self.count += 1;
        Ok(a)
    }

    fn cut(&mut self, x: &Q, alpha: &Q) -> Result<Option<Q>> {
        check_alpha(alpha)?;
        let a = self.v.cut_leftmost(x, alpha)?;
        self.count += 1;
        Ok(a)
    }

    fn query_count(&self) -> usize {
        self.count
    }
}

/// Clockwise offset of a pie cut answer `y` from its start `x`; a positive
/// request landing back on `x` went all the way round.
pub fn pie_offset(x: &Q, y: &Q, alpha: &Q) -> Q {
    let d = mod1(&(y - x));
    if d.is_zero() && alpha.is_positive() {
        one()
    } else {
        d
    }
}

/// A subinterval `[lo, hi]` of a cake oracle, with its value if known.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Span {
    pub lo: Q,
    pub hi: Q,
    pub total: Option<Q>,
}

impl Span {
    pub fn new(lo: Q, hi: Q, total: Option<Q>) -> Self {
        Span { lo, hi, total }
    }

    /// The whole normalized cake.
    pub fn unit() -> Self {
        Span { lo: zero(), hi: one(), total: Some(one()) }
    }
}

/// The mirror image `x -> lo + hi - x` of a cake span.
///
/// A `Cut` here answers with the rightmost point on the mirrored span: the
/// parent can only return leftmost points, and the leftmost point on the
/// mirror is a reverse cut, which no Robertson–Webb protocol can simulate.
/// Each `Cut` costs one parent `Cut` plus one parent `Eval` for `v(lo, b)`
/// unless that prefix is already known from an earlier answer.
pub struct Flipped<'a, O: RwOracle + ?Sized> {
    parent: &'a mut O,
    lo: Q,
    hi: Q,
    total: Option<Q>,
    /// Known prefix values `(z, v(lo, z))` of the parent.
    known: Vec<(Q, Q)>,
    last_leftover: Option<Q>,
}

impl<'a, O: RwOracle + ?Sized> Flipped<'a, O> {
    pub fn new(parent: &'a mut O, span: Span) -> Result<Self> {
        if parent.topology() != Topology::Cake {
            return Err(Error::Unsupported("flipping a pie".into()));
        }
        if span.lo > span.hi {
            return Err(Error::Domain("empty span".into()));
        }
        Ok(Flipped {
            parent,
            lo: span.lo,
            hi: span.hi,
            total: span.total,
            known: Vec::new(),
            last_leftover: None,
        })
    }

    pub fn whole(parent: &'a mut O) -> Result<Self> {
        Self::new(parent, Span::unit())
    }

    fn mirror(&self, x: &Q) -> Q {
        &self.lo + &self.hi - x
    }

    fn lookup(&self, z: &Q) -> Option<Q> {
        if z == &self.lo {
            return Some(zero());
        }
        if z == &self.hi {
            if let Some(t) = &self.total {
                return Some(t.clone());
            }
        }
        self.known.iter().find(|(p, _)| p == z).map(|(_, w)| w.clone())
    }

    fn prefix(&mut self, z: &Q) -> Result<Q> {
        if let Some(w) = self.lookup(z) {
            return Ok(w);
        }
        let w = self.parent.eval(&self.lo, z)?;
        self.known.push((z.clone(), w.clone()));
        Ok(w)
    }

    /// Value left between the mirrored span's end and the last cut point.
    pub fn last_leftover(&self) -> Option<&Q> {
        self.last_leftover.as_ref()
    }

    fn check(&self, x: &Q) -> Result<()> {
        if x < &self.lo || x > &self.hi {
            return Err(Error::Domain(format!("point {} outside flipped span", fmt_q(x))));
        }
        Ok(())
    }
}

impl<O: RwOracle + ?Sized> RwOracle for Flipped<'_, O> {
    fn topology(&self) -> Topology {
        Topology::Cake
    }

    fn eval(&mut self, x: &Q, y: &Q) -> Result<Q> {
        self.check(x)?;
        self.check(y)?;
        if x > y {
            return Err(Error::Domain("reversed interval".into()));
        }
        let (a, b) = (self.mirror(y), self.mirror(x));
        if let (Some(wa), Some(wb)) = (self.lookup(&a), self.lookup(&b)) {
            return Ok(wb - wa);
        }
        if a == self.lo {
            return self.prefix(&b);
        }
        self.parent.eval(&a, &b)
    }

    fn cut(&mut self, x: &Q, alpha: &Q) -> Result<Option<Q>> {
        self.check(x)?;
        check_alpha(alpha)?;
        let b = self.mirror(x);
        let p = self.prefix(&b)?;
        if &p < alpha {
            self.last_leftover = None;
            return Ok(None);
        }
        let rest = &p - alpha;
        let z = self
            .parent
            .cut(&self.lo, &rest)?
            .ok_or_else(|| Error::Internal("parent cut below a known prefix failed".into()))?;
        // A parent that itself answers rightmost cuts may overshoot `b` on a
        // zero-value run when `alpha = 0`.
        let z = if z > b { b } else { z };
        self.known.push((z.clone(), rest.clone()));
        self.last_leftover = Some(rest);
        Ok(Some(self.mirror(&z)))
    }

    fn query_count(&self) -> usize {
        self.parent.query_count()
    }
}

/// A clockwise pie arc `[origin, origin + length]` seen as the cake
/// `[0, length]`. Requires `length < 1` unless `origin = 0`.
pub struct ArcView<'a, O: RwOracle + ?Sized> {
    parent: &'a mut O,
    origin: Q,
    length: Q,
}

impl<'a, O: RwOracle + ?Sized> ArcView<'a, O> {
    pub fn new(parent: &'a mut O, origin: Q, length: Q) -> Result<Self> {
        if parent.topology() != Topology::Pie {
            return Err(Error::Unsupported("arc view of a cake".into()));
        }
        let origin = mod1(&origin);
        if length.is_negative() || length > one() || (length == one() && !origin.is_zero()) {
            return Err(Error::Domain("arc view length out of range".into()));
        }
        Ok(ArcView { parent, origin, length })
    }

    fn start_point(&self, t: &Q) -> Q {
        mod1(&(&self.origin + t))
    }

    fn end_point(&self, t: &Q) -> Q {
        let p = &self.origin + t;
        if p > one() {
            p - one()
        } else {
            p
        }
    }

    fn check(&self, t: &Q) -> Result<()> {
        if t.is_negative() || t > &self.length {
            return Err(Error::Domain(format!("point {} outside arc view", fmt_q(t))));
        }
        Ok(())
    }

    /// Pie point of a view coordinate.
    pub fn to_pie(&self, t: &Q) -> Q {
        self.start_point(t)
    }
}

impl<O: RwOracle + ?Sized> RwOracle for ArcView<'_, O> {
    fn topology(&self) -> Topology {
        Topology::Cake
    }

    fn eval(&mut self, x: &Q, y: &Q) -> Result<Q> {
        self.check(x)?;
        self.check(y)?;
        if x > y {
            return Err(Error::Domain("reversed interval".into()));
        }
        let (a, b) = (self.start_point(x), if x == y { self.start_point(y) } else { self.end_point(y) });
        self.parent.eval(&a, &b)
    }

    fn cut(&mut self, x: &Q, alpha: &Q) -> Result<Option<Q>> {
        self.check(x)?;
        check_alpha(alpha)?;
        let p = self.start_point(x);
        let Some(y) = self.parent.cut(&p, alpha)? else {
            return Ok(None);
        };
        let t = x + pie_offset(&p, &y, alpha);
        Ok(if t > self.length { None } else { Some(t) })
    }

    fn query_count(&self) -> usize {
        self.parent.query_count()
    }
}
