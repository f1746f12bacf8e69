//! Approximately equitable and envy-free exactly separated allocations,
//! and a fairness report for arbitrary allocations.
//!
//! These solvers read explicit valuations. Exact envy-freeness and
//! equitability cannot be reached with finitely many queries, so both
//! solvers take a tolerance.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::exact::{exact_mms, pie_mms_enum};
use crate::partition::Allocation;
use crate::rational::{fmt_q, mod1, one, qi, to_f64, zero, Q};
use crate::valuation::{Interval, Topology, Valuation};
use num::{BigInt, Signed, Zero};
use serde::Serialize;

fn check_common(vs: &[Valuation], s: &Q, eps: &Q, topology: Topology) -> Result<()> {
    if vs.is_empty() {
        return Err(Error::Parameter("need at least one agent".into()));
    }
    if vs.iter().any(|v| v.topology() != topology) {
        return Err(Error::Unsupported(format!("expected {topology:?} valuations")));
    }
    if !eps.is_positive() {
        return Err(Error::Parameter("epsilon must be positive".into()));
    }
    let seps = if topology == Topology::Pie { vs.len() } else { vs.len() - 1 };
    if s.is_negative() || s * qi(seps as i64) >= one() {
        return Err(Error::Parameter(format!("separation {} leaves no room", fmt_q(s))));
    }
    Ok(())
}

/// One evaluation of the leftover function during the equitable search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BisectionStep {
    pub target: Q,
    /// Value of the last piece to the last agent, `None` when the greedy
    /// cuts run off the cake.
    pub leftover: Option<Q>,
}

/// `true` if the leftover never increases with the target and every
/// infeasible target lies above every feasible one.
pub fn leftover_is_monotone(trace: &[BisectionStep]) -> bool {
    let mut steps: Vec<&BisectionStep> = trace.iter().collect();
    steps.sort_by(|a, b| a.target.cmp(&b.target));
    let mut prev: Option<&Q> = None;
    let mut infeasible_seen = false;
    for st in steps {
        match &st.leftover {
            None => infeasible_seen = true,
            Some(l) => {
                if infeasible_seen || prev.is_some_and(|p| l > p) {
                    return false;
                }
                prev = Some(l);
            }
        }
    }
    true
}

/// Greedy left-to-right layout on `[lo, 1]`: each agent but the last cuts a
/// piece worth `c`, followed by a separator of length `s`.
fn greedy_layout(vs: &[Valuation], order: &[usize], lo: &Q, s: &Q, c: &Q) -> Result<Option<(Vec<Q>, Q)>> {
    let mut x = lo.clone();
    let mut ends = Vec::with_capacity(order.len());
    for &a in &order[..order.len() - 1] {
        let Some(y) = vs[a].cut_leftmost(&x, c)? else {
            return Ok(None);
        };
        x = &y + s;
        ends.push(y);
        if x > one() {
            return Ok(None);
        }
    }
    let last = order[order.len() - 1];
    let left = vs[last].value_between(&x, &one())?;
    Ok(Some((ends, left)))
}

fn equitable_on(
    vs: &[Valuation],
    lo: &Q,
    s: &Q,
    order: &[usize],
    eps: &Q,
) -> Result<(Vec<Interval>, Vec<BisectionStep>)> {
    let n = vs.len();
    let mut sorted = order.to_vec();
    sorted.sort_unstable();
    if sorted != (0..n).collect::<Vec<_>>() {
        return Err(Error::Parameter("order must be a permutation of the agents".into()));
    }
    let build = |ends: &[Q]| {
        let mut pieces = vec![Interval::new(zero(), zero()); n];
        let mut x = lo.clone();
        for (idx, y) in ends.iter().enumerate() {
            pieces[order[idx]] = Interval::new(x.clone(), y.clone());
            x = y + s;
        }
        pieces[order[n - 1]] = Interval::new(x, one());
        pieces
    };
    if n == 1 {
        return Ok((build(&[]), Vec::new()));
    }
    // Strictly positive densities make the leftover continuous in c; each
    // piece moves by at most eta, so a gap of eps/2 here is eps on `vs`.
    let eta = eps / qi(4);
    let mixed: Vec<Valuation> = vs.iter().map(|v| v.mix_uniform(&eta)).collect();
    let half = eps / qi(2);
    let mut trace = Vec::new();
    let eval = |c: &Q, trace: &mut Vec<BisectionStep>| -> Result<Option<(Vec<Q>, Q)>> {
        let out = greedy_layout(&mixed, order, lo, s, c)?;
        trace.push(BisectionStep { target: c.clone(), leftover: out.as_ref().map(|o| o.1.clone()) });
        Ok(out)
    };
    let (mut lo_c, mut hi_c) = (zero(), one());
    let mut best = eval(&lo_c, &mut trace)?.ok_or_else(|| Error::Internal("zero target infeasible".into()))?;
    let mut hi_gap: Option<Q> = None;
    for _ in 0..4096 {
        let gap = &best.1 - &lo_c;
        if gap <= half {
            return Ok((build(&best.0), trace));
        }
        let mut candidates = Vec::with_capacity(2);
        if let Some(hg) = &hi_gap {
            // Regula falsi point of leftover(c) - c between the brackets.
            candidates.push(snap(&lo_c + &gap * (&hi_c - &lo_c) / (&gap - hg), &hi_c - &lo_c));
        }
        candidates.push((&lo_c + &hi_c) / qi(2));
        for c in candidates {
            if c <= lo_c || c >= hi_c {
                continue;
            }
            match eval(&c, &mut trace)? {
                Some(out) if out.1 >= c => {
                    lo_c = c;
                    best = out;
                }
                other => {
                    hi_gap = other.map(|o| o.1 - &c);
                    hi_c = c;
                }
            }
        }
    }
    Err(Error::Internal("equitable search did not converge".into()))
}

/// Keeps `c` if its denominator is small, else rounds it to a dyadic grid
/// about 2^-20 of `width`, so repeated secant steps do not blow up.
fn snap(c: Q, width: Q) -> Q {
    if c.denom().bits() <= 64 {
        return c;
    }
    let bits = (-to_f64(&width).log2()).ceil().max(0.0) as u32 + 20;
    let scale = Q::from_integer(BigInt::from(1) << bits);
    (c * &scale).round() / scale
}

/// Exactly `s`-separated cake allocation with pieces laid out left to right
/// in `order` and all own-piece values within `eps` of each other.
pub fn equitable_bisection(vs: &[Valuation], s: &Q, order: &[usize], eps: &Q) -> Result<Allocation> {
    Ok(equitable_bisection_traced(vs, s, order, eps)?.0)
}

/// As [`equitable_bisection`], also returning every evaluated target.
pub fn equitable_bisection_traced(
    vs: &[Valuation],
    s: &Q,
    order: &[usize],
    eps: &Q,
) -> Result<(Allocation, Vec<BisectionStep>)> {
    check_common(vs, s, eps, Topology::Cake)?;
    let (pieces, trace) = equitable_on(vs, &zero(), s, order, eps)?;
    Ok((Allocation::new(Topology::Cake, s.clone(), pieces), trace))
}

/// Equitable pie allocation: `[0, s]` becomes a separator and the rest is
/// divided as a cake.
pub fn equitable_pie(vs: &[Valuation], s: &Q, order: &[usize], eps: &Q) -> Result<Allocation> {
    check_common(vs, s, eps, Topology::Pie)?;
    let cakes: Vec<Valuation> = vs.iter().map(|v| v.with_topology(Topology::Cake)).collect();
    let (pieces, _) = equitable_on(&cakes, s, s, order, eps)?;
    Ok(pie_allocation(s, pieces))
}

fn pie_allocation(s: &Q, pieces: Vec<Interval>) -> Allocation {
    let pieces = pieces.into_iter().map(|p| Interval::new(p.left, mod1(&p.right))).collect();
    Allocation::new(Topology::Pie, s.clone(), pieces)
}

/// Exactly separated partition of `[lo, 1]` with piece lengths `b`.
fn layout(lo: &Q, s: &Q, b: &[Q]) -> Vec<Interval> {
    let mut x = lo.clone();
    b.iter()
        .map(|len| {
            let piece = Interval::new(x.clone(), &x + len);
            x = &piece.right + s;
            piece
        })
        .collect()
}

/// Label of a simplex vertex: the owner's favourite among the pieces in
/// `allowed`, ties to the lower index. An owner who values every allowed
/// piece at 0 labels the longest one.
fn favourite(v: &Valuation, pieces: &[Interval], allowed: &[bool]) -> Result<usize> {
    let mut best: Option<(Q, usize)> = None;
    for (j, p) in pieces.iter().enumerate() {
        if !allowed[j] {
            continue;
        }
        let val = v.value(p)?;
        if best.as_ref().is_none_or(|(b, _)| &val > b) {
            best = Some((val, j));
        }
    }
    let (val, j) = best.ok_or_else(|| Error::Internal("no piece to label".into()))?;
    if !val.is_zero() {
        return Ok(j);
    }
    let mut longest: Option<(Q, usize)> = None;
    for (j, p) in pieces.iter().enumerate() {
        let len = &p.right - &p.left;
        if allowed[j] && longest.as_ref().is_none_or(|(l, _)| &len > l) {
            longest = Some((len, j));
        }
    }
    Ok(longest.unwrap().1)
}

/// Sperner label of the partition of `[lo, 1]` with piece lengths `b`,
/// owned by `owner`: its favourite non-empty piece. Always indexes a piece
/// of positive length.
pub fn sperner_label(vs: &[Valuation], lo: &Q, s: &Q, b: &[Q], owner: usize) -> Result<usize> {
    let allowed: Vec<bool> = b.iter().map(|x| x.is_positive()).collect();
    favourite(&vs[owner], &layout(lo, s, b), &allowed)
}

/// A sub-simplex `{b : b >= corner, sum b = total}` triangulated into Kuhn
/// cells of `grid` steps per side.
struct Window {
    corner: Vec<Q>,
    side: Q,
    grid: i64,
}

impl Window {
    fn point(&self, c: &[i64]) -> Vec<Q> {
        // Cumulative coordinates `c` to piece lengths.
        let n = self.corner.len();
        let step = &self.side / qi(self.grid);
        (0..n)
            .map(|j| {
                let hi = if j + 1 == n { self.grid } else { c[j] };
                let lo = if j == 0 { 0 } else { c[j - 1] };
                &self.corner[j] + &step * qi(hi - lo)
            })
            .collect()
    }
}

struct Cell {
    verts: Vec<Vec<i64>>,
}

/// All Kuhn cells of the order simplex `0 <= c_1 <= ... <= c_m <= grid`.
fn kuhn_cells(m: usize, grid: i64) -> Vec<Cell> {
    let mut perms: Vec<Vec<usize>> = vec![Vec::new()];
    for k in 0..m {
        perms = perms
            .into_iter()
            .flat_map(|p| {
                (0..=k).map(move |pos| {
                    let mut q = p.clone();
                    q.insert(pos, k);
                    q
                })
            })
            .collect();
    }
    let ordered = |c: &[i64]| c.windows(2).all(|w| w[0] <= w[1]) && c.first().is_none_or(|x| *x >= 0);
    let mut cells = Vec::new();
    let mut base = vec![0i64; m];
    loop {
        if ordered(&base) && base.last().is_none_or(|x| *x < grid) {
            for p in &perms {
                let mut verts = vec![base.clone()];
                let mut cur = base.clone();
                let mut ok = true;
                for &axis in p {
                    cur[axis] += 1;
                    if !ordered(&cur) || cur[m - 1] > grid {
                        ok = false;
                        break;
                    }
                    verts.push(cur.clone());
                }
                if ok {
                    cells.push(Cell { verts });
                }
            }
        }
        // Odometer over [0, grid)^m.
        let mut i = 0;
        while i < m {
            base[i] += 1;
            if base[i] < grid {
                break;
            }
            base[i] = 0;
            i += 1;
        }
        if i == m {
            break;
        }
    }
    cells
}

/// A fully labelled cell found in a window, with its barycentre.
struct Found {
    bary: Vec<Q>,
    assignment: Vec<usize>,
    genuine: bool,
}

fn search_window(vs: &[Valuation], lo: &Q, s: &Q, w: &Window, cells: &[Cell]) -> Result<Option<Found>> {
    let n = vs.len();
    // label in the window, and whether it agrees with the global rule
    let mut labels: HashMap<Vec<i64>, (usize, bool)> = HashMap::new();
    let mut label_of = |c: &Vec<i64>| -> Result<(usize, bool)> {
        if let Some(l) = labels.get(c) {
            return Ok(*l);
        }
        let b = w.point(c);
        let owner = (c.iter().sum::<i64>() as usize) % n;
        let pieces = layout(lo, s, &b);
        let step_free: Vec<bool> = (0..n).map(|j| b[j] > w.corner[j]).collect();
        let local = favourite(&vs[owner], &pieces, &step_free)?;
        let nonempty: Vec<bool> = b.iter().map(|x| x.is_positive()).collect();
        let global = favourite(&vs[owner], &pieces, &nonempty)?;
        labels.insert(c.clone(), (local, local == global));
        Ok((local, local == global))
    };
    let mut fallback = None;
    for cell in cells {
        let mut seen = vec![false; n];
        let mut assignment = vec![0; n];
        let mut genuine = true;
        let mut full = true;
        for c in &cell.verts {
            let (l, g) = label_of(c)?;
            if seen[l] {
                full = false;
                break;
            }
            seen[l] = true;
            assignment[(c.iter().sum::<i64>() as usize) % n] = l;
            genuine &= g;
        }
        if !full {
            continue;
        }
        let mut bary = vec![zero(); n];
        for c in &cell.verts {
            for (acc, x) in bary.iter_mut().zip(w.point(c)) {
                *acc += x;
            }
        }
        let bary = bary.into_iter().map(|x| x / qi(n as i64)).collect();
        let found = Found { bary, assignment, genuine };
        if genuine {
            return Ok(Some(found));
        }
        fallback.get_or_insert(found);
    }
    Ok(fallback)
}

fn max_envy(vs: &[Valuation], pieces: &[Interval], assignment: &[usize]) -> Result<Q> {
    let mut worst = zero();
    for (a, v) in vs.iter().enumerate() {
        let own = v.value(&pieces[assignment[a]])?;
        for p in pieces {
            let e = v.value(p)? - &own;
            if e > worst {
                worst = e;
            }
        }
    }
    Ok(worst)
}

fn envy_free_on(vs: &[Valuation], lo: &Q, s: &Q, eps: &Q) -> Result<Vec<Interval>> {
    let n = vs.len();
    let total = one() - lo - s * qi(n as i64 - 1);
    if n == 1 {
        return Ok(layout(lo, s, &[total]));
    }
    let grid: i64 = if n <= 3 { 8 * n as i64 } else { 4 * n as i64 };
    let cells = kuhn_cells(n - 1, grid);
    // Each level shrinks the cell width by grid / (2n) >= 2; the piece
    // values move by at most 2 * max density * width within a cell.
    let max_d = vs.iter().map(|v| v.max_density()).max().unwrap();
    let need = to_f64(&(qi(8) * &max_d * &total / (eps * qi(grid))));
    let depth = need.max(1.0).log2().ceil() as usize;
    let budget = 4 * (depth + 4) + 32;

    let full = |grid_scale: i64| Window { corner: vec![zero(); n], side: total.clone(), grid: grid * grid_scale };
    let mut window = full(1);
    let mut full_scale = 1;
    let mut radius_factor = qi(2);
    let mut last_good: Option<Found> = None;
    for _ in 0..budget {
        let cells_here;
        let cells_ref = if window.grid == grid {
            &cells
        } else {
            cells_here = kuhn_cells(n - 1, window.grid);
            &cells_here
        };
        let found = search_window(vs, lo, s, &window, cells_ref)?
            .ok_or_else(|| Error::Internal("no fully labelled cell".into()))?;
        let h = &window.side / qi(window.grid);
        if !found.genuine {
            // The window boundary forced a label; widen, or fall back to a
            // finer grid on the whole simplex.
            let Some(prev) = &last_good else {
                return Err(Error::Internal("boundary labels on the full simplex".into()));
            };
            radius_factor *= qi(4);
            let r = &h * &radius_factor;
            window = centred(&prev.bary, &r, &total, grid);
            if window.corner.iter().all(|x| x.is_zero()) {
                full_scale *= 2;
                window = full(full_scale);
                radius_factor = qi(2);
            }
            continue;
        }
        let pieces = layout(lo, s, &found.bary);
        if max_envy(vs, &pieces, &found.assignment)? <= *eps {
            let mut out = vec![Interval::new(zero(), zero()); n];
            for (a, &j) in found.assignment.iter().enumerate() {
                out[a] = pieces[j].clone();
            }
            return Ok(out);
        }
        radius_factor = qi(2);
        let r = &h * &radius_factor;
        window = centred(&found.bary, &r, &total, grid);
        last_good = Some(found);
    }
    Err(Error::Internal("envy-free refinement exceeded its depth bound".into()))
}

fn centred(p: &[Q], r: &Q, total: &Q, grid: i64) -> Window {
    let corner: Vec<Q> = p.iter().map(|x| if x > r { x - r } else { zero() }).collect();
    let side = total - corner.iter().sum::<Q>();
    Window { corner, side, grid }
}

/// Exactly `s`-separated cake allocation in which no agent values another
/// piece more than `eps` above its own.
///
/// Labels the vertices of a Kuhn triangulation of the simplex of piece
/// lengths (owner of a vertex: coordinate sum mod n) and looks for a fully
/// labelled cell, then re-triangulates a small window around it, until the
/// barycentre of the cell is `eps`-envy-free.
pub fn envy_free_sperner(vs: &[Valuation], s: &Q, eps: &Q) -> Result<Allocation> {
    check_common(vs, s, eps, Topology::Cake)?;
    let pieces = envy_free_on(vs, &zero(), s, eps)?;
    Ok(Allocation::new(Topology::Cake, s.clone(), pieces))
}

/// Envy-free pie allocation with `[0, s]` as one of the separators.
pub fn envy_free_pie(vs: &[Valuation], s: &Q, eps: &Q) -> Result<Allocation> {
    check_common(vs, s, eps, Topology::Pie)?;
    let cakes: Vec<Valuation> = vs.iter().map(|v| v.with_topology(Topology::Cake)).collect();
    Ok(pie_allocation(s, envy_free_on(&cakes, s, s, eps)?))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FairnessReport {
    #[serde(serialize_with = "ser_q")]
    pub envy_max: Q,
    #[serde(serialize_with = "ser_q")]
    pub equitability_gap: Q,
    pub separation_ok: bool,
    pub exact_separation: bool,
    #[serde(serialize_with = "ser_qs")]
    pub values: Vec<Q>,
    #[serde(serialize_with = "ser_qs")]
    pub mms: Vec<Q>,
    pub mms_dominance: Vec<bool>,
}

fn ser_q<S: serde::Serializer>(x: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_q(x))
}

fn ser_qs<S: serde::Serializer>(xs: &[Q], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(xs.iter().map(fmt_q))
}

/// Exact envy, equitability and separation figures, and whether each agent
/// gets its maximin share (`n` parts on a cake, `n + 1` on a pie).
pub fn fairness_check(alloc: &Allocation, vs: &[Valuation]) -> Result<FairnessReport> {
    let n = alloc.pieces.len();
    if vs.len() != n {
        return Err(Error::Parameter(format!("{} valuations for {n} pieces", vs.len())));
    }
    if vs.iter().any(|v| v.topology() != alloc.topology) {
        return Err(Error::Parameter("valuation topology differs from the allocation".into()));
    }
    let values = alloc.values(vs)?;
    let mut envy_max = zero();
    for (i, v) in vs.iter().enumerate() {
        for p in &alloc.pieces {
            let e = v.value(p)? - &values[i];
            if e > envy_max {
                envy_max = e;
            }
        }
    }
    let equitability_gap = match (values.iter().max(), values.iter().min()) {
        (Some(a), Some(b)) => a - b,
        _ => zero(),
    };
    let mut mms = Vec::with_capacity(n);
    for v in vs {
        let share = match alloc.topology {
            Topology::Cake if &alloc.s * qi(n as i64 - 1) < one() => exact_mms(v, n, &alloc.s)?.0,
            Topology::Pie if &alloc.s * qi(n as i64 + 1) < one() => pie_mms_enum(v, n + 1, &alloc.s)?.0,
            // No partition into that many separated pieces with value.
            _ => zero(),
        };
        mms.push(share);
    }
    let mms_dominance = values.iter().zip(&mms).map(|(x, m)| x >= m).collect();
    Ok(FairnessReport {
        envy_max,
        equitability_gap,
        separation_ok: alloc.is_s_separated(),
        exact_separation: alloc.is_exactly_s_separated(),
        values,
        mms,
        mms_dominance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn worked() -> Valuation {
        Valuation::new(
            Topology::Cake,
            vec![zero(), q(1, 3), q(2, 3), one()],
            vec![q(6, 5), zero(), q(9, 5)],
        )
        .unwrap()
    }

    fn cake_uniform() -> Valuation {
        Valuation::uniform(Topology::Cake)
    }

    #[test]
    fn equitable_uniform_is_exact() {
        let vs = vec![cake_uniform(); 2];
        let (a, trace) = equitable_bisection_traced(&vs, &q(1, 5), &[0, 1], &q(1, 1000)).unwrap();
        assert_eq!(a.pieces, vec![Interval::new(zero(), q(2, 5)), Interval::new(q(3, 5), one())]);
        assert!(leftover_is_monotone(&trace));
    }

    #[test]
    fn equitable_worked_example() {
        let vs = vec![worked(), worked()];
        let eps = q(1, 1_000_000_000);
        let (a, trace) = equitable_bisection_traced(&vs, &q(1, 3), &[0, 1], &eps).unwrap();
        let vals = a.values(&vs).unwrap();
        let lo = vals.iter().min().unwrap();
        assert!(lo <= &q(2, 5) && lo >= &(q(2, 5) - &eps));
        assert!(vals.iter().max().unwrap() - lo <= eps);
        assert!(a.is_exactly_s_separated());
        assert!(leftover_is_monotone(&trace));
    }

    #[test]
    fn equitable_single_and_order() {
        let vs = vec![worked()];
        let a = equitable_bisection(&vs, &q(1, 3), &[0], &q(1, 10)).unwrap();
        assert_eq!(a.pieces, vec![Interval::new(zero(), one())]);
        let vs = vec![worked(), cake_uniform()];
        let a = equitable_bisection(&vs, &q(1, 5), &[1, 0], &q(1, 1000)).unwrap();
        assert_eq!(a.pieces[1].left, zero());
        assert_eq!(a.pieces[0].right, one());
        assert!(equitable_bisection(&vs, &q(1, 5), &[1, 1], &q(1, 1000)).is_err());
    }

    #[test]
    fn monotone_trace_check() {
        let st = |c: i64, l: Option<i64>| BisectionStep { target: q(c, 10), leftover: l.map(|x| q(x, 10)) };
        assert!(leftover_is_monotone(&[st(0, Some(8)), st(5, None), st(2, Some(6))]));
        assert!(!leftover_is_monotone(&[st(0, Some(5)), st(2, Some(6))]));
        assert!(!leftover_is_monotone(&[st(3, None), st(5, Some(1))]));
    }

    #[test]
    fn envy_free_symmetric() {
        let vs = vec![cake_uniform(); 2];
        let a = envy_free_sperner(&vs, &q(1, 5), &q(1, 1_000_000)).unwrap();
        let r = fairness_check(&a, &vs).unwrap();
        assert!(r.envy_max <= q(1, 1_000_000));
        assert!(a.is_exactly_s_separated());
        for p in &a.pieces {
            assert!((&p.right - &p.left - q(2, 5)).abs() <= q(1, 1_000_000));
        }
    }

    #[test]
    fn envy_free_right_lover() {
        let right = Valuation::from_blocks(Topology::Cake, &[(q(4, 5), one(), one())]).unwrap();
        let vs = vec![cake_uniform(), right];
        let eps = q(1, 1_000_000);
        let a = envy_free_sperner(&vs, &q(1, 5), &eps).unwrap();
        assert_eq!(a.pieces[1].right, one());
        let r = fairness_check(&a, &vs).unwrap();
        assert!(r.envy_max <= eps);
    }

    #[test]
    fn envy_free_three_agents() {
        let vs = vec![worked(), cake_uniform(), worked().flip().unwrap()];
        let eps = q(1, 1_000_000);
        let s = q(1, 10);
        let a = envy_free_sperner(&vs, &s, &eps).unwrap();
        let r = fairness_check(&a, &vs).unwrap();
        assert!(r.envy_max <= eps);
        assert!(r.exact_separation);
        for (i, v) in vs.iter().enumerate() {
            assert!(r.values[i] >= exact_mms(v, 3, &s).unwrap().0 - &eps);
        }
    }

    #[test]
    fn labels_index_nonempty_pieces() {
        let vs = vec![worked(), cake_uniform(), cake_uniform()];
        let b = vec![zero(), q(4, 5), zero()];
        for owner in 0..3 {
            assert_eq!(sperner_label(&vs, &zero(), &q(1, 10), &b, owner).unwrap(), 1);
        }
    }

    #[test]
    fn kuhn_cell_counts() {
        assert_eq!(kuhn_cells(1, 5).len(), 5);
        assert_eq!(kuhn_cells(2, 4).len(), 16);
        assert_eq!(kuhn_cells(3, 3).len(), 27);
    }

    #[test]
    fn report_examples() {
        let vs = vec![cake_uniform(); 2];
        let a = Allocation::new(
            Topology::Cake,
            q(1, 5),
            vec![Interval::new(zero(), q(2, 5)), Interval::new(q(3, 5), one())],
        );
        let r = fairness_check(&a, &vs).unwrap();
        assert_eq!((r.envy_max.clone(), r.equitability_gap.clone()), (zero(), zero()));
        assert!(r.separation_ok && r.exact_separation);

        let vs = vec![worked(), worked()];
        let a = Allocation::new(
            Topology::Cake,
            q(1, 3),
            vec![Interval::new(zero(), q(1, 3)), Interval::new(q(2, 3), one())],
        );
        let r = fairness_check(&a, &vs).unwrap();
        assert_eq!(r.envy_max, q(1, 5));
        assert_eq!(r.equitability_gap, q(1, 5));
        assert!(r.separation_ok);
        assert_eq!(r.mms_dominance, vec![true, true]);
        assert!(fairness_check(&a, &vs[..1]).is_err());
    }

    #[test]
    fn pie_wrappers() {
        let vs = vec![Valuation::uniform(Topology::Pie); 2];
        let eps = q(1, 1000);
        let a = equitable_pie(&vs, &q(1, 10), &[0, 1], &eps).unwrap();
        let r = fairness_check(&a, &vs).unwrap();
        assert!(r.equitability_gap <= eps && r.exact_separation);
        let a = envy_free_pie(&vs, &q(1, 10), &eps).unwrap();
        let r = fairness_check(&a, &vs).unwrap();
        assert!(r.envy_max <= eps && r.exact_separation);
    }
}
