//! Exact rational linear programming (dense two-phase simplex, Bland's
//! rule) and the chain programs that price a fixed assignment of piece
//! endpoints to density segments.

use crate::error::{Error, Result};
use crate::rational::{one, zero, Q};
use crate::valuation::Valuation;
use num::{Signed, Zero};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cmp {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub coeffs: Vec<Q>,
    pub cmp: Cmp,
    pub rhs: Q,
}

/// Maximize `objective . x` subject to the constraints and `x >= 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearProgram {
    pub num_vars: usize,
    pub objective: Vec<Q>,
    pub constraints: Vec<Constraint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpOutcome {
    pub status: LpStatus,
    pub objective: Q,
    pub x: Vec<Q>,
}

impl LinearProgram {
    pub fn new(num_vars: usize, objective: Vec<Q>) -> Self {
        LinearProgram { num_vars, objective, constraints: Vec::new() }
    }

    pub fn add(&mut self, coeffs: Vec<Q>, cmp: Cmp, rhs: Q) {
        debug_assert_eq!(coeffs.len(), self.num_vars);
        self.constraints.push(Constraint { coeffs, cmp, rhs });
    }

    /// Whether `x` satisfies every constraint exactly.
    pub fn is_feasible(&self, x: &[Q]) -> bool {
        x.len() == self.num_vars
            && x.iter().all(|v| !v.is_negative())
            && self.constraints.iter().all(|c| {
                let lhs: Q = c.coeffs.iter().zip(x).map(|(a, b)| a * b).sum();
                match c.cmp {
                    Cmp::Le => lhs <= c.rhs,
                    Cmp::Eq => lhs == c.rhs,
                    Cmp::Ge => lhs >= c.rhs,
                }
            })
    }

    pub fn solve(&self) -> Result<LpOutcome> {
        Tableau::build(self).solve(self)
    }
}

struct Tableau {
    rows: Vec<Vec<Q>>,
    basis: Vec<usize>,
    /// Columns: structural, then slack/surplus, then artificial.
    n_struct: usize,
    first_art: usize,
    width: usize,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let m = lp.constraints.len();
        let n = lp.num_vars;
        let mut norm: Vec<(Vec<Q>, Cmp, Q)> = lp
            .constraints
            .iter()
            .map(|c| {
                if c.rhs.is_negative() {
                    let flipped = match c.cmp {
                        Cmp::Le => Cmp::Ge,
                        Cmp::Ge => Cmp::Le,
                        Cmp::Eq => Cmp::Eq,
                    };
                    (c.coeffs.iter().map(|a| -a).collect(), flipped, -&c.rhs)
                } else {
                    (c.coeffs.clone(), c.cmp, c.rhs.clone())
                }
            })
            .collect();
        let n_slack = norm.iter().filter(|c| c.1 != Cmp::Eq).count();
        let n_art = norm.iter().filter(|c| c.1 != Cmp::Le).count();
        let first_art = n + n_slack;
        let width = first_art + n_art;
        let mut rows = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        let (mut si, mut ai) = (n, first_art);
        for (coeffs, cmp, rhs) in norm.drain(..) {
            let mut row = coeffs;
            row.resize(width + 1, zero());
            match cmp {
                Cmp::Le => {
                    row[si] = one();
                    basis.push(si);
                    si += 1;
                }
                Cmp::Ge => {
                    row[si] = -one();
                    si += 1;
                    row[ai] = one();
                    basis.push(ai);
                    ai += 1;
                }
                Cmp::Eq => {
                    row[ai] = one();
                    basis.push(ai);
                    ai += 1;
                }
            }
            row[width] = rhs;
            rows.push(row);
        }
        Tableau { rows, basis, n_struct: n, first_art, width }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        if p != one() {
            for v in self.rows[r].iter_mut() {
                if !v.is_zero() {
                    *v /= &p;
                }
            }
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (j, pv) in pivot_row.iter().enumerate() {
                if !pv.is_zero() {
                    row[j] -= &f * pv;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Maximizes `cost . x` over columns `< limit`. Returns `false` if
    /// unbounded.
    fn optimize(&mut self, cost: &[Q], limit: usize) -> bool {
        loop {
            let mut entering = None;
            for j in 0..limit {
                if self.basis.contains(&j) {
                    continue;
                }
                let mut d = cost[j].clone();
                for (i, row) in self.rows.iter().enumerate() {
                    if !row[j].is_zero() {
                        d -= &cost[self.basis[i]] * &row[j];
                    }
                }
                if d.is_positive() {
                    entering = Some(j);
                    break;
                }
            }
            let Some(c) = entering else {
                return true;
            };
            let mut leave: Option<(usize, Q)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if row[c].is_positive() {
                    let ratio = &row[self.width] / &row[c];
                    let better = match &leave {
                        None => true,
                        Some((li, lr)) => ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li]),
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let Some((r, _)) = leave else {
                return false;
            };
            self.pivot(r, c);
        }
    }

    fn solve(mut self, lp: &LinearProgram) -> Result<LpOutcome> {
        let infeasible = || LpOutcome { status: LpStatus::Infeasible, objective: zero(), x: Vec::new() };
        if self.first_art < self.width {
            let mut cost = vec![zero(); self.width];
            for c in cost.iter_mut().skip(self.first_art) {
                *c = -one();
            }
            self.optimize(&cost, self.width);
            let art_sum: Q = self
                .basis
                .iter()
                .enumerate()
                .filter(|(_, &b)| b >= self.first_art)
                .map(|(i, _)| self.rows[i][self.width].clone())
                .sum();
            if art_sum.is_positive() {
                return Ok(infeasible());
            }
            // Drive zero-level artificials out of the basis, dropping
            // redundant rows.
            let mut i = 0;
            while i < self.rows.len() {
                if self.basis[i] >= self.first_art {
                    match (0..self.first_art).find(|&j| !self.rows[i][j].is_zero()) {
                        Some(j) => {
                            self.pivot(i, j);
                            i += 1;
                        }
                        None => {
                            self.rows.remove(i);
                            self.basis.remove(i);
                        }
                    }
                } else {
                    i += 1;
                }
            }
        }
        let mut cost = vec![zero(); self.width];
        cost[..self.n_struct].clone_from_slice(&lp.objective);
        if !self.optimize(&cost, self.first_art) {
            return Err(Error::Internal("unbounded linear program".into()));
        }
        let mut x = vec![zero(); self.n_struct];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < self.n_struct {
                x[b] = self.rows[i][self.width].clone();
            }
        }
        let objective = lp.objective.iter().zip(&x).map(|(a, b)| a * b).sum();
        if !lp.is_feasible(&x) {
            return Err(Error::Internal("simplex produced an infeasible point".into()));
        }
        Ok(LpOutcome { status: LpStatus::Optimal, objective, x })
    }
}

/// Breakpoints, densities and prefix values, unrolled twice around the
/// circle for pies. Segment `j` (1-based) is `[p_{j-1}, p_j]`.
#[derive(Debug, Clone)]
pub struct Segments {
    pub p: Vec<Q>,
    pub gamma: Vec<Q>,
    pub w: Vec<Q>,
}

impl Segments {
    pub fn cake(v: &Valuation) -> Self {
        let mut gamma = vec![zero()];
        gamma.extend(v.densities().iter().cloned());
        Segments { p: v.breakpoints().to_vec(), gamma, w: v.prefix_values().to_vec() }
    }

    pub fn pie_unrolled(v: &Valuation) -> Self {
        let d = v.pieces();
        let mut s = Self::cake(v);
        for j in 1..=d {
            s.p.push(&v.breakpoints()[j] + one());
            s.gamma.push(v.densities()[j - 1].clone());
            s.w.push(&v.prefix_values()[j] + one());
        }
        s
    }

    /// Number of segments.
    pub fn len(&self) -> usize {
        self.p.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn lo(&self, j: usize) -> &Q {
        &self.p[j - 1]
    }

    pub fn hi(&self, j: usize) -> &Q {
        &self.p[j]
    }

    /// `v(a, b)` for `a` in segment `l` and `b` in segment `r >= l`, as
    /// `(coef_a, coef_b, constant)`.
    fn linear_value(&self, l: usize, r: usize) -> (Q, Q, Q) {
        if l == r {
            (-&self.gamma[l], self.gamma[l].clone(), zero())
        } else {
            let k = &self.gamma[l] * &self.p[l] + &self.w[r - 1] - &self.w[l] - &self.gamma[r] * &self.p[r - 1];
            (-&self.gamma[l], self.gamma[r].clone(), k)
        }
    }
}

/// Interval assignment `(l(q), r(q))`, 1-based segment indices.
pub type IntervalList = Vec<(usize, usize)>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ChainStart {
    /// The first piece starts at this point.
    At(Q),
    /// The first piece starts at a free point `theta` of segment `l(1)`
    /// (pie), and the last piece ends at `theta + 1 - s`.
    Wrap,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ChainEnd {
    At(Q),
    AtMost(Q),
}

/// `max c` over partitions whose `q`-th piece `[a_q, b_q]` has `a_q` in
/// segment `l(q)` and `b_q` in segment `r(q)`, with `a_{q+1} = b_q + s`
/// and every piece worth at least `c`.
#[derive(Debug, Clone)]
pub struct LpInstance<'a> {
    pub segs: &'a Segments,
    pub s: Q,
    pub list: IntervalList,
    pub start: ChainStart,
    pub end: ChainEnd,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub objective: Q,
    /// `x_0, ..., x_k` with `x_0 = a_1 - s` and `x_q = b_q`.
    pub cut_points: Vec<Q>,
}

impl LpSolution {
    fn infeasible() -> Self {
        LpSolution { status: LpStatus::Infeasible, objective: zero(), cut_points: Vec::new() }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }

    /// Pieces `[x_{q-1} + s, x_q]`.
    pub fn pieces(&self, s: &Q) -> Vec<(Q, Q)> {
        self.cut_points.windows(2).map(|w| (&w[0] + s, w[1].clone())).collect()
    }
}

/// A chain point: `offset`, plus free variable `var` if present.
#[derive(Clone)]
struct Pt {
    var: Option<usize>,
    off: Q,
}

impl<'a> LpInstance<'a> {
    pub fn solve(&self) -> Result<LpSolution> {
        let k = self.list.len();
        let segs = self.segs;
        if k == 0 {
            return Err(Error::Parameter("empty interval list".into()));
        }
        if self.list.iter().any(|&(l, r)| l == 0 || r > segs.len() || l > r)
            || self.list.windows(2).any(|w| w[0].1 > w[1].0)
        {
            return Err(Error::Parameter("interval list is not monotone".into()));
        }
        // Variables: free piece ends b_q, then theta; bounds collected below.
        let mut bounds: Vec<(Q, Q)> = Vec::new();
        let domain = (segs.p[0].clone(), segs.p[segs.len()].clone());
        let fresh = |bounds: &mut Vec<(Q, Q)>| {
            bounds.push(domain.clone());
            bounds.len() - 1
        };
        let theta = match self.start {
            ChainStart::Wrap => Some(fresh(&mut bounds)),
            ChainStart::At(_) => None,
        };
        let mut ends: Vec<Pt> = Vec::with_capacity(k);
        for q in 0..k {
            let last = q + 1 == k;
            let pt = match (&self.start, &self.end, last) {
                (ChainStart::Wrap, _, true) => Pt { var: theta, off: one() - &self.s },
                (_, ChainEnd::At(t), true) => Pt { var: None, off: t.clone() },
                _ => Pt { var: Some(fresh(&mut bounds)), off: zero() },
            };
            ends.push(pt);
        }
        let first = match &self.start {
            ChainStart::At(a) => Pt { var: None, off: a.clone() },
            ChainStart::Wrap => Pt { var: theta, off: zero() },
        };
        let starts: Vec<Pt> = std::iter::once(first)
            .chain(ends[..k - 1].iter().map(|b| Pt { var: b.var, off: &b.off + &self.s }))
            .collect();

        // Restrict a point to [lo, hi]: tighten its variable or check the constant.
        let restrict = |bounds: &mut Vec<(Q, Q)>, pt: &Pt, lo: &Q, hi: &Q| -> bool {
            match pt.var {
                None => &pt.off >= lo && &pt.off <= hi,
                Some(v) => {
                    let (bl, bh) = &mut bounds[v];
                    let l = lo - &pt.off;
                    let h = hi - &pt.off;
                    if l > *bl {
                        *bl = l;
                    }
                    if h < *bh {
                        *bh = h;
                    }
                    true
                }
            }
        };
        let mut ok = true;
        for q in 0..k {
            let (l, r) = self.list[q];
            ok &= restrict(&mut bounds, &starts[q], segs.lo(l), segs.hi(l));
            ok &= restrict(&mut bounds, &ends[q], segs.lo(r), segs.hi(r));
        }
        if let Some(t) = theta {
            ok &= restrict(&mut bounds, &Pt { var: Some(t), off: zero() }, &zero(), &one());
        }
        if let ChainEnd::AtMost(t) = &self.end {
            ok &= restrict(&mut bounds, &ends[k - 1], &segs.p[0], t);
        }
        if !ok || bounds.iter().any(|(l, h)| l > h) {
            return Ok(LpSolution::infeasible());
        }

        // Shift every variable to y = x - lower >= 0; column `nv` is c.
        let nv = bounds.len();
        let mut lp = LinearProgram::new(nv + 1, {
            let mut o = vec![zero(); nv + 1];
            o[nv] = one();
            o
        });
        for (v, (l, h)) in bounds.iter().enumerate() {
            let mut row = vec![zero(); nv + 1];
            row[v] = one();
            lp.add(row, Cmp::Le, h - l);
        }
        // Value of a point as (column, coefficient) plus constant in y-space.
        let shifted = |pt: &Pt| -> (Option<usize>, Q) {
            match pt.var {
                None => (None, pt.off.clone()),
                Some(v) => (Some(v), &pt.off + &bounds[v].0),
            }
        };
        for q in 0..k {
            let (l, r) = self.list[q];
            let (va, ka) = shifted(&starts[q]);
            let (vb, kb) = shifted(&ends[q]);
            // ca*a + cb*b + k >= c  <=>  c - ca*ya - cb*yb <= ca*ka + cb*kb + k
            let (ca, cb, k0) = segs.linear_value(l, r);
            let mut row = vec![zero(); nv + 1];
            row[nv] = one();
            if let Some(v) = va {
                row[v] -= &ca;
            }
            if let Some(v) = vb {
                row[v] -= &cb;
            }
            lp.add(row, Cmp::Le, &ca * &ka + &cb * &kb + k0);
            if l == r {
                // a <= b  <=>  ya - yb <= kb - ka
                let mut row = vec![zero(); nv + 1];
                if let Some(v) = va {
                    row[v] += one();
                }
                if let Some(v) = vb {
                    row[v] -= one();
                }
                if va.is_none() && vb.is_none() {
                    if ka > kb {
                        return Ok(LpSolution::infeasible());
                    }
                } else {
                    lp.add(row, Cmp::Le, &kb - &ka);
                }
            }
        }
        let out = lp.solve()?;
        if out.status == LpStatus::Infeasible {
            return Ok(LpSolution::infeasible());
        }
        let point = |pt: &Pt| -> Q {
            match pt.var {
                None => pt.off.clone(),
                Some(v) => &pt.off + &bounds[v].0 + &out.x[v],
            }
        };
        let mut cut_points = vec![point(&starts[0]) - &self.s];
        cut_points.extend(ends.iter().map(point));
        Ok(LpSolution { status: LpStatus::Optimal, objective: out.x[nv].clone(), cut_points })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};
    use crate::valuation::Topology;

    #[test]
    fn generic_lp_examples() {
        // max c, c <= 1, x fixed at 1/2
        let mut lp = LinearProgram::new(2, vec![qi(0), qi(1)]);
        lp.add(vec![qi(0), qi(1)], Cmp::Le, qi(1));
        lp.add(vec![qi(1), qi(0)], Cmp::Eq, q(1, 2));
        let out = lp.solve().unwrap();
        assert_eq!(out.status, LpStatus::Optimal);
        assert_eq!(out.objective, qi(1));
        assert_eq!(out.x, vec![q(1, 2), qi(1)]);

        let mut lp = LinearProgram::new(1, vec![qi(1)]);
        lp.add(vec![qi(1)], Cmp::Le, q(1, 3));
        lp.add(vec![qi(1)], Cmp::Ge, q(1, 2));
        assert_eq!(lp.solve().unwrap().status, LpStatus::Infeasible);

        let mut lp = LinearProgram::new(1, vec![qi(1)]);
        lp.add(vec![qi(1)], Cmp::Ge, qi(0));
        assert!(matches!(lp.solve(), Err(Error::Internal(_))));
    }

    #[test]
    fn degenerate_and_redundant_rows() {
        // max x + y, x + y = 1 (twice), x - y >= 0, y >= 1/4
        let mut lp = LinearProgram::new(2, vec![qi(1), qi(1)]);
        lp.add(vec![qi(1), qi(1)], Cmp::Eq, qi(1));
        lp.add(vec![qi(2), qi(2)], Cmp::Eq, qi(2));
        lp.add(vec![qi(1), qi(-1)], Cmp::Ge, qi(0));
        lp.add(vec![qi(0), qi(1)], Cmp::Ge, q(1, 4));
        let out = lp.solve().unwrap();
        assert_eq!(out.objective, qi(1));
        assert!(lp.is_feasible(&out.x));
    }

    #[test]
    fn uniform_two_pieces() {
        let v = Valuation::uniform(Topology::Cake);
        let segs = Segments::cake(&v);
        let lp = LpInstance {
            segs: &segs,
            s: q(1, 5),
            list: vec![(1, 1), (1, 1)],
            start: ChainStart::At(qi(0)),
            end: ChainEnd::At(qi(1)),
        };
        let sol = lp.solve().unwrap();
        assert_eq!(sol.objective, q(2, 5));
        assert_eq!(sol.cut_points, vec![q(-1, 5), q(2, 5), qi(1)]);
    }

    #[test]
    fn worked_example_list() {
        let v = Valuation::new(
            Topology::Cake,
            vec![qi(0), q(1, 3), q(2, 3), qi(1)],
            vec![q(6, 5), qi(0), q(9, 5)],
        )
        .unwrap();
        let segs = Segments::cake(&v);
        let mk = |list: IntervalList| LpInstance {
            segs: &segs,
            s: q(1, 3),
            list,
            start: ChainStart::At(qi(0)),
            end: ChainEnd::At(qi(1)),
        };
        assert_eq!(mk(vec![(1, 2), (3, 3)]).solve().unwrap().objective, q(2, 5));
        assert_eq!(mk(vec![(1, 1), (2, 3)]).solve().unwrap().objective, q(2, 5));
        assert!(!mk(vec![(1, 1), (1, 1)]).solve().unwrap().is_optimal());
    }

    #[test]
    fn pie_wrap_chain() {
        let v = Valuation::uniform(Topology::Pie);
        let segs = Segments::pie_unrolled(&v);
        let lp = LpInstance {
            segs: &segs,
            s: q(1, 5),
            list: vec![(1, 1), (1, 2)],
            start: ChainStart::Wrap,
            end: ChainEnd::At(qi(0)),
        };
        let sol = lp.solve().unwrap();
        assert_eq!(sol.objective, q(3, 10));
    }
}
