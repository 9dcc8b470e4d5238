//! Dense bounded-variable dual simplex on a compact tableau.
//!
//! Every row `i` gets an activity variable `r_i` with `Σ a_ik x_k - r_i = 0`;
//! the relation and right-hand side become bounds on `r_i`. The tableau
//! stores `x_B = T x_N` for the `m` basic variables in terms of the
//! nonbasic ones, so its width is always the number of structural variables.
//! Starting from the all-slack basis, each structural sits at the bound
//! matching the sign of its cost, which makes the start dual feasible.

use std::time::{Duration, Instant};

use super::{relative_gap, MipModel, Relation, Sense, SolveResult, SolveStatus};
use crate::error::{Error, Result};

pub(crate) const FEAS_TOL: f64 = 1e-7;
pub(crate) const PIVOT_TOL: f64 = 1e-9;
const DUAL_TOL: f64 = 1e-9;
/// Stand-in value for a nonbasic variable resting at an infinite bound.
const BIG: f64 = 1e7;
const BLAND_AFTER: usize = 1000;
const REFACTOR_EVERY: usize = 100;
const RESIDUAL_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Slot {
    Basic(usize),
    Nonbasic(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum LpOutcome {
    Optimal,
    Infeasible,
    Unbounded,
    TimeLimit,
}

fn row_bounds(relation: Relation, rhs: f64) -> (f64, f64) {
    match relation {
        Relation::Le => (f64::NEG_INFINITY, rhs),
        Relation::Ge => (rhs, f64::INFINITY),
        Relation::Eq => (rhs, rhs),
    }
}

/// Merges duplicate variables and drops zero coefficients.
pub(crate) fn merge_terms(terms: impl IntoIterator<Item = (usize, f64)>) -> Vec<(usize, f64)> {
    let mut v: Vec<(usize, f64)> = terms.into_iter().collect();
    v.sort_by_key(|t| t.0);
    let mut out: Vec<(usize, f64)> = Vec::with_capacity(v.len());
    for (k, a) in v {
        match out.last_mut() {
            Some(last) if last.0 == k => last.1 += a,
            _ => out.push((k, a)),
        }
    }
    out.retain(|t| t.1 != 0.0);
    out
}

pub(crate) struct DualSimplex {
    nstruct: usize,
    lower: Vec<f64>,
    upper: Vec<f64>,
    cost: Vec<f64>,
    rows: Vec<Vec<(usize, f64)>>,
    basis: Vec<usize>,
    nonbasic: Vec<usize>,
    slot: Vec<Slot>,
    at_upper: Vec<bool>,
    tab: Vec<f64>,
    xb: Vec<f64>,
    d: Vec<f64>,
    pub(crate) pivots: u64,
}

impl DualSimplex {
    /// Builds the all-slack basis for `model` minimizing `cost · x`.
    pub(crate) fn new(model: &MipModel, cost: &[f64]) -> Self {
        let nstruct = model.num_variables();
        let mut lp = DualSimplex {
            nstruct,
            lower: model.variables().iter().map(|v| v.lower).collect(),
            upper: model.variables().iter().map(|v| v.upper).collect(),
            cost: cost.to_vec(),
            rows: Vec::new(),
            basis: Vec::new(),
            nonbasic: (0..nstruct).collect(),
            slot: (0..nstruct).map(Slot::Nonbasic).collect(),
            at_upper: vec![false; nstruct],
            tab: Vec::new(),
            xb: Vec::new(),
            d: cost.to_vec(),
            pivots: 0,
        };
        for c in model.constraints() {
            let terms = merge_terms(c.terms.iter().map(|&(v, a)| (v.0, a)));
            lp.add_row(&terms, c.relation, c.rhs);
        }
        lp.place_nonbasic();
        lp.compute_xb();
        lp
    }

    fn width(&self) -> usize {
        self.nstruct
    }

    /// Appends a row; its activity variable enters the basis, so dual
    /// feasibility is kept and the next [`run`](Self::run) warm-starts.
    pub(crate) fn add_row(&mut self, terms: &[(usize, f64)], relation: Relation, rhs: f64) {
        let w = self.width();
        let mut row = vec![0.0; w];
        for &(k, a) in terms {
            match self.slot[k] {
                Slot::Nonbasic(c) => row[c] += a,
                Slot::Basic(r) => {
                    let src = &self.tab[r * w..(r + 1) * w];
                    for (x, y) in row.iter_mut().zip(src) {
                        *x += a * y;
                    }
                }
            }
        }
        let var = self.lower.len();
        let (lo, hi) = row_bounds(relation, rhs);
        self.lower.push(lo);
        self.upper.push(hi);
        self.cost.push(0.0);
        self.at_upper.push(false);
        self.slot.push(Slot::Basic(self.basis.len()));
        self.basis.push(var);
        self.rows.push(terms.to_vec());
        self.tab.extend_from_slice(&row);
        let value = self.value_of_row(&row);
        self.xb.push(value);
    }

    pub(crate) fn set_bounds(&mut self, var: usize, lower: f64, upper: f64) {
        self.lower[var] = lower;
        self.upper[var] = upper;
    }

    pub(crate) fn bounds(&self, var: usize) -> (f64, f64) {
        (self.lower[var], self.upper[var])
    }

    fn nb_value(&self, var: usize) -> f64 {
        if self.at_upper[var] {
            if self.upper[var].is_finite() {
                self.upper[var]
            } else {
                BIG
            }
        } else if self.lower[var].is_finite() {
            self.lower[var]
        } else {
            -BIG
        }
    }

    fn at_artificial(&self, var: usize) -> bool {
        if self.at_upper[var] {
            !self.upper[var].is_finite()
        } else {
            !self.lower[var].is_finite()
        }
    }

    /// Puts every nonbasic variable on the bound its reduced cost asks for.
    fn place_nonbasic(&mut self) {
        for c in 0..self.width() {
            let var = self.nonbasic[c];
            let (lo, hi) = (self.lower[var], self.upper[var]);
            let dc = self.d[c];
            self.at_upper[var] = if lo == hi || dc > DUAL_TOL {
                false
            } else if dc < -DUAL_TOL {
                true
            } else if self.at_upper[var] {
                hi.is_finite() || !lo.is_finite()
            } else {
                !lo.is_finite() && hi.is_finite()
            };
        }
    }

    fn nonbasic_values(&self) -> Vec<f64> {
        self.nonbasic.iter().map(|&v| self.nb_value(v)).collect()
    }

    fn value_of_row(&self, row: &[f64]) -> f64 {
        row.iter()
            .zip(&self.nonbasic)
            .map(|(t, &v)| if *t == 0.0 { 0.0 } else { t * self.nb_value(v) })
            .sum()
    }

    fn compute_xb(&mut self) {
        let w = self.width();
        let xn = self.nonbasic_values();
        let nz: Vec<(usize, f64)> = xn.iter().copied().enumerate().filter(|t| t.1 != 0.0).collect();
        for r in 0..self.basis.len() {
            let row = &self.tab[r * w..(r + 1) * w];
            self.xb[r] = nz.iter().map(|&(c, x)| row[c] * x).sum();
        }
    }

    fn compute_d(&mut self) {
        let w = self.width();
        for c in 0..w {
            self.d[c] = self.cost[self.nonbasic[c]];
        }
        for r in 0..self.basis.len() {
            let cb = self.cost[self.basis[r]];
            if cb == 0.0 {
                continue;
            }
            let row = &self.tab[r * w..(r + 1) * w];
            for (d, t) in self.d.iter_mut().zip(row) {
                *d += cb * t;
            }
        }
    }

    fn scaled_infeasibility(&self, r: usize) -> (f64, bool) {
        let var = self.basis[r];
        let x = self.xb[r];
        let (lo, hi) = (self.lower[var], self.upper[var]);
        if x < lo {
            let gap = lo - x;
            if gap > FEAS_TOL * (1.0 + lo.abs()) {
                return (gap / (1.0 + lo.abs()), true);
            }
        } else if x > hi {
            let gap = x - hi;
            if gap > FEAS_TOL * (1.0 + hi.abs()) {
                return (gap / (1.0 + hi.abs()), false);
            }
        }
        (0.0, false)
    }

    fn select_leaving(&self, bland: bool) -> Option<(usize, bool)> {
        let mut best: Option<(usize, bool, f64)> = None;
        for r in 0..self.basis.len() {
            let (inf, to_lower) = self.scaled_infeasibility(r);
            if inf <= 0.0 {
                continue;
            }
            let better = match best {
                None => true,
                Some((br, _, bi)) => {
                    if bland {
                        self.basis[r] < self.basis[br]
                    } else {
                        inf > bi
                    }
                }
            };
            if better {
                best = Some((r, to_lower, inf));
            }
        }
        best.map(|(r, t, _)| (r, t))
    }

    /// Dual ratio test on row `r`; `to_lower` means the leaving variable
    /// sits below its lower bound and must increase.
    fn select_entering(&self, r: usize, to_lower: bool, bland: bool) -> Option<usize> {
        let w = self.width();
        let row = &self.tab[r * w..(r + 1) * w];
        let candidates: Vec<(usize, f64, f64)> = (0..w)
            .filter_map(|c| {
                let var = self.nonbasic[c];
                if self.lower[var] == self.upper[var] {
                    return None;
                }
                let alpha = row[c];
                if alpha.abs() <= PIVOT_TOL {
                    return None;
                }
                let up = self.at_upper[var];
                let moves_right = if to_lower {
                    (!up && alpha > 0.0) || (up && alpha < 0.0)
                } else {
                    (!up && alpha < 0.0) || (up && alpha > 0.0)
                };
                if !moves_right {
                    return None;
                }
                let dj = if up { (-self.d[c]).max(0.0) } else { self.d[c].max(0.0) };
                Some((c, dj, alpha.abs()))
            })
            .collect();
        if candidates.is_empty() {
            return None;
        }
        if bland {
            let min = candidates.iter().map(|t| t.1 / t.2).fold(f64::INFINITY, f64::min);
            return candidates
                .iter()
                .filter(|t| t.1 / t.2 <= min + 1e-12)
                .min_by_key(|t| self.nonbasic[t.0])
                .map(|t| t.0);
        }
        let theta_max = candidates
            .iter()
            .map(|t| (t.1 + DUAL_TOL) / t.2)
            .fold(f64::INFINITY, f64::min);
        candidates
            .iter()
            .filter(|t| t.1 / t.2 <= theta_max)
            .fold(None::<(usize, f64)>, |acc, t| match acc {
                Some((_, a)) if a >= t.2 => acc,
                _ => Some((t.0, t.2)),
            })
            .map(|t| t.0)
    }

    fn pivot(&mut self, r: usize, c: usize, to_lower: bool) {
        let w = self.width();
        let alpha = self.tab[r * w + c];
        let inv = 1.0 / alpha;
        {
            let prow = &mut self.tab[r * w..(r + 1) * w];
            for x in prow.iter_mut() {
                *x *= -inv;
            }
            prow[c] = inv;
        }
        let prow: Vec<f64> = self.tab[r * w..(r + 1) * w].to_vec();
        let nz: Vec<(usize, f64)> = prow
            .iter()
            .copied()
            .enumerate()
            .filter(|&(j, v)| j != c && v != 0.0)
            .collect();
        for i in 0..self.basis.len() {
            if i == r {
                continue;
            }
            let f = self.tab[i * w + c];
            if f == 0.0 {
                continue;
            }
            let row = &mut self.tab[i * w..(i + 1) * w];
            for &(j, v) in &nz {
                row[j] += f * v;
            }
            row[c] = f * inv;
        }
        let dc = self.d[c];
        if dc != 0.0 {
            for &(j, v) in &nz {
                self.d[j] += dc * v;
            }
        }
        self.d[c] = dc * inv;

        let leaving = self.basis[r];
        let entering = self.nonbasic[c];
        self.basis[r] = entering;
        self.nonbasic[c] = leaving;
        self.slot[entering] = Slot::Basic(r);
        self.slot[leaving] = Slot::Nonbasic(c);
        self.at_upper[leaving] = !to_lower;
        self.pivots += 1;
    }

    /// Rebuilds the tableau from the original rows for the current basis.
    ///
    /// With `k` structural variables basic, exactly `k` row activities are
    /// nonbasic; those rows determine the basic structurals through a `k×k`
    /// system, and every basic row activity follows by substitution.
    fn refactor(&mut self) -> Result<()> {
        let w = self.width();
        let nrows = self.basis.len();
        let sb: Vec<usize> = self.basis.iter().copied().filter(|&v| v < self.nstruct).collect();
        let rn: Vec<usize> = self
            .nonbasic
            .iter()
            .copied()
            .filter(|&v| v >= self.nstruct)
            .map(|v| v - self.nstruct)
            .collect();
        let k = sb.len();
        if rn.len() != k {
            return Err(Error::NumericalFailure("basis size mismatch".into()));
        }
        let mut pos_in_sb = vec![usize::MAX; self.nstruct];
        for (b, &v) in sb.iter().enumerate() {
            pos_in_sb[v] = b;
        }
        // K[a][b] = coefficient of sb[b] in row rn[a]
        let mut kmat = vec![0.0; k * k];
        for (a, &i) in rn.iter().enumerate() {
            for &(v, coef) in &self.rows[i] {
                if pos_in_sb[v] != usize::MAX {
                    kmat[a * k + pos_in_sb[v]] += coef;
                }
            }
        }
        let kinv = invert(kmat, k).ok_or_else(|| Error::NumericalFailure("singular basis".into()))?;

        // rhs[a][c]: row rn[a] gives Σ_b K[a][b] x_sb[b] = r_rn[a] - Σ_{nonbasic struct} a x
        let mut rhs = vec![0.0; k * w];
        for (a, &i) in rn.iter().enumerate() {
            if let Slot::Nonbasic(c) = self.slot[self.nstruct + i] {
                rhs[a * w + c] += 1.0;
            }
            for &(v, coef) in &self.rows[i] {
                if let Slot::Nonbasic(c) = self.slot[v] {
                    rhs[a * w + c] -= coef;
                }
            }
        }
        let mut tsb = vec![0.0; k * w];
        for b in 0..k {
            for a in 0..k {
                let f = kinv[b * k + a];
                if f == 0.0 {
                    continue;
                }
                for c in 0..w {
                    tsb[b * w + c] += f * rhs[a * w + c];
                }
            }
        }
        let mut tab = vec![0.0; nrows * w];
        for r in 0..nrows {
            let var = self.basis[r];
            let out = &mut tab[r * w..(r + 1) * w];
            if var < self.nstruct {
                out.copy_from_slice(&tsb[pos_in_sb[var] * w..(pos_in_sb[var] + 1) * w]);
                continue;
            }
            for &(v, coef) in &self.rows[var - self.nstruct] {
                match self.slot[v] {
                    Slot::Nonbasic(c) => out[c] += coef,
                    Slot::Basic(_) => {
                        let b = pos_in_sb[v];
                        for (o, t) in out.iter_mut().zip(&tsb[b * w..(b + 1) * w]) {
                            *o += coef * t;
                        }
                    }
                }
            }
        }
        self.tab = tab;
        self.compute_d();
        self.compute_xb();
        Ok(())
    }

    /// Largest scaled residual `|a_i·x - r_i|` of the original rows.
    fn residual(&self) -> f64 {
        let x = self.all_values();
        self.rows
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let act: f64 = row.iter().map(|&(v, a)| a * x[v]).sum();
                let r = x[self.nstruct + i];
                (act - r).abs() / (1.0 + r.abs())
            })
            .fold(0.0, f64::max)
    }

    fn all_values(&self) -> Vec<f64> {
        (0..self.lower.len())
            .map(|v| match self.slot[v] {
                Slot::Basic(r) => self.xb[r],
                Slot::Nonbasic(_) => self.nb_value(v),
            })
            .collect()
    }

    pub(crate) fn structural_values(&self) -> Vec<f64> {
        let mut x = self.all_values();
        x.truncate(self.nstruct);
        x
    }

    /// Value of the minimized objective at the current point.
    #[cfg(test)]
    pub(crate) fn objective(&self) -> f64 {
        self.structural_values()
            .iter()
            .zip(&self.cost)
            .map(|(x, c)| x * c)
            .sum()
    }

    /// Re-optimizes from the current basis after bound changes or new rows.
    pub(crate) fn run(&mut self, deadline: Option<Instant>) -> Result<LpOutcome> {
        self.compute_d();
        self.place_nonbasic();
        self.compute_xb();
        let max_iter = 50_000 + 50 * (self.basis.len() + self.width());
        let mut degenerate = 0usize;
        let mut bland = false;
        let mut since_refactor = 0usize;
        let mut verified = false;
        for iter in 0.. {
            if iter % 64 == 0 && deadline.is_some_and(|t| Instant::now() >= t) {
                return Ok(LpOutcome::TimeLimit);
            }
            if iter > max_iter {
                return Err(Error::NumericalFailure(format!(
                    "dual simplex exceeded {max_iter} iterations"
                )));
            }
            let Some((r, to_lower)) = self.select_leaving(bland) else {
                if self.residual() > RESIDUAL_TOL && !verified {
                    self.refactor()?;
                    self.place_nonbasic();
                    self.compute_xb();
                    verified = true;
                    continue;
                }
                if self.residual() > 1e3 * RESIDUAL_TOL {
                    return Err(Error::NumericalFailure("residual too large after refactorization".into()));
                }
                let unbounded = (0..self.width()).any(|c| {
                    let v = self.nonbasic[c];
                    self.at_artificial(v) && self.d[c].abs() > DUAL_TOL
                }) || self.xb.iter().any(|x| x.abs() >= BIG * 0.5);
                return Ok(if unbounded {
                    LpOutcome::Unbounded
                } else {
                    LpOutcome::Optimal
                });
            };
            let Some(c) = self.select_entering(r, to_lower, bland) else {
                if !verified {
                    self.refactor()?;
                    self.place_nonbasic();
                    self.compute_xb();
                    verified = true;
                    continue;
                }
                return Ok(LpOutcome::Infeasible);
            };
            let w = self.width();
            if self.d[c].abs() / self.tab[r * w + c].abs() < 1e-12 {
                degenerate += 1;
                bland |= degenerate >= BLAND_AFTER;
            }
            self.pivot(r, c, to_lower);
            since_refactor += 1;
            if since_refactor >= REFACTOR_EVERY {
                self.refactor()?;
                self.place_nonbasic();
                since_refactor = 0;
            }
            self.compute_xb();
        }
        unreachable!()
    }
}

/// Gauss-Jordan inverse with partial pivoting of a row-major `k×k` matrix.
fn invert(mut a: Vec<f64>, k: usize) -> Option<Vec<f64>> {
    let mut inv = vec![0.0; k * k];
    for i in 0..k {
        inv[i * k + i] = 1.0;
    }
    for col in 0..k {
        let piv = (col..k).max_by(|&x, &y| a[x * k + col].abs().total_cmp(&a[y * k + col].abs()))?;
        if a[piv * k + col].abs() < 1e-12 {
            return None;
        }
        if piv != col {
            for j in 0..k {
                a.swap(piv * k + j, col * k + j);
                inv.swap(piv * k + j, col * k + j);
            }
        }
        let p = 1.0 / a[col * k + col];
        for j in 0..k {
            a[col * k + j] *= p;
            inv[col * k + j] *= p;
        }
        for i in 0..k {
            if i == col {
                continue;
            }
            let f = a[i * k + col];
            if f == 0.0 {
                continue;
            }
            for j in 0..k {
                a[i * k + j] -= f * a[col * k + j];
                inv[i * k + j] -= f * inv[col * k + j];
            }
        }
    }
    Some(inv)
}

/// Minimization costs for `model` (objective negated when maximizing).
pub(crate) fn min_costs(model: &MipModel) -> Vec<f64> {
    let sign = match model.sense() {
        Sense::Maximize => -1.0,
        Sense::Minimize => 1.0,
    };
    let mut cost = vec![0.0; model.num_variables()];
    for &(v, a) in model.objective() {
        cost[v.0] += sign * a;
    }
    cost
}

/// Solves the LP relaxation of `model` (binary flags ignored) and returns a
/// basic optimal solution.
pub fn solve_lp(model: &MipModel) -> Result<SolveResult> {
    model.validate()?;
    let start = Instant::now();
    let mut lp = DualSimplex::new(model, &min_costs(model));
    let outcome = lp.run(None)?;
    Ok(lp_result(model, &lp, outcome, start.elapsed()))
}

fn lp_result(model: &MipModel, lp: &DualSimplex, outcome: LpOutcome, runtime: Duration) -> SolveResult {
    let unbounded_bound = match model.sense() {
        Sense::Maximize => f64::INFINITY,
        Sense::Minimize => f64::NEG_INFINITY,
    };
    let (status, incumbent, objective, bound) = match outcome {
        LpOutcome::Optimal => {
            let x = lp.structural_values();
            let value = model.objective_value(&x);
            (SolveStatus::Optimal, Some(x), value, value)
        }
        LpOutcome::Infeasible => (SolveStatus::Infeasible, None, f64::NAN, -unbounded_bound),
        LpOutcome::Unbounded => (SolveStatus::Unbounded, None, f64::NAN, unbounded_bound),
        LpOutcome::TimeLimit => (SolveStatus::TimeLimit, None, f64::NAN, unbounded_bound),
    };
    SolveResult {
        status,
        gap: if status == SolveStatus::Optimal {
            0.0
        } else {
            relative_gap(bound, objective)
        },
        incumbent,
        objective,
        bound,
        nodes: 0,
        runtime,
        root_bound: bound,
        cuts_added: 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::milp::{MipModel, Relation, Sense, VarId};

    fn lp(sense: Sense) -> MipModel {
        MipModel::new(sense)
    }

    #[test]
    fn single_bounded_variable() {
        let mut m = lp(Sense::Maximize);
        let x = m.add_continuous("x", 0.0, 1.0);
        m.set_objective(vec![(x, 1.0)]);
        let r = solve_lp(&m).unwrap();
        assert_eq!(r.status, SolveStatus::Optimal);
        assert_eq!(r.objective, 1.0);
    }

    #[test]
    fn contradictory_rows() {
        let mut m = lp(Sense::Maximize);
        let x = m.add_continuous("x", f64::NEG_INFINITY, f64::INFINITY);
        m.add_constraint("a", vec![(x, 1.0)], Relation::Ge, 1.0);
        m.add_constraint("b", vec![(x, 1.0)], Relation::Le, 0.0);
        assert_eq!(solve_lp(&m).unwrap().status, SolveStatus::Infeasible);
    }

    #[test]
    fn unbounded_ray() {
        let mut m = lp(Sense::Maximize);
        let x = m.add_continuous("x", 0.0, f64::INFINITY);
        let y = m.add_continuous("y", 0.0, f64::INFINITY);
        m.add_constraint("a", vec![(x, 1.0), (y, -1.0)], Relation::Le, 1.0);
        m.set_objective(vec![(x, 1.0)]);
        assert_eq!(solve_lp(&m).unwrap().status, SolveStatus::Unbounded);
    }

    #[test]
    fn textbook_two_variable() {
        // max 3x + 5y, x ≤ 4, 2y ≤ 12, 3x + 2y ≤ 18 → (2, 6), 36
        let mut m = lp(Sense::Maximize);
        let x = m.add_continuous("x", 0.0, f64::INFINITY);
        let y = m.add_continuous("y", 0.0, f64::INFINITY);
        m.add_constraint("c1", vec![(x, 1.0)], Relation::Le, 4.0);
        m.add_constraint("c2", vec![(y, 2.0)], Relation::Le, 12.0);
        m.add_constraint("c3", vec![(x, 3.0), (y, 2.0)], Relation::Le, 18.0);
        m.set_objective(vec![(x, 3.0), (y, 5.0)]);
        let r = solve_lp(&m).unwrap();
        assert!((r.objective - 36.0).abs() < 1e-9);
        let s = r.incumbent.unwrap();
        assert!((s[0] - 2.0).abs() < 1e-9 && (s[1] - 6.0).abs() < 1e-9);
    }

    #[test]
    fn minimization_with_equality() {
        // min x + 2y, x + y = 3, x ≤ 2 → x=2, y=1, value 4
        let mut m = lp(Sense::Minimize);
        let x = m.add_continuous("x", 0.0, 2.0);
        let y = m.add_continuous("y", 0.0, f64::INFINITY);
        m.add_constraint("e", vec![(x, 1.0), (y, 1.0)], Relation::Eq, 3.0);
        m.set_objective(vec![(x, 1.0), (y, 2.0)]);
        let r = solve_lp(&m).unwrap();
        assert!((r.objective - 4.0).abs() < 1e-9);
    }

    #[test]
    fn added_row_warm_start() {
        let mut m = lp(Sense::Maximize);
        let x = m.add_continuous("x", 0.0, 10.0);
        let y = m.add_continuous("y", 0.0, 10.0);
        m.set_objective(vec![(x, 1.0), (y, 1.0)]);
        let mut s = DualSimplex::new(&m, &min_costs(&m));
        assert_eq!(s.run(None).unwrap(), LpOutcome::Optimal);
        assert_eq!(s.objective(), -20.0);
        s.add_row(&[(x.0, 1.0), (y.0, 2.0)], Relation::Le, 12.0);
        assert_eq!(s.run(None).unwrap(), LpOutcome::Optimal);
        assert!((s.objective() + 11.0).abs() < 1e-9);
        s.set_bounds(VarId(0).0, 0.0, 0.0);
        assert_eq!(s.run(None).unwrap(), LpOutcome::Optimal);
        assert!((s.objective() + 6.0).abs() < 1e-9);
    }

    #[test]
    fn inverse() {
        let a = vec![0.0, 2.0, 1.0, 1.0];
        let inv = invert(a, 2).unwrap();
        assert_eq!(inv, vec![-0.5, 1.0, 0.5, 0.0]);
        assert!(invert(vec![1.0, 2.0, 2.0, 4.0], 2).is_none());
    }
}
