//! Best-bound branch-and-bound over the binary variables of a [`MipModel`].
//!
//! All nodes share one [`DualSimplex`]; moving to a node only changes
//! variable bounds, which keeps the previous basis dual feasible.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::{Duration, Instant};

use super::simplex::{merge_terms, min_costs, DualSimplex, LpOutcome};
use super::{relative_gap, MipModel, Relation, Sense, SolveResult, SolveStatus, VarId};
use crate::error::{Error, Result};

const INTEGRALITY_TOL: f64 = 1e-6;
const CUT_TOL: f64 = 1e-6;
/// Cut rounds at a node whose relaxation is still fractional.
const MAX_FRACTIONAL_ROUNDS: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MipParams {
    pub time_limit: Duration,
    pub gap_tol: f64,
}

impl Default for MipParams {
    fn default() -> Self {
        MipParams {
            time_limit: Duration::from_secs(300),
            gap_tol: 1e-6,
        }
    }
}

impl MipParams {
    pub fn with_time_limit(time_limit: Duration) -> Self {
        MipParams {
            time_limit,
            ..Self::default()
        }
    }
}

/// A globally valid row produced by a [`CutCallback`].
#[derive(Debug, Clone, PartialEq)]
pub struct Cut {
    pub terms: Vec<(VarId, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

impl Cut {
    pub fn violation(&self, x: &[f64]) -> f64 {
        let lhs: f64 = self.terms.iter().map(|&(v, a)| a * x[v.0]).sum();
        self.relation.violation(lhs, self.rhs)
    }
}

/// Separation hook called at every node relaxation optimum.
///
/// When the point is integral on all binaries the callback must return a
/// violated cut whenever the point is infeasible for the full problem; the
/// engine then treats the model plus callback as a lazily stated model.
pub trait CutCallback {
    fn separate(&mut self, x: &[f64]) -> Vec<Cut>;
}

struct Node {
    bound: f64,
    depth: usize,
    id: u64,
    fixings: Vec<(usize, f64)>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Node {
    fn cmp(&self, other: &Self) -> Ordering {
        self.bound
            .total_cmp(&other.bound)
            .then(self.depth.cmp(&other.depth))
            .then(other.id.cmp(&self.id))
    }
}

enum Relaxation {
    Infeasible,
    Unbounded,
    TimeLimit,
    Solved { value: f64, x: Vec<f64> },
}

struct Search<'a> {
    model: &'a MipModel,
    lp: DualSimplex,
    /// Objective in maximization form.
    gain: Vec<f64>,
    binaries: Vec<usize>,
    root_bounds: Vec<(f64, f64)>,
    callback: Option<&'a mut dyn CutCallback>,
    cuts: Vec<Cut>,
    deadline: Instant,
    integral_objective: bool,
}

impl<'a> Search<'a> {
    fn is_integral(&self, x: &[f64]) -> bool {
        self.binaries
            .iter()
            .all(|&b| (x[b] - x[b].round()).abs() <= INTEGRALITY_TOL)
    }

    fn apply(&mut self, fixings: &[(usize, f64)]) {
        for (&b, &(lo, hi)) in self.binaries.iter().zip(&self.root_bounds) {
            self.lp.set_bounds(b, lo, hi);
        }
        for &(b, v) in fixings {
            self.lp.set_bounds(b, v, v);
        }
    }

    fn relax(&mut self) -> Result<Relaxation> {
        let mut rounds = 0;
        loop {
            match self.lp.run(Some(self.deadline))? {
                LpOutcome::Infeasible => return Ok(Relaxation::Infeasible),
                LpOutcome::Unbounded => return Ok(Relaxation::Unbounded),
                LpOutcome::TimeLimit => return Ok(Relaxation::TimeLimit),
                LpOutcome::Optimal => {}
            }
            let x = self.lp.structural_values();
            let integral = self.is_integral(&x);
            if let Some(cb) = self.callback.as_mut() {
                if integral || rounds < MAX_FRACTIONAL_ROUNDS {
                    let cuts: Vec<Cut> = cb
                        .separate(&x)
                        .into_iter()
                        .filter(|c| c.violation(&x) > CUT_TOL)
                        .collect();
                    if !cuts.is_empty() {
                        for cut in cuts {
                            let terms = merge_terms(cut.terms.iter().map(|&(v, a)| (v.0, a)));
                            self.lp.add_row(&terms, cut.relation, cut.rhs);
                            self.cuts.push(cut);
                        }
                        rounds += 1;
                        continue;
                    }
                }
            }
            let value = self.gain.iter().zip(&x).map(|(c, v)| c * v).sum();
            return Ok(Relaxation::Solved { value, x });
        }
    }

    /// Re-solves with every binary fixed to its rounded value so that the
    /// continuous part is consistent with exact 0/1 values.
    fn polish(&mut self, x: &[f64]) -> Result<Option<(f64, Vec<f64>)>> {
        let fixings: Vec<(usize, f64)> = self.binaries.iter().map(|&b| (b, x[b].round())).collect();
        self.apply(&fixings);
        let out = match self.relax()? {
            Relaxation::Solved { x: mut y, .. } => {
                for &(b, v) in &fixings {
                    y[b] = v;
                }
                let feasible = self.model.max_violation(&y) <= 1e-6
                    && self.cuts.iter().all(|c| c.violation(&y) <= CUT_TOL * (1.0 + c.rhs.abs()));
                feasible.then(|| (self.gain.iter().zip(&y).map(|(c, v)| c * v).sum(), y))
            }
            _ => None,
        };
        Ok(out)
    }

    fn effective(&self, bound: f64) -> f64 {
        if self.integral_objective {
            (bound + 1e-6).floor()
        } else {
            bound
        }
    }
}

fn prunable(search: &Search<'_>, bound: f64, incumbent: Option<f64>, gap_tol: f64) -> bool {
    match incumbent {
        None => false,
        Some(inc) => {
            let tol = (gap_tol * inc.abs().max(1e-6)).max(1e-9);
            search.effective(bound) - inc <= tol
        }
    }
}

/// Branch-and-bound with LP-relaxation bounds.
pub fn solve_mip(model: &MipModel, params: MipParams) -> Result<SolveResult> {
    run(model, params, None)
}

/// Branch-and-bound with a separation callback invoked at every node.
pub fn solve_mip_with_cuts(model: &MipModel, params: MipParams, callback: &mut dyn CutCallback) -> Result<SolveResult> {
    run(model, params, Some(callback))
}

fn run<'a>(model: &'a MipModel, params: MipParams, callback: Option<&'a mut dyn CutCallback>) -> Result<SolveResult> {
    model.validate()?;
    let start = Instant::now();
    let cost = min_costs(model);
    let gain: Vec<f64> = cost.iter().map(|c| -c).collect();
    let binaries: Vec<usize> = model.binaries().map(|v| v.0).collect();
    let integral_objective = gain
        .iter()
        .enumerate()
        .all(|(j, &c)| c == 0.0 || (model.variables()[j].binary && c == c.round()));
    let lp = DualSimplex::new(model, &cost);
    let root_bounds = binaries.iter().map(|&b| lp.bounds(b)).collect();
    let mut search = Search {
        model,
        lp,
        gain,
        binaries,
        root_bounds,
        callback,
        cuts: Vec::new(),
        deadline: start + params.time_limit,
        integral_objective,
    };
    let sign = match model.sense() {
        Sense::Maximize => 1.0,
        Sense::Minimize => -1.0,
    };
    let finish = |status: SolveStatus,
                  incumbent: Option<(f64, Vec<f64>)>,
                  bound: f64,
                  root_bound: f64,
                  nodes: u64,
                  cuts_added: usize| {
        let (objective, x) = match incumbent {
            Some((v, x)) => (sign * v, Some(x)),
            None => (f64::NAN, None),
        };
        let bound = sign * bound;
        SolveResult {
            status,
            gap: if status == SolveStatus::Optimal {
                relative_gap(bound, objective).min(params.gap_tol)
            } else {
                relative_gap(bound, objective)
            },
            incumbent: x,
            objective,
            bound,
            nodes,
            runtime: start.elapsed(),
            root_bound: sign * root_bound,
            cuts_added,
        }
    };

    let (root_value, root_x) = match search.relax()? {
        Relaxation::Infeasible => {
            return Ok(finish(SolveStatus::Infeasible, None, f64::NEG_INFINITY, f64::NEG_INFINITY, 1, search.cuts.len()))
        }
        Relaxation::Unbounded => {
            return Ok(finish(SolveStatus::Unbounded, None, f64::INFINITY, f64::INFINITY, 1, search.cuts.len()))
        }
        Relaxation::TimeLimit => {
            return Ok(finish(SolveStatus::TimeLimit, None, f64::INFINITY, f64::INFINITY, 0, search.cuts.len()))
        }
        Relaxation::Solved { value, x } => (value, x),
    };
    let root_bound = root_value;
    let mut nodes: u64 = 1;
    let mut incumbent: Option<(f64, Vec<f64>)> = None;

    let offer = |incumbent: &mut Option<(f64, Vec<f64>)>, cand: Option<(f64, Vec<f64>)>| {
        if let Some((v, x)) = cand {
            if !matches!(incumbent, Some((iv, _)) if v <= *iv + 1e-12) {
                *incumbent = Some((v, x));
            }
        }
    };

    // LP rounding: nearest, then floor.
    let nearest = search.polish(&root_x)?;
    offer(&mut incumbent, nearest);
    if !search.is_integral(&root_x) {
        let floored: Vec<f64> = root_x.iter().map(|v| (v + INTEGRALITY_TOL).floor()).collect();
        let floor = search.polish(&floored)?;
        offer(&mut incumbent, floor);
    }

    let mut heap = BinaryHeap::new();
    let mut next_id = 1u64;
    let mut expand = |heap: &mut BinaryHeap<Node>, x: &[f64], value: f64, depth: usize, fixings: &[(usize, f64)], binaries: &[usize]| {
        let (branch, _) = binaries
            .iter()
            .map(|&b| (b, (x[b] - x[b].floor()).min(x[b].ceil() - x[b])))
            .fold((usize::MAX, -1.0), |acc, (b, f)| if f > acc.1 { (b, f) } else { acc });
        for v in [1.0, 0.0] {
            let mut child = fixings.to_vec();
            child.push((branch, v));
            heap.push(Node {
                bound: value,
                depth: depth + 1,
                id: next_id,
                fixings: child,
            });
            next_id += 1;
        }
    };

    let binaries = search.binaries.clone();
    if !search.is_integral(&root_x) && !prunable(&search, root_value, incumbent.as_ref().map(|t| t.0), params.gap_tol) {
        expand(&mut heap, &root_x, root_value, 0, &[], &binaries);
    }

    while let Some(node) = heap.pop() {
        let inc_value = incumbent.as_ref().map(|t| t.0);
        if prunable(&search, node.bound, inc_value, params.gap_tol) {
            heap.clear();
            break;
        }
        if Instant::now() >= search.deadline {
            let bound = node.bound.max(inc_value.unwrap_or(f64::NEG_INFINITY));
            return Ok(finish(SolveStatus::TimeLimit, incumbent, bound, root_bound, nodes, search.cuts.len()));
        }
        search.apply(&node.fixings);
        let relaxation = search.relax()?;
        nodes += 1;
        match relaxation {
            Relaxation::Infeasible => continue,
            Relaxation::Unbounded => {
                return Err(Error::NumericalFailure("unbounded subproblem below a bounded root".into()))
            }
            Relaxation::TimeLimit => {
                let bound = node.bound.max(inc_value.unwrap_or(f64::NEG_INFINITY));
                return Ok(finish(SolveStatus::TimeLimit, incumbent, bound, root_bound, nodes, search.cuts.len()));
            }
            Relaxation::Solved { value, x } => {
                if prunable(&search, value, inc_value, params.gap_tol) {
                    continue;
                }
                if search.is_integral(&x) {
                    let cand = search.polish(&x)?;
                    offer(&mut incumbent, cand);
                } else {
                    expand(&mut heap, &x, value, node.depth, &node.fixings, &binaries);
                }
            }
        }
    }

    Ok(match incumbent {
        Some((v, x)) => finish(SolveStatus::Optimal, Some((v, x)), v, root_bound, nodes, search.cuts.len()),
        None => finish(SolveStatus::Infeasible, None, f64::NEG_INFINITY, root_bound, nodes, search.cuts.len()),
    })
}
