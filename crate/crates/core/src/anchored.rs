//! Anchored-set semantics: the augmented graph `G̃_H`, anchoring checks, the
//! dominant schedule and the exhaustive oracle.
//!
//! Job sets are passed as sorted slices of job indices (`1..=n`).

use crate::error::{Error, Result};
use crate::graph::{nominal_longest, schedule_violation, LongestPathMatrix, PrecedenceGraph, Schedule, EPS, SOURCE};
use crate::uncertainty::{extreme_points, worst_case_longest_paths, UncertaintySet};

/// Largest job count [`brute_force_optimum`] accepts.
pub const BRUTE_FORCE_MAX_JOBS: usize = 20;

/// A problem datum `(G(p), Δ, M, w)`; `weights[j - 1]` belongs to job `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub graph: PrecedenceGraph,
    pub delta: UncertaintySet,
    pub deadline: f64,
    pub weights: Vec<f64>,
}

impl Instance {
    pub fn new(graph: PrecedenceGraph, delta: UncertaintySet, deadline: f64, weights: Vec<f64>) -> Result<Self> {
        let n = graph.n();
        delta.validate(n)?;
        if !(deadline.is_finite() && deadline >= 0.0) {
            return Err(Error::InvalidGraph(format!("deadline must be a nonnegative real, got {deadline}")));
        }
        if weights.len() != n {
            return Err(Error::InvalidGraph(format!("expected {n} weights, got {}", weights.len())));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
            return Err(Error::InvalidGraph(format!("weights must be nonnegative reals, got {w}")));
        }
        Ok(Instance {
            graph,
            delta,
            deadline,
            weights,
        })
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    /// `L^Δ` for this instance's uncertainty set.
    pub fn worst_case(&self) -> Result<LongestPathMatrix> {
        worst_case_longest_paths(&self.graph, &self.delta)
    }

    /// `L⁰`, longest paths under nominal processing times.
    pub fn nominal(&self) -> LongestPathMatrix {
        nominal_longest(&self.graph)
    }

    pub fn weight_of(&self, h: &[usize]) -> f64 {
        h.iter().map(|&j| self.weights[j - 1]).sum()
    }

    pub fn with_deadline(&self, deadline: f64) -> Self {
        Instance {
            deadline,
            ..self.clone()
        }
    }

    pub fn with_delta(&self, delta: UncertaintySet) -> Self {
        Instance {
            delta,
            ..self.clone()
        }
    }
}

/// A solution pair `(x, H)` with its objective `Σ_{i∈H} w_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct AnchoredSolution {
    pub schedule: Schedule,
    pub anchored: Vec<usize>,
    pub objective: f64,
}

impl AnchoredSolution {
    pub fn new(inst: &Instance, schedule: Schedule, mut anchored: Vec<usize>) -> Self {
        anchored.sort_unstable();
        anchored.dedup();
        let objective = inst.weight_of(&anchored);
        AnchoredSolution {
            schedule,
            anchored,
            objective,
        }
    }
}

/// `G(p)` plus arcs `(i, j)` of length `L^Δ_ij` for `i ∈ H ∪ {s}`, `j ∈ H`, `i ≺ j`.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentedGraph {
    num_vertices: usize,
    order: Vec<usize>,
    arcs: Vec<(usize, usize, f64)>,
    extra: usize,
}

impl AugmentedGraph {
    /// All arcs as `(tail, head, length)`; the original arcs come first.
    pub fn arcs(&self) -> &[(usize, usize, f64)] {
        &self.arcs
    }

    /// Only the arcs added for `H`.
    pub fn extra_arcs(&self) -> &[(usize, usize, f64)] {
        &self.arcs[self.arcs.len() - self.extra..]
    }

    /// Earliest schedule of `G̃_H`.
    pub fn earliest_schedule(&self) -> Schedule {
        let mut incoming: Vec<Vec<(usize, f64)>> = vec![Vec::new(); self.num_vertices];
        for &(i, j, l) in &self.arcs {
            incoming[j].push((i, l));
        }
        let mut z = vec![0.0f64; self.num_vertices];
        for &v in &self.order {
            z[v] = incoming[v].iter().map(|&(i, l)| z[i] + l).fold(0.0, f64::max);
        }
        Schedule::new(z)
    }
}

fn membership(n: usize, h: &[usize]) -> Vec<bool> {
    let mut inside = vec![false; n + 2];
    for &j in h {
        inside[j] = true;
    }
    inside
}

/// Builds `G̃_H`. Added arcs respect the topological order of `G`, so the
/// result is acyclic.
pub fn anchored_graph(g: &PrecedenceGraph, ld: &LongestPathMatrix, h: &[usize]) -> AugmentedGraph {
    let mut arcs: Vec<(usize, usize, f64)> = g.arcs().iter().map(|&(i, j)| (i, j, g.p(i))).collect();
    let base = arcs.len();
    let mut tails: Vec<usize> = vec![SOURCE];
    tails.extend(h.iter().copied());
    tails.sort_unstable();
    tails.dedup();
    for &i in &tails {
        for &j in h {
            if g.precedes(i, j) {
                arcs.push((i, j, ld.value(i, j)));
            }
        }
    }
    AugmentedGraph {
        num_vertices: g.num_vertices(),
        order: g.topological_order().to_vec(),
        extra: arcs.len() - base,
        arcs,
    }
}

/// Prop-1 test: `x_j - x_i ≥ L^Δ_ij` for every `i ∈ H ∪ {s}`, `j ∈ H`, `i ≺ j`.
pub fn is_x_anchored(g: &PrecedenceGraph, ld: &LongestPathMatrix, x: &Schedule, h: &[usize]) -> Result<bool> {
    if let Some(msg) = schedule_violation(g, x) {
        return Err(Error::NotASchedule(msg));
    }
    let ok = std::iter::once(SOURCE).chain(h.iter().copied()).all(|i| {
        h.iter()
            .filter(|&&j| g.precedes(i, j))
            .all(|&j| x.start(j) - x.start(i) >= ld.value(i, j) - EPS)
    });
    Ok(ok)
}

/// Second-stage feasibility for one realization `δ` (job-indexed): is there a
/// schedule of `G(p+δ)` that keeps every job of `H` at its baseline start?
///
/// Computes the earliest schedule of `G(p+δ)` with release dates `x_i` on
/// `H` and checks that no anchored job is pushed later.
pub fn recourse_feasible(g: &PrecedenceGraph, delta: &[f64], x: &Schedule, h: &[usize]) -> bool {
    let inside = membership(g.n(), h);
    let mut y = vec![f64::NEG_INFINITY; g.num_vertices()];
    y[SOURCE] = 0.0;
    for &v in g.topological_order() {
        if v != SOURCE {
            y[v] = g
                .predecessors(v)
                .iter()
                .map(|&u| y[u] + g.p(u) + if u == SOURCE || u > g.n() { 0.0 } else { delta[u - 1] })
                .fold(f64::NEG_INFINITY, f64::max);
        }
        if inside[v] {
            if y[v] > x.start(v) + EPS {
                return false;
            }
            y[v] = x.start(v);
        }
    }
    true
}

/// `H` is anchored iff the earliest schedule of `G̃_H` meets the deadline.
pub fn is_anchored_set(inst: &Instance, ld: &LongestPathMatrix, h: &[usize]) -> bool {
    anchored_graph(&inst.graph, ld, h).earliest_schedule().makespan() <= inst.deadline + EPS
}

/// Earliest schedule of `G̃_H`; it satisfies `z_j - z_i ≥ L^Δ_ij` for every
/// job or source `i` and every `j ∈ H`.
pub fn dominant_schedule(inst: &Instance, ld: &LongestPathMatrix, h: &[usize]) -> Result<Schedule> {
    let z = anchored_graph(&inst.graph, ld, h).earliest_schedule();
    if z.makespan() > inst.deadline + EPS {
        return Err(Error::InfeasibleAnchoredSet);
    }
    Ok(z)
}

fn mask_to_jobs(mask: u32, n: usize) -> Vec<usize> {
    (0..n).filter(|b| mask >> b & 1 == 1).map(|b| b + 1).collect()
}

/// Exhaustive oracle: the maximum-weight anchored set (ties broken towards
/// the lexicographically smallest sorted job list) with its dominant schedule.
pub fn brute_force_optimum(inst: &Instance) -> Result<AnchoredSolution> {
    let n = inst.n();
    if n > BRUTE_FORCE_MAX_JOBS {
        return Err(Error::InstanceTooLarge {
            n,
            limit: BRUTE_FORCE_MAX_JOBS,
        });
    }
    let l0 = inst.nominal();
    if l0.value(SOURCE, n + 1) > inst.deadline + EPS {
        return Err(Error::DeadlineInfeasible {
            deadline: inst.deadline,
            min_makespan: l0.value(SOURCE, n + 1),
        });
    }
    let ld = inst.worst_case()?;
    let mut sorted_w = inst.weights.clone();
    sorted_w.sort_by(|a, b| b.total_cmp(a));
    let tie = 1e-9;
    let mut best: Option<(f64, Vec<usize>)> = None;
    for k in (0..=n).rev() {
        let cap: f64 = sorted_w[..k].iter().sum();
        if best.as_ref().is_some_and(|(bw, _)| cap < bw - tie) {
            continue;
        }
        // Gosper's hack over all k-subsets
        let mut mask: u64 = (1u64 << k) - 1;
        let limit = 1u64 << n;
        while mask < limit {
            let m = mask as u32;
            let jobs = mask_to_jobs(m, n);
            let w = inst.weight_of(&jobs);
            let better = match &best {
                None => true,
                Some((bw, bh)) => w > bw + tie || (w >= bw - tie && jobs < *bh),
            };
            if better && is_anchored_set(inst, &ld, &jobs) {
                best = Some((w, jobs));
            }
            if k == 0 {
                break;
            }
            let c = mask & mask.wrapping_neg();
            let r = mask + c;
            mask = (((r ^ mask) >> 2) / c) | r;
        }
    }
    let (_, h) = best.expect("the empty set is anchored when M ≥ L⁰_st");
    let z = dominant_schedule(inst, &ld, &h)?;
    Ok(AnchoredSolution::new(inst, z, h))
}

/// Outcome of an independent audit of a solution pair.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub is_schedule: bool,
    pub meets_deadline: bool,
    pub x_anchored: bool,
    /// `Some` when `Δ` was small enough to check every extreme realization.
    pub recourse_on_extreme_points: Option<bool>,
    pub messages: Vec<String>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.is_schedule && self.meets_deadline && self.x_anchored && self.recourse_on_extreme_points.unwrap_or(true)
    }
}

/// Checks that `x` is a schedule of `G(p)` within the deadline and that `H`
/// is `x`-anchored, both through `L^Δ` and, when `Δ` is enumerable, through
/// second-stage feasibility on every extreme deviation vector.
pub fn verify_solution(inst: &Instance, x: &Schedule, h: &[usize]) -> Result<VerifyReport> {
    let g = &inst.graph;
    let mut messages = Vec::new();
    if let Some(&j) = h.iter().find(|&&j| j == 0 || j > g.n()) {
        return Err(Error::InvalidGraph(format!("anchored set contains unknown job {j}")));
    }
    let violation = schedule_violation(g, x);
    let is_schedule = violation.is_none();
    if let Some(msg) = violation {
        messages.push(format!("not a schedule: {msg}"));
    }
    let meets_deadline = x.len() == g.num_vertices() && x.makespan() <= inst.deadline + EPS;
    if !meets_deadline && x.len() == g.num_vertices() {
        messages.push(format!("makespan {} exceeds deadline {}", x.makespan(), inst.deadline));
    }
    let ld = inst.worst_case()?;
    let x_anchored = is_schedule && is_x_anchored(g, &ld, x, h)?;
    if is_schedule && !x_anchored {
        for i in std::iter::once(SOURCE).chain(h.iter().copied()) {
            for &j in h.iter().filter(|&&j| g.precedes(i, j)) {
                if x.start(j) - x.start(i) < ld.value(i, j) - EPS {
                    messages.push(format!(
                        "pair ({i},{j}): x_{j} - x_{i} = {} < worst-case longest path {}",
                        x.start(j) - x.start(i),
                        ld.value(i, j)
                    ));
                }
            }
        }
    }
    let recourse_on_extreme_points = if is_schedule {
        match extreme_points(&inst.delta, g.n()) {
            Ok(points) => {
                let bad = points.iter().find(|d| !recourse_feasible(g, d, x, h));
                if let Some(d) = bad {
                    messages.push(format!("no recourse schedule for deviation {d:?}"));
                }
                Some(bad.is_none())
            }
            Err(_) => None,
        }
    } else {
        None
    };
    Ok(VerifyReport {
        is_schedule,
        meets_deadline,
        x_anchored,
        recourse_on_extreme_points,
        messages,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::nominal_longest;

    fn example_graph() -> PrecedenceGraph {
        PrecedenceGraph::new(
            5,
            vec![(0, 1), (0, 2), (1, 3), (3, 5), (2, 4), (3, 4), (5, 6), (4, 6)],
            vec![1.0, 1.0, 1.0, 1.0, 2.0],
        )
        .unwrap()
    }

    const DHAT: [f64; 5] = [0.5, 1.0, 0.5, 0.5, 0.5];

    fn example(delta: UncertaintySet) -> Instance {
        Instance::new(example_graph(), delta, 4.5, vec![1.0; 5]).unwrap()
    }

    fn boxed() -> UncertaintySet {
        UncertaintySet::Box { dhat: DHAT.to_vec() }
    }

    fn budget1() -> UncertaintySet {
        UncertaintySet::Budgeted { dhat: DHAT.to_vec(), gamma: 1 }
    }

    /// Baseline on the example: jobs start at (0, 1, 1, 3, 2.5), makespan 4.5.
    fn baseline_schedule() -> Schedule {
        Schedule::new(vec![0.0, 0.0, 1.0, 1.0, 3.0, 2.5, 4.5])
    }

    #[test]
    fn augmented_arcs() {
        let inst = example(boxed());
        let ld = inst.worst_case().unwrap();
        let aug = anchored_graph(&inst.graph, &ld, &[1, 2, 4]);
        let mut extra = aug.extra_arcs().to_vec();
        extra.sort_by_key(|a| (a.0, a.1));
        assert_eq!(
            extra,
            vec![(0, 1, 0.0), (0, 2, 0.0), (0, 4, 3.0), (1, 4, 3.0), (2, 4, 2.0)]
        );
        assert!(anchored_graph(&inst.graph, &ld, &[]).extra_arcs().is_empty());
        let all = anchored_graph(&inst.graph, &ld, &[1, 2, 3, 4, 5]);
        let comparable = inst
            .graph
            .comparable_pairs()
            .filter(|&(i, j)| i <= 5 && (1..=5).contains(&j))
            .count();
        assert_eq!(all.extra_arcs().len(), comparable);
    }

    #[test]
    fn baseline_pairs() {
        let g = example_graph();
        let x = baseline_schedule();
        let ld_box = worst_case_longest_paths(&g, &boxed()).unwrap();
        let ld_b1 = worst_case_longest_paths(&g, &budget1()).unwrap();
        assert!(is_x_anchored(&g, &ld_box, &x, &[1, 2, 4]).unwrap());
        assert!(is_x_anchored(&g, &ld_b1, &x, &[1, 2, 4, 5]).unwrap());
        assert!(!is_x_anchored(&g, &ld_box, &x, &[1, 2, 4, 5]).unwrap());
        let bad = Schedule::new(vec![0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert!(matches!(is_x_anchored(&g, &ld_box, &bad, &[]), Err(Error::NotASchedule(_))));
    }

    #[test]
    fn recourse_examples() {
        let g = example_graph();
        let x = baseline_schedule();
        assert!(recourse_feasible(&g, &[0.0; 5], &x, &[1, 2, 3, 4, 5]));
        assert!(recourse_feasible(&g, &[0.0, 1.0, 0.0, 0.0, 0.0], &x, &[1, 2, 4, 5]));
        assert!(!recourse_feasible(&g, &DHAT, &x, &[1, 2, 4, 5]));
        assert!(recourse_feasible(&g, &DHAT, &x, &[1, 2, 4]));
    }

    #[test]
    fn anchored_set_examples() {
        let inst = example(boxed());
        let ld = inst.worst_case().unwrap();
        assert!(is_anchored_set(&inst, &ld, &[]));
        assert!(is_anchored_set(&inst, &ld, &[1, 2, 3, 4]));
        assert!(!is_anchored_set(&inst, &ld, &[5]));
        assert!(matches!(dominant_schedule(&inst, &ld, &[5]), Err(Error::InfeasibleAnchoredSet)));
    }

    #[test]
    fn dominant_schedule_pairs() {
        let inst = example(boxed());
        let ld = inst.worst_case().unwrap();
        let z0 = dominant_schedule(&inst, &ld, &[]).unwrap();
        assert_eq!(z0.start, inst.graph.heads());
        let z = dominant_schedule(&inst, &ld, &[1, 2, 4]).unwrap();
        assert!(z.start(4) >= z.start(3) + ld.value(3, 4) - EPS);
        for i in 0..=5 {
            for j in [1, 2, 4] {
                if inst.graph.precedes(i, j) {
                    assert!(z.start(j) - z.start(i) >= ld.value(i, j) - EPS, "({i},{j})");
                }
            }
        }
    }

    #[test]
    fn oracle_example() {
        let sol = brute_force_optimum(&example(boxed())).unwrap();
        assert_eq!(sol.objective, 4.0);
        assert_eq!(sol.anchored, vec![1, 2, 3, 4]);
        assert!(sol.schedule.makespan() <= 4.5 + EPS);

        let relaxed = example(boxed()).with_deadline(5.5);
        assert_eq!(brute_force_optimum(&relaxed).unwrap().anchored, vec![1, 2, 3, 4, 5]);

        // zero slack: job 5 lies on every critical path and can deviate
        let tight = example(boxed()).with_deadline(4.0);
        let sol = brute_force_optimum(&tight).unwrap();
        assert!(!sol.anchored.contains(&5));

        let infeasible = example(boxed()).with_deadline(3.0);
        assert!(matches!(brute_force_optimum(&infeasible), Err(Error::DeadlineInfeasible { .. })));
    }

    #[test]
    fn prop1_cross_check_example() {
        let g = example_graph();
        let x = baseline_schedule();
        for delta in [boxed(), budget1()] {
            let ld = worst_case_longest_paths(&g, &delta).unwrap();
            let points = extreme_points(&delta, 5).unwrap();
            for mask in 0u32..32 {
                let h = mask_to_jobs(mask, 5);
                let by_matrix = is_x_anchored(&g, &ld, &x, &h).unwrap();
                let by_recourse = points.iter().all(|d| recourse_feasible(&g, d, &x, &h));
                assert_eq!(by_matrix, by_recourse, "{} {h:?}", delta.kind());
            }
        }
    }

    #[test]
    fn verification_report() {
        let inst = example(boxed());
        let x = baseline_schedule();
        assert!(verify_solution(&inst, &x, &[1, 2, 4]).unwrap().passed());
        let report = verify_solution(&inst, &x, &[1, 2, 4, 5]).unwrap();
        assert!(!report.passed());
        assert_eq!(report.recourse_on_extreme_points, Some(false));
        assert!(verify_solution(&inst, &x, &[]).unwrap().passed());
        let l0 = nominal_longest(&inst.graph);
        assert_eq!(l0.value(0, 6), 4.0);
    }
}
