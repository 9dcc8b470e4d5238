#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use anchorsched::anchored::is_anchored_set;
use anchorsched::formulations::{build_dom, build_lay, Matrices};
use anchorsched::graph::{all_pairs_longest, SOURCE};
use anchorsched::instances::{gen_processing, gen_sp, ProcessingClass, Rng};
use anchorsched::milp::solve_lp;
use anchorsched::uncertainty::extreme_points;
use anchorsched::{Instance, LongestPathMatrix, PrecedenceGraph, SolveStatus, UncertaintySet};

/// Two-terminal series-parallel recognizer on the arc multigraph: repeatedly
/// merge parallel arcs and contract vertices with one arc in and one arc out;
/// the graph is series-parallel iff this ends in the single arc `(s, t)`.
pub fn is_series_parallel(g: &PrecedenceGraph) -> bool {
    let s = g.source();
    let t = g.sink();
    // multiset of arcs as (u, v) -> count
    let mut arcs: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for &(i, j) in g.arcs() {
        *arcs.entry((i, j)).or_default() += 1;
    }
    loop {
        let mut changed = false;
        for c in arcs.values_mut() {
            if *c > 1 {
                *c = 1;
                changed = true;
            }
        }
        let vertices: BTreeSet<usize> = arcs.keys().flat_map(|&(a, b)| [a, b]).collect();
        for v in vertices {
            if v == s || v == t {
                continue;
            }
            let ins: Vec<(usize, usize)> = arcs.keys().filter(|&&(_, b)| b == v).copied().collect();
            let outs: Vec<(usize, usize)> = arcs.keys().filter(|&&(a, _)| a == v).copied().collect();
            if ins.len() == 1 && outs.len() == 1 {
                arcs.remove(&ins[0]);
                arcs.remove(&outs[0]);
                *arcs.entry((ins[0].0, outs[0].1)).or_default() += 1;
                changed = true;
                break;
            }
        }
        if !changed {
            break;
        }
    }
    arcs.len() == 1 && arcs.contains_key(&(s, t))
}

/// `L^Δ` by enumerating every extreme deviation vector.
pub fn enumerated_worst_case(g: &PrecedenceGraph, delta: &UncertaintySet) -> LongestPathMatrix {
    let n = g.n();
    let mut best: Option<LongestPathMatrix> = None;
    for d in extreme_points(delta, n).expect("enumerable set") {
        let m = all_pairs_longest(g, |i, _| g.p(i) + if i == SOURCE || i > n { 0.0 } else { d[i - 1] });
        match &mut best {
            None => best = Some(m),
            Some(b) => b.max_assign(&m),
        }
    }
    best.expect("at least the zero vector")
}

/// `D_j ≥ L^Δ_ij - L⁰_ij` for all comparable `i ∈ J ∪ {s}`, `j ∈ J`.
pub fn layered_premise_holds(inst: &Instance, mats: &Matrices) -> bool {
    let Some((dhat, _)) = inst.delta.as_budgeted(inst.n()) else {
        return false;
    };
    let offsets = anchorsched::formulations::lay_offsets(inst, &dhat);
    let n = inst.n();
    inst.graph
        .comparable_pairs()
        .filter(|&(_, j)| j <= n)
        .all(|(i, j)| offsets[j - 1] >= mats.worst.value(i, j) - mats.nominal.value(i, j) - 1e-9)
}

/// Whether the (Dom) relaxation has a point with the given `h` (job-indexed).
pub fn dom_feasible_with(inst: &Instance, mats: &Matrices, h: &[f64]) -> bool {
    let mut b = build_dom(inst, &mats.nominal, &mats.worst);
    for (v, &val) in b.h.clone().iter().zip(h) {
        b.model.set_bounds(*v, val, val);
    }
    solve_lp(&b.model).unwrap().status == SolveStatus::Optimal
}

/// Whether the (Lay) relaxation has a point with the given `h`.
pub fn lay_feasible_with(inst: &Instance, h: &[f64]) -> bool {
    let (dhat, gamma) = inst.delta.as_budgeted(inst.n()).unwrap();
    let mut b = build_lay(inst, &dhat, gamma).unwrap();
    for (v, &val) in b.h.clone().iter().zip(h) {
        b.model.set_bounds(*v, val, val);
    }
    solve_lp(&b.model).unwrap().status == SolveStatus::Optimal
}

/// Random DAG on jobs `1..=n` with forward arcs of probability `density`.
pub fn random_dag(rng: &mut Rng, n: usize, density: f64, p: Vec<f64>) -> PrecedenceGraph {
    let mut arcs = Vec::new();
    for i in 1..=n {
        for j in i + 1..=n {
            if rng.bernoulli(density) {
                arcs.push((i, j));
            }
        }
    }
    PrecedenceGraph::from_job_arcs(n, &arcs, p).unwrap()
}

/// Unitary instance: `p = 0`, unit 1-disruption, integer deadline in
/// `0..=depth`, integer weights.
pub fn random_unitary(seed: u64, n: usize) -> Instance {
    let mut rng = Rng::new(seed);
    let g = random_dag(&mut rng, n, 0.2, vec![0.0; n]);
    let delta = UncertaintySet::OneDisruption { dhat0: 1.0 };
    let depth = anchorsched::uncertainty::deviated_longest(&g, &vec![1.0; n]).value(SOURCE, n + 1);
    let m = rng.int_in(0, depth as i64) as f64;
    let w = (0..n).map(|_| rng.int_in(0, 4) as f64).collect();
    Instance::new(g, delta, m, w).unwrap()
}

/// Critical series-parallel instance under 1-disruption uncertainty with a
/// deadline that is generally not tightened.
pub fn random_critical_sp(seed: u64, n: usize) -> Instance {
    let mut rng = Rng::new(seed);
    let base = gen_sp(n, rng.next_u64());
    let p = gen_processing(ProcessingClass::QuasiCritical, &base, rng.next_u64());
    let g = base.with_processing_times(p).unwrap();
    let dhat0 = rng.int_in(1, 5) as f64;
    let l0 = g.min_makespan();
    let m = l0 + rng.unit() * dhat0 * (n as f64 / 2.0);
    let w = (0..n).map(|_| rng.int_in(1, 3) as f64).collect();
    Instance::new(g, UncertaintySet::OneDisruption { dhat0 }, m, w).unwrap()
}

/// A random anchored set grown by adding jobs in random order while the set
/// stays anchored.
pub fn random_anchored_set(inst: &Instance, ld: &LongestPathMatrix, rng: &mut Rng) -> Vec<usize> {
    let mut order: Vec<usize> = (1..=inst.n()).collect();
    rng.shuffle(&mut order);
    let mut h: Vec<usize> = Vec::new();
    for j in order {
        if rng.bernoulli(0.2) {
            continue;
        }
        let mut cand = h.clone();
        cand.push(j);
        cand.sort_unstable();
        if is_anchored_set(inst, ld, &cand) {
            h = cand;
        }
    }
    h
}
