//! Precedence graphs, longest paths and schedules.
//!
//! Vertices are numbered `0..=n+1`: the source `s` is `0`, jobs are `1..=n`
//! and the sink `t` is `n + 1`. Every arc `(i, j)` has length `p_i`, the
//! processing time of its tail, with `p_s = p_t = 0`.

use std::collections::VecDeque;

use crate::error::{Error, Result};

/// Tolerance used for every floating-point comparison on times.
pub const EPS: f64 = 1e-6;

/// Index of the dummy source job `s`.
pub const SOURCE: usize = 0;

/// Transitive closure stored as one bitset row per vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Reachability {
    words: usize,
    bits: Vec<u64>,
}

impl Reachability {
    fn new(num_vertices: usize, succ: &[Vec<usize>], topo: &[usize]) -> Self {
        let words = num_vertices.div_ceil(64);
        let mut bits = vec![0u64; words * num_vertices];
        let mut row = vec![0u64; words];
        for &v in topo.iter().rev() {
            row.iter_mut().for_each(|x| *x = 0);
            for &w in &succ[v] {
                for (x, y) in row.iter_mut().zip(&bits[w * words..(w + 1) * words]) {
                    *x |= *y;
                }
                row[w / 64] |= 1u64 << (w % 64);
            }
            bits[v * words..(v + 1) * words].copy_from_slice(&row);
        }
        Reachability { words, bits }
    }

    #[inline]
    fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }
}

/// A precedence graph `G(p)`: a DAG over `{s} ∪ J ∪ {t}` with nominal
/// processing times. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct PrecedenceGraph {
    n: usize,
    arcs: Vec<(usize, usize)>,
    succ: Vec<Vec<usize>>,
    pred: Vec<Vec<usize>>,
    p: Vec<f64>,
    topo: Vec<usize>,
    reach: Reachability,
}

impl PrecedenceGraph {
    /// Builds and validates a graph from its full arc list (including arcs
    /// incident to `s` and `t`) and the processing times of jobs `1..=n`.
    pub fn new(n: usize, arcs: Vec<(usize, usize)>, p: Vec<f64>) -> Result<Self> {
        let nv = n + 2;
        let sink = n + 1;
        if p.len() != n {
            return Err(Error::InvalidGraph(format!(
                "expected {n} processing times, got {}",
                p.len()
            )));
        }
        if let Some((j, v)) = p.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::InvalidGraph(format!(
                "processing time of job {} must be a nonnegative real, got {v}",
                j + 1
            )));
        }
        let mut arcs = arcs;
        for &(i, j) in &arcs {
            if i >= nv || j >= nv {
                return Err(Error::InvalidGraph(format!("arc ({i},{j}) out of range")));
            }
            if i == j {
                return Err(Error::CycleDetected);
            }
        }
        arcs.sort_unstable();
        arcs.dedup();

        let mut succ = vec![Vec::new(); nv];
        let mut pred = vec![Vec::new(); nv];
        for &(i, j) in &arcs {
            succ[i].push(j);
            pred[j].push(i);
        }
        let topo = topological_order(nv, &succ)?;

        if !pred[SOURCE].is_empty() {
            return Err(Error::InvalidGraph("source s has incoming arcs".into()));
        }
        if !succ[sink].is_empty() {
            return Err(Error::InvalidGraph("sink t has outgoing arcs".into()));
        }
        for j in 1..=n {
            if pred[j].is_empty() {
                return Err(Error::InvalidGraph(format!("job {j} has no predecessor")));
            }
            if succ[j].is_empty() {
                return Err(Error::InvalidGraph(format!("job {j} has no successor")));
            }
            let has_job_pred = pred[j].iter().any(|&i| i != SOURCE);
            if !has_job_pred && !pred[j].contains(&SOURCE) {
                return Err(Error::InvalidGraph(format!("job {j} lacks arc from s")));
            }
            let has_job_succ = succ[j].iter().any(|&k| k != sink);
            if !has_job_succ && !succ[j].contains(&sink) {
                return Err(Error::InvalidGraph(format!("job {j} lacks arc to t")));
            }
        }
        if n == 0 && !arcs.contains(&(SOURCE, sink)) {
            return Err(Error::InvalidGraph("empty project needs the arc (s,t)".into()));
        }

        let reach = Reachability::new(nv, &succ, &topo);
        if !reach.get(SOURCE, sink) {
            return Err(Error::InvalidGraph("t is not reachable from s".into()));
        }

        let mut pv = Vec::with_capacity(nv);
        pv.push(0.0);
        pv.extend_from_slice(&p);
        pv.push(0.0);

        Ok(PrecedenceGraph {
            n,
            arcs,
            succ,
            pred,
            p: pv,
            topo,
            reach,
        })
    }

    /// Builds a graph from arcs between jobs only; arcs `(s, j)` and `(j, t)`
    /// are added for jobs without job predecessor / successor.
    pub fn from_job_arcs(n: usize, job_arcs: &[(usize, usize)], p: Vec<f64>) -> Result<Self> {
        let sink = n + 1;
        let mut has_pred = vec![false; n + 2];
        let mut has_succ = vec![false; n + 2];
        let mut arcs = Vec::with_capacity(job_arcs.len() + 2 * n);
        for &(i, j) in job_arcs {
            if i == SOURCE || j == SOURCE || i > n || j > n || i == sink || j == sink {
                return Err(Error::InvalidGraph(format!("({i},{j}) is not a job arc")));
            }
            has_succ[i] = true;
            has_pred[j] = true;
            arcs.push((i, j));
        }
        for j in 1..=n {
            if !has_pred[j] {
                arcs.push((SOURCE, j));
            }
            if !has_succ[j] {
                arcs.push((j, sink));
            }
        }
        if n == 0 {
            arcs.push((SOURCE, sink));
        }
        Self::new(n, arcs, p)
    }

    /// Same arcs, new processing times for jobs `1..=n`.
    pub fn with_processing_times(&self, p: Vec<f64>) -> Result<Self> {
        Self::new(self.n, self.arcs.clone(), p)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_vertices(&self) -> usize {
        self.n + 2
    }

    pub fn source(&self) -> usize {
        SOURCE
    }

    pub fn sink(&self) -> usize {
        self.n + 1
    }

    pub fn jobs(&self) -> std::ops::RangeInclusive<usize> {
        1..=self.n
    }

    pub fn arcs(&self) -> &[(usize, usize)] {
        &self.arcs
    }

    /// Arcs with both endpoints in `J`.
    pub fn job_arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let sink = self.sink();
        self.arcs
            .iter()
            .copied()
            .filter(move |&(i, j)| i != SOURCE && j != sink)
    }

    pub fn successors(&self, v: usize) -> &[usize] {
        &self.succ[v]
    }

    pub fn predecessors(&self, v: usize) -> &[usize] {
        &self.pred[v]
    }

    /// Processing time of vertex `v` (zero for `s` and `t`).
    pub fn p(&self, v: usize) -> f64 {
        self.p[v]
    }

    /// Processing times indexed by vertex.
    pub fn vertex_processing_times(&self) -> &[f64] {
        &self.p
    }

    /// Processing times of jobs `1..=n` (index `j - 1`).
    pub fn job_processing_times(&self) -> &[f64] {
        &self.p[1..=self.n]
    }

    /// Cached topological order; `s` first and `t` last.
    pub fn topological_order(&self) -> &[usize] {
        &self.topo
    }

    /// `i ≺ j`: there is a nonempty path from `i` to `j`.
    #[inline]
    pub fn precedes(&self, i: usize, j: usize) -> bool {
        self.reach.get(i, j)
    }

    /// All comparable pairs `(i, j)` with `i ≺ j`.
    pub fn comparable_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let nv = self.num_vertices();
        (0..nv).flat_map(move |i| (0..nv).filter(move |&j| self.precedes(i, j)).map(move |j| (i, j)))
    }

    /// True when job `j` has a predecessor other than `s`.
    pub fn has_job_predecessor(&self, j: usize) -> bool {
        self.pred[j].iter().any(|&i| i != SOURCE)
    }

    /// Longest path lengths from `source` to every vertex, `-inf` when
    /// unreachable. Arc `(i, j)` has length `arc_weight(i, j)`.
    pub fn longest_from<F>(&self, source: usize, arc_weight: F) -> Vec<f64>
    where
        F: Fn(usize, usize) -> f64,
    {
        let mut dist = vec![f64::NEG_INFINITY; self.num_vertices()];
        dist[source] = 0.0;
        for &v in &self.topo {
            let dv = dist[v];
            if dv == f64::NEG_INFINITY {
                continue;
            }
            for &w in &self.succ[v] {
                let cand = dv + arc_weight(v, w);
                if cand > dist[w] {
                    dist[w] = cand;
                }
            }
        }
        dist
    }

    /// Longest path lengths from every vertex to `target`.
    pub fn longest_to<F>(&self, target: usize, arc_weight: F) -> Vec<f64>
    where
        F: Fn(usize, usize) -> f64,
    {
        let mut dist = vec![f64::NEG_INFINITY; self.num_vertices()];
        dist[target] = 0.0;
        for &v in self.topo.iter().rev() {
            let dv = dist[v];
            if dv == f64::NEG_INFINITY {
                continue;
            }
            for &u in &self.pred[v] {
                let cand = dv + arc_weight(u, v);
                if cand > dist[u] {
                    dist[u] = cand;
                }
            }
        }
        dist
    }

    /// Nominal longest paths `L⁰_sv` to every vertex.
    pub fn heads(&self) -> Vec<f64> {
        self.longest_from(SOURCE, |i, _| self.p[i])
    }

    /// Nominal longest paths `L⁰_vt` from every vertex.
    pub fn tails(&self) -> Vec<f64> {
        self.longest_to(self.sink(), |i, _| self.p[i])
    }

    /// Minimum makespan `L⁰_st`.
    pub fn min_makespan(&self) -> f64 {
        self.heads()[self.sink()]
    }
}

/// Kahn's algorithm over an adjacency list; fails on cycles.
pub fn topological_order(num_vertices: usize, succ: &[Vec<usize>]) -> Result<Vec<usize>> {
    let mut indeg = vec![0usize; num_vertices];
    for outs in succ {
        for &w in outs {
            indeg[w] += 1;
        }
    }
    let mut queue: VecDeque<usize> = (0..num_vertices).filter(|&v| indeg[v] == 0).collect();
    let mut order = Vec::with_capacity(num_vertices);
    while let Some(v) = queue.pop_front() {
        order.push(v);
        for &w in &succ[v] {
            indeg[w] -= 1;
            if indeg[w] == 0 {
                queue.push_back(w);
            }
        }
    }
    if order.len() != num_vertices {
        return Err(Error::CycleDetected);
    }
    Ok(order)
}

/// Pairwise longest path values `L(i, j)`, defined exactly for `i ≺ j`.
///
/// Used both for nominal values `L⁰` and worst-case values `L^Δ`.
#[derive(Debug, Clone, PartialEq)]
pub struct LongestPathMatrix {
    dim: usize,
    values: Vec<f64>,
}

impl LongestPathMatrix {
    /// A matrix with every pair undefined.
    pub fn empty(dim: usize) -> Self {
        LongestPathMatrix {
            dim,
            values: vec![f64::NEG_INFINITY; dim * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `Some(L(i, j))` when `i ≺ j`.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        let v = self.values[i * self.dim + j];
        (v != f64::NEG_INFINITY).then_some(v)
    }

    /// `L(i, j)`; panics when `i` and `j` are not comparable.
    #[inline]
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.get(i, j)
            .unwrap_or_else(|| panic!("longest path ({i},{j}) undefined: not comparable"))
    }

    #[inline]
    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.values[i * self.dim + j] != f64::NEG_INFINITY
    }

    pub(crate) fn set(&mut self, i: usize, j: usize, v: f64) {
        self.values[i * self.dim + j] = v;
    }

    /// Defined entries as `(i, j, value)`.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.values.iter().enumerate().filter_map(move |(k, &v)| {
            (v != f64::NEG_INFINITY).then_some((k / self.dim, k % self.dim, v))
        })
    }

    /// Entrywise maximum with `other` (same domain assumed).
    pub fn max_assign(&mut self, other: &LongestPathMatrix) {
        assert_eq!(self.dim, other.dim);
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            if *b > *a {
                *a = *b;
            }
        }
    }
}

/// All-pairs longest paths with arc lengths `arc_weight(i, j)`; one forward
/// pass per source vertex.
pub fn all_pairs_longest<F>(g: &PrecedenceGraph, arc_weight: F) -> LongestPathMatrix
where
    F: Fn(usize, usize) -> f64,
{
    let nv = g.num_vertices();
    let mut m = LongestPathMatrix::empty(nv);
    for src in 0..nv {
        let dist = g.longest_from(src, &arc_weight);
        for (j, d) in dist.into_iter().enumerate() {
            if j != src && d != f64::NEG_INFINITY {
                m.set(src, j, d);
            }
        }
    }
    m
}

/// Nominal matrix `L⁰` (arc `(i, j)` has length `p_i`).
pub fn nominal_longest(g: &PrecedenceGraph) -> LongestPathMatrix {
    all_pairs_longest(g, |i, _| g.p(i))
}

/// Starting times indexed by vertex (`start[0]` is `s`, `start[n+1]` is `t`).
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    pub start: Vec<f64>,
}

impl Schedule {
    pub fn new(start: Vec<f64>) -> Self {
        Schedule { start }
    }

    pub fn start(&self, v: usize) -> f64 {
        self.start[v]
    }

    pub fn makespan(&self) -> f64 {
        *self.start.last().expect("schedule has at least s and t")
    }

    pub fn len(&self) -> usize {
        self.start.len()
    }

    pub fn is_empty(&self) -> bool {
        self.start.is_empty()
    }
}

/// Earliest schedule: `start_v` is the longest `s`–`v` path.
pub fn earliest_schedule<F>(g: &PrecedenceGraph, arc_weight: F) -> Schedule
where
    F: Fn(usize, usize) -> f64,
{
    Schedule::new(g.longest_from(SOURCE, arc_weight))
}

/// Latest schedule of `G(p)` with makespan exactly `deadline`:
/// `start_j = M - L⁰_jt`.
pub fn latest_schedule(g: &PrecedenceGraph, deadline: f64) -> Result<Schedule> {
    let tails = g.tails();
    let min_makespan = tails[SOURCE];
    if deadline < min_makespan - EPS {
        return Err(Error::DeadlineInfeasible {
            deadline,
            min_makespan,
        });
    }
    let mut start: Vec<f64> = tails.iter().map(|&l| deadline - l).collect();
    start[SOURCE] = 0.0;
    Ok(Schedule::new(start))
}

/// Every `s`–`t` path has length `L⁰_st`.
pub fn is_critical(g: &PrecedenceGraph) -> bool {
    let longest = g.min_makespan();
    let mut shortest = vec![f64::INFINITY; g.num_vertices()];
    shortest[SOURCE] = 0.0;
    for &v in g.topological_order() {
        let dv = shortest[v];
        for &w in g.successors(v) {
            shortest[w] = shortest[w].min(dv + g.p(v));
        }
    }
    (longest - shortest[g.sink()]).abs() <= EPS
}

/// Every job lies on a critical path: `L⁰_si + L⁰_it = L⁰_st`.
pub fn is_quasi_critical(g: &PrecedenceGraph) -> bool {
    let heads = g.heads();
    let tails = g.tails();
    let total = heads[g.sink()];
    g.jobs().all(|i| (heads[i] + tails[i] - total).abs() <= EPS)
}

/// Checks `x_s = 0`, `x ≥ 0` and `x_j - x_i ≥ p_i` on every arc, within [`EPS`].
pub fn is_schedule(g: &PrecedenceGraph, x: &Schedule) -> bool {
    schedule_violation(g, x).is_none()
}

/// First violated schedule condition, if any.
pub fn schedule_violation(g: &PrecedenceGraph, x: &Schedule) -> Option<String> {
    if x.len() != g.num_vertices() {
        return Some(format!(
            "schedule has {} entries, expected {}",
            x.len(),
            g.num_vertices()
        ));
    }
    if x.start(SOURCE).abs() > EPS {
        return Some(format!("x_s = {} ≠ 0", x.start(SOURCE)));
    }
    if let Some(v) = (0..x.len()).find(|&v| x.start(v).is_nan() || x.start(v) < -EPS) {
        return Some(format!("x_{v} = {} is negative", x.start(v)));
    }
    g.arcs().iter().find_map(|&(i, j)| {
        (x.start(j) - x.start(i) < g.p(i) - EPS).then(|| {
            format!(
                "arc ({i},{j}): x_{j} - x_{i} = {} < p_{i} = {}",
                x.start(j) - x.start(i),
                g.p(i)
            )
        })
    })
}
