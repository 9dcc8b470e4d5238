//! Uncertainty sets on processing-time deviations and the worst-case
//! longest path values `L^Δ_ij = max_{δ∈Δ} L_{G(p+δ)}(i, j)`.
//!
//! Deviation vectors are indexed by job (`dhat[j - 1]` belongs to job `j`).
//! Every set is treated as down-monotone: `δ ∈ Δ` and `0 ≤ δ' ≤ δ` imply
//! `δ' ∈ Δ`.

use crate::error::{Error, Result};
use crate::graph::{all_pairs_longest, LongestPathMatrix, PrecedenceGraph, EPS, SOURCE};
use crate::milp::{solve_lp, MipModel, Relation, Sense, SolveStatus};

/// Largest number of deviation vectors [`extreme_points`] will materialize.
pub const ENUMERATION_LIMIT: usize = 1 << 20;

/// Largest job count accepted by [`extreme_points`].
pub const ENUMERATION_MAX_JOBS: usize = 20;

/// Largest number of budget-vector states in the partition dynamic program.
pub const PARTITION_STATE_LIMIT: usize = 1_000_000;

/// One budgeted set: at most `gamma` jobs deviate, job `j` by at most `dhat[j-1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Budget {
    pub dhat: Vec<f64>,
    pub gamma: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum UncertaintySet {
    /// `0 ≤ δ ≤ dhat`.
    Box { dhat: Vec<f64> },
    /// `δ = (dhat_i u_i)` with `u ∈ [0,1]^J`, `Σ u ≤ gamma`.
    Budgeted { dhat: Vec<f64>, gamma: usize },
    /// Budgeted with `Γ = 1` and uniform deviation `dhat0`.
    OneDisruption { dhat0: f64 },
    /// One budget `gammas[k]` per group `parts[k]` of a partition of the jobs.
    PartitionBudgeted {
        dhat: Vec<f64>,
        parts: Vec<Vec<usize>>,
        gammas: Vec<usize>,
    },
    /// Union of budgeted sets.
    MixedBudgeted { components: Vec<Budget> },
    /// Convex hull of explicit scenarios.
    Scenarios { deltas: Vec<Vec<f64>> },
}

fn check_deviations(what: &str, dhat: &[f64], n: usize) -> Result<()> {
    if dhat.len() != n {
        return Err(Error::InvalidUncertainty(format!(
            "{what}: expected {n} deviations, got {}",
            dhat.len()
        )));
    }
    if let Some((j, v)) = dhat.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v >= 0.0)) {
        return Err(Error::InvalidUncertainty(format!(
            "{what}: deviation of job {} must be a nonnegative real, got {v}",
            j + 1
        )));
    }
    Ok(())
}

impl UncertaintySet {
    pub fn kind(&self) -> &'static str {
        match self {
            UncertaintySet::Box { .. } => "box",
            UncertaintySet::Budgeted { .. } => "budgeted",
            UncertaintySet::OneDisruption { .. } => "one_disruption",
            UncertaintySet::PartitionBudgeted { .. } => "partition",
            UncertaintySet::MixedBudgeted { .. } => "mixed",
            UncertaintySet::Scenarios { .. } => "scenarios",
        }
    }

    /// Checks the set against a project with `n` jobs.
    pub fn validate(&self, n: usize) -> Result<()> {
        match self {
            UncertaintySet::Box { dhat } => check_deviations("box", dhat, n),
            UncertaintySet::Budgeted { dhat, gamma } => {
                check_deviations("budgeted", dhat, n)?;
                if *gamma < 1 || *gamma > n.max(1) {
                    return Err(Error::BudgetOutOfRange(format!(
                        "budget {gamma} outside 1..={n}"
                    )));
                }
                Ok(())
            }
            UncertaintySet::OneDisruption { dhat0 } => {
                if !(dhat0.is_finite() && *dhat0 >= 0.0) {
                    return Err(Error::InvalidUncertainty(format!(
                        "1-disruption deviation must be nonnegative, got {dhat0}"
                    )));
                }
                Ok(())
            }
            UncertaintySet::PartitionBudgeted { dhat, parts, gammas } => {
                check_deviations("partition", dhat, n)?;
                if parts.len() != gammas.len() {
                    return Err(Error::InvalidUncertainty(format!(
                        "{} groups but {} budgets",
                        parts.len(),
                        gammas.len()
                    )));
                }
                let mut seen = vec![false; n + 1];
                for (k, part) in parts.iter().enumerate() {
                    for &j in part {
                        if j == 0 || j > n {
                            return Err(Error::InvalidUncertainty(format!(
                                "group {k} contains unknown job {j}"
                            )));
                        }
                        if seen[j] {
                            return Err(Error::InvalidUncertainty(format!(
                                "job {j} appears in several groups"
                            )));
                        }
                        seen[j] = true;
                    }
                    if gammas[k] < 1 || gammas[k] > part.len() {
                        return Err(Error::BudgetOutOfRange(format!(
                            "group {k}: budget {} outside 1..={}",
                            gammas[k],
                            part.len()
                        )));
                    }
                }
                if let Some(j) = (1..=n).find(|&j| !seen[j]) {
                    return Err(Error::InvalidUncertainty(format!(
                        "job {j} belongs to no group"
                    )));
                }
                Ok(())
            }
            UncertaintySet::MixedBudgeted { components } => {
                if components.is_empty() {
                    return Err(Error::InvalidUncertainty("mixed set without components".into()));
                }
                for c in components {
                    UncertaintySet::Budgeted {
                        dhat: c.dhat.clone(),
                        gamma: c.gamma,
                    }
                    .validate(n)?;
                }
                Ok(())
            }
            UncertaintySet::Scenarios { deltas } => {
                if deltas.is_empty() {
                    return Err(Error::EmptyScenarioList);
                }
                deltas
                    .iter()
                    .try_for_each(|d| check_deviations("scenario", d, n))
            }
        }
    }

    /// `(dhat, Γ)` when the set is budgeted in the sense of the layered
    /// formulation: budgeted, 1-disruption, or a box (`Γ = n`).
    pub fn as_budgeted(&self, n: usize) -> Option<(Vec<f64>, usize)> {
        match self {
            UncertaintySet::Budgeted { dhat, gamma } => Some((dhat.clone(), *gamma)),
            UncertaintySet::OneDisruption { dhat0 } => Some((vec![*dhat0; n], 1)),
            UncertaintySet::Box { dhat } => Some((dhat.clone(), n)),
            _ => None,
        }
    }

    /// Componentwise maximal deviation `max_{δ∈Δ} δ_j` for every job.
    pub fn max_deviation(&self, n: usize) -> Vec<f64> {
        match self {
            UncertaintySet::Box { dhat }
            | UncertaintySet::Budgeted { dhat, .. }
            | UncertaintySet::PartitionBudgeted { dhat, .. } => dhat.clone(),
            UncertaintySet::OneDisruption { dhat0 } => vec![*dhat0; n],
            UncertaintySet::MixedBudgeted { components } => (0..n)
                .map(|j| components.iter().map(|c| c.dhat[j]).fold(0.0, f64::max))
                .collect(),
            UncertaintySet::Scenarios { deltas } => (0..n)
                .map(|j| deltas.iter().map(|d| d[j]).fold(0.0, f64::max))
                .collect(),
        }
    }

    /// The greatest element of `Δ`, when one exists. A set with a greatest
    /// element `δ̂` behaves exactly like the box `[0, δ̂]`.
    pub fn greatest_element(&self, n: usize) -> Option<Vec<f64>> {
        let budget_covers = |dhat: &[f64], jobs: &mut dyn Iterator<Item = usize>, gamma: usize| {
            jobs.filter(|&j| dhat[j] > 0.0).count() <= gamma
        };
        match self {
            UncertaintySet::Box { dhat } => Some(dhat.clone()),
            UncertaintySet::Budgeted { dhat, gamma } => {
                budget_covers(dhat, &mut (0..n), *gamma).then(|| dhat.clone())
            }
            UncertaintySet::OneDisruption { dhat0 } => {
                (n <= 1 || *dhat0 == 0.0).then(|| vec![*dhat0; n])
            }
            UncertaintySet::PartitionBudgeted { dhat, parts, gammas } => parts
                .iter()
                .zip(gammas)
                .all(|(part, &g)| budget_covers(dhat, &mut part.iter().map(|&j| j - 1), g))
                .then(|| dhat.clone()),
            UncertaintySet::MixedBudgeted { components } => {
                let top = self.max_deviation(n);
                components.iter().find_map(|c| {
                    let full = UncertaintySet::Budgeted {
                        dhat: c.dhat.clone(),
                        gamma: c.gamma,
                    }
                    .greatest_element(n)?;
                    full.iter()
                        .zip(&top)
                        .all(|(a, b)| a >= b)
                        .then_some(full)
                })
            }
            UncertaintySet::Scenarios { deltas } => {
                let top = self.max_deviation(n);
                deltas
                    .iter()
                    .find(|d| d.iter().zip(&top).all(|(a, b)| a >= b))
                    .cloned()
            }
        }
    }

    /// `δ̂₀` when the set is a 1-disruption set: `Γ = 1` with a uniform deviation.
    pub fn one_disruption_deviation(&self, n: usize) -> Option<f64> {
        let uniform = |dhat: &[f64]| {
            let first = *dhat.first()?;
            dhat.iter().all(|&d| d == first).then_some(first)
        };
        match self {
            UncertaintySet::OneDisruption { dhat0 } => Some(*dhat0),
            UncertaintySet::Budgeted { dhat, gamma: 1 } => uniform(dhat),
            UncertaintySet::Box { dhat } if n == 1 => uniform(dhat),
            UncertaintySet::PartitionBudgeted { dhat, parts, gammas } if parts.len() == 1 && gammas[0] == 1 => {
                uniform(dhat)
            }
            UncertaintySet::MixedBudgeted { components } if components.len() == 1 => {
                let c = &components[0];
                if c.gamma == 1 {
                    uniform(&c.dhat)
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    /// Down-monotone membership test.
    ///
    /// Budgeted-type sets check `δ ≤ δ̂` and `Σ δ_i / δ̂_i ≤ Γ` (with `0/0 = 0`);
    /// a mixed set is the union of its components; a scenario set is the
    /// down-monotone hull of the scenarios' convex hull, decided by an LP.
    pub fn contains(&self, delta: &[f64]) -> bool {
        let n = delta.len();
        if delta.iter().any(|&d| d < -EPS) {
            return false;
        }
        match self {
            UncertaintySet::Box { dhat } => delta.iter().zip(dhat).all(|(d, h)| *d <= h + EPS),
            UncertaintySet::Budgeted { dhat, gamma } => {
                budget_usage(delta, dhat, 0..n).is_some_and(|u| u <= *gamma as f64 + EPS)
            }
            UncertaintySet::OneDisruption { dhat0 } => UncertaintySet::Budgeted {
                dhat: vec![*dhat0; n],
                gamma: 1,
            }
            .contains(delta),
            UncertaintySet::PartitionBudgeted { dhat, parts, gammas } => {
                parts.iter().zip(gammas).all(|(part, &g)| {
                    budget_usage(delta, dhat, part.iter().map(|&j| j - 1))
                        .is_some_and(|u| u <= g as f64 + EPS)
                })
            }
            UncertaintySet::MixedBudgeted { components } => components.iter().any(|c| {
                UncertaintySet::Budgeted {
                    dhat: c.dhat.clone(),
                    gamma: c.gamma,
                }
                .contains(delta)
            }),
            UncertaintySet::Scenarios { deltas } => scenario_hull_contains(deltas, delta),
        }
    }
}

/// `Σ δ_i / δ̂_i` over `jobs`, or `None` if some `δ_i > δ̂_i`.
fn budget_usage(delta: &[f64], dhat: &[f64], jobs: impl Iterator<Item = usize>) -> Option<f64> {
    let mut used = 0.0;
    for i in jobs {
        let (d, h) = (delta[i].max(0.0), dhat[i]);
        if d > h + EPS {
            return None;
        }
        if h > 0.0 {
            used += d / h;
        }
    }
    Some(used)
}

/// Is `δ ≤ Σ_s λ_s δ^s` for some convex combination `λ`?
fn scenario_hull_contains(scenarios: &[Vec<f64>], delta: &[f64]) -> bool {
    if scenarios.is_empty() {
        return delta.iter().all(|&d| d <= EPS);
    }
    let mut model = MipModel::new(Sense::Minimize);
    let lambdas: Vec<_> = (0..scenarios.len())
        .map(|s| model.add_continuous(format!("lambda_{s}"), 0.0, f64::INFINITY))
        .collect();
    model.add_constraint(
        "convexity",
        lambdas.iter().map(|&v| (v, 1.0)).collect(),
        Relation::Eq,
        1.0,
    );
    for (i, &d) in delta.iter().enumerate() {
        if d <= EPS {
            continue;
        }
        let terms = lambdas
            .iter()
            .zip(scenarios)
            .filter(|(_, sc)| sc[i] != 0.0)
            .map(|(&v, sc)| (v, sc[i]))
            .collect();
        model.add_constraint(format!("cover_{}", i + 1), terms, Relation::Ge, d - EPS);
    }
    matches!(solve_lp(&model).map(|r| r.status), Ok(SolveStatus::Optimal))
}

/// Values `val(v, γ)`: longest path from a fixed source to `v` in which at
/// most `γ` jobs take their deviated length `p_i + δ̂_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct BudgetTable {
    gamma: usize,
    values: Vec<f64>,
}

impl BudgetTable {
    pub fn gamma(&self) -> usize {
        self.gamma
    }

    /// `val(v, γ)`; `-inf` when `v` is unreachable from the source.
    pub fn get(&self, v: usize, gamma: usize) -> f64 {
        self.values[v * (self.gamma + 1) + gamma.min(self.gamma)]
    }

    /// `L^Δ_{source,v}`, the value with the whole budget available.
    pub fn worst_case(&self, v: usize) -> f64 {
        self.get(v, self.gamma)
    }
}

/// Longest paths from `source` under a single budget `gamma` on the jobs
/// listed in `dhat` (job-indexed). Runs in `O(Γ·|A|)`.
///
/// Recurrence over the topological order:
/// `val(j, γ) = max_{(i,j)} max(val(i, γ) + p_i, val(i, γ-1) + p_i + δ̂_i)`.
pub fn budgeted_dp(g: &PrecedenceGraph, dhat: &[f64], gamma: usize, source: usize) -> BudgetTable {
    let width = gamma + 1;
    let mut values = vec![f64::NEG_INFINITY; g.num_vertices() * width];
    values[source * width..(source + 1) * width].fill(0.0);
    let dev = |v: usize| if v == SOURCE || v > g.n() { 0.0 } else { dhat[v - 1] };
    for &i in g.topological_order() {
        if values[i * width] == f64::NEG_INFINITY {
            continue;
        }
        let (pi, di) = (g.p(i), dev(i));
        for &j in g.successors(i) {
            for b in 0..width {
                let mut cand = values[i * width + b] + pi;
                if b > 0 {
                    cand = cand.max(values[i * width + b - 1] + pi + di);
                }
                let slot = &mut values[j * width + b];
                if cand > *slot {
                    *slot = cand;
                }
            }
        }
    }
    BudgetTable { gamma, values }
}

/// Budget-vector longest paths from `source` for a partition-budgeted set;
/// returns `L^Δ_{source, v}` for every vertex.
fn partition_dp(
    g: &PrecedenceGraph,
    dhat: &[f64],
    group_of: &[usize],
    gammas: &[usize],
    source: usize,
) -> Vec<f64> {
    let strides: Vec<usize> = gammas
        .iter()
        .scan(1usize, |acc, &gm| {
            let s = *acc;
            *acc *= gm + 1;
            Some(s)
        })
        .collect();
    let states: usize = gammas.iter().map(|&gm| gm + 1).product();
    // digit of group k in state index
    let digit = |state: usize, k: usize| (state / strides[k]) % (gammas[k] + 1);

    let mut values = vec![f64::NEG_INFINITY; g.num_vertices() * states];
    values[source * states..(source + 1) * states].fill(0.0);
    for &i in g.topological_order() {
        if values[i * states] == f64::NEG_INFINITY {
            continue;
        }
        let pi = g.p(i);
        let job = i != SOURCE && i <= g.n();
        for &j in g.successors(i) {
            for b in 0..states {
                let mut cand = values[i * states + b] + pi;
                if job {
                    let k = group_of[i - 1];
                    if digit(b, k) > 0 {
                        cand = cand.max(values[i * states + b - strides[k]] + pi + dhat[i - 1]);
                    }
                }
                let slot = &mut values[j * states + b];
                if cand > *slot {
                    *slot = cand;
                }
            }
        }
    }
    (0..g.num_vertices())
        .map(|v| values[v * states + states - 1])
        .collect()
}

fn fill_row(m: &mut LongestPathMatrix, g: &PrecedenceGraph, src: usize, row: impl Fn(usize) -> f64) {
    for j in 0..g.num_vertices() {
        if g.precedes(src, j) {
            m.set(src, j, row(j));
        }
    }
}

fn budgeted_matrix(g: &PrecedenceGraph, dhat: &[f64], gamma: usize) -> LongestPathMatrix {
    let mut m = LongestPathMatrix::empty(g.num_vertices());
    let gamma = gamma.min(g.n());
    for src in 0..g.num_vertices() {
        if src == g.sink() {
            continue;
        }
        let table = budgeted_dp(g, dhat, gamma, src);
        fill_row(&mut m, g, src, |j| table.worst_case(j));
    }
    m
}

/// All-pairs longest paths of `G(p + δ)` for one job-indexed `δ`.
pub fn deviated_longest(g: &PrecedenceGraph, delta: &[f64]) -> LongestPathMatrix {
    let n = g.n();
    all_pairs_longest(g, |i, _| g.p(i) + if i == SOURCE || i > n { 0.0 } else { delta[i - 1] })
}

/// Worst-case longest path values `L^Δ_ij` for every `i ≺ j`.
pub fn worst_case_longest_paths(g: &PrecedenceGraph, delta: &UncertaintySet) -> Result<LongestPathMatrix> {
    let n = g.n();
    delta.validate(n)?;
    match delta {
        UncertaintySet::Box { dhat } => Ok(deviated_longest(g, dhat)),
        UncertaintySet::Budgeted { dhat, gamma } => Ok(budgeted_matrix(g, dhat, *gamma)),
        UncertaintySet::OneDisruption { dhat0 } => Ok(budgeted_matrix(g, &vec![*dhat0; n], 1)),
        UncertaintySet::PartitionBudgeted { dhat, parts, gammas } => {
            let states = gammas
                .iter()
                .try_fold(1usize, |acc, &gm| acc.checked_mul(gm + 1))
                .filter(|&s| s <= PARTITION_STATE_LIMIT);
            if states.is_none() {
                return Err(Error::BudgetOutOfRange(format!(
                    "partition budgets {gammas:?} exceed {PARTITION_STATE_LIMIT} DP states"
                )));
            }
            let mut group_of = vec![0usize; n];
            for (k, part) in parts.iter().enumerate() {
                for &j in part {
                    group_of[j - 1] = k;
                }
            }
            let mut m = LongestPathMatrix::empty(g.num_vertices());
            for src in 0..g.num_vertices() {
                if src == g.sink() {
                    continue;
                }
                let row = partition_dp(g, dhat, &group_of, gammas, src);
                fill_row(&mut m, g, src, |j| row[j]);
            }
            Ok(m)
        }
        UncertaintySet::MixedBudgeted { components } => {
            let mut iter = components.iter().map(|c| budgeted_matrix(g, &c.dhat, c.gamma));
            let mut acc = iter.next().expect("validated: nonempty");
            for m in iter {
                acc.max_assign(&m);
            }
            Ok(acc)
        }
        UncertaintySet::Scenarios { deltas } => {
            let mut iter = deltas.iter().map(|d| deviated_longest(g, d));
            let mut acc = iter.next().ok_or(Error::EmptyScenarioList)?;
            for m in iter {
                acc.max_assign(&m);
            }
            Ok(acc)
        }
    }
}

fn binomial_prefix(n: usize, k: usize) -> usize {
    // Σ_{i ≤ k} C(n, i), saturating
    let mut total = 0usize;
    let mut c = 1usize;
    for i in 0..=k.min(n) {
        total = total.saturating_add(c);
        c = c.saturating_mul(n - i) / (i + 1);
    }
    total
}

/// Masks over `jobs` with at most `k` bits set, in increasing mask order.
fn bounded_patterns(len: usize, k: usize) -> impl Iterator<Item = u32> {
    (0u32..(1u32 << len)).filter(move |m| m.count_ones() as usize <= k)
}

/// Enumerates the extreme deviation vectors of `Δ` (all `0/δ̂` patterns within
/// budget for budgeted-type sets, the union for mixed sets, the scenarios
/// themselves for scenario sets).
pub fn extreme_points(delta: &UncertaintySet, n: usize) -> Result<Vec<Vec<f64>>> {
    if n > ENUMERATION_MAX_JOBS && !matches!(delta, UncertaintySet::Scenarios { .. }) {
        return Err(Error::EnumerationTooLarge(format!(
            "{n} jobs exceeds the limit of {ENUMERATION_MAX_JOBS}"
        )));
    }
    let too_large = |count: usize| {
        Error::EnumerationTooLarge(format!("{count} points exceeds the limit of {ENUMERATION_LIMIT}"))
    };
    let budget_points = |dhat: &[f64], gamma: usize| -> Result<Vec<Vec<f64>>> {
        let count = binomial_prefix(n, gamma);
        if count > ENUMERATION_LIMIT {
            return Err(too_large(count));
        }
        Ok(bounded_patterns(n, gamma)
            .map(|mask| {
                (0..n)
                    .map(|j| if mask >> j & 1 == 1 { dhat[j] } else { 0.0 })
                    .collect()
            })
            .collect())
    };
    match delta {
        UncertaintySet::Box { dhat } => budget_points(dhat, n),
        UncertaintySet::Budgeted { dhat, gamma } => budget_points(dhat, *gamma),
        UncertaintySet::OneDisruption { dhat0 } => budget_points(&vec![*dhat0; n], 1),
        UncertaintySet::PartitionBudgeted { dhat, parts, gammas } => {
            let count = parts
                .iter()
                .zip(gammas)
                .try_fold(1usize, |acc, (part, &g)| acc.checked_mul(binomial_prefix(part.len(), g)))
                .unwrap_or(usize::MAX);
            if count > ENUMERATION_LIMIT {
                return Err(too_large(count));
            }
            let mut points = vec![vec![0.0; n]];
            for (part, &g) in parts.iter().zip(gammas) {
                let mut next = Vec::with_capacity(points.len() * binomial_prefix(part.len(), g));
                for base in &points {
                    for mask in bounded_patterns(part.len(), g) {
                        let mut p: Vec<f64> = base.clone();
                        for (b, &j) in part.iter().enumerate() {
                            if mask >> b & 1 == 1 {
                                p[j - 1] = dhat[j - 1];
                            }
                        }
                        next.push(p);
                    }
                }
                points = next;
            }
            Ok(points)
        }
        UncertaintySet::MixedBudgeted { components } => {
            let mut points: Vec<Vec<f64>> = Vec::new();
            for c in components {
                for p in budget_points(&c.dhat, c.gamma)? {
                    if !points.contains(&p) {
                        points.push(p);
                    }
                }
                if points.len() > ENUMERATION_LIMIT {
                    return Err(too_large(points.len()));
                }
            }
            Ok(points)
        }
        UncertaintySet::Scenarios { deltas } => {
            if deltas.is_empty() {
                return Err(Error::EmptyScenarioList);
            }
            Ok(deltas.clone())
        }
    }
}
