//! MIP formulations (Std), (Dom) and (Lay), the Chvátal-type bound on single
//! anchoring variables, and separation of chain inequalities.

use std::fmt;
use std::str::FromStr;

use crate::anchored::{dominant_schedule, AnchoredSolution, Instance};
use crate::error::{Error, Result};
use crate::graph::{is_critical, LongestPathMatrix, EPS, SOURCE};
use crate::milp::{
    solve_lp, solve_mip, solve_mip_with_cuts, Cut, CutCallback, MipModel, MipParams, Relation, Sense, SolveResult,
    SolveStatus, VarId,
};
use crate::exact::tighten_deadline;
use crate::uncertainty::deviated_longest;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Formulation {
    Std,
    Dom,
    Lay,
}

impl Formulation {
    pub const ALL: [Formulation; 3] = [Formulation::Std, Formulation::Dom, Formulation::Lay];

    pub fn name(self) -> &'static str {
        match self {
            Formulation::Std => "std",
            Formulation::Dom => "dom",
            Formulation::Lay => "lay",
        }
    }
}

impl fmt::Display for Formulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Formulation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "std" => Ok(Formulation::Std),
            "dom" => Ok(Formulation::Dom),
            "lay" => Ok(Formulation::Lay),
            other => Err(Error::parse("formulation", format!("unknown formulation {other:?}"))),
        }
    }
}

/// `L⁰` and `L^Δ` for one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrices {
    pub nominal: LongestPathMatrix,
    pub worst: LongestPathMatrix,
}

impl Matrices {
    pub fn new(inst: &Instance) -> Result<Self> {
        Ok(Matrices {
            nominal: inst.nominal(),
            worst: inst.worst_case()?,
        })
    }
}

/// A built model with the anchoring variables (`h[j-1]` for job `j`) and the
/// baseline schedule variables (indexed by vertex; empty for the pure-`h` model).
#[derive(Debug, Clone, PartialEq)]
pub struct BuiltModel {
    pub model: MipModel,
    pub h: Vec<VarId>,
    pub schedule: Vec<VarId>,
}

fn vertex_name(v: usize, n: usize) -> String {
    if v == SOURCE {
        "s".into()
    } else if v == n + 1 {
        "t".into()
    } else {
        v.to_string()
    }
}

fn anchoring_vars(model: &mut MipModel, inst: &Instance) -> Vec<VarId> {
    let h: Vec<VarId> = (1..=inst.n()).map(|j| model.add_binary(format!("h_{j}"))).collect();
    model.set_objective(h.iter().zip(&inst.weights).map(|(&v, &w)| (v, w)).collect());
    h
}

fn schedule_vars(model: &mut MipModel, prefix: &str, n: usize) -> Vec<VarId> {
    (0..n + 2)
        .map(|v| {
            let upper = if v == SOURCE { 0.0 } else { f64::INFINITY };
            model.add_continuous(format!("{prefix}_{}", vertex_name(v, n)), 0.0, upper)
        })
        .collect()
}

/// (Std): arc rows, `x_t ≤ M`, and `x_j - x_i ≥ L^Δ_ij (h_i + h_j - 1)` for
/// `i ∈ J ∪ {s}`, `j ∈ J`, `i ≺ j`, with `h_s = 1`. Rows with `j = t` have a
/// nonpositive right-hand side and are implied by the arc rows.
pub fn build_std(inst: &Instance, ld: &LongestPathMatrix) -> BuiltModel {
    let g = &inst.graph;
    let n = g.n();
    let mut model = MipModel::new(Sense::Maximize);
    let h = anchoring_vars(&mut model, inst);
    let x = schedule_vars(&mut model, "x", n);
    for &(i, j) in g.arcs() {
        let name = format!("arc_{}_{}", vertex_name(i, n), vertex_name(j, n));
        model.add_constraint(name, vec![(x[j], 1.0), (x[i], -1.0)], Relation::Ge, g.p(i));
    }
    model.add_constraint("deadline", vec![(x[n + 1], 1.0)], Relation::Le, inst.deadline);
    for (i, j) in g.comparable_pairs() {
        if j > n {
            continue;
        }
        let l = ld.value(i, j);
        let name = format!("std_{}_{}", vertex_name(i, n), vertex_name(j, n));
        if i == SOURCE {
            model.add_constraint(name, vec![(x[j], 1.0), (x[i], -1.0), (h[j - 1], -l)], Relation::Ge, 0.0);
        } else {
            model.add_constraint(
                name,
                vec![(x[j], 1.0), (x[i], -1.0), (h[i - 1], -l), (h[j - 1], -l)],
                Relation::Ge,
                -l,
            );
        }
    }
    BuiltModel { model, h, schedule: x }
}

/// (Dom): `z_t ≤ M` and `z_j - z_i ≥ L⁰_ij + (L^Δ_ij - L⁰_ij) h_j` for every
/// `i ∈ J ∪ {s}`, `j ∈ J ∪ {t}`, `i ≺ j`, with `h_t = 0`.
pub fn build_dom(inst: &Instance, l0: &LongestPathMatrix, ld: &LongestPathMatrix) -> BuiltModel {
    let g = &inst.graph;
    let n = g.n();
    let mut model = MipModel::new(Sense::Maximize);
    let h = anchoring_vars(&mut model, inst);
    let z = schedule_vars(&mut model, "z", n);
    model.add_constraint("deadline", vec![(z[n + 1], 1.0)], Relation::Le, inst.deadline);
    for (i, j) in g.comparable_pairs() {
        let name = format!("dom_{}_{}", vertex_name(i, n), vertex_name(j, n));
        let mut terms = vec![(z[j], 1.0), (z[i], -1.0)];
        if j <= n {
            let extra = ld.value(i, j) - l0.value(i, j);
            if extra != 0.0 {
                terms.push((h[j - 1], -extra));
            }
        }
        model.add_constraint(name, terms, Relation::Ge, l0.value(i, j));
    }
    BuiltModel { model, h, schedule: z }
}

/// `D_j = L_{G(p+δ̂)}(s, j) - L⁰_sj`, the vertical-arc offsets of (Lay).
pub fn lay_offsets(inst: &Instance, dhat: &[f64]) -> Vec<f64> {
    let g = &inst.graph;
    let full = deviated_longest(g, dhat);
    let heads = g.heads();
    g.jobs().map(|j| full.value(SOURCE, j) - heads[j]).collect()
}

/// (Lay) on `Γ + 1` copies of `G`: horizontal arcs of length `p_i`,
/// transversal arcs from layer `γ+1` to `γ` of length `p_i + δ̂_i`, vertical
/// arcs `x^Γ_j - x^γ_j ≥ -D_j (1 - h_j)`, and `x^Γ_t ≤ M`. The schedule
/// variables of the result are those of layer `Γ`.
pub fn build_lay(inst: &Instance, dhat: &[f64], gamma: usize) -> Result<BuiltModel> {
    let g = &inst.graph;
    let n = g.n();
    if dhat.len() != n {
        return Err(Error::InvalidUncertainty(format!("expected {n} deviations, got {}", dhat.len())));
    }
    let gamma = gamma.min(n);
    let offsets = lay_offsets(inst, dhat);
    let dev = |v: usize| if v == SOURCE || v > n { 0.0 } else { dhat[v - 1] };
    let mut model = MipModel::new(Sense::Maximize);
    let h = anchoring_vars(&mut model, inst);
    let layers: Vec<Vec<VarId>> = (0..=gamma)
        .map(|k| schedule_vars(&mut model, &format!("x{k}"), n))
        .collect();
    let name = |kind: &str, k: usize, i: usize, j: usize| {
        format!("{kind}{k}_{}_{}", vertex_name(i, n), vertex_name(j, n))
    };
    for (k, x) in layers.iter().enumerate() {
        for &(i, j) in g.arcs() {
            model.add_constraint(name("hor", k, i, j), vec![(x[j], 1.0), (x[i], -1.0)], Relation::Ge, g.p(i));
        }
    }
    for k in 0..gamma {
        for &(i, j) in g.arcs() {
            model.add_constraint(
                name("tr", k, i, j),
                vec![(layers[k][j], 1.0), (layers[k + 1][i], -1.0)],
                Relation::Ge,
                g.p(i) + dev(i),
            );
        }
    }
    for k in 0..gamma {
        for j in 1..=n {
            let d = offsets[j - 1];
            let mut terms = vec![(layers[gamma][j], 1.0), (layers[k][j], -1.0)];
            if d != 0.0 {
                terms.push((h[j - 1], -d));
            }
            model.add_constraint(format!("vert{k}_{j}"), terms, Relation::Ge, -d);
        }
    }
    model.add_constraint("deadline", vec![(layers[gamma][n + 1], 1.0)], Relation::Le, inst.deadline);
    Ok(BuiltModel {
        model,
        h,
        schedule: layers[gamma].clone(),
    })
}

/// `⌊(M - L⁰_sj - L⁰_jt) / (L^Δ_sj - L⁰_sj)⌋` clipped to `{0, 1}`; `None` when
/// the denominator vanishes and the inequality says nothing.
pub fn chvatal_bound(inst: &Instance, l0: &LongestPathMatrix, ld: &LongestPathMatrix, j: usize) -> Option<u8> {
    let t = inst.n() + 1;
    let denom = ld.value(SOURCE, j) - l0.value(SOURCE, j);
    if denom <= EPS {
        return None;
    }
    let num = inst.deadline - l0.value(SOURCE, j) - l0.value(j, t);
    let q = (num / denom + 1e-9).floor();
    Some(if q >= 1.0 { 1 } else { 0 })
}

/// Adds `h_j ≤ bound` for every job with a defined Chvátal bound.
pub fn add_chvatal_rows(built: &mut BuiltModel, inst: &Instance, l0: &LongestPathMatrix, ld: &LongestPathMatrix) {
    for j in 1..=inst.n() {
        if let Some(b) = chvatal_bound(inst, l0, ld, j) {
            built
                .model
                .add_constraint(format!("chv_{j}"), vec![(built.h[j - 1], 1.0)], Relation::Le, f64::from(b));
        }
    }
}

/// Which projected chain inequalities [`separate_chain`] checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainKind {
    Dom,
    Lay,
}

/// A chain `s = v_0 ≺ v_1 ≺ … ≺ v_k ≺ t` with the amount by which its
/// inequality exceeds `M`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainViolation {
    pub chain: Vec<usize>,
    pub lhs: f64,
    pub violation: f64,
}

/// Longest `s`–`t` path in the transitive closure under the chain weights of
/// the selected projection: `L⁰_ij + (L^Δ_ij - L⁰_ij) h_j` (Dom) or
/// `L^Δ_ij - D_j (1 - h_j)` (Lay), closing with `L⁰_{j t}`. Among chains of
/// equal length the one with fewer jobs is returned. `h` is job-indexed.
pub fn separate_chain(
    inst: &Instance,
    l0: &LongestPathMatrix,
    ld: &LongestPathMatrix,
    h: &[f64],
    kind: ChainKind,
) -> Result<Option<ChainViolation>> {
    let chain = longest_chain(inst, l0, ld, h, kind)?;
    Ok((chain.violation > EPS).then_some(chain))
}

/// Like [`separate_chain`] but always returns the longest chain.
pub fn longest_chain(
    inst: &Instance,
    l0: &LongestPathMatrix,
    ld: &LongestPathMatrix,
    h: &[f64],
    kind: ChainKind,
) -> Result<ChainViolation> {
    let g = &inst.graph;
    let n = g.n();
    let t = n + 1;
    let offsets = match kind {
        ChainKind::Dom => Vec::new(),
        ChainKind::Lay => {
            let (dhat, _) = inst.delta.as_budgeted(n).ok_or_else(|| {
                Error::UnsupportedUncertainty(format!("layered chains need a budgeted set, got {}", inst.delta.kind()))
            })?;
            lay_offsets(inst, &dhat)
        }
    };
    let weight = |i: usize, j: usize| match kind {
        ChainKind::Dom => l0.value(i, j) + (ld.value(i, j) - l0.value(i, j)) * h[j - 1],
        ChainKind::Lay => ld.value(i, j) - offsets[j - 1] * (1.0 - h[j - 1]),
    };
    // best[v] = (length, hops, predecessor)
    let mut best: Vec<Option<(f64, usize, usize)>> = vec![None; n + 2];
    best[SOURCE] = Some((0.0, 0, SOURCE));
    let improves = |cur: Option<(f64, usize, usize)>, len: f64, hops: usize| match cur {
        None => true,
        Some((l, k, _)) => len > l + 1e-12 || (len >= l - 1e-12 && hops < k),
    };
    let order = g.topological_order().to_vec();
    for &j in order.iter().filter(|&&v| v != SOURCE && v != t) {
        for &i in order.iter().take_while(|&&v| v != j) {
            if i == t || !g.precedes(i, j) {
                continue;
            }
            if let Some((li, ki, _)) = best[i] {
                let len = li + weight(i, j);
                if improves(best[j], len, ki + 1) {
                    best[j] = Some((len, ki + 1, i));
                }
            }
        }
    }
    for i in std::iter::once(SOURCE).chain(1..=n) {
        if !g.precedes(i, t) {
            continue;
        }
        if let Some((li, ki, _)) = best[i] {
            let len = li + l0.value(i, t);
            if improves(best[t], len, ki + 1) {
                best[t] = Some((len, ki + 1, i));
            }
        }
    }
    let (lhs, _, _) = best[t].expect("t is reachable from s");
    let mut chain = vec![t];
    let mut v = t;
    while v != SOURCE {
        v = best[v].expect("on the chain").2;
        chain.push(v);
    }
    chain.reverse();
    Ok(ChainViolation {
        chain,
        lhs,
        violation: lhs - inst.deadline,
    })
}

/// The (Dom) chain inequality of `chain` in `h` space:
/// `Σ (L^Δ_ij - L⁰_ij) h_j ≤ M - Σ L⁰_ij - L⁰_{j t}`.
pub fn dom_chain_cut(
    inst: &Instance,
    l0: &LongestPathMatrix,
    ld: &LongestPathMatrix,
    chain: &[usize],
    h: &[VarId],
) -> Cut {
    let t = inst.n() + 1;
    let mut rhs = inst.deadline;
    let mut terms = Vec::new();
    for w in chain.windows(2) {
        let (i, j) = (w[0], w[1]);
        rhs -= l0.value(i, j);
        if j != t {
            let extra = ld.value(i, j) - l0.value(i, j);
            if extra != 0.0 {
                terms.push((h[j - 1], extra));
            }
        }
    }
    Cut {
        terms,
        relation: Relation::Le,
        rhs,
    }
}

/// Pure anchoring model for row generation: `max Σ w_j h_j` over binaries,
/// with chain inequalities supplied lazily.
pub fn build_anchoring_only(inst: &Instance) -> BuiltModel {
    let mut model = MipModel::new(Sense::Maximize);
    let h = anchoring_vars(&mut model, inst);
    BuiltModel {
        model,
        h,
        schedule: Vec::new(),
    }
}

struct ChainSeparator<'a> {
    inst: &'a Instance,
    mats: &'a Matrices,
    h: Vec<VarId>,
}

impl CutCallback for ChainSeparator<'_> {
    fn separate(&mut self, x: &[f64]) -> Vec<Cut> {
        let hv: Vec<f64> = self.h.iter().map(|v| x[v.0].clamp(0.0, 1.0)).collect();
        match separate_chain(self.inst, &self.mats.nominal, &self.mats.worst, &hv, ChainKind::Dom) {
            Ok(Some(c)) => vec![dom_chain_cut(self.inst, &self.mats.nominal, &self.mats.worst, &c.chain, &self.h)],
            _ => Vec::new(),
        }
    }
}

/// The instance the models are built on: for a critical graph under
/// 1-disruption uncertainty the deadline is lowered to
/// `L⁰_st + δ̂₀ ⌊(M - L⁰_st)/δ̂₀⌋`, which keeps every anchored set feasible.
pub fn preprocess(inst: &Instance) -> Instance {
    if !is_critical(&inst.graph) {
        return inst.clone();
    }
    match tighten_deadline(inst) {
        Ok(m) if m < inst.deadline => inst.with_deadline(m),
        _ => inst.clone(),
    }
}

/// Builds the requested formulation (optionally with Chvátal rows) on the
/// preprocessed instance.
pub fn build(inst: &Instance, formulation: Formulation, mats: &Matrices, chvatal: bool) -> Result<BuiltModel> {
    let inst = &preprocess(inst);
    let mut built = match formulation {
        Formulation::Std => build_std(inst, &mats.worst),
        Formulation::Dom => build_dom(inst, &mats.nominal, &mats.worst),
        Formulation::Lay => {
            let (dhat, gamma) = inst.delta.as_budgeted(inst.n()).ok_or_else(|| {
                Error::UnsupportedUncertainty(format!("(Lay) needs a budgeted set, got {}", inst.delta.kind()))
            })?;
            build_lay(inst, &dhat, gamma)?
        }
    };
    if chvatal {
        add_chvatal_rows(&mut built, inst, &mats.nominal, &mats.worst);
    }
    Ok(built)
}

/// Optimal value of the LP relaxation of a formulation.
pub fn lp_bound(inst: &Instance, formulation: Formulation) -> Result<f64> {
    let mats = Matrices::new(inst)?;
    lp_bound_with(inst, formulation, &mats, false)
}

pub fn lp_bound_with(inst: &Instance, formulation: Formulation, mats: &Matrices, chvatal: bool) -> Result<f64> {
    let built = build(inst, formulation, mats, chvatal)?;
    let r = solve_lp(&built.model)?;
    match r.status {
        SolveStatus::Optimal => Ok(r.objective),
        SolveStatus::Infeasible => {
            let min_makespan = mats.nominal.value(SOURCE, inst.n() + 1);
            Err(Error::DeadlineInfeasible {
                deadline: inst.deadline,
                min_makespan,
            })
        }
        other => Err(Error::NumericalFailure(format!("LP relaxation ended with {other:?}"))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SolveOptions {
    pub chvatal: bool,
    /// Solve the pure anchoring model with lazily separated chain
    /// inequalities instead of the full (Dom) rows.
    pub cuts: bool,
    pub params: MipParams,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FormulationSolve {
    pub formulation: Formulation,
    pub result: SolveResult,
    /// The anchored set read off `h`, with its dominant schedule.
    pub solution: Option<AnchoredSolution>,
}

/// Solves a formulation as a MIP and extracts `(x, H)`.
pub fn solve_formulation(
    inst: &Instance,
    formulation: Formulation,
    mats: &Matrices,
    opts: &SolveOptions,
) -> Result<FormulationSolve> {
    let original = inst;
    let inst = &preprocess(inst);
    let result = if opts.cuts {
        if formulation != Formulation::Dom {
            return Err(Error::UnsupportedInstance("chain-cut mode applies to (Dom) only".into()));
        }
        let mut built = build_anchoring_only(inst);
        if opts.chvatal {
            add_chvatal_rows(&mut built, inst, &mats.nominal, &mats.worst);
        }
        let mut sep = ChainSeparator {
            inst,
            mats,
            h: built.h.clone(),
        };
        let r = solve_mip_with_cuts(&built.model, opts.params, &mut sep)?;
        (r, built.h)
    } else {
        let built = build(inst, formulation, mats, opts.chvatal)?;
        (solve_mip(&built.model, opts.params)?, built.h)
    };
    let (result, h) = result;
    let solution = match &result.incumbent {
        Some(x) => {
            let anchored: Vec<usize> = h
                .iter()
                .enumerate()
                .filter(|(_, v)| x[v.0] > 0.5)
                .map(|(k, _)| k + 1)
                .collect();
            let z = dominant_schedule(inst, &mats.worst, &anchored).map_err(|_| {
                Error::NumericalFailure(format!("{formulation} returned a set that is not anchored: {anchored:?}"))
            })?;
            Some(AnchoredSolution::new(original, z, anchored))
        }
        None => None,
    };
    Ok(FormulationSolve {
        formulation,
        result,
        solution,
    })
}
