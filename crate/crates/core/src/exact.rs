//! Polynomial special cases: box uncertainty, the unitary problem with zero
//! processing times, and critical graphs under 1-disruption uncertainty.

use std::fmt;

use crate::anchored::{dominant_schedule, AnchoredSolution, Instance};
use crate::error::{Error, Result};
use crate::formulations::{build_dom, Matrices};
use crate::graph::{earliest_schedule, is_critical, latest_schedule, Schedule, EPS, SOURCE};
use crate::milp::{solve_lp, SolveStatus};
use crate::uncertainty::UncertaintySet;

const INTEGRALITY_TOL: f64 = 1e-6;

/// Rewrites `Δ` into the most specific equivalent form: a box when `Δ` has a
/// greatest element, a 1-disruption set when `Γ = 1` with uniform deviations.
pub fn normalize(delta: &UncertaintySet, n: usize) -> UncertaintySet {
    if let Some(dhat) = delta.greatest_element(n) {
        return UncertaintySet::Box { dhat };
    }
    if let Some(dhat0) = delta.one_disruption_deviation(n) {
        return UncertaintySet::OneDisruption { dhat0 };
    }
    delta.clone()
}

fn check_deadline(inst: &Instance) -> Result<f64> {
    let min_makespan = inst.graph.min_makespan();
    if inst.deadline < min_makespan - EPS {
        return Err(Error::DeadlineInfeasible {
            deadline: inst.deadline,
            min_makespan,
        });
    }
    Ok(min_makespan)
}

/// Optimal solution under box uncertainty (or any `Δ` with a greatest
/// element): anchor exactly the jobs whose earliest start in `G(p+δ̂)` does
/// not exceed their latest start in `G(p)` for deadline `M`.
pub fn solve_box(inst: &Instance) -> Result<AnchoredSolution> {
    let n = inst.n();
    let dhat = inst.delta.greatest_element(n).ok_or_else(|| {
        Error::UnsupportedUncertainty(format!("{} set has no greatest element", inst.delta.kind()))
    })?;
    check_deadline(inst)?;
    let g = &inst.graph;
    let dev = |v: usize| if v == SOURCE || v > n { 0.0 } else { dhat[v - 1] };
    let low = earliest_schedule(g, |i, _| g.p(i) + dev(i));
    let high = latest_schedule(g, inst.deadline)?;
    let anchored: Vec<usize> = g.jobs().filter(|&j| low.start(j) <= high.start(j) + EPS).collect();
    let x = Schedule::new(
        (0..n + 2)
            .map(|v| low.start(v).min(high.start(v)))
            .collect(),
    );
    Ok(AnchoredSolution::new(inst, x, anchored))
}

/// `L⁰_st + δ̂₀ ⌊(M - L⁰_st) / δ̂₀⌋` for a 1-disruption instance. The optimum
/// is unchanged when `G(p)` is critical; on other graphs the value can drop.
pub fn tighten_deadline(inst: &Instance) -> Result<f64> {
    let dhat0 = inst.delta.one_disruption_deviation(inst.n()).ok_or_else(|| {
        Error::UnsupportedUncertainty(format!("{} set is not a 1-disruption set", inst.delta.kind()))
    })?;
    let l0 = check_deadline(inst)?;
    if dhat0 <= 0.0 {
        return Ok(inst.deadline);
    }
    let k = ((inst.deadline - l0) / dhat0 + 1e-9).floor().max(0.0);
    Ok(l0 + dhat0 * k)
}

/// Vertex optimum of the (Dom) relaxation; `h` job-indexed, `z` vertex-indexed.
#[derive(Debug, Clone, PartialEq)]
pub struct RelaxationVertex {
    pub objective: f64,
    pub h: Vec<f64>,
    pub z: Vec<f64>,
}

fn is_unitary(inst: &Instance) -> bool {
    inst.graph.job_processing_times().iter().all(|&p| p == 0.0)
        && inst.delta.one_disruption_deviation(inst.n()) == Some(1.0)
}

/// Solves the (Dom) LP relaxation of a unitary instance (`p = 0`, unit
/// 1-disruption) with the deadline rounded down.
pub fn u_anchrob_relaxation(inst: &Instance) -> Result<RelaxationVertex> {
    if !is_unitary(inst) {
        return Err(Error::UnsupportedInstance(
            "expected zero processing times and unit 1-disruption uncertainty".into(),
        ));
    }
    let inst = inst.with_deadline((inst.deadline + 1e-9).floor());
    let mats = Matrices::new(&inst)?;
    let built = build_dom(&inst, &mats.nominal, &mats.worst);
    let r = solve_lp(&built.model)?;
    match r.status {
        SolveStatus::Optimal => {}
        SolveStatus::Infeasible => check_deadline(&inst).map(|_| ())?,
        other => return Err(Error::NumericalFailure(format!("relaxation ended with {other:?}"))),
    }
    let x = r
        .incumbent
        .ok_or_else(|| Error::NumericalFailure("relaxation returned no point".into()))?;
    Ok(RelaxationVertex {
        objective: r.objective,
        h: built.h.iter().map(|v| x[v.0]).collect(),
        z: built.schedule.iter().map(|v| x[v.0]).collect(),
    })
}

/// Exact solver for the unitary problem through the integral (Dom) relaxation.
pub fn solve_u_anchrob(inst: &Instance) -> Result<AnchoredSolution> {
    let vertex = u_anchrob_relaxation(inst)?;
    let mut anchored = Vec::new();
    for (k, &v) in vertex.h.iter().enumerate() {
        let r = v.round();
        if (v - r).abs() > INTEGRALITY_TOL {
            return Err(Error::NonIntegralVertex { job: k + 1, value: v });
        }
        if r > 0.5 {
            anchored.push(k + 1);
        }
    }
    let floored = inst.with_deadline((inst.deadline + 1e-9).floor());
    let ld = floored.worst_case()?;
    let z = dominant_schedule(&floored, &ld, &anchored)?;
    Ok(AnchoredSolution::new(inst, z, anchored))
}

/// Exact solver for critical graphs under 1-disruption uncertainty, by
/// reduction to the unitary problem with deadline `(M' - L⁰_st) / δ̂₀` where
/// `M'` is the tightened deadline.
pub fn solve_critical_one_disruption(inst: &Instance) -> Result<AnchoredSolution> {
    let n = inst.n();
    let g = &inst.graph;
    if !is_critical(g) {
        return Err(Error::NotCritical);
    }
    let dhat0 = inst.delta.one_disruption_deviation(n).ok_or_else(|| {
        Error::UnsupportedUncertainty(format!("{} set is not a 1-disruption set", inst.delta.kind()))
    })?;
    let l0 = check_deadline(inst)?;
    if dhat0 <= 0.0 {
        return solve_box(&inst.with_delta(UncertaintySet::Box { dhat: vec![0.0; n] }));
    }
    let tight = tighten_deadline(inst)?;
    let steps = ((tight - l0) / dhat0).round();
    let unit = Instance::new(
        g.with_processing_times(vec![0.0; n])?,
        UncertaintySet::OneDisruption { dhat0: 1.0 },
        steps,
        inst.weights.clone(),
    )?;
    let reduced = solve_u_anchrob(&unit)?;
    let heads = g.heads();
    let x = Schedule::new(
        (0..n + 2)
            .map(|v| heads[v] + dhat0 * reduced.schedule.start(v))
            .collect(),
    );
    Ok(AnchoredSolution::new(inst, x, reduced.anchored))
}

/// The exact solver `auto` mode picks for an instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    Box,
    CriticalOneDisruption,
    Unitary,
    DomMip,
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Route::Box => "box",
            Route::CriticalOneDisruption => "critical-1-disruption",
            Route::Unitary => "unitary",
            Route::DomMip => "dom",
        })
    }
}

pub fn route(inst: &Instance) -> Route {
    let n = inst.n();
    match normalize(&inst.delta, n) {
        UncertaintySet::Box { .. } => Route::Box,
        UncertaintySet::OneDisruption { .. } if is_critical(&inst.graph) => Route::CriticalOneDisruption,
        UncertaintySet::OneDisruption { .. } if is_unitary(inst) => Route::Unitary,
        _ => Route::DomMip,
    }
}

/// Solves with the polynomial algorithm chosen by [`route`]; `None` when the
/// instance needs the (Dom) MIP.
pub fn solve_polynomial(inst: &Instance) -> Result<Option<(Route, AnchoredSolution)>> {
    let r = route(inst);
    let normalized = inst.with_delta(normalize(&inst.delta, inst.n()));
    let sol = match r {
        Route::Box => solve_box(&normalized)?,
        Route::CriticalOneDisruption => solve_critical_one_disruption(&normalized)?,
        Route::Unitary => solve_u_anchrob(&normalized)?,
        Route::DomMip => return Ok(None),
    };
    Ok(Some((r, sol)))
}
