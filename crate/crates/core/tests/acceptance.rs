//! Acceptance criteria AC1–AC10. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use anchorsched::anchored::{brute_force_optimum, dominant_schedule, is_x_anchored};
use anchorsched::exact::{solve_box, solve_critical_one_disruption, solve_u_anchrob, u_anchrob_relaxation};
use anchorsched::formulations::{
    lay_offsets, lp_bound_with, separate_chain, solve_formulation, ChainKind, Formulation, Matrices, SolveOptions,
};
use anchorsched::graph::{is_critical, is_schedule, SOURCE};
use anchorsched::harness::{relative_lp_gap, run_method, Method, RunOptions};
use anchorsched::instances::{generate, random_instance, Rng, SetVariant};
use anchorsched::uncertainty::UncertaintySet;
use anchorsched::{Instance, PrecedenceGraph, Schedule, SolveStatus, EPS};

use common::*;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn example(delta: UncertaintySet, deadline: f64) -> Instance {
    let g = PrecedenceGraph::new(
        5,
        vec![(0, 1), (0, 2), (1, 3), (3, 5), (2, 4), (3, 4), (5, 6), (4, 6)],
        vec![1.0, 1.0, 1.0, 1.0, 2.0],
    )
    .unwrap();
    Instance::new(g, delta, deadline, vec![1.0; 5]).unwrap()
}

const EXAMPLE_DHAT: [f64; 5] = [0.5, 1.0, 0.5, 0.5, 0.5];

fn ac1() -> Outcome {
    let start = Instant::now();
    let x = Schedule::new(vec![0.0, 0.0, 1.0, 1.0, 3.0, 2.5, 4.5]);
    let boxed = example(UncertaintySet::Box { dhat: EXAMPLE_DHAT.to_vec() }, 4.5);
    let ld = boxed.worst_case().map_err(|e| e.to_string())?;
    ensure(is_x_anchored(&boxed.graph, &ld, &x, &[1, 2, 4]).unwrap(), || "box baseline pair not x-anchored".into())?;
    let b1 = example(UncertaintySet::Budgeted { dhat: EXAMPLE_DHAT.to_vec(), gamma: 1 }, 4.5);
    let ld1 = b1.worst_case().map_err(|e| e.to_string())?;
    ensure(is_x_anchored(&b1.graph, &ld1, &x, &[1, 2, 4, 5]).unwrap(), || "budget-1 baseline pair not x-anchored".into())?;

    let g = PrecedenceGraph::new(3, vec![(0, 1), (1, 2), (2, 3), (3, 4)], vec![1.0; 3]).unwrap();
    let inst = Instance::new(g, UncertaintySet::Budgeted { dhat: vec![1.0; 3], gamma: 1 }, 3.0, vec![1.0; 3]).unwrap();
    let mats = Matrices::new(&inst).unwrap();
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-9;
    ensure(close(mats.nominal.value(0, 3), 2.0), || "L0_s3 != 2".into())?;
    ensure(close(mats.worst.value(0, 3), 3.0), || "LD_s3 != 3".into())?;
    ensure(close(mats.nominal.value(3, 4), 1.0), || "L0_3t != 1".into())?;
    let d = lay_offsets(&inst, &[1.0; 3]);
    ensure(d.iter().zip([0.0, 1.0, 2.0]).all(|(a, b)| close(*a, b)), || format!("D = {d:?}"))?;
    let h = [1.0, 0.0, 0.5];
    ensure(lay_feasible_with(&inst, &h), || "h* not in Proj(P^Lay) by LP".into())?;
    let lay = separate_chain(&inst, &mats.nominal, &mats.worst, &h, ChainKind::Lay).unwrap();
    ensure(lay.is_none(), || format!("layered chain violated: {lay:?}"))?;
    let dom = separate_chain(&inst, &mats.nominal, &mats.worst, &h, ChainKind::Dom)
        .unwrap()
        .ok_or("no violated (Dom) chain")?;
    ensure(dom.chain == vec![0, 3, 4] && close(dom.violation, 0.5), || format!("{dom:?}"))?;
    ensure(!dom_feasible_with(&inst, &mats, &h), || "h* in Proj(P^Dom) by LP".into())?;
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))?;
    Ok(format!("baseline pairs anchored, chain values reproduced in {elapsed:.2?}"))
}

/// The AC2 instance set, reused by AC9.
fn ac2_instances() -> Vec<(SetVariant, Instance)> {
    let mut out = Vec::new();
    for (v, variant) in SetVariant::ALL.iter().enumerate() {
        for k in 0..50u64 {
            let n = 6 + (k as usize % 7);
            out.push((*variant, random_instance(n, *variant, 1000 * v as u64 + k)));
        }
    }
    out
}

fn ac2() -> Outcome {
    let start = Instant::now();
    let mut solves = 0;
    for (variant, inst) in ac2_instances() {
        let oracle = brute_force_optimum(&inst).map_err(|e| e.to_string())?.objective;
        let mats = Matrices::new(&inst).unwrap();
        for f in Formulation::ALL {
            if f == Formulation::Lay && inst.delta.as_budgeted(inst.n()).is_none() {
                continue;
            }
            let s = solve_formulation(&inst, f, &mats, &SolveOptions::default()).map_err(|e| e.to_string())?;
            let got = s.solution.map(|s| s.objective);
            ensure(s.result.status == SolveStatus::Optimal && got == Some(oracle), || {
                format!("{variant:?} n={} {f}: {got:?} vs brute {oracle}", inst.n())
            })?;
            solves += 1;
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(120), || format!("took {elapsed:?}"))?;
    Ok(format!("{solves} MIP optima equal brute force on 300 instances in {elapsed:.1?}"))
}

fn ac3() -> Outcome {
    let mut entries = 0;
    for k in 0..200u64 {
        let variant = SetVariant::ALL[k as usize % 6];
        let n = 2 + (k as usize % 7);
        let inst = random_instance(n, variant, 50_000 + k);
        let fast = inst.worst_case().map_err(|e| e.to_string())?;
        let slow = enumerated_worst_case(&inst.graph, &inst.delta);
        for (i, j, v) in slow.entries() {
            let f = fast.get(i, j);
            ensure(f.is_some_and(|f| (f - v).abs() <= 1e-9), || {
                format!("{variant:?} n={n} seed {k}: L^Δ({i},{j}) = {f:?}, enumeration {v}")
            })?;
            entries += 1;
        }
        ensure(fast.entries().count() == slow.entries().count(), || "defined entries differ".into())?;
    }
    Ok(format!("200 sets, {entries} entries match extreme-point enumeration"))
}

fn ac4() -> Outcome {
    let mut rng = Rng::new(4);
    let mut checked = 0;
    for k in 0..500u64 {
        let variant = SetVariant::ALL[k as usize % 6];
        let n = 4 + (k as usize % 9);
        let inst = random_instance(n, variant, 70_000 + k);
        let ld = inst.worst_case().unwrap();
        let h = random_anchored_set(&inst, &ld, &mut rng);
        let z = dominant_schedule(&inst, &ld, &h).map_err(|e| e.to_string())?;
        ensure(is_schedule(&inst.graph, &z) && z.makespan() <= inst.deadline + EPS, || {
            format!("seed {k}: dominant schedule infeasible")
        })?;
        for i in std::iter::once(SOURCE).chain(1..=n) {
            for &j in h.iter().filter(|&&j| inst.graph.precedes(i, j)) {
                ensure(z.start(j) - z.start(i) >= ld.value(i, j) - EPS, || {
                    format!("seed {k}: z_{j} - z_{i} < L^Δ_{i}{j}")
                })?;
                checked += 1;
            }
        }
    }
    Ok(format!("500 pairs, {checked} pair inequalities hold"))
}

fn ac5() -> Outcome {
    for k in 0..100u64 {
        let n = 3 + (k as usize % 10);
        let inst = random_instance(n, SetVariant::Box, 90_000 + k);
        let got = solve_box(&inst).map_err(|e| e.to_string())?.objective;
        let want = brute_force_optimum(&inst).unwrap().objective;
        ensure(got == want, || format!("seed {k}: box {got} vs brute {want}"))?;
    }
    let f = solve_box(&example(UncertaintySet::Box { dhat: EXAMPLE_DHAT.to_vec() }, 4.5)).unwrap();
    ensure(f.objective == 4.0, || format!("example objective {}", f.objective))?;
    Ok("100 box instances match brute force; example objective 4".into())
}

fn ac6() -> Outcome {
    let integral = |v: &[f64]| v.iter().all(|x| (x - x.round()).abs() <= 1e-6);
    for k in 0..30u64 {
        let n = 5 + (k as usize * 7) % 26;
        let inst = random_unitary(110_000 + k, n);
        let vertex = u_anchrob_relaxation(&inst).map_err(|e| e.to_string())?;
        ensure(integral(&vertex.h) && integral(&vertex.z), || {
            format!("seed {k}, n={n}: fractional vertex h={:?}", vertex.h)
        })?;
        let sol = solve_u_anchrob(&inst).map_err(|e| format!("seed {k}: {e}"))?;
        if n <= 14 {
            let want = brute_force_optimum(&inst).unwrap().objective;
            ensure(sol.objective == want, || format!("seed {k}: {} vs brute {want}", sol.objective))?;
        }
    }
    Ok("30 unitary relaxations have integral vertices".into())
}

fn ac7() -> Outcome {
    for k in 0..30u64 {
        let n = 5 + (k as usize % 21);
        let inst = random_critical_sp(130_000 + k, n);
        ensure(is_critical(&inst.graph), || format!("seed {k}: graph not critical"))?;
        let exact = solve_critical_one_disruption(&inst).map_err(|e| e.to_string())?;
        let ld = inst.worst_case().unwrap();
        ensure(
            is_x_anchored(&inst.graph, &ld, &exact.schedule, &exact.anchored).unwrap()
                && exact.schedule.makespan() <= inst.deadline + EPS,
            || format!("seed {k}: reduction returned an invalid pair"),
        )?;
        let mats = Matrices::new(&inst).unwrap();
        let mip = solve_formulation(&inst, Formulation::Dom, &mats, &SolveOptions::default())
            .map_err(|e| e.to_string())?
            .solution
            .ok_or("no MIP solution")?;
        ensure(mip.objective == exact.objective, || {
            format!("seed {k}: reduction {} vs MIP {}", exact.objective, mip.objective)
        })?;
    }
    Ok("30 critical SP instances: reduction equals (Dom) MIP".into())
}

fn ac8() -> Outcome {
    let class = "SP_pQCri_dRand_G1".parse().unwrap();
    for seed in 0..100u64 {
        let (inst, _) = generate(class, 30, seed).map_err(|e| e.to_string())?;
        ensure(is_critical(&inst.graph), || format!("seed {seed}: not critical"))?;
    }
    Ok("100 SP_pQCri graphs are critical".into())
}

fn ac9() -> Outcome {
    let mut instances: Vec<Instance> = ac2_instances().into_iter().map(|(_, i)| i).collect();
    for label in ["ER_pZero_dUnif_G1", "SP_pZero_dUnif_G1", "SP_pQCri_dUnif_G1", "ER_pQCri_dUnif_G1"] {
        for seed in 1..=10 {
            instances.push(generate(label.parse().unwrap(), 40, seed).unwrap().0);
        }
    }
    let (mut premise, mut total) = (0, 0);
    for (k, inst) in instances.iter().enumerate() {
        let mats = Matrices::new(inst).unwrap();
        let dom = lp_bound_with(inst, Formulation::Dom, &mats, false).map_err(|e| e.to_string())?;
        let std = lp_bound_with(inst, Formulation::Std, &mats, false).map_err(|e| e.to_string())?;
        ensure(dom <= std + 1e-6, || format!("instance {k}: Dom {dom} > Std {std}"))?;
        total += 1;
        if layered_premise_holds(inst, &mats) {
            let lay = lp_bound_with(inst, Formulation::Lay, &mats, false).map_err(|e| e.to_string())?;
            ensure(dom <= lay + 1e-6, || format!("instance {k}: Dom {dom} > Lay {lay}"))?;
            premise += 1;
        }
    }
    Ok(format!("Dom ≤ Std on {total} instances; Dom ≤ Lay on {premise} satisfying the premise"))
}

fn ac10() -> Outcome {
    let characterization = ["ER_pZero_dUnif_G1", "SP_pZero_dUnif_G1", "SP_pQCri_dUnif_G1"];
    let opts = RunOptions {
        time_limit: Duration::from_secs(60),
        ..RunOptions::default()
    };
    let mut report = Vec::new();
    for label in ["ER_pZero_dUnif_G1", "SP_pZero_dUnif_G1", "ER_pQCri_dUnif_G1", "SP_pQCri_dUnif_G1"] {
        let (mut solved, mut dom_gap, mut lay_gap) = (0, 0.0, 0.0);
        for seed in 1..=10 {
            let (inst, _) = generate(label.parse().unwrap(), 40, seed).unwrap();
            let r = run_method(&inst, Method::Formulation(Formulation::Dom), &opts).map_err(|e| e.to_string())?;
            ensure(r.is_optimal(), || format!("{label} seed {seed}: Dom {}", r.status))?;
            solved += 1;
            let opt = r.objective.unwrap();
            let mats = Matrices::new(&inst).unwrap();
            let dom = lp_bound_with(&inst, Formulation::Dom, &mats, false).unwrap();
            let lay = lp_bound_with(&inst, Formulation::Lay, &mats, false).unwrap();
            dom_gap += relative_lp_gap(dom, opt) / 10.0;
            lay_gap += relative_lp_gap(lay, opt) / 10.0;
        }
        ensure(solved == 10, || format!("{label}: Dom solved {solved}/10"))?;
        if characterization.contains(&label) {
            ensure(dom_gap.abs() <= 1e-6, || format!("{label}: Dom LPGap {dom_gap}"))?;
        }
        ensure(lay_gap >= dom_gap, || format!("{label}: Lay LPGap {lay_gap} < Dom {dom_gap}"))?;
        report.push(format!("{label} dom={:.2}% lay={:.2}%", 100.0 * dom_gap, 100.0 * lay_gap));
    }
    Ok(report.join("; "))
}

type Criterion = (&'static str, &'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("AC1", "worked examples", ac1),
        ("AC2", "oracle equivalence", ac2),
        ("AC3", "worst-case longest paths", ac3),
        ("AC4", "dominant schedule", ac4),
        ("AC5", "box algorithm", ac5),
        ("AC6", "unitary integrality", ac6),
        ("AC7", "critical 1-disruption reduction", ac7),
        ("AC8", "SP quasi-critical generator", ac8),
        ("AC9", "relaxation ordering", ac9),
        ("AC10", "scaled table trends", ac10),
    ];
    let filters: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (id, name, run) in criteria {
        if !filters.is_empty() && !filters.iter().any(|f| id.eq_ignore_ascii_case(f)) {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {id} {name} ({secs:.2}s): {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {id} {name} ({secs:.2}s): {detail}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
