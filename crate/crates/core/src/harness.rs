//! Running solution methods on instances and summarizing benchmark results.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::anchored::{brute_force_optimum, AnchoredSolution, Instance};
use crate::error::{Error, Result};
use crate::exact::solve_polynomial;
use crate::formulations::{lp_bound_with, solve_formulation, Formulation, Matrices, SolveOptions};
use crate::milp::{MipParams, SolveStatus};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Formulation(Formulation),
    Auto,
    Brute,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Formulation(f) => f.name(),
            Method::Auto => "auto",
            Method::Brute => "brute",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "auto" => Ok(Method::Auto),
            "brute" => Ok(Method::Brute),
            other => other
                .parse()
                .map(Method::Formulation)
                .map_err(|_| Error::parse("method", format!("unknown method {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    pub time_limit: Duration,
    pub chvatal: bool,
    pub cuts: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            time_limit: Duration::from_secs(300),
            chvatal: false,
            cuts: false,
        }
    }
}

/// Outcome of one method on one instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub method: String,
    /// Exact algorithm used by `auto`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub route: Option<String>,
    pub status: String,
    pub objective: Option<f64>,
    pub bound: Option<f64>,
    pub gap: Option<f64>,
    pub time_s: f64,
    pub nodes: u64,
    pub anchored: Vec<usize>,
    pub schedule: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub root_bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cuts_added: Option<usize>,
}

impl RunRecord {
    pub fn is_optimal(&self) -> bool {
        self.status == status_name(SolveStatus::Optimal)
    }

    pub fn is_infeasible(&self) -> bool {
        self.status == status_name(SolveStatus::Infeasible)
    }

    fn exact(method: Method, route: Option<String>, sol: AnchoredSolution, elapsed: Duration) -> Self {
        RunRecord {
            method: method.to_string(),
            route,
            status: status_name(SolveStatus::Optimal).into(),
            objective: Some(sol.objective),
            bound: Some(sol.objective),
            gap: Some(0.0),
            time_s: elapsed.as_secs_f64(),
            nodes: 0,
            anchored: sol.anchored,
            schedule: sol.schedule.start,
            root_bound: None,
            cuts_added: None,
        }
    }

    fn infeasible(method: Method, elapsed: Duration) -> Self {
        RunRecord {
            method: method.to_string(),
            route: None,
            status: status_name(SolveStatus::Infeasible).into(),
            objective: None,
            bound: None,
            gap: None,
            time_s: elapsed.as_secs_f64(),
            nodes: 0,
            anchored: Vec::new(),
            schedule: Vec::new(),
            root_bound: None,
            cuts_added: None,
        }
    }
}

pub fn status_name(s: SolveStatus) -> &'static str {
    match s {
        SolveStatus::Optimal => "optimal",
        SolveStatus::Infeasible => "infeasible",
        SolveStatus::Unbounded => "unbounded",
        SolveStatus::TimeLimit => "time_limit",
    }
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

fn run_formulation(inst: &Instance, f: Formulation, method: Method, opts: &RunOptions, start: Instant) -> Result<RunRecord> {
    let mats = Matrices::new(inst)?;
    let solve_opts = SolveOptions {
        chvatal: opts.chvatal,
        cuts: opts.cuts,
        params: MipParams::with_time_limit(opts.time_limit),
    };
    let out = solve_formulation(inst, f, &mats, &solve_opts)?;
    let r = &out.result;
    let (anchored, schedule) = match out.solution {
        Some(s) => (s.anchored, s.schedule.start),
        None => (Vec::new(), Vec::new()),
    };
    Ok(RunRecord {
        method: method.to_string(),
        route: None,
        status: status_name(r.status).into(),
        objective: finite(r.objective),
        bound: finite(r.bound),
        gap: finite(r.gap),
        time_s: start.elapsed().as_secs_f64(),
        nodes: r.nodes,
        anchored,
        schedule,
        root_bound: opts.cuts.then_some(r.root_bound).and_then(finite),
        cuts_added: opts.cuts.then_some(r.cuts_added),
    })
}

/// Runs one method. A deadline below the nominal makespan yields an
/// `infeasible` record rather than an error.
pub fn run_method(inst: &Instance, method: Method, opts: &RunOptions) -> Result<RunRecord> {
    let start = Instant::now();
    let res = match method {
        Method::Formulation(f) => run_formulation(inst, f, method, opts, start),
        Method::Brute => brute_force_optimum(inst).map(|s| RunRecord::exact(method, None, s, start.elapsed())),
        Method::Auto => match solve_polynomial(inst) {
            Ok(Some((route, s))) => Ok(RunRecord::exact(method, Some(route.to_string()), s, start.elapsed())),
            Ok(None) => run_formulation(inst, Formulation::Dom, method, opts, start).map(|mut r| {
                r.route = Some("dom".into());
                r
            }),
            Err(e) => Err(e),
        },
    };
    match res {
        Err(Error::DeadlineInfeasible { .. }) => Ok(RunRecord::infeasible(method, start.elapsed())),
        other => other,
    }
}

/// One method on one instance, with the LP bound when the method is a
/// formulation.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceRun {
    pub label: String,
    pub method: Method,
    pub record: Option<RunRecord>,
    pub lp_bound: Option<f64>,
    pub error: Option<String>,
}

/// Runs every method on one instance; failures are kept as unsolved runs.
pub fn run_instance(inst: &Instance, label: &str, methods: &[Method], opts: &RunOptions) -> Vec<InstanceRun> {
    let mats = Matrices::new(inst).ok();
    methods
        .iter()
        .map(|&method| {
            let (record, error) = match run_method(inst, method, opts) {
                Ok(r) => (Some(r), None),
                Err(e) => (None, Some(e.to_string())),
            };
            let lp_bound = match (method, &mats) {
                (Method::Formulation(f), Some(m)) => lp_bound_with(inst, f, m, opts.chvatal).ok(),
                _ => None,
            };
            InstanceRun {
                label: label.to_string(),
                method,
                record,
                lp_bound,
                error,
            }
        })
        .collect()
}

/// One row of the benchmark table.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub label: String,
    pub method: String,
    pub instances: usize,
    pub solved_count: usize,
    pub mean_time_solved_s: Option<f64>,
    pub mean_final_gap_unsolved: Option<f64>,
    pub mean_lpgap: Option<f64>,
    pub mean_opt: Option<f64>,
    pub root_gap_after_cuts: Option<f64>,
}

fn mean(values: impl IntoIterator<Item = f64>) -> Option<f64> {
    let (sum, count) = values.into_iter().fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    (count > 0).then(|| sum / count as f64)
}

/// `(b - opt) / max(opt, 1)`; the floor keeps the gap finite when the
/// optimum is zero.
pub fn relative_lp_gap(bound: f64, opt: f64) -> f64 {
    (bound - opt) / opt.abs().max(1.0)
}

/// Groups runs by `(label, method)`, labels sorted, methods in first-seen order.
pub fn aggregate(runs: &[InstanceRun]) -> Vec<SummaryRow> {
    let mut labels: Vec<&str> = runs.iter().map(|r| r.label.as_str()).collect();
    labels.sort_unstable();
    labels.dedup();
    let mut methods: Vec<Method> = Vec::new();
    for r in runs {
        if !methods.contains(&r.method) {
            methods.push(r.method);
        }
    }
    let mut rows = Vec::new();
    for label in labels {
        for &method in &methods {
            let group: Vec<&InstanceRun> = runs.iter().filter(|r| r.label == label && r.method == method).collect();
            if group.is_empty() {
                continue;
            }
            let solved: Vec<(&InstanceRun, &RunRecord)> = group
                .iter()
                .filter_map(|r| r.record.as_ref().filter(|rec| rec.is_optimal()).map(|rec| (*r, rec)))
                .collect();
            let unsolved_gaps = group
                .iter()
                .filter_map(|r| r.record.as_ref())
                .filter(|rec| !rec.is_optimal())
                .filter_map(|rec| rec.gap);
            let opt = |rec: &RunRecord| rec.objective.unwrap_or(0.0);
            rows.push(SummaryRow {
                label: label.to_string(),
                method: method.to_string(),
                instances: group.len(),
                solved_count: solved.len(),
                mean_time_solved_s: mean(solved.iter().map(|(_, rec)| rec.time_s)),
                mean_final_gap_unsolved: mean(unsolved_gaps),
                mean_lpgap: mean(
                    solved
                        .iter()
                        .filter_map(|(run, rec)| run.lp_bound.map(|b| relative_lp_gap(b, opt(rec)))),
                ),
                mean_opt: mean(solved.iter().map(|(_, rec)| opt(rec))),
                root_gap_after_cuts: mean(
                    solved
                        .iter()
                        .filter_map(|(_, rec)| rec.root_bound.map(|b| relative_lp_gap(b, opt(rec)))),
                ),
            });
        }
    }
    rows
}

const BASE_HEADER: [&str; 7] = [
    "label",
    "method",
    "solved_count",
    "mean_time_solved_s",
    "mean_final_gap_unsolved",
    "mean_lpgap",
    "mean_opt",
];

fn cell(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6}")).unwrap_or_default()
}

fn row_cells(row: &SummaryRow, cuts: bool) -> Vec<String> {
    let mut cells = vec![
        row.label.clone(),
        row.method.clone(),
        row.solved_count.to_string(),
        cell(row.mean_time_solved_s),
        cell(row.mean_final_gap_unsolved),
        cell(row.mean_lpgap),
        cell(row.mean_opt),
    ];
    if cuts {
        cells.push(cell(row.root_gap_after_cuts));
    }
    cells
}

fn header(cuts: bool) -> Vec<&'static str> {
    let mut h = BASE_HEADER.to_vec();
    if cuts {
        h.push("root_gap_after_cuts");
    }
    h
}

/// Writes the summary as CSV with a fixed header; `root_gap_after_cuts` is
/// appended in cut mode.
pub fn write_csv<W: Write>(rows: &[SummaryRow], cuts: bool, out: W) -> Result<()> {
    let io = |e: csv::Error| Error::parse("csv", e.to_string());
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header(cuts)).map_err(io)?;
    for row in rows {
        w.write_record(row_cells(row, cuts)).map_err(io)?;
    }
    w.flush().map_err(|e| Error::parse("csv", e.to_string()))
}

/// Aligned text rendering of the summary.
pub fn pretty_table(rows: &[SummaryRow], cuts: bool) -> String {
    let head: Vec<String> = header(cuts).iter().map(|s| s.to_string()).collect();
    let body: Vec<Vec<String>> = rows.iter().map(|r| row_cells(r, cuts)).collect();
    let mut widths: Vec<usize> = head.iter().map(|h| h.len()).collect();
    for r in &body {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.len());
        }
    }
    let line = |cells: &[String]| {
        cells
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(k, (c, &w))| if k < 2 { format!("{c:<w$}") } else { format!("{c:>w$}") })
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_string()
    };
    let mut out = line(&head);
    out.push('\n');
    out.push_str(&"-".repeat(widths.iter().sum::<usize>() + 2 * (widths.len() - 1)));
    out.push('\n');
    for r in &body {
        out.push_str(&line(r));
        out.push('\n');
    }
    out
}
