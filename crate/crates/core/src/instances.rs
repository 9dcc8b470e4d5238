//! Random instance classes `F1_F2_F3_F4`, the halfway deadline, and the JSON
//! instance format.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;
use serde::{Deserialize, Serialize};

use crate::anchored::Instance;
use crate::error::{Error, Result};
use crate::graph::{PrecedenceGraph, Schedule, EPS, SOURCE};
use crate::uncertainty::{deviated_longest, Budget, UncertaintySet};

/// Identifier of the generator stored in instance files.
pub const PRNG_NAME: &str = "splitmix64";

/// Seeded generator with the few sampling helpers the generators need.
#[derive(Debug, Clone)]
pub struct Rng(SplitMix64);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng(SplitMix64::seed_from_u64(seed))
    }

    /// Independent stream for one generation stage.
    pub fn derive(seed: u64, stream: u64) -> Self {
        let mut base = SplitMix64::seed_from_u64(seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15));
        Rng::new(base.next_u64())
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on `0..k`; `k > 0`.
    pub fn below(&mut self, k: u64) -> u64 {
        assert!(k > 0, "empty range");
        let zone = u64::MAX - u64::MAX % k;
        loop {
            let v = self.next_u64();
            if v < zone {
                return v % k;
            }
        }
    }

    /// Uniform integer in `lo..=hi`.
    pub fn int_in(&mut self, lo: i64, hi: i64) -> i64 {
        assert!(lo <= hi, "empty range {lo}..={hi}");
        lo + self.below((hi - lo) as u64 + 1) as i64
    }

    pub fn bernoulli(&mut self, prob: f64) -> bool {
        self.unit() < prob
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GraphClass {
    Er,
    Sp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProcessingClass {
    Zero,
    Rand,
    QuasiCritical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DeviationClass {
    Rand,
    Uniform,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UncertaintyField {
    Gamma(usize),
    Partition,
    Mixed,
}

/// A four-field class label such as `SP_pQCri_dUnif_G1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct InstanceClass {
    pub graph: GraphClass,
    pub processing: ProcessingClass,
    pub deviation: DeviationClass,
    pub uncertainty: UncertaintyField,
}

impl fmt::Display for InstanceClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g = match self.graph {
            GraphClass::Er => "ER",
            GraphClass::Sp => "SP",
        };
        let p = match self.processing {
            ProcessingClass::Zero => "pZero",
            ProcessingClass::Rand => "pRand",
            ProcessingClass::QuasiCritical => "pQCri",
        };
        let d = match self.deviation {
            DeviationClass::Rand => "dRand",
            DeviationClass::Uniform => "dUnif",
        };
        match self.uncertainty {
            UncertaintyField::Gamma(k) => write!(f, "{g}_{p}_{d}_G{k}"),
            UncertaintyField::Partition => write!(f, "{g}_{p}_{d}_Partition"),
            UncertaintyField::Mixed => write!(f, "{g}_{p}_{d}_Mixed"),
        }
    }
}

impl FromStr for InstanceClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |what: &str| Error::parse("label", format!("{s:?}: unknown {what}"));
        let fields: Vec<&str> = s.split('_').collect();
        if fields.len() != 4 {
            return Err(Error::parse("label", format!("{s:?}: expected four fields F1_F2_F3_F4")));
        }
        let graph = match fields[0] {
            "ER" => GraphClass::Er,
            "SP" => GraphClass::Sp,
            _ => return Err(bad("graph class")),
        };
        let processing = match fields[1] {
            "pZero" => ProcessingClass::Zero,
            "pRand" => ProcessingClass::Rand,
            "pQCri" => ProcessingClass::QuasiCritical,
            _ => return Err(bad("processing-time class")),
        };
        let deviation = match fields[2] {
            "dRand" => DeviationClass::Rand,
            "dUnif" => DeviationClass::Uniform,
            _ => return Err(bad("deviation class")),
        };
        let uncertainty = match fields[3] {
            "G1" | "Γ1" => UncertaintyField::Gamma(1),
            "G2" | "Γ2" => UncertaintyField::Gamma(2),
            "G3" | "Γ3" => UncertaintyField::Gamma(3),
            "Partition" => UncertaintyField::Partition,
            "Mixed" => UncertaintyField::Mixed,
            _ => return Err(bad("uncertainty field")),
        };
        Ok(InstanceClass {
            graph,
            processing,
            deviation,
            uncertainty,
        })
    }
}

/// Erdős–Rényi precedence graph: jobs are placed in a random order and each
/// pair `i < j` of that order becomes an arc with probability `min(1, 10/n)`.
/// Processing times are zero.
pub fn gen_er(n: usize, seed: u64) -> PrecedenceGraph {
    let mut rng = Rng::new(seed);
    let mut order: Vec<usize> = (1..=n).collect();
    rng.shuffle(&mut order);
    let prob = if n == 0 { 0.0 } else { (10.0 / n as f64).min(1.0) };
    let mut arcs = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.bernoulli(prob) {
                arcs.push((order[a], order[b]));
            }
        }
    }
    PrecedenceGraph::from_job_arcs(n, &arcs, vec![0.0; n]).expect("generated arcs follow a linear order")
}

/// Random series-parallel precedence graph with `n` jobs, built top-down:
/// a component with `k` jobs is a series composition around a new job
/// (splitting the other `k-1` uniformly) or, when `k ≥ 2`, with probability
/// ½ a parallel composition of two components with at least one job each.
pub fn gen_sp(n: usize, seed: u64) -> PrecedenceGraph {
    let mut rng = Rng::new(seed);
    let sink = n + 1;
    let mut arcs = Vec::new();
    let mut next = 1;
    // explicit stack: (jobs, from, to)
    let mut stack = vec![(n, SOURCE, sink)];
    while let Some((k, from, to)) = stack.pop() {
        if k == 0 {
            arcs.push((from, to));
            continue;
        }
        if k >= 2 && rng.bernoulli(0.5) {
            let a = rng.int_in(1, k as i64 - 1) as usize;
            stack.push((k - a, from, to));
            stack.push((a, from, to));
        } else {
            let a = rng.int_in(0, k as i64 - 1) as usize;
            let mid = next;
            next += 1;
            stack.push((k - 1 - a, mid, to));
            stack.push((a, from, mid));
        }
    }
    PrecedenceGraph::new(n, arcs, vec![0.0; n]).expect("series-parallel construction is a valid graph")
}

/// Job processing times of the given class on `g`.
pub fn gen_processing(class: ProcessingClass, g: &PrecedenceGraph, seed: u64) -> Vec<f64> {
    let n = g.n();
    if class == ProcessingClass::Zero {
        return vec![0.0; n];
    }
    let mut rng = Rng::new(seed);
    let mut p: Vec<f64> = (0..n).map(|_| rng.int_in(5, 20) as f64).collect();
    if class == ProcessingClass::QuasiCritical {
        loop {
            let cur = g.with_processing_times(p.clone()).expect("same arcs");
            let heads = cur.heads();
            let tails = cur.tails();
            let total = heads[n + 1];
            let slack: Vec<(usize, f64)> = cur
                .jobs()
                .map(|j| (j, total - heads[j] - tails[j]))
                .filter(|&(_, s)| s > EPS)
                .collect();
            if slack.is_empty() {
                break;
            }
            let (j, s) = slack[rng.below(slack.len() as u64) as usize];
            p[j - 1] += s;
        }
    }
    p
}

/// Deviations of the given class. `dRand` draws integers in `[1, ⌊p_j/2⌋]`
/// (or copies `companion` when all `p` are zero); `dUnif` picks one entry of
/// that vector and broadcasts it.
pub fn gen_deviation(class: DeviationClass, p: &[f64], seed: u64, companion: Option<&[f64]>) -> Result<Vec<f64>> {
    let mut rng = Rng::new(seed);
    let drand: Vec<f64> = if !p.is_empty() && p.iter().all(|&v| v == 0.0) {
        companion.ok_or(Error::MissingCompanionDeviation)?.to_vec()
    } else {
        p.iter()
            .map(|&v| rng.int_in(1, ((v / 2.0).floor() as i64).max(1)) as f64)
            .collect()
    };
    Ok(match class {
        DeviationClass::Rand => drand,
        DeviationClass::Uniform if drand.is_empty() => drand,
        DeviationClass::Uniform => {
            let d0 = drand[rng.below(drand.len() as u64) as usize];
            vec![d0; p.len()]
        }
    })
}

/// Uncertainty set of the given field around deviations `dhat`.
pub fn build_uncertainty(field: UncertaintyField, dhat: &[f64], seed: u64) -> UncertaintySet {
    let n = dhat.len();
    match field {
        UncertaintyField::Gamma(k) => UncertaintySet::Budgeted {
            dhat: dhat.to_vec(),
            gamma: k.min(n),
        },
        UncertaintyField::Partition => {
            let mut rng = Rng::new(seed);
            let mut low = Vec::new();
            let mut high = Vec::new();
            let mut dev = dhat.to_vec();
            for j in 1..=n {
                if rng.bernoulli(0.75) {
                    dev[j - 1] = (0.1 * dhat[j - 1]).floor();
                    low.push(j);
                } else {
                    high.push(j);
                }
            }
            let mut parts = Vec::new();
            let mut gammas = Vec::new();
            for (part, cap) in [(low, 10), (high, 1)] {
                if !part.is_empty() {
                    gammas.push(cap.min(part.len()));
                    parts.push(part);
                }
            }
            UncertaintySet::PartitionBudgeted { dhat: dev, parts, gammas }
        }
        UncertaintyField::Mixed => UncertaintySet::MixedBudgeted {
            components: vec![
                Budget {
                    dhat: dhat.to_vec(),
                    gamma: 1.min(n),
                },
                Budget {
                    dhat: dhat.iter().map(|d| (0.2 * d).floor()).collect(),
                    gamma: 10.min(n),
                },
            ],
        },
    }
}

/// `½ (L_{G(p)}(s,t) + L_{G(p+δ̂)}(s,t))`.
pub fn halfway_deadline(g: &PrecedenceGraph, dhat: &[f64]) -> f64 {
    let t = g.sink();
    let nominal = g.min_makespan();
    let full = deviated_longest(g, dhat).value(SOURCE, t);
    0.5 * (nominal + full)
}

/// Provenance stored alongside an instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Meta {
    pub label: String,
    pub seed: u64,
    pub prng: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Meta {
    pub fn new(label: impl Into<String>, seed: u64) -> Self {
        Meta {
            label: label.into(),
            seed,
            prng: PRNG_NAME.into(),
            note: None,
        }
    }
}

/// Generates one instance of a class: unit weights, halfway deadline.
pub fn generate(class: InstanceClass, n: usize, seed: u64) -> Result<(Instance, Meta)> {
    let base = match class.graph {
        GraphClass::Er => gen_er(n, Rng::derive(seed, 1).next_u64()),
        GraphClass::Sp => gen_sp(n, Rng::derive(seed, 1).next_u64()),
    };
    let p_seed = Rng::derive(seed, 2).next_u64();
    let d_seed = Rng::derive(seed, 3).next_u64();
    let u_seed = Rng::derive(seed, 4).next_u64();
    let p = gen_processing(class.processing, &base, p_seed);
    let companion = if class.processing == ProcessingClass::Zero {
        let pq = gen_processing(ProcessingClass::QuasiCritical, &base, p_seed);
        Some(gen_deviation(DeviationClass::Rand, &pq, d_seed, None)?)
    } else {
        None
    };
    let dhat = gen_deviation(class.deviation, &p, d_seed, companion.as_deref())?;
    let graph = base.with_processing_times(p)?;
    let delta = build_uncertainty(class.uncertainty, &dhat, u_seed);
    let deadline = halfway_deadline(&graph, &dhat);
    let inst = Instance::new(graph, delta, deadline, vec![1.0; n])?;
    let mut meta = Meta::new(class.to_string(), seed);
    if class.graph == GraphClass::Er {
        meta.note = Some("arcs sampled over a uniformly random job order".into());
    }
    Ok((inst, meta))
}

/// Uncertainty-set variants for [`random_instance`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SetVariant {
    Box,
    Budgeted,
    OneDisruption,
    Partition,
    Mixed,
    Scenarios,
}

impl SetVariant {
    pub const ALL: [SetVariant; 6] = [
        SetVariant::Box,
        SetVariant::Budgeted,
        SetVariant::OneDisruption,
        SetVariant::Partition,
        SetVariant::Mixed,
        SetVariant::Scenarios,
    ];
}

/// Small random instance with integer data: a random DAG with arc density
/// `0.3`, `p ∈ {0..4}`, `δ̂ ∈ {0..3}`, `w ∈ {1..5}`, and a deadline drawn
/// uniformly between `L⁰_st` and the box makespan (rounded to halves).
pub fn random_instance(n: usize, variant: SetVariant, seed: u64) -> Instance {
    let mut rng = Rng::new(seed);
    let mut arcs = Vec::new();
    for i in 1..=n {
        for j in i + 1..=n {
            if rng.bernoulli(0.3) {
                arcs.push((i, j));
            }
        }
    }
    let p: Vec<f64> = (0..n).map(|_| rng.int_in(0, 4) as f64).collect();
    let g = PrecedenceGraph::from_job_arcs(n, &arcs, p).expect("forward arcs");
    let dhat: Vec<f64> = (0..n).map(|_| rng.int_in(0, 3) as f64).collect();
    let weights: Vec<f64> = (0..n).map(|_| rng.int_in(1, 5) as f64).collect();
    let gamma = |rng: &mut Rng| rng.int_in(1, 3.min(n.max(1)) as i64) as usize;
    let delta = match variant {
        SetVariant::Box => UncertaintySet::Box { dhat: dhat.clone() },
        SetVariant::Budgeted => UncertaintySet::Budgeted {
            dhat: dhat.clone(),
            gamma: gamma(&mut rng),
        },
        SetVariant::OneDisruption => UncertaintySet::OneDisruption {
            dhat0: rng.int_in(1, 3) as f64,
        },
        SetVariant::Partition => {
            let mut parts = vec![Vec::new(), Vec::new()];
            for j in 1..=n {
                parts[rng.below(2) as usize].push(j);
            }
            parts.retain(|p| !p.is_empty());
            let gammas = parts
                .iter()
                .map(|p| rng.int_in(1, p.len().min(2) as i64) as usize)
                .collect();
            UncertaintySet::PartitionBudgeted {
                dhat: dhat.clone(),
                parts,
                gammas,
            }
        }
        SetVariant::Mixed => UncertaintySet::MixedBudgeted {
            components: vec![
                Budget {
                    dhat: dhat.clone(),
                    gamma: 1,
                },
                Budget {
                    dhat: dhat.iter().map(|d| (d / 2.0).floor()).collect(),
                    gamma: gamma(&mut rng),
                },
            ],
        },
        SetVariant::Scenarios => {
            let k = rng.int_in(1, 4);
            UncertaintySet::Scenarios {
                deltas: (0..k)
                    .map(|_| (0..n).map(|_| rng.int_in(0, 3) as f64).collect())
                    .collect(),
            }
        }
    };
    let lo = g.min_makespan();
    let hi = deviated_longest(&g, &delta.max_deviation(n)).value(SOURCE, n + 1);
    let deadline = ((lo + rng.unit() * (hi - lo)) * 2.0).round() / 2.0;
    let deadline = deadline.clamp(lo, hi.max(lo));
    Instance::new(g, delta, deadline, weights).expect("valid random instance")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BudgetRecord {
    #[serde(rename = "type", default, skip_serializing_if = "Option::is_none")]
    kind: Option<String>,
    dhat: Vec<f64>,
    gamma: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
enum UncertaintyRecord {
    Box { dhat: Vec<f64> },
    Budgeted { dhat: Vec<f64>, gamma: usize },
    OneDisruption { dhat0: f64 },
    Partition { dhat: Vec<f64>, parts: Vec<Vec<usize>>, gammas: Vec<usize> },
    Mixed { components: Vec<BudgetRecord> },
    Scenarios { deltas: Vec<Vec<f64>> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceRecord {
    n: usize,
    arcs: Vec<(usize, usize)>,
    p: Vec<f64>,
    weights: Vec<f64>,
    deadline: f64,
    uncertainty: UncertaintyRecord,
    meta: Meta,
}

impl From<&UncertaintySet> for UncertaintyRecord {
    fn from(d: &UncertaintySet) -> Self {
        match d.clone() {
            UncertaintySet::Box { dhat } => UncertaintyRecord::Box { dhat },
            UncertaintySet::Budgeted { dhat, gamma } => UncertaintyRecord::Budgeted { dhat, gamma },
            UncertaintySet::OneDisruption { dhat0 } => UncertaintyRecord::OneDisruption { dhat0 },
            UncertaintySet::PartitionBudgeted { dhat, parts, gammas } => {
                UncertaintyRecord::Partition { dhat, parts, gammas }
            }
            UncertaintySet::MixedBudgeted { components } => UncertaintyRecord::Mixed {
                components: components
                    .into_iter()
                    .map(|b| BudgetRecord {
                        kind: Some("budgeted".into()),
                        dhat: b.dhat,
                        gamma: b.gamma,
                    })
                    .collect(),
            },
            UncertaintySet::Scenarios { deltas } => UncertaintyRecord::Scenarios { deltas },
        }
    }
}

impl UncertaintyRecord {
    fn into_set(self) -> Result<UncertaintySet> {
        Ok(match self {
            UncertaintyRecord::Box { dhat } => UncertaintySet::Box { dhat },
            UncertaintyRecord::Budgeted { dhat, gamma } => UncertaintySet::Budgeted { dhat, gamma },
            UncertaintyRecord::OneDisruption { dhat0 } => UncertaintySet::OneDisruption { dhat0 },
            UncertaintyRecord::Partition { dhat, parts, gammas } => {
                UncertaintySet::PartitionBudgeted { dhat, parts, gammas }
            }
            UncertaintyRecord::Mixed { components } => UncertaintySet::MixedBudgeted {
                components: components
                    .into_iter()
                    .map(|b| match b.kind.as_deref() {
                        None | Some("budgeted") => Ok(Budget {
                            dhat: b.dhat,
                            gamma: b.gamma,
                        }),
                        Some(other) => Err(Error::parse(
                            "uncertainty.components",
                            format!("component type must be \"budgeted\", got {other:?}"),
                        )),
                    })
                    .collect::<Result<_>>()?,
            },
            UncertaintyRecord::Scenarios { deltas } => UncertaintySet::Scenarios { deltas },
        })
    }
}

pub fn instance_to_json(inst: &Instance, meta: &Meta) -> String {
    let record = InstanceRecord {
        n: inst.n(),
        arcs: inst.graph.arcs().to_vec(),
        p: inst.graph.job_processing_times().to_vec(),
        weights: inst.weights.clone(),
        deadline: inst.deadline,
        uncertainty: (&inst.delta).into(),
        meta: meta.clone(),
    };
    let mut s = serde_json::to_string_pretty(&record).expect("instances serialize");
    s.push('\n');
    s
}

/// Parses an instance; `context` names the source in error messages.
pub fn instance_from_json(text: &str, context: &str) -> Result<(Instance, Meta)> {
    let record: InstanceRecord = serde_json::from_str(text).map_err(|e| Error::parse(context, e.to_string()))?;
    let invalid = |e: Error| Error::parse(context, e.to_string());
    let graph = PrecedenceGraph::new(record.n, record.arcs, record.p).map_err(invalid)?;
    let delta = record.uncertainty.into_set()?;
    let inst = Instance::new(graph, delta, record.deadline, record.weights).map_err(invalid)?;
    Ok((inst, record.meta))
}

pub fn read_instance(path: &Path) -> Result<(Instance, Meta)> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    instance_from_json(&text, &path.display().to_string())
}

pub fn write_instance(inst: &Instance, meta: &Meta, path: &Path) -> Result<()> {
    fs::write(path, instance_to_json(inst, meta)).map_err(|e| Error::io(path, e))
}

/// A solution `(x, H)` as stored on disk: `schedule` is indexed by vertex
/// (`s`, jobs, `t`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionRecord {
    pub schedule: Vec<f64>,
    pub anchored: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub objective: Option<f64>,
}

impl SolutionRecord {
    pub fn schedule(&self) -> Schedule {
        Schedule::new(self.schedule.clone())
    }
}

pub fn read_solution(path: &Path) -> Result<SolutionRecord> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::parse(path.display().to_string(), e.to_string()))
}

pub fn write_solution(sol: &SolutionRecord, path: &Path) -> Result<()> {
    let mut s = serde_json::to_string_pretty(sol).expect("solutions serialize");
    s.push('\n');
    fs::write(path, s).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{is_critical, is_quasi_critical};

    const EXAMPLE: &str = include_str!("../../../fixtures/example.json");

    #[test]
    fn rng_is_deterministic() {
        let a: Vec<u64> = {
            let mut r = Rng::new(7);
            (0..5).map(|_| r.next_u64()).collect()
        };
        let mut r = Rng::new(7);
        assert!(a.iter().all(|&v| v == r.next_u64()));
        for _ in 0..1000 {
            let v = r.int_in(5, 20);
            assert!((5..=20).contains(&v));
        }
    }

    #[test]
    fn labels_round_trip() {
        for s in ["ER_pZero_dUnif_G1", "SP_pQCri_dRand_Partition", "ER_pRand_dRand_Mixed", "SP_pRand_dUnif_G3"] {
            assert_eq!(s.parse::<InstanceClass>().unwrap().to_string(), s);
        }
        for s in ["ER_pZero_dUnif", "XX_pZero_dUnif_G1", "ER_pZero_dUnif_G4", ""] {
            assert!(matches!(s.parse::<InstanceClass>(), Err(Error::Parse { .. })), "{s}");
        }
    }

    #[test]
    fn single_job_graphs() {
        for g in [gen_er(1, 3), gen_sp(1, 3)] {
            assert_eq!(g.arcs(), &[(0, 1), (1, 2)]);
        }
    }

    #[test]
    fn generators_are_deterministic() {
        assert_eq!(gen_er(40, 11), gen_er(40, 11));
        assert_eq!(gen_sp(40, 11), gen_sp(40, 11));
        assert_ne!(gen_sp(40, 11), gen_sp(40, 12));
    }

    #[test]
    fn sp_sizes() {
        for n in 1..30 {
            assert_eq!(gen_sp(n, n as u64).n(), n);
        }
    }

    #[test]
    fn quasi_critical_processing() {
        for seed in 0..10 {
            let g = gen_er(25, seed);
            let p = gen_processing(ProcessingClass::QuasiCritical, &g, seed);
            assert!(is_quasi_critical(&g.with_processing_times(p).unwrap()));
            let sp = gen_sp(25, seed);
            let p = gen_processing(ProcessingClass::QuasiCritical, &sp, seed);
            assert!(is_critical(&sp.with_processing_times(p).unwrap()));
        }
        let g = gen_er(10, 1);
        assert!(gen_processing(ProcessingClass::Zero, &g, 1).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn deviation_ranges() {
        let p = vec![10.0; 50];
        let d = gen_deviation(DeviationClass::Rand, &p, 5, None).unwrap();
        assert!(d.iter().all(|&v| (1.0..=5.0).contains(&v) && v.fract() == 0.0));
        let u = gen_deviation(DeviationClass::Uniform, &p, 5, None).unwrap();
        assert!(u.iter().all(|&v| v == u[0]));
        assert!(d.contains(&u[0]));
        assert!(matches!(
            gen_deviation(DeviationClass::Rand, &[0.0; 3], 1, None),
            Err(Error::MissingCompanionDeviation)
        ));
        let c = [2.0, 3.0, 4.0];
        assert_eq!(gen_deviation(DeviationClass::Rand, &[0.0; 3], 1, Some(&c)).unwrap(), c.to_vec());
    }

    #[test]
    fn uncertainty_fields() {
        let dhat = vec![12.0, 30.0, 7.0];
        assert_eq!(
            build_uncertainty(UncertaintyField::Gamma(1), &dhat, 0),
            UncertaintySet::Budgeted { dhat: dhat.clone(), gamma: 1 }
        );
        assert_eq!(
            build_uncertainty(UncertaintyField::Gamma(3), &dhat[..2], 0),
            UncertaintySet::Budgeted { dhat: dhat[..2].to_vec(), gamma: 2 }
        );
        match build_uncertainty(UncertaintyField::Mixed, &dhat, 0) {
            UncertaintySet::MixedBudgeted { components } => {
                assert_eq!(components[0], Budget { dhat: dhat.clone(), gamma: 1 });
                assert_eq!(components[1], Budget { dhat: vec![2.0, 6.0, 1.0], gamma: 3 });
            }
            other => panic!("{other:?}"),
        }
        let a = build_uncertainty(UncertaintyField::Partition, &dhat, 9);
        assert_eq!(a, build_uncertainty(UncertaintyField::Partition, &dhat, 9));
        let UncertaintySet::PartitionBudgeted { dhat: dev, parts, gammas } = a else { panic!() };
        let mut all: Vec<usize> = parts.concat();
        all.sort_unstable();
        assert_eq!(all, vec![1, 2, 3]);
        assert!(gammas.iter().zip(&parts).all(|(&g, p)| g >= 1 && g <= p.len()));
        for j in 1..=3 {
            assert!(dev[j - 1] == dhat[j - 1] || dev[j - 1] == (0.1 * dhat[j - 1]).floor());
        }
    }

    #[test]
    fn halfway_example() {
        let (inst, _) = instance_from_json(EXAMPLE, "example").unwrap();
        let dhat = inst.delta.max_deviation(5);
        assert_eq!(halfway_deadline(&inst.graph, &dhat), 4.75);
        assert_eq!(halfway_deadline(&inst.graph, &[0.0; 5]), 4.0);
    }

    #[test]
    fn fixture_parses() {
        let (inst, meta) = instance_from_json(EXAMPLE, "example").unwrap();
        assert_eq!(inst.n(), 5);
        assert_eq!(inst.graph.arcs().len(), 8);
        assert_eq!(meta.prng, PRNG_NAME);
    }

    #[test]
    fn json_round_trip_all_variants() {
        for (k, v) in SetVariant::ALL.iter().enumerate() {
            let inst = random_instance(6, *v, k as u64);
            let meta = Meta::new("random", k as u64);
            let text = instance_to_json(&inst, &meta);
            let (back, m) = instance_from_json(&text, "mem").unwrap();
            assert_eq!(back, inst);
            assert_eq!(m, meta);
        }
    }

    #[test]
    fn json_rejects_bad_input() {
        let neg = EXAMPLE.replacen("\"p\": [\n    1.0", "\"p\": [\n    -1.0", 1);
        assert_ne!(neg, EXAMPLE);
        assert!(matches!(instance_from_json(&neg, "x"), Err(Error::Parse { .. })));
        let extra = EXAMPLE.replacen("\"deadline\"", "\"colour\": 1, \"deadline\"", 1);
        assert!(matches!(instance_from_json(&extra, "x"), Err(Error::Parse { .. })));
        assert!(matches!(instance_from_json("{", "x"), Err(Error::Parse { .. })));
    }

    #[test]
    fn generated_instances() {
        let class: InstanceClass = "SP_pZero_dUnif_G1".parse().unwrap();
        let (inst, meta) = generate(class, 30, 4).unwrap();
        assert_eq!(meta.label, "SP_pZero_dUnif_G1");
        assert!(inst.graph.job_processing_times().iter().all(|&p| p == 0.0));
        assert!(inst.delta.one_disruption_deviation(30).is_some());
        let (again, _) = generate(class, 30, 4).unwrap();
        assert_eq!(inst, again);
        for label in ["ER_pRand_dRand_Partition", "ER_pQCri_dRand_Mixed", "SP_pRand_dUnif_G2"] {
            let (inst, _) = generate(label.parse().unwrap(), 20, 1).unwrap();
            assert_eq!(inst.n(), 20);
            assert!(inst.deadline >= inst.graph.min_makespan());
        }
    }
}
