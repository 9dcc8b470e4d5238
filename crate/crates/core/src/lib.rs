//! Anchor-robust project scheduling.
//!
//! Given a precedence graph with processing times, a deadline and an
//! uncertainty set on processing-time deviations, find a baseline schedule
//! together with a maximum-weight set of jobs whose start times can be
//! guaranteed under every realization.

pub mod anchored;
pub mod error;
pub mod exact;
pub mod formulations;
pub mod graph;
pub mod harness;
pub mod instances;
pub mod milp;
pub mod uncertainty;

pub use anchored::{AnchoredSolution, Instance};
pub use error::{Error, Result};
pub use formulations::Formulation;
pub use harness::{Method, RunOptions, RunRecord};
pub use instances::{InstanceClass, Meta};
pub use graph::{LongestPathMatrix, PrecedenceGraph, Schedule, EPS};
pub use milp::{MipModel, MipParams, SolveResult, SolveStatus, VarId};
pub use uncertainty::{Budget, UncertaintySet};
