use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("precedence graph contains a cycle")]
    CycleDetected,

    #[error("invalid precedence graph: {0}")]
    InvalidGraph(String),

    #[error("deadline {deadline} is below the minimum makespan {min_makespan}")]
    DeadlineInfeasible { deadline: f64, min_makespan: f64 },

    #[error("uncertainty budget out of range: {0}")]
    BudgetOutOfRange(String),

    #[error("scenario uncertainty set has no scenarios")]
    EmptyScenarioList,

    #[error("invalid uncertainty set: {0}")]
    InvalidUncertainty(String),

    #[error("extreme point enumeration too large: {0}")]
    EnumerationTooLarge(String),

    #[error("vector is not a schedule of the precedence graph: {0}")]
    NotASchedule(String),

    #[error("job set is not anchored within the deadline")]
    InfeasibleAnchoredSet,

    #[error("instance too large for exhaustive enumeration ({n} jobs, limit {limit})")]
    InstanceTooLarge { n: usize, limit: usize },

    #[error("invalid linear model: {0}")]
    InvalidModel(String),

    #[error("numerical failure in LP solver: {0}")]
    NumericalFailure(String),

    #[error("uncertainty set not supported here: {0}")]
    UnsupportedUncertainty(String),

    #[error("instance outside the supported special case: {0}")]
    UnsupportedInstance(String),

    #[error("precedence graph is not critical")]
    NotCritical,

    #[error("LP vertex is not integral in h (job {job}, value {value})")]
    NonIntegralVertex { job: usize, value: f64 },

    #[error("pZero instances need the deviation vector of the companion pQCri instance")]
    MissingCompanionDeviation,

    #[error("parse error in {context}: {message}")]
    Parse { context: String, message: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn parse(context: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            context: context.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
