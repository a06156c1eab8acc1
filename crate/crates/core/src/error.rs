use thiserror::Error;

use crate::model::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed document: {0}")]
    Parse(#[from] serde_json::Error),

    #[error("field `{field}`: {detail}")]
    Shape { field: &'static str, detail: String },

    #[error("unsupported format `{found}`, expected `{expected}`")]
    Format { found: String, expected: &'static str },

    #[error("invalid instance: {}", join(.0))]
    InvalidInstance(Vec<Violation>),

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("instance has {n} jobs and {m} machines but the schedule covers {sched_n} jobs on {sched_m} machines")]
    Mismatch {
        n: usize,
        m: usize,
        sched_n: usize,
        sched_m: usize,
    },

    #[error("negative regret {regret} against an exact optimum; the inner solver is broken")]
    NegativeRegret { regret: i64 },

    #[error("processing-time lower bound is zero at ({machine},{job}); the deviation ratio is undefined")]
    ZeroLowerBound { machine: usize, job: usize },

    #[error("invalid configuration: {0}")]
    Config(String),
}

fn join(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}
