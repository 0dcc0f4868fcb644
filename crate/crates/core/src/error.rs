use thiserror::Error;

use crate::harness::HarnessError;
use crate::instance::InstanceError;
use crate::operators::OperatorError;
use crate::policy::PolicyError;
use crate::search::SearchError;
use crate::solution::SolutionError;

/// Crate-wide error, wrapping the per-module error types.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    Solution(#[from] SolutionError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Policy(#[from] PolicyError),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    Harness(#[from] HarnessError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Short machine-readable tag for the error family.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Instance(_) => "instance",
            Error::Solution(_) => "solution",
            Error::Operator(_) => "operator",
            Error::Policy(_) => "policy",
            Error::Search(_) => "search",
            Error::Harness(_) => "harness",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
