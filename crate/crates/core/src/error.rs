use robtnep_milp::SolverError;
use thiserror::Error;

use crate::model::ValidationErrors;

#[derive(Debug, Error)]
pub enum CoreError {
    #[error("invalid network: {0}")]
    Validation(#[from] ValidationErrors),
    #[error("{0}")]
    Ingest(#[from] crate::ingest::IngestError),
    #[error("{stage}: solver error: {source}")]
    Solver {
        stage: &'static str,
        #[source]
        source: SolverError,
    },
    #[error("{stage}: solver stopped at {status} before proving optimality")]
    Limit { stage: &'static str, status: String },
    #[error("{stage}: problem is infeasible")]
    Infeasible { stage: &'static str },
    #[error("{stage}: problem is unbounded (check big_m)")]
    Unbounded { stage: &'static str },
    #[error("{what} is not integral: {value}")]
    NonIntegral { what: String, value: f64 },
    #[error("investment {cost} exceeds budget {budget}")]
    BudgetViolation { cost: f64, budget: f64 },
    #[error("oracle refused: {0}")]
    OracleGuard(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl CoreError {
    pub(crate) fn solver(stage: &'static str) -> impl FnOnce(SolverError) -> CoreError {
        move |source| CoreError::Solver { stage, source }
    }

    /// True for errors caused by input data rather than by a solve.
    pub fn is_data_error(&self) -> bool {
        matches!(
            self,
            CoreError::Validation(_) | CoreError::Ingest(_) | CoreError::InvalidArgument(_)
        )
    }
}

pub type Result<T, E = CoreError> = std::result::Result<T, E>;
