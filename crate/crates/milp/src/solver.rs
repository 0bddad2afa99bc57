use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::branch::{self, MilpParams, MilpSolution};
use crate::external::ExternalSolver;
use crate::lp::{self, LpSolution};
use crate::model::{MilpModel, ModelError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("invalid model: {0}")]
    Model(#[from] ModelError),
    #[error("solve_lp requires a model without integer variables")]
    IntegerVariables,
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("external solver failed: {0}")]
    External(String),
}

/// Abstract LP/MILP backend.
pub trait Solver: Send + Sync {
    fn name(&self) -> &'static str;

    fn solve_lp(&self, model: &MilpModel) -> Result<LpSolution, SolverError>;

    fn solve_milp(&self, model: &MilpModel, params: &MilpParams) -> Result<MilpSolution, SolverError>;
}

/// The bundled simplex and branch-and-bound engine.
#[derive(Debug, Clone, Copy, Default)]
pub struct BuiltinSolver {
    pub tolerances: crate::Tolerances,
}

impl Solver for BuiltinSolver {
    fn name(&self) -> &'static str {
        "builtin"
    }

    fn solve_lp(&self, model: &MilpModel) -> Result<LpSolution, SolverError> {
        lp::solve_lp(model, &self.tolerances)
    }

    fn solve_milp(&self, model: &MilpModel, params: &MilpParams) -> Result<MilpSolution, SolverError> {
        branch::solve_milp(model, params)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SolverKind {
    #[default]
    Builtin,
    External,
}

impl SolverKind {
    pub fn instantiate(self) -> Box<dyn Solver> {
        match self {
            SolverKind::Builtin => Box::new(BuiltinSolver::default()),
            SolverKind::External => Box::new(ExternalSolver),
        }
    }
}

impl FromStr for SolverKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "builtin" => Ok(SolverKind::Builtin),
            "external" => Ok(SolverKind::External),
            other => Err(format!("unknown solver `{other}` (expected builtin or external)")),
        }
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolverKind::Builtin => "builtin",
            SolverKind::External => "external",
        })
    }
}
