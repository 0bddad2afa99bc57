//! A small, deterministic LP/MILP engine.
//!
//! Models are built with [`MilpModel`] and solved either directly through
//! [`solve_lp`] / [`solve_milp`] or through the [`Solver`] trait, which also
//! has an adapter for the `microlp` crate ([`ExternalSolver`]).
//!
//! The LP engine is a bounded-variable revised simplex with a dense basis
//! inverse, Harris ratio tests and a Bland fallback against cycling. The MILP
//! layer is branch-and-bound on binary variables that warm-starts every node
//! with the dual simplex.

mod basis;
mod branch;
mod external;
mod lp;
mod model;
mod simplex;
mod solver;
mod tolerances;

pub use branch::{solve_milp, MilpParams, MilpSolution, MilpStatus};
pub use external::ExternalSolver;
pub use lp::{solve_lp, LpSolution, LpStatus};
pub use model::{
    ConId, Constraint, MilpModel, ModelError, ModelStats, Objective, ObjectiveSense, RowSense, VarId,
    VarKind, Variable,
};
pub use solver::{BuiltinSolver, Solver, SolverError, SolverKind};
pub use tolerances::{Tolerances, DEFAULT_REL_GAP};
