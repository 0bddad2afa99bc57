//! Adapter that hands models to the `microlp` crate.
//!
//! microlp exposes no dual information, so LP solutions from this backend
//! carry empty `duals` and `reduced_costs`.

use microlp::{ComparisonOp, OptimizationDirection, Problem, SolveOptions, SolveOutcome, Variable};

use crate::branch::{MilpParams, MilpSolution, MilpStatus};
use crate::lp::{LpSolution, LpStatus};
use crate::model::{MilpModel, ObjectiveSense, RowSense, VarKind};
use crate::solver::{Solver, SolverError};

#[derive(Debug, Clone, Copy, Default)]
pub struct ExternalSolver;

fn translate(model: &MilpModel) -> (Problem, Vec<Variable>) {
    let direction = match model.objective().sense {
        ObjectiveSense::Minimize => OptimizationDirection::Minimize,
        ObjectiveSense::Maximize => OptimizationDirection::Maximize,
    };
    let mut problem = Problem::new(direction);
    let c = model.objective_vector();
    let vars: Vec<Variable> = model
        .variables()
        .iter()
        .zip(&c)
        .map(|(v, &cj)| match v.kind {
            VarKind::Binary if v.lower <= 0.0 && v.upper >= 1.0 => problem.add_binary_var(cj),
            VarKind::Binary => problem.add_integer_var(cj, (v.lower.ceil() as i32, v.upper.floor() as i32)),
            VarKind::Continuous => problem.add_var(cj, (v.lower, v.upper)),
        })
        .collect();
    for con in model.constraints() {
        let op = match con.sense {
            RowSense::Le => ComparisonOp::Le,
            RowSense::Ge => ComparisonOp::Ge,
            RowSense::Eq => ComparisonOp::Eq,
        };
        let expr: Vec<(Variable, f64)> = con.terms.iter().map(|&(v, a)| (vars[v.index()], a)).collect();
        problem.add_constraint(expr, op, con.rhs);
    }
    (problem, vars)
}

impl Solver for ExternalSolver {
    fn name(&self) -> &'static str {
        "external"
    }

    fn solve_lp(&self, model: &MilpModel) -> Result<LpSolution, SolverError> {
        model.validate()?;
        if model.has_integers() {
            return Err(SolverError::IntegerVariables);
        }
        let (problem, vars) = translate(model);
        match problem.solve() {
            Ok(SolveOutcome::Solution(sol)) => {
                let values: Vec<f64> = vars.iter().map(|&v| sol.var_value_raw(v)).collect();
                Ok(LpSolution {
                    status: LpStatus::Optimal,
                    objective: model.evaluate_objective(&values),
                    values,
                    duals: Vec::new(),
                    reduced_costs: Vec::new(),
                    iterations: 0,
                })
            }
            Ok(SolveOutcome::Interrupted(_)) => Ok(LpSolution::without_solution(LpStatus::IterationLimit, 0)),
            Err(microlp::Error::Infeasible) => Ok(LpSolution::without_solution(LpStatus::Infeasible, 0)),
            Err(microlp::Error::Unbounded) => Ok(LpSolution::without_solution(LpStatus::Unbounded, 0)),
            Err(e) => Err(SolverError::External(e.to_string())),
        }
    }

    fn solve_milp(&self, model: &MilpModel, params: &MilpParams) -> Result<MilpSolution, SolverError> {
        model.validate()?;
        let (problem, vars) = translate(model);
        let mut options = SolveOptions::default();
        options.time_limit = params.time_limit;
        options.node_limit = params.node_limit.map(|n| n as u64);
        options.mip_gap = params.rel_gap;
        options.int_tol = params.tolerances.integrality;
        let sign = match model.objective().sense {
            ObjectiveSense::Minimize => 1.0,
            ObjectiveSense::Maximize => -1.0,
        };
        match problem.solve_with(options) {
            Ok(SolveOutcome::Solution(sol)) => {
                let mut values: Vec<f64> = vars.iter().map(|&v| sol.var_value(v)).collect();
                for (val, var) in values.iter_mut().zip(model.variables()) {
                    if var.kind == VarKind::Binary {
                        *val = val.round();
                    }
                }
                let objective = model.evaluate_objective(&values);
                let status = match sol.termination_reason() {
                    microlp::TerminationReason::NodeLimit => MilpStatus::NodeLimit,
                    microlp::TerminationReason::TimeLimit => MilpStatus::TimeLimit,
                    _ => MilpStatus::Optimal,
                };
                let stats = sol.stats();
                let best_bound = stats.best_bound.unwrap_or(objective);
                Ok(MilpSolution {
                    status,
                    values,
                    objective,
                    best_bound,
                    nodes: stats.nodes_solved as usize,
                })
            }
            Ok(SolveOutcome::Interrupted(int)) => {
                let status = match int.termination_reason() {
                    microlp::TerminationReason::NodeLimit => MilpStatus::NodeLimit,
                    _ => MilpStatus::TimeLimit,
                };
                Ok(MilpSolution {
                    status,
                    values: Vec::new(),
                    objective: sign * f64::INFINITY,
                    best_bound: sign * f64::NEG_INFINITY,
                    nodes: int.stats().nodes_solved as usize,
                })
            }
            Err(microlp::Error::Infeasible) => Ok(MilpSolution {
                status: MilpStatus::Infeasible,
                values: Vec::new(),
                objective: sign * f64::INFINITY,
                best_bound: sign * f64::INFINITY,
                nodes: 0,
            }),
            Err(microlp::Error::Unbounded) => Ok(MilpSolution {
                status: MilpStatus::Unbounded,
                values: Vec::new(),
                objective: sign * f64::NEG_INFINITY,
                best_bound: sign * f64::NEG_INFINITY,
                nodes: 0,
            }),
            Err(e) => Err(SolverError::External(e.to_string())),
        }
    }
}
