use crate::model::{MilpModel, ObjectiveSense};
use crate::simplex::Engine;
use crate::solver::SolverError;
use crate::tolerances::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
    NumericalFailure,
}

/// Result of a linear program solve.
///
/// `duals[i]` is the derivative of the optimal objective with respect to the
/// right-hand side of row `i`, in the model's own objective sense, and
/// `reduced_costs[j]` the derivative with respect to variable `j` at its
/// active bound. Both vectors are empty when the backend provides none.
#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub values: Vec<f64>,
    pub duals: Vec<f64>,
    pub reduced_costs: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
}

impl LpSolution {
    pub(crate) fn without_solution(status: LpStatus, iterations: usize) -> Self {
        Self {
            status,
            values: Vec::new(),
            duals: Vec::new(),
            reduced_costs: Vec::new(),
            objective: f64::NAN,
            iterations,
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

/// Solves a model without integer variables with the built-in simplex.
pub fn solve_lp(model: &MilpModel, tol: &Tolerances) -> Result<LpSolution, SolverError> {
    model.validate()?;
    if model.has_integers() {
        return Err(SolverError::IntegerVariables);
    }
    let mut engine = Engine::new(model, *tol);
    let status = engine.solve();
    Ok(engine_solution(model, &mut engine, status))
}

pub(crate) fn engine_solution(model: &MilpModel, engine: &mut Engine, status: LpStatus) -> LpSolution {
    if status != LpStatus::Optimal {
        return LpSolution::without_solution(status, engine.iterations());
    }
    let values = engine.values();
    let (mut duals, mut reduced_costs) = engine.duals_and_reduced_costs();
    if model.objective().sense == ObjectiveSense::Maximize {
        duals.iter_mut().for_each(|y| *y = -*y);
        reduced_costs.iter_mut().for_each(|d| *d = -*d);
    }
    LpSolution {
        status,
        objective: model.evaluate_objective(&values),
        values,
        duals,
        reduced_costs,
        iterations: engine.iterations(),
    }
}
