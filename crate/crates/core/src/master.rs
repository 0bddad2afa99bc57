//! Master problem: investment decisions plus one operating block per
//! identified scenario.

use robtnep_milp::{MilpModel, MilpParams, MilpSolution, MilpStatus, ObjectiveSense, RowSense, Solver, VarId};

use crate::block::{add_block, add_symmetry_rows, Lines};
use crate::error::{CoreError, Result};
use crate::model::Network;
use crate::operation::Scenario;

#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionPlan {
    /// Build decision per candidate line, in [`Network::candidate_lines`] order.
    pub build: Vec<bool>,
    pub investment_cost: f64,
    /// Worst-case operating cost covered by the plan (currency per year).
    pub gamma: f64,
}

impl ExpansionPlan {
    pub fn nothing(net: &Network) -> Self {
        Self::from_build(net, vec![false; net.num_candidates()], 0.0)
    }

    pub fn from_build(net: &Network, build: Vec<bool>, gamma: f64) -> Self {
        let investment_cost = net
            .candidate_lines()
            .iter()
            .zip(&build)
            .filter(|(_, &b)| b)
            .fold(0.0, |acc, (&k, _)| acc + net.lines[k].build_cost);
        Self {
            build,
            investment_cost,
            gamma,
        }
    }

    /// Line indices of the candidates that are built.
    pub fn built_lines(&self, net: &Network) -> Vec<usize> {
        net.candidate_lines()
            .into_iter()
            .zip(&self.build)
            .filter(|(_, &b)| b)
            .map(|(k, _)| k)
            .collect()
    }

    pub fn count(&self) -> usize {
        self.build.iter().filter(|&&b| b).count()
    }
}

/// Builds the master MILP. Variables `0..n_c` are the build decisions and
/// variable `n_c` is the worst-case cost bound; both layouts are relied on
/// by [`extract_plan`].
pub fn build_master(net: &Network, scenarios: &[Scenario]) -> MilpModel {
    let mut model = MilpModel::new(ObjectiveSense::Minimize);
    let unit = net.cost_unit();
    let recovery = net.capital_recovery();
    let cands = net.candidate_lines();
    let x: Vec<VarId> = cands.iter().map(|k| model.add_binary(format!("x_{k}"))).collect();
    let gamma = model.add_continuous("gamma", 0.0, f64::INFINITY);

    let max_cost = cands.iter().map(|&k| net.lines[k].build_cost).fold(0.0, f64::max);
    for (&k, &xk) in cands.iter().zip(&x) {
        model.add_objective_term(xk, recovery * net.lines[k].build_cost / unit);
    }
    model.add_objective_term(gamma, 1.0);
    if !cands.is_empty() {
        // Scaled so the row has unit-sized coefficients.
        let scale = if max_cost > 0.0 { max_cost } else { 1.0 };
        let terms = cands.iter().zip(&x).map(|(&k, &xk)| (xk, net.lines[k].build_cost / scale)).collect();
        model.add_constraint("budget", terms, RowSense::Le, net.config.budget / scale);
    }
    add_symmetry_rows(&mut model, net, &x);

    for (i, sc) in scenarios.iter().enumerate() {
        let block = add_block(&mut model, net, sc, Lines::Variable(&x), &format!("_{i}"));
        let mut terms = vec![(gamma, 1.0)];
        terms.extend(block.cost.iter().map(|&(v, c)| (v, -c)));
        model.add_constraint(format!("cut_{i}"), terms, RowSense::Ge, 0.0);
    }
    model
}

/// Reads the plan from a master solution, checking integrality and budget.
pub fn extract_plan(sol: &MilpSolution, net: &Network) -> Result<ExpansionPlan> {
    let nc = net.num_candidates();
    if sol.values.len() <= nc {
        return Err(CoreError::InvalidArgument("master solution has no values".into()));
    }
    let tol = 1e-6;
    let mut build = Vec::with_capacity(nc);
    for (k, &v) in sol.values[..nc].iter().enumerate() {
        if (v - v.round()).abs() > tol || !(-tol..=1.0 + tol).contains(&v) {
            return Err(CoreError::NonIntegral {
                what: format!("build decision {k}"),
                value: v,
            });
        }
        build.push(v.round() == 1.0);
    }
    let gamma = sol.values[nc].max(0.0) * net.cost_unit();
    let plan = ExpansionPlan::from_build(net, build, gamma);
    if plan.investment_cost > net.config.budget + 1e-6 * net.config.budget.abs().max(1.0) {
        return Err(CoreError::BudgetViolation {
            cost: plan.investment_cost,
            budget: net.config.budget,
        });
    }
    Ok(plan)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MasterOutcome {
    pub plan: ExpansionPlan,
    /// `R * investment + gamma`: a lower bound on the robust optimum.
    pub objective: f64,
    pub nodes: usize,
}

pub(crate) fn milp_status_error(stage: &'static str, status: MilpStatus) -> CoreError {
    match status {
        MilpStatus::Infeasible => CoreError::Infeasible { stage },
        MilpStatus::Unbounded => CoreError::Unbounded { stage },
        other => CoreError::Limit {
            stage,
            status: format!("{other:?}"),
        },
    }
}

pub fn solve_master(
    net: &Network,
    scenarios: &[Scenario],
    solver: &dyn Solver,
    params: &MilpParams,
) -> Result<MasterOutcome> {
    let model = build_master(net, scenarios);
    let sol = solver.solve_milp(&model, params).map_err(CoreError::solver("master"))?;
    if !sol.is_optimal() {
        return Err(milp_status_error("master", sol.status));
    }
    let plan = extract_plan(&sol, net)?;
    let objective = net.capital_recovery() * plan.investment_cost + plan.gamma;
    Ok(MasterOutcome {
        plan,
        objective,
        nodes: sol.nodes,
    })
}
