//! Column-and-constraint generation driver.
//!
//! Each iteration solves the master over the scenarios found so far (a lower
//! bound), then the worst-case subproblem at the master's plan (an upper
//! bound), and adds the worst scenario to the master.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use robtnep_milp::{MilpParams, Solver};
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::master::{solve_master, ExpansionPlan};
use crate::model::Network;
use crate::operation::Scenario;
use crate::subproblem_dual::{solve_dual_subproblem, WorstCase};
use crate::subproblem_kkt::solve_kkt_subproblem;

pub const DEFAULT_MAX_ITERATIONS: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    #[default]
    Dual,
    Kkt,
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "dual" => Ok(Method::Dual),
            "kkt" => Ok(Method::Kkt),
            other => Err(format!("unknown method `{other}` (expected dual or kkt)")),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Dual => "dual",
            Method::Kkt => "kkt",
        })
    }
}

#[derive(Debug, Clone)]
pub struct CcgLimits {
    pub max_iterations: usize,
    pub milp: MilpParams,
    /// Overrides the network's dual bound (currency units).
    pub big_m: Option<f64>,
}

impl Default for CcgLimits {
    fn default() -> Self {
        Self {
            max_iterations: DEFAULT_MAX_ITERATIONS,
            milp: MilpParams::default(),
            big_m: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CcgStatus {
    Converged,
    IterationLimit,
}

/// One line of the iteration trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub build: Vec<bool>,
    pub investment_cost: f64,
    /// Master's worst-case cost variable.
    pub gamma: f64,
    pub z_gen: Vec<bool>,
    pub z_dem: Vec<bool>,
    /// Worst-case operating cost of the master's plan.
    pub worst_cost: f64,
    pub z_lo: f64,
    /// Best upper bound so far.
    pub z_up: f64,
    /// Upper bound evaluated at this iteration's plan.
    pub z_up_raw: f64,
    pub gap: f64,
    pub master_nodes: usize,
    pub subproblem_nodes: usize,
    pub master_seconds: f64,
    pub subproblem_seconds: f64,
    pub wall_seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CcgResult {
    /// `gamma` holds the plan's worst-case operating cost.
    pub plan: ExpansionPlan,
    pub z_lo: f64,
    pub z_up: f64,
    pub iterations: usize,
    pub trace: Vec<IterationRecord>,
    pub status: CcgStatus,
    pub scenarios: Vec<Scenario>,
}

impl CcgResult {
    /// Robust objective: annualized investment plus worst-case operating cost.
    pub fn objective(&self) -> f64 {
        self.z_up
    }

    /// Trace as JSON lines.
    pub fn trace_jsonl(&self) -> String {
        self.trace
            .iter()
            .map(|r| serde_json::to_string(r).expect("trace records serialize") + "\n")
            .collect()
    }
}

/// Relative gap with an absolute fallback when the upper bound is not positive.
pub fn relative_gap(z_lo: f64, z_up: f64) -> f64 {
    if !z_up.is_finite() {
        f64::INFINITY
    } else if z_up > 0.0 {
        (z_up - z_lo) / z_up
    } else {
        z_up - z_lo
    }
}

fn converged(z_lo: f64, z_up: f64, eps: f64) -> bool {
    if z_up > 0.0 {
        relative_gap(z_lo, z_up) <= eps
    } else {
        z_up - z_lo <= 1e-9
    }
}

/// Worst case of a fixed plan with the chosen subproblem.
pub fn worst_case(
    net: &Network,
    plan: &[bool],
    method: Method,
    solver: &dyn Solver,
    limits: &CcgLimits,
) -> Result<WorstCase> {
    let big_m = limits.big_m.unwrap_or_else(|| net.big_m());
    match method {
        Method::Dual => solve_dual_subproblem(net, plan, big_m, solver, &limits.milp),
        Method::Kkt => solve_kkt_subproblem(net, plan, big_m, solver, &limits.milp),
    }
}

pub fn solve_robust_tnep(net: &Network, method: Method, solver: &dyn Solver, limits: &CcgLimits) -> Result<CcgResult> {
    if limits.max_iterations == 0 {
        return Err(CoreError::InvalidArgument("max_iterations must be positive".into()));
    }
    let eps = net.config.epsilon;
    let recovery = net.capital_recovery();
    let start = Instant::now();
    let mut scenarios: Vec<Scenario> = Vec::new();
    let mut trace = Vec::new();
    let mut z_lo = f64::NEG_INFINITY;
    let mut z_up = f64::INFINITY;
    let mut incumbent: Option<ExpansionPlan> = None;

    for iteration in 1..=limits.max_iterations {
        let t0 = Instant::now();
        let master = solve_master(net, &scenarios, solver, &limits.milp)?;
        let master_seconds = t0.elapsed().as_secs_f64();
        z_lo = z_lo.max(master.objective);

        let t1 = Instant::now();
        let wc = worst_case(net, &master.plan.build, method, solver, limits)?;
        let subproblem_seconds = t1.elapsed().as_secs_f64();
        let raw = recovery * master.plan.investment_cost + wc.cost;
        if raw < z_up {
            z_up = raw;
            incumbent = Some(ExpansionPlan {
                gamma: wc.cost,
                ..master.plan.clone()
            });
        }
        let gap = relative_gap(z_lo, z_up);
        let duplicate = scenarios.iter().any(|s| s.same_vertex(&wc.scenario));
        trace.push(IterationRecord {
            iteration,
            build: master.plan.build.clone(),
            investment_cost: master.plan.investment_cost,
            gamma: master.plan.gamma,
            z_gen: wc.scenario.z_gen.clone(),
            z_dem: wc.scenario.z_dem.clone(),
            worst_cost: wc.cost,
            z_lo,
            z_up,
            z_up_raw: raw,
            gap,
            master_nodes: master.nodes,
            subproblem_nodes: wc.nodes,
            master_seconds,
            subproblem_seconds,
            wall_seconds: start.elapsed().as_secs_f64(),
        });
        log::info!("ccg iteration {iteration}: z_lo = {z_lo:.6}, z_up = {z_up:.6}, gap = {gap:.3e}");

        let done = converged(z_lo, z_up, eps);
        if done || duplicate {
            if !done {
                log::warn!("ccg: worst case repeats an earlier scenario with gap {gap:.3e} above {eps:.1e}");
            }
            let final_plan = if converged(z_lo, raw, eps) {
                ExpansionPlan {
                    gamma: wc.cost,
                    ..master.plan
                }
            } else {
                log::info!("ccg: last master plan is not within tolerance, returning the incumbent");
                incumbent.clone().expect("an upper bound was recorded")
            };
            return Ok(CcgResult {
                plan: final_plan,
                z_lo,
                z_up,
                iterations: iteration,
                trace,
                status: CcgStatus::Converged,
                scenarios,
            });
        }
        scenarios.push(wc.scenario);
    }
    Ok(CcgResult {
        plan: incumbent.expect("at least one iteration ran"),
        z_lo,
        z_up,
        iterations: limits.max_iterations,
        trace,
        status: CcgStatus::IterationLimit,
        scenarios,
    })
}
