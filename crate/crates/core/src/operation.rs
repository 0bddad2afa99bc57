//! Dispatch for a fixed plan and scenario, the deterministic expansion MILP,
//! and the brute-force robust oracle.

use rayon::prelude::*;
use robtnep_milp::{LpStatus, MilpModel, MilpParams, ObjectiveSense, Solver};

use crate::block::{add_block, Block, Lines};
use crate::error::{CoreError, Result};
use crate::master::{solve_master, ExpansionPlan};
use crate::model::Network;

/// Largest number of candidate lines [`enumerate_exact`] accepts.
pub const ORACLE_MAX_CANDIDATES: usize = 12;
/// Largest number of uncertainty vertices [`enumerate_exact`] accepts.
pub const ORACLE_MAX_VERTICES: u128 = 4096;

/// One realization of the uncertain capacities and loads.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub gen_caps: Vec<f64>,
    pub dem_loads: Vec<f64>,
    pub z_gen: Vec<bool>,
    pub z_dem: Vec<bool>,
}

impl Scenario {
    pub fn nominal(net: &Network) -> Self {
        Self::from_indicators(net, vec![false; net.generators.len()], vec![false; net.demands.len()])
    }

    /// Capacities drop by their deviation where `z_gen` is set; loads rise
    /// where `z_dem` is set.
    pub fn from_indicators(net: &Network, z_gen: Vec<bool>, z_dem: Vec<bool>) -> Self {
        assert_eq!(z_gen.len(), net.generators.len());
        assert_eq!(z_dem.len(), net.demands.len());
        let gen_caps = net
            .generators
            .iter()
            .zip(&z_gen)
            .map(|(g, &z)| if z { g.cap_nominal - g.cap_deviation } else { g.cap_nominal })
            .collect();
        let dem_loads = net
            .demands
            .iter()
            .zip(&z_dem)
            .map(|(d, &z)| if z { d.load_nominal + d.load_deviation } else { d.load_nominal })
            .collect();
        Self {
            gen_caps,
            dem_loads,
            z_gen,
            z_dem,
        }
    }

    /// Whether the indicators respect every regional budget.
    pub fn within_budgets(&self, net: &Network) -> bool {
        let gen_ok = net.gen_groups().iter().all(|(region, idx)| {
            idx.iter().filter(|&&i| self.z_gen[i]).count() <= net.gamma_gen(region) as usize
        });
        let dem_ok = net.dem_groups().iter().all(|(region, idx)| {
            idx.iter().filter(|&&j| self.z_dem[j]).count() <= net.gamma_dem(region) as usize
        });
        gen_ok && dem_ok
    }

    pub fn same_vertex(&self, other: &Scenario) -> bool {
        self.z_gen == other.z_gen && self.z_dem == other.z_dem
    }
}

/// Operating point of the network.
#[derive(Debug, Clone, PartialEq)]
pub struct Dispatch {
    pub g: Vec<f64>,
    pub r: Vec<f64>,
    pub d: Vec<f64>,
    pub f: Vec<f64>,
    pub theta: Vec<f64>,
    /// Annual operating cost `sigma * (sum c^G g + sum c^U r)`.
    pub cost: f64,
}

impl Dispatch {
    pub(crate) fn new(net: &Network, g: Vec<f64>, r: Vec<f64>, d: Vec<f64>, f: Vec<f64>, theta: Vec<f64>) -> Self {
        let hourly: f64 = net.generators.iter().zip(&g).map(|(x, v)| x.cost * v).sum::<f64>()
            + net.demands.iter().zip(&r).map(|(x, v)| x.shed_cost * v).sum::<f64>();
        Self {
            cost: net.config.sigma * hourly,
            g,
            r,
            d,
            f,
            theta,
        }
    }

    /// Largest violation of balance, flow, limit and bound conditions in MW
    /// (angles in radians).
    pub fn max_residual(&self, net: &Network, plan: &[bool], sc: &Scenario) -> f64 {
        let mut worst: f64 = 0.0;
        let mut injection = vec![0.0; net.buses.len()];
        for (i, gen) in net.generators.iter().enumerate() {
            injection[gen.bus] += self.g[i];
            worst = worst.max(-self.g[i]).max(self.g[i] - sc.gen_caps[i]);
        }
        for (j, dem) in net.demands.iter().enumerate() {
            injection[dem.bus] += self.r[j] - self.d[j];
            worst = worst
                .max(-self.r[j])
                .max(self.r[j] - dem.shed_fraction * sc.dem_loads[j])
                .max((self.d[j] - sc.dem_loads[j]).abs());
        }
        let mut cand = 0;
        for (k, line) in net.lines.iter().enumerate() {
            let built = if line.is_candidate() {
                cand += 1;
                plan[cand - 1]
            } else {
                true
            };
            injection[line.from_bus] -= self.f[k];
            injection[line.to_bus] += self.f[k];
            let expected = if built {
                line.susceptance * (self.theta[line.from_bus] - self.theta[line.to_bus])
            } else {
                0.0
            };
            worst = worst.max((self.f[k] - expected).abs()).max(self.f[k].abs() - line.capacity);
        }
        for (s, inj) in injection.iter().enumerate() {
            worst = worst.max(inj.abs()).max(self.theta[s].abs() - std::f64::consts::PI);
        }
        worst.max(self.theta[net.slack_bus()].abs())
    }
}

fn check_plan(net: &Network, plan: &[bool]) -> Result<()> {
    if plan.len() != net.num_candidates() {
        return Err(CoreError::InvalidArgument(format!(
            "plan has {} entries but the network has {} candidate lines",
            plan.len(),
            net.num_candidates()
        )));
    }
    Ok(())
}

fn dispatch_model(net: &Network, plan: &[bool], sc: &Scenario) -> Result<(MilpModel, Block)> {
    check_plan(net, plan)?;
    let mut model = MilpModel::new(ObjectiveSense::Minimize);
    let block = add_block(&mut model, net, sc, Lines::Fixed(plan), "");
    for &(v, c) in &block.cost {
        model.add_objective_term(v, c);
    }
    Ok((model, block))
}

/// The dispatch LP behind [`solve_operation_lp`], for checking it with
/// another LP code.
pub fn build_operation_lp(net: &Network, plan: &[bool], sc: &Scenario) -> Result<MilpModel> {
    dispatch_model(net, plan, sc).map(|(model, _)| model)
}

/// Least-cost dispatch for a fixed plan (one flag per candidate line) and scenario.
pub fn solve_operation_lp(net: &Network, plan: &[bool], sc: &Scenario, solver: &dyn Solver) -> Result<Dispatch> {
    let (model, block) = dispatch_model(net, plan, sc)?;
    let sol = solver.solve_lp(&model).map_err(CoreError::solver("operation"))?;
    match sol.status {
        LpStatus::Optimal => Ok(block.dispatch(net, &sol.values)),
        LpStatus::Infeasible => Err(CoreError::Infeasible { stage: "operation" }),
        LpStatus::Unbounded => Err(CoreError::Unbounded { stage: "operation" }),
        other => Err(CoreError::Limit {
            stage: "operation",
            status: format!("{other:?}"),
        }),
    }
}

/// Expansion plan and total annual cost at nominal parameters.
pub fn solve_deterministic_tnep(
    net: &Network,
    solver: &dyn Solver,
    params: &MilpParams,
) -> Result<(ExpansionPlan, f64)> {
    let outcome = solve_master(net, &[Scenario::nominal(net)], solver, params)?;
    Ok((outcome.plan, outcome.objective))
}

/// Exact robust optimum found by enumeration.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactResult {
    /// `gamma` holds the worst-case operating cost of the plan.
    pub plan: ExpansionPlan,
    pub objective: f64,
    pub worst_scenario: Scenario,
    pub plans_evaluated: usize,
    pub vertices: usize,
}

fn binomial_prefix(n: usize, k: usize) -> u128 {
    let mut total: u128 = 0;
    let mut c: u128 = 1;
    for i in 0..=k.min(n) {
        total = total.saturating_add(c);
        c = c.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    total
}

/// Number of indicator vectors within the budgets.
pub fn count_vertices(net: &Network) -> u128 {
    let gen = net
        .gen_groups()
        .iter()
        .map(|(r, idx)| binomial_prefix(idx.len(), net.gamma_gen(r) as usize))
        .fold(1u128, |a, b| a.saturating_mul(b));
    let dem = net
        .dem_groups()
        .iter()
        .map(|(r, idx)| binomial_prefix(idx.len(), net.gamma_dem(r) as usize))
        .fold(1u128, |a, b| a.saturating_mul(b));
    gen.saturating_mul(dem)
}

fn subsets(groups: &[(Vec<usize>, usize)], n: usize) -> Vec<Vec<bool>> {
    let mut out = vec![vec![false; n]];
    for (idx, gamma) in groups {
        let mut next = Vec::new();
        for base in &out {
            for mask in 0u64..(1u64 << idx.len()) {
                if mask.count_ones() as usize > *gamma {
                    continue;
                }
                let mut z = base.clone();
                for (bit, &i) in idx.iter().enumerate() {
                    z[i] = mask >> bit & 1 == 1;
                }
                next.push(z);
            }
        }
        out = next;
    }
    out
}

/// Every scenario allowed by the budgets, in a fixed order.
pub fn enumerate_vertices(net: &Network) -> Vec<Scenario> {
    let gen_groups: Vec<(Vec<usize>, usize)> = net
        .gen_groups()
        .into_iter()
        .map(|(r, idx)| (idx, net.gamma_gen(r) as usize))
        .collect();
    let dem_groups: Vec<(Vec<usize>, usize)> = net
        .dem_groups()
        .into_iter()
        .map(|(r, idx)| (idx, net.gamma_dem(r) as usize))
        .collect();
    let zg = subsets(&gen_groups, net.generators.len());
    let zd = subsets(&dem_groups, net.demands.len());
    let mut out = Vec::with_capacity(zg.len() * zd.len());
    for g in &zg {
        for d in &zd {
            out.push(Scenario::from_indicators(net, g.clone(), d.clone()));
        }
    }
    out
}

fn worst_over(net: &Network, plan: &[bool], vertices: &[Scenario], solver: &dyn Solver) -> Result<Option<(usize, f64)>> {
    let mut best: Option<(usize, f64)> = None;
    for (v, sc) in vertices.iter().enumerate() {
        let cost = match solve_operation_lp(net, plan, sc, solver) {
            Ok(d) => d.cost,
            Err(CoreError::Infeasible { .. }) => return Ok(None),
            Err(e) => return Err(e),
        };
        if best.is_none_or(|(_, c)| cost > c) {
            best = Some((v, cost));
        }
    }
    Ok(best)
}

/// Worst-case operating cost of a fixed plan by enumerating every vertex.
/// Returns `None` when some vertex admits no feasible dispatch.
pub fn worst_case_exact(net: &Network, plan: &[bool], solver: &dyn Solver) -> Result<Option<(Scenario, f64)>> {
    check_plan(net, plan)?;
    guard_vertices(net)?;
    let vertices = enumerate_vertices(net);
    Ok(worst_over(net, plan, &vertices, solver)?.map(|(v, c)| (vertices[v].clone(), c)))
}

fn guard_vertices(net: &Network) -> Result<()> {
    let count = count_vertices(net);
    if count > ORACLE_MAX_VERTICES {
        return Err(CoreError::OracleGuard(format!(
            "{count} uncertainty vertices exceed the limit of {ORACLE_MAX_VERTICES}"
        )));
    }
    Ok(())
}

/// Robust optimum by brute force over plans and uncertainty vertices. Ties
/// go to the lexicographically smallest plan (`false < true`).
pub fn enumerate_exact(net: &Network, solver: &dyn Solver) -> Result<ExactResult> {
    let nc = net.num_candidates();
    if nc > ORACLE_MAX_CANDIDATES {
        return Err(CoreError::OracleGuard(format!(
            "{nc} candidate lines exceed the limit of {ORACLE_MAX_CANDIDATES}"
        )));
    }
    guard_vertices(net)?;
    let vertices = enumerate_vertices(net);
    let cands = net.candidate_lines();
    let recovery = net.capital_recovery();
    let budget_tol = 1e-9 * net.config.budget.abs().max(1.0);

    // Bit nc-1-k of the mask is candidate k, so increasing masks are in
    // lexicographic order of the plan vectors.
    let plans: Vec<Vec<bool>> = (0u64..(1u64 << nc))
        .map(|mask| (0..nc).map(|k| mask >> (nc - 1 - k) & 1 == 1).collect())
        .filter(|x: &Vec<bool>| {
            let cost: f64 = cands.iter().zip(x).filter(|(_, &b)| b).map(|(&k, _)| net.lines[k].build_cost).sum();
            cost <= net.config.budget + budget_tol
        })
        .collect();

    let evaluated: Vec<Option<(usize, f64)>> = plans
        .par_iter()
        .map(|x| worst_over(net, x, &vertices, solver))
        .collect::<Result<_>>()?;

    let mut best: Option<(usize, usize, f64, f64)> = None;
    for (p, eval) in evaluated.iter().enumerate() {
        let Some((v, worst)) = *eval else { continue };
        let plan = ExpansionPlan::from_build(net, plans[p].clone(), worst);
        let total = recovery * plan.investment_cost + worst;
        let better = match best {
            None => true,
            Some((_, _, _, incumbent)) => total < incumbent - 1e-9 * incumbent.abs().max(1.0),
        };
        if better {
            best = Some((p, v, worst, total));
        }
    }
    let (p, v, worst, total) = best.ok_or(CoreError::Infeasible { stage: "oracle" })?;
    Ok(ExactResult {
        plan: ExpansionPlan::from_build(net, plans[p].clone(), worst),
        objective: total,
        worst_scenario: vertices[v].clone(),
        plans_evaluated: plans.len(),
        vertices: vertices.len(),
    })
}
