//! Worst-case subproblem built from the dual of the dispatch LP.
//!
//! For a fixed plan the dispatch LP is replaced by its dual, the uncertain
//! right-hand sides are written as `nominal -/+ deviation * z` with binary
//! `z`, and every product of a binary with a dual variable is replaced by an
//! auxiliary variable bounded with `M`. Only the indicators `z` are binary.
//!
//! Dual variables, per row of the dispatch LP:
//!
//! | row                               | dual           | sign   |
//! |-----------------------------------|----------------|--------|
//! | power balance at bus s            | `lambda_s`     | free   |
//! | flow definition of line k         | `phi_k`        | free   |
//! | slack angle fixed to zero         | `chi`          | free   |
//! | `f_k <= fmax_k` / `f_k >= -fmax_k` | `phi_max/min`  | <= 0 / >= 0 |
//! | `theta_s <= pi` / `>= -pi`        | `xi_max/min`   | <= 0 / >= 0 |
//! | consumption equals load           | `alpha_j`      | free   |
//! | `g_i <= cap_i`                    | `varphi_gen_i` | <= 0   |
//! | `r_j <= e_j load_j`               | `varphi_dem_j` | <= 0   |

use std::f64::consts::PI;
use std::ops::Range;

use robtnep_milp::{MilpModel, MilpParams, MilpSolution, ObjectiveSense, RowSense, Solver, VarId};

use crate::error::{CoreError, Result};
use crate::master::milp_status_error;
use crate::model::Network;
use crate::operation::Scenario;

/// Variable index ranges of the dual subproblem.
#[derive(Debug, Clone)]
pub struct DualLayout {
    pub lambda: Range<usize>,
    pub phi: Range<usize>,
    pub chi: usize,
    pub phi_max: Range<usize>,
    pub phi_min: Range<usize>,
    pub xi_max: Range<usize>,
    pub xi_min: Range<usize>,
    pub alpha: Range<usize>,
    pub varphi_gen: Range<usize>,
    pub varphi_dem: Range<usize>,
    pub z_gen: Range<usize>,
    pub z_dem: Range<usize>,
    pub aux_gen: Range<usize>,
    pub aux_dem: Range<usize>,
    pub aux_alpha: Range<usize>,
    pub d_gen: Range<usize>,
    pub d_dem: Range<usize>,
    pub objective: usize,
}

impl DualLayout {
    pub fn new(net: &Network) -> Self {
        let d = net.dimensions();
        let mut next = 0;
        let mut take = |n: usize| {
            let r = next..next + n;
            next += n;
            r
        };
        let lambda = take(d.buses);
        let phi = take(d.lines);
        let chi = take(1).start;
        let phi_max = take(d.lines);
        let phi_min = take(d.lines);
        let xi_max = take(d.buses - 1);
        let xi_min = take(d.buses - 1);
        let alpha = take(d.demands);
        let varphi_gen = take(d.generators);
        let varphi_dem = take(d.demands);
        let z_gen = take(d.generators);
        let z_dem = take(d.demands);
        let aux_gen = take(d.generators);
        let aux_dem = take(d.demands);
        let aux_alpha = take(d.demands);
        let d_gen = take(d.generators);
        let d_dem = take(d.demands);
        let objective = take(1).start;
        Self {
            lambda,
            phi,
            chi,
            phi_max,
            phi_min,
            xi_max,
            xi_min,
            alpha,
            varphi_gen,
            varphi_dem,
            z_gen,
            z_dem,
            aux_gen,
            aux_dem,
            aux_alpha,
            d_gen,
            d_dem,
            objective,
        }
    }
}

/// Dual variable values of a solved subproblem, in currency units.
#[derive(Debug, Clone, PartialEq)]
pub struct DualSolution {
    pub lambda: Vec<f64>,
    pub phi: Vec<f64>,
    pub chi: f64,
    pub phi_max: Vec<f64>,
    pub phi_min: Vec<f64>,
    /// Indexed over buses other than the slack bus, in bus order.
    pub xi_max: Vec<f64>,
    pub xi_min: Vec<f64>,
    pub alpha: Vec<f64>,
    pub varphi_gen: Vec<f64>,
    pub varphi_dem: Vec<f64>,
    pub z_gen: Vec<bool>,
    pub z_dem: Vec<bool>,
    pub aux_gen: Vec<f64>,
    pub aux_dem: Vec<f64>,
    pub aux_alpha: Vec<f64>,
    /// Worst-case operating cost.
    pub objective: f64,
}

/// Rows that define the uncertain parameters from the indicators.
pub fn definition_rows(net: &Network) -> usize {
    net.generators.len() + net.demands.len()
}

/// Builds the worst-case MILP for a fixed plan with the configured `M`.
pub fn build_dual_subproblem(net: &Network, plan: &[bool]) -> MilpModel {
    build_with_m(net, plan, net.big_m())
}

/// Same as [`build_dual_subproblem`] with an explicit `M` in currency units.
pub fn build_with_m(net: &Network, plan: &[bool], big_m: f64) -> MilpModel {
    let lay = DualLayout::new(net);
    let unit = net.cost_unit();
    let sigma = net.config.sigma;
    let m = big_m / unit;
    let slack = net.slack_bus();
    let free = (f64::NEG_INFINITY, f64::INFINITY);
    let nonpos = (f64::NEG_INFINITY, 0.0);
    let nonneg = (0.0, f64::INFINITY);

    let mut model = MilpModel::new(ObjectiveSense::Maximize);
    let vars = |name: &str, n: usize, (lo, up): (f64, f64), model: &mut MilpModel| -> Vec<VarId> {
        (0..n).map(|i| model.add_continuous(format!("{name}_{i}"), lo, up)).collect()
    };
    let d = net.dimensions();
    let lambda = vars("lambda", d.buses, free, &mut model);
    let phi = vars("phi", d.lines, free, &mut model);
    let chi = model.add_continuous("chi", f64::NEG_INFINITY, f64::INFINITY);
    let phi_max = vars("phi_max", d.lines, nonpos, &mut model);
    let phi_min = vars("phi_min", d.lines, nonneg, &mut model);
    let xi_max = vars("xi_max", d.buses - 1, nonpos, &mut model);
    let xi_min = vars("xi_min", d.buses - 1, nonneg, &mut model);
    let alpha = vars("alpha", d.demands, free, &mut model);
    let vg = vars("varphi_gen", d.generators, nonpos, &mut model);
    let vd = vars("varphi_dem", d.demands, nonpos, &mut model);
    let zg: Vec<VarId> = (0..d.generators).map(|i| model.add_binary(format!("z_gen_{i}"))).collect();
    let zd: Vec<VarId> = (0..d.demands).map(|j| model.add_binary(format!("z_dem_{j}"))).collect();
    let ag = vars("aux_gen", d.generators, free, &mut model);
    let ad = vars("aux_dem", d.demands, free, &mut model);
    let aa = vars("aux_alpha", d.demands, free, &mut model);
    let dg: Vec<VarId> = net
        .generators
        .iter()
        .enumerate()
        .map(|(i, g)| model.add_continuous(format!("d_gen_{i}"), g.cap_nominal - g.cap_deviation, g.cap_nominal))
        .collect();
    let dd: Vec<VarId> = net
        .demands
        .iter()
        .enumerate()
        .map(|(j, x)| model.add_continuous(format!("d_dem_{j}"), x.load_nominal, x.load_nominal + x.load_deviation))
        .collect();
    let obj = model.add_continuous("objective", f64::NEG_INFINITY, f64::INFINITY);
    debug_assert_eq!(obj.index(), lay.objective);
    debug_assert_eq!(zg.first().map_or(lay.z_gen.start, |v| v.index()), lay.z_gen.start);

    // Non-slack bus s -> position in xi vectors.
    let xi_pos = |s: usize| if s < slack { s } else { s - 1 };

    for (i, g) in net.generators.iter().enumerate() {
        model.add_constraint(
            format!("gen_{i}"),
            vec![(lambda[g.bus], 1.0), (vg[i], 1.0)],
            RowSense::Le,
            sigma * g.cost / unit,
        );
    }
    for (j, x) in net.demands.iter().enumerate() {
        model.add_constraint(format!("dem_{j}"), vec![(lambda[x.bus], -1.0), (alpha[j], 1.0)], RowSense::Le, 0.0);
    }
    for (j, x) in net.demands.iter().enumerate() {
        model.add_constraint(
            format!("shed_{j}"),
            vec![(lambda[x.bus], 1.0), (vd[j], 1.0)],
            RowSense::Le,
            sigma * x.shed_cost / unit,
        );
    }
    for (k, line) in net.lines.iter().enumerate() {
        model.add_constraint(
            format!("flow_{k}"),
            vec![
                (lambda[line.from_bus], -1.0),
                (lambda[line.to_bus], 1.0),
                (phi[k], 1.0),
                (phi_max[k], 1.0),
                (phi_min[k], 1.0),
            ],
            RowSense::Eq,
            0.0,
        );
    }
    let mut angle: Vec<Vec<(VarId, f64)>> = vec![Vec::new(); d.buses];
    let mut cand = 0;
    for (k, line) in net.lines.iter().enumerate() {
        let built = if line.is_candidate() {
            cand += 1;
            plan[cand - 1]
        } else {
            true
        };
        if built {
            angle[line.from_bus].push((phi[k], -line.susceptance));
            angle[line.to_bus].push((phi[k], line.susceptance));
        }
    }
    for (s, mut terms) in angle.into_iter().enumerate() {
        if s == slack {
            terms.push((chi, 1.0));
            model.add_constraint("angle_ref", terms, RowSense::Eq, 0.0);
        } else {
            terms.push((xi_max[xi_pos(s)], 1.0));
            terms.push((xi_min[xi_pos(s)], 1.0));
            model.add_constraint(format!("angle_{s}"), terms, RowSense::Eq, 0.0);
        }
    }

    let linearize = |name: String, z: VarId, v: VarId, aux: VarId, model: &mut MilpModel| {
        model.add_constraint(format!("{name}_a"), vec![(aux, 1.0), (z, -m)], RowSense::Le, 0.0);
        model.add_constraint(format!("{name}_b"), vec![(aux, 1.0), (z, m)], RowSense::Ge, 0.0);
        model.add_constraint(format!("{name}_c"), vec![(v, 1.0), (aux, -1.0), (z, m)], RowSense::Le, m);
        model.add_constraint(format!("{name}_d"), vec![(v, 1.0), (aux, -1.0), (z, -m)], RowSense::Ge, -m);
    };
    for i in 0..d.generators {
        linearize(format!("lin_gen_{i}"), zg[i], vg[i], ag[i], &mut model);
    }
    for j in 0..d.demands {
        linearize(format!("lin_dem_{j}"), zd[j], vd[j], ad[j], &mut model);
    }
    for j in 0..d.demands {
        linearize(format!("lin_alpha_{j}"), zd[j], alpha[j], aa[j], &mut model);
    }

    let mut objective = vec![(obj, 1.0)];
    for (k, line) in net.lines.iter().enumerate() {
        objective.push((phi_max[k], -line.capacity));
        objective.push((phi_min[k], line.capacity));
    }
    for s in 0..d.buses - 1 {
        objective.push((xi_max[s], -PI));
        objective.push((xi_min[s], PI));
    }
    for (i, g) in net.generators.iter().enumerate() {
        objective.push((vg[i], -g.cap_nominal));
        if g.cap_deviation != 0.0 {
            objective.push((ag[i], g.cap_deviation));
        }
    }
    for (j, x) in net.demands.iter().enumerate() {
        objective.push((alpha[j], -x.load_nominal));
        objective.push((vd[j], -x.shed_fraction * x.load_nominal));
        if x.load_deviation != 0.0 {
            objective.push((aa[j], -x.load_deviation));
            objective.push((ad[j], -x.shed_fraction * x.load_deviation));
        }
    }
    objective.retain(|&(_, c)| c != 0.0);
    model.add_constraint("objective", objective, RowSense::Eq, 0.0);
    model.add_objective_term(obj, 1.0);

    for (region, idx) in net.gen_groups() {
        let terms = idx.iter().map(|&i| (zg[i], 1.0)).collect();
        model.add_constraint(format!("budget_gen_{region}"), terms, RowSense::Le, net.gamma_gen(region) as f64);
    }
    for (region, idx) in net.dem_groups() {
        let terms = idx.iter().map(|&j| (zd[j], 1.0)).collect();
        model.add_constraint(format!("budget_dem_{region}"), terms, RowSense::Le, net.gamma_dem(region) as f64);
    }
    for (i, g) in net.generators.iter().enumerate() {
        model.add_constraint(
            format!("def_gen_{i}"),
            vec![(dg[i], 1.0), (zg[i], g.cap_deviation)],
            RowSense::Eq,
            g.cap_nominal,
        );
    }
    for (j, x) in net.demands.iter().enumerate() {
        model.add_constraint(
            format!("def_dem_{j}"),
            vec![(dd[j], 1.0), (zd[j], -x.load_deviation)],
            RowSense::Eq,
            x.load_nominal,
        );
    }
    model
}

fn read_indicators(values: &[f64], range: Range<usize>, what: &str) -> Result<Vec<bool>> {
    values[range]
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            if (v - v.round()).abs() > 1e-6 {
                Err(CoreError::NonIntegral {
                    what: format!("{what} {i}"),
                    value: v,
                })
            } else {
                Ok(v.round() >= 1.0)
            }
        })
        .collect()
}

/// Reads the worst-case scenario and its cost from a solved dual subproblem.
pub fn extract_worst_case(sol: &MilpSolution, net: &Network) -> Result<(Scenario, f64)> {
    let lay = DualLayout::new(net);
    if sol.values.len() <= lay.objective {
        return Err(CoreError::InvalidArgument("subproblem solution has no values".into()));
    }
    let z_gen = read_indicators(&sol.values, lay.z_gen.clone(), "z_gen")?;
    let z_dem = read_indicators(&sol.values, lay.z_dem.clone(), "z_dem")?;
    let value = sol.values[lay.objective] * net.cost_unit();
    Ok((Scenario::from_indicators(net, z_gen, z_dem), value))
}

/// All dual values of a solved subproblem, rescaled to currency units.
pub fn dual_solution(sol: &MilpSolution, net: &Network) -> Result<DualSolution> {
    let lay = DualLayout::new(net);
    let (sc, objective) = extract_worst_case(sol, net)?;
    let unit = net.cost_unit();
    let get = |r: &Range<usize>| -> Vec<f64> { sol.values[r.clone()].iter().map(|v| v * unit).collect() };
    Ok(DualSolution {
        lambda: get(&lay.lambda),
        phi: get(&lay.phi),
        chi: sol.values[lay.chi] * unit,
        phi_max: get(&lay.phi_max),
        phi_min: get(&lay.phi_min),
        xi_max: get(&lay.xi_max),
        xi_min: get(&lay.xi_min),
        alpha: get(&lay.alpha),
        varphi_gen: get(&lay.varphi_gen),
        varphi_dem: get(&lay.varphi_dem),
        z_gen: sc.z_gen,
        z_dem: sc.z_dem,
        aux_gen: get(&lay.aux_gen),
        aux_dem: get(&lay.aux_dem),
        aux_alpha: get(&lay.aux_alpha),
        objective,
    })
}

/// Worst case found by a subproblem.
#[derive(Debug, Clone, PartialEq)]
pub struct WorstCase {
    pub scenario: Scenario,
    /// Worst-case operating cost in currency per year.
    pub cost: f64,
    pub nodes: usize,
}

/// Solves the dual subproblem for a fixed plan.
pub fn solve_dual_subproblem(
    net: &Network,
    plan: &[bool],
    big_m: f64,
    solver: &dyn Solver,
    params: &MilpParams,
) -> Result<WorstCase> {
    let model = build_with_m(net, plan, big_m);
    let sol = solver.solve_milp(&model, params).map_err(CoreError::solver("dual subproblem"))?;
    if !sol.is_optimal() {
        return Err(milp_status_error("dual subproblem", sol.status));
    }
    let (scenario, cost) = extract_worst_case(&sol, net)?;
    Ok(WorstCase {
        scenario,
        cost,
        nodes: sol.nodes,
    })
}

/// Value of the dual subproblem's LP with the indicators fixed to a scenario
/// that respects the budgets.
pub fn fixed_scenario_value(net: &Network, plan: &[bool], sc: &Scenario, solver: &dyn Solver) -> Result<f64> {
    let mut model = build_dual_subproblem(net, plan);
    let lay = DualLayout::new(net);
    for (i, &z) in sc.z_gen.iter().enumerate() {
        let v = model.var(lay.z_gen.start + i);
        model.fix(v, f64::from(u8::from(z)));
    }
    for (j, &z) in sc.z_dem.iter().enumerate() {
        let v = model.var(lay.z_dem.start + j);
        model.fix(v, f64::from(u8::from(z)));
    }
    let relaxed = model.relaxed();
    let sol = solver.solve_lp(&relaxed).map_err(CoreError::solver("dual subproblem LP"))?;
    if !sol.is_optimal() {
        return Err(CoreError::Limit {
            stage: "dual subproblem LP",
            status: format!("{:?}", sol.status),
        });
    }
    Ok(sol.values[lay.objective] * net.cost_unit())
}
