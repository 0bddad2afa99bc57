//! Worst-case subproblem built from the KKT conditions of the dispatch LP.
//!
//! Primal feasibility, dual feasibility and stationarity are kept as linear
//! rows; each complementarity pair gets a binary switch with big-M bounds on
//! both sides. The uncertainty indicators are continuous on `[0, 1]`: with
//! integer budgets the worst case sits at an integral vertex, and the
//! scenario is rounded to the nearest vertex after the solve.

use std::f64::consts::PI;

use robtnep_milp::{MilpModel, MilpParams, ObjectiveSense, RowSense, Solver, VarId};

use crate::error::{CoreError, Result};
use crate::master::milp_status_error;
use crate::model::Network;
use crate::operation::{solve_operation_lp, Scenario};
use crate::subproblem_dual::WorstCase;

/// Start indices of the indicator variables and the objective variable.
struct KktLayout {
    z_gen: usize,
    z_dem: usize,
    objective: usize,
}

impl KktLayout {
    fn new(net: &Network) -> Self {
        let d = net.dimensions();
        let z_gen = 2 * d.generators + 3 * d.demands + d.lines + d.buses;
        let z_dem = z_gen + d.generators;
        let objective = z_dem + 4 * d.demands + 3 * d.buses + 3 * d.lines + 2 * d.generators - 1;
        Self { z_gen, z_dem, objective }
    }
}

pub fn build_kkt_subproblem(net: &Network, plan: &[bool]) -> MilpModel {
    build_with_m(net, plan, net.big_m())
}

/// Same as [`build_kkt_subproblem`] with an explicit dual bound in currency units.
pub fn build_with_m(net: &Network, plan: &[bool], big_m: f64) -> MilpModel {
    let unit = net.cost_unit();
    let sigma = net.config.sigma;
    let md = big_m / unit;
    let slack = net.slack_bus();
    let d = net.dimensions();
    let inf = f64::INFINITY;

    let mut model = MilpModel::new(ObjectiveSense::Maximize);
    let vars = |model: &mut MilpModel, name: &str, n: usize, lo: f64, up: f64| -> Vec<VarId> {
        (0..n).map(|i| model.add_continuous(format!("{name}_{i}"), lo, up)).collect()
    };

    // Primal block.
    let g = vars(&mut model, "g", d.generators, 0.0, inf);
    let r = vars(&mut model, "r", d.demands, 0.0, inf);
    let dc = vars(&mut model, "d", d.demands, -inf, inf);
    let f = vars(&mut model, "f", d.lines, -inf, inf);
    let theta = vars(&mut model, "theta", d.buses, -inf, inf);
    let dg = vars(&mut model, "d_gen", d.generators, -inf, inf);
    let dd = vars(&mut model, "d_dem", d.demands, -inf, inf);
    let zg = vars(&mut model, "z_gen", d.generators, 0.0, 1.0);
    let zd = vars(&mut model, "z_dem", d.demands, 0.0, 1.0);
    // Dual block.
    let lambda = vars(&mut model, "lambda", d.buses, -inf, inf);
    let phi = vars(&mut model, "phi", d.lines, -inf, inf);
    let chi = model.add_continuous("chi", -inf, inf);
    let phi_max = vars(&mut model, "phi_max", d.lines, -inf, 0.0);
    let phi_min = vars(&mut model, "phi_min", d.lines, 0.0, inf);
    let xi_max = vars(&mut model, "xi_max", d.buses - 1, -inf, 0.0);
    let xi_min = vars(&mut model, "xi_min", d.buses - 1, 0.0, inf);
    let alpha = vars(&mut model, "alpha", d.demands, -inf, inf);
    let vg = vars(&mut model, "varphi_gen", d.generators, -inf, 0.0);
    let vd = vars(&mut model, "varphi_dem", d.demands, -inf, 0.0);
    let nu_g = vars(&mut model, "nu_gen", d.generators, 0.0, inf);
    let nu_r = vars(&mut model, "nu_shed", d.demands, 0.0, inf);
    let obj = model.add_continuous("objective", -inf, inf);
    debug_assert_eq!(obj.index(), KktLayout::new(net).objective);

    let non_slack: Vec<usize> = (0..d.buses).filter(|&s| s != slack).collect();
    let built: Vec<bool> = {
        let mut cand = 0;
        net.lines
            .iter()
            .map(|l| {
                if l.is_candidate() {
                    cand += 1;
                    plan[cand - 1]
                } else {
                    true
                }
            })
            .collect()
    };

    // Primal feasibility.
    let mut balance: Vec<Vec<(VarId, f64)>> = vec![Vec::new(); d.buses];
    for (i, gen) in net.generators.iter().enumerate() {
        balance[gen.bus].push((g[i], 1.0));
    }
    for (j, dem) in net.demands.iter().enumerate() {
        balance[dem.bus].push((r[j], 1.0));
        balance[dem.bus].push((dc[j], -1.0));
    }
    for (k, line) in net.lines.iter().enumerate() {
        balance[line.from_bus].push((f[k], -1.0));
        balance[line.to_bus].push((f[k], 1.0));
    }
    for (s, terms) in balance.into_iter().enumerate() {
        model.add_constraint(format!("balance_{s}"), terms, RowSense::Eq, 0.0);
    }
    for (k, line) in net.lines.iter().enumerate() {
        let mut terms = vec![(f[k], 1.0)];
        if built[k] {
            terms.push((theta[line.from_bus], -line.susceptance));
            terms.push((theta[line.to_bus], line.susceptance));
        }
        model.add_constraint(format!("flow_{k}"), terms, RowSense::Eq, 0.0);
    }
    model.add_constraint("angle_ref", vec![(theta[slack], 1.0)], RowSense::Eq, 0.0);
    for j in 0..d.demands {
        model.add_constraint(format!("demand_{j}"), vec![(dc[j], 1.0), (dd[j], -1.0)], RowSense::Eq, 0.0);
    }
    for (k, line) in net.lines.iter().enumerate() {
        model.add_constraint(format!("fmax_{k}"), vec![(f[k], 1.0)], RowSense::Le, line.capacity);
        model.add_constraint(format!("fmin_{k}"), vec![(f[k], 1.0)], RowSense::Ge, -line.capacity);
    }
    for &s in &non_slack {
        model.add_constraint(format!("amax_{s}"), vec![(theta[s], 1.0)], RowSense::Le, PI);
        model.add_constraint(format!("amin_{s}"), vec![(theta[s], 1.0)], RowSense::Ge, -PI);
    }
    for i in 0..d.generators {
        model.add_constraint(format!("gcap_{i}"), vec![(g[i], 1.0), (dg[i], -1.0)], RowSense::Le, 0.0);
    }
    for (j, dem) in net.demands.iter().enumerate() {
        model.add_constraint(
            format!("rcap_{j}"),
            vec![(r[j], 1.0), (dd[j], -dem.shed_fraction)],
            RowSense::Le,
            0.0,
        );
    }

    // Stationarity.
    for (i, gen) in net.generators.iter().enumerate() {
        model.add_constraint(
            format!("stat_g_{i}"),
            vec![(lambda[gen.bus], 1.0), (vg[i], 1.0), (nu_g[i], 1.0)],
            RowSense::Eq,
            sigma * gen.cost / unit,
        );
    }
    for (j, dem) in net.demands.iter().enumerate() {
        model.add_constraint(
            format!("stat_r_{j}"),
            vec![(lambda[dem.bus], 1.0), (vd[j], 1.0), (nu_r[j], 1.0)],
            RowSense::Eq,
            sigma * dem.shed_cost / unit,
        );
    }
    for (j, dem) in net.demands.iter().enumerate() {
        model.add_constraint(format!("stat_d_{j}"), vec![(lambda[dem.bus], 1.0), (alpha[j], -1.0)], RowSense::Eq, 0.0);
    }
    for (k, line) in net.lines.iter().enumerate() {
        model.add_constraint(
            format!("stat_f_{k}"),
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
    let mut stat_theta: Vec<Vec<(VarId, f64)>> = vec![Vec::new(); d.buses];
    for (k, line) in net.lines.iter().enumerate() {
        if built[k] {
            stat_theta[line.from_bus].push((phi[k], -line.susceptance));
            stat_theta[line.to_bus].push((phi[k], line.susceptance));
        }
    }
    for (pos, &s) in non_slack.iter().enumerate() {
        stat_theta[s].push((xi_max[pos], 1.0));
        stat_theta[s].push((xi_min[pos], 1.0));
    }
    stat_theta[slack].push((chi, 1.0));
    for (s, terms) in stat_theta.into_iter().enumerate() {
        model.add_constraint(format!("stat_theta_{s}"), terms, RowSense::Eq, 0.0);
    }

    // Uncertainty set.
    for (i, gen) in net.generators.iter().enumerate() {
        model.add_constraint(
            format!("def_gen_{i}"),
            vec![(dg[i], 1.0), (zg[i], gen.cap_deviation)],
            RowSense::Eq,
            gen.cap_nominal,
        );
    }
    for (j, dem) in net.demands.iter().enumerate() {
        model.add_constraint(
            format!("def_dem_{j}"),
            vec![(dd[j], 1.0), (zd[j], -dem.load_deviation)],
            RowSense::Eq,
            dem.load_nominal,
        );
    }
    for (region, idx) in net.gen_groups() {
        let terms = idx.iter().map(|&i| (zg[i], 1.0)).collect();
        model.add_constraint(format!("budget_gen_{region}"), terms, RowSense::Le, net.gamma_gen(region) as f64);
    }
    for (region, idx) in net.dem_groups() {
        let terms = idx.iter().map(|&j| (zd[j], 1.0)).collect();
        model.add_constraint(format!("budget_dem_{region}"), terms, RowSense::Le, net.gamma_dem(region) as f64);
    }

    let mut objective = vec![(obj, 1.0)];
    for (i, gen) in net.generators.iter().enumerate() {
        objective.push((g[i], -sigma * gen.cost / unit));
    }
    for (j, dem) in net.demands.iter().enumerate() {
        objective.push((r[j], -sigma * dem.shed_cost / unit));
    }
    objective.retain(|&(_, c)| c != 0.0);
    model.add_constraint("objective", objective, RowSense::Eq, 0.0);
    model.add_objective_term(obj, 1.0);

    // Complementarity: `slack <= mp (1 - u)` and `|dual| <= md u`, where the
    // slack expression is `sum(terms) + constant`.
    // Angle-limit duals carry the susceptances of the incident lines, so
    // their bound is the price bound times twice that susceptance.
    let mut incident = vec![0.0; d.buses];
    for (k, line) in net.lines.iter().enumerate() {
        if built[k] {
            incident[line.from_bus] += line.susceptance.abs();
            incident[line.to_bus] += line.susceptance.abs();
        }
    }
    let mut switch = |name: String, slack_terms: Vec<(VarId, f64)>, constant: f64, mp: f64, dual: VarId, sign: f64, md: f64| {
        let u = model.add_binary(format!("u_{name}"));
        let mut row = slack_terms;
        row.push((u, mp));
        model.add_constraint(format!("cs_p_{name}"), row, RowSense::Le, mp - constant);
        model.add_constraint(format!("cs_d_{name}"), vec![(dual, sign), (u, -md)], RowSense::Le, 0.0);
    };
    for (k, line) in net.lines.iter().enumerate() {
        let cap = line.capacity;
        switch(format!("fmax_{k}"), vec![(f[k], -1.0)], cap, 2.0 * cap, phi_max[k], -1.0, md);
        switch(format!("fmin_{k}"), vec![(f[k], 1.0)], cap, 2.0 * cap, phi_min[k], 1.0, md);
    }
    for (pos, &s) in non_slack.iter().enumerate() {
        let ma = md * (2.0 * incident[s]).max(1.0);
        switch(format!("amax_{s}"), vec![(theta[s], -1.0)], PI, 2.0 * PI, xi_max[pos], -1.0, ma);
        switch(format!("amin_{s}"), vec![(theta[s], 1.0)], PI, 2.0 * PI, xi_min[pos], 1.0, ma);
    }
    for (i, gen) in net.generators.iter().enumerate() {
        let mp = gen.cap_nominal.max(1e-9);
        switch(format!("g_{i}"), vec![(g[i], 1.0)], 0.0, mp, nu_g[i], 1.0, md);
        switch(format!("gcap_{i}"), vec![(dg[i], 1.0), (g[i], -1.0)], 0.0, mp, vg[i], -1.0, md);
    }
    for (j, dem) in net.demands.iter().enumerate() {
        let mp = (dem.shed_fraction * (dem.load_nominal + dem.load_deviation)).max(1e-9);
        switch(format!("r_{j}"), vec![(r[j], 1.0)], 0.0, mp, nu_r[j], 1.0, md);
        switch(
            format!("rcap_{j}"),
            vec![(dd[j], dem.shed_fraction), (r[j], -1.0)],
            0.0,
            mp,
            vd[j],
            -1.0,
            md,
        );
    }
    model
}

/// Nearest budget-feasible vertex: indicators at 1 are kept, then each
/// region's remaining budget goes to the largest fractional values (lowest
/// index first on ties).
fn round_to_vertex(values: &[f64], groups: &[(Vec<usize>, usize)]) -> Vec<bool> {
    let mut z = vec![false; values.len()];
    for (idx, gamma) in groups {
        let mut order: Vec<usize> = idx.iter().copied().filter(|&i| values[i] > 1e-6).collect();
        order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
        for &i in order.iter().take(*gamma) {
            z[i] = true;
        }
    }
    z
}

/// Solves the KKT subproblem for a fixed plan. The returned cost is the
/// MILP optimum; the scenario is the rounded vertex, replayed through the
/// dispatch LP as a check.
pub fn solve_kkt_subproblem(
    net: &Network,
    plan: &[bool],
    big_m: f64,
    solver: &dyn Solver,
    params: &MilpParams,
) -> Result<WorstCase> {
    let model = build_with_m(net, plan, big_m);
    let sol = solver.solve_milp(&model, params).map_err(CoreError::solver("kkt subproblem"))?;
    if !sol.is_optimal() {
        return Err(milp_status_error("kkt subproblem", sol.status));
    }
    let lay = KktLayout::new(net);
    let d = net.dimensions();
    let zg = &sol.values[lay.z_gen..lay.z_gen + d.generators];
    let zd = &sol.values[lay.z_dem..lay.z_dem + d.demands];
    let gen_groups: Vec<(Vec<usize>, usize)> =
        net.gen_groups().into_iter().map(|(r, idx)| (idx, net.gamma_gen(r) as usize)).collect();
    let dem_groups: Vec<(Vec<usize>, usize)> =
        net.dem_groups().into_iter().map(|(r, idx)| (idx, net.gamma_dem(r) as usize)).collect();
    let scenario = Scenario::from_indicators(net, round_to_vertex(zg, &gen_groups), round_to_vertex(zd, &dem_groups));
    let cost = sol.values[lay.objective] * net.cost_unit();
    let replay = solve_operation_lp(net, plan, &scenario, solver)?.cost;
    if replay < cost - 1e-6 * cost.abs().max(1.0) {
        log::warn!("kkt subproblem: rounded scenario replays at {replay}, below the optimum {cost}");
    }
    Ok(WorstCase {
        scenario,
        cost,
        nodes: sol.nodes,
    })
}
