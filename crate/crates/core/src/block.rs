//! The operating problem of one scenario as a block of variables and rows.
//!
//! Shared by the dispatch LP, the master problem and the deterministic MILP.
//! Costs are expressed in units of [`Network::cost_unit`].

use std::f64::consts::PI;

use robtnep_milp::{MilpModel, RowSense, VarId};

use crate::model::Network;
use crate::operation::{Dispatch, Scenario};

/// How candidate lines enter a block.
#[derive(Clone, Copy)]
pub(crate) enum Lines<'a> {
    /// Build decision per candidate, fixed.
    Fixed(&'a [bool]),
    /// Binary build variable per candidate.
    Variable(&'a [VarId]),
}

pub(crate) struct Block {
    pub g: Vec<VarId>,
    pub r: Vec<VarId>,
    pub d: Vec<VarId>,
    pub f: Vec<VarId>,
    pub theta: Vec<VarId>,
    /// Scaled operating cost of the block.
    pub cost: Vec<(VarId, f64)>,
}

pub(crate) fn add_block(model: &mut MilpModel, net: &Network, sc: &Scenario, lines: Lines<'_>, tag: &str) -> Block {
    let unit = net.cost_unit();
    let sigma = net.config.sigma;
    let slack = net.slack_bus();

    let g: Vec<VarId> = net
        .generators
        .iter()
        .enumerate()
        .map(|(i, _)| model.add_continuous(format!("g{tag}_{i}"), 0.0, sc.gen_caps[i]))
        .collect();
    let r: Vec<VarId> = net
        .demands
        .iter()
        .enumerate()
        .map(|(j, dem)| model.add_continuous(format!("r{tag}_{j}"), 0.0, dem.shed_fraction * sc.dem_loads[j]))
        .collect();
    let d: Vec<VarId> = (0..net.demands.len())
        .map(|j| model.add_continuous(format!("d{tag}_{j}"), sc.dem_loads[j], sc.dem_loads[j]))
        .collect();
    let theta: Vec<VarId> = (0..net.buses.len())
        .map(|s| {
            let (lo, up) = if s == slack { (0.0, 0.0) } else { (-PI, PI) };
            model.add_continuous(format!("theta{tag}_{s}"), lo, up)
        })
        .collect();

    let mut cand = 0;
    let mut f = Vec::with_capacity(net.lines.len());
    for (k, line) in net.lines.iter().enumerate() {
        let (b, cap) = (line.susceptance, line.capacity);
        let (o, e) = (theta[line.from_bus], theta[line.to_bus]);
        let mode = if line.is_candidate() {
            cand += 1;
            match lines {
                Lines::Fixed(x) => Some(x[cand - 1]),
                Lines::Variable(x) => {
                    let x = x[cand - 1];
                    let fk = model.add_continuous(format!("f{tag}_{k}"), -cap, cap);
                    let m = 2.0 * PI * b.abs();
                    let row = vec![(fk, 1.0), (o, -b), (e, b)];
                    let mut hi = row.clone();
                    hi.push((x, m));
                    model.add_constraint(format!("flow_hi{tag}_{k}"), hi, RowSense::Le, m);
                    let mut lo = row;
                    lo.push((x, -m));
                    model.add_constraint(format!("flow_lo{tag}_{k}"), lo, RowSense::Ge, -m);
                    model.add_constraint(format!("cap_hi{tag}_{k}"), vec![(fk, 1.0), (x, -cap)], RowSense::Le, 0.0);
                    model.add_constraint(format!("cap_lo{tag}_{k}"), vec![(fk, 1.0), (x, cap)], RowSense::Ge, 0.0);
                    f.push(fk);
                    continue;
                }
            }
        } else {
            Some(true)
        };
        if mode == Some(true) {
            let fk = model.add_continuous(format!("f{tag}_{k}"), -cap, cap);
            model.add_constraint(format!("flow{tag}_{k}"), vec![(fk, 1.0), (o, -b), (e, b)], RowSense::Eq, 0.0);
            f.push(fk);
        } else {
            f.push(model.add_continuous(format!("f{tag}_{k}"), 0.0, 0.0));
        }
    }

    let mut rows: Vec<Vec<(VarId, f64)>> = vec![Vec::new(); net.buses.len()];
    for (i, gen) in net.generators.iter().enumerate() {
        rows[gen.bus].push((g[i], 1.0));
    }
    for (j, dem) in net.demands.iter().enumerate() {
        rows[dem.bus].push((r[j], 1.0));
        rows[dem.bus].push((d[j], -1.0));
    }
    for (k, line) in net.lines.iter().enumerate() {
        rows[line.from_bus].push((f[k], -1.0));
        rows[line.to_bus].push((f[k], 1.0));
    }
    for (s, terms) in rows.into_iter().enumerate() {
        model.add_constraint(format!("balance{tag}_{s}"), terms, RowSense::Eq, 0.0);
    }

    let mut cost = Vec::with_capacity(g.len() + r.len());
    for (i, gen) in net.generators.iter().enumerate() {
        if gen.cost != 0.0 {
            cost.push((g[i], sigma * gen.cost / unit));
        }
    }
    for (j, dem) in net.demands.iter().enumerate() {
        if dem.shed_cost != 0.0 {
            cost.push((r[j], sigma * dem.shed_cost / unit));
        }
    }

    Block { g, r, d, f, theta, cost }
}

impl Block {
    pub fn dispatch(&self, net: &Network, values: &[f64]) -> Dispatch {
        let pick = |vars: &[VarId]| -> Vec<f64> { vars.iter().map(|v| values[v.index()]).collect() };
        Dispatch::new(net, pick(&self.g), pick(&self.r), pick(&self.d), pick(&self.f), pick(&self.theta))
    }
}

/// Rows `x_a >= x_b` for consecutive identical candidates in one corridor.
pub(crate) fn add_symmetry_rows(model: &mut MilpModel, net: &Network, x: &[VarId]) -> usize {
    let cands = net.candidate_lines();
    let mut added = 0;
    for w in 0..cands.len().saturating_sub(1) {
        let (a, b) = (&net.lines[cands[w]], &net.lines[cands[w + 1]]);
        let twin = a.from_bus == b.from_bus
            && a.to_bus == b.to_bus
            && a.susceptance == b.susceptance
            && a.capacity == b.capacity
            && a.build_cost == b.build_cost;
        if twin {
            model.add_constraint(format!("sym_{w}"), vec![(x[w], 1.0), (x[w + 1], -1.0)], RowSense::Ge, 0.0);
            added += 1;
        }
    }
    added
}
