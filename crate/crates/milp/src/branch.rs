//! Depth-first-until-incumbent, then best-bound branch-and-bound over the
//! binary variables, reusing one simplex engine across nodes.

use std::time::{Duration, Instant};

use crate::lp::LpStatus;
use crate::model::{MilpModel, ObjectiveSense, VarKind};
use crate::simplex::Engine;
use crate::solver::SolverError;
use crate::tolerances::{Tolerances, DEFAULT_REL_GAP};

#[derive(Debug, Clone, PartialEq)]
pub struct MilpParams {
    pub rel_gap: f64,
    pub node_limit: Option<usize>,
    pub time_limit: Option<Duration>,
    pub tolerances: Tolerances,
}

impl Default for MilpParams {
    fn default() -> Self {
        Self {
            rel_gap: DEFAULT_REL_GAP,
            node_limit: None,
            time_limit: None,
            tolerances: Tolerances::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MilpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    NodeLimit,
    TimeLimit,
}

/// Result of a mixed 0-1 solve. `objective` and `best_bound` are in the
/// model's objective sense; `values` is empty when no incumbent was found.
#[derive(Debug, Clone, PartialEq)]
pub struct MilpSolution {
    pub status: MilpStatus,
    pub values: Vec<f64>,
    pub objective: f64,
    pub best_bound: f64,
    pub nodes: usize,
}

impl MilpSolution {
    pub fn has_incumbent(&self) -> bool {
        self.objective.is_finite()
    }

    pub fn is_optimal(&self) -> bool {
        self.status == MilpStatus::Optimal
    }
}

#[derive(Debug, Clone)]
struct Node {
    id: usize,
    depth: usize,
    bound: f64,
    fixings: Vec<(usize, f64)>,
}

struct Incumbent {
    objective: f64,
    values: Vec<f64>,
}

pub(crate) fn gap_tolerance(rel_gap: f64, incumbent: f64) -> f64 {
    rel_gap * incumbent.abs().max(1.0)
}

/// Solves a mixed 0-1 program with the built-in engine.
pub fn solve_milp(model: &MilpModel, params: &MilpParams) -> Result<MilpSolution, SolverError> {
    model.validate()?;
    let started = Instant::now();
    let sign = match model.objective().sense {
        ObjectiveSense::Minimize => 1.0,
        ObjectiveSense::Maximize => -1.0,
    };
    let constant = sign * model.objective().constant;
    let binaries: Vec<usize> = model
        .variables()
        .iter()
        .enumerate()
        .filter(|(_, v)| v.kind == VarKind::Binary)
        .map(|(j, _)| j)
        .collect();
    let base: Vec<(f64, f64)> = binaries
        .iter()
        .map(|&j| {
            let v = &model.variables()[j];
            (v.lower.max(0.0).ceil(), v.upper.min(1.0).floor())
        })
        .collect();
    let int_tol = params.tolerances.integrality;

    let mut engine = Engine::new(model, params.tolerances);
    for (k, &j) in binaries.iter().enumerate() {
        engine.set_bounds(j, base[k].0, base[k].1);
    }
    if base.iter().any(|&(l, u)| l > u) {
        return Ok(finish(MilpStatus::Infeasible, None, f64::INFINITY, 0, sign));
    }

    let mut open = vec![Node {
        id: 0,
        depth: 0,
        bound: f64::NEG_INFINITY,
        fixings: Vec::new(),
    }];
    let mut next_id = 1;
    let mut nodes = 0usize;
    let mut incumbent: Option<Incumbent> = None;

    loop {
        let limit = if params.node_limit.is_some_and(|l| nodes >= l) {
            Some(MilpStatus::NodeLimit)
        } else if params.time_limit.is_some_and(|t| started.elapsed() >= t) {
            Some(MilpStatus::TimeLimit)
        } else {
            None
        };
        if let Some(status) = limit {
            if open.is_empty() {
                break;
            }
            let bound = open_bound(&open, incumbent.as_ref());
            return Ok(finish(status, incumbent, bound, nodes, sign));
        }

        let Some(pos) = select(&open, incumbent.is_some()) else {
            break;
        };
        let node = open.swap_remove(pos);
        if let Some(inc) = &incumbent {
            if node.bound >= inc.objective - gap_tolerance(params.rel_gap, inc.objective) {
                // Best-bound order: every remaining node is at least as bad.
                open.clear();
                break;
            }
        }

        for (k, &j) in binaries.iter().enumerate() {
            engine.set_bounds(j, base[k].0, base[k].1);
        }
        for &(k, v) in &node.fixings {
            engine.set_bounds(binaries[k], v, v);
        }
        let status = engine.solve();
        nodes += 1;
        match status {
            LpStatus::Optimal => {}
            LpStatus::Infeasible => continue,
            LpStatus::Unbounded if node.depth == 0 => {
                return Ok(MilpSolution {
                    status: MilpStatus::Unbounded,
                    values: Vec::new(),
                    objective: sign * f64::NEG_INFINITY,
                    best_bound: sign * f64::NEG_INFINITY,
                    nodes,
                });
            }
            other => {
                return Err(SolverError::Numerical(format!(
                    "node {} relaxation ended with {:?}",
                    node.id, other
                )))
            }
        }
        let obj = engine.objective() + constant;
        if let Some(inc) = &incumbent {
            if obj >= inc.objective - gap_tolerance(params.rel_gap, inc.objective) {
                continue;
            }
        }

        let mut branch: Option<(usize, f64)> = None;
        let mut best_dist = int_tol;
        for (k, &j) in binaries.iter().enumerate() {
            let v = engine.value(j);
            let dist = (v - v.floor()).min(v.ceil() - v);
            if dist > best_dist {
                best_dist = dist;
                branch = Some((k, v));
            }
        }

        match branch {
            None => {
                // Integral relaxation: polish continuous values with the
                // binaries pinned to their rounded values.
                let rounded: Vec<f64> = binaries.iter().map(|&j| engine.value(j).round()).collect();
                let relaxed = engine.values();
                for (k, &j) in binaries.iter().enumerate() {
                    engine.set_bounds(j, rounded[k], rounded[k]);
                }
                let (objective, mut values) = if engine.solve() == LpStatus::Optimal {
                    (engine.objective() + constant, engine.values())
                } else {
                    log::debug!("polish solve failed; keeping the relaxation values");
                    (obj, relaxed)
                };
                for (k, &j) in binaries.iter().enumerate() {
                    values[j] = rounded[k];
                }
                if incumbent.as_ref().is_none_or(|inc| objective < inc.objective) {
                    log::trace!("incumbent {objective} at node {}", node.id);
                    incumbent = Some(Incumbent { objective, values });
                }
            }
            Some((k, v)) => {
                let first = v.round();
                for val in [1.0 - first, first] {
                    let mut fixings = node.fixings.clone();
                    fixings.push((k, val));
                    open.push(Node {
                        id: next_id,
                        depth: node.depth + 1,
                        bound: obj,
                        fixings,
                    });
                    next_id += 1;
                }
            }
        }
    }

    match incumbent {
        Some(inc) => {
            let bound = inc.objective;
            Ok(finish(MilpStatus::Optimal, Some(inc), bound, nodes, sign))
        }
        None => Ok(finish(MilpStatus::Infeasible, None, f64::INFINITY, nodes, sign)),
    }
}

/// Deepest, most recent node while diving for a first incumbent, then the
/// lowest bound with ties broken by node id.
fn select(open: &[Node], have_incumbent: bool) -> Option<usize> {
    if have_incumbent {
        open.iter()
            .enumerate()
            .min_by(|a, b| a.1.bound.total_cmp(&b.1.bound).then(a.1.id.cmp(&b.1.id)))
            .map(|(i, _)| i)
    } else {
        open.iter()
            .enumerate()
            .max_by(|a, b| a.1.depth.cmp(&b.1.depth).then(a.1.id.cmp(&b.1.id)))
            .map(|(i, _)| i)
    }
}

fn open_bound(open: &[Node], incumbent: Option<&Incumbent>) -> f64 {
    let mut b = open.iter().map(|n| n.bound).fold(f64::INFINITY, f64::min);
    if let Some(inc) = incumbent {
        b = b.min(inc.objective);
    }
    b
}

fn finish(
    status: MilpStatus,
    incumbent: Option<Incumbent>,
    bound: f64,
    nodes: usize,
    sign: f64,
) -> MilpSolution {
    let (objective, values) = match incumbent {
        Some(inc) => (sign * inc.objective, inc.values),
        None => (sign * f64::INFINITY, Vec::new()),
    };
    MilpSolution {
        status,
        values,
        objective,
        best_bound: sign * bound,
        nodes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::RowSense;

    #[test]
    fn two_binaries_sharing_a_row() {
        let mut m = MilpModel::new(ObjectiveSense::Minimize);
        let x = m.add_binary("x");
        let y = m.add_binary("y");
        m.add_objective_term(x, -1.0);
        m.add_objective_term(y, -1.0);
        m.add_constraint("c", vec![(x, 1.0), (y, 1.0)], RowSense::Le, 1.0);
        let s = solve_milp(&m, &MilpParams::default()).unwrap();
        assert_eq!(s.status, MilpStatus::Optimal);
        assert!((s.objective + 1.0).abs() < 1e-12);
        assert!(s.best_bound <= s.objective + 1e-9);
    }

    #[test]
    fn knapsack_of_three() {
        let mut m = MilpModel::new(ObjectiveSense::Maximize);
        let a = m.add_binary("a");
        let b = m.add_binary("b");
        let c = m.add_binary("c");
        m.add_objective_term(a, 10.0);
        m.add_objective_term(b, 6.0);
        m.add_objective_term(c, 4.0);
        m.add_constraint("cap", vec![(a, 1.0), (b, 1.0), (c, 1.0)], RowSense::Le, 2.0);
        let s = solve_milp(&m, &MilpParams::default()).unwrap();
        assert_eq!(s.status, MilpStatus::Optimal);
        assert!((s.objective - 16.0).abs() < 1e-9);
        assert_eq!(s.values, vec![1.0, 1.0, 0.0]);
    }

    #[test]
    fn infeasible_integrality() {
        // 2x = 1 has no binary solution.
        let mut m = MilpModel::new(ObjectiveSense::Minimize);
        let x = m.add_binary("x");
        m.add_constraint("half", vec![(x, 2.0)], RowSense::Eq, 1.0);
        let s = solve_milp(&m, &MilpParams::default()).unwrap();
        assert_eq!(s.status, MilpStatus::Infeasible);
        assert!(s.values.is_empty());
    }

    #[test]
    fn node_limit_is_reported() {
        let mut m = MilpModel::new(ObjectiveSense::Maximize);
        let vars: Vec<_> = (0..8).map(|i| m.add_binary(format!("x{i}"))).collect();
        let w = [3.0, 5.0, 7.0, 9.0, 11.0, 13.0, 15.0, 17.0];
        for (v, wi) in vars.iter().zip(w) {
            m.add_objective_term(*v, wi + 0.5);
        }
        m.add_constraint(
            "cap",
            vars.iter().zip(w).map(|(v, wi)| (*v, wi)).collect(),
            RowSense::Le,
            30.5,
        );
        let params = MilpParams {
            node_limit: Some(1),
            ..MilpParams::default()
        };
        let s = solve_milp(&m, &params).unwrap();
        assert_eq!(s.status, MilpStatus::NodeLimit);
        assert_eq!(s.nodes, 1);
    }

    #[test]
    fn objective_constant_is_included() {
        let mut m = MilpModel::new(ObjectiveSense::Minimize);
        let x = m.add_binary("x");
        m.add_objective_term(x, 2.0);
        m.set_objective_constant(5.0);
        m.add_constraint("c", vec![(x, 1.0)], RowSense::Ge, 0.5);
        let s = solve_milp(&m, &MilpParams::default()).unwrap();
        assert!((s.objective - 7.0).abs() < 1e-12);
    }
}
