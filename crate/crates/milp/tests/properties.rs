use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use robtnep_milp::{
    solve_lp, solve_milp, ExternalSolver, LpStatus, MilpModel, MilpParams, MilpStatus, ObjectiveSense,
    RowSense, Solver, Tolerances, VarKind,
};

/// Random LP whose rows are all satisfied by a hidden point, so it is
/// feasible by construction. Some variables are free or half-bounded.
fn random_feasible_lp(seed: u64, n: usize, m: usize) -> MilpModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sense = if rng.gen_bool(0.5) {
        ObjectiveSense::Minimize
    } else {
        ObjectiveSense::Maximize
    };
    let mut model = MilpModel::new(sense);
    let mut point = Vec::with_capacity(n);
    let mut vars = Vec::with_capacity(n);
    for j in 0..n {
        let kind = rng.gen_range(0..10);
        let (lo, up) = match kind {
            0 => (f64::NEG_INFINITY, f64::INFINITY),
            1 => (0.0, f64::INFINITY),
            2 => (f64::NEG_INFINITY, 5.0),
            3 => (2.0, 2.0),
            _ => {
                let a = rng.gen_range(-5.0..5.0);
                (a, a + rng.gen_range(0.5..8.0))
            }
        };
        let p: f64 = match (lo.is_finite(), up.is_finite()) {
            (true, true) => rng.gen_range(lo..=up),
            (true, false) => lo + rng.gen_range(0.0..4.0),
            (false, true) => up - rng.gen_range(0.0..4.0),
            (false, false) => rng.gen_range(-4.0..4.0),
        };
        point.push(p);
        vars.push(model.add_continuous(format!("x{j}"), lo, up));
        model.add_objective_term(vars[j], rng.gen_range(-3.0..3.0));
    }
    for i in 0..m {
        let mut terms = Vec::new();
        let mut act = 0.0;
        for j in 0..n {
            if rng.gen_bool(0.4) {
                let a: f64 = rng.gen_range(-4.0..4.0);
                terms.push((vars[j], a));
                act += a * point[j];
            }
        }
        let (sense, rhs) = match rng.gen_range(0..5) {
            0 => (RowSense::Eq, act),
            1 | 2 => (RowSense::Le, act + rng.gen_range(0.0..3.0)),
            _ => (RowSense::Ge, act - rng.gen_range(0.0..3.0)),
        };
        model.add_constraint(format!("r{i}"), terms, sense, rhs);
    }
    // A bounding row keeps most instances bounded without forcing it.
    if rng.gen_bool(0.8) {
        let terms = vars.iter().map(|&v| (v, 1.0)).collect();
        model.add_constraint("box_hi", terms, RowSense::Le, point.iter().sum::<f64>() + 50.0);
        let terms = vars.iter().map(|&v| (v, 1.0)).collect();
        model.add_constraint("box_lo", terms, RowSense::Ge, point.iter().sum::<f64>() - 50.0);
    }
    model
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}

/// Dual objective assembled from row duals and reduced costs at the bounds
/// where nonbasic variables sit.
fn dual_objective(model: &MilpModel, values: &[f64], duals: &[f64], rc: &[f64]) -> f64 {
    let mut obj = model.objective().constant;
    for (c, y) in model.constraints().iter().zip(duals) {
        obj += y * c.rhs;
    }
    for (x, d) in values.iter().zip(rc) {
        obj += d * x;
    }
    obj
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn lp_strong_duality_and_complementarity(seed in any::<u64>(), n in 1usize..=30, m in 0usize..=20) {
        let model = random_feasible_lp(seed, n, m);
        let sol = solve_lp(&model, &Tolerances::default()).unwrap();
        prop_assert!(matches!(sol.status, LpStatus::Optimal | LpStatus::Unbounded), "{:?}", sol.status);
        if sol.status == LpStatus::Optimal {
            prop_assert!(model.max_violation(&sol.values) <= 1e-6);
            let dual = dual_objective(&model, &sol.values, &sol.duals, &sol.reduced_costs);
            prop_assert!(close(sol.objective, dual, 1e-7), "primal {} dual {}", sol.objective, dual);

            let maximize = model.objective().sense == ObjectiveSense::Maximize;
            let sgn = if maximize { -1.0 } else { 1.0 };
            for (i, c) in model.constraints().iter().enumerate() {
                let y = sgn * sol.duals[i];
                let act: f64 = c.terms.iter().map(|&(v, a)| a * sol.values[v.index()]).sum();
                match c.sense {
                    RowSense::Le => prop_assert!(y <= 1e-6),
                    RowSense::Ge => prop_assert!(y >= -1e-6),
                    RowSense::Eq => {}
                }
                prop_assert!((y * (c.rhs - act)).abs() <= 1e-6, "row {} slack {} dual {}", i, c.rhs - act, y);
            }
            for (j, v) in model.variables().iter().enumerate() {
                let d = sgn * sol.reduced_costs[j];
                let x = sol.values[j];
                let at_lo = (x - v.lower).abs() <= 1e-7;
                let at_up = (x - v.upper).abs() <= 1e-7;
                if !at_lo && !at_up {
                    prop_assert!(d.abs() <= 1e-6, "interior var {} has reduced cost {}", j, d);
                } else if at_lo && !at_up {
                    prop_assert!(d >= -1e-6);
                } else if at_up && !at_lo {
                    prop_assert!(d <= 1e-6);
                }
            }
        }
    }

    #[test]
    fn lp_matches_external_backend(seed in any::<u64>(), n in 1usize..=15, m in 1usize..=12) {
        let model = random_feasible_lp(seed, n, m);
        let ours = solve_lp(&model, &Tolerances::default()).unwrap();
        let theirs = ExternalSolver.solve_lp(&model).unwrap();
        prop_assert_eq!(ours.status, theirs.status);
        if ours.status == LpStatus::Optimal {
            prop_assert!(close(ours.objective, theirs.objective, 1e-6), "{} vs {}", ours.objective, theirs.objective);
        }
    }
}

/// Random pure-binary program; feasibility and objective are evaluated
/// directly for every point, with no LP solver involved.
fn random_binary_program(seed: u64, k: usize) -> MilpModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sense = if rng.gen_bool(0.5) {
        ObjectiveSense::Minimize
    } else {
        ObjectiveSense::Maximize
    };
    let mut model = MilpModel::new(sense);
    let vars: Vec<_> = (0..k).map(|j| model.add_binary(format!("b{j}"))).collect();
    for &v in &vars {
        model.add_objective_term(v, rng.gen_range(-10i32..=10) as f64);
    }
    for i in 0..rng.gen_range(1..=4) {
        let mut terms = Vec::new();
        for &v in &vars {
            if rng.gen_bool(0.6) {
                terms.push((v, rng.gen_range(-5i32..=9) as f64));
            }
        }
        let sense = match rng.gen_range(0..4) {
            0 => RowSense::Ge,
            _ => RowSense::Le,
        };
        let rhs = rng.gen_range(-3i32..=12) as f64;
        model.add_constraint(format!("c{i}"), terms, sense, rhs);
    }
    model
}

fn enumerate_binary(model: &MilpModel) -> Option<f64> {
    let k = model.num_vars();
    let maximize = model.objective().sense == ObjectiveSense::Maximize;
    let mut best: Option<f64> = None;
    for mask in 0u32..(1 << k) {
        let x: Vec<f64> = (0..k).map(|j| ((mask >> j) & 1) as f64).collect();
        if model.max_violation(&x) > 1e-9 {
            continue;
        }
        let v = model.evaluate_objective(&x);
        best = Some(match best {
            None => v,
            Some(b) if maximize => b.max(v),
            Some(b) => b.min(v),
        });
    }
    best
}

/// Mixed program: binaries gate continuous capacities (big-M style rows).
fn random_mixed_program(seed: u64, k: usize) -> MilpModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut model = MilpModel::new(ObjectiveSense::Minimize);
    let bins: Vec<_> = (0..k).map(|j| model.add_binary(format!("open{j}"))).collect();
    let flows: Vec<_> = (0..k)
        .map(|j| model.add_continuous(format!("flow{j}"), 0.0, f64::INFINITY))
        .collect();
    let shed = model.add_continuous("shed", 0.0, f64::INFINITY);
    let demand = rng.gen_range(5.0..40.0);
    for j in 0..k {
        model.add_objective_term(bins[j], rng.gen_range(1.0..20.0));
        model.add_objective_term(flows[j], rng.gen_range(0.5..3.0));
        let cap = rng.gen_range(2.0..15.0);
        model.add_constraint(
            format!("gate{j}"),
            vec![(flows[j], 1.0), (bins[j], -cap)],
            RowSense::Le,
            0.0,
        );
    }
    model.add_objective_term(shed, 10.0);
    let mut terms: Vec<_> = flows.iter().map(|&f| (f, 1.0)).collect();
    terms.push((shed, 1.0));
    model.add_constraint("demand", terms, RowSense::Eq, demand);
    if k >= 2 {
        model.add_constraint(
            "pick",
            bins.iter().map(|&b| (b, 1.0)).collect(),
            RowSense::Le,
            rng.gen_range(1..k) as f64,
        );
    }
    model
}

fn enumerate_mixed(model: &MilpModel) -> Option<f64> {
    let bins: Vec<usize> = model
        .variables()
        .iter()
        .enumerate()
        .filter(|(_, v)| v.kind == VarKind::Binary)
        .map(|(j, _)| j)
        .collect();
    let mut best: Option<f64> = None;
    for mask in 0u32..(1 << bins.len()) {
        let mut fixed = model.relaxed();
        for (k, &j) in bins.iter().enumerate() {
            let v = ((mask >> k) & 1) as f64;
            let id = fixed.var(j);
            fixed.set_bounds(id, v, v);
        }
        let sol = ExternalSolver.solve_lp(&fixed).unwrap();
        if sol.status == LpStatus::Optimal {
            best = Some(best.map_or(sol.objective, |b: f64| b.min(sol.objective)));
        }
    }
    best
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn milp_matches_enumeration_on_binary_programs(seed in any::<u64>(), k in 1usize..=12) {
        let model = random_binary_program(seed, k);
        let sol = solve_milp(&model, &MilpParams::default()).unwrap();
        match enumerate_binary(&model) {
            None => prop_assert_eq!(sol.status, MilpStatus::Infeasible),
            Some(best) => {
                prop_assert_eq!(sol.status, MilpStatus::Optimal);
                prop_assert!((sol.objective - best).abs() <= 1e-9 * best.abs().max(1.0), "{} vs {}", sol.objective, best);
                prop_assert!(model.max_violation(&sol.values) <= 1e-9);
                let maximize = model.objective().sense == ObjectiveSense::Maximize;
                let slack = 1e-9 * sol.objective.abs().max(1.0);
                if maximize {
                    prop_assert!(sol.best_bound >= sol.objective - slack);
                } else {
                    prop_assert!(sol.best_bound <= sol.objective + slack);
                }
            }
        }
    }

    #[test]
    fn milp_matches_enumeration_on_mixed_programs(seed in any::<u64>(), k in 1usize..=8) {
        let model = random_mixed_program(seed, k);
        let sol = solve_milp(&model, &MilpParams::default()).unwrap();
        let best = enumerate_mixed(&model).expect("shedding keeps every instance feasible");
        prop_assert_eq!(sol.status, MilpStatus::Optimal);
        prop_assert!(close(sol.objective, best, 1e-7), "{} vs {}", sol.objective, best);
        prop_assert!(model.max_violation(&sol.values) <= 1e-6);
    }

    #[test]
    fn solver_seam_agrees_on_milps(seed in any::<u64>(), k in 1usize..=8) {
        let model = random_mixed_program(seed, k);
        let ours = solve_milp(&model, &MilpParams::default()).unwrap();
        let theirs = ExternalSolver.solve_milp(&model, &MilpParams::default()).unwrap();
        prop_assert_eq!(ours.status, theirs.status);
        prop_assert!(close(ours.objective, theirs.objective, 1e-6), "{} vs {}", ours.objective, theirs.objective);
    }
}

#[test]
fn solving_is_deterministic() {
    let model = random_mixed_program(7, 8);
    let a = solve_milp(&model, &MilpParams::default()).unwrap();
    let b = solve_milp(&model, &MilpParams::default()).unwrap();
    assert_eq!(a, b);
}
