mod support;

use robtnep_core::ccg::{solve_robust_tnep, CcgLimits, CcgStatus, Method};
use robtnep_core::operation::{enumerate_exact, solve_operation_lp, Scenario};
use robtnep_core::subproblem_dual::fixed_scenario_value;
use robtnep_milp::BuiltinSolver;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use support::{close, random_network, two_bus, ORACLE_SHAPE};

const SEEDS: std::ops::Range<u64> = 0..24;

#[test]
fn ccg_matches_oracle_on_random_instances() {
    let solver = BuiltinSolver::default();
    for seed in SEEDS {
        let net = random_network(seed, ORACLE_SHAPE);
        let exact = enumerate_exact(&net, &solver).unwrap();
        let res = solve_robust_tnep(&net, Method::Dual, &solver, &CcgLimits::default()).unwrap();
        assert_eq!(res.status, CcgStatus::Converged, "seed {seed}");
        assert!(
            close(res.objective(), exact.objective, 1e-6),
            "seed {seed}: ccg {} vs oracle {}",
            res.objective(),
            exact.objective
        );
        assert!(res.iterations <= exact.vertices + 1, "seed {seed}");
        for rec in &res.trace {
            assert!(rec.z_lo <= exact.objective + 1e-6 * exact.objective.abs().max(1.0), "seed {seed}");
            assert!(rec.z_up >= exact.objective - 1e-6 * exact.objective.abs().max(1.0), "seed {seed}");
        }
    }
}

#[test]
fn dual_and_kkt_agree_on_random_instances() {
    let solver = BuiltinSolver::default();
    for seed in SEEDS {
        let net = random_network(seed, ORACLE_SHAPE);
        let dual = solve_robust_tnep(&net, Method::Dual, &solver, &CcgLimits::default()).unwrap();
        let kkt = solve_robust_tnep(&net, Method::Kkt, &solver, &CcgLimits::default()).unwrap();
        assert!(
            close(dual.objective(), kkt.objective(), 1e-6),
            "seed {seed}: dual {} vs kkt {}",
            dual.objective(),
            kkt.objective()
        );
    }
}

#[test]
fn doubling_big_m_changes_nothing() {
    let solver = BuiltinSolver::default();
    for seed in SEEDS {
        let net = random_network(seed, ORACLE_SHAPE);
        let base = solve_robust_tnep(&net, Method::Dual, &solver, &CcgLimits::default()).unwrap();
        for method in [Method::Dual, Method::Kkt] {
            let limits = CcgLimits {
                big_m: Some(2.0 * net.big_m()),
                ..CcgLimits::default()
            };
            let doubled = solve_robust_tnep(&net, method, &solver, &limits).unwrap();
            assert!(close(base.objective(), doubled.objective(), 1e-6), "seed {seed} {method}");
        }
    }
}

#[test]
fn strong_duality_replay() {
    let solver = BuiltinSolver::default();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for k in 0..100u64 {
        let net = random_network(1000 + k, ORACLE_SHAPE).with_full_budgets();
        let plan: Vec<bool> = (0..net.num_candidates()).map(|_| rng.gen_bool(0.5)).collect();
        let z_gen: Vec<bool> = (0..net.generators.len()).map(|_| rng.gen_bool(0.5)).collect();
        let z_dem: Vec<bool> = (0..net.demands.len()).map(|_| rng.gen_bool(0.5)).collect();
        let sc = Scenario::from_indicators(&net, z_gen, z_dem);
        let primal = solve_operation_lp(&net, &plan, &sc, &solver).unwrap().cost;
        let dual = fixed_scenario_value(&net, &plan, &sc, &solver).unwrap();
        assert!(close(primal, dual, 1e-6), "instance {k}: primal {primal} vs dual {dual}");
    }
}

#[test]
fn toy_converges_to_oracle_value() {
    let solver = BuiltinSolver::default();
    let net = two_bus();
    let res = solve_robust_tnep(&net, Method::Dual, &solver, &CcgLimits::default()).unwrap();
    assert!(res.iterations <= 2);
    assert!((res.objective() - 1960.0).abs() < 1e-6);
    assert_eq!(res.plan.build, vec![true]);
    let kkt = solve_robust_tnep(&net, Method::Kkt, &solver, &CcgLimits::default()).unwrap();
    assert!((kkt.objective() - 1960.0).abs() < 1e-6);
}

#[test]
fn bounds_are_monotone_in_every_trace() {
    let solver = BuiltinSolver::default();
    for seed in SEEDS {
        let net = random_network(seed, ORACLE_SHAPE);
        let res = solve_robust_tnep(&net, Method::Dual, &solver, &CcgLimits::default()).unwrap();
        for w in res.trace.windows(2) {
            assert!(w[1].z_lo >= w[0].z_lo, "seed {seed}");
            assert!(w[1].z_up <= w[0].z_up, "seed {seed}");
        }
    }
}
