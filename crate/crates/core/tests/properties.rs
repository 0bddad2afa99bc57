mod support;

use proptest::prelude::*;
use robtnep_core::ccg::{solve_robust_tnep, worst_case, CcgLimits, Method};
use robtnep_core::ingest::{parse_bytes, serialize};
use robtnep_core::model::{capital_recovery_factor, validate};
use robtnep_core::operation::enumerate_exact;
use robtnep_milp::BuiltinSolver;
use support::{close, random_network, ORACLE_SHAPE};

proptest! {
    #[test]
    fn annuity_repays_one_unit(rate in 0.001f64..0.5, years in 1u32..=60) {
        let crf = capital_recovery_factor(rate, years).unwrap();
        let present: f64 = (1..=years).map(|t| (1.0 + rate).powi(-(t as i32))).sum();
        prop_assert!((crf * present - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn validation_is_idempotent(seed in any::<u64>()) {
        let net = random_network(seed, ORACLE_SHAPE);
        prop_assert!(net.issues().is_empty());
        prop_assert_eq!(validate(net.clone()).unwrap(), net);
    }

    #[test]
    fn case_files_round_trip(seed in any::<u64>()) {
        let net = random_network(seed, ORACLE_SHAPE);
        let text = serialize(&net);
        prop_assert_eq!(parse_bytes(text.as_bytes()).unwrap(), net);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn ccg_matches_the_oracle(seed in any::<u64>()) {
        let solver = BuiltinSolver::default();
        let net = random_network(seed, ORACLE_SHAPE);
        let exact = enumerate_exact(&net, &solver).unwrap();
        let res = solve_robust_tnep(&net, Method::Dual, &solver, &CcgLimits::default()).unwrap();
        prop_assert!(close(res.objective(), exact.objective, 1e-6), "{} vs {}", res.objective(), exact.objective);
        prop_assert!(res.plan.investment_cost <= net.config.budget + 1e-9);
    }

    #[test]
    fn subproblems_agree_on_any_plan(seed in any::<u64>(), mask in any::<u8>()) {
        let solver = BuiltinSolver::default();
        let net = random_network(seed, ORACLE_SHAPE);
        let plan: Vec<bool> = (0..net.num_candidates()).map(|k| mask >> k & 1 == 1).collect();
        let limits = CcgLimits::default();
        let dual = worst_case(&net, &plan, Method::Dual, &solver, &limits).unwrap();
        let kkt = worst_case(&net, &plan, Method::Kkt, &solver, &limits).unwrap();
        prop_assert!(close(dual.cost, kkt.cost, 1e-6), "dual {} vs kkt {}", dual.cost, kkt.cost);
    }
}
