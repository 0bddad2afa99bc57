//! Random small planning instances for the property and acceptance suites.

#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use robtnep_core::model::{
    validate, BigM, Bus, Demand, Generator, Line, LineStatus, Network, PlanningConfig, UncertaintyModel,
};

/// Shape limits for [`random_network`].
#[derive(Debug, Clone, Copy)]
pub struct Shape {
    pub max_buses: usize,
    pub max_candidates: usize,
    pub max_uncertain: usize,
}

pub const ORACLE_SHAPE: Shape = Shape {
    max_buses: 5,
    max_candidates: 4,
    max_uncertain: 6,
};

fn round2(v: f64) -> f64 {
    (v * 100.0).round() / 100.0
}

/// A valid network with at most `shape` buses, candidates and uncertain
/// parameters, random integer budgets and a single region.
///
/// Existing lines form a random spanning tree that is sometimes missing an
/// edge, so shedding and islands show up. Capacities are tight enough that
/// candidates matter.
pub fn random_network(seed: u64, shape: Shape) -> Network {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nb = rng.gen_range(2..=shape.max_buses);
    let slack = rng.gen_range(0..nb);
    let buses: Vec<Bus> = (0..nb)
        .map(|s| Bus {
            id: s,
            region: "all".into(),
            is_slack: s == slack,
        })
        .collect();

    let total = rng.gen_range(2..=shape.max_uncertain);
    let ng = rng.gen_range(1..total);
    let nd = total - ng;
    let generators: Vec<Generator> = (0..ng)
        .map(|i| {
            let cap = rng.gen_range(20..=120) as f64;
            Generator {
                id: i,
                bus: rng.gen_range(0..nb),
                cap_nominal: cap,
                cap_deviation: round2(cap * rng.gen_range(0.0..=0.6)),
                cost: rng.gen_range(5..=40) as f64,
            }
        })
        .collect();
    let demands: Vec<Demand> = (0..nd)
        .map(|j| {
            let load = rng.gen_range(10..=80) as f64;
            Demand {
                id: j,
                bus: rng.gen_range(0..nb),
                load_nominal: load,
                load_deviation: round2(load * rng.gen_range(0.0..=0.5)),
                shed_cost: rng.gen_range(60..=200) as f64,
                shed_fraction: 1.0,
            }
        })
        .collect();

    let mut lines = Vec::new();
    let add = |lines: &mut Vec<Line>, rng: &mut ChaCha8Rng, a: usize, b: usize, status: LineStatus| {
        lines.push(Line {
            id: lines.len(),
            from_bus: a,
            to_bus: b,
            susceptance: rng.gen_range(2..=20) as f64,
            capacity: rng.gen_range(10..=60) as f64,
            build_cost: rng.gen_range(1..=20) as f64 * 100.0,
            status,
        });
    };
    for s in 1..nb {
        if rng.gen_bool(0.85) {
            let t = rng.gen_range(0..s);
            add(&mut lines, &mut rng, t, s, LineStatus::Existing);
        }
    }
    let nc = rng.gen_range(1..=shape.max_candidates);
    for _ in 0..nc {
        let a = rng.gen_range(0..nb);
        let mut b = rng.gen_range(0..nb - 1);
        if b >= a {
            b += 1;
        }
        add(&mut lines, &mut rng, a.min(b), a.max(b), LineStatus::Candidate);
    }

    let budget = rng.gen_range(0..=40) as f64 * 100.0;
    let uncertainty = UncertaintyModel {
        gamma_gen: BTreeMap::from([("all".to_string(), rng.gen_range(0..=ng as u32))]),
        gamma_dem: BTreeMap::from([("all".to_string(), rng.gen_range(0..=nd as u32))]),
    };
    let config = PlanningConfig {
        budget,
        sigma: 1.0,
        interest_rate: 0.1,
        horizon_years: 25,
        epsilon: 1e-6,
        big_m: BigM::Auto,
        capital_recovery: None,
    };
    let net = Network {
        name: format!("random{seed}"),
        buses,
        generators,
        demands,
        lines,
        uncertainty,
        config,
        metadata: BTreeMap::new(),
    };
    validate(net).expect("random networks are valid")
}

pub fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}

/// Two buses joined by one existing 50 MW line and one 50 MW candidate
/// costing 1000. A 100 MW unit at bus 0 (cost 10) serves 80 MW at bus 1,
/// which may rise by 16 MW; shedding costs 100. R = σ = 1, Π = 1000.
/// Susceptances are 1 p.u. on a 100 MVA base.
pub fn two_bus() -> Network {
    let buses = vec![
        Bus {
            id: 0,
            region: "all".into(),
            is_slack: true,
        },
        Bus {
            id: 1,
            region: "all".into(),
            is_slack: false,
        },
    ];
    let line = |id, capacity, status| Line {
        id,
        from_bus: 0,
        to_bus: 1,
        susceptance: 100.0,
        capacity,
        build_cost: 1000.0,
        status,
    };
    let net = Network {
        name: "two_bus".into(),
        buses,
        generators: vec![Generator {
            id: 0,
            bus: 0,
            cap_nominal: 100.0,
            cap_deviation: 0.0,
            cost: 10.0,
        }],
        demands: vec![Demand {
            id: 0,
            bus: 1,
            load_nominal: 80.0,
            load_deviation: 16.0,
            shed_cost: 100.0,
            shed_fraction: 1.0,
        }],
        lines: vec![line(0, 50.0, LineStatus::Existing), line(1, 50.0, LineStatus::Candidate)],
        uncertainty: UncertaintyModel {
            gamma_gen: BTreeMap::from([("all".to_string(), 0)]),
            gamma_dem: BTreeMap::from([("all".to_string(), 1)]),
        },
        config: PlanningConfig {
            budget: 1000.0,
            sigma: 1.0,
            interest_rate: 0.1,
            horizon_years: 25,
            epsilon: 1e-6,
            big_m: BigM::Auto,
            capital_recovery: Some(1.0),
        },
        metadata: BTreeMap::new(),
    };
    validate(net).expect("toy network is valid")
}
pub mod tableau;
