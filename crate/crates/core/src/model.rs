//! Planning-instance types and validation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

pub const DEFAULT_REGION: &str = "all";

#[derive(Debug, Clone, PartialEq)]
pub struct Bus {
    pub id: usize,
    pub region: String,
    pub is_slack: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Generator {
    pub id: usize,
    pub bus: usize,
    /// Nominal capacity in MW.
    pub cap_nominal: f64,
    /// Maximum downward capacity deviation in MW.
    pub cap_deviation: f64,
    /// Offer price per MWh.
    pub cost: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Demand {
    pub id: usize,
    pub bus: usize,
    pub load_nominal: f64,
    /// Maximum upward load deviation in MW.
    pub load_deviation: f64,
    /// Shedding cost per MWh.
    pub shed_cost: f64,
    /// Largest fraction of the load that may be shed.
    pub shed_fraction: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LineStatus {
    Existing,
    Candidate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Line {
    pub id: usize,
    pub from_bus: usize,
    pub to_bus: usize,
    /// MW per radian of angle difference.
    pub susceptance: f64,
    pub capacity: f64,
    pub build_cost: f64,
    pub status: LineStatus,
}

impl Line {
    pub fn is_candidate(&self) -> bool {
        self.status == LineStatus::Candidate
    }
}

/// Per-region cardinality budgets. Regions without an entry have budget 0.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct UncertaintyModel {
    pub gamma_gen: BTreeMap<String, u32>,
    pub gamma_dem: BTreeMap<String, u32>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BigM {
    Auto,
    /// Bound in currency units (already multiplied by sigma).
    Explicit(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanningConfig {
    pub budget: f64,
    pub sigma: f64,
    pub interest_rate: f64,
    pub horizon_years: u32,
    pub epsilon: f64,
    pub big_m: BigM,
    /// Replaces the annuity factor computed from `interest_rate` and `horizon_years`.
    pub capital_recovery: Option<f64>,
}

impl Default for PlanningConfig {
    fn default() -> Self {
        Self {
            budget: 0.0,
            sigma: 8760.0,
            interest_rate: 0.1,
            horizon_years: 25,
            epsilon: 1e-6,
            big_m: BigM::Auto,
            capital_recovery: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    pub name: String,
    pub buses: Vec<Bus>,
    pub generators: Vec<Generator>,
    pub demands: Vec<Demand>,
    pub lines: Vec<Line>,
    pub uncertainty: UncertaintyModel,
    pub config: PlanningConfig,
    pub metadata: BTreeMap<String, String>,
}

/// Element counts `(n_g, n_d, n_b, n_l)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Dimensions {
    pub generators: usize,
    pub demands: usize,
    pub buses: usize,
    pub lines: usize,
}

/// Annuity factor `r (1+r)^n / ((1+r)^n - 1)`.
pub fn capital_recovery_factor(rate: f64, years: u32) -> Result<f64, ValidationIssue> {
    if !rate.is_finite() || rate <= 0.0 {
        return Err(ValidationIssue::Config {
            field: "interest_rate",
            value: rate,
        });
    }
    if years == 0 {
        return Err(ValidationIssue::Config {
            field: "horizon_years",
            value: 0.0,
        });
    }
    let growth = (1.0 + rate).powi(years as i32);
    Ok(rate * growth / (growth - 1.0))
}

impl Network {
    pub fn dimensions(&self) -> Dimensions {
        Dimensions {
            generators: self.generators.len(),
            demands: self.demands.len(),
            buses: self.buses.len(),
            lines: self.lines.len(),
        }
    }

    pub fn slack_bus(&self) -> usize {
        self.buses.iter().position(|b| b.is_slack).unwrap_or(0)
    }

    /// Indices into `lines` of the candidate lines, in order.
    pub fn candidate_lines(&self) -> Vec<usize> {
        (0..self.lines.len()).filter(|&k| self.lines[k].is_candidate()).collect()
    }

    pub fn num_candidates(&self) -> usize {
        self.lines.iter().filter(|l| l.is_candidate()).count()
    }

    pub fn capital_recovery(&self) -> f64 {
        match self.config.capital_recovery {
            Some(r) => r,
            None => capital_recovery_factor(self.config.interest_rate, self.config.horizon_years)
                .unwrap_or(f64::NAN),
        }
    }

    /// Bound on the dual variables in currency units.
    pub fn big_m(&self) -> f64 {
        match self.config.big_m {
            BigM::Explicit(m) => m,
            BigM::Auto => {
                let shed = self.demands.iter().map(|d| d.shed_cost).fold(0.0, f64::max);
                let base = if shed > 0.0 { shed } else { self.max_marginal_cost().max(1.0) };
                10.0 * self.config.sigma * base
            }
        }
    }

    fn max_marginal_cost(&self) -> f64 {
        let gen = self.generators.iter().map(|g| g.cost);
        let shed = self.demands.iter().map(|d| d.shed_cost);
        gen.chain(shed).fold(0.0, f64::max)
    }

    /// Currency amount that maps to 1.0 in the optimization models.
    pub fn cost_unit(&self) -> f64 {
        let c = self.max_marginal_cost();
        self.config.sigma * if c > 0.0 { c } else { 1.0 }
    }

    pub fn gen_region(&self, i: usize) -> &str {
        &self.buses[self.generators[i].bus].region
    }

    pub fn dem_region(&self, j: usize) -> &str {
        &self.buses[self.demands[j].bus].region
    }

    pub fn regions(&self) -> BTreeSet<&str> {
        self.buses.iter().map(|b| b.region.as_str()).collect()
    }

    pub fn gamma_gen(&self, region: &str) -> u32 {
        self.uncertainty.gamma_gen.get(region).copied().unwrap_or(0)
    }

    pub fn gamma_dem(&self, region: &str) -> u32 {
        self.uncertainty.gamma_dem.get(region).copied().unwrap_or(0)
    }

    /// Generator indices grouped by region.
    pub fn gen_groups(&self) -> BTreeMap<&str, Vec<usize>> {
        let mut out: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
        for i in 0..self.generators.len() {
            out.entry(self.gen_region(i)).or_default().push(i);
        }
        out
    }

    pub fn dem_groups(&self) -> BTreeMap<&str, Vec<usize>> {
        let mut out: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
        for j in 0..self.demands.len() {
            out.entry(self.dem_region(j)).or_default().push(j);
        }
        out
    }

    /// Sets the same generation and demand budget in every region.
    pub fn with_uniform_budgets(mut self, gamma_gen: u32, gamma_dem: u32) -> Self {
        let regions: Vec<String> = self.regions().into_iter().map(str::to_owned).collect();
        self.uncertainty.gamma_gen = regions.iter().map(|r| (r.clone(), gamma_gen)).collect();
        self.uncertainty.gamma_dem = regions.into_iter().map(|r| (r, gamma_dem)).collect();
        self
    }

    /// Largest admissible budgets, one per region: every parameter may deviate.
    pub fn with_full_budgets(mut self) -> Self {
        let gen: BTreeMap<String, u32> =
            self.gen_groups().into_iter().map(|(r, v)| (r.to_owned(), v.len() as u32)).collect();
        let dem: BTreeMap<String, u32> =
            self.dem_groups().into_iter().map(|(r, v)| (r.to_owned(), v.len() as u32)).collect();
        self.uncertainty.gamma_gen = gen;
        self.uncertainty.gamma_dem = dem;
        self
    }

    /// Every invariant violation, in a stable order.
    pub fn issues(&self) -> Vec<ValidationIssue> {
        let mut out = Vec::new();
        let nb = self.buses.len();
        if nb == 0 {
            out.push(ValidationIssue::Empty("buses"));
        }
        for (pos, b) in self.buses.iter().enumerate() {
            if b.id != pos {
                out.push(ValidationIssue::BadId {
                    kind: "bus",
                    position: pos,
                    id: b.id,
                });
            }
        }
        let slacks: Vec<usize> = self.buses.iter().filter(|b| b.is_slack).map(|b| b.id).collect();
        match slacks.len() {
            0 if nb > 0 => out.push(ValidationIssue::NoSlack),
            0 | 1 => {}
            _ => out.push(ValidationIssue::MultipleSlack(slacks)),
        }

        for (pos, g) in self.generators.iter().enumerate() {
            if g.id != pos {
                out.push(ValidationIssue::BadId {
                    kind: "generator",
                    position: pos,
                    id: g.id,
                });
            }
            if g.bus >= nb {
                out.push(ValidationIssue::DanglingBus {
                    kind: "generator",
                    id: g.id,
                    bus: g.bus,
                });
            }
            check_nonneg(&mut out, "generator", g.id, "cap_nominal", g.cap_nominal);
            check_nonneg(&mut out, "generator", g.id, "cost", g.cost);
            if !(g.cap_deviation >= 0.0 && g.cap_deviation <= g.cap_nominal) {
                out.push(ValidationIssue::Deviation {
                    kind: "generator",
                    id: g.id,
                    value: g.cap_deviation,
                });
            }
        }

        for (pos, d) in self.demands.iter().enumerate() {
            if d.id != pos {
                out.push(ValidationIssue::BadId {
                    kind: "demand",
                    position: pos,
                    id: d.id,
                });
            }
            if d.bus >= nb {
                out.push(ValidationIssue::DanglingBus {
                    kind: "demand",
                    id: d.id,
                    bus: d.bus,
                });
            }
            check_nonneg(&mut out, "demand", d.id, "load_nominal", d.load_nominal);
            check_nonneg(&mut out, "demand", d.id, "shed_cost", d.shed_cost);
            if !(d.load_deviation >= 0.0 && d.load_deviation <= d.load_nominal) {
                out.push(ValidationIssue::Deviation {
                    kind: "demand",
                    id: d.id,
                    value: d.load_deviation,
                });
            }
            if !(0.0..=1.0).contains(&d.shed_fraction) {
                out.push(ValidationIssue::ShedFraction {
                    id: d.id,
                    value: d.shed_fraction,
                });
            }
        }

        for (pos, l) in self.lines.iter().enumerate() {
            if l.id != pos {
                out.push(ValidationIssue::BadId {
                    kind: "line",
                    position: pos,
                    id: l.id,
                });
            }
            for bus in [l.from_bus, l.to_bus] {
                if bus >= nb {
                    out.push(ValidationIssue::DanglingBus {
                        kind: "line",
                        id: l.id,
                        bus,
                    });
                }
            }
            if l.from_bus == l.to_bus {
                out.push(ValidationIssue::SameEndpoints { line: l.id });
            }
            check_positive(&mut out, "line", l.id, "susceptance", l.susceptance);
            check_positive(&mut out, "line", l.id, "capacity", l.capacity);
            check_nonneg(&mut out, "line", l.id, "build_cost", l.build_cost);
        }

        if self.buses.iter().all(|b| b.id < nb) {
            self.check_budgets(&mut out);
        }
        self.check_config(&mut out);
        out
    }

    fn check_budgets(&self, out: &mut Vec<ValidationIssue>) {
        let mut gen_count: BTreeMap<&str, usize> = BTreeMap::new();
        let mut dem_count: BTreeMap<&str, usize> = BTreeMap::new();
        for g in &self.generators {
            if let Some(b) = self.buses.get(g.bus) {
                *gen_count.entry(b.region.as_str()).or_default() += 1;
            }
        }
        for d in &self.demands {
            if let Some(b) = self.buses.get(d.bus) {
                *dem_count.entry(b.region.as_str()).or_default() += 1;
            }
        }
        for (kind, budgets, counts) in [
            ("generation", &self.uncertainty.gamma_gen, &gen_count),
            ("demand", &self.uncertainty.gamma_dem, &dem_count),
        ] {
            for (region, &gamma) in budgets {
                let count = counts.get(region.as_str()).copied().unwrap_or(0);
                if gamma as usize > count {
                    out.push(ValidationIssue::BudgetExceeded {
                        kind,
                        region: region.clone(),
                        gamma,
                        count,
                    });
                }
            }
        }
    }

    fn check_config(&self, out: &mut Vec<ValidationIssue>) {
        let c = &self.config;
        if !(c.budget >= 0.0) {
            out.push(ValidationIssue::Config {
                field: "budget",
                value: c.budget,
            });
        }
        if !(c.sigma > 0.0 && c.sigma.is_finite()) {
            out.push(ValidationIssue::Config {
                field: "sigma",
                value: c.sigma,
            });
        }
        if !(c.epsilon > 0.0 && c.epsilon.is_finite()) {
            out.push(ValidationIssue::Config {
                field: "epsilon",
                value: c.epsilon,
            });
        }
        if let BigM::Explicit(m) = c.big_m {
            if !(m > 0.0 && m.is_finite()) {
                out.push(ValidationIssue::Config {
                    field: "big_m",
                    value: m,
                });
            }
        }
        match c.capital_recovery {
            Some(r) if !(r > 0.0 && r.is_finite()) => out.push(ValidationIssue::Config {
                field: "capital_recovery",
                value: r,
            }),
            Some(_) => {}
            None => {
                if let Err(e) = capital_recovery_factor(c.interest_rate, c.horizon_years) {
                    out.push(e);
                }
            }
        }
    }

    pub fn is_valid(&self) -> bool {
        self.issues().is_empty()
    }
}

fn check_positive(out: &mut Vec<ValidationIssue>, kind: &'static str, id: usize, field: &'static str, v: f64) {
    if !(v > 0.0 && v.is_finite()) {
        out.push(ValidationIssue::NotPositive { kind, id, field, value: v });
    }
}

fn check_nonneg(out: &mut Vec<ValidationIssue>, kind: &'static str, id: usize, field: &'static str, v: f64) {
    if !(v >= 0.0 && v.is_finite()) {
        out.push(ValidationIssue::Negative { kind, id, field, value: v });
    }
}

/// Returns the network unchanged if it satisfies every invariant.
pub fn validate(network: Network) -> Result<Network, ValidationErrors> {
    let issues = network.issues();
    if issues.is_empty() {
        Ok(network)
    } else {
        Err(ValidationErrors(issues))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ValidationIssue {
    Empty(&'static str),
    BadId {
        kind: &'static str,
        position: usize,
        id: usize,
    },
    NoSlack,
    MultipleSlack(Vec<usize>),
    DanglingBus {
        kind: &'static str,
        id: usize,
        bus: usize,
    },
    SameEndpoints {
        line: usize,
    },
    NotPositive {
        kind: &'static str,
        id: usize,
        field: &'static str,
        value: f64,
    },
    Negative {
        kind: &'static str,
        id: usize,
        field: &'static str,
        value: f64,
    },
    Deviation {
        kind: &'static str,
        id: usize,
        value: f64,
    },
    ShedFraction {
        id: usize,
        value: f64,
    },
    BudgetExceeded {
        kind: &'static str,
        region: String,
        gamma: u32,
        count: usize,
    },
    Config {
        field: &'static str,
        value: f64,
    },
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Empty(what) => write!(f, "no {what}"),
            Self::BadId { kind, position, id } => {
                write!(f, "{kind} at position {position} has id {id}: ids must be unique and contiguous")
            }
            Self::NoSlack => write!(f, "no slack bus"),
            Self::MultipleSlack(ids) => write!(f, "multiple slack buses: {ids:?}"),
            Self::DanglingBus { kind, id, bus } => write!(f, "{kind} {id} references unknown bus {bus}"),
            Self::SameEndpoints { line } => write!(f, "line {line} connects a bus to itself"),
            Self::NotPositive { kind, id, field, value } => {
                write!(f, "{kind} {id}: {field} must be positive, got {value}")
            }
            Self::Negative { kind, id, field, value } => {
                write!(f, "{kind} {id}: {field} must be non-negative, got {value}")
            }
            Self::Deviation { kind, id, value } => {
                write!(f, "{kind} {id}: deviation {value} outside [0, nominal]")
            }
            Self::ShedFraction { id, value } => {
                write!(f, "demand {id}: shed fraction {value} outside [0, 1]")
            }
            Self::BudgetExceeded { kind, region, gamma, count } => write!(
                f,
                "{kind} budget {gamma} in region `{region}` exceeds its {count} uncertain parameters"
            ),
            Self::Config { field, value } => write!(f, "config: invalid {field} ({value})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationErrors(pub Vec<ValidationIssue>);

impl fmt::Display for ValidationErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, issue) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{issue}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ValidationErrors {}
