//! JSON case files (`"schema": 1`) and the bundled cases.
//!
//! A case file lists buses with external ids `1..=n`, generators and demands
//! attached to buses, and line corridors. A corridor record expands into
//! `existing` in-service copies followed by `candidates` buildable copies.
//! Deviations are either per element (`deviation`, MW) or global fractions of
//! the nominal value (`uncertainty.gen_dev_fraction`/`dem_dev_fraction`).

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    validate, BigM, Bus, Demand, Generator, Line, LineStatus, Network, PlanningConfig, UncertaintyModel,
    ValidationErrors, ValidationIssue, DEFAULT_REGION,
};

pub const SCHEMA_VERSION: u32 = 1;
pub const BUILTIN_CASES: [&str; 3] = ["garver6", "ieee24", "ieee118"];

const DEFAULT_BASE_MVA: f64 = 100.0;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("schema error: {0}")]
    Schema(String),
    #[error("unknown case `{0}` (built-in cases: garver6, ieee24, ieee118)")]
    UnknownCase(String),
    #[error("invalid case: {0}")]
    Invalid(#[from] ValidationErrors),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseFile {
    pub schema: u32,
    #[serde(default)]
    pub name: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub meta: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_mva: Option<f64>,
    pub buses: Vec<BusRecord>,
    pub generators: Vec<GeneratorRecord>,
    pub demands: Vec<DemandRecord>,
    pub lines: Vec<LineRecord>,
    pub uncertainty: UncertaintyRecord,
    pub config: ConfigRecord,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BusRecord {
    pub id: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region: Option<String>,
    #[serde(default)]
    pub slack: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorRecord {
    pub bus: usize,
    pub capacity: f64,
    pub cost: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deviation: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DemandRecord {
    pub bus: usize,
    pub load: f64,
    pub shed_cost: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deviation: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shed_fraction: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LineRecord {
    pub from: usize,
    pub to: usize,
    /// Per-unit reactance on `base_mva`; alternative to `susceptance`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reactance: Option<f64>,
    /// MW per radian.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub susceptance: Option<f64>,
    pub capacity: f64,
    #[serde(default)]
    pub build_cost: f64,
    #[serde(default)]
    pub existing: usize,
    #[serde(default)]
    pub candidates: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UncertaintyRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gen_dev_fraction: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dem_dev_fraction: Option<f64>,
    #[serde(default)]
    pub gamma_gen: BTreeMap<String, u32>,
    #[serde(default)]
    pub gamma_dem: BTreeMap<String, u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigRecord {
    pub budget: f64,
    #[serde(default = "default_sigma")]
    pub sigma: f64,
    #[serde(default = "default_rate")]
    pub interest_rate: f64,
    #[serde(default = "default_years")]
    pub horizon_years: u32,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default)]
    pub big_m: BigMRecord,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub capital_recovery: Option<f64>,
}

fn default_sigma() -> f64 {
    PlanningConfig::default().sigma
}
fn default_rate() -> f64 {
    PlanningConfig::default().interest_rate
}
fn default_years() -> u32 {
    PlanningConfig::default().horizon_years
}
fn default_epsilon() -> f64 {
    PlanningConfig::default().epsilon
}

/// `"auto"` or a positive number.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BigMRecord {
    Value(f64),
    Word(String),
}

impl Default for BigMRecord {
    fn default() -> Self {
        BigMRecord::Word("auto".into())
    }
}

/// Per-region budgets as accepted by `--gamma-file`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BudgetFile {
    #[serde(default)]
    pub gamma_gen: BTreeMap<String, u32>,
    #[serde(default)]
    pub gamma_dem: BTreeMap<String, u32>,
}

fn json_error(e: serde_json::Error) -> IngestError {
    use serde_json::error::Category;
    match e.classify() {
        Category::Syntax | Category::Eof | Category::Io => IngestError::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        },
        Category::Data => IngestError::Schema(e.to_string()),
    }
}

/// Parses and validates a case file. A case without a name takes the file
/// stem.
pub fn parse_system(path: impl AsRef<Path>) -> Result<Network, IngestError> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|source| IngestError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut net = parse_bytes(&bytes)?;
    if net.name.is_empty() {
        if let Some(stem) = path.file_stem() {
            net.name = stem.to_string_lossy().into_owned();
        }
    }
    Ok(net)
}

pub fn parse_bytes(bytes: &[u8]) -> Result<Network, IngestError> {
    let case: CaseFile = serde_json::from_slice(bytes).map_err(json_error)?;
    from_case_file(&case)
}

pub fn parse_budgets(bytes: &[u8]) -> Result<UncertaintyModel, IngestError> {
    let file: BudgetFile = serde_json::from_slice(bytes).map_err(json_error)?;
    Ok(UncertaintyModel {
        gamma_gen: file.gamma_gen,
        gamma_dem: file.gamma_dem,
    })
}

/// Loads one of [`BUILTIN_CASES`].
pub fn builtin_case(name: &str) -> Result<Network, IngestError> {
    let text = match name {
        "garver6" => include_str!("../data/garver6.json"),
        "ieee24" => include_str!("../data/ieee24.json"),
        "ieee118" => include_str!("../data/ieee118.json"),
        other => return Err(IngestError::UnknownCase(other.to_owned())),
    };
    parse_bytes(text.as_bytes())
}

/// Resolves a built-in case name or a path to a case file.
pub fn load_case(name_or_path: &str) -> Result<Network, IngestError> {
    if BUILTIN_CASES.contains(&name_or_path) {
        return builtin_case(name_or_path);
    }
    let path = Path::new(name_or_path);
    if path.exists() {
        parse_system(path)
    } else {
        Err(IngestError::UnknownCase(name_or_path.to_owned()))
    }
}

fn fraction(value: Option<f64>, field: &str) -> Result<Option<f64>, IngestError> {
    match value {
        Some(f) if !(0.0..=1.0).contains(&f) => {
            Err(IngestError::Schema(format!("uncertainty.{field} must lie in [0, 1], got {f}")))
        }
        v => Ok(v),
    }
}

fn deviation(
    element: Option<f64>,
    global: Option<f64>,
    nominal: f64,
    what: &str,
) -> Result<f64, IngestError> {
    match (element, global) {
        (Some(_), Some(_)) => Err(IngestError::Schema(format!(
            "{what}: deviation given both per element and as a global fraction"
        ))),
        (Some(d), None) => Ok(d),
        (None, Some(f)) => Ok(f * nominal),
        (None, None) => Ok(0.0),
    }
}

pub fn from_case_file(case: &CaseFile) -> Result<Network, IngestError> {
    if case.schema != SCHEMA_VERSION {
        return Err(IngestError::Schema(format!(
            "schema: unsupported version {} (expected {SCHEMA_VERSION})",
            case.schema
        )));
    }
    if case.buses.is_empty() {
        return Err(IngestError::Schema("buses: array is empty".into()));
    }
    let nb = case.buses.len();
    let mut issues = Vec::new();
    let mut slot: Vec<Option<&BusRecord>> = vec![None; nb];
    for (pos, b) in case.buses.iter().enumerate() {
        match b.id.checked_sub(1).filter(|&i| i < nb) {
            Some(i) if slot[i].is_none() => slot[i] = Some(b),
            _ => issues.push(ValidationIssue::BadId {
                kind: "bus",
                position: pos,
                id: b.id,
            }),
        }
    }
    if !issues.is_empty() {
        return Err(ValidationErrors(issues).into());
    }
    let buses: Vec<Bus> = slot
        .into_iter()
        .enumerate()
        .map(|(i, b)| {
            let b = b.expect("every slot filled");
            Bus {
                id: i,
                region: b.region.clone().unwrap_or_else(|| DEFAULT_REGION.to_owned()),
                is_slack: b.slack,
            }
        })
        .collect();
    let mut bus = |kind: &'static str, id: usize, ext: usize| -> usize {
        match ext.checked_sub(1).filter(|&i| i < nb) {
            Some(i) => i,
            None => {
                issues.push(ValidationIssue::DanglingBus { kind, id, bus: ext });
                0
            }
        }
    };

    let gen_frac = fraction(case.uncertainty.gen_dev_fraction, "gen_dev_fraction")?;
    let dem_frac = fraction(case.uncertainty.dem_dev_fraction, "dem_dev_fraction")?;

    let mut generators = Vec::with_capacity(case.generators.len());
    for (i, g) in case.generators.iter().enumerate() {
        generators.push(Generator {
            id: i,
            bus: bus("generator", i, g.bus),
            cap_nominal: g.capacity,
            cap_deviation: deviation(g.deviation, gen_frac, g.capacity, &format!("generators[{i}]"))?,
            cost: g.cost,
        });
    }
    let mut demands = Vec::with_capacity(case.demands.len());
    for (j, d) in case.demands.iter().enumerate() {
        demands.push(Demand {
            id: j,
            bus: bus("demand", j, d.bus),
            load_nominal: d.load,
            load_deviation: deviation(d.deviation, dem_frac, d.load, &format!("demands[{j}]"))?,
            shed_cost: d.shed_cost,
            shed_fraction: d.shed_fraction.unwrap_or(1.0),
        });
    }

    let base = case.base_mva.unwrap_or(DEFAULT_BASE_MVA);
    let mut lines = Vec::new();
    for (c, rec) in case.lines.iter().enumerate() {
        let susceptance = match (rec.reactance, rec.susceptance) {
            (Some(x), None) => base / x,
            (None, Some(b)) => b,
            _ => {
                return Err(IngestError::Schema(format!(
                    "lines[{c}]: give exactly one of reactance or susceptance"
                )))
            }
        };
        if rec.existing + rec.candidates == 0 {
            return Err(IngestError::Schema(format!(
                "lines[{c}]: corridor has neither existing nor candidate circuits"
            )));
        }
        let first = lines.len();
        let from_bus = bus("line", first, rec.from);
        let to_bus = bus("line", first, rec.to);
        let statuses = std::iter::repeat_n(LineStatus::Existing, rec.existing)
            .chain(std::iter::repeat_n(LineStatus::Candidate, rec.candidates));
        for status in statuses {
            lines.push(Line {
                id: lines.len(),
                from_bus,
                to_bus,
                susceptance,
                capacity: rec.capacity,
                build_cost: rec.build_cost,
                status,
            });
        }
    }
    if !issues.is_empty() {
        return Err(ValidationErrors(issues).into());
    }

    let big_m = match &case.config.big_m {
        BigMRecord::Value(m) => BigM::Explicit(*m),
        BigMRecord::Word(w) if w == "auto" => BigM::Auto,
        BigMRecord::Word(w) => {
            return Err(IngestError::Schema(format!("config.big_m: expected \"auto\" or a number, got `{w}`")))
        }
    };
    let cfg = &case.config;
    let network = Network {
        name: case.name.clone(),
        buses,
        generators,
        demands,
        lines,
        uncertainty: UncertaintyModel {
            gamma_gen: case.uncertainty.gamma_gen.clone(),
            gamma_dem: case.uncertainty.gamma_dem.clone(),
        },
        config: PlanningConfig {
            budget: cfg.budget,
            sigma: cfg.sigma,
            interest_rate: cfg.interest_rate,
            horizon_years: cfg.horizon_years,
            epsilon: cfg.epsilon,
            big_m,
            capital_recovery: cfg.capital_recovery,
        },
        metadata: case.meta.clone(),
    };
    Ok(validate(network)?)
}

fn same_corridor(rec: &LineRecord, line: &Line) -> bool {
    rec.from == line.from_bus + 1
        && rec.to == line.to_bus + 1
        && rec.susceptance == Some(line.susceptance)
        && rec.capacity == line.capacity
        && rec.build_cost == line.build_cost
        && (line.is_candidate() || rec.candidates == 0)
}

/// Converts a network back into the file schema. Consecutive identical lines
/// are folded into one corridor record; deviations are written per element.
pub fn to_case_file(network: &Network) -> CaseFile {
    let mut lines: Vec<LineRecord> = Vec::new();
    for line in &network.lines {
        match lines.last_mut() {
            Some(rec) if same_corridor(rec, line) => {
                if line.is_candidate() {
                    rec.candidates += 1;
                } else {
                    rec.existing += 1;
                }
            }
            _ => lines.push(LineRecord {
                from: line.from_bus + 1,
                to: line.to_bus + 1,
                reactance: None,
                susceptance: Some(line.susceptance),
                capacity: line.capacity,
                build_cost: line.build_cost,
                existing: usize::from(!line.is_candidate()),
                candidates: usize::from(line.is_candidate()),
            }),
        }
    }
    let cfg = &network.config;
    CaseFile {
        schema: SCHEMA_VERSION,
        name: network.name.clone(),
        meta: network.metadata.clone(),
        base_mva: None,
        buses: network
            .buses
            .iter()
            .map(|b| BusRecord {
                id: b.id + 1,
                region: Some(b.region.clone()),
                slack: b.is_slack,
            })
            .collect(),
        generators: network
            .generators
            .iter()
            .map(|g| GeneratorRecord {
                bus: g.bus + 1,
                capacity: g.cap_nominal,
                cost: g.cost,
                deviation: Some(g.cap_deviation),
            })
            .collect(),
        demands: network
            .demands
            .iter()
            .map(|d| DemandRecord {
                bus: d.bus + 1,
                load: d.load_nominal,
                shed_cost: d.shed_cost,
                deviation: Some(d.load_deviation),
                shed_fraction: (d.shed_fraction != 1.0).then_some(d.shed_fraction),
            })
            .collect(),
        lines,
        uncertainty: UncertaintyRecord {
            gen_dev_fraction: None,
            dem_dev_fraction: None,
            gamma_gen: network.uncertainty.gamma_gen.clone(),
            gamma_dem: network.uncertainty.gamma_dem.clone(),
        },
        config: ConfigRecord {
            budget: cfg.budget,
            sigma: cfg.sigma,
            interest_rate: cfg.interest_rate,
            horizon_years: cfg.horizon_years,
            epsilon: cfg.epsilon,
            big_m: match cfg.big_m {
                BigM::Auto => BigMRecord::default(),
                BigM::Explicit(m) => BigMRecord::Value(m),
            },
            capital_recovery: cfg.capital_recovery,
        },
    }
}

/// Serializes a network as a case file, one record per line of text.
pub fn serialize(network: &Network) -> String {
    let value = serde_json::to_value(to_case_file(network)).expect("case files serialize");
    let serde_json::Value::Object(map) = value else {
        unreachable!("case file is an object")
    };
    let mut parts = Vec::new();
    for (key, v) in map {
        let body = match v {
            serde_json::Value::Array(items) => {
                let rows: Vec<String> = items.iter().map(|e| format!("    {e}")).collect();
                format!("[\n{}\n  ]", rows.join(",\n"))
            }
            other => other.to_string(),
        };
        parts.push(format!("  {}: {body}", serde_json::Value::String(key)));
    }
    format!("{{\n{}\n}}\n", parts.join(",\n"))
}
