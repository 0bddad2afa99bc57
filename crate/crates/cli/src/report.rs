//! Run reports and the benchmark table.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use anyhow::{bail, Context};
use robtnep_core::ccg::{CcgResult, CcgStatus, IterationRecord, Method};
use robtnep_core::model::Network;
use robtnep_core::sizes::SizeReport;
use serde::{Deserialize, Serialize};

/// Everything one `solve` (or one `bench` cell) produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub case: String,
    pub method: Method,
    pub solver: String,
    pub gamma_gen: BTreeMap<String, u32>,
    pub gamma_dem: BTreeMap<String, u32>,
    pub objective: f64,
    pub z_lo: f64,
    pub z_up: f64,
    pub iterations: usize,
    pub status: CcgStatus,
    /// External (1-based) ids of the built candidate lines.
    pub built_lines: Vec<usize>,
    pub investment_cost: f64,
    pub worst_case_cost: f64,
    pub trace: Vec<IterationRecord>,
    pub sizes: SizeReport,
    /// Wall time of each repetition, in seconds.
    pub seconds: Vec<f64>,
}

impl RunReport {
    pub fn new(net: &Network, method: Method, solver: &str, result: &CcgResult, sizes: SizeReport, seconds: Vec<f64>) -> Self {
        Self {
            case: net.name.clone(),
            method,
            solver: solver.to_owned(),
            gamma_gen: net.uncertainty.gamma_gen.clone(),
            gamma_dem: net.uncertainty.gamma_dem.clone(),
            objective: result.objective(),
            z_lo: result.z_lo,
            z_up: result.z_up,
            iterations: result.iterations,
            status: result.status,
            built_lines: result.plan.built_lines(net).into_iter().map(|k| k + 1).collect(),
            investment_cost: result.plan.investment_cost,
            worst_case_cost: result.plan.gamma,
            trace: result.trace.clone(),
            sizes,
            seconds,
        }
    }

    /// Budget label such as `G=3 D=5`, or `G=a:1,b:2 D=a:0,b:3` with regions.
    pub fn budgets(&self) -> String {
        format!("G={} D={}", budget_label(&self.gamma_gen), budget_label(&self.gamma_dem))
    }

    /// File-name fragment for the budgets, e.g. `g3-d5`.
    pub fn budget_tag(&self) -> String {
        let tag = |m: &BTreeMap<String, u32>| {
            if m.len() == 1 {
                m.values().next().unwrap().to_string()
            } else {
                m.iter().map(|(r, v)| format!("{r}{v}")).collect::<Vec<_>>().join("_")
            }
        };
        format!("g{}-d{}", tag(&self.gamma_gen), tag(&self.gamma_dem))
    }

    pub fn mean_seconds(&self) -> f64 {
        if self.seconds.is_empty() {
            return 0.0;
        }
        self.seconds.iter().sum::<f64>() / self.seconds.len() as f64
    }

    /// Sample standard deviation; zero for fewer than two runs.
    pub fn std_seconds(&self) -> f64 {
        let n = self.seconds.len();
        if n < 2 {
            return 0.0;
        }
        let mean = self.mean_seconds();
        let ss: f64 = self.seconds.iter().map(|t| (t - mean).powi(2)).sum();
        (ss / (n - 1) as f64).sqrt()
    }

    /// Checks the headline numbers against a trace (for instance one read
    /// back from the `.trace.jsonl` file).
    pub fn matches_trace(&self, trace: &[IterationRecord]) -> bool {
        let Some(last) = trace.last() else {
            return false;
        };
        trace.len() == self.iterations && last.z_up == self.z_up && last.z_lo == self.z_lo && self.objective == last.z_up
    }
}

fn budget_label(m: &BTreeMap<String, u32>) -> String {
    if m.len() == 1 {
        m.values().next().unwrap().to_string()
    } else {
        m.iter().map(|(r, v)| format!("{r}:{v}")).collect::<Vec<_>>().join(",")
    }
}

/// One row of the benchmark table.
#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub case: String,
    pub budgets: String,
    pub objective: f64,
    pub iterations: usize,
    pub mean_seconds: f64,
    pub std_seconds: f64,
}

impl From<&RunReport> for TableRow {
    fn from(r: &RunReport) -> Self {
        Self {
            case: r.case.clone(),
            budgets: r.budgets(),
            objective: r.objective,
            iterations: r.iterations,
            mean_seconds: r.mean_seconds(),
            std_seconds: r.std_seconds(),
        }
    }
}

pub const COLUMNS: [&str; 6] = ["Case", "Budgets", "Objective", "Iterations", "Mean (s)", "Std (s)"];

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub markdown: String,
    pub csv: String,
}

/// Markdown and CSV renderings of the reports, one row each. Numbers use
/// the shortest representation that parses back to the same value.
pub fn emit_table(reports: &[RunReport]) -> anyhow::Result<Table> {
    if reports.is_empty() {
        bail!("emit_table needs at least one report");
    }
    let rows: Vec<TableRow> = reports.iter().map(TableRow::from).collect();
    let mut markdown = format!("| {} |\n|{}\n", COLUMNS.join(" | "), "---|".repeat(COLUMNS.len()));
    let mut csv = COLUMNS.join(",") + "\n";
    for r in &rows {
        let cells = [
            r.case.clone(),
            r.budgets.clone(),
            r.objective.to_string(),
            r.iterations.to_string(),
            r.mean_seconds.to_string(),
            r.std_seconds.to_string(),
        ];
        writeln!(markdown, "| {} |", cells.join(" | ")).unwrap();
        let quoted: Vec<String> = cells.iter().map(|c| csv_field(c)).collect();
        writeln!(csv, "{}", quoted.join(",")).unwrap();
    }
    Ok(Table { markdown, csv })
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

fn row_from_cells(cells: &[String]) -> anyhow::Result<TableRow> {
    if cells.len() != COLUMNS.len() {
        bail!("expected {} cells, found {}", COLUMNS.len(), cells.len());
    }
    Ok(TableRow {
        case: cells[0].clone(),
        budgets: cells[1].clone(),
        objective: cells[2].parse().context("objective")?,
        iterations: cells[3].parse().context("iterations")?,
        mean_seconds: cells[4].parse().context("mean time")?,
        std_seconds: cells[5].parse().context("std time")?,
    })
}

/// Reads back a table written by [`emit_table`].
pub fn parse_markdown(text: &str) -> anyhow::Result<Vec<TableRow>> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    lines.next().context("missing header row")?;
    lines.next().context("missing separator row")?;
    lines
        .map(|line| {
            let inner = line.trim().trim_start_matches('|').trim_end_matches('|');
            let cells: Vec<String> = inner.split('|').map(|c| c.trim().to_owned()).collect();
            row_from_cells(&cells)
        })
        .collect()
}

/// Reads back the CSV written by [`emit_table`].
pub fn parse_csv(text: &str) -> anyhow::Result<Vec<TableRow>> {
    let mut lines = text.lines().filter(|l| !l.is_empty());
    lines.next().context("missing header row")?;
    lines.map(|line| row_from_cells(&split_csv(line))).collect()
}

fn split_csv(line: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut quoted = false;
    let mut chars = line.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            '"' if quoted && chars.peek() == Some(&'"') => {
                cur.push('"');
                chars.next();
            }
            '"' => quoted = !quoted,
            ',' if !quoted => out.push(std::mem::take(&mut cur)),
            _ => cur.push(c),
        }
    }
    out.push(cur);
    out
}
