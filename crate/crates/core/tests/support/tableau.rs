//! Textbook two-phase dense tableau simplex with Bland's rule. Slow and
//! simple on purpose: it shares no code with the engine it checks.

use robtnep_milp::{MilpModel, ObjectiveSense, RowSense};

const TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Outcome {
    Optimal(f64),
    Infeasible,
    Unbounded,
}

/// How an original variable is expressed through non-negative columns.
enum Map {
    /// x = offset + sign * col
    Shift { col: usize, offset: f64, sign: f64 },
    /// x = plus - minus
    Split { plus: usize, minus: usize },
}

struct Tableau {
    /// rows x (cols + 1); the last entry is the right-hand side
    a: Vec<Vec<f64>>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.a[r][c];
        for v in self.a[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.a[r].clone();
        for (i, row) in self.a.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f != 0.0 {
                for (v, p) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * p;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Minimizes `cost` over columns `0..allowed`. Returns false when unbounded.
    fn minimize(&mut self, cost: &[f64], allowed: usize) -> bool {
        loop {
            let reduced = |t: &Tableau, j: usize| {
                cost[j] - t.basis.iter().enumerate().map(|(i, &b)| cost[b] * t.a[i][j]).sum::<f64>()
            };
            let Some(enter) = (0..allowed).find(|&j| !self.basis.contains(&j) && reduced(self, j) < -TOL) else {
                return true;
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.a.len() {
                let coef = self.a[i][enter];
                if coef > TOL {
                    let ratio = self.a[i][self.cols] / coef;
                    let better = match leave {
                        None => true,
                        Some((l, best)) => ratio < best - TOL || (ratio <= best + TOL && self.basis[i] < self.basis[l]),
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, enter),
                None => return false,
            }
        }
    }
}

/// Solves the continuous relaxation of `model`.
pub fn solve(model: &MilpModel) -> Outcome {
    let mut ncols = 0;
    let mut maps = Vec::new();
    let mut bound_rows: Vec<(usize, f64)> = Vec::new();
    for v in model.variables() {
        let map = match (v.lower.is_finite(), v.upper.is_finite()) {
            (true, up) => {
                if up {
                    bound_rows.push((ncols, v.upper - v.lower));
                }
                Map::Shift {
                    col: ncols,
                    offset: v.lower,
                    sign: 1.0,
                }
            }
            (false, true) => Map::Shift {
                col: ncols,
                offset: v.upper,
                sign: -1.0,
            },
            (false, false) => {
                ncols += 1;
                Map::Split {
                    plus: ncols - 1,
                    minus: ncols,
                }
            }
        };
        ncols += 1;
        maps.push(map);
    }

    // Rows over the structural columns, with a sense and right-hand side.
    let mut rows: Vec<(Vec<f64>, RowSense, f64)> = Vec::new();
    for c in model.constraints() {
        let mut coefs = vec![0.0; ncols];
        let mut rhs = c.rhs;
        for &(var, a) in &c.terms {
            match maps[var.index()] {
                Map::Shift { col, offset, sign } => {
                    coefs[col] += a * sign;
                    rhs -= a * offset;
                }
                Map::Split { plus, minus } => {
                    coefs[plus] += a;
                    coefs[minus] -= a;
                }
            }
        }
        rows.push((coefs, c.sense, rhs));
    }
    for &(col, width) in &bound_rows {
        let mut coefs = vec![0.0; ncols];
        coefs[col] = 1.0;
        rows.push((coefs, RowSense::Le, width));
    }

    let m = rows.len();
    let slacks: Vec<Option<usize>> = {
        let mut next = ncols;
        rows.iter()
            .map(|(_, sense, _)| {
                (*sense != RowSense::Eq).then(|| {
                    next += 1;
                    next - 1
                })
            })
            .collect()
    };
    let nslack = slacks.iter().flatten().count();
    let art0 = ncols + nslack;
    let cols = art0 + m;
    let mut a = vec![vec![0.0; cols + 1]; m];
    for (i, (coefs, sense, rhs)) in rows.iter().enumerate() {
        a[i][..ncols].copy_from_slice(coefs);
        if let Some(s) = slacks[i] {
            a[i][s] = if *sense == RowSense::Le { 1.0 } else { -1.0 };
        }
        a[i][cols] = *rhs;
        if *rhs < 0.0 {
            for v in a[i].iter_mut() {
                *v = -*v;
            }
        }
        a[i][art0 + i] = 1.0;
    }
    let mut t = Tableau {
        a,
        basis: (art0..art0 + m).collect(),
        cols,
    };

    let mut phase1 = vec![0.0; cols];
    for c in phase1.iter_mut().skip(art0) {
        *c = 1.0;
    }
    t.minimize(&phase1, cols);
    let infeasibility: f64 = t.basis.iter().enumerate().filter(|(_, &b)| b >= art0).map(|(i, _)| t.a[i][cols]).sum();
    if infeasibility > 1e-7 {
        return Outcome::Infeasible;
    }
    for i in 0..m {
        if t.basis[i] >= art0 {
            if let Some(j) = (0..art0).find(|&j| t.a[i][j].abs() > 1e-9) {
                t.pivot(i, j);
            }
        }
    }

    let flip = if model.objective().sense == ObjectiveSense::Maximize { -1.0 } else { 1.0 };
    let mut cost = vec![0.0; cols];
    let mut constant = model.objective().constant;
    for &(var, c) in &model.objective().terms {
        match maps[var.index()] {
            Map::Shift { col, offset, sign } => {
                cost[col] += flip * c * sign;
                constant += c * offset;
            }
            Map::Split { plus, minus } => {
                cost[plus] += flip * c;
                cost[minus] -= flip * c;
            }
        }
    }
    if !t.minimize(&cost, art0) {
        return Outcome::Unbounded;
    }
    let value: f64 = t.basis.iter().enumerate().map(|(i, &b)| cost[b] * t.a[i][cols]).sum();
    Outcome::Optimal(flip * value + constant)
}
