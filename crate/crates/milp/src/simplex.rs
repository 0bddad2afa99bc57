//! Bounded-variable revised simplex (primal and dual) on the computational
//! form `A x - s = 0`, where each logical `s_i` carries the row's bounds.
//!
//! The engine owns a scaled copy of the model, keeps its basis between
//! solves and accepts bound changes, which is what branch-and-bound needs.

use crate::basis::{BasisInverse, Inversion};
use crate::lp::LpStatus;
use crate::model::{MilpModel, ObjectiveSense, RowSense};
use crate::tolerances::Tolerances;

const REFACTOR_INTERVAL: usize = 100;
const BLAND_AFTER: usize = 1000;
const SINGULAR_TOL: f64 = 1e-11;
const ZERO_STEP: f64 = 1e-12;
const VERIFY_AFTER: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum VarState {
    Basic,
    AtLower,
    AtUpper,
    /// Nonbasic free variable sitting at zero.
    Free,
}

enum Step {
    Unbounded,
    Flip(f64),
    Pivot { row: usize, t: f64, to_upper: bool },
}

#[derive(Debug, Clone)]
pub(crate) struct Engine {
    m: usize,
    n: usize,
    cols: Vec<Vec<(usize, f64)>>,
    row_scale: Vec<f64>,
    col_scale: Vec<f64>,
    cost: Vec<f64>,
    lo: Vec<f64>,
    up: Vec<f64>,
    x: Vec<f64>,
    state: Vec<VarState>,
    head: Vec<usize>,
    inv: BasisInverse,
    updates: usize,
    degenerate_run: usize,
    iterations: usize,
    iteration_limit: usize,
    /// Iteration count at which the current solve gives up.
    stop_at: usize,
    tol: Tolerances,
    w: Vec<f64>,
    y: Vec<f64>,
    cb: Vec<f64>,
}

fn pow2_round(v: f64) -> f64 {
    if !v.is_finite() || v <= 0.0 {
        return 1.0;
    }
    2f64.powi(v.log2().round() as i32)
}

/// Geometric-mean passes followed by an equilibration pass, all factors
/// rounded to powers of two so scaling is exact in floating point.
fn compute_scaling(m: usize, cols: &[Vec<(usize, f64)>]) -> (Vec<f64>, Vec<f64>) {
    let n = cols.len();
    let mut r = vec![1.0; m];
    let mut c = vec![1.0; n];
    for _ in 0..4 {
        let mut rmax = vec![0.0f64; m];
        let mut rmin = vec![f64::INFINITY; m];
        for (j, col) in cols.iter().enumerate() {
            for &(i, a) in col {
                let v = (a * c[j]).abs();
                if v > 0.0 {
                    rmax[i] = rmax[i].max(v);
                    rmin[i] = rmin[i].min(v);
                }
            }
        }
        for i in 0..m {
            if rmax[i] > 0.0 {
                r[i] = 1.0 / (rmax[i] * rmin[i]).sqrt();
            }
        }
        for (j, col) in cols.iter().enumerate() {
            let mut cmax = 0.0f64;
            let mut cmin = f64::INFINITY;
            for &(i, a) in col {
                let v = (a * r[i]).abs();
                if v > 0.0 {
                    cmax = cmax.max(v);
                    cmin = cmin.min(v);
                }
            }
            if cmax > 0.0 {
                c[j] = 1.0 / (cmax * cmin).sqrt();
            }
        }
    }
    let mut rmax = vec![0.0f64; m];
    for (j, col) in cols.iter().enumerate() {
        for &(i, a) in col {
            rmax[i] = rmax[i].max((a * c[j] * r[i]).abs());
        }
    }
    for i in 0..m {
        if rmax[i] > 0.0 {
            r[i] /= rmax[i];
        }
        r[i] = pow2_round(r[i]);
    }
    for (j, col) in cols.iter().enumerate() {
        let cmax = col
            .iter()
            .map(|&(i, a)| (a * r[i] * c[j]).abs())
            .fold(0.0f64, f64::max);
        if cmax > 0.0 {
            c[j] /= cmax;
        }
        c[j] = pow2_round(c[j]);
    }
    (r, c)
}

impl Engine {
    pub fn new(model: &MilpModel, tol: Tolerances) -> Self {
        let n = model.num_vars();
        let m = model.num_constraints();
        let mut raw: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for (i, con) in model.constraints().iter().enumerate() {
            for &(v, a) in &con.terms {
                if a != 0.0 {
                    raw[v.index()].push((i, a));
                }
            }
        }
        // Merge duplicate entries within a column.
        for col in &mut raw {
            col.sort_by_key(|&(i, _)| i);
            let mut merged: Vec<(usize, f64)> = Vec::with_capacity(col.len());
            for &(i, a) in col.iter() {
                match merged.last_mut() {
                    Some(last) if last.0 == i => last.1 += a,
                    _ => merged.push((i, a)),
                }
            }
            merged.retain(|&(_, a)| a != 0.0);
            *col = merged;
        }
        let (row_scale, col_scale) = compute_scaling(m, &raw);
        let cols: Vec<Vec<(usize, f64)>> = raw
            .iter()
            .enumerate()
            .map(|(j, col)| {
                col.iter()
                    .map(|&(i, a)| (i, a * row_scale[i] * col_scale[j]))
                    .collect()
            })
            .collect();

        let sign = match model.objective().sense {
            ObjectiveSense::Minimize => 1.0,
            ObjectiveSense::Maximize => -1.0,
        };
        let c = model.objective_vector();
        let mut cost = vec![0.0; n + m];
        let mut lo = vec![0.0; n + m];
        let mut up = vec![0.0; n + m];
        for (j, var) in model.variables().iter().enumerate() {
            cost[j] = sign * c[j] * col_scale[j];
            lo[j] = var.lower / col_scale[j];
            up[j] = var.upper / col_scale[j];
        }
        for (i, con) in model.constraints().iter().enumerate() {
            let rhs = con.rhs * row_scale[i];
            let (l, u) = match con.sense {
                RowSense::Le => (f64::NEG_INFINITY, rhs),
                RowSense::Ge => (rhs, f64::INFINITY),
                RowSense::Eq => (rhs, rhs),
            };
            lo[n + i] = l;
            up[n + i] = u;
        }

        let mut engine = Self {
            m,
            n,
            cols,
            row_scale,
            col_scale,
            cost,
            lo,
            up,
            x: vec![0.0; n + m],
            state: vec![VarState::AtLower; n + m],
            head: (n..n + m).collect(),
            inv: BasisInverse::negative_identity(m),
            updates: 0,
            degenerate_run: 0,
            iterations: 0,
            iteration_limit: 50_000 + 50 * (n + m),
            stop_at: 50_000 + 50 * (n + m),
            tol,
            w: vec![0.0; m],
            y: vec![0.0; m],
            cb: vec![0.0; m],
        };
        for j in 0..n {
            engine.seat_nonbasic(j, 0.0);
        }
        for i in 0..m {
            engine.state[n + i] = VarState::Basic;
        }
        engine.recompute_basic();
        engine
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    /// Places a nonbasic variable on the bound that suits the sign of its
    /// reduced cost `d` (lower for `d >= 0`), falling back to any finite bound.
    fn seat_nonbasic(&mut self, j: usize, d: f64) {
        let (l, u) = (self.lo[j], self.up[j]);
        let (state, value) = match (l.is_finite(), u.is_finite()) {
            (true, true) => {
                if d < 0.0 && l < u {
                    (VarState::AtUpper, u)
                } else {
                    (VarState::AtLower, l)
                }
            }
            (true, false) => (VarState::AtLower, l),
            (false, true) => (VarState::AtUpper, u),
            (false, false) => (VarState::Free, 0.0),
        };
        self.state[j] = state;
        self.x[j] = value;
    }

    /// Changes the bounds of structural variable `j` (model units).
    pub fn set_bounds(&mut self, j: usize, lower: f64, upper: f64) {
        let s = self.col_scale[j];
        self.lo[j] = lower / s;
        self.up[j] = upper / s;
        match self.state[j] {
            VarState::Basic => {}
            VarState::AtLower if self.lo[j].is_finite() => self.x[j] = self.lo[j],
            VarState::AtUpper if self.up[j].is_finite() => self.x[j] = self.up[j],
            _ => self.seat_nonbasic(j, 0.0),
        }
    }

    fn column(&self, j: usize) -> Vec<(usize, f64)> {
        if j < self.n {
            self.cols[j].clone()
        } else {
            vec![(j - self.n, -1.0)]
        }
    }

    #[inline]
    fn col_dot(&self, j: usize, v: &[f64]) -> f64 {
        if j < self.n {
            self.cols[j].iter().map(|&(i, a)| a * v[i]).sum()
        } else {
            -v[j - self.n]
        }
    }

    fn ftran_var(&mut self, j: usize) {
        if j < self.n {
            self.inv.ftran(&self.cols[j], &mut self.w);
        } else {
            let col = self.inv.col(j - self.n);
            for (o, &b) in self.w.iter_mut().zip(col) {
                *o = -b;
            }
        }
    }

    /// Recomputes basic values from the nonbasic ones: `x_B = -B^{-1} N x_N`.
    fn recompute_basic(&mut self) {
        let mut v = vec![0.0; self.m];
        for j in 0..self.n + self.m {
            if self.state[j] == VarState::Basic || self.x[j] == 0.0 {
                continue;
            }
            let xj = self.x[j];
            if j < self.n {
                for &(i, a) in &self.cols[j] {
                    v[i] += a * xj;
                }
            } else {
                v[j - self.n] -= xj;
            }
        }
        let mut out = vec![0.0; self.m];
        for (i, &vi) in v.iter().enumerate() {
            if vi == 0.0 {
                continue;
            }
            for (o, &b) in out.iter_mut().zip(self.inv.col(i)) {
                *o -= vi * b;
            }
        }
        for (k, &val) in out.iter().enumerate() {
            self.x[self.head[k]] = val;
        }
    }

    /// Fresh inversion of the current basis, swapping dependent columns for
    /// logicals when the basis is singular.
    fn refactor(&mut self) {
        for _ in 0..=self.m {
            let cols: Vec<Vec<(usize, f64)>> = self.head.iter().map(|&j| self.column(j)).collect();
            match BasisInverse::invert(self.m, &cols, SINGULAR_TOL) {
                Inversion::Ok(inv) => {
                    self.inv = inv;
                    self.updates = 0;
                    self.recompute_basic();
                    return;
                }
                Inversion::Singular {
                    positions,
                    free_rows,
                } => {
                    log::debug!("basis repair: replacing {} dependent columns", positions.len());
                    for (&pos, &row) in positions.iter().zip(&free_rows) {
                        let j = self.head[pos];
                        let value = self.x[j];
                        self.seat_nearest(j, value);
                        self.head[pos] = self.n + row;
                        self.state[self.n + row] = VarState::Basic;
                    }
                }
            }
        }
        unreachable!("an all-logical completion is always nonsingular");
    }

    /// Recomputes basic values before declaring optimality; reinverts only
    /// once enough updates have accumulated to matter.
    fn verify(&mut self) {
        if self.updates >= VERIFY_AFTER {
            self.refactor();
        } else {
            self.recompute_basic();
        }
    }

    fn seat_nearest(&mut self, j: usize, value: f64) {
        let (l, u) = (self.lo[j], self.up[j]);
        if l.is_finite() && (!u.is_finite() || (value - l).abs() <= (u - value).abs()) {
            self.state[j] = VarState::AtLower;
            self.x[j] = l;
        } else if u.is_finite() {
            self.state[j] = VarState::AtUpper;
            self.x[j] = u;
        } else {
            self.state[j] = VarState::Free;
            self.x[j] = 0.0;
        }
    }

    fn compute_duals(&mut self, phase1: bool) {
        let feas = self.tol.primal_feasibility;
        for k in 0..self.m {
            let j = self.head[k];
            self.cb[k] = if phase1 {
                if self.x[j] < self.lo[j] - feas {
                    -1.0
                } else if self.x[j] > self.up[j] + feas {
                    1.0
                } else {
                    0.0
                }
            } else {
                self.cost[j]
            };
        }
        self.inv.btran(&self.cb, &mut self.y);
    }

    fn infeasibility(&self, j: usize) -> f64 {
        (self.lo[j] - self.x[j]).max(self.x[j] - self.up[j]).max(0.0)
    }

    fn primal_infeasible(&self) -> bool {
        let feas = self.tol.primal_feasibility;
        self.head.iter().any(|&j| self.infeasibility(j) > feas)
    }

    /// Composite primal simplex: phase 1 minimizes the sum of
    /// infeasibilities, phase 2 the objective, both from the current basis.
    pub fn primal(&mut self) -> LpStatus {
        let tol_d = self.tol.dual_feasibility;
        let mut unbounded_retry = false;
        loop {
            if self.iterations >= self.stop_at {
                return LpStatus::IterationLimit;
            }
            if self.updates >= REFACTOR_INTERVAL {
                self.refactor();
            }
            let phase1 = self.primal_infeasible();
            self.compute_duals(phase1);
            let bland = self.degenerate_run >= BLAND_AFTER;

            let mut entering: Option<(usize, f64)> = None;
            let mut best = 0.0;
            for j in 0..self.n + self.m {
                let st = self.state[j];
                if st == VarState::Basic || self.lo[j] == self.up[j] {
                    continue;
                }
                let c = if phase1 { 0.0 } else { self.cost[j] };
                let d = c - self.col_dot(j, &self.y);
                let dir = match st {
                    VarState::AtLower if d < -tol_d => 1.0,
                    VarState::AtUpper if d > tol_d => -1.0,
                    VarState::Free if d.abs() > tol_d => -d.signum(),
                    _ => continue,
                };
                if bland {
                    entering = Some((j, dir));
                    break;
                }
                if d.abs() > best {
                    best = d.abs();
                    entering = Some((j, dir));
                }
            }

            let Some((q, dir)) = entering else {
                if self.updates > 0 {
                    self.verify();
                    if self.primal_infeasible() != phase1 {
                        continue;
                    }
                    self.compute_duals(phase1);
                    if self.has_improving(phase1) {
                        continue;
                    }
                }
                return if phase1 {
                    LpStatus::Infeasible
                } else {
                    LpStatus::Optimal
                };
            };

            self.ftran_var(q);
            match self.ratio_test(q, dir, phase1, bland) {
                Step::Unbounded => {
                    if self.updates > 0 && !unbounded_retry {
                        unbounded_retry = true;
                        self.refactor();
                        continue;
                    }
                    return if phase1 {
                        LpStatus::NumericalFailure
                    } else {
                        LpStatus::Unbounded
                    };
                }
                Step::Flip(range) => {
                    for k in 0..self.m {
                        let wk = self.w[k];
                        if wk != 0.0 {
                            self.x[self.head[k]] -= dir * range * wk;
                        }
                    }
                    if dir > 0.0 {
                        self.state[q] = VarState::AtUpper;
                        self.x[q] = self.up[q];
                    } else {
                        self.state[q] = VarState::AtLower;
                        self.x[q] = self.lo[q];
                    }
                    self.degenerate_run = 0;
                }
                Step::Pivot { row, t, to_upper } => {
                    for k in 0..self.m {
                        let wk = self.w[k];
                        if wk != 0.0 {
                            self.x[self.head[k]] -= dir * t * wk;
                        }
                    }
                    self.x[q] += dir * t;
                    let leaving = self.head[row];
                    if to_upper {
                        self.state[leaving] = VarState::AtUpper;
                        self.x[leaving] = self.up[leaving];
                    } else {
                        self.state[leaving] = VarState::AtLower;
                        self.x[leaving] = self.lo[leaving];
                    }
                    self.head[row] = q;
                    self.state[q] = VarState::Basic;
                    self.inv.update(row, &self.w);
                    self.updates += 1;
                    if t <= ZERO_STEP {
                        self.degenerate_run += 1;
                    } else {
                        self.degenerate_run = 0;
                    }
                }
            }
            unbounded_retry = false;
            self.iterations += 1;
        }
    }

    fn has_improving(&self, phase1: bool) -> bool {
        let tol_d = self.tol.dual_feasibility;
        (0..self.n + self.m).any(|j| {
            if self.state[j] == VarState::Basic || self.lo[j] == self.up[j] {
                return false;
            }
            let c = if phase1 { 0.0 } else { self.cost[j] };
            let d = c - self.col_dot(j, &self.y);
            match self.state[j] {
                VarState::AtLower => d < -tol_d,
                VarState::AtUpper => d > tol_d,
                VarState::Free => d.abs() > tol_d,
                VarState::Basic => false,
            }
        })
    }

    /// Two-pass Harris ratio test (plain minimum ratio in Bland mode).
    fn ratio_test(&self, q: usize, dir: f64, phase1: bool, bland: bool) -> Step {
        let feas = self.tol.primal_feasibility;
        let piv = self.tol.pivot;
        let mut theta_max = f64::INFINITY;
        // (position, exact ratio, |w|, leaves at upper)
        let mut cands: Vec<(usize, f64, f64, bool)> = Vec::new();
        for k in 0..self.m {
            let wk = self.w[k];
            if wk.abs() <= piv {
                continue;
            }
            let rate = -dir * wk;
            let j = self.head[k];
            let (x, l, u) = (self.x[j], self.lo[j], self.up[j]);
            let a = rate.abs();
            let (exact, relaxed, to_upper) = if rate < 0.0 {
                if phase1 && x > u + feas {
                    ((x - u) / a, (x - u + feas) / a, true)
                } else if x < l - feas || !l.is_finite() {
                    continue;
                } else {
                    ((x - l).max(0.0) / a, (x - l + feas) / a, false)
                }
            } else if phase1 && x < l - feas {
                ((l - x) / a, (l - x + feas) / a, false)
            } else if x > u + feas || !u.is_finite() {
                continue;
            } else {
                ((u - x).max(0.0) / a, (u - x + feas) / a, true)
            };
            theta_max = theta_max.min(relaxed);
            cands.push((k, exact, a, to_upper));
        }
        let range = self.up[q] - self.lo[q];
        if cands.is_empty() {
            return if range.is_finite() {
                Step::Flip(range)
            } else {
                Step::Unbounded
            };
        }
        if bland {
            let min_ratio = cands.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
            if range.is_finite() && range <= min_ratio {
                return Step::Flip(range);
            }
            let pick = cands
                .iter()
                .filter(|c| c.1 <= min_ratio)
                .min_by_key(|c| self.head[c.0])
                .expect("non-empty candidate set");
            return Step::Pivot {
                row: pick.0,
                t: pick.1,
                to_upper: pick.3,
            };
        }
        if range.is_finite() && range <= theta_max {
            return Step::Flip(range);
        }
        let mut pick: Option<&(usize, f64, f64, bool)> = None;
        for c in &cands {
            if c.1 <= theta_max && pick.is_none_or(|p| c.2 > p.2) {
                pick = Some(c);
            }
        }
        let pick = pick.expect("Harris pass one admits at least one candidate");
        Step::Pivot {
            row: pick.0,
            t: pick.1,
            to_upper: pick.3,
        }
    }

    /// Flips boxed nonbasics to the bound their reduced cost prefers.
    /// Returns false when some unboxed nonbasic is dual infeasible.
    fn make_dual_feasible(&mut self) -> bool {
        let tol_d = self.tol.dual_feasibility;
        self.compute_duals(false);
        let mut ok = true;
        let mut flipped = false;
        for j in 0..self.n + self.m {
            let st = self.state[j];
            if st == VarState::Basic || self.lo[j] == self.up[j] {
                continue;
            }
            let d = self.cost[j] - self.col_dot(j, &self.y);
            match st {
                VarState::AtLower if d < -tol_d => {
                    if self.up[j].is_finite() {
                        self.state[j] = VarState::AtUpper;
                        self.x[j] = self.up[j];
                        flipped = true;
                    } else {
                        ok = false;
                    }
                }
                VarState::AtUpper if d > tol_d => {
                    if self.lo[j].is_finite() {
                        self.state[j] = VarState::AtLower;
                        self.x[j] = self.lo[j];
                        flipped = true;
                    } else {
                        ok = false;
                    }
                }
                VarState::Free if d.abs() > tol_d => ok = false,
                _ => {}
            }
        }
        if flipped {
            self.recompute_basic();
        }
        ok
    }

    /// Solves from the current basis: dual simplex when the basis is (or can
    /// be flipped to) dual feasible, primal simplex otherwise.
    pub fn solve(&mut self) -> LpStatus {
        self.stop_at = self.iterations + self.iteration_limit;
        self.degenerate_run = 0;
        self.recompute_basic();
        if self.make_dual_feasible() {
            self.dual()
        } else {
            self.primal()
        }
    }

    /// Dual simplex on a dual feasible basis; hands over to the primal
    /// simplex once primal feasible (which then only verifies optimality).
    fn dual(&mut self) -> LpStatus {
        let tol_d = self.tol.dual_feasibility;
        let feas = self.tol.primal_feasibility;
        let piv = self.tol.pivot;
        let mut rho = vec![0.0; self.m];
        let mut alpha = vec![0.0; self.n + self.m];
        loop {
            if self.iterations >= self.stop_at {
                return LpStatus::IterationLimit;
            }
            if self.updates >= REFACTOR_INTERVAL {
                self.refactor();
            }
            let bland = self.degenerate_run >= BLAND_AFTER;
            let mut leave: Option<usize> = None;
            let mut worst = feas;
            for k in 0..self.m {
                let inf = self.infeasibility(self.head[k]);
                if bland {
                    if inf > feas && leave.is_none_or(|l| self.head[k] < self.head[l]) {
                        leave = Some(k);
                    }
                } else if inf > worst {
                    worst = inf;
                    leave = Some(k);
                }
            }
            let Some(r) = leave else {
                if self.updates > 0 {
                    self.verify();
                    if self.primal_infeasible() {
                        continue;
                    }
                }
                return self.primal();
            };
            let jr = self.head[r];
            let increase = self.x[jr] < self.lo[jr];
            let target = if increase { self.lo[jr] } else { self.up[jr] };

            self.compute_duals(false);
            self.inv.row(r, &mut rho);
            let mut theta_max = f64::INFINITY;
            let mut cands: Vec<(usize, f64, f64)> = Vec::new();
            for j in 0..self.n + self.m {
                let st = self.state[j];
                if st == VarState::Basic || self.lo[j] == self.up[j] {
                    continue;
                }
                let a = self.col_dot(j, &rho);
                alpha[j] = a;
                if a.abs() <= piv {
                    continue;
                }
                let eligible = match st {
                    VarState::AtLower => (a < 0.0) == increase,
                    VarState::AtUpper => (a > 0.0) == increase,
                    VarState::Free => true,
                    VarState::Basic => false,
                };
                if !eligible {
                    continue;
                }
                let d = self.cost[j] - self.col_dot(j, &self.y);
                let dj = match st {
                    VarState::AtLower => d.max(0.0),
                    VarState::AtUpper => (-d).max(0.0),
                    _ => d.abs(),
                };
                theta_max = theta_max.min((dj + tol_d) / a.abs());
                cands.push((j, dj / a.abs(), a.abs()));
            }
            if cands.is_empty() {
                if self.updates > 0 {
                    self.refactor();
                    continue;
                }
                return LpStatus::Infeasible;
            }
            let mut pick: Option<(usize, f64, f64)> = None;
            if bland {
                let min_ratio = cands.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
                pick = cands.iter().copied().filter(|c| c.1 <= min_ratio).min_by_key(|c| c.0);
            } else {
                for &c in &cands {
                    if c.1 <= theta_max && pick.is_none_or(|p| c.2 > p.2) {
                        pick = Some(c);
                    }
                }
            }
            let (q, step, _) = pick.expect("Harris pass one admits at least one candidate");
            if step <= ZERO_STEP {
                self.degenerate_run += 1;
            } else {
                self.degenerate_run = 0;
            }

            self.ftran_var(q);
            let wr = self.w[r];
            if (wr - alpha[q]).abs() > 1e-7 * (1.0 + alpha[q].abs()) && self.updates > 0 {
                self.refactor();
                continue;
            }
            if wr.abs() <= piv {
                return LpStatus::NumericalFailure;
            }
            let delta = (self.x[jr] - target) / wr;
            for k in 0..self.m {
                let wk = self.w[k];
                if wk != 0.0 {
                    self.x[self.head[k]] -= delta * wk;
                }
            }
            self.x[q] += delta;
            self.x[jr] = target;
            self.state[jr] = if increase {
                VarState::AtLower
            } else {
                VarState::AtUpper
            };
            self.head[r] = q;
            self.state[q] = VarState::Basic;
            self.inv.update(r, &self.w);
            self.updates += 1;
            self.iterations += 1;
        }
    }

    /// Objective in the internal minimization sense, without the constant.
    pub fn objective(&self) -> f64 {
        (0..self.n).map(|j| self.cost[j] * self.x[j]).sum()
    }

    /// Structural values in model units.
    pub fn values(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.x[j] * self.col_scale[j]).collect()
    }

    pub fn value(&self, j: usize) -> f64 {
        self.x[j] * self.col_scale[j]
    }

    /// Row duals and structural reduced costs in model units, for the
    /// internal minimization sense.
    pub fn duals_and_reduced_costs(&mut self) -> (Vec<f64>, Vec<f64>) {
        self.compute_duals(false);
        let duals = (0..self.m).map(|i| self.y[i] * self.row_scale[i]).collect();
        let rc = (0..self.n)
            .map(|j| {
                if self.state[j] == VarState::Basic {
                    0.0
                } else {
                    (self.cost[j] - self.col_dot(j, &self.y)) / self.col_scale[j]
                }
            })
            .collect();
        (duals, rc)
    }

}
