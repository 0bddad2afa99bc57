//! Dense explicit basis inverse with product-form rank-one updates.

/// `B^{-1}` stored column-major: `col(i)[k]` is entry (k, i), where k is a
/// basis position and i a constraint row.
#[derive(Debug, Clone)]
pub(crate) struct BasisInverse {
    m: usize,
    data: Vec<f64>,
}

/// Outcome of a reinversion attempt.
pub(crate) enum Inversion {
    Ok(BasisInverse),
    /// Basis positions whose columns were linearly dependent, together with
    /// rows left without a pivot. Both lists have the same length.
    Singular {
        positions: Vec<usize>,
        free_rows: Vec<usize>,
    },
}

impl BasisInverse {
    /// Inverse of `-I`, the all-logical starting basis.
    pub fn negative_identity(m: usize) -> Self {
        let mut data = vec![0.0; m * m];
        for i in 0..m {
            data[i * m + i] = -1.0;
        }
        Self { m, data }
    }

    #[inline]
    pub fn col(&self, i: usize) -> &[f64] {
        &self.data[i * self.m..(i + 1) * self.m]
    }

    /// `w = B^{-1} a` for a sparse column `a`.
    pub fn ftran(&self, column: &[(usize, f64)], out: &mut [f64]) {
        out.fill(0.0);
        for &(i, a) in column {
            if a == 0.0 {
                continue;
            }
            for (o, &b) in out.iter_mut().zip(self.col(i)) {
                *o += a * b;
            }
        }
    }

    /// `y^T = c_B^T B^{-1}`.
    pub fn btran(&self, cb: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = dot(cb, self.col(i));
        }
    }

    /// Row `r` of `B^{-1}`.
    pub fn row(&self, r: usize, out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.data[i * self.m + r];
        }
    }

    /// Replace the column at basis position `r` by one whose ftran is `w`.
    pub fn update(&mut self, r: usize, w: &[f64]) {
        let m = self.m;
        let wr = w[r];
        for i in 0..m {
            let col = &mut self.data[i * m..(i + 1) * m];
            let p = col[r] / wr;
            if p == 0.0 {
                continue;
            }
            for (k, c) in col.iter_mut().enumerate() {
                if k != r {
                    let wk = w[k];
                    if wk != 0.0 {
                        *c -= wk * p;
                    }
                }
            }
            col[r] = p;
        }
    }

    /// Gauss-Jordan inversion of the basis whose position k holds `cols[k]`.
    pub fn invert(m: usize, cols: &[Vec<(usize, f64)>], pivot_tol: f64) -> Inversion {
        // Work on rows of [B | I] stored densely.
        let mut b = vec![0.0; m * m];
        for (k, col) in cols.iter().enumerate() {
            for &(i, v) in col {
                b[i * m + k] += v;
            }
        }
        let mut aug = vec![0.0; m * m];
        for i in 0..m {
            aug[i * m + i] = 1.0;
        }
        let mut pivot_row = vec![usize::MAX; m];
        let mut row_used = vec![false; m];
        let mut dependent = Vec::new();

        // Singleton (logical-like) columns first keeps fill-in low.
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by_key(|&k| (cols[k].len(), k));

        let mut scratch_b = vec![0.0; m];
        let mut scratch_a = vec![0.0; m];
        for &k in &order {
            let mut best = usize::MAX;
            let mut best_abs = 0.0;
            for i in 0..m {
                if row_used[i] {
                    continue;
                }
                let v = b[i * m + k].abs();
                if v > best_abs {
                    best_abs = v;
                    best = i;
                }
            }
            if best == usize::MAX || best_abs <= pivot_tol {
                dependent.push(k);
                continue;
            }
            let p = best;
            row_used[p] = true;
            pivot_row[k] = p;
            let inv_piv = 1.0 / b[p * m + k];
            for v in &mut b[p * m..(p + 1) * m] {
                *v *= inv_piv;
            }
            for v in &mut aug[p * m..(p + 1) * m] {
                *v *= inv_piv;
            }
            scratch_b.copy_from_slice(&b[p * m..(p + 1) * m]);
            scratch_a.copy_from_slice(&aug[p * m..(p + 1) * m]);
            let nz_b: Vec<usize> = (0..m).filter(|&j| scratch_b[j] != 0.0).collect();
            let nz_a: Vec<usize> = (0..m).filter(|&j| scratch_a[j] != 0.0).collect();
            for i in 0..m {
                if i == p {
                    continue;
                }
                let f = b[i * m + k];
                if f == 0.0 {
                    continue;
                }
                let row_b = &mut b[i * m..(i + 1) * m];
                for &j in &nz_b {
                    row_b[j] -= f * scratch_b[j];
                }
                row_b[k] = 0.0;
                let row_a = &mut aug[i * m..(i + 1) * m];
                for &j in &nz_a {
                    row_a[j] -= f * scratch_a[j];
                }
            }
        }

        if !dependent.is_empty() {
            let free_rows: Vec<usize> = (0..m).filter(|&i| !row_used[i]).collect();
            return Inversion::Singular {
                positions: dependent,
                free_rows,
            };
        }

        // Row k of B^{-1} is row pivot_row[k] of the reduced augmented block.
        let mut data = vec![0.0; m * m];
        for k in 0..m {
            let p = pivot_row[k];
            for i in 0..m {
                data[i * m + k] = aug[p * m + i];
            }
        }
        Inversion::Ok(Self { m, data })
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense_mul(m: usize, cols: &[Vec<(usize, f64)>], inv: &BasisInverse) -> Vec<f64> {
        // Returns B^{-1} B in row-major order.
        let mut out = vec![0.0; m * m];
        let mut w = vec![0.0; m];
        for (k, col) in cols.iter().enumerate() {
            inv.ftran(col, &mut w);
            for r in 0..m {
                out[r * m + k] = w[r];
            }
        }
        out
    }

    #[test]
    fn inversion_and_update_give_identity() {
        let cols = vec![
            vec![(0, 2.0), (1, 1.0)],
            vec![(1, 3.0), (2, -1.0)],
            vec![(0, 1.0), (2, 4.0)],
        ];
        let inv = match BasisInverse::invert(3, &cols, 1e-12) {
            Inversion::Ok(inv) => inv,
            Inversion::Singular { .. } => panic!("nonsingular basis reported singular"),
        };
        let prod = dense_mul(3, &cols, &inv);
        for r in 0..3 {
            for c in 0..3 {
                let want = if r == c { 1.0 } else { 0.0 };
                assert!((prod[r * 3 + c] - want).abs() < 1e-12);
            }
        }

        let mut inv = inv;
        let mut cols = cols;
        let new_col = vec![(0, 1.0), (1, 1.0), (2, 1.0)];
        let mut w = vec![0.0; 3];
        inv.ftran(&new_col, &mut w);
        inv.update(1, &w);
        cols[1] = new_col;
        let prod = dense_mul(3, &cols, &inv);
        for r in 0..3 {
            for c in 0..3 {
                let want = if r == c { 1.0 } else { 0.0 };
                assert!((prod[r * 3 + c] - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn dependent_columns_are_reported() {
        let cols = vec![vec![(0, 1.0), (1, 1.0)], vec![(0, 2.0), (1, 2.0)]];
        match BasisInverse::invert(2, &cols, 1e-12) {
            Inversion::Ok(_) => panic!("singular basis accepted"),
            Inversion::Singular {
                positions,
                free_rows,
            } => {
                assert_eq!(positions.len(), 1);
                assert_eq!(free_rows.len(), 1);
            }
        }
    }
}
