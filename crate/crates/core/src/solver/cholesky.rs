//! Up-looking sparse Cholesky factorization `P A P^T = L L^T`.

use super::{fill_reducing_order, CsrMatrix, SolverError};

/// Pivots at or below this fraction of the largest diagonal entry are rejected.
pub const PIVOT_TOL: f64 = 1e-13;

const NONE: usize = usize::MAX;

#[derive(Debug, Clone)]
pub struct CholeskyFactor {
    n: usize,
    /// `perm[k]` is the original index placed at position `k`.
    perm: Vec<usize>,
    /// Compressed columns of `L`, diagonal entry first in each column.
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    values: Vec<f64>,
}

/// Lower-triangular rows of `P A P^T`: for each new row `k`, entries `(j, v)` with `j <= k`.
fn permuted_lower_rows(a: &CsrMatrix, pinv: &[usize]) -> Vec<Vec<(usize, f64)>> {
    let n = a.n_rows();
    let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for i in 0..n {
        let pi = pinv[i];
        for (j, v) in a.row(i) {
            let pj = pinv[j];
            if pj <= pi {
                rows[pi].push((pj, v));
            }
        }
    }
    for r in &mut rows {
        r.sort_unstable_by_key(|e| e.0);
    }
    rows
}

fn elimination_tree(rows: &[Vec<(usize, f64)>]) -> Vec<usize> {
    let n = rows.len();
    let mut parent = vec![NONE; n];
    let mut ancestor = vec![NONE; n];
    for k in 0..n {
        for &(i, _) in &rows[k] {
            let mut i = i;
            while i != NONE && i < k {
                let next = ancestor[i];
                ancestor[i] = k;
                if next == NONE {
                    parent[i] = k;
                }
                i = next;
            }
        }
    }
    parent
}

/// Nonzero pattern of row `k` of `L` (excluding the diagonal), in topological order.
fn ereach(
    k: usize,
    row: &[(usize, f64)],
    parent: &[usize],
    mark: &mut [usize],
    stack: &mut Vec<usize>,
    path: &mut Vec<usize>,
) {
    stack.clear();
    mark[k] = k;
    for &(i, _) in row {
        let mut i = i;
        if i >= k {
            continue;
        }
        path.clear();
        while mark[i] != k {
            path.push(i);
            mark[i] = k;
            i = parent[i];
        }
        while let Some(v) = path.pop() {
            stack.push(v);
        }
    }
    // `stack` holds reversed path segments; reverse so ancestors follow descendants.
    stack.reverse();
}

impl CholeskyFactor {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    /// Entry `L[i][j]` of the factor of the permuted matrix.
    pub fn l_entry(&self, i: usize, j: usize) -> f64 {
        (self.col_ptr[j]..self.col_ptr[j + 1])
            .find(|&p| self.row_idx[p] == i)
            .map_or(0.0, |p| self.values[p])
    }

    /// Solves `A x = b` in place.
    pub fn solve_in_place(&self, b: &mut [f64]) -> Result<(), SolverError> {
        if b.len() != self.n {
            return Err(SolverError::DimensionMismatch { expected: self.n, got: b.len() });
        }
        let mut y: Vec<f64> = self.perm.iter().map(|&i| b[i]).collect();
        for j in 0..self.n {
            let p0 = self.col_ptr[j];
            y[j] /= self.values[p0];
            let yj = y[j];
            for p in p0 + 1..self.col_ptr[j + 1] {
                y[self.row_idx[p]] -= self.values[p] * yj;
            }
        }
        for j in (0..self.n).rev() {
            let p0 = self.col_ptr[j];
            let mut s = y[j];
            for p in p0 + 1..self.col_ptr[j + 1] {
                s -= self.values[p] * y[self.row_idx[p]];
            }
            y[j] = s / self.values[p0];
        }
        for (k, &i) in self.perm.iter().enumerate() {
            b[i] = y[k];
        }
        Ok(())
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>, SolverError> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x)?;
        Ok(x)
    }
}

/// Factors a symmetric positive definite matrix with a fill-reducing ordering.
pub fn factorize_spd(a: &CsrMatrix) -> Result<CholeskyFactor, SolverError> {
    let perm = fill_reducing_order(a);
    factorize_with_order(a, perm)
}

pub fn factorize_with_order(a: &CsrMatrix, perm: Vec<usize>) -> Result<CholeskyFactor, SolverError> {
    if a.n_rows() != a.n_cols() {
        return Err(SolverError::NotSquare { rows: a.n_rows(), cols: a.n_cols() });
    }
    let n = a.n_rows();
    let mut pinv = vec![0; n];
    for (k, &i) in perm.iter().enumerate() {
        pinv[i] = k;
    }
    let rows = permuted_lower_rows(a, &pinv);
    let parent = elimination_tree(&rows);
    let max_diag = a.diagonal().iter().fold(0.0f64, |m, &d| m.max(d.abs()));
    let threshold = PIVOT_TOL * max_diag;

    let mut mark = vec![NONE; n];
    let mut stack = Vec::new();
    let mut path = Vec::new();

    // Column counts from the row patterns.
    let mut counts = vec![1usize; n];
    for k in 0..n {
        ereach(k, &rows[k], &parent, &mut mark, &mut stack, &mut path);
        for &j in &stack {
            counts[j] += 1;
        }
    }
    let mut col_ptr = vec![0usize; n + 1];
    for j in 0..n {
        col_ptr[j + 1] = col_ptr[j] + counts[j];
    }
    let nnz = col_ptr[n];
    let mut row_idx = vec![0usize; nnz];
    let mut values = vec![0.0; nnz];
    let mut next: Vec<usize> = col_ptr[..n].to_vec();

    mark.fill(NONE);
    let mut x = vec![0.0; n];
    for k in 0..n {
        ereach(k, &rows[k], &parent, &mut mark, &mut stack, &mut path);
        let mut d = 0.0;
        for &(i, v) in &rows[k] {
            if i == k {
                d += v;
            } else {
                x[i] += v;
            }
        }
        for &j in &stack {
            let lkj = x[j] / values[col_ptr[j]];
            x[j] = 0.0;
            for p in col_ptr[j] + 1..next[j] {
                x[row_idx[p]] -= values[p] * lkj;
            }
            d -= lkj * lkj;
            row_idx[next[j]] = k;
            values[next[j]] = lkj;
            next[j] += 1;
        }
        if !(d > threshold) {
            return Err(SolverError::NotPositiveDefinite { index: perm[k], pivot: d });
        }
        row_idx[col_ptr[k]] = k;
        values[col_ptr[k]] = d.sqrt();
        next[k] = col_ptr[k] + 1;
    }
    Ok(CholeskyFactor { n, perm, col_ptr, row_idx, values })
}

/// Solves with an existing factor.
pub fn solve_factored(f: &CholeskyFactor, b: &[f64]) -> Result<Vec<f64>, SolverError> {
    f.solve(b)
}
