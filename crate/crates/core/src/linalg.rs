//! Minimal dense linear algebra over `f64`.

use std::fmt;

use crate::error::{Error, Result};

/// Relative pivot tolerance for [`null_vector`].
pub const PIVOT_TOLERANCE: f64 = 1e-10;

/// Square row-major matrix with finite entries.
#[derive(Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        debug_assert!(data.iter().all(|v| v.is_finite()));
        Self { n, data }
    }

    /// Builds a matrix from rows, rejecting ragged input and non-finite entries.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        if let Some(index) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { n, data })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub(crate) fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.n + j] = value;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.n.max(1)).take(self.n)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self.get(j, i))
    }

    /// Maximum absolute row sum.
    pub fn inf_norm(&self) -> f64 {
        self.rows()
            .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        check_dim(self.n, other.n)?;
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.get(k, j);
                }
            }
        }
        Ok(out)
    }

    pub fn row_sums(&self) -> Vec<f64> {
        self.rows().map(|r| r.iter().sum()).collect()
    }
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.rows()).finish()
    }
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

/// `M x`, summing each row in ascending column order.
pub fn matvec(m: &DenseMatrix, x: &[f64]) -> Result<Vec<f64>> {
    check_dim(m.dim(), x.len())?;
    Ok(m.rows()
        .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
        .collect())
}

pub fn l1_norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v.abs()).sum()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Spans the null space of a rank `n - 1` matrix.
///
/// Gaussian elimination with partial pivoting reduces `m` to echelon form.
/// A column whose best available pivot is at most `1e-10 * ||m||_inf` is
/// free; exactly one free column is required. The free variable is set to
/// one, the rest follow by back substitution, and the result is scaled to
/// unit l1 norm with its first nonzero entry positive.
pub fn null_vector(m: &DenseMatrix) -> Result<Vec<f64>> {
    let n = m.dim();
    if n == 0 {
        return Err(Error::RankDeficiency { free: 0 });
    }
    let scale = m.inf_norm();
    let tolerance = PIVOT_TOLERANCE * scale;
    let mut a = m.clone();

    // pivot_rows[c] = Some(row) for pivot columns.
    let mut pivot_rows: Vec<Option<usize>> = vec![None; n];
    let mut free = Vec::new();
    let mut next_row = 0;
    for col in 0..n {
        let best = (next_row..n).max_by(|&r, &s| a.get(r, col).abs().total_cmp(&a.get(s, col).abs()));
        let Some(best) = best.filter(|&r| a.get(r, col).abs() > tolerance) else {
            free.push(col);
            continue;
        };
        if best != next_row {
            for j in 0..n {
                let (x, y) = (a.get(best, j), a.get(next_row, j));
                a.set(best, j, y);
                a.set(next_row, j, x);
            }
        }
        let pivot = a.get(next_row, col);
        for r in next_row + 1..n {
            let factor = a.get(r, col) / pivot;
            if factor == 0.0 {
                continue;
            }
            a.set(r, col, 0.0);
            for j in col + 1..n {
                let v = a.get(r, j) - factor * a.get(next_row, j);
                a.set(r, j, v);
            }
        }
        pivot_rows[col] = Some(next_row);
        next_row += 1;
    }

    if free.len() != 1 {
        return Err(Error::RankDeficiency { free: free.len() });
    }

    let mut v = vec![0.0; n];
    v[free[0]] = 1.0;
    for col in (0..n).rev() {
        let Some(row) = pivot_rows[col] else { continue };
        let tail: f64 = (col + 1..n).map(|j| a.get(row, j) * v[j]).sum();
        v[col] = -tail / a.get(row, col);
    }

    let norm = l1_norm(&v);
    let sign = match v.iter().find(|x| **x != 0.0) {
        Some(first) if *first < 0.0 => -1.0,
        _ => 1.0,
    };
    for x in &mut v {
        *x *= sign / norm;
    }

    let residual = matvec(m, &v)?.iter().fold(0.0f64, |acc, r| acc.max(r.abs()));
    let v_max = v.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    let bound = PIVOT_TOLERANCE * scale * v_max;
    if residual > bound {
        return Err(Error::NullResidual {
            residual,
            tolerance: bound,
        });
    }
    Ok(v)
}

/// Outcome of [`power_iteration`].
#[derive(Debug, Clone, PartialEq)]
pub struct PowerIteration {
    /// Rayleigh quotient `x^T M x / x^T x` at the final iterate.
    pub eigenvalue: f64,
    /// Final iterate, scaled to unit l1 norm.
    pub eigenvector: Vec<f64>,
    pub iterations: usize,
    /// False when `max_iter` was reached before the iterates settled.
    pub converged: bool,
}

/// Power iteration with l1 normalization.
///
/// Stops once successive normalized iterates are closer than `tol` in the
/// l1 norm. Running out of iterations is reported through
/// [`PowerIteration::converged`], not as an error.
pub fn power_iteration(
    m: &DenseMatrix,
    x0: &[f64],
    max_iter: usize,
    tol: f64,
) -> Result<PowerIteration> {
    check_dim(m.dim(), x0.len())?;
    let norm0 = l1_norm(x0);
    if norm0 == 0.0 || !norm0.is_finite() {
        return Err(Error::InvalidOption(
            "power iteration needs a nonzero finite start vector".into(),
        ));
    }
    let mut x: Vec<f64> = x0.iter().map(|v| v / norm0).collect();
    let mut converged = false;
    let mut iterations = 0;
    while iterations < max_iter {
        let mut y = matvec(m, &x)?;
        iterations += 1;
        let norm = l1_norm(&y);
        if norm == 0.0 {
            // Landed in the null space; nothing left to iterate.
            break;
        }
        for v in &mut y {
            *v /= norm;
        }
        let step: f64 = x.iter().zip(&y).map(|(a, b)| (a - b).abs()).sum();
        x = y;
        if step < tol {
            converged = true;
            break;
        }
    }
    let mx = matvec(m, &x)?;
    let eigenvalue = dot(&x, &mx) / dot(&x, &x);
    Ok(PowerIteration {
        eigenvalue,
        eigenvector: x,
        iterations,
        converged,
    })
}
