//! Small dense linear algebra for `d x d` symmetric systems.
//!
//! Dimensions in this crate are tiny (a handful of venues), so everything is
//! a flat row-major `Vec<f64>` with straightforward loops.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm2(a: &[f64]) -> f64 {
    math::sqrt(dot(a, a))
}

/// Dense symmetric matrix, stored in full.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        m.add_diagonal(1.0);
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// `self += w * a a^T`
    pub fn add_outer(&mut self, a: &[f64], w: f64) {
        debug_assert_eq!(a.len(), self.n);
        for i in 0..self.n {
            let wi = w * a[i];
            if wi == 0.0 {
                continue;
            }
            let row = &mut self.data[i * self.n..(i + 1) * self.n];
            for (r, aj) in row.iter_mut().zip(a) {
                *r += wi * aj;
            }
        }
    }

    pub fn add_diagonal(&mut self, c: f64) {
        for i in 0..self.n {
            self.data[i * self.n + i] += c;
        }
    }

    pub fn scale(&mut self, c: f64) {
        self.data.iter_mut().for_each(|x| *x *= c);
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| dot(&self.data[i * self.n..(i + 1) * self.n], x))
            .collect()
    }

    /// Largest absolute asymmetry `|m_ij - m_ji|`.
    pub fn asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for j in 0..i {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    pub fn cholesky(&self) -> Result<Cholesky> {
        Cholesky::factor(self)
    }
}

/// Lower-triangular factor `L` with `M = L L^T`.
#[derive(Debug, Clone)]
pub struct Cholesky {
    n: usize,
    l: Vec<f64>,
}

impl Cholesky {
    /// Fails with [`Error::Singular`] when a pivot is not safely positive.
    pub fn factor(m: &SymMatrix) -> Result<Self> {
        let n = m.n;
        let mut l = vec![0.0; n * n];
        let scale = (0..n).map(|i| m.get(i, i).abs()).fold(0.0f64, f64::max);
        let tiny = f64::EPSILON * scale.max(f64::MIN_POSITIVE) * n as f64;
        for j in 0..n {
            let mut diag = m.get(j, j);
            for k in 0..j {
                diag -= l[j * n + k] * l[j * n + k];
            }
            if !(diag > tiny) {
                return Err(Error::Singular);
            }
            let ljj = math::sqrt(diag);
            l[j * n + j] = ljj;
            for i in j + 1..n {
                let mut s = m.get(i, j);
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k];
                }
                l[i * n + j] = s / ljj;
            }
        }
        Ok(Self { n, l })
    }

    /// Solves `L y = b` in place.
    fn forward(&self, b: &mut [f64]) {
        let n = self.n;
        for i in 0..n {
            let row = &self.l[i * n..i * n + i];
            let s = b[i] - row.iter().zip(&b[..i]).map(|(l, x)| l * x).sum::<f64>();
            b[i] = s / self.l[i * n + i];
        }
    }

    /// Solves `L^T x = y` in place.
    fn backward(&self, b: &mut [f64]) {
        let n = self.n;
        for i in (0..n).rev() {
            let s = b[i] - (i + 1..n).map(|k| self.l[k * n + i] * b[k]).sum::<f64>();
            b[i] = s / self.l[i * n + i];
        }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.forward(&mut x);
        self.backward(&mut x);
        x
    }

    /// `a^T M^{-1} a`, computed as `|L^{-1} a|^2`.
    pub fn inv_quad_form(&self, a: &[f64]) -> f64 {
        let mut y = a.to_vec();
        self.forward(&mut y);
        dot(&y, &y)
    }

    pub fn log_det(&self) -> f64 {
        (0..self.n).map(|i| 2.0 * math::ln(self.l[i * self.n + i])).sum()
    }

    /// Same as [`inv_quad_form`](Self::inv_quad_form) with caller-provided scratch.
    pub fn inv_quad_form_with(&self, a: &[f64], scratch: &mut [f64]) -> f64 {
        scratch.copy_from_slice(a);
        self.forward(scratch);
        dot(scratch, scratch)
    }
}

/// Result of a greedy pivoted Gram-Schmidt pass over a set of vectors.
#[derive(Debug, Clone)]
pub struct PivotedBasis {
    /// Indices of the chosen linearly independent vectors, in pivot order.
    pub pivots: Vec<usize>,
    /// Orthonormal basis of their span, one vector per pivot.
    pub basis: Vec<Vec<f64>>,
}

impl PivotedBasis {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

/// Rank-revealing selection: repeatedly picks the vector with the largest
/// residual norm after projecting out the span chosen so far (lowest index
/// on ties). Residuals below `rel_tol * max_norm` count as zero.
pub fn pivoted_basis<'a, I>(vectors: I, dim: usize, rel_tol: f64) -> PivotedBasis
where
    I: IntoIterator<Item = &'a [f64]>,
{
    let mut residuals: Vec<Vec<f64>> = vectors.into_iter().map(|v| v.to_vec()).collect();
    let max_norm = residuals.iter().map(|r| norm2(r)).fold(0.0f64, f64::max);
    let mut pivots = Vec::new();
    let mut basis: Vec<Vec<f64>> = Vec::new();
    if max_norm == 0.0 {
        return PivotedBasis { pivots, basis };
    }
    let threshold = rel_tol * max_norm;
    let mut used = vec![false; residuals.len()];
    while basis.len() < dim {
        let mut best: Option<(usize, f64)> = None;
        for (i, r) in residuals.iter().enumerate() {
            if used[i] {
                continue;
            }
            let nr = norm2(r);
            if best.is_none_or(|(_, b)| nr > b) {
                best = Some((i, nr));
            }
        }
        let Some((idx, nr)) = best else { break };
        if nr <= threshold {
            break;
        }
        used[idx] = true;
        pivots.push(idx);
        let q: Vec<f64> = residuals[idx].iter().map(|x| x / nr).collect();
        for (i, r) in residuals.iter_mut().enumerate() {
            if used[i] {
                continue;
            }
            let c = dot(r, &q);
            r.iter_mut().zip(&q).for_each(|(ri, qi)| *ri -= c * qi);
        }
        basis.push(q);
    }
    PivotedBasis { pivots, basis }
}

/// Solves the square system `A x = b` (row-major `n x n`) by Gaussian
/// elimination with partial pivoting; `None` if a pivot vanishes.
pub fn solve_dense(a: &[f64], n: usize, b: &[f64]) -> Option<Vec<f64>> {
    debug_assert_eq!(a.len(), n * n);
    let mut m = a.to_vec();
    let mut x = b.to_vec();
    let scale = m.iter().fold(0.0f64, |s, v| s.max(v.abs())).max(f64::MIN_POSITIVE);
    for col in 0..n {
        let (p, pv) = (col..n)
            .map(|r| (r, m[r * n + col].abs()))
            .fold((col, -1.0), |acc, v| if v.1 > acc.1 { v } else { acc });
        if !(pv > f64::EPSILON * scale) {
            return None;
        }
        if p != col {
            for c in 0..n {
                m.swap(p * n + c, col * n + c);
            }
            x.swap(p, col);
        }
        for r in col + 1..n {
            let f = m[r * n + col] / m[col * n + col];
            if f != 0.0 {
                for c in col..n {
                    m[r * n + c] -= f * m[col * n + c];
                }
                x[r] -= f * x[col];
            }
        }
    }
    for r in (0..n).rev() {
        let mut s = x[r];
        for c in r + 1..n {
            s -= m[r * n + c] * x[c];
        }
        x[r] = s / m[r * n + r];
    }
    Some(x)
}

/// A non-zero vector `z` with `A z = 0` for a row-major `rows x cols`
/// matrix, if the null space is non-trivial at tolerance `tol`.
pub fn null_vector(a: &[f64], rows: usize, cols: usize, tol: f64) -> Option<Vec<f64>> {
    debug_assert_eq!(a.len(), rows * cols);
    let mut m = a.to_vec();
    let mut pivot_cols = Vec::new();
    let mut row = 0;
    let scale = m.iter().fold(0.0f64, |s, x| s.max(x.abs())).max(f64::MIN_POSITIVE);
    for col in 0..cols {
        if row == rows {
            break;
        }
        let (p, pv) = (row..rows)
            .map(|r| (r, m[r * cols + col].abs()))
            .fold((row, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if pv <= tol * scale {
            continue;
        }
        if p != row {
            for c in 0..cols {
                m.swap(p * cols + c, row * cols + c);
            }
        }
        let inv = 1.0 / m[row * cols + col];
        for c in 0..cols {
            m[row * cols + c] *= inv;
        }
        for r in 0..rows {
            if r == row {
                continue;
            }
            let f = m[r * cols + col];
            if f != 0.0 {
                for c in 0..cols {
                    m[r * cols + c] -= f * m[row * cols + c];
                }
            }
        }
        pivot_cols.push(col);
        row += 1;
    }
    let free = (0..cols).find(|c| !pivot_cols.contains(c))?;
    let mut z = vec![0.0; cols];
    z[free] = 1.0;
    for (r, &pc) in pivot_cols.iter().enumerate() {
        z[pc] = -m[r * cols + free];
    }
    Some(z)
}
