//! Dense column-major matrices and the numerical kernels shared by every
//! other module.
//!
//! Columns are pixels (spectra) throughout the crate, so storage is
//! column-major and most kernels walk one column at a time.

mod svd;

pub use svd::{truncated_svd, SvdTruncation};

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("invalid shape: {0}")]
    Shape(String),
    #[error("matrix entry ({row}, {col}) is not finite")]
    NonFinite { row: usize, col: usize },
    #[error("vector is constant after mean removal; spectral angle is undefined")]
    ConstantVector,
    #[error("rank {rank} out of range for a {rows}x{cols} matrix")]
    RankOutOfRange { rank: usize, rows: usize, cols: usize },
    #[error("Jacobi SVD did not converge within {sweeps} sweeps")]
    SvdNoConvergence { sweeps: usize },
}

/// A real matrix stored column-major. Every entry is finite and both
/// dimensions are at least one.
#[derive(Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "DenseMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows.min(12) {
            write!(f, "  ")?;
            for j in 0..self.cols.min(12) {
                write!(f, "{:>12.6} ", self.get(i, j))?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl DenseMatrix {
    /// Builds a matrix from column-major data, validating shape and finiteness.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, LinalgError> {
        if rows == 0 || cols == 0 {
            return Err(LinalgError::Shape(format!("{rows}x{cols} has an empty dimension")));
        }
        if data.len() != rows * cols {
            return Err(LinalgError::Shape(format!(
                "{rows}x{cols} needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(k) = data.iter().position(|v| !v.is_finite()) {
            return Err(LinalgError::NonFinite { row: k % rows, col: k / rows });
        }
        Ok(Self { rows, cols, data })
    }

    /// Zero matrix. Panics on an empty dimension.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    /// Row-major literal, convenient for small fixtures.
    pub fn from_rows(rows: &[&[f64]]) -> Result<Self, LinalgError> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(LinalgError::Shape("ragged rows".into()));
        }
        let mut data = vec![0.0; r * c];
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                data[j * r + i] = v;
            }
        }
        Self::new(r, c, data)
    }

    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self, LinalgError> {
        let c = columns.len();
        let r = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|col| col.len() != r) {
            return Err(LinalgError::Shape("columns differ in length".into()));
        }
        Self::new(r, c, columns.concat())
    }

    /// Builds a matrix from a closure over `(row, col)`.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for j in 0..cols {
            for i in 0..rows {
                m.data[j * rows + i] = f(i, j);
            }
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[j * self.rows + i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[j * self.rows + i] = v;
    }

    #[inline]
    pub fn col(&self, j: usize) -> &[f64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    #[inline]
    pub fn col_mut(&mut self, j: usize) -> &mut [f64] {
        let r = self.rows;
        &mut self.data[j * r..(j + 1) * r]
    }

    pub fn columns(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.rows)
    }

    /// Column-major backing storage.
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        (0..self.cols).map(|j| self.get(i, j)).collect()
    }

    /// Submatrix made of the listed columns, in the listed order.
    pub fn select_columns(&self, idx: &[usize]) -> DenseMatrix {
        assert!(!idx.is_empty(), "cannot select zero columns");
        let mut data = Vec::with_capacity(self.rows * idx.len());
        for &j in idx {
            data.extend_from_slice(self.col(j));
        }
        DenseMatrix { rows: self.rows, cols: idx.len(), data }
    }

    pub fn transpose(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    /// `self * other`.
    pub fn matmul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = DenseMatrix::zeros(self.rows, other.cols);
        for j in 0..other.cols {
            let dst = &mut out.data[j * self.rows..(j + 1) * self.rows];
            for (k, &b) in other.col(j).iter().enumerate() {
                if b != 0.0 {
                    axpy(b, self.col(k), dst);
                }
            }
        }
        out
    }

    /// `selfᵀ * other`.
    pub fn tr_matmul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.rows, other.rows, "tr_matmul dimension mismatch");
        DenseMatrix::from_fn(self.cols, other.cols, |i, j| dot(self.col(i), other.col(j)))
    }

    /// `self * v`.
    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, v.len());
        let mut out = vec![0.0; self.rows];
        for (j, &x) in v.iter().enumerate() {
            if x != 0.0 {
                axpy(x, self.col(j), &mut out);
            }
        }
        out
    }

    /// `selfᵀ * v`.
    pub fn tr_mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.rows, v.len());
        self.columns().map(|c| dot(c, v)).collect()
    }

    pub fn sub(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        DenseMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn add(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        DenseMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, c: f64) -> DenseMatrix {
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * c).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).collect()
    }

    /// Rescales every column to unit L1 norm; zero columns are left alone.
    pub fn normalize_columns_l1(&mut self) {
        for j in 0..self.cols {
            let s: f64 = self.col(j).iter().map(|v| v.abs()).sum();
            if s > 0.0 {
                self.col_mut(j).iter_mut().for_each(|v| *v /= s);
            }
        }
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub(crate) fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub(crate) fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn dist_l1(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

pub(crate) fn dist2_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Induced L1 norm: the largest absolute column sum.
pub fn l1_norm(a: &DenseMatrix) -> f64 {
    a.columns()
        .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Splits `a` into its positive and negative parts, `a = plus - minus`.
pub fn pos_neg_split(a: &DenseMatrix) -> (DenseMatrix, DenseMatrix) {
    let plus = a.data.iter().map(|&v| v.max(0.0)).collect();
    let minus = a.data.iter().map(|&v| (-v).max(0.0)).collect();
    (
        DenseMatrix { rows: a.rows, cols: a.cols, data: plus },
        DenseMatrix { rows: a.rows, cols: a.cols, data: minus },
    )
}

fn mean_removed(a: &[f64]) -> Vec<f64> {
    let mean = a.iter().sum::<f64>() / a.len() as f64;
    a.iter().map(|v| v - mean).collect()
}

/// Cosine between the mean-removed copies of `a` and `b`, clamped to [-1, 1].
pub fn mean_removed_cosine(a: &[f64], b: &[f64]) -> Result<f64, LinalgError> {
    if a.len() != b.len() || a.len() < 2 {
        return Err(LinalgError::Shape(format!(
            "spectral angle needs equal lengths >= 2, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    let ca = mean_removed(a);
    let cb = mean_removed(b);
    let (na, nb) = (norm2(&ca), norm2(&cb));
    if na == 0.0 || nb == 0.0 {
        return Err(LinalgError::ConstantVector);
    }
    Ok((dot(&ca, &cb) / (na * nb)).clamp(-1.0, 1.0))
}

/// Mean-removed copy of `a` scaled to unit Euclidean norm.
pub fn mean_removed_unit(a: &[f64]) -> Result<Vec<f64>, LinalgError> {
    if a.len() < 2 {
        return Err(LinalgError::Shape(format!("spectral angle needs length >= 2, got {}", a.len())));
    }
    let mut c = mean_removed(a);
    let nc = norm2(&c);
    if nc == 0.0 {
        return Err(LinalgError::ConstantVector);
    }
    c.iter_mut().for_each(|v| *v /= nc);
    Ok(c)
}

/// Angle between two unit vectors divided by pi, computed as
/// `2 atan2(|u - v|, |u + v|)`, which stays accurate near 0 and 1.
pub fn unit_angle(u: &[f64], v: &[f64]) -> f64 {
    let (mut diff, mut sum) = (0.0, 0.0);
    for (x, y) in u.iter().zip(v) {
        diff += (x - y) * (x - y);
        sum += (x + y) * (x + y);
    }
    let angle = 2.0 * diff.sqrt().atan2(sum.sqrt());
    (angle / std::f64::consts::PI).clamp(0.0, 1.0)
}

/// Mean-removed spectral angle, normalised by pi so it lies in [0, 1].
///
/// Equals `arccos` of the clamped mean-removed cosine; see [`unit_angle`]
/// for the evaluation.
pub fn mrsa(a: &[f64], b: &[f64]) -> Result<f64, LinalgError> {
    if a.len() != b.len() {
        return Err(LinalgError::Shape(format!(
            "spectral angle needs equal lengths, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    Ok(unit_angle(&mean_removed_unit(a)?, &mean_removed_unit(b)?))
}

/// Euclidean projection onto the probability simplex `{x >= 0, sum x = 1}`.
pub fn project_simplex(v: &[f64]) -> Vec<f64> {
    assert!(!v.is_empty(), "cannot project an empty vector");
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (k, &u) in sorted.iter().enumerate() {
        cumsum += u;
        let t = (cumsum - 1.0) / (k + 1) as f64;
        if u - t > 0.0 {
            theta = t;
        }
    }
    let mut x: Vec<f64> = v.iter().map(|&vi| (vi - theta).max(0.0)).collect();
    // One correction pass so the sum is exact to rounding.
    let s: f64 = x.iter().sum();
    if s > 0.0 && (s - 1.0).abs() > 0.0 {
        let support = x.iter().filter(|&&xi| xi > 0.0).count() as f64;
        let shift = (s - 1.0) / support;
        for xi in x.iter_mut().filter(|xi| **xi > 0.0) {
            *xi = (*xi - shift).max(0.0);
        }
    }
    x
}
