use crate::linalg::DenseMatrix;

/// Compressed sparse column matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CscMatrix {
    nrows: usize,
    ncols: usize,
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    vals: Vec<f64>,
}

impl CscMatrix {
    pub fn from_dense(a: &DenseMatrix) -> Self {
        let mut col_ptr = Vec::with_capacity(a.cols() + 1);
        let mut row_idx = Vec::new();
        let mut vals = Vec::new();
        col_ptr.push(0);
        for col in a.columns() {
            for (i, &v) in col.iter().enumerate() {
                if v != 0.0 {
                    row_idx.push(i);
                    vals.push(v);
                }
            }
            col_ptr.push(row_idx.len());
        }
        Self { nrows: a.rows(), ncols: a.cols(), col_ptr, row_idx, vals }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.vals
    }

    /// Row indices and values of column `j`.
    #[inline]
    pub fn col(&self, j: usize) -> (&[usize], &[f64]) {
        let (s, e) = (self.col_ptr[j], self.col_ptr[j + 1]);
        (&self.row_idx[s..e], &self.vals[s..e])
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.ncols);
        let mut out = vec![0.0; self.nrows];
        for (j, &xj) in x.iter().enumerate() {
            if xj == 0.0 {
                continue;
            }
            let (idx, val) = self.col(j);
            for (&i, &v) in idx.iter().zip(val) {
                out[i] += v * xj;
            }
        }
        out
    }

    pub fn tr_mul_vec(&self, y: &[f64]) -> Vec<f64> {
        assert_eq!(y.len(), self.nrows);
        (0..self.ncols).map(|j| self.col_dot(j, y)).collect()
    }

    #[inline]
    pub fn col_dot(&self, j: usize, y: &[f64]) -> f64 {
        let (idx, val) = self.col(j);
        idx.iter().zip(val).map(|(&i, &v)| v * y[i]).sum()
    }

    /// Densified copy; only sensible for small matrices.
    pub fn to_dense(&self) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(self.nrows, self.ncols);
        for j in 0..self.ncols {
            let (idx, val) = self.col(j);
            for (&i, &v) in idx.iter().zip(val) {
                m.set(i, j, v);
            }
        }
        m
    }
}

/// Accumulates `(row, col, value)` entries column by column.
///
/// Columns must be opened in increasing order; duplicate entries within a
/// column are summed.
#[derive(Debug, Clone)]
pub struct TripletBuilder {
    nrows: usize,
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    vals: Vec<f64>,
    open: Vec<(usize, f64)>,
}

impl TripletBuilder {
    pub fn new(nrows: usize) -> Self {
        Self { nrows, col_ptr: vec![0], row_idx: Vec::new(), vals: Vec::new(), open: Vec::new() }
    }

    pub fn with_capacity(nrows: usize, ncols: usize, nnz: usize) -> Self {
        let mut col_ptr = Vec::with_capacity(ncols + 1);
        col_ptr.push(0);
        Self {
            nrows,
            col_ptr,
            row_idx: Vec::with_capacity(nnz),
            vals: Vec::with_capacity(nnz),
            open: Vec::new(),
        }
    }

    /// Adds an entry to the column currently being built.
    pub fn push(&mut self, row: usize, value: f64) {
        assert!(row < self.nrows, "row {row} out of range ({} rows)", self.nrows);
        if value != 0.0 {
            self.open.push((row, value));
        }
    }

    /// Closes the current column and returns its index.
    pub fn finish_column(&mut self) -> usize {
        self.open.sort_by_key(|&(i, _)| i);
        let mut last: Option<usize> = None;
        for &(i, v) in &self.open {
            if last == Some(i) {
                *self.vals.last_mut().unwrap() += v;
            } else {
                self.row_idx.push(i);
                self.vals.push(v);
                last = Some(i);
            }
        }
        self.open.clear();
        self.col_ptr.push(self.row_idx.len());
        self.col_ptr.len() - 2
    }

    pub fn ncols(&self) -> usize {
        self.col_ptr.len() - 1
    }

    pub fn build(self) -> CscMatrix {
        assert!(self.open.is_empty(), "unfinished column");
        CscMatrix {
            nrows: self.nrows,
            ncols: self.col_ptr.len() - 1,
            col_ptr: self.col_ptr,
            row_idx: self.row_idx,
            vals: self.vals,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builder_matches_dense() {
        let d = DenseMatrix::from_rows(&[&[1.0, 0.0, 2.0], &[0.0, -3.0, 4.0]]).unwrap();
        let mut b = TripletBuilder::new(2);
        b.push(0, 1.0);
        b.finish_column();
        b.push(1, -1.0);
        b.push(1, -2.0);
        b.finish_column();
        b.push(1, 4.0);
        b.push(0, 2.0);
        b.finish_column();
        let m = b.build();
        assert_eq!(m, CscMatrix::from_dense(&d));
        assert_eq!(m.to_dense(), d);
        assert_eq!(m.mul_vec(&[1.0, 1.0, 1.0]), vec![3.0, 1.0]);
        assert_eq!(m.tr_mul_vec(&[1.0, 1.0]), vec![1.0, -3.0, 6.0]);
    }
}
