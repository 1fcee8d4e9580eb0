//! Successive projection algorithm (SPA).

use thiserror::Error;

use crate::linalg::{axpy, dot, norm2, DenseMatrix};
use crate::IndexSet;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpaError {
    #[error("r = {r} must satisfy 1 <= r <= min(d, n) = {max}")]
    BadRank { r: usize, max: usize },
    #[error("residual vanished after {picked} picks; the data has rank < r")]
    RankDeficient { picked: usize },
}

/// Working state of SPA: the projected residual and the picks so far.
#[derive(Debug, Clone)]
pub struct SpaState {
    residual: DenseMatrix,
    basis: Vec<Vec<f64>>,
    selected: IndexSet,
    picked_norms: Vec<f64>,
    floor: f64,
}

impl SpaState {
    pub fn new(a: &DenseMatrix) -> Self {
        let max_norm = a.columns().map(norm2).fold(0.0, f64::max);
        Self {
            residual: a.clone(),
            basis: Vec::new(),
            selected: IndexSet::new(),
            picked_norms: Vec::new(),
            floor: 1e-12 * max_norm.max(f64::MIN_POSITIVE),
        }
    }

    pub fn selected(&self) -> &IndexSet {
        &self.selected
    }

    /// Residual norms of the picked columns at the time they were picked.
    pub fn picked_norms(&self) -> &[f64] {
        &self.picked_norms
    }

    pub fn residual(&self) -> &DenseMatrix {
        &self.residual
    }

    /// Picks the column of largest residual norm (lowest index on ties) and
    /// projects every column onto the orthogonal complement of it.
    pub fn step(&mut self) -> Result<usize, SpaError> {
        let mut best = (0, -1.0);
        for (j, c) in self.residual.columns().enumerate() {
            let nn = dot(c, c);
            if nn > best.1 {
                best = (j, nn);
            }
        }
        let (p, nn) = best;
        let norm = nn.sqrt();
        if norm <= self.floor {
            return Err(SpaError::RankDeficient { picked: self.selected.len() });
        }
        let mut u: Vec<f64> = self.residual.col(p).iter().map(|v| v / norm).collect();
        // re-orthogonalize against earlier directions to limit drift
        for q in &self.basis {
            let c = dot(q, &u);
            axpy(-c, q, &mut u);
        }
        let un = norm2(&u);
        if un <= 1e-12 {
            return Err(SpaError::RankDeficient { picked: self.selected.len() });
        }
        u.iter_mut().for_each(|v| *v /= un);
        for j in 0..self.residual.cols() {
            let c = dot(&u, self.residual.col(j));
            axpy(-c, &u, self.residual.col_mut(j));
        }
        self.basis.push(u);
        self.selected.insert(p);
        self.picked_norms.push(norm);
        Ok(p)
    }
}

/// Returns `r` column indices in pick order.
pub fn spa(a: &DenseMatrix, r: usize) -> Result<IndexSet, SpaError> {
    let max = a.rows().min(a.cols());
    if r == 0 || r > max {
        return Err(SpaError::BadRank { r, max });
    }
    let mut st = SpaState::new(a);
    for _ in 0..r {
        st.step()?;
    }
    Ok(st.selected)
}
