use rayon::prelude::*;
use serde::Serialize;

use crate::linalg::DenseMatrix;
use crate::lp::{LpStatus, StandardLp, TripletBuilder};
use crate::IndexSet;

use super::subproblem::SubproblemSolution;
use super::{ModelError, SolveOptions};

/// Optimal `gamma` of `min ‖a_j - A(L) gamma‖₁` s.t. `0 <= gamma <= diag(X*)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RjSolution {
    pub j: usize,
    pub gamma: Vec<f64>,
    /// `‖a_j - A(L) gamma‖₁` recomputed from the returned `gamma`.
    pub opt_value: f64,
}

// Entries of diag(X*) at or below this are treated as fixing gamma_i = 0.
const ZERO_DIAG: f64 = 1e-12;

/// Solves `R_j(L, X*)` with `diag_x = diag(X*)`.
///
/// Only indices with a positive upper bound enter the LP: variables
/// `(gamma_S, f, g, w)` with rows `A(S) gamma + f - g = a_j` and
/// `gamma + w = diag_x(S)`.
pub fn solve_rj(
    a: &DenseMatrix,
    l: &IndexSet,
    j: usize,
    diag_x: &[f64],
    opts: &SolveOptions,
) -> Result<RjSolution, ModelError> {
    let n = a.cols();
    if j >= n {
        return Err(ModelError::IndexOutOfRange { index: j, n });
    }
    assert_eq!(diag_x.len(), l.len(), "diag_x must have one entry per element of L");
    let aj = a.col(j);
    let d = a.rows();
    let support: Vec<usize> = (0..l.len()).filter(|&p| diag_x[p] > ZERO_DIAG).collect();
    let mut gamma = vec![0.0; l.len()];

    if !support.is_empty() {
        let k = support.len();
        let mut b = TripletBuilder::with_capacity(d + k, 2 * k + 2 * d, k * (d + 2) + 2 * d);
        let mut cost = Vec::with_capacity(2 * k + 2 * d);
        for (q, &p) in support.iter().enumerate() {
            for (i, &v) in a.col(l.as_slice()[p]).iter().enumerate() {
                b.push(i, v);
            }
            b.push(d + q, 1.0);
            b.finish_column();
            cost.push(0.0);
        }
        for sign in [1.0, -1.0] {
            for i in 0..d {
                b.push(i, sign);
                b.finish_column();
                cost.push(1.0);
            }
        }
        for q in 0..k {
            b.push(d + q, 1.0);
            b.finish_column();
            cost.push(0.0);
        }
        let mut rhs = aj.to_vec();
        rhs.extend(support.iter().map(|&p| diag_x[p]));
        let lp = StandardLp::new(cost, b.build(), rhs)?;
        let sol = opts.backend.solve(&lp, &opts.tol, None)?;
        if sol.status != LpStatus::Optimal {
            return Err(ModelError::LpStatus(sol.status));
        }
        for (q, &p) in support.iter().enumerate() {
            gamma[p] = sol.x[q].clamp(0.0, diag_x[p]);
        }
    }

    let mut res = aj.to_vec();
    for (p, &g) in gamma.iter().enumerate() {
        if g != 0.0 {
            crate::linalg::axpy(-g, a.col(l.as_slice()[p]), &mut res);
        }
    }
    let opt_value = res.iter().map(|v| v.abs()).sum();
    Ok(RjSolution { j, gamma, opt_value })
}

/// `R_j` for every `j` outside `L`, solved in parallel and returned in
/// ascending `j`.
pub fn solve_all_rj(
    a: &DenseMatrix,
    sub: &SubproblemSolution,
    opts: &SolveOptions,
) -> Result<Vec<RjSolution>, ModelError> {
    let diag = sub.diag();
    let rest = sub.l.complement(a.cols());
    rest.as_slice().par_iter().map(|&j| solve_rj(a, &sub.l, j, &diag, opts)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn copy_of_a_dictionary_column_is_free() {
        let a = DenseMatrix::from_rows(&[&[1.0, 0.0, 1.0], &[0.0, 1.0, 0.0]]).unwrap();
        let l = IndexSet::from(vec![0, 1]);
        let s = solve_rj(&a, &l, 2, &[1.0, 0.3], &SolveOptions::default()).unwrap();
        assert!(s.opt_value < 1e-12);
        assert!((s.gamma[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_bounds_force_zero_gamma() {
        let a = DenseMatrix::from_rows(&[&[1.0, 0.0, 0.4], &[0.0, 1.0, -0.6]]).unwrap();
        let l = IndexSet::from(vec![0, 1]);
        let s = solve_rj(&a, &l, 2, &[0.0, 0.0], &SolveOptions::default()).unwrap();
        assert_eq!(s.gamma, vec![0.0, 0.0]);
        assert!((s.opt_value - 1.0).abs() < 1e-15);
    }

    #[test]
    fn upper_bound_is_binding() {
        // a_2 = 2 a_0 but gamma_0 <= 0.5 leaves half of it unexplained
        let a = DenseMatrix::from_rows(&[&[1.0, 0.0, 2.0], &[1.0, 1.0, 2.0]]).unwrap();
        let l = IndexSet::from(vec![0, 1]);
        let s = solve_rj(&a, &l, 2, &[0.5, 0.0], &SolveOptions::default()).unwrap();
        assert!((s.gamma[0] - 0.5).abs() < 1e-12);
        assert!((s.opt_value - 3.0).abs() < 1e-12);
    }
}
