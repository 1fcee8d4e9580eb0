//! Equality-form linear programs and their solvers.
//!
//! Every problem is `min cᵀx  s.t.  Ax = b, x >= 0`. Solvers return a primal
//! vertex together with the dual multipliers `y` of the equality rows, using
//! the convention `Aᵀy <= c` at optimality, so the reduced costs are
//! `c - Aᵀy`.
//!
//! Two engines sit behind [`LpSolver`]:
//!
//! * [`RevisedSimplex`]: a dense revised simplex with an LU-factored basis
//!   and eta-file updates. It is exact at vertices and deterministic, and it
//!   is the engine used for every small problem.
//! * `HighsSolver` (feature `highs`): the HiGHS sparse simplex, for the
//!   Hottopixx subproblems whose row count makes a dense basis impractical.
//!
//! [`Backend`] picks between them by problem size. Callers only ever see
//! [`LpSolution`] and audit it with [`verify`].

#[cfg(feature = "highs")]
mod highs_backend;
mod simplex;
mod sparse;

#[cfg(feature = "highs")]
pub use highs_backend::HighsSolver;
pub use simplex::RevisedSimplex;
pub use sparse::{CscMatrix, TripletBuilder};

use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::DenseMatrix;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("malformed LP: {0}")]
    Malformed(String),
    #[error("basis matrix became numerically singular")]
    SingularBasis,
    #[error("LP backend failure: {0}")]
    Backend(String),
}

/// `min cᵀx  s.t.  Ax = b,  x >= 0`.
#[derive(Debug, Clone)]
pub struct StandardLp {
    c: Vec<f64>,
    a: CscMatrix,
    b: Vec<f64>,
}

impl StandardLp {
    pub fn new(c: Vec<f64>, a: CscMatrix, b: Vec<f64>) -> Result<Self, LpError> {
        if a.nrows() == 0 || a.ncols() == 0 {
            return Err(LpError::Malformed("LP needs at least one row and one column".into()));
        }
        if c.len() != a.ncols() || b.len() != a.nrows() {
            return Err(LpError::Malformed(format!(
                "cost has {} entries and rhs {}, constraint matrix is {}x{}",
                c.len(),
                b.len(),
                a.nrows(),
                a.ncols()
            )));
        }
        if c.iter().chain(&b).chain(a.values()).any(|v| !v.is_finite()) {
            return Err(LpError::Malformed("non-finite coefficient".into()));
        }
        Ok(Self { c, a, b })
    }

    pub fn from_dense(c: Vec<f64>, a: &DenseMatrix, b: Vec<f64>) -> Result<Self, LpError> {
        Self::new(c, CscMatrix::from_dense(a), b)
    }

    pub fn cost(&self) -> &[f64] {
        &self.c
    }

    pub fn matrix(&self) -> &CscMatrix {
        &self.a
    }

    pub fn rhs(&self) -> &[f64] {
        &self.b
    }

    pub fn num_rows(&self) -> usize {
        self.a.nrows()
    }

    pub fn num_cols(&self) -> usize {
        self.a.ncols()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    /// Pivot cap or time limit reached before optimality was proven.
    IterLimit,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub objective: f64,
    /// Basic variables at termination, one per row, when the engine exposes
    /// them: `j < n` is a structural column, `n + i` the logical (or
    /// artificial) of row `i`. Feed back through [`LpSolver::solve_warm`].
    pub basis: Option<Vec<usize>>,
    /// Farkas vector `y` (`Aᵀy <= 0`, `bᵀy > 0`) for infeasible problems, or
    /// a recession direction `d >= 0` (`Ad = 0`, `cᵀd < 0`) for unbounded ones.
    pub certificate: Option<Vec<f64>>,
    pub iterations: usize,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceConfig {
    pub feas_tol: f64,
    pub gap_tol: f64,
    /// `None` means `50 (m + n)` pivots.
    pub max_pivots: Option<usize>,
    pub time_limit: Option<Duration>,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self { feas_tol: 1e-9, gap_tol: 1e-7, max_pivots: None, time_limit: None }
    }
}

impl ToleranceConfig {
    pub fn pivot_cap(&self, m: usize, n: usize) -> usize {
        self.max_pivots.unwrap_or(50 * (m + n))
    }
}

/// Anything that can solve a [`StandardLp`] to a primal/dual pair.
pub trait LpSolver: Send + Sync {
    fn name(&self) -> &'static str;

    fn solve_warm(
        &self,
        lp: &StandardLp,
        tol: &ToleranceConfig,
        warm_basis: Option<&[usize]>,
    ) -> Result<LpSolution, LpError>;

    fn solve(&self, lp: &StandardLp, tol: &ToleranceConfig) -> Result<LpSolution, LpError> {
        self.solve_warm(lp, tol, None)
    }
}

/// Solver choice by problem size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Backend {
    /// Dense simplex up to [`Backend::DENSE_ROW_LIMIT`] rows, HiGHS above
    /// (when compiled in).
    #[default]
    Auto,
    Simplex,
    #[cfg(feature = "highs")]
    Highs,
}

impl Backend {
    pub const DENSE_ROW_LIMIT: usize = 600;

    pub fn solver_for(self, lp: &StandardLp) -> &'static dyn LpSolver {
        static SIMPLEX: RevisedSimplex = RevisedSimplex::new();
        #[cfg(feature = "highs")]
        static HIGHS: HighsSolver = HighsSolver::new();
        match self {
            Backend::Simplex => &SIMPLEX,
            #[cfg(feature = "highs")]
            Backend::Highs => &HIGHS,
            Backend::Auto => {
                #[cfg(feature = "highs")]
                if lp.num_rows() > Self::DENSE_ROW_LIMIT {
                    return &HIGHS;
                }
                let _ = lp;
                &SIMPLEX
            }
        }
    }

    pub fn solve(
        self,
        lp: &StandardLp,
        tol: &ToleranceConfig,
        warm_basis: Option<&[usize]>,
    ) -> Result<LpSolution, LpError> {
        self.solver_for(lp).solve_warm(lp, tol, warm_basis)
    }
}

/// Solves with the built-in revised simplex.
pub fn solve(lp: &StandardLp, tol: &ToleranceConfig) -> Result<LpSolution, LpError> {
    RevisedSimplex::new().solve(lp, tol)
}

/// Independent optimality audit of a primal/dual pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VerifyReport {
    /// `‖Ax - b‖∞`.
    pub primal_residual: f64,
    /// `max(-x)⁺`.
    pub bound_violation: f64,
    /// `max(Aᵀy - c)⁺`.
    pub dual_residual: f64,
    pub primal_objective: f64,
    pub dual_objective: f64,
    /// `|cᵀx - bᵀy|`.
    pub duality_gap: f64,
    /// `max_i |x_i (c - Aᵀy)_i|`.
    pub complementarity: f64,
}

impl VerifyReport {
    /// Every residual within tolerance; the gap is relative to `max(1, |cᵀx|)`.
    pub fn passes(&self, tol: &ToleranceConfig) -> bool {
        self.primal_residual <= tol.feas_tol
            && self.bound_violation <= tol.feas_tol
            && self.dual_residual <= tol.feas_tol
            && self.duality_gap <= tol.gap_tol * self.primal_objective.abs().max(1.0)
    }

    /// Like [`passes`](Self::passes) but scales the feasibility tolerance by
    /// the magnitude of the data, for large problems solved by an external
    /// engine working on a scaled model.
    pub fn passes_scaled(&self, tol: &ToleranceConfig, scale: f64) -> bool {
        let f = tol.feas_tol * scale.max(1.0);
        self.primal_residual <= f
            && self.bound_violation <= f
            && self.dual_residual <= f
            && self.duality_gap <= tol.gap_tol * self.primal_objective.abs().max(1.0)
    }
}

/// Recomputes residuals, gap and complementarity from scratch.
pub fn verify(lp: &StandardLp, x: &[f64], y: &[f64]) -> VerifyReport {
    let ax = lp.a.mul_vec(x);
    let primal_residual = ax.iter().zip(&lp.b).fold(0.0f64, |m, (l, r)| m.max((l - r).abs()));
    let bound_violation = x.iter().fold(0.0f64, |m, &v| m.max(-v));
    let aty = lp.a.tr_mul_vec(y);
    let mut dual_residual = 0.0f64;
    let mut complementarity = 0.0f64;
    for j in 0..lp.num_cols() {
        let reduced = lp.c[j] - aty[j];
        dual_residual = dual_residual.max(-reduced);
        complementarity = complementarity.max((x[j] * reduced).abs());
    }
    let primal_objective: f64 = lp.c.iter().zip(x).map(|(c, x)| c * x).sum();
    let dual_objective: f64 = lp.b.iter().zip(y).map(|(b, y)| b * y).sum();
    VerifyReport {
        primal_residual,
        bound_violation,
        dual_residual,
        primal_objective,
        dual_objective,
        duality_gap: (primal_objective - dual_objective).abs(),
        complementarity,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp(c: &[f64], a: &[&[f64]], b: &[f64]) -> StandardLp {
        StandardLp::from_dense(c.to_vec(), &DenseMatrix::from_rows(a).unwrap(), b.to_vec()).unwrap()
    }

    #[test]
    fn one_variable() {
        let p = lp(&[1.0], &[&[1.0]], &[1.0]);
        let s = solve(&p, &ToleranceConfig::default()).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.x[0] - 1.0).abs() < 1e-12);
        assert!((s.y[0] - 1.0).abs() < 1e-12);
        assert!((s.objective - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sign_contradiction_is_infeasible() {
        let p = lp(&[0.0], &[&[1.0]], &[-1.0]);
        let s = solve(&p, &ToleranceConfig::default()).unwrap();
        assert_eq!(s.status, LpStatus::Infeasible);
        let y = s.certificate.unwrap();
        // Aᵀy <= 0 and bᵀy > 0
        assert!(y[0] <= 0.0 && -y[0] > 0.0);
    }

    #[test]
    fn unbounded_ray() {
        // min -x1  s.t.  x1 - x2 = 0
        let p = lp(&[-1.0, 0.0], &[&[1.0, -1.0]], &[0.0]);
        let s = solve(&p, &ToleranceConfig::default()).unwrap();
        assert_eq!(s.status, LpStatus::Unbounded);
        let d = s.certificate.unwrap();
        assert!(d.iter().all(|&v| v >= 0.0));
        assert!((d[0] - d[1]).abs() < 1e-12 && d[0] > 0.0);
    }

    #[test]
    fn perturbed_primal_is_reported() {
        let p = lp(&[-1.0, -1.0, 0.0], &[&[1.0, 1.0, 1.0]], &[1.0]);
        let s = solve(&p, &ToleranceConfig::default()).unwrap();
        let r = verify(&p, &s.x, &s.y);
        assert!(r.passes(&ToleranceConfig::default()));
        let mut x = s.x.clone();
        x[0] += 1e-3;
        assert!(verify(&p, &x, &s.y).primal_residual > 1e-4);
    }

    #[test]
    fn malformed_inputs_rejected() {
        let a = CscMatrix::from_dense(&DenseMatrix::identity(2));
        assert!(StandardLp::new(vec![1.0], a.clone(), vec![1.0, 1.0]).is_err());
        assert!(StandardLp::new(vec![1.0, f64::INFINITY], a, vec![1.0, 1.0]).is_err());
    }
}
