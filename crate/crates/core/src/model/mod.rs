//! The Hottopixx LP `min ‖A - AX‖₁` over
//! `F(n, n) = { X : trace X = r, 0 <= X(i, j) <= X(i, i) <= 1 }`, its
//! restricted subproblems `P(L, M)` / `D(L, M)`, the per-column problems
//! `R_j`, and the optimality certificates that let a small subproblem stand
//! in for the full one.

mod certificate;
mod primal;
mod rj;
mod subproblem;

pub use certificate::{
    assemble_full, c2_price, certify_global, check_c1, check_c2, default_eps, hottopixx_objective,
    CertificateReport, LP_AUDIT_MAX_N,
};
pub use primal::{build_primal, pi_order, DualBlocks, PrimalLayout, PrimalLp, WarmStart};
pub use rj::{solve_all_rj, solve_rj, RjSolution};
pub use subproblem::{
    audit, solve_direct, solve_lm, solve_lm_warm, solve_subproblem, AuditSnapshot, SubproblemSolution,
};

use thiserror::Error;

use crate::linalg::LinalgError;
use crate::lp::{Backend, LpError, LpStatus, ToleranceConfig};

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("column index {index} out of range for {n} columns")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("r = {r} must satisfy 1 <= r <= |L| = {l}")]
    RankTooLarge { r: usize, l: usize },
    #[error("index {index} of L is not in M")]
    NotSubset { index: usize },
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("LP solver stopped with status {0:?}")]
    LpStatus(LpStatus),
    #[error("solved subproblem violates {what}: {value:e}")]
    InvariantViolation { what: &'static str, value: f64 },
    #[error("no R_j solution for column {0}")]
    MissingRj(usize),
    #[error("certificate block {block} violated by {violation:e}")]
    Certificate { block: &'static str, violation: f64 },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Engine choice and tolerances for every LP the model solves.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SolveOptions {
    pub backend: Backend,
    pub tol: ToleranceConfig,
}
