use std::sync::atomic::{AtomicU64, Ordering};

use serde::Serialize;

use crate::linalg::DenseMatrix;
use crate::lp::{LpStatus, VerifyReport};
use crate::IndexSet;

use super::primal::{build_primal, DualBlocks, WarmStart};
use super::{ModelError, SolveOptions};

/// Optimal primal and dual blocks of `P(L, M)` / `D(L, M)`.
///
/// For the usual `L = M` case `x_star` and `z_star` are `l x l`; in general
/// `x_star` is `l x m`, `y_star` is `d x m`, `z_star` is `m x l` and columns
/// follow the order `(L, M \ L)` stored in `order`. `F*` and `G*` are not
/// kept; they are the positive and negative parts of the residual.
#[derive(Debug, Clone)]
pub struct SubproblemSolution {
    pub l: IndexSet,
    pub order: Vec<usize>,
    pub r: usize,
    pub x_star: DenseMatrix,
    pub u_star: f64,
    pub y_star: DenseMatrix,
    pub z_star: DenseMatrix,
    pub s_star: Vec<f64>,
    pub t_star: Vec<f64>,
    pub v_star: f64,
    pub dual_objective: f64,
    pub report: VerifyReport,
    pub iterations: usize,
    pub engine: &'static str,
    /// Final basis, when the engine reports one.
    pub warm: Option<WarmStart>,
}

impl SubproblemSolution {
    pub fn diag(&self) -> Vec<f64> {
        (0..self.l.len()).map(|i| self.x_star.get(i, i)).collect()
    }

    pub fn dual_blocks(&self) -> DualBlocks {
        DualBlocks {
            y: self.y_star.clone(),
            z: self.z_star.clone(),
            s: self.s_star.clone(),
            t: self.t_star.clone(),
            v: self.v_star,
        }
    }
}

// Running maxima over every subproblem solved in this process. Both tracked
// quantities are clamped at zero so the f64 bit patterns order like the
// values.
static SOLVES: AtomicU64 = AtomicU64::new(0);
static VIOLATIONS: AtomicU64 = AtomicU64::new(0);
static MAX_REL_GAP: AtomicU64 = AtomicU64::new(0);
static MAX_V: AtomicU64 = AtomicU64::new(0);

/// Process-wide duality audit of every subproblem solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AuditSnapshot {
    pub solves: u64,
    pub violations: u64,
    /// Largest `|opt(P) - opt(D)| / max(1, opt(P))`.
    pub max_relative_gap: f64,
    /// Largest positive `v*` seen on an `L = M` subproblem (0 if none).
    pub max_v: f64,
}

pub fn audit() -> AuditSnapshot {
    AuditSnapshot {
        solves: SOLVES.load(Ordering::SeqCst),
        violations: VIOLATIONS.load(Ordering::SeqCst),
        max_relative_gap: f64::from_bits(MAX_REL_GAP.load(Ordering::SeqCst)),
        max_v: f64::from_bits(MAX_V.load(Ordering::SeqCst)),
    }
}

fn record_max(slot: &AtomicU64, value: f64) {
    slot.fetch_max(value.max(0.0).to_bits(), Ordering::SeqCst);
}

const V_TOL: f64 = 1e-9;
const TRACE_TOL: f64 = 1e-7;
// Raw bound violations larger than this are reported; smaller ones are
// solver noise and get clamped away.
const RAW_BOUND_TOL: f64 = 1e-7;

/// Solves `P(L, L)` and recovers the blocks of `D(L, L)`.
pub fn solve_subproblem(
    a: &DenseMatrix,
    l: &IndexSet,
    r: usize,
    opts: &SolveOptions,
) -> Result<SubproblemSolution, ModelError> {
    solve_lm(a, l, l, r, opts)
}

/// Solves the full model `H(N, N)` directly; the oracle RCE must match.
pub fn solve_direct(
    a: &DenseMatrix,
    r: usize,
    opts: &SolveOptions,
) -> Result<SubproblemSolution, ModelError> {
    solve_subproblem(a, &IndexSet::full(a.cols()), r, opts)
}

/// Solves `P(L, M)`, recovers the dual blocks, and enforces strong duality,
/// feasibility of `X*` and (for `L = M`) `v* <= 0`.
pub fn solve_lm(
    a: &DenseMatrix,
    l: &IndexSet,
    m: &IndexSet,
    r: usize,
    opts: &SolveOptions,
) -> Result<SubproblemSolution, ModelError> {
    solve_lm_warm(a, l, m, r, opts, None)
}

/// [`solve_lm`] starting from the basis of an earlier, smaller subproblem.
pub fn solve_lm_warm(
    a: &DenseMatrix,
    l: &IndexSet,
    m: &IndexSet,
    r: usize,
    opts: &SolveOptions,
    warm: Option<&WarmStart>,
) -> Result<SubproblemSolution, ModelError> {
    let p = build_primal(a, l, m, r)?;
    let solver = opts.backend.solver_for(&p.lp);
    let start = warm.and_then(|w| p.map_basis(w));
    let sol = solver.solve_warm(&p.lp, &opts.tol, start.as_deref())?;
    if sol.status != LpStatus::Optimal {
        return Err(ModelError::LpStatus(sol.status));
    }
    SOLVES.fetch_add(1, Ordering::SeqCst);
    let violation = |what, value| {
        VIOLATIONS.fetch_add(1, Ordering::SeqCst);
        Err(ModelError::InvariantViolation { what, value })
    };

    let lay = p.layout;
    let u_star = sol.x[lay.u()];
    let blocks = p.dual_blocks(&sol.y);
    let dual_objective = p.dual_objective(a, &blocks);
    let rel_gap = (u_star - dual_objective).abs() / u_star.abs().max(1.0);
    record_max(&MAX_REL_GAP, rel_gap);
    let same = l.len() == m.len();
    if same {
        record_max(&MAX_V, blocks.v);
    }
    if rel_gap > opts.tol.gap_tol {
        return violation("strong duality", rel_gap);
    }
    if same && blocks.v > V_TOL {
        return violation("v* <= 0", blocks.v);
    }

    let mut x = DenseMatrix::from_fn(lay.l, lay.m, |i, j| sol.x[lay.x(i, j)]);
    let mut raw = 0.0f64;
    for i in 0..lay.l {
        let xi = x.get(i, i);
        raw = raw.max(-xi).max(xi - 1.0);
        x.set(i, i, xi.clamp(0.0, 1.0));
    }
    for j in 0..lay.m {
        for i in (0..lay.l).filter(|&i| i != j) {
            let (xij, xii) = (x.get(i, j), x.get(i, i));
            raw = raw.max(-xij).max(xij - xii);
            x.set(i, j, xij.clamp(0.0, xii));
        }
    }
    if raw > RAW_BOUND_TOL {
        return violation("0 <= X(i, j) <= X(i, i) <= 1", raw);
    }
    let trace: f64 = (0..lay.l).map(|i| x.get(i, i)).sum();
    if (trace - r as f64).abs() > TRACE_TOL {
        return violation("trace X = r", (trace - r as f64).abs());
    }

    let report = crate::lp::verify(&p.lp, &sol.x, &sol.y);
    let warm = sol.basis.map(|basis| WarmStart { layout: lay, order: p.order.clone(), basis });
    Ok(SubproblemSolution {
        l: l.clone(),
        order: p.order,
        r,
        x_star: x,
        u_star,
        y_star: blocks.y,
        z_star: blocks.z,
        s_star: blocks.s,
        t_star: blocks.t,
        v_star: blocks.v,
        dual_objective,
        report,
        iterations: sol.iterations,
        engine: solver.name(),
        warm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::Backend;

    fn simplex() -> SolveOptions {
        SolveOptions { backend: Backend::Simplex, ..Default::default() }
    }

    #[test]
    fn identity_two_by_two_has_half_objective() {
        let a = DenseMatrix::identity(2);
        let s = solve_direct(&a, 1, &simplex()).unwrap();
        assert!((s.u_star - 0.5).abs() < 1e-9, "{}", s.u_star);
        assert!((s.dual_objective - 0.5).abs() < 1e-9);
        assert!(s.v_star <= 1e-9);
        let tr: f64 = s.diag().iter().sum();
        assert!((tr - 1.0).abs() < 1e-9);
    }

    #[test]
    fn pure_columns_give_zero_objective() {
        // columns 0 and 1 are pure, 2 is their midpoint
        let a = DenseMatrix::from_rows(&[&[1.0, 0.0, 0.5], &[0.0, 1.0, 0.5]]).unwrap();
        let l = IndexSet::from(vec![0, 1]);
        let s = solve_subproblem(&a, &l, 2, &simplex()).unwrap();
        assert!(s.u_star.abs() < 1e-9);
        assert!((s.diag().iter().sum::<f64>() - 2.0).abs() < 1e-9);
    }

    #[test]
    fn rectangular_subproblem_has_strong_duality() {
        let a = DenseMatrix::from_fn(3, 6, |i, j| ((i * 7 + j * 3) % 5) as f64 / 4.0 + 0.1);
        let l = IndexSet::from(vec![1, 3, 4]);
        let m = IndexSet::from(vec![0, 1, 2, 3, 4]);
        let s = solve_lm(&a, &l, &m, 2, &simplex()).unwrap();
        assert_eq!(s.x_star.cols(), 5);
        assert!((s.u_star - s.dual_objective).abs() < 1e-7);
    }

    #[cfg(feature = "highs")]
    #[test]
    fn warm_start_on_grown_set_matches_cold_solve() {
        let a = DenseMatrix::from_fn(3, 14, |i, j| (((i + 2) * (j + 5) * 7919) % 97) as f64 / 96.0 + 0.05);
        let opts = SolveOptions { backend: Backend::Highs, ..Default::default() };
        let small = IndexSet::from(vec![0, 3, 5, 8, 9]);
        let first = solve_subproblem(&a, &small, 2, &opts).unwrap();
        let warm = first.warm.clone().unwrap();
        let mut grown = small.clone();
        for j in [1, 12, 4] {
            grown.insert(j);
        }
        let p = build_primal(&a, &grown, &grown, 2).unwrap();
        let mapped = p.map_basis(&warm).unwrap();
        assert_eq!(mapped.len(), p.lp.num_rows());
        let w = solve_lm_warm(&a, &grown, &grown, 2, &opts, Some(&warm)).unwrap();
        let c = solve_subproblem(&a, &grown, 2, &opts).unwrap();
        assert!((w.u_star - c.u_star).abs() < 1e-9, "{} vs {}", w.u_star, c.u_star);
        // shrinking is not supported
        let p_small = build_primal(&a, &IndexSet::from(vec![0, 3]), &IndexSet::from(vec![0, 3]), 2).unwrap();
        assert!(p_small.map_basis(w.warm.as_ref().unwrap()).is_none());
    }

    #[test]
    fn audit_counts_solves() {
        let before = audit().solves;
        solve_direct(&DenseMatrix::identity(2), 1, &simplex()).unwrap();
        assert!(audit().solves > before);
    }
}
