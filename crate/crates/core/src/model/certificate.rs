use rayon::prelude::*;
use serde::Serialize;

use crate::linalg::{dot, l1_norm, DenseMatrix};
use crate::lp::verify;
use crate::IndexSet;

use super::primal::{build_primal, DualBlocks};
use super::rj::RjSolution;
use super::subproblem::SubproblemSolution;
use super::ModelError;

/// Tolerance used for the strict inequalities of the expansion tests.
pub fn default_eps(u_star: f64) -> f64 {
    1e-7 * u_star.abs().max(1.0)
}

/// `‖A - AX‖₁`.
pub fn hottopixx_objective(a: &DenseMatrix, x: &DenseMatrix) -> f64 {
    l1_norm(&a.sub(&a.matmul(x)))
}

fn assert_square(sub: &SubproblemSolution) {
    assert_eq!(sub.x_star.cols(), sub.l.len(), "certificates need a P(L, L) solution");
}

/// Columns `j` whose `R_j` optimum exceeds `u* + eps`, ascending.
pub fn check_c1(sub: &SubproblemSolution, rjs: &[RjSolution], eps: f64) -> (bool, IndexSet) {
    let mut v: Vec<usize> =
        rjs.iter().filter(|s| s.opt_value > sub.u_star + eps).map(|s| s.j).collect();
    v.sort_unstable();
    (v.is_empty(), IndexSet::from(v))
}

/// `v* + 1ᵀ((Y*)ᵀ a_j)⁺`.
pub fn c2_price(sub: &SubproblemSolution, a: &DenseMatrix, j: usize) -> f64 {
    let aj = a.col(j);
    sub.v_star + sub.y_star.columns().map(|y| dot(y, aj).max(0.0)).sum::<f64>()
}

/// Columns `j` outside `L` whose price `v* + 1ᵀ((Y*)ᵀ a_j)⁺` exceeds `eps`,
/// ascending.
pub fn check_c2(sub: &SubproblemSolution, a: &DenseMatrix, eps: f64) -> (bool, IndexSet) {
    assert_square(sub);
    let rest = sub.l.complement(a.cols());
    let v: Vec<usize> = rest
        .as_slice()
        .par_iter()
        .copied()
        .filter(|&j| c2_price(sub, a, j) > eps)
        .collect();
    (v.is_empty(), IndexSet::from(v))
}

/// `X = Pi [X* Gamma*; O O] Piᵀ` in natural column order.
pub fn assemble_full(
    sub: &SubproblemSolution,
    rjs: &[RjSolution],
    n: usize,
) -> Result<DenseMatrix, ModelError> {
    assert_square(sub);
    let l = sub.l.as_slice();
    let mut x = DenseMatrix::zeros(n, n);
    for (q, &j) in l.iter().enumerate() {
        for (p, &i) in l.iter().enumerate() {
            x.set(i, j, sub.x_star.get(p, q));
        }
    }
    let mut by_j: Vec<Option<&RjSolution>> = vec![None; n];
    for s in rjs {
        if s.j < n {
            by_j[s.j] = Some(s);
        }
    }
    for j in sub.l.complement(n).iter() {
        let s = by_j[j].ok_or(ModelError::MissingRj(j))?;
        for (p, &i) in l.iter().enumerate() {
            x.set(i, j, s.gamma[p]);
        }
    }
    Ok(x)
}

/// Outcome of [`certify_global`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificateReport {
    /// `‖A - AX‖₁` of the assembled `X`.
    pub primal_objective: f64,
    /// `<A, Y> + r v - 1ᵀt` of the padded dual.
    pub dual_objective: f64,
    pub subproblem_objective: f64,
    pub max_primal_violation: f64,
    pub max_dual_violation: f64,
    pub feasibility_tol: f64,
    /// Whether the candidate pair was also audited as vectors of the full
    /// equality-form LP (done for small `n`).
    pub lp_audited: bool,
}

/// Largest `n` for which the candidate pair is also pushed through
/// [`verify`] on the explicit full LP.
pub const LP_AUDIT_MAX_N: usize = 60;

struct Blocks {
    worst: (&'static str, f64),
    tol: f64,
}

impl Blocks {
    fn check(&mut self, block: &'static str, violation: f64) -> Result<(), ModelError> {
        if violation > self.worst.1 {
            self.worst = (block, violation);
        }
        if violation > self.tol {
            return Err(ModelError::Certificate { block, violation });
        }
        Ok(())
    }
}

/// Builds the padded primal candidate `(X, R⁺, R⁻, ‖R‖₁)` and dual candidate
/// `Y = [Y*, O] Piᵀ`, `Z = Pi [Z* Δ⁺; O O] Piᵀ` with `Δ = (Y*)ᵀ A(N \ L)`,
/// zero-padded `s`, `t` and `v = v*`, then checks every constraint block of
/// the full primal and dual and the equality of both objectives.
///
/// On success the assembled `X` is a globally optimal solution of the full
/// model; on failure the first violated block is returned.
pub fn certify_global(
    a: &DenseMatrix,
    sub: &SubproblemSolution,
    rjs: &[RjSolution],
    eps: f64,
) -> Result<CertificateReport, ModelError> {
    assert_square(sub);
    let (d, n) = (a.rows(), a.cols());
    let r = sub.r as f64;
    let l = sub.l.as_slice();
    let mut pos: Vec<Option<usize>> = vec![None; n];
    for (q, &j) in l.iter().enumerate() {
        pos[j] = Some(q);
    }
    let scale = a.max_abs().max(1.0);
    let tol = eps.max(1e-7) * scale;

    // Primal candidate.
    let x = assemble_full(sub, rjs, n)?;
    let mut primal = Blocks { worst: ("", 0.0), tol: 1e-9 * scale };
    let mut bound = 0.0f64;
    for j in 0..n {
        for i in 0..n {
            let (xij, xii) = (x.get(i, j), x.get(i, i));
            bound = bound.max(-xij).max(xij - xii).max(xii - 1.0);
        }
    }
    primal.check("P: 0 <= X(i,j) <= X(i,i) <= 1", bound)?;
    let trace: f64 = (0..n).map(|i| x.get(i, i)).sum();
    primal.tol = 1e-7;
    primal.check("P: trace X = r", (trace - r).abs())?;
    let primal_objective = hottopixx_objective(a, &x);
    let u_gap = (primal_objective - sub.u_star).abs() / sub.u_star.abs().max(1.0);
    primal.tol = 1e-6;
    primal.check("P: objective equals u*", u_gap)?;

    // Dual candidate. B = Aᵀ Y* gives (AᵀY)(k, j) for j in L; columns of Y
    // outside L are zero.
    let b = DenseMatrix::from_fn(n, l.len(), |k, q| dot(a.col(k), sub.y_star.col(q)));
    let z = |j: usize, k: usize| -> f64 {
        match (pos[j], pos[k]) {
            (Some(q), Some(p)) => sub.z_star.get(q, p),
            (Some(q), None) => b.get(k, q).max(0.0),
            _ => 0.0,
        }
    };
    let aty = |k: usize, j: usize| pos[j].map_or(0.0, |q| b.get(k, q));
    let t_full = |k: usize| pos[k].map_or(0.0, |p| sub.t_star[p]);

    let mut dual = Blocks { worst: ("", 0.0), tol };
    let sign = sub
        .s_star
        .iter()
        .chain(&sub.t_star)
        .chain(sub.z_star.data())
        .fold(0.0f64, |m, &v| m.max(-v));
    dual.check("D: s, t, Z >= 0", sign)?;
    let ybound = (0..l.len())
        .flat_map(|q| sub.y_star.col(q).iter().map(move |y| (q, y.abs())))
        .fold(0.0f64, |m, (q, y)| m.max(y - sub.s_star[q]));
    dual.check("D: |Y| <= s", ybound)?;
    dual.check("D: 1ᵀs <= 1", sub.s_star.iter().sum::<f64>() - 1.0)?;

    let zcol: Vec<f64> = (0..n).map(|k| (0..n).map(|j| z(j, k)).sum()).collect();
    let names = [
        ["D: M[L, L]", "D: M[L, N\\L]"],
        ["D: M[N\\L, L]", "D: M[N\\L, N\\L]"],
    ];
    let worst = (0..n)
        .into_par_iter()
        .map(|k| {
            let mut local = [[0.0f64; 2]; 2];
            for j in 0..n {
                let mut mkj = aty(k, j) - z(j, k);
                if k == j {
                    mkj += sub.v_star - t_full(k) + zcol[k];
                }
                let cell = &mut local[usize::from(pos[k].is_none())][usize::from(pos[j].is_none())];
                *cell = cell.max(mkj);
            }
            local
        })
        .reduce(
            || [[0.0f64; 2]; 2],
            |mut acc, x| {
                for p in 0..2 {
                    for q in 0..2 {
                        acc[p][q] = acc[p][q].max(x[p][q]);
                    }
                }
                acc
            },
        );
    for p in 0..2 {
        for q in 0..2 {
            dual.check(names[p][q], worst[p][q])?;
        }
    }

    let mut dual_objective = r * sub.v_star - sub.t_star.iter().sum::<f64>();
    for (q, &j) in l.iter().enumerate() {
        dual_objective += dot(a.col(j), sub.y_star.col(q));
    }
    let gap = (primal_objective - dual_objective).abs() / primal_objective.abs().max(1.0);
    let mut obj = Blocks { worst: ("", 0.0), tol: 1e-6 };
    obj.check("objective equality", gap)?;

    let mut lp_audited = false;
    if n <= LP_AUDIT_MAX_N {
        let full = IndexSet::full(n);
        let p = build_primal(a, &full, &full, sub.r)?;
        let xv = p.primal_vector(a, &full, &x);
        let y_full = DenseMatrix::from_fn(d, n, |i, j| pos[j].map_or(0.0, |q| sub.y_star.get(i, q)));
        let blocks = DualBlocks {
            y: y_full,
            z: DenseMatrix::from_fn(n, n, |j, k| if j == k { 0.0 } else { z(j, k) }),
            s: (0..n).map(|j| pos[j].map_or(0.0, |q| sub.s_star[q])).collect(),
            t: (0..n).map(t_full).collect(),
            v: sub.v_star,
        };
        let rep = verify(&p.lp, &xv, &p.dual_vector(&blocks));
        let mut audit = Blocks { worst: ("", 0.0), tol };
        audit.check("LP audit: primal residual", rep.primal_residual)?;
        audit.check("LP audit: bounds", rep.bound_violation)?;
        audit.check("LP audit: dual residual", rep.dual_residual)?;
        audit.tol = 1e-6;
        audit.check("LP audit: gap", rep.duality_gap / rep.primal_objective.abs().max(1.0))?;
        lp_audited = true;
    }

    Ok(CertificateReport {
        primal_objective,
        dual_objective,
        subproblem_objective: sub.u_star,
        max_primal_violation: primal.worst.1.max(bound),
        max_dual_violation: dual.worst.1,
        feasibility_tol: tol,
        lp_audited,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{solve_all_rj, solve_direct, solve_subproblem, SolveOptions};

    #[test]
    fn c1_threshold_semantics() {
        let a = DenseMatrix::identity(2);
        let mut sub = solve_direct(&a, 1, &SolveOptions::default()).unwrap();
        sub.u_star = 0.5;
        let eps = 1e-3;
        let rjs = vec![
            RjSolution { j: 5, gamma: vec![], opt_value: 0.6 },
            RjSolution { j: 3, gamma: vec![], opt_value: 0.5 + eps / 2.0 },
        ];
        let (ok, viol) = check_c1(&sub, &rjs, eps);
        assert!(!ok);
        assert_eq!(viol.as_slice(), &[5]);
    }

    #[test]
    fn c2_price_arithmetic() {
        let a = DenseMatrix::from_rows(&[&[1.0, 0.0, 0.4], &[0.0, 1.0, 0.8]]).unwrap();
        let l = IndexSet::from(vec![0, 1]);
        let mut sub = solve_subproblem(&a, &l, 1, &SolveOptions::default()).unwrap();
        sub.y_star = DenseMatrix::identity(2);
        sub.v_star = -1.0;
        assert!((c2_price(&sub, &a, 2) - 0.2).abs() < 1e-15);
        let (ok, viol) = check_c2(&sub, &a, 1e-9);
        assert!(!ok);
        assert_eq!(viol.as_slice(), &[2]);
        sub.y_star = DenseMatrix::zeros(2, 2);
        sub.v_star = 0.0;
        assert!(check_c2(&sub, &a, 1e-9).0);
    }

    #[test]
    fn full_set_certificate_is_the_direct_solve() {
        let a = DenseMatrix::from_fn(3, 5, |i, j| ((i * 5 + j * 3) % 7) as f64 / 6.0 + 0.05);
        let sub = solve_direct(&a, 2, &SolveOptions::default()).unwrap();
        let x = assemble_full(&sub, &[], 5).unwrap();
        assert_eq!(x, sub.x_star);
        let rep = certify_global(&a, &sub, &[], default_eps(sub.u_star)).unwrap();
        assert!(rep.lp_audited);
        assert!((rep.primal_objective - sub.u_star).abs() < 1e-9);
    }

    #[test]
    fn separable_instance_certifies_from_pure_columns() {
        // columns 1 and 3 are pure; the rest are convex combinations
        let w = [[0.9, 0.1], [0.2, 0.7], [0.1, 0.3]];
        let h = [[0.5, 1.0, 0.3, 0.0, 0.8], [0.5, 0.0, 0.7, 1.0, 0.2]];
        let a = DenseMatrix::from_fn(3, 5, |i, j| w[i][0] * h[0][j] + w[i][1] * h[1][j]);
        let l = IndexSet::from(vec![1, 3]);
        let opts = SolveOptions::default();
        let sub = solve_subproblem(&a, &l, 2, &opts).unwrap();
        assert!(sub.u_star.abs() < 1e-9);
        let rjs = solve_all_rj(&a, &sub, &opts).unwrap();
        let eps = default_eps(sub.u_star);
        assert!(check_c1(&sub, &rjs, eps).0);
        let x = assemble_full(&sub, &rjs, 5).unwrap();
        for i in [0, 2, 4] {
            assert!(x.row(i).iter().all(|&v| v == 0.0));
        }
        if check_c2(&sub, &a, eps).0 {
            let rep = certify_global(&a, &sub, &rjs, eps).unwrap();
            assert!(rep.primal_objective.abs() < 1e-9);
            assert!(rep.dual_objective.abs() < 1e-7);
        }
    }
}
