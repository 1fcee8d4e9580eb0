use highs::{ColProblem, HighsModelStatus, Row, Sense};

use super::{LpError, LpSolution, LpSolver, LpStatus, StandardLp, ToleranceConfig};

/// HiGHS simplex behind the [`LpSolver`] seam.
///
/// A warm basis uses the [`LpSolution::basis`] convention: indices below
/// the column count are structural, `n + i` is the logical of row `i`.
#[derive(Debug, Clone, Copy, Default)]
pub struct HighsSolver;

impl HighsSolver {
    pub const fn new() -> Self {
        Self
    }
}

impl LpSolver for HighsSolver {
    fn name(&self) -> &'static str {
        "highs"
    }

    fn solve_warm(
        &self,
        lp: &StandardLp,
        tol: &ToleranceConfig,
        warm_basis: Option<&[usize]>,
    ) -> Result<LpSolution, LpError> {
        let (m, n) = (lp.num_rows(), lp.num_cols());
        let mut pb = ColProblem::default();
        let rows: Vec<Row> = lp.rhs().iter().map(|&b| pb.add_row(b..=b)).collect();
        let a = lp.matrix();
        let mut entries: Vec<(Row, f64)> = Vec::new();
        for j in 0..n {
            let (idx, val) = a.col(j);
            entries.clear();
            entries.extend(idx.iter().zip(val).map(|(&i, &v)| (rows[i], v)));
            pb.add_column(lp.cost()[j], 0.0.., &entries);
        }

        let mut model = pb.try_optimise(Sense::Minimise).map_err(|e| LpError::Backend(format!("{e:?}")))?;
        model.make_quiet();
        let set = |model: &mut highs::Model, name: &str, v: f64| {
            model
                .try_set_option(name, v)
                .map_err(|e| LpError::Backend(format!("option {name}: {e:?}")))
        };
        set(&mut model, "primal_feasibility_tolerance", tol.feas_tol.max(1e-10))?;
        set(&mut model, "dual_feasibility_tolerance", tol.feas_tol.max(1e-10))?;
        if let Some(t) = tol.time_limit {
            set(&mut model, "time_limit", t.as_secs_f64())?;
        }
        model
            .try_set_option("solver", "simplex")
            .map_err(|e| LpError::Backend(format!("option solver: {e:?}")))?;
        if let Some(cap) = tol.max_pivots {
            model
                .try_set_option("simplex_iteration_limit", cap.min(i32::MAX as usize) as i32)
                .map_err(|e| LpError::Backend(format!("option simplex_iteration_limit: {e:?}")))?;
        }

        if let Some(wb) = warm_basis.filter(|wb| wb.len() == m) {
            let mut col = vec![highs_sys::kHighsBasisStatusLower; n];
            let mut row = vec![highs_sys::kHighsBasisStatusLower; m];
            let mut ok = true;
            for &k in wb {
                let slot = if k < n { col.get_mut(k) } else { row.get_mut(k - n) };
                match slot {
                    Some(s) if *s != highs_sys::kHighsBasisStatusBasic => *s = highs_sys::kHighsBasisStatusBasic,
                    _ => ok = false,
                }
            }
            // an invalid basis is rejected by HiGHS, which then starts cold
            if ok {
                unsafe { highs_sys::Highs_setBasis(model.as_mut_ptr(), col.as_ptr(), row.as_ptr()) };
            }
        }
        let solved = model.try_solve().map_err(|e| LpError::Backend(format!("{e:?}")))?;
        let iterations = solved.simplex_iteration_count().max(0) as usize;
        let status = match solved.status() {
            HighsModelStatus::Optimal => LpStatus::Optimal,
            HighsModelStatus::Infeasible => LpStatus::Infeasible,
            HighsModelStatus::Unbounded | HighsModelStatus::UnboundedOrInfeasible => {
                LpStatus::Unbounded
            }
            HighsModelStatus::ReachedTimeLimit | HighsModelStatus::ReachedIterationLimit => {
                LpStatus::IterLimit
            }
            other => return Err(LpError::Backend(format!("HiGHS model status {other:?}"))),
        };
        if status != LpStatus::Optimal {
            return Ok(LpSolution {
                status,
                x: vec![0.0; n],
                y: vec![0.0; m],
                objective: f64::NAN,
                basis: None,
                certificate: None,
                iterations,
            });
        }
        let sol = solved.get_solution();
        let x: Vec<f64> = sol.columns().to_vec();
        let y: Vec<f64> = sol.dual_rows().to_vec();
        let objective = lp.cost().iter().zip(&x).map(|(c, v)| c * v).sum();
        let basis = read_basis(&solved, n, m);
        Ok(LpSolution { status, x, y, objective, basis, certificate: None, iterations })
    }
}

fn read_basis(solved: &highs::SolvedModel, n: usize, m: usize) -> Option<Vec<usize>> {
    let mut col = vec![0; n];
    let mut row = vec![0; m];
    let status = unsafe { highs_sys::Highs_getBasis(solved.as_ptr(), col.as_mut_ptr(), row.as_mut_ptr()) };
    if status != highs_sys::kHighsStatusOk {
        return None;
    }
    let basic = highs_sys::kHighsBasisStatusBasic;
    let basis: Vec<usize> = (0..n)
        .filter(|&j| col[j] == basic)
        .chain((0..m).filter(|&i| row[i] == basic).map(|i| n + i))
        .collect();
    (basis.len() == m).then_some(basis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::DenseMatrix;
    use crate::lp::{verify, RevisedSimplex};

    #[test]
    fn dual_sign_convention_matches_simplex() {
        let a = DenseMatrix::from_rows(&[&[1.0, 1.0, 1.0, 0.0], &[2.0, 1.0, 0.0, 1.0]]).unwrap();
        let lp = StandardLp::from_dense(vec![-3.0, -2.0, 0.0, 0.0], &a, vec![4.0, 6.0]).unwrap();
        let tol = ToleranceConfig::default();
        let h = HighsSolver.solve(&lp, &tol).unwrap();
        let s = RevisedSimplex::new().solve(&lp, &tol).unwrap();
        assert_eq!(h.status, LpStatus::Optimal);
        assert!((h.objective - s.objective).abs() < 1e-9);
        for (a, b) in h.y.iter().zip(&s.y) {
            assert!((a - b).abs() < 1e-9, "{:?} vs {:?}", h.y, s.y);
        }
        assert!(verify(&lp, &h.x, &h.y).passes(&tol));
    }

    #[test]
    fn warm_restart_from_final_basis_is_immediate() {
        let a = DenseMatrix::from_rows(&[&[1.0, 1.0, 1.0, 0.0], &[2.0, 1.0, 0.0, 1.0]]).unwrap();
        let lp = StandardLp::from_dense(vec![-3.0, -2.0, 0.0, 0.0], &a, vec![4.0, 6.0]).unwrap();
        let tol = ToleranceConfig::default();
        let cold = HighsSolver.solve(&lp, &tol).unwrap();
        let basis = cold.basis.clone().unwrap();
        assert_eq!(basis.len(), 2);
        let warm = HighsSolver.solve_warm(&lp, &tol, Some(&basis)).unwrap();
        assert_eq!(warm.iterations, 0);
        assert!((warm.objective - cold.objective).abs() < 1e-12);
    }

    #[test]
    fn infeasible_reported() {
        let a = DenseMatrix::from_rows(&[&[1.0]]).unwrap();
        let lp = StandardLp::from_dense(vec![0.0], &a, vec![-1.0]).unwrap();
        let h = HighsSolver.solve(&lp, &ToleranceConfig::default()).unwrap();
        assert_eq!(h.status, LpStatus::Infeasible);
    }
}
