//! Dense revised simplex.
//!
//! Two-phase method on `min cᵀx, Ax = b, x >= 0`. Rows with negative right
//! hand side are negated so the all-artificial basis is feasible for phase
//! one. The basis is kept as a dense LU factorisation with partial pivoting
//! plus an eta file of product-form updates, refactorised every
//! `refactor_every` pivots. Pricing is Dantzig's rule until the number of
//! degenerate pivots exceeds `10 (m + n)`, after which Bland's rule takes
//! over for the rest of the phase.

use std::time::Instant;

use super::{LpError, LpSolution, LpSolver, LpStatus, StandardLp, ToleranceConfig};

#[derive(Debug, Clone, Copy)]
pub struct RevisedSimplex {
    refactor_every: usize,
}

impl Default for RevisedSimplex {
    fn default() -> Self {
        Self::new()
    }
}

impl RevisedSimplex {
    pub const fn new() -> Self {
        Self { refactor_every: 64 }
    }

    pub const fn with_refactor_interval(refactor_every: usize) -> Self {
        Self { refactor_every }
    }
}

impl LpSolver for RevisedSimplex {
    fn name(&self) -> &'static str {
        "revised-simplex"
    }

    fn solve_warm(
        &self,
        lp: &StandardLp,
        tol: &ToleranceConfig,
        warm_basis: Option<&[usize]>,
    ) -> Result<LpSolution, LpError> {
        let mut st = State::new(lp, tol, self.refactor_every.max(1));
        st.run(warm_basis)
    }
}

/// Dense `PA = LU`, row-major.
#[derive(Debug, Clone)]
struct Lu {
    n: usize,
    a: Vec<f64>,
    perm: Vec<usize>,
}

impl Lu {
    fn factor(n: usize, mut a: Vec<f64>) -> Option<Self> {
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
        for k in 0..n {
            let (mut p, mut best) = (k, a[k * n + k].abs());
            for i in (k + 1)..n {
                let v = a[i * n + k].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best <= 1e-13 * scale {
                return None;
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let pivot = a[k * n + k];
            for i in (k + 1)..n {
                let l = a[i * n + k] / pivot;
                if l == 0.0 {
                    continue;
                }
                a[i * n + k] = l;
                let (upper, lower) = a.split_at_mut(i * n);
                let src = &upper[k * n + k + 1..k * n + n];
                let dst = &mut lower[k + 1..n];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d -= l * s;
                }
            }
        }
        Some(Self { n, a, perm })
    }

    /// Solves `B x = rhs`.
    fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| rhs[p]).collect();
        for i in 0..n {
            let row = &self.a[i * n..i * n + i];
            let s: f64 = row.iter().zip(&x[..i]).map(|(l, v)| l * v).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let row = &self.a[i * n + i + 1..(i + 1) * n];
            let s: f64 = row.iter().zip(&x[i + 1..]).map(|(u, v)| u * v).sum();
            x[i] = (x[i] - s) / self.a[i * n + i];
        }
        x
    }

    /// Solves `Bᵀ y = rhs`.
    fn solve_transpose(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut z = rhs.to_vec();
        for i in 0..n {
            let zi = z[i] / self.a[i * n + i];
            z[i] = zi;
            if zi != 0.0 {
                for j in (i + 1)..n {
                    z[j] -= self.a[i * n + j] * zi;
                }
            }
        }
        for i in (0..n).rev() {
            let wi = z[i];
            if wi != 0.0 {
                for j in 0..i {
                    z[j] -= self.a[i * n + j] * wi;
                }
            }
        }
        let mut y = vec![0.0; n];
        for (i, &p) in self.perm.iter().enumerate() {
            y[p] = z[i];
        }
        y
    }
}

/// Product-form update for a pivot in basis position `pos`.
#[derive(Debug, Clone)]
struct Eta {
    pos: usize,
    alpha: Vec<f64>,
}

enum PhaseEnd {
    Optimal,
    Unbounded(Vec<f64>),
    Limit,
}

struct State<'a> {
    lp: &'a StandardLp,
    tol: &'a ToleranceConfig,
    refactor_every: usize,
    m: usize,
    n: usize,
    sign: Vec<f64>,
    b: Vec<f64>,
    basis: Vec<usize>,
    position: Vec<Option<usize>>,
    lu: Option<Lu>,
    etas: Vec<Eta>,
    xb: Vec<f64>,
    iterations: usize,
    cap: usize,
    started: Instant,
    degenerate: usize,
    bland: bool,
}

impl<'a> State<'a> {
    fn new(lp: &'a StandardLp, tol: &'a ToleranceConfig, refactor_every: usize) -> Self {
        let (m, n) = (lp.num_rows(), lp.num_cols());
        let sign: Vec<f64> = lp.rhs().iter().map(|&v| if v < 0.0 { -1.0 } else { 1.0 }).collect();
        let b = lp.rhs().iter().zip(&sign).map(|(v, s)| v * s).collect();
        Self {
            lp,
            tol,
            refactor_every,
            m,
            n,
            sign,
            b,
            basis: Vec::new(),
            position: vec![None; n + m],
            lu: None,
            etas: Vec::new(),
            xb: Vec::new(),
            iterations: 0,
            cap: tol.pivot_cap(m, n),
            started: Instant::now(),
            degenerate: 0,
            bland: false,
        }
    }

    fn column(&self, j: usize) -> Vec<f64> {
        let mut v = vec![0.0; self.m];
        if j < self.n {
            let (idx, val) = self.lp.matrix().col(j);
            for (&i, &a) in idx.iter().zip(val) {
                v[i] = a * self.sign[i];
            }
        } else {
            v[j - self.n] = 1.0;
        }
        v
    }

    fn col_dot(&self, j: usize, y: &[f64]) -> f64 {
        if j < self.n {
            let (idx, val) = self.lp.matrix().col(j);
            idx.iter().zip(val).map(|(&i, &a)| a * self.sign[i] * y[i]).sum()
        } else {
            y[j - self.n]
        }
    }

    fn set_basis(&mut self, basis: Vec<usize>) {
        self.position.iter_mut().for_each(|p| *p = None);
        for (k, &j) in basis.iter().enumerate() {
            self.position[j] = Some(k);
        }
        self.basis = basis;
    }

    fn refactor(&mut self) -> Result<(), LpError> {
        let m = self.m;
        let mut dense = vec![0.0; m * m];
        for (k, &j) in self.basis.iter().enumerate() {
            for (i, v) in self.column(j).into_iter().enumerate() {
                dense[i * m + k] = v;
            }
        }
        self.lu = Some(Lu::factor(m, dense).ok_or(LpError::SingularBasis)?);
        self.etas.clear();
        self.xb = self.ftran(&self.b);
        Ok(())
    }

    fn ftran(&self, rhs: &[f64]) -> Vec<f64> {
        let mut x = self.lu.as_ref().expect("factorised basis").solve(rhs);
        for eta in &self.etas {
            let xp = x[eta.pos] / eta.alpha[eta.pos];
            if xp != 0.0 {
                for (xi, ai) in x.iter_mut().zip(&eta.alpha) {
                    *xi -= ai * xp;
                }
            }
            x[eta.pos] = xp;
        }
        x
    }

    fn btran(&self, rhs: &[f64]) -> Vec<f64> {
        let mut z = rhs.to_vec();
        for eta in self.etas.iter().rev() {
            let p = eta.pos;
            let s: f64 = eta
                .alpha
                .iter()
                .zip(&z)
                .enumerate()
                .filter(|&(i, _)| i != p)
                .map(|(_, (a, v))| a * v)
                .sum();
            z[p] = (z[p] - s) / eta.alpha[p];
        }
        self.lu.as_ref().expect("factorised basis").solve_transpose(&z)
    }

    fn pivot(&mut self, pos: usize, entering: usize, alpha: Vec<f64>) -> Result<(), LpError> {
        let theta = self.xb[pos] / alpha[pos];
        for (x, a) in self.xb.iter_mut().zip(&alpha) {
            *x -= theta * a;
        }
        self.xb[pos] = theta;
        let leaving = self.basis[pos];
        self.position[leaving] = None;
        self.position[entering] = Some(pos);
        self.basis[pos] = entering;
        self.etas.push(Eta { pos, alpha });
        self.iterations += 1;
        if self.etas.len() >= self.refactor_every {
            self.refactor()?;
        }
        Ok(())
    }

    fn out_of_budget(&self) -> bool {
        self.iterations >= self.cap
            || self.tol.time_limit.is_some_and(|t| self.started.elapsed() >= t)
    }

    fn run_phase(
        &mut self,
        cost: &[f64],
        eligible: &dyn Fn(usize) -> bool,
    ) -> Result<PhaseEnd, LpError> {
        let cscale = cost.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let dj_tol = 1e-11 * cscale;
        let degenerate_limit = 10 * (self.m + self.n);
        self.degenerate = 0;
        self.bland = false;
        loop {
            if self.out_of_budget() {
                return Ok(PhaseEnd::Limit);
            }
            let cb: Vec<f64> = self.basis.iter().map(|&j| cost[j]).collect();
            let y = self.btran(&cb);

            let mut entering = None;
            let mut best = -dj_tol;
            for j in 0..cost.len() {
                if self.position[j].is_some() || !eligible(j) {
                    continue;
                }
                let d = cost[j] - self.col_dot(j, &y);
                if d < best {
                    entering = Some(j);
                    if self.bland {
                        break;
                    }
                    best = d;
                }
            }
            let Some(q) = entering else {
                return Ok(PhaseEnd::Optimal);
            };

            let alpha = self.ftran(&self.column(q));
            let amax = alpha.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let piv_tol = 1e-9 * amax.max(1.0);
            let mut theta = f64::INFINITY;
            for (i, &a) in alpha.iter().enumerate() {
                if a > piv_tol {
                    theta = theta.min(self.xb[i].max(0.0) / a);
                }
            }
            if !theta.is_finite() {
                let mut ray = vec![0.0; self.n];
                if q < self.n {
                    ray[q] = 1.0;
                }
                for (i, &j) in self.basis.iter().enumerate() {
                    if j < self.n {
                        ray[j] = -alpha[i];
                    }
                }
                return Ok(PhaseEnd::Unbounded(ray));
            }
            let slack = 1e-12 * theta.max(1.0);
            let mut pos = usize::MAX;
            for (i, &a) in alpha.iter().enumerate() {
                if a <= piv_tol || self.xb[i].max(0.0) / a > theta + slack {
                    continue;
                }
                let better = if pos == usize::MAX {
                    true
                } else if self.bland {
                    self.basis[i] < self.basis[pos]
                } else {
                    a > alpha[pos]
                };
                if better {
                    pos = i;
                }
            }
            if theta <= 1e-12 {
                self.degenerate += 1;
                if self.degenerate > degenerate_limit {
                    self.bland = true;
                }
            }
            if self.xb[pos] < 0.0 {
                self.xb[pos] = 0.0;
            }
            self.pivot(pos, q, alpha)?;
        }
    }

    fn run(&mut self, warm: Option<&[usize]>) -> Result<LpSolution, LpError> {
        let (m, n) = (self.m, self.n);
        let bscale = self.b.iter().fold(1.0f64, |a, v| a.max(v.abs()));
        let feas = self.tol.feas_tol * bscale;

        let mut warm_ok = false;
        if let Some(wb) = warm {
            let distinct = {
                let mut s = wb.to_vec();
                s.sort_unstable();
                s.dedup();
                s.len() == m
            };
            if wb.len() == m && distinct && wb.iter().all(|&j| j < n) {
                self.set_basis(wb.to_vec());
                if self.refactor().is_ok() && self.xb.iter().all(|&v| v >= -feas) {
                    warm_ok = true;
                }
            }
        }

        if !warm_ok {
            self.set_basis((n..n + m).collect());
            self.refactor()?;
            let mut phase1 = vec![0.0; n + m];
            phase1[n..].iter_mut().for_each(|c| *c = 1.0);
            match self.run_phase(&phase1, &|_| true)? {
                PhaseEnd::Limit => return Ok(self.finish(LpStatus::IterLimit, None)),
                PhaseEnd::Unbounded(_) => return Err(LpError::Backend("phase one unbounded".into())),
                PhaseEnd::Optimal => {}
            }
            self.refactor()?;
            let infeas: f64 = self
                .basis
                .iter()
                .zip(&self.xb)
                .filter(|(&j, _)| j >= n)
                .map(|(_, &v)| v.max(0.0))
                .sum();
            if infeas > feas {
                let cb: Vec<f64> = self.basis.iter().map(|&j| phase1[j]).collect();
                let yhat = self.btran(&cb);
                let y: Vec<f64> = yhat.iter().zip(&self.sign).map(|(v, s)| v * s).collect();
                return Ok(self.finish(LpStatus::Infeasible, Some(y)));
            }
            self.drive_out_artificials()?;
        }

        let mut cost = self.lp.cost().to_vec();
        cost.resize(n + m, 0.0);
        let end = self.run_phase(&cost, &|j| j < n)?;
        match end {
            PhaseEnd::Limit => Ok(self.finish(LpStatus::IterLimit, None)),
            PhaseEnd::Unbounded(ray) => Ok(self.finish(LpStatus::Unbounded, Some(ray))),
            PhaseEnd::Optimal => {
                self.refactor()?;
                Ok(self.finish(LpStatus::Optimal, None))
            }
        }
    }

    /// Pivots zero-level artificials out of the basis wherever a structural
    /// column can replace them; the rest sit on redundant rows.
    fn drive_out_artificials(&mut self) -> Result<(), LpError> {
        let n = self.n;
        for pos in 0..self.m {
            if self.basis[pos] < n {
                continue;
            }
            let mut e = vec![0.0; self.m];
            e[pos] = 1.0;
            let row = self.btran(&e);
            let mut best: Option<(usize, f64)> = None;
            for j in 0..n {
                if self.position[j].is_some() {
                    continue;
                }
                let v = self.col_dot(j, &row).abs();
                if v > 1e-9 && best.is_none_or(|(_, b)| v > b) {
                    best = Some((j, v));
                }
            }
            if let Some((j, _)) = best {
                let alpha = self.ftran(&self.column(j));
                self.pivot(pos, j, alpha)?;
            }
        }
        self.refactor()
    }

    fn finish(&self, status: LpStatus, certificate: Option<Vec<f64>>) -> LpSolution {
        let (m, n) = (self.m, self.n);
        let mut x = vec![0.0; n];
        for (k, &j) in self.basis.iter().enumerate() {
            if j < n {
                x[j] = self.xb[k];
            }
        }
        let neg_tol = self.tol.feas_tol * 1e-2;
        for v in x.iter_mut() {
            if *v < 0.0 && *v > -neg_tol {
                *v = 0.0;
            }
        }
        let y = if status == LpStatus::Optimal {
            let cb: Vec<f64> = self
                .basis
                .iter()
                .map(|&j| if j < n { self.lp.cost()[j] } else { 0.0 })
                .collect();
            let yhat = self.btran(&cb);
            yhat.iter().zip(&self.sign).map(|(v, s)| v * s).collect()
        } else {
            vec![0.0; m]
        };
        let objective = self.lp.cost().iter().zip(&x).map(|(c, v)| c * v).sum();
        let basis = (status == LpStatus::Optimal && self.basis.iter().all(|&j| j < n))
            .then(|| self.basis.clone());
        LpSolution { status, x, y, objective, basis, certificate, iterations: self.iterations }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::DenseMatrix;
    use crate::lp::verify;

    fn lp(c: &[f64], a: &[&[f64]], b: &[f64]) -> StandardLp {
        StandardLp::from_dense(c.to_vec(), &DenseMatrix::from_rows(a).unwrap(), b.to_vec()).unwrap()
    }

    #[test]
    fn lu_round_trip() {
        let a = vec![2.0, 1.0, 0.0, 4.0, 3.0, 1.0, 0.0, 5.0, 6.0];
        let lu = Lu::factor(3, a.clone()).unwrap();
        let x = lu.solve(&[1.0, 2.0, 3.0]);
        for i in 0..3 {
            let s: f64 = (0..3).map(|j| a[i * 3 + j] * x[j]).sum();
            assert!((s - [1.0, 2.0, 3.0][i]).abs() < 1e-12);
        }
        let y = lu.solve_transpose(&[1.0, 2.0, 3.0]);
        for j in 0..3 {
            let s: f64 = (0..3).map(|i| a[i * 3 + j] * y[i]).sum();
            assert!((s - [1.0, 2.0, 3.0][j]).abs() < 1e-12);
        }
    }

    #[test]
    fn simplex_corner_with_slack() {
        // min -x1 - x2  s.t.  x1 + x2 + s = 1
        let p = lp(&[-1.0, -1.0, 0.0], &[&[1.0, 1.0, 1.0]], &[1.0]);
        let s = RevisedSimplex::new().solve(&p, &ToleranceConfig::default()).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective + 1.0).abs() < 1e-12);
        assert!((s.y[0] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn redundant_rows_keep_artificial() {
        // x1 + x2 = 1 stated twice.
        let p = lp(&[1.0, 2.0], &[&[1.0, 1.0], &[1.0, 1.0]], &[1.0, 1.0]);
        let s = RevisedSimplex::new().solve(&p, &ToleranceConfig::default()).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective - 1.0).abs() < 1e-12);
        assert!(verify(&p, &s.x, &s.y).passes(&ToleranceConfig::default()));
    }

    #[test]
    fn negative_rhs_rows_are_flipped() {
        // min x1 + x2  s.t.  -x1 + x3 = -2,  x2 - x3 = 0   -> x1 = 2, objective 2
        let p = lp(&[1.0, 1.0, 0.0], &[&[-1.0, 0.0, 1.0], &[0.0, 1.0, -1.0]], &[-2.0, 0.0]);
        let s = RevisedSimplex::new().solve(&p, &ToleranceConfig::default()).unwrap();
        assert!((s.objective - 2.0).abs() < 1e-12);
        assert!(verify(&p, &s.x, &s.y).passes(&ToleranceConfig::default()));
    }

    #[test]
    fn warm_start_from_optimal_basis_takes_no_pivots() {
        let p = lp(
            &[-3.0, -2.0, 0.0, 0.0],
            &[&[1.0, 1.0, 1.0, 0.0], &[2.0, 1.0, 0.0, 1.0]],
            &[4.0, 6.0],
        );
        let tol = ToleranceConfig::default();
        let cold = RevisedSimplex::new().solve(&p, &tol).unwrap();
        let basis = cold.basis.clone().unwrap();
        let warm = RevisedSimplex::new().solve_warm(&p, &tol, Some(&basis)).unwrap();
        assert_eq!(warm.iterations, 0);
        assert!((warm.objective - cold.objective).abs() < 1e-12);
        // A singular or infeasible hint silently falls back to a cold start.
        let bad = RevisedSimplex::new().solve_warm(&p, &tol, Some(&[0, 0])).unwrap();
        assert!((bad.objective - cold.objective).abs() < 1e-12);
    }

    #[test]
    fn pivot_cap_reports_iter_limit() {
        let p = lp(
            &[-3.0, -2.0, 0.0, 0.0],
            &[&[1.0, 1.0, 1.0, 0.0], &[2.0, 1.0, 0.0, 1.0]],
            &[4.0, 6.0],
        );
        let tol = ToleranceConfig { max_pivots: Some(1), ..Default::default() };
        let s = RevisedSimplex::new().solve(&p, &tol).unwrap();
        assert_eq!(s.status, LpStatus::IterLimit);
    }

    #[test]
    fn frequent_refactorisation_gives_same_answer() {
        let p = lp(
            &[-3.0, -2.0, -4.0, 0.0, 0.0],
            &[&[1.0, 1.0, 2.0, 1.0, 0.0], &[2.0, 1.0, 3.0, 0.0, 1.0]],
            &[4.0, 5.0],
        );
        let tol = ToleranceConfig::default();
        let a = RevisedSimplex::new().solve(&p, &tol).unwrap();
        let b = RevisedSimplex::with_refactor_interval(1).solve(&p, &tol).unwrap();
        assert!((a.objective - b.objective).abs() < 1e-12);
    }
}
