use super::{axpy, dot, norm2, DenseMatrix, LinalgError};

const MAX_SWEEPS: usize = 80;

/// Leading `r` singular triplets of a matrix.
#[derive(Debug, Clone)]
pub struct SvdTruncation {
    /// `d x r`, orthonormal columns.
    pub u: DenseMatrix,
    /// Nonincreasing, nonnegative.
    pub sigma: Vec<f64>,
    /// `n x r`, orthonormal columns.
    pub v: DenseMatrix,
}

impl SvdTruncation {
    pub fn rank(&self) -> usize {
        self.sigma.len()
    }

    /// `U_r Σ_r V_rᵀ`.
    pub fn reconstruct(&self) -> DenseMatrix {
        let us = DenseMatrix::from_fn(self.u.rows(), self.rank(), |i, k| {
            self.u.get(i, k) * self.sigma[k]
        });
        us.matmul(&self.v.transpose())
    }

    /// The size-reduced matrix `Σ_r V_rᵀ` (`r x n`).
    pub fn reduced(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.rank(), self.v.rows(), |k, j| self.sigma[k] * self.v.get(j, k))
    }
}

/// Top-`r` SVD by one-sided (Hestenes) Jacobi rotations.
///
/// The rotations act on the columns of whichever of `A` and `Aᵀ` has fewer
/// columns, so a `d x n` input with `d << n` costs `O(d² n)` per sweep.
pub fn truncated_svd(a: &DenseMatrix, r: usize) -> Result<SvdTruncation, LinalgError> {
    let (d, n) = (a.rows(), a.cols());
    if r == 0 || r > d.min(n) {
        return Err(LinalgError::RankOutOfRange { rank: r, rows: d, cols: n });
    }
    let transposed = d <= n;
    // Work matrix M (p x q) whose q columns are orthogonalised; q = min(d, n).
    let mut work = if transposed { a.transpose() } else { a.clone() };
    let q = work.cols();
    let mut rot = DenseMatrix::identity(q);
    jacobi_orthogonalize(&mut work, &mut rot)?;

    let mut sigma: Vec<f64> = (0..q).map(|k| norm2(work.col(k))).collect();
    let mut order: Vec<usize> = (0..q).collect();
    order.sort_by(|&i, &j| sigma[j].total_cmp(&sigma[i]).then(i.cmp(&j)));
    sigma = order.iter().map(|&k| sigma[k]).collect();

    // work = (left factor of M) * Σ ; rot holds the right factor of M.
    let smax = sigma[0];
    let tiny = smax * f64::EPSILON * (q.max(work.rows())) as f64;
    let mut m_left: Vec<Vec<f64>> = Vec::with_capacity(r);
    for &k in order.iter().take(r) {
        let s = norm2(work.col(k));
        if s > tiny {
            m_left.push(work.col(k).iter().map(|v| v / s).collect());
        } else {
            m_left.push(Vec::new());
        }
    }
    complete_orthonormal(&mut m_left, work.rows());
    let m_right: Vec<Vec<f64>> = order.iter().take(r).map(|&k| rot.col(k).to_vec()).collect();
    sigma.truncate(r);

    // M = Aᵀ when transposed: Aᵀ = P Σ Qᵀ  =>  A = Q Σ Pᵀ.
    let (u_cols, v_cols) = if transposed { (m_right, m_left) } else { (m_left, m_right) };
    Ok(SvdTruncation {
        u: DenseMatrix::from_columns(&u_cols)?,
        sigma,
        v: DenseMatrix::from_columns(&v_cols)?,
    })
}

fn jacobi_orthogonalize(work: &mut DenseMatrix, rot: &mut DenseMatrix) -> Result<(), LinalgError> {
    let q = work.cols();
    let tol = 1e-15;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..q {
            for j in (i + 1)..q {
                let alpha = dot(work.col(i), work.col(i));
                let beta = dot(work.col(j), work.col(j));
                let gamma = dot(work.col(i), work.col(j));
                if gamma == 0.0 || gamma.abs() <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate_columns(work, i, j, c, s);
                rotate_columns(rot, i, j, c, s);
            }
        }
        if !rotated {
            return Ok(());
        }
    }
    Err(LinalgError::SvdNoConvergence { sweeps: MAX_SWEEPS })
}

fn rotate_columns(m: &mut DenseMatrix, i: usize, j: usize, c: f64, s: f64) {
    let rows = m.rows();
    let (lo, hi) = m.data_mut_pair(i, j, rows);
    for (x, y) in lo.iter_mut().zip(hi.iter_mut()) {
        let (xi, yj) = (*x, *y);
        *x = c * xi - s * yj;
        *y = s * xi + c * yj;
    }
}

/// Fills empty slots with unit vectors orthogonal to every other entry.
fn complete_orthonormal(basis: &mut [Vec<f64>], dim: usize) {
    let mut candidate = 0;
    for k in 0..basis.len() {
        if !basis[k].is_empty() {
            continue;
        }
        loop {
            assert!(candidate < dim, "cannot complete an orthonormal basis");
            let mut e = vec![0.0; dim];
            e[candidate] = 1.0;
            candidate += 1;
            // Two Gram-Schmidt passes.
            for _ in 0..2 {
                for b in basis.iter().filter(|b| !b.is_empty()) {
                    let p = dot(&e, b);
                    axpy(-p, b, &mut e);
                }
            }
            let nrm = norm2(&e);
            if nrm > 1e-8 {
                e.iter_mut().for_each(|v| *v /= nrm);
                basis[k] = e;
                break;
            }
        }
    }
}

impl DenseMatrix {
    fn data_mut_pair(&mut self, i: usize, j: usize, rows: usize) -> (&mut [f64], &mut [f64]) {
        debug_assert!(i < j);
        let (head, tail) = self.data.split_at_mut(j * rows);
        (&mut head[i * rows..(i + 1) * rows], &mut tail[..rows])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_one_exact() {
        let u = [1.0, 2.0, 2.0];
        let v = [3.0, 0.0, 4.0, 0.0];
        let a = DenseMatrix::from_fn(3, 4, |i, j| u[i] * v[j]);
        let svd = truncated_svd(&a, 1).unwrap();
        assert!((svd.sigma[0] - 15.0).abs() < 1e-12);
        assert!(svd.reconstruct().sub(&a).frobenius_norm() < 1e-12);
    }

    #[test]
    fn rejects_bad_rank() {
        let a = DenseMatrix::identity(3);
        assert!(matches!(truncated_svd(&a, 0), Err(LinalgError::RankOutOfRange { .. })));
        assert!(matches!(truncated_svd(&a, 4), Err(LinalgError::RankOutOfRange { .. })));
    }

    #[test]
    fn rank_deficient_input_still_yields_orthonormal_factors() {
        let a = DenseMatrix::from_fn(4, 6, |i, j| if i == 0 { (j + 1) as f64 } else { 0.0 });
        let svd = truncated_svd(&a, 3).unwrap();
        let vtv = svd.v.tr_matmul(&svd.v);
        let utu = svd.u.tr_matmul(&svd.u);
        assert!(vtv.sub(&DenseMatrix::identity(3)).max_abs() < 1e-10);
        assert!(utu.sub(&DenseMatrix::identity(3)).max_abs() < 1e-10);
        assert!(svd.sigma[1].abs() < 1e-12 && svd.sigma[2].abs() < 1e-12);
    }

    #[test]
    fn tall_input_uses_direct_orientation() {
        let a = DenseMatrix::from_fn(7, 3, |i, j| ((i * 3 + j) as f64).sin());
        let svd = truncated_svd(&a, 3).unwrap();
        assert!(svd.reconstruct().sub(&a).frobenius_norm() < 1e-12);
        assert!(svd.sigma.windows(2).all(|w| w[0] >= w[1]));
    }
}
