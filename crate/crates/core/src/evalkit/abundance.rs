use rayon::prelude::*;
use serde::Serialize;

use crate::linalg::{dot, project_simplex, truncated_svd, DenseMatrix};
use crate::IndexSet;

use super::EvalError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbundanceOptions {
    /// Stop once an accepted step lowers the objective by less than
    /// `tol` times its previous value.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for AbundanceOptions {
    fn default() -> Self {
        Self { tol: 1e-9, max_iter: 10_000 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AbundanceResult {
    /// `r x n`, each column on the probability simplex.
    #[serde(skip)]
    pub h: DenseMatrix,
    pub max_iterations: usize,
    /// Columns that hit `max_iter` before the stopping rule fired.
    pub unconverged: usize,
}

struct ColumnSolve {
    h: Vec<f64>,
    iterations: usize,
    converged: bool,
}

/// Per-column objective `½‖a - Dh‖²` in Gram form, `½hᵀGh - bᵀh + c`.
struct Quadratic<'a> {
    g: &'a DenseMatrix,
    b: Vec<f64>,
    c: f64,
}

impl Quadratic<'_> {
    fn grad(&self, h: &[f64]) -> Vec<f64> {
        let mut gh = self.g.mul_vec(h);
        gh.iter_mut().zip(&self.b).for_each(|(x, b)| *x -= b);
        gh
    }

    fn value(&self, h: &[f64]) -> f64 {
        0.5 * dot(h, &self.g.mul_vec(h)) - dot(&self.b, h) + self.c
    }
}

/// Monotone accelerated projected gradient on the simplex.
///
/// A rejected step restarts the momentum. A small accelerated decrease is
/// only trusted once a plain projected-gradient step from the current point
/// also decreases the objective by less than the tolerance.
fn solve_column(q: &Quadratic<'_>, lipschitz: f64, opts: &AbundanceOptions) -> ColumnSolve {
    let r = q.b.len();
    let mut h = vec![1.0 / r as f64; r];
    let mut y = h.clone();
    let mut f = q.value(&h);
    let mut t = 1.0f64;
    let floor = 1e-16 * q.c.max(f64::MIN_POSITIVE);
    let pg_step = |x: &[f64]| {
        let grad = q.grad(x);
        project_simplex(&x.iter().zip(&grad).map(|(x, g)| x - g / lipschitz).collect::<Vec<_>>())
    };
    for k in 1..=opts.max_iter {
        let z = pg_step(&y);
        let fz = q.value(&z);
        if fz > f {
            y.clone_from(&h);
            t = 1.0;
            continue;
        }
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        for i in 0..r {
            y[i] = z[i] + ((t - 1.0) / t_next) * (z[i] - h[i]);
        }
        let prev = f;
        f = fz;
        h = z;
        t = t_next;
        if prev - f <= opts.tol * prev.max(floor) {
            let w = pg_step(&h);
            let fw = q.value(&w);
            if f - fw <= opts.tol * f.max(floor) {
                if fw < f {
                    h = w;
                }
                return ColumnSolve { h, iterations: k, converged: true };
            }
        }
    }
    ColumnSolve { h, iterations: opts.max_iter, converged: false }
}

/// Solves `min ‖A - A(I) H‖_F²` s.t. `1ᵀH = 1ᵀ`, `H >= 0` column by column.
pub fn abundance(
    a: &DenseMatrix,
    idx: &IndexSet,
    opts: &AbundanceOptions,
) -> Result<AbundanceResult, EvalError> {
    let d = dictionary(a, idx)?;
    abundance_with_dictionary(a, &d, opts)
}

pub(crate) fn dictionary(a: &DenseMatrix, idx: &IndexSet) -> Result<DenseMatrix, EvalError> {
    if idx.is_empty() {
        return Err(EvalError::Shape("empty endmember index set".into()));
    }
    if let Some(i) = idx.iter().find(|&i| i >= a.cols()) {
        return Err(EvalError::Shape(format!("index {i} out of range for {} columns", a.cols())));
    }
    Ok(a.select_columns(idx.as_slice()))
}

/// Same as [`abundance`] with an explicit dictionary `D` (`d x r`).
pub fn abundance_with_dictionary(
    a: &DenseMatrix,
    d: &DenseMatrix,
    opts: &AbundanceOptions,
) -> Result<AbundanceResult, EvalError> {
    if a.rows() != d.rows() {
        return Err(EvalError::Shape("dictionary and data differ in rows".into()));
    }
    let r = d.cols();
    let g = d.tr_matmul(d);
    let sigma = truncated_svd(d, 1)?.sigma[0];
    let lipschitz = (sigma * sigma).max(f64::MIN_POSITIVE);
    let cols: Vec<ColumnSolve> = (0..a.cols())
        .into_par_iter()
        .map(|j| {
            let aj = a.col(j);
            let q = Quadratic { g: &g, b: d.tr_mul_vec(aj), c: 0.5 * dot(aj, aj) };
            solve_column(&q, lipschitz, opts)
        })
        .collect();
    let mut data = Vec::with_capacity(r * a.cols());
    let mut max_iterations = 0;
    let mut unconverged = 0;
    for c in &cols {
        data.extend_from_slice(&c.h);
        max_iterations = max_iterations.max(c.iterations);
        unconverged += usize::from(!c.converged);
    }
    Ok(AbundanceResult { h: DenseMatrix::new(r, a.cols(), data)?, max_iterations, unconverged })
}

/// `½‖A - DH‖_F²`.
pub fn abundance_objective(a: &DenseMatrix, d: &DenseMatrix, h: &DenseMatrix) -> f64 {
    0.5 * a.sub(&d.matmul(h)).frobenius_norm().powi(2)
}
