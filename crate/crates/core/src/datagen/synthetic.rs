use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::linalg::{l1_norm, DenseMatrix};
use crate::IndexSet;

use super::DatagenError;

/// `A = W [I, H̄] Pi + V` with the ground truth kept alongside.
#[derive(Debug, Clone)]
pub struct SyntheticInstance {
    pub a: DenseMatrix,
    /// `d x r`, unit L1 columns.
    pub w: DenseMatrix,
    /// `r x n`, equal to `[I, H̄] Pi`.
    pub h: DenseMatrix,
    pub v: DenseMatrix,
    /// `pure_indices[k]` is the column of `A` equal to `W(:, k) + V(:, ·)`.
    pub pure_indices: IndexSet,
    pub nu: f64,
    /// Dirichlet parameters used for `H̄`.
    pub alpha: Vec<f64>,
}

/// Draws one Dirichlet(`alpha`) vector through normalised Gamma draws.
pub(crate) fn dirichlet(rng: &mut impl Rng, gammas: &[Gamma<f64>]) -> Vec<f64> {
    loop {
        let g: Vec<f64> = gammas.iter().map(|d| d.sample(rng)).collect();
        let s: f64 = g.iter().sum();
        // every draw can underflow to zero for tiny shapes; redraw then
        if s > 0.0 && s.is_finite() {
            return g.into_iter().map(|x| x / s).collect();
        }
    }
}

/// Scales `v` so that its induced L1 norm equals `nu` (zero when `nu = 0`).
pub fn scale_to_l1(v: &mut DenseMatrix, nu: f64) {
    let norm = l1_norm(v);
    let factor = if nu == 0.0 || norm == 0.0 { 0.0 } else { nu / norm };
    *v = v.scale(factor);
}

/// Synthetic separable instance with `r` planted pure columns.
///
/// Draw order from the seeded stream: `W`, the Dirichlet parameters, the
/// columns of `H̄`, the column permutation, then `V`.
pub fn gen_synthetic(
    d: usize,
    n: usize,
    r: usize,
    nu: f64,
    seed: u64,
) -> Result<SyntheticInstance, DatagenError> {
    if r == 0 || r > d || r > n {
        return Err(DatagenError::Dims(format!("need 1 <= r <= min(d, n); got d={d}, n={n}, r={r}")));
    }
    if !(nu >= 0.0 && nu.is_finite()) {
        return Err(DatagenError::Dims(format!("noise level {nu} must be finite and >= 0")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut w = DenseMatrix::from_fn(d, r, |_, _| rng.random::<f64>().abs());
    w.normalize_columns_l1();

    // shapes in (0, 1]; a zero shape is not a valid Gamma parameter
    let alpha: Vec<f64> = (0..r).map(|_| 1.0 - rng.random::<f64>()).collect();
    let gammas: Vec<Gamma<f64>> = alpha.iter().map(|&a| Gamma::new(a, 1.0).unwrap()).collect();
    let mut blocks: Vec<Vec<f64>> = (0..r).map(|k| (0..r).map(|i| f64::from(i == k)).collect()).collect();
    for _ in r..n {
        blocks.push(dirichlet(&mut rng, &gammas));
    }

    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng);
    // column k of [I, H̄] lands at position perm[k]
    let mut cols = vec![Vec::new(); n];
    for (k, col) in blocks.into_iter().enumerate() {
        cols[perm[k]] = col;
    }
    let h = DenseMatrix::from_columns(&cols)?;
    let pure_indices = IndexSet::from(perm[..r].to_vec());

    let mut v = DenseMatrix::from_fn(d, n, |_, _| StandardNormal.sample(&mut rng));
    scale_to_l1(&mut v, nu);
    let a = w.matmul(&h).add(&v);
    Ok(SyntheticInstance { a, w, h, v, pure_indices, nu, alpha })
}

/// The `k`-th of `count` equally spaced noise levels in `(0, max]`.
pub fn noise_grid(count: usize, max: f64) -> Vec<f64> {
    (1..=count).map(|k| max * k as f64 / count as f64).collect()
}
