use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, Normal};

use crate::evalkit::{abundance, AbundanceOptions};
use crate::linalg::{l1_norm, mean_removed_unit, unit_angle, DenseMatrix};
use crate::IndexSet;

use super::synthetic::dirichlet;
use super::DatagenError;

/// Semi-real instance `A = WH + (nu / ‖V‖₁) V` built from a real matrix.
#[derive(Debug, Clone)]
pub struct SemirealInstance {
    pub a: DenseMatrix,
    pub w: DenseMatrix,
    pub h: DenseMatrix,
    /// Unscaled residual `A_real - WH` of the normalised real matrix.
    pub v: DenseMatrix,
    /// `j[i]` is the column closest in MRSA to reference `i`.
    pub j: IndexSet,
    /// `‖V‖₁`; choosing `nu` equal to it reproduces the normalised input.
    pub v_norm: f64,
}

/// The reusable part of the construction (everything but the noise level).
#[derive(Debug, Clone)]
pub struct SemirealBasis {
    pub normalized: DenseMatrix,
    pub w: DenseMatrix,
    pub h: DenseMatrix,
    pub v: DenseMatrix,
    pub j: IndexSet,
}

impl SemirealBasis {
    /// L1-normalise the columns, pick the column of least MRSA to each
    /// reference (lowest index on ties; constant columns never qualify), fit
    /// simplex-constrained abundances on those columns, force `H(:, J) = I`
    /// and keep the residual.
    pub fn new(a_real: &DenseMatrix, w_ref: &DenseMatrix) -> Result<Self, DatagenError> {
        if a_real.rows() != w_ref.rows() {
            return Err(DatagenError::Dims(format!(
                "data has {} bands, references {}",
                a_real.rows(),
                w_ref.rows()
            )));
        }
        let mut normalized = a_real.clone();
        normalized.normalize_columns_l1();
        let units: Vec<Option<Vec<f64>>> =
            normalized.columns().map(|c| mean_removed_unit(c).ok()).collect();
        let mut j = IndexSet::new();
        for (i, wr) in w_ref.columns().enumerate() {
            let ur = mean_removed_unit(wr)?;
            let mut best: Option<(f64, usize)> = None;
            for (k, u) in units.iter().enumerate() {
                if let Some(u) = u {
                    let m = unit_angle(u, &ur);
                    if best.is_none_or(|(b, _)| m < b) {
                        best = Some((m, k));
                    }
                }
            }
            let (_, k) = best.ok_or_else(|| DatagenError::Dims("every column is constant".into()))?;
            if !j.insert(k) {
                return Err(DatagenError::DuplicateEndmember { reference: i, column: k });
            }
        }
        let w = normalized.select_columns(j.as_slice());
        let mut h = abundance(&normalized, &j, &AbundanceOptions::default())?.h;
        for (i, k) in j.iter().enumerate() {
            for row in 0..h.rows() {
                h.set(row, k, f64::from(row == i));
            }
        }
        let v = normalized.sub(&w.matmul(&h));
        Ok(Self { normalized, w, h, v, j })
    }

    pub fn v_norm(&self) -> f64 {
        l1_norm(&self.v)
    }

    /// `WH + (nu / ‖V‖₁) V`; the residual is dropped when it vanishes.
    pub fn at_noise(&self, nu: f64) -> SemirealInstance {
        let v_norm = self.v_norm();
        let wh = self.w.matmul(&self.h);
        let a = if v_norm > 0.0 { wh.add(&self.v.scale(nu / v_norm)) } else { wh };
        SemirealInstance {
            a,
            w: self.w.clone(),
            h: self.h.clone(),
            v: self.v.clone(),
            j: self.j.clone(),
            v_norm,
        }
    }
}

/// Builds the semi-real instance at noise level `nu`.
pub fn build_semireal(
    a_real: &DenseMatrix,
    w_ref: &DenseMatrix,
    nu: f64,
) -> Result<SemirealInstance, DatagenError> {
    Ok(SemirealBasis::new(a_real, w_ref)?.at_noise(nu))
}

/// A seeded stand-in for a real scene: smooth nonnegative spectra, sparse
/// Dirichlet mixtures with many near-pure pixels, and mild band noise.
#[derive(Debug, Clone)]
pub struct ToyScene {
    pub a_real: DenseMatrix,
    /// Reference signatures (the generating spectra).
    pub w_ref: DenseMatrix,
}

pub fn toy_scene(d: usize, n: usize, r: usize, noise: f64, seed: u64) -> Result<ToyScene, DatagenError> {
    if r == 0 || r > d || r > n || d < 2 {
        return Err(DatagenError::Dims(format!("toy scene needs 2 <= d and 1 <= r <= min(d, n); got d={d}, n={n}, r={r}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // each spectrum is a baseline plus three Gaussian bumps
    let w_ref = {
        let mut cols = Vec::with_capacity(r);
        for _ in 0..r {
            let base = rng.random_range(0.05..0.3);
            let bumps: Vec<(f64, f64, f64)> = (0..3)
                .map(|_| (rng.random_range(0.0..1.0), rng.random_range(0.05..0.25), rng.random_range(0.2..1.0)))
                .collect();
            let col: Vec<f64> = (0..d)
                .map(|b| {
                    let x = b as f64 / (d - 1) as f64;
                    base + bumps.iter().map(|(c, w, h)| h * (-((x - c) / w).powi(2)).exp()).sum::<f64>()
                })
                .collect();
            cols.push(col);
        }
        DenseMatrix::from_columns(&cols)?
    };
    let gammas: Vec<Gamma<f64>> = (0..r).map(|_| Gamma::new(0.3, 1.0).unwrap()).collect();
    let band = Normal::new(0.0, noise.max(0.0)).map_err(|e| DatagenError::Dims(e.to_string()))?;
    let mut cols = Vec::with_capacity(n);
    for _ in 0..n {
        let h = dirichlet(&mut rng, &gammas);
        let mut col = w_ref.mul_vec(&h);
        for v in col.iter_mut() {
            *v = (*v * (1.0 + band.sample(&mut rng))).max(0.0);
        }
        cols.push(col);
    }
    Ok(ToyScene { a_real: DenseMatrix::from_columns(&cols)?, w_ref })
}
