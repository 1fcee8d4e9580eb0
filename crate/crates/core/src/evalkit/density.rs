use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::linalg::{mean_removed_unit, unit_angle, DenseMatrix};
use crate::IndexSet;

use super::EvalError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityProfile {
    /// Fraction of columns within MRSA `phi` of each column, self included.
    pub rho: Vec<f64>,
    pub phi: f64,
}

/// `rho(i) = |{ j : MRSA(a_i, a_j) <= phi }| / n`.
pub fn neighborhood_density(a: &DenseMatrix, phi: f64) -> Result<DensityProfile, EvalError> {
    if !(0.0..=1.0).contains(&phi) {
        return Err(EvalError::Parameter(format!("phi = {phi} outside [0, 1]")));
    }
    let units = a.columns().map(mean_removed_unit).collect::<Result<Vec<_>, _>>()?;
    let n = units.len();
    let rho = units
        .par_iter()
        .map(|u| units.iter().filter(|v| unit_angle(u, v) <= phi).count() as f64 / n as f64)
        .collect();
    Ok(DensityProfile { rho, phi })
}

/// Columns whose density exceeds `omega`, ascending.
pub fn filter_isolated(a: &DenseMatrix, phi: f64, omega: f64) -> Result<IndexSet, EvalError> {
    let p = neighborhood_density(a, phi)?;
    Ok(kept_indices(&p.rho, omega))
}

pub fn kept_indices(rho: &[f64], omega: f64) -> IndexSet {
    IndexSet::from(rho.iter().enumerate().filter(|(_, &r)| r > omega).map(|(i, _)| i).collect::<Vec<_>>())
}

/// Counts of `rho` over `[0, 1]` in bins of width `bin_width`; bins are
/// right-open except the last, which is closed.
pub fn density_histogram(rho: &[f64], bin_width: f64) -> Result<Vec<usize>, EvalError> {
    if !(bin_width > 0.0 && bin_width <= 1.0) {
        return Err(EvalError::Parameter(format!("bin width {bin_width} outside (0, 1]")));
    }
    let ratio = 1.0 / bin_width;
    let bins = if (ratio - ratio.round()).abs() < 1e-9 { ratio.round() } else { ratio.ceil() } as usize;
    let mut counts = vec![0; bins];
    for &r in rho {
        // the small offset keeps values such as 0.29 / 0.01 out of the bin below
        let k = ((r / bin_width) + 1e-9).floor().max(0.0) as usize;
        counts[k.min(bins - 1)] += 1;
    }
    Ok(counts)
}
