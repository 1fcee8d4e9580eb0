use serde::{Deserialize, Serialize};

use crate::linalg::{mean_removed_unit, unit_angle, DenseMatrix};

use super::EvalError;

/// Optimal one-to-one pairing of estimated and reference signatures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchReport {
    /// `permutation[j]` is the reference paired with estimate `j`.
    pub permutation: Vec<usize>,
    pub per_endmember_mrsa: Vec<f64>,
    pub average_mrsa: f64,
}

/// Largest size solved by enumerating every permutation.
pub const EXHAUSTIVE_MAX: usize = 8;

/// MRSA cost matrix, `cost[j][k] = MRSA(est_j, ref_k)`.
pub fn mrsa_cost(est: &DenseMatrix, refs: &DenseMatrix) -> Result<Vec<Vec<f64>>, EvalError> {
    if est.rows() != refs.rows() {
        return Err(EvalError::Shape(format!(
            "estimates have {} bands, references {}",
            est.rows(),
            refs.rows()
        )));
    }
    let ue = est.columns().map(mean_removed_unit).collect::<Result<Vec<_>, _>>()?;
    let ur = refs.columns().map(mean_removed_unit).collect::<Result<Vec<_>, _>>()?;
    Ok(ue.iter().map(|e| ur.iter().map(|r| unit_angle(e, r)).collect()).collect())
}

/// Pairs each estimated column with a distinct reference column so that the
/// total MRSA is minimal.
pub fn match_mrsa(est: &DenseMatrix, refs: &DenseMatrix) -> Result<MatchReport, EvalError> {
    if est.cols() != refs.cols() {
        return Err(EvalError::Shape(format!(
            "{} estimates against {} references",
            est.cols(),
            refs.cols()
        )));
    }
    let cost = mrsa_cost(est, refs)?;
    let permutation = if cost.len() <= EXHAUSTIVE_MAX {
        assign_exhaustive(&cost)
    } else {
        assign_hungarian(&cost)
    };
    let per: Vec<f64> = permutation.iter().enumerate().map(|(j, &k)| cost[j][k]).collect();
    let average_mrsa = per.iter().sum::<f64>() / per.len() as f64;
    Ok(MatchReport { permutation, per_endmember_mrsa: per, average_mrsa })
}

fn total(cost: &[Vec<f64>], perm: &[usize]) -> f64 {
    perm.iter().enumerate().map(|(j, &k)| cost[j][k]).sum()
}

/// Minimum-cost assignment by enumeration in lexicographic order; the first
/// minimiser wins.
pub fn assign_exhaustive(cost: &[Vec<f64>]) -> Vec<usize> {
    let r = cost.len();
    let mut perm: Vec<usize> = (0..r).collect();
    let mut best = (total(cost, &perm), perm.clone());
    // next lexicographic permutation
    loop {
        let Some(i) = (1..r).rev().find(|&i| perm[i - 1] < perm[i]) else { break };
        let j = (i..r).rev().find(|&j| perm[j] > perm[i - 1]).unwrap();
        perm.swap(i - 1, j);
        perm[i..].reverse();
        let t = total(cost, &perm);
        if t < best.0 {
            best = (t, perm.clone());
        }
    }
    best.1
}

/// Minimum-cost assignment for a square cost matrix, `O(r³)` shortest
/// augmenting path with potentials.
pub fn assign_hungarian(cost: &[Vec<f64>]) -> Vec<usize> {
    let r = cost.len();
    // 1-based internals; column 0 is a virtual start
    let mut u = vec![0.0; r + 1];
    let mut v = vec![0.0; r + 1];
    let mut owner = vec![0usize; r + 1];
    let mut way = vec![0usize; r + 1];
    for i in 1..=r {
        owner[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; r + 1];
        let mut used = vec![false; r + 1];
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=r {
                if used[j] {
                    continue;
                }
                let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=r {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut perm = vec![0; r];
    for j in 1..=r {
        perm[owner[j] - 1] = j - 1;
    }
    perm
}
