use eeht::postprocess::threshold;
use eeht::DenseMatrix;

use super::to_na;

pub fn kkt_projection(v: &[f64]) -> Vec<f64> {
    // the projection is max(v - tau, 0) with support S; try every S
    let n = v.len();
    for mask in 1u32..(1 << n) {
        let s: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let tau = (s.iter().map(|&i| v[i]).sum::<f64>() - 1.0) / s.len() as f64;
        let ok = (0..n).all(|i| if s.contains(&i) { v[i] - tau > -1e-12 } else { v[i] - tau <= 1e-12 });
        if ok {
            return v.iter().map(|x| (x - tau).max(0.0)).collect();
        }
    }
    unreachable!("some support satisfies the KKT conditions")
}

/// `min ½‖a - Dh‖²` over the simplex by trying every support.
pub fn active_set_oracle(d: &DenseMatrix, a: &[f64]) -> f64 {
    let r = d.cols();
    let dn = to_na(d);
    let av = nalgebra::DVector::from_column_slice(a);
    let mut best = f64::INFINITY;
    for mask in 1u32..(1 << r) {
        let s: Vec<usize> = (0..r).filter(|k| mask >> k & 1 == 1).collect();
        let k = s.len();
        let mut kkt = nalgebra::DMatrix::zeros(k + 1, k + 1);
        let mut rhs = nalgebra::DVector::zeros(k + 1);
        for (p, &i) in s.iter().enumerate() {
            for (q, &j) in s.iter().enumerate() {
                kkt[(p, q)] = dn.column(i).dot(&dn.column(j));
            }
            kkt[(p, k)] = 1.0;
            kkt[(k, p)] = 1.0;
            rhs[p] = dn.column(i).dot(&av);
        }
        rhs[k] = 1.0;
        let Some(sol) = kkt.lu().solve(&rhs) else { continue };
        if sol.iter().take(k).all(|&h| h >= -1e-12) {
            let mut h = nalgebra::DVector::zeros(r);
            for (p, &i) in s.iter().enumerate() {
                h[i] = sol[p].max(0.0);
            }
            best = best.min(0.5 * (&av - &dn * h).norm_squared());
        }
    }
    best
}

fn l1(a: &DenseMatrix, i: usize, j: usize) -> f64 {
    a.col(i).iter().zip(a.col(j)).map(|(x, y)| (x - y).abs()).sum()
}

/// Smallest diameter over every subset containing an anchor whose score
/// exceeds the threshold, with the smallest anchor attaining it.
pub fn brute_force_cluster(a: &DenseMatrix, p: &[f64], r: usize) -> Option<(f64, usize)> {
    let n = a.cols();
    let thr = threshold(r);
    let mut best: Option<(f64, usize)> = None;
    for i in 0..n {
        let others: Vec<usize> = (0..n).filter(|&j| j != i).collect();
        for mask in 0u32..(1 << others.len()) {
            let members: Vec<usize> =
                std::iter::once(i).chain((0..others.len()).filter(|k| mask >> k & 1 == 1).map(|k| others[k])).collect();
            let score: f64 = members.iter().map(|&u| p[u]).sum();
            if score > thr {
                let diam = members.iter().map(|&u| l1(a, i, u)).fold(0.0, f64::max);
                if best.is_none_or(|(b, bi)| diam < b || (diam == b && i < bi)) {
                    best = Some((diam, i));
                }
            }
        }
    }
    best
}
