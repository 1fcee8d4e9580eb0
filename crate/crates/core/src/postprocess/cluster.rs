use rayon::prelude::*;

use crate::linalg::{dist_l1, DenseMatrix};

use super::{PointList, PostError};

/// Score threshold a cluster must exceed, `r / (r + 1)`.
pub fn threshold(r: usize) -> f64 {
    r as f64 / (r as f64 + 1.0)
}

/// Columns ordered by L1 distance to `a_i` (ties by index), `i` first.
pub fn anchor_order(a: &DenseMatrix, i: usize) -> Vec<(f64, usize)> {
    let ai = a.col(i);
    let mut order: Vec<(f64, usize)> =
        (0..a.cols()).filter(|&j| j != i).map(|j| (dist_l1(ai, a.col(j)), j)).collect();
    order.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
    order.insert(0, (0.0, i));
    order
}

/// Smallest prefix of the anchor order whose score exceeds the threshold,
/// with its diameter.
fn best_prefix(order: &[(f64, usize)], p: &PointList, thr: f64) -> Option<(f64, usize)> {
    let mut score = 0.0;
    for (k, &(dist, j)) in order.iter().enumerate() {
        score += p.get(j);
        if score > thr {
            return Some((dist, k + 1));
        }
    }
    None
}

/// Minimum-diameter cluster among all prefix clusters whose score exceeds
/// `r / (r + 1)`; ties go to the smaller anchor. Returns the anchor and the
/// members in anchor order.
pub fn min_diam_cluster(
    a: &DenseMatrix,
    p: &PointList,
    r: usize,
) -> Result<(usize, Vec<usize>), PostError> {
    if p.len() != a.cols() {
        return Err(PostError::Shape(format!("point list has {} entries for {} columns", p.len(), a.cols())));
    }
    let thr = threshold(r);
    let best = (0..a.cols())
        .into_par_iter()
        .filter_map(|i| {
            let order = anchor_order(a, i);
            best_prefix(&order, p, thr).map(|(diam, len)| (diam, i, order[..len].iter().map(|x| x.1).collect::<Vec<_>>()))
        })
        .min_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
    match best {
        Some((_, i, members)) => Ok((i, members)),
        None => Err(PostError::EmptyPsi { total: p.total(), threshold: thr }),
    }
}

/// L1 diameter of a cluster anchored at `members[0]`.
pub fn diameter(a: &DenseMatrix, members: &[usize]) -> f64 {
    let ai = a.col(members[0]);
    members.iter().map(|&u| dist_l1(ai, a.col(u))).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn threshold_values() {
        assert_eq!(threshold(4), 0.8);
        assert_eq!(threshold(1), 0.5);
    }

    #[test]
    fn singleton_cluster_for_full_mass() {
        let a = DenseMatrix::from_rows(&[&[0.0, 1.0, 2.0, 3.0]]).unwrap();
        let p = PointList::new(vec![0.0, 0.0, 1.0, 0.0]).unwrap();
        let (i, s) = min_diam_cluster(&a, &p, 1).unwrap();
        assert_eq!((i, s.clone()), (2, vec![2]));
        assert_eq!(diameter(&a, &s), 0.0);
    }

    #[test]
    fn split_mass_joins_nearest_pair() {
        let a = DenseMatrix::from_rows(&[&[0.0, 0.1, 5.0, 5.3]]).unwrap();
        // 0.3 + 0.3 in the left pair, 0.2 + 0.2 on the right; r = 1 needs > 0.5
        let p = PointList::new(vec![0.3, 0.3, 0.2, 0.2]).unwrap();
        let (i, s) = min_diam_cluster(&a, &p, 1).unwrap();
        assert_eq!(i, 0);
        assert_eq!(s, vec![0, 1]);
    }

    #[test]
    fn empty_psi_is_an_error() {
        let a = DenseMatrix::from_rows(&[&[0.0, 1.0]]).unwrap();
        let p = PointList::new(vec![0.2, 0.2]).unwrap();
        assert!(matches!(min_diam_cluster(&a, &p, 1), Err(PostError::EmptyPsi { .. })));
    }
}
