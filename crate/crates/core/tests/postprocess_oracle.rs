mod common;

use common::oracles::brute_force_cluster;
use common::rng;
use eeht::linalg::DenseMatrix;
use eeht::postprocess::{diameter, min_diam_cluster, select, threshold, PointList, SelectionMethod};
use eeht::IndexSet;
use rand::Rng;

#[test]
fn min_diam_cluster_matches_enumeration() {
    let mut g = rng(5);
    for case in 0..120 {
        let n = g.random_range(2..=12);
        let r = g.random_range(1..=3.min(n));
        let d = g.random_range(1..4);
        // a coarse grid makes equal distances, and so ties, common
        let a = DenseMatrix::from_fn(d, n, |_, _| g.random_range(0..4) as f64);
        let raw: Vec<f64> = (0..n).map(|_| if g.random_bool(0.3) { 0.0 } else { g.random_range(0.0..1.0) }).collect();
        let total: f64 = raw.iter().sum();
        let p: Vec<f64> = if total > 0.0 {
            raw.iter().map(|v| (v / total * r as f64).min(1.0)).collect()
        } else {
            raw
        };
        let oracle = brute_force_cluster(&a, &p, r);
        let got = min_diam_cluster(&a, &PointList::new(p.clone()).unwrap(), r);
        match (oracle, got) {
            (None, Err(_)) => {}
            (Some((diam, anchor)), Ok((i, members))) => {
                assert_eq!(i, anchor, "case {case}");
                assert_eq!(members[0], i);
                assert_eq!(diameter(&a, &members), diam, "case {case}");
                let score: f64 = members.iter().map(|&u| p[u]).sum();
                assert!(score > threshold(r));
                // no shorter prefix qualifies
                let shorter: f64 = members[..members.len() - 1].iter().map(|&u| p[u]).sum();
                assert!(shorter <= threshold(r));
            }
            (o, g) => panic!("case {case}: oracle {o:?}, got {g:?}"),
        }
    }
}

#[test]
fn separated_groups_yield_one_pick_per_group() {
    let mut g = rng(8);
    let centers = [[0.0, 0.0], [10.0, 0.0], [0.0, 10.0]];
    let mut cols = Vec::new();
    let mut diag = Vec::new();
    for c in centers {
        for k in 0..4 {
            cols.push(vec![c[0] + g.random_range(0.0..0.1), c[1] + g.random_range(0.0..0.1)]);
            diag.push(if k < 2 { 0.5 } else { 0.0 });
        }
    }
    let a = DenseMatrix::from_columns(&cols).unwrap();
    for m in [SelectionMethod::MaxPoint, SelectionMethod::CentroidMrsa] {
        let s = select(&a, &diag, 3, m).unwrap();
        let groups: IndexSet = s.chosen.iter().map(|i| i / 4).collect();
        assert_eq!(groups.len(), 3, "{m:?}: {:?}", s.chosen);
        for c in &s.clusters {
            assert!(c.iter().all(|&u| u / 4 == c[0] / 4), "{m:?}: cluster spans groups {c:?}");
        }
    }
}
