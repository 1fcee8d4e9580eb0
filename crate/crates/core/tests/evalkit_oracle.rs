mod common;

use common::oracles::active_set_oracle;
use common::{permutations, rng, uniform};
use eeht::evalkit::{
    abundance_objective, abundance_with_dictionary, assign_hungarian, density_histogram, filter_isolated,
    match_mrsa, mrsa_cost, neighborhood_density, AbundanceOptions,
};
use eeht::DenseMatrix;
use rand::Rng;

#[test]
fn abundance_matches_active_set_oracle_on_5x3() {
    let mut g = rng(31);
    for _ in 0..40 {
        let d = uniform(&mut g, 5, 3, 0.0, 1.0);
        let a = uniform(&mut g, 5, 12, -0.2, 1.2);
        let res = abundance_with_dictionary(&a, &d, &AbundanceOptions::default()).unwrap();
        assert_eq!(res.unconverged, 0);
        let mut oracle_total = 0.0;
        for j in 0..a.cols() {
            let h = res.h.col(j);
            assert!((h.iter().sum::<f64>() - 1.0).abs() < 1e-8);
            assert!(h.iter().all(|&v| v >= 0.0));
            let got = 0.5 * a.col(j).iter().zip(d.mul_vec(h)).map(|(x, y)| (x - y).powi(2)).sum::<f64>();
            let oracle = active_set_oracle(&d, a.col(j));
            assert!((got - oracle).abs() < 1e-6, "{got} vs {oracle}");
            oracle_total += oracle;
        }
        assert!((abundance_objective(&a, &d, &res.h) - oracle_total).abs() < 1e-6 * a.cols() as f64);
    }
}

#[test]
fn vertex_column_gets_a_unit_row() {
    let mut g = rng(1);
    let d = uniform(&mut g, 5, 3, 0.0, 1.0);
    let a = d.clone();
    let res = abundance_with_dictionary(&a, &d, &AbundanceOptions::default()).unwrap();
    for k in 0..3 {
        assert!((res.h.get(k, k) - 1.0).abs() < 1e-8);
    }
}

#[test]
fn matching_equals_permutation_search() {
    let mut g = rng(17);
    for r in 1..=6 {
        let perms = permutations(r);
        for _ in 0..10 {
            let est = uniform(&mut g, 7, r, 0.0, 1.0);
            let refs = uniform(&mut g, 7, r, 0.0, 1.0);
            let cost = mrsa_cost(&est, &refs).unwrap();
            let oracle = perms
                .iter()
                .map(|p| p.iter().enumerate().map(|(j, &k)| cost[j][k]).sum::<f64>())
                .fold(f64::INFINITY, f64::min)
                / r as f64;
            let rep = match_mrsa(&est, &refs).unwrap();
            assert!((rep.average_mrsa - oracle).abs() < 1e-12);
            let hung = assign_hungarian(&cost);
            let h: f64 = hung.iter().enumerate().map(|(j, &k)| cost[j][k]).sum::<f64>() / r as f64;
            assert!((h - oracle).abs() < 1e-12);
            // reordering the references does not change the average
            let rev: Vec<usize> = (0..r).rev().collect();
            let swapped = match_mrsa(&est, &refs.select_columns(&rev)).unwrap();
            assert!((swapped.average_mrsa - rep.average_mrsa).abs() < 1e-12);
        }
    }
}

#[test]
fn matching_against_hand_computed_angles() {
    // after mean removal est_0 = (1, -1, 0) = ref_1 and est_1 = (-1, 0, 1) =
    // ref_0; the cross pairs have cosine -1/2, so MRSA 2/3
    let est = DenseMatrix::from_rows(&[&[2.0, 0.0], &[0.0, 1.0], &[1.0, 2.0]]).unwrap();
    let refs = DenseMatrix::from_rows(&[&[0.0, 5.0], &[1.0, 3.0], &[2.0, 4.0]]).unwrap();
    let cost = mrsa_cost(&est, &refs).unwrap();
    let table = [[2.0 / 3.0, 0.0], [0.0, 2.0 / 3.0]];
    for j in 0..2 {
        for k in 0..2 {
            assert!((cost[j][k] - table[j][k]).abs() < 1e-15, "{cost:?}");
        }
    }
    let rep = match_mrsa(&est, &refs).unwrap();
    assert_eq!(rep.permutation, vec![1, 0]);
    assert_eq!(rep.average_mrsa, 0.0);
}

#[test]
fn planted_outlier_is_filtered() {
    let mut g = rng(12);
    let w = uniform(&mut g, 8, 2, 0.0, 1.0);
    let mut cols: Vec<Vec<f64>> = (0..30)
        .map(|_| {
            let t = g.random_range(0.4..0.6);
            w.mul_vec(&[t, 1.0 - t])
        })
        .collect();
    cols.push((0..8).map(|k| if k % 2 == 0 { 3.0 } else { -1.0 }).collect());
    let a = DenseMatrix::from_columns(&cols).unwrap();
    let kept = filter_isolated(&a, 0.1, 0.1).unwrap();
    assert!(!kept.contains(30));
    assert_eq!(kept.len(), 30);
    assert_eq!(filter_isolated(&a, 0.1, 0.0).unwrap().len(), 31);
}

#[test]
fn identical_columns_fill_the_last_bin() {
    let col = vec![0.2, 0.9, 0.4, 0.1];
    let a = DenseMatrix::from_columns(&vec![col; 9]).unwrap();
    let p = neighborhood_density(&a, 0.0).unwrap();
    let h = density_histogram(&p.rho, 0.01).unwrap();
    assert_eq!(h[99], 9);
    assert_eq!(h.iter().sum::<usize>(), 9);
}
