mod common;

use common::{rng, uniform};
use eeht::datagen::gen_synthetic;
use eeht::lp::Backend;
use eeht::model::{audit, hottopixx_objective, solve_direct, solve_rj, SolveOptions};
use eeht::rce::{rce_solve, RceConfig};
use eeht::{DenseMatrix, IndexSet};
use rand::Rng;

fn l1_residual(a: &DenseMatrix, j: usize, l: &[usize], gamma: &[f64]) -> f64 {
    (0..a.rows())
        .map(|k| (a.get(k, j) - l.iter().zip(gamma).map(|(&i, g)| a.get(k, i) * g).sum::<f64>()).abs())
        .sum()
}

#[test]
fn rj_matches_grid_search() {
    let mut g = rng(2);
    for _ in 0..20 {
        let a = uniform(&mut g, 3, 5, 0.0, 1.0);
        let l = IndexSet::from(vec![1, 3]);
        let diag: Vec<f64> = (0..2).map(|_| g.random_range(0.05..1.0)).collect();
        let j = [0, 2, 4][g.random_range(0..3)];
        let s = solve_rj(&a, &l, j, &diag, &SolveOptions::default()).unwrap();
        assert!(s.gamma.iter().zip(&diag).all(|(x, u)| *x >= 0.0 && *x <= u + 1e-12));
        let steps = 400;
        let mut grid = f64::INFINITY;
        for p in 0..=steps {
            for q in 0..=steps {
                let gm = [diag[0] * p as f64 / steps as f64, diag[1] * q as f64 / steps as f64];
                grid = grid.min(l1_residual(&a, j, l.as_slice(), &gm));
            }
        }
        // the objective is Lipschitz in gamma with constant ‖a_i‖₁ per coordinate
        let slack: f64 = l.iter().zip(&diag).map(|(i, u)| a.col(i).iter().sum::<f64>() * u / steps as f64).sum();
        assert!(s.opt_value <= grid + 1e-9, "{} > grid {grid}", s.opt_value);
        assert!(grid <= s.opt_value + slack, "grid {grid} vs {} + {slack}", s.opt_value);
    }
}

#[test]
fn rce_matches_direct_solve_with_both_engines() {
    let mut g = rng(9);
    let mut backends = vec![Backend::Simplex];
    #[cfg(feature = "highs")]
    backends.push(Backend::Highs);
    for case in 0..12 {
        let n = g.random_range(8..16);
        let r = g.random_range(2..4);
        let a = uniform(&mut g, 3, n, 0.0, 1.0);
        for &backend in &backends {
            let opts = SolveOptions { backend, ..Default::default() };
            let direct = solve_direct(&a, r, &opts).unwrap();
            let mut cfg = RceConfig::new(r);
            cfg.lambda = 2;
            cfg.mu = 1;
            cfg.seed = case;
            cfg.certify = true;
            cfg.solve = opts;
            let out = rce_solve(&a, &cfg).unwrap();
            let tol = 1e-6 * direct.u_star.max(1.0);
            assert!((out.objective - direct.u_star).abs() <= tol, "case {case} {backend:?}: {} vs {}", out.objective, direct.u_star);
            let cert = out.certificate.as_ref().unwrap();
            assert!(cert.lp_audited);
            assert!((hottopixx_objective(&a, &out.x) - out.objective).abs() <= 1e-6);
            let x = &out.x;
            let tr: f64 = x.diag().iter().sum();
            assert!((tr - r as f64).abs() < 1e-7);
            for j in 0..n {
                for i in 0..n {
                    assert!(x.get(i, j) >= 0.0 && x.get(i, j) <= x.get(i, i) + 1e-12 && x.get(i, i) <= 1.0);
                }
            }
        }
    }
    let snap = audit();
    assert_eq!(snap.violations, 0);
    assert!(snap.max_relative_gap <= 1e-7 && snap.max_v <= 1e-9, "{snap:?}");
}

#[test]
fn feasible_points_never_beat_the_optimum() {
    let mut g = rng(4);
    for _ in 0..10 {
        let (n, r) = (10, 3);
        let a = uniform(&mut g, 4, n, 0.0, 1.0);
        let opt = solve_direct(&a, r, &SolveOptions::default()).unwrap().u_star;
        for _ in 0..20 {
            let mut x = DenseMatrix::zeros(n, n);
            for i in 0..n {
                x.set(i, i, r as f64 / n as f64);
            }
            for j in 0..n {
                for i in (0..n).filter(|&i| i != j) {
                    x.set(i, j, g.random_range(0.0..=r as f64 / n as f64));
                }
            }
            assert!(hottopixx_objective(&a, &x) >= opt - 1e-9);
        }
    }
}

#[test]
fn noiseless_separable_optimum_is_zero() {
    let inst = gen_synthetic(6, 30, 4, 0.0, 13).unwrap();
    let mut cfg = RceConfig::new(4);
    cfg.certify = true;
    let out = rce_solve(&inst.a, &cfg).unwrap();
    assert!(out.objective.abs() < 1e-9);
    for (k, j) in inst.pure_indices.iter().enumerate() {
        assert!((out.x.get(j, j) - 1.0).abs() < 1e-7, "pure column {k} at {j}");
    }
}
