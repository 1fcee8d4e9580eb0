//! The standard-form LP layer on its own: a small diet-style problem solved by
//! the built-in revised simplex, then independently verified.
//!
//! cargo run --release --example lp_solver

use eeht::lp::{solve, verify, StandardLp, ToleranceConfig};
use eeht::DenseMatrix;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // min 2x + 3y  s.t.  x + y - s1 = 4,  x + 3y - s2 = 6,  all >= 0
    let a = DenseMatrix::from_rows(&[&[1.0, 1.0, -1.0, 0.0], &[1.0, 3.0, 0.0, -1.0]])?;
    let lp = StandardLp::from_dense(vec![2.0, 3.0, 0.0, 0.0], &a, vec![4.0, 6.0])?;
    let tol = ToleranceConfig::default();
    let sol = solve(&lp, &tol)?;
    println!("status {:?} after {} pivots", sol.status, sol.iterations);
    println!("x = {:?}, objective {}", sol.x, sol.objective);
    println!("dual y = {:?}", sol.y);
    let report = verify(&lp, &sol.x, &sol.y);
    println!("independent check passes: {}", report.passes(&tol));
    Ok(())
}
