//! Neighbourhood density in MRSA and removal of isolated columns before
//! extraction.
//!
//! cargo run --release --example density_filter

use eeht::datagen::gen_synthetic;
use eeht::evalkit::{density_histogram, kept_indices, neighborhood_density};
use eeht::DenseMatrix;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let inst = gen_synthetic(20, 200, 4, 0.1, 5)?;
    // two outliers: single-band spikes unlike any mixture
    let mut cols: Vec<Vec<f64>> = inst.a.columns().map(|c| c.to_vec()).collect();
    for band in [3, 15] {
        cols.push((0..20).map(|k| if k == band { 1.0 } else { 0.01 }).collect());
    }
    let a = DenseMatrix::from_columns(&cols)?;

    let phi = 0.25;
    let profile = neighborhood_density(&a, phi)?;
    println!("phi {phi}; outlier densities {:.3} {:.3}", profile.rho[200], profile.rho[201]);
    let hist = density_histogram(&profile.rho, 0.1)?;
    for (b, count) in hist.iter().enumerate() {
        println!("[{:.1}, {:.1}) {count}", b as f64 * 0.1, (b + 1) as f64 * 0.1);
    }
    let kept = kept_indices(&profile.rho, 0.1);
    let dropped: Vec<usize> = (0..a.cols()).filter(|&j| !kept.contains(j)).collect();
    println!("kept {} of {} columns, dropped {:?}", kept.len(), a.cols(), dropped);
    Ok(())
}
