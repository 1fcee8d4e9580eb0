//! Estimate abundances for the planted endmembers of a synthetic scene and
//! write one PGM map per endmember into a temporary directory.
//!
//! cargo run --release --example abundance_maps

use std::fs::File;
use std::io::BufWriter;

use eeht::datagen::gen_synthetic;
use eeht::evalkit::{abundance, write_pgm, AbundanceOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (width, height, r) = (20, 15, 3);
    let inst = gen_synthetic(12, width * height, r, 0.05, 3)?;
    let res = abundance(&inst.a, &inst.pure_indices, &AbundanceOptions::default())?;
    println!("max iterations {}, unconverged columns {}", res.max_iterations, res.unconverged);

    let dir = tempfile::tempdir()?;
    for k in 0..r {
        let row = res.h.row(k);
        let path = dir.path().join(format!("endmember_{k}.pgm"));
        write_pgm(&mut BufWriter::new(File::create(&path)?), &row, width, height)?;
        let mean = row.iter().sum::<f64>() / row.len() as f64;
        println!("endmember {k}: mean abundance {mean:.3}, map {}", path.display());
    }
    // keep the maps around for inspection
    let kept = dir.keep();
    println!("maps in {}", kept.display());
    Ok(())
}
