//! Generate a noisy synthetic instance and compare the three selection rules
//! with SPA by matching MRSA against the planted endmembers.
//!
//! cargo run --release --example synth_and_extract

use eeht::baselines::spa;
use eeht::datagen::gen_synthetic;
use eeht::evalkit::match_mrsa;
use eeht::postprocess::{eeht_extract, SelectionMethod};
use eeht::rce::RceConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (d, n, r, nu) = (30, 300, 6, 0.3);
    let inst = gen_synthetic(d, n, r, nu, 42)?;
    println!("d={d} n={n} r={r} nu={nu}, pure columns {:?}", inst.pure_indices.as_slice());

    let cfg = RceConfig::new(r);
    for method in [SelectionMethod::DiagTopR, SelectionMethod::MaxPoint, SelectionMethod::CentroidMrsa] {
        let res = eeht_extract(&inst.a, &cfg, method, true)?;
        let score = match_mrsa(&inst.a.select_columns(res.indices.as_slice()), &inst.w)?;
        println!(
            "{}: {:?}  average MRSA {:.4}  (objective {:.4}, {} rounds, {:.2}s)",
            method.label(),
            res.indices.as_slice(),
            score.average_mrsa,
            res.objective,
            res.rounds,
            res.seconds
        );
    }
    let s = spa(&inst.a, r)?;
    let score = match_mrsa(&inst.a.select_columns(s.as_slice()), &inst.w)?;
    println!("spa: {:?}  average MRSA {:.4}", s.as_slice(), score.average_mrsa);
    Ok(())
}
