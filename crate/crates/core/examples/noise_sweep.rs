//! Build semi-real instances from a seeded toy scene and sweep the noise
//! level, comparing eeht-c with SPA.
//!
//! cargo run --release --example noise_sweep

use eeht::baselines::spa;
use eeht::datagen::{noise_grid, toy_scene, SemirealBasis};
use eeht::evalkit::match_mrsa;
use eeht::postprocess::{eeht_extract, SelectionMethod};
use eeht::rce::RceConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let r = 4;
    let scene = toy_scene(30, 200, r, 0.02, 0)?;
    let basis = SemirealBasis::new(&scene.a_real, &scene.w_ref)?;
    println!("residual norm {:.4}, endmember columns {:?}", basis.v_norm(), basis.j.as_slice());
    println!("   nu   eeht-c      spa");
    for nu in noise_grid(10, 1.0) {
        let inst = basis.at_noise(nu);
        let eeht = match eeht_extract(&inst.a, &RceConfig::new(r), SelectionMethod::CentroidMrsa, true) {
            Ok(res) => format!("{:.4}", match_mrsa(&inst.a.select_columns(res.indices.as_slice()), &inst.w)?.average_mrsa),
            Err(e) => format!("({e})"),
        };
        let s = spa(&inst.a, r)?;
        let m = match_mrsa(&inst.a.select_columns(s.as_slice()), &inst.w)?.average_mrsa;
        println!("{nu:>5.2} {eeht:>8} {m:>8.4}");
    }
    Ok(())
}
