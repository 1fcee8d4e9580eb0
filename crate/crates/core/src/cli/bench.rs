use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::datagen::{gen_synthetic, noise_grid};
use crate::linalg::truncated_svd;
use crate::lp::LpStatus;
use crate::model::{solve_direct, ModelError, SolveOptions};
use crate::rce::{rce_solve, RceConfig};

use super::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub d: usize,
    pub r: usize,
    pub trials: usize,
    pub seed: u64,
    pub lambda: usize,
    pub mu: usize,
    /// Wall-clock cap for one direct full solve.
    pub time_limit: Duration,
}

/// Mean timings for one size. A capped direct solve counts with its elapsed
/// time, which is then a lower bound on the true time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub n: usize,
    pub trials: usize,
    pub rce_reduced_s: f64,
    pub rce_direct_s: f64,
    pub direct_lp_s: f64,
    pub direct_capped: usize,
    /// Largest `|opt(rce on A') - opt(direct on A')|` over uncapped trials.
    pub max_objective_gap: Option<f64>,
}

pub const BENCH_HEADER: &str =
    "n,trials,rce_reduced_s,rce_direct_s,direct_lp_s,direct_capped,max_objective_gap";

impl BenchRow {
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{:.6},{:.6},{:.6},{},{}",
            self.n,
            self.trials,
            self.rce_reduced_s,
            self.rce_direct_s,
            self.direct_lp_s,
            self.direct_capped,
            self.max_objective_gap.map(|g| format!("{g:.3e}")).unwrap_or_default()
        )
    }
}

/// Trial `t` of every size uses noise level `t + 1` of an equally spaced grid
/// on (0, 1] and seed `seed + t`.
pub fn bench_size(n: usize, cfg: &BenchConfig) -> Result<BenchRow, CliError> {
    let levels = noise_grid(cfg.trials, 1.0);
    let (mut t_red, mut t_dir, mut t_lp) = (0.0, 0.0, 0.0);
    let mut capped = 0;
    let mut gap: Option<f64> = None;
    for (t, &nu) in levels.iter().enumerate() {
        let inst = gen_synthetic(cfg.d, n, cfg.r, nu, cfg.seed + t as u64)?;
        let mut rcfg = RceConfig::new(cfg.r);
        rcfg.lambda = cfg.lambda;
        rcfg.mu = cfg.mu;
        rcfg.seed = cfg.seed;

        let start = Instant::now();
        let reduced = truncated_svd(&inst.a, cfg.r)?.reduced();
        let red = rce_solve(&reduced, &rcfg).map_err(CliError::numerical)?;
        t_red += start.elapsed().as_secs_f64();

        let start = Instant::now();
        rce_solve(&inst.a, &rcfg).map_err(CliError::numerical)?;
        t_dir += start.elapsed().as_secs_f64();

        let mut opts = SolveOptions::default();
        opts.tol.time_limit = Some(cfg.time_limit);
        let start = Instant::now();
        let reduced = truncated_svd(&inst.a, cfg.r)?.reduced();
        match solve_direct(&reduced, cfg.r, &opts) {
            Ok(sol) => {
                let g = (sol.u_star - red.objective).abs();
                gap = Some(gap.map_or(g, |x: f64| x.max(g)));
            }
            Err(ModelError::LpStatus(LpStatus::IterLimit)) => capped += 1,
            Err(e) => return Err(CliError::numerical(e)),
        }
        t_lp += start.elapsed().as_secs_f64();
    }
    let k = cfg.trials.max(1) as f64;
    Ok(BenchRow {
        n,
        trials: cfg.trials,
        rce_reduced_s: t_red / k,
        rce_direct_s: t_dir / k,
        direct_lp_s: t_lp / k,
        direct_capped: capped,
        max_objective_gap: gap,
    })
}
