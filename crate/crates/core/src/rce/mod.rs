//! Row and column expansion: solve `P(L, L)`, price the columns outside `L`
//! with the two certificates, grow `L` by the violators, repeat.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::baselines::{spa, SpaError};
use crate::linalg::{dist2_sq, DenseMatrix};
use crate::model::{
    assemble_full, certify_global, check_c1, check_c2, solve_all_rj, solve_lm_warm,
    CertificateReport, ModelError, SolveOptions, SubproblemSolution,
};
use crate::IndexSet;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RceConfig {
    pub r: usize,
    /// Nearest neighbours kept around each SPA pick.
    pub lambda: usize,
    /// Extra random columns added to the initial set.
    pub mu: usize,
    /// Relative tolerance of the expansion tests; the absolute threshold is
    /// `eps * max(1, u*)`.
    pub eps: f64,
    /// `None` means `n`.
    pub max_rounds: Option<usize>,
    pub seed: u64,
    /// Starting set; replaces the SPA-seeded construction when given.
    #[serde(default)]
    pub initial: Option<IndexSet>,
    /// Run the global certificate on the final solution.
    pub certify: bool,
    #[serde(skip)]
    pub solve: SolveOptions,
}

impl RceConfig {
    pub fn new(r: usize) -> Self {
        Self {
            r,
            lambda: 10,
            mu: 100,
            eps: 1e-7,
            max_rounds: None,
            seed: 0,
            initial: None,
            certify: false,
            solve: SolveOptions::default(),
        }
    }
}

/// One pass through the subproblem solve and pricing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RceRound {
    pub l: usize,
    pub u_star: f64,
    pub c1_violators: usize,
    /// `None` when the round stopped at the C1 test.
    pub c2_violators: Option<usize>,
    pub lp_seconds: f64,
    pub seconds: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RceTrace {
    pub rounds: Vec<RceRound>,
}

impl RceTrace {
    pub fn total_seconds(&self) -> f64 {
        self.rounds.iter().map(|r| r.seconds).sum()
    }
}

#[derive(Debug, Error)]
pub enum RceError {
    #[error("need at least r = {r} columns, got {n}")]
    TooFewColumns { n: usize, r: usize },
    #[error("lambda must be at least 1")]
    BadLambda,
    #[error(transparent)]
    Spa(#[from] SpaError),
    #[error("round {}: {source}", trace.rounds.len() + 1)]
    Model { source: ModelError, trace: RceTrace },
    #[error("no convergence within {rounds} rounds")]
    MaxRounds { rounds: usize, trace: RceTrace },
}

impl RceError {
    pub fn trace(&self) -> Option<&RceTrace> {
        match self {
            RceError::Model { trace, .. } | RceError::MaxRounds { trace, .. } => Some(trace),
            _ => None,
        }
    }
}

/// SPA picks, their `lambda` nearest columns (Euclidean, ties by index, the
/// pick itself included) and `mu` further columns drawn uniformly without
/// replacement from the rest with a generator seeded by `cfg.seed`.
pub fn initial_index_set(a: &DenseMatrix, cfg: &RceConfig) -> Result<IndexSet, RceError> {
    let n = a.cols();
    if n < cfg.r {
        return Err(RceError::TooFewColumns { n, r: cfg.r });
    }
    if cfg.lambda == 0 {
        return Err(RceError::BadLambda);
    }
    let anchors = spa(a, cfg.r)?;
    let mut l = IndexSet::new();
    let mut by_dist: Vec<(f64, usize)> = Vec::with_capacity(n);
    for i in anchors.iter() {
        by_dist.clear();
        by_dist.extend((0..n).map(|j| (dist2_sq(a.col(i), a.col(j)), j)));
        by_dist.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
        for &(_, j) in by_dist.iter().take(cfg.lambda) {
            l.insert(j);
        }
    }
    let rest = l.complement(n);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let take = cfg.mu.min(rest.len());
    let mut extra: Vec<usize> = rand::seq::index::sample(&mut rng, rest.len(), take)
        .into_iter()
        .map(|k| rest.as_slice()[k])
        .collect();
    extra.sort_unstable();
    for j in extra {
        l.insert(j);
    }
    Ok(l)
}

/// Result of a converged expansion run.
#[derive(Debug, Clone)]
pub struct RceOutput {
    /// Optimal `n x n` solution of the full model.
    pub x: DenseMatrix,
    pub objective: f64,
    pub trace: RceTrace,
    pub final_set: IndexSet,
    pub subproblem: SubproblemSolution,
    pub certificate: Option<CertificateReport>,
}

/// Runs the expansion loop to a certified optimum of the full model.
pub fn rce_solve(a: &DenseMatrix, cfg: &RceConfig) -> Result<RceOutput, RceError> {
    let n = a.cols();
    if n < cfg.r {
        return Err(RceError::TooFewColumns { n, r: cfg.r });
    }
    let mut l = match &cfg.initial {
        Some(l) => l.clone(),
        None => initial_index_set(a, cfg)?,
    };
    // the subproblem needs at least r rows; pad with the smallest unused indices
    for j in 0..n {
        if l.len() >= cfg.r {
            break;
        }
        l.insert(j);
    }
    let max_rounds = cfg.max_rounds.unwrap_or(n).max(1);
    let mut trace = RceTrace::default();
    let mut warm = None;

    macro_rules! model {
        ($e:expr) => {
            match $e {
                Ok(v) => v,
                Err(source) => return Err(RceError::Model { source, trace }),
            }
        };
    }

    loop {
        if trace.rounds.len() >= max_rounds {
            return Err(RceError::MaxRounds { rounds: max_rounds, trace });
        }
        let start = Instant::now();
        let sub = model!(solve_lm_warm(a, &l, &l, cfg.r, &cfg.solve, warm.as_ref()));
        warm = sub.warm.clone();
        let lp_seconds = start.elapsed().as_secs_f64();
        let eps = cfg.eps * sub.u_star.abs().max(1.0);
        let mut round = RceRound {
            l: l.len(),
            u_star: sub.u_star,
            c1_violators: 0,
            c2_violators: None,
            lp_seconds,
            seconds: 0.0,
        };

        let rjs = model!(solve_all_rj(a, &sub, &cfg.solve));
        let (c1_ok, c1_viol) = check_c1(&sub, &rjs, eps);
        round.c1_violators = c1_viol.len();
        if !c1_ok {
            round.seconds = start.elapsed().as_secs_f64();
            trace.rounds.push(round);
            c1_viol.iter().for_each(|j| {
                l.insert(j);
            });
            continue;
        }
        let (c2_ok, c2_viol) = check_c2(&sub, a, eps);
        round.c2_violators = Some(c2_viol.len());
        if !c2_ok {
            round.seconds = start.elapsed().as_secs_f64();
            trace.rounds.push(round);
            c2_viol.iter().for_each(|j| {
                l.insert(j);
            });
            continue;
        }

        let x = model!(assemble_full(&sub, &rjs, n));
        let certificate =
            if cfg.certify { Some(model!(certify_global(a, &sub, &rjs, eps))) } else { None };
        round.seconds = start.elapsed().as_secs_f64();
        trace.rounds.push(round);
        return Ok(RceOutput {
            x,
            objective: sub.u_star,
            trace,
            final_set: l,
            subproblem: sub,
            certificate,
        });
    }
}
