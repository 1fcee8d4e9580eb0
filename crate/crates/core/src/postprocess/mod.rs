//! Picking `r` columns from the diagonal of the Hottopixx solution, and the
//! end-to-end extraction pipeline.

mod cluster;

pub use cluster::{anchor_order, diameter, min_diam_cluster, threshold};

use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{dist2_sq, mean_removed_unit, truncated_svd, unit_angle, DenseMatrix, LinalgError};
use crate::rce::{rce_solve, RceConfig, RceError, RceTrace};
use crate::IndexSet;

#[derive(Debug, Error)]
pub enum PostError {
    #[error("no cluster scores above {threshold} (remaining mass {total})")]
    EmptyPsi { total: f64, threshold: f64 },
    #[error("point list entry {index} = {value} outside [0, 1]")]
    PointOutOfRange { index: usize, value: f64 },
    #[error("only {have} selectable columns for r = {need}")]
    NotEnough { need: usize, have: usize },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error(transparent)]
    Rce(#[from] RceError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Per-column scores in [0, 1], initialised from `diag(X)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointList(Vec<f64>);

// diag(X) comes out of an LP; allow rounding at the ends of [0, 1]
const POINT_SLACK: f64 = 1e-9;

impl PointList {
    /// Entries within `1e-9` of [0, 1] are clamped into it.
    pub fn new(p: Vec<f64>) -> Result<Self, PostError> {
        let mut p = p;
        for (index, v) in p.iter_mut().enumerate() {
            if !(*v >= -POINT_SLACK && *v <= 1.0 + POINT_SLACK) {
                return Err(PostError::PointOutOfRange { index, value: *v });
            }
            *v = v.clamp(0.0, 1.0);
        }
        Ok(Self(p))
    }

    pub fn get(&self, i: usize) -> f64 {
        self.0[i]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn zero_out(&mut self, members: &[usize]) {
        for &u in members {
            self.0[u] = 0.0;
        }
    }
}

/// How one column is chosen per cluster.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SelectionMethod {
    /// The `r` largest diagonal entries, no clustering.
    #[serde(rename = "eeht-a")]
    DiagTopR,
    /// Highest score in the cluster.
    #[serde(rename = "eeht-b")]
    MaxPoint,
    /// Closest in MRSA to the cluster centroid.
    #[serde(rename = "eeht-c")]
    CentroidMrsa,
}

impl SelectionMethod {
    pub fn label(self) -> &'static str {
        match self {
            SelectionMethod::DiagTopR => "eeht-a",
            SelectionMethod::MaxPoint => "eeht-b",
            SelectionMethod::CentroidMrsa => "eeht-c",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterSelection {
    pub chosen: IndexSet,
    /// `clusters[k]` is the cluster `chosen[k]` came from (a singleton for
    /// the diagonal rule).
    pub clusters: Vec<Vec<usize>>,
    pub method: SelectionMethod,
}

fn centroid_choice(a: &DenseMatrix, members: &[usize], exclude: &IndexSet) -> Option<usize> {
    let d = a.rows();
    let mut c = vec![0.0; d];
    for &u in members {
        crate::linalg::axpy(1.0 / members.len() as f64, a.col(u), &mut c);
    }
    let candidates: Vec<usize> = members.iter().copied().filter(|u| !exclude.contains(*u)).collect();
    let uc = mean_removed_unit(&c).ok().filter(|_| mean_removed_norm(&c) >= 1e-12);
    let units: Option<Vec<Vec<f64>>> = candidates
        .iter()
        .map(|&u| {
            let col = a.col(u);
            if mean_removed_norm(col) < 1e-12 {
                None
            } else {
                mean_removed_unit(col).ok()
            }
        })
        .collect();
    let dist: Vec<f64> = match (uc, units) {
        (Some(uc), Some(units)) => units.iter().map(|u| unit_angle(&uc, u)).collect(),
        // spectral angle undefined for near-constant vectors; use Euclidean distance
        _ => candidates.iter().map(|&u| dist2_sq(&c, a.col(u))).collect(),
    };
    candidates
        .iter()
        .zip(&dist)
        .min_by(|x, y| x.1.total_cmp(y.1).then(x.0.cmp(y.0)))
        .map(|(&u, _)| u)
}

fn mean_removed_norm(v: &[f64]) -> f64 {
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>().sqrt()
}

/// Chooses `r` columns from `diag_x`.
///
/// The clustering rules repeat: find the minimum-diameter cluster, pick one
/// member, zero the scores of the cluster, until `r` columns are chosen.
/// Members already chosen are not picked again.
pub fn select(
    a: &DenseMatrix,
    diag_x: &[f64],
    r: usize,
    method: SelectionMethod,
) -> Result<ClusterSelection, PostError> {
    if diag_x.len() != a.cols() {
        return Err(PostError::Shape(format!("{} scores for {} columns", diag_x.len(), a.cols())));
    }
    if r > a.cols() || r == 0 {
        return Err(PostError::NotEnough { need: r, have: a.cols() });
    }
    let mut p = PointList::new(diag_x.to_vec())?;
    let mut chosen = IndexSet::new();
    let mut clusters = Vec::with_capacity(r);
    if method == SelectionMethod::DiagTopR {
        let mut order: Vec<usize> = (0..a.cols()).collect();
        order.sort_by(|&x, &y| p.get(y).total_cmp(&p.get(x)).then(x.cmp(&y)));
        for &i in &order[..r] {
            chosen.insert(i);
            clusters.push(vec![i]);
        }
        return Ok(ClusterSelection { chosen, clusters, method });
    }
    while chosen.len() < r {
        let (_, members) = min_diam_cluster(a, &p, r)?;
        let pick = match method {
            SelectionMethod::MaxPoint => members
                .iter()
                .copied()
                .filter(|u| !chosen.contains(*u))
                .min_by(|&x, &y| p.get(y).total_cmp(&p.get(x)).then(x.cmp(&y))),
            SelectionMethod::CentroidMrsa => centroid_choice(a, &members, &chosen),
            SelectionMethod::DiagTopR => unreachable!(),
        };
        let Some(u) = pick else {
            return Err(PostError::NotEnough { need: r, have: chosen.len() });
        };
        chosen.insert(u);
        p.zero_out(&members);
        clusters.push(members);
    }
    Ok(ClusterSelection { chosen, clusters, method })
}

/// Output of the full extraction pipeline.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExtractionResult {
    pub indices: IndexSet,
    pub method: SelectionMethod,
    /// Optimal value of the Hottopixx model on the (reduced) data.
    pub objective: f64,
    pub rounds: usize,
    pub final_set_size: usize,
    pub cluster_sizes: Vec<usize>,
    pub diag: Vec<f64>,
    pub trace: RceTrace,
    pub reduced: bool,
    pub seconds: f64,
}

/// Top-`r` SVD reduction, expansion solve on the reduced matrix, then
/// selection on `diag(X)`. Cluster distances and centroid angles use the
/// columns of `a` itself: spectral angles between SVD coordinates carry no
/// spectral meaning. `reduce = false` also solves on `a`.
pub fn eeht_extract(
    a: &DenseMatrix,
    cfg: &RceConfig,
    method: SelectionMethod,
    reduce: bool,
) -> Result<ExtractionResult, PostError> {
    let start = Instant::now();
    let r = cfg.r;
    if r == 0 || r > a.rows().min(a.cols()) {
        return Err(PostError::NotEnough { need: r, have: a.rows().min(a.cols()) });
    }
    let work = if reduce { truncated_svd(a, r)?.reduced() } else { a.clone() };
    let out = rce_solve(&work, cfg)?;
    let diag = out.x.diag();
    let sel = select(a, &diag, r, method)?;
    Ok(ExtractionResult {
        indices: sel.chosen,
        method,
        objective: out.objective,
        rounds: out.trace.rounds.len(),
        final_set_size: out.final_set.len(),
        cluster_sizes: sel.clusters.iter().map(Vec::len).collect(),
        diag,
        trace: out.trace,
        reduced: reduce,
        seconds: start.elapsed().as_secs_f64(),
    })
}
