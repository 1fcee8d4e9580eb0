//! Command-line front end. Every command writes its outputs atomically plus a
//! [`RunManifest`] next to them.

mod bench;
mod manifest;

pub use bench::{bench_size, BenchConfig, BenchRow, BENCH_HEADER};
pub use manifest::{file_digest, manifest_path_for, RunManifest};

use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use crate::baselines::spa;
use crate::datagen::{gen_synthetic, read_matrix, write_atomic, write_indices, write_matrix, DatagenError};
use crate::evalkit::{
    abundance, density_histogram, kept_indices, match_mrsa, neighborhood_density, write_pgm, AbundanceOptions,
};
use crate::linalg::{DenseMatrix, LinalgError};
use crate::postprocess::{eeht_extract, PostError, SelectionMethod};
use crate::rce::{RceConfig, RceTrace};
use crate::IndexSet;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("numerical failure: {message}")]
    Numerical { message: String, trace: Option<RceTrace> },
    #[error(transparent)]
    Data(#[from] DatagenError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

impl CliError {
    pub(crate) fn numerical(e: impl Display) -> Self {
        CliError::Numerical { message: e.to_string(), trace: None }
    }

    /// 2 for usage errors, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

impl From<PostError> for CliError {
    fn from(e: PostError) -> Self {
        let trace = match &e {
            PostError::Rce(r) => r.trace().cloned(),
            _ => None,
        };
        CliError::Numerical { message: e.to_string(), trace }
    }
}

impl From<crate::evalkit::EvalError> for CliError {
    fn from(e: crate::evalkit::EvalError) -> Self {
        match e {
            crate::evalkit::EvalError::Linalg(l) => CliError::Linalg(l),
            other => CliError::Usage(other.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "eeht", version, about = "Endmember extraction with Hottopixx models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum Method {
    #[value(name = "eeht-a")]
    #[serde(rename = "eeht-a")]
    EehtA,
    #[value(name = "eeht-b")]
    #[serde(rename = "eeht-b")]
    EehtB,
    #[value(name = "eeht-c")]
    #[serde(rename = "eeht-c")]
    EehtC,
    #[value(name = "spa")]
    #[serde(rename = "spa")]
    Spa,
}

impl Method {
    pub fn selection(self) -> Option<SelectionMethod> {
        match self {
            Method::EehtA => Some(SelectionMethod::DiagTopR),
            Method::EehtB => Some(SelectionMethod::MaxPoint),
            Method::EehtC => Some(SelectionMethod::CentroidMrsa),
            Method::Spa => None,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic instance A = W[I, H]P + V.
    Synth {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: usize,
        #[arg(long, default_value_t = 0.0)]
        nu: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Pick r endmember columns.
    Extract {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        r: usize,
        #[arg(long, value_enum, default_value = "eeht-c")]
        method: Method,
        #[arg(long, default_value_t = 10)]
        lambda: usize,
        #[arg(long, default_value_t = 100)]
        mu: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Solve on A itself instead of the top-r SVD reduction.
        #[arg(long)]
        no_reduce: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Matched MRSA (x100) of extracted columns against references.
    Eval {
        #[arg(long)]
        est: PathBuf,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        refs: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Simplex-constrained abundances and per-endmember graymaps.
    Abundance {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        indices: PathBuf,
        #[arg(long)]
        width: usize,
        #[arg(long)]
        height: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        maps: Option<PathBuf>,
    },
    /// Neighbourhood density, its histogram and the surviving columns.
    Density {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 0.4)]
        phi: f64,
        #[arg(long, default_value_t = 0.1)]
        omega: f64,
        #[arg(long)]
        hist: PathBuf,
        #[arg(long)]
        keep: PathBuf,
    },
    /// Mean wall times of the expansion solver and the direct full solve.
    Bench {
        #[arg(long, value_delimiter = ',', default_value = "200,400,600")]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 50)]
        d: usize,
        #[arg(long, default_value_t = 10)]
        r: usize,
        #[arg(long, default_value_t = 3)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        lambda: usize,
        #[arg(long, default_value_t = 100)]
        mu: usize,
        /// Cap in seconds for one direct full solve.
        #[arg(long, default_value_t = 600.0)]
        time_limit: f64,
        #[arg(long, default_value = "timings.csv")]
        out: PathBuf,
    },
}

/// Output of `extract`.
#[derive(Debug, Clone, Serialize)]
pub struct ExtractReport {
    pub method: Method,
    pub r: usize,
    pub indices: IndexSet,
    pub objective: Option<f64>,
    pub reduced: Option<bool>,
    pub cluster_sizes: Option<Vec<usize>>,
    pub trace: Option<RceTrace>,
}

/// Reads either a plain JSON index array or an object with an `indices` field.
pub fn read_index_file(path: &Path) -> Result<IndexSet, CliError> {
    let text = std::fs::read_to_string(path).map_err(DatagenError::from)?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(DatagenError::from)?;
    let arr = match &value {
        serde_json::Value::Object(m) => m.get("indices").cloned().unwrap_or(serde_json::Value::Null),
        other => other.clone(),
    };
    let v: Vec<usize> = serde_json::from_value(arr)
        .map_err(|e| CliError::Usage(format!("{}: not an index list ({e})", path.display())))?;
    Ok(IndexSet::from(v))
}

fn check_indices(idx: &IndexSet, n: usize) -> Result<(), CliError> {
    match idx.iter().find(|&i| i >= n) {
        Some(i) => Err(CliError::Usage(format!("index {i} out of range for {n} columns"))),
        None if idx.is_empty() => Err(CliError::Usage("empty index set".into())),
        None => Ok(()),
    }
}

fn check_rank(r: usize, a: &DenseMatrix) -> Result<(), CliError> {
    if r == 0 || r > a.rows().min(a.cols()) {
        return Err(CliError::Usage(format!("r = {r} outside 1..={} for a {}x{} matrix", a.rows().min(a.cols()), a.rows(), a.cols())));
    }
    Ok(())
}

fn seconds(start: Instant) -> f64 {
    start.elapsed().as_secs_f64()
}

/// Runs one parsed command.
pub fn run(cli: Cli) -> Result<(), CliError> {
    let start = Instant::now();
    match cli.command {
        Command::Synth { d, n, r, nu, seed, out } => {
            if r == 0 || r > d.min(n) || !(nu >= 0.0 && nu.is_finite()) {
                return Err(CliError::Usage(format!("need 1 <= r <= min(d, n) and nu >= 0; got d={d} n={n} r={r} nu={nu}")));
            }
            let inst = gen_synthetic(d, n, r, nu, seed)?;
            std::fs::create_dir_all(&out).map_err(DatagenError::from)?;
            let mut m = RunManifest::new("synth", json!({"d": d, "n": n, "r": r, "nu": nu}), Some(seed));
            for (name, mat) in [("A.dmat", &inst.a), ("W.dmat", &inst.w), ("H.dmat", &inst.h), ("V.dmat", &inst.v)] {
                let p = out.join(name);
                write_matrix(&p, mat)?;
                m.add_output(&p)?;
            }
            let p = out.join("pure.json");
            write_indices(&p, &inst.pure_indices)?;
            m.add_output(&p)?;
            m.timings.insert("total".into(), seconds(start));
            m.write(&out.join("manifest.json"))?;
        }
        Command::Extract { input, r, method, lambda, mu, seed, no_reduce, out } => {
            let a = read_matrix(&input)?;
            check_rank(r, &a)?;
            if lambda == 0 {
                return Err(CliError::Usage("--lambda must be at least 1".into()));
            }
            let report = match method.selection() {
                None => ExtractReport {
                    method,
                    r,
                    indices: spa(&a, r).map_err(CliError::numerical)?,
                    objective: None,
                    reduced: None,
                    cluster_sizes: None,
                    trace: None,
                },
                Some(sel) => {
                    let mut cfg = RceConfig::new(r);
                    cfg.lambda = lambda;
                    cfg.mu = mu;
                    cfg.seed = seed;
                    let res = eeht_extract(&a, &cfg, sel, !no_reduce)?;
                    ExtractReport {
                        method,
                        r,
                        indices: res.indices,
                        objective: Some(res.objective),
                        reduced: Some(res.reduced),
                        cluster_sizes: Some(res.cluster_sizes),
                        trace: Some(res.trace),
                    }
                }
            };
            write_atomic(&out, &serde_json::to_vec_pretty(&report).map_err(DatagenError::from)?)?;
            let mut m = RunManifest::new(
                "extract",
                json!({"r": r, "method": method, "lambda": lambda, "mu": mu, "reduce": !no_reduce}),
                Some(seed),
            );
            m.add_input(&input)?;
            m.add_output(&out)?;
            m.timings.insert("total".into(), seconds(start));
            m.write(&manifest_path_for(&out))?;
        }
        Command::Eval { est, input, refs, out } => {
            let a = read_matrix(&input)?;
            let w = read_matrix(&refs)?;
            let idx = read_index_file(&est)?;
            check_indices(&idx, a.cols())?;
            if idx.len() != w.cols() {
                return Err(CliError::Usage(format!("{} estimates against {} references", idx.len(), w.cols())));
            }
            let rep = match_mrsa(&a.select_columns(idx.as_slice()), &w)?;
            let mut csv = String::from("endmember,column,reference,mrsa_x100\n");
            for (k, (&col, (&refk, &v))) in
                idx.iter().collect::<Vec<_>>().iter().zip(rep.permutation.iter().zip(&rep.per_endmember_mrsa)).enumerate()
            {
                csv.push_str(&format!("{k},{col},{refk},{:.6}\n", 100.0 * v));
            }
            csv.push_str(&format!("average,,,{:.6}\n", 100.0 * rep.average_mrsa));
            write_atomic(&out, csv.as_bytes())?;
            let mut m = RunManifest::new("eval", json!({}), None);
            for p in [&est, &input, &refs] {
                m.add_input(p)?;
            }
            m.add_output(&out)?;
            m.timings.insert("total".into(), seconds(start));
            m.write(&manifest_path_for(&out))?;
        }
        Command::Abundance { input, indices, width, height, out, maps } => {
            let a = read_matrix(&input)?;
            let idx = read_index_file(&indices)?;
            check_indices(&idx, a.cols())?;
            if maps.is_some() && width * height != a.cols() {
                return Err(CliError::Usage(format!("{width}x{height} pixels for {} columns", a.cols())));
            }
            let res = abundance(&a, &idx, &AbundanceOptions::default())?;
            write_matrix(&out, &res.h)?;
            let mut m = RunManifest::new(
                "abundance",
                json!({"width": width, "height": height, "unconverged": res.unconverged}),
                None,
            );
            m.add_input(&input)?;
            m.add_input(&indices)?;
            m.add_output(&out)?;
            if let Some(dir) = &maps {
                std::fs::create_dir_all(dir).map_err(DatagenError::from)?;
                for k in 0..res.h.rows() {
                    let mut bytes = Vec::new();
                    write_pgm(&mut bytes, &res.h.row(k), width, height).map_err(DatagenError::from)?;
                    let p = dir.join(format!("endmember_{k}.pgm"));
                    write_atomic(&p, &bytes)?;
                    m.add_output(&p)?;
                }
            }
            m.timings.insert("total".into(), seconds(start));
            m.write(&manifest_path_for(&out))?;
        }
        Command::Density { input, phi, omega, hist, keep } => {
            if !(0.0..=1.0).contains(&phi) || !(0.0..=1.0).contains(&omega) {
                return Err(CliError::Usage(format!("phi = {phi} and omega = {omega} must lie in [0, 1]")));
            }
            let a = read_matrix(&input)?;
            let prof = neighborhood_density(&a, phi)?;
            let counts = density_histogram(&prof.rho, 0.01)?;
            let mut csv = String::from("bin_lower,bin_upper,count\n");
            for (k, c) in counts.iter().enumerate() {
                csv.push_str(&format!("{:.2},{:.2},{c}\n", k as f64 * 0.01, (k + 1) as f64 * 0.01));
            }
            write_atomic(&hist, csv.as_bytes())?;
            let kept = kept_indices(&prof.rho, omega);
            write_indices(&keep, &kept)?;
            let mut m = RunManifest::new(
                "density",
                json!({"phi": phi, "omega": omega, "kept": kept.len(), "flagged": a.cols() - kept.len()}),
                None,
            );
            m.add_input(&input)?;
            m.add_output(&hist)?;
            m.add_output(&keep)?;
            m.timings.insert("total".into(), seconds(start));
            m.write(&manifest_path_for(&keep))?;
        }
        Command::Bench { sizes, d, r, trials, seed, lambda, mu, time_limit, out } => {
            if sizes.is_empty() || trials == 0 || r == 0 || r > d || sizes.iter().any(|&n| n < r) {
                return Err(CliError::Usage("need nonempty sizes >= r, trials >= 1 and 1 <= r <= d".into()));
            }
            if !(time_limit > 0.0 && time_limit.is_finite()) {
                return Err(CliError::Usage(format!("--time-limit {time_limit} must be positive")));
            }
            let cfg = BenchConfig {
                d,
                r,
                trials,
                seed,
                lambda,
                mu,
                time_limit: Duration::from_secs_f64(time_limit),
            };
            let mut csv = format!("{BENCH_HEADER}\n");
            let mut m = RunManifest::new(
                "bench",
                json!({"sizes": sizes, "d": d, "r": r, "trials": trials, "lambda": lambda, "mu": mu, "time_limit": time_limit}),
                Some(seed),
            );
            for &n in &sizes {
                let row = bench_size(n, &cfg)?;
                eprintln!("{}", row.csv_line());
                m.timings.insert(format!("n={n}"), row.rce_reduced_s + row.rce_direct_s + row.direct_lp_s);
                csv.push_str(&row.csv_line());
                csv.push('\n');
            }
            write_atomic(&out, csv.as_bytes())?;
            m.add_output(&out)?;
            m.timings.insert("total".into(), seconds(start));
            m.write(&manifest_path_for(&out))?;
        }
    }
    Ok(())
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if let CliError::Numerical { trace: Some(t), .. } = &e {
                if let Ok(s) = serde_json::to_string_pretty(t) {
                    eprintln!("trace: {s}");
                }
            }
            e.exit_code()
        }
    }
}
