//! Benchmark sweeps over a directory of QPS files.
//!
//! Each `(instance, config)` pair is one [`BenchRecord`]. Records are sorted
//! by instance name and then by config order, so apart from the `seconds`
//! column a rerun produces the same CSV bytes.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::QuadraticProgram;
use crate::qps::read_qps_file;
use crate::solver::{solve, LogRecord, SolverConfig, Status};

/// Shift used by [`sgm10`].
pub const SGM_SHIFT: f64 = 10.0;

/// Environment variable capping bench parallelism.
pub const THREADS_ENV: &str = "RAPDHG_THREADS";

/// Shifted geometric mean `exp(mean(ln(v + 10))) − 10`.
pub fn sgm10(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::InvalidArgument("shifted geometric mean of an empty list".into()));
    }
    if let Some(v) = values.iter().find(|v| !(**v >= 0.0)) {
        return Err(Error::InvalidArgument(format!("shifted geometric mean needs nonnegative values, got {v}")));
    }
    let mean = values.iter().map(|v| (v + SGM_SHIFT).ln()).sum::<f64>() / values.len() as f64;
    Ok(mean.exp() - SGM_SHIFT)
}

/// A named solver configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub id: String,
    pub config: SolverConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRecord {
    pub instance: String,
    pub config: String,
    /// A solver status, or `parse_error` / `solver_error`.
    pub status: String,
    pub iterations: usize,
    pub seconds: f64,
    pub r_primal: f64,
    pub r_dual: f64,
    pub r_gap: f64,
    pub relkkt: f64,
}

impl BenchRecord {
    pub fn solved(&self) -> bool {
        self.status == Status::Optimal.as_str()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigSummary {
    pub config: String,
    pub solved: usize,
    /// Unsolved runs count as `max_iters`.
    pub sgm10_iterations: f64,
    /// Unsolved runs count as `time_limit`.
    pub sgm10_seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub records: Vec<BenchRecord>,
    pub summaries: Vec<ConfigSummary>,
}

/// Thread count from [`THREADS_ENV`], or rayon's default when unset.
pub fn thread_count() -> Option<usize> {
    std::env::var(THREADS_ENV).ok()?.trim().parse().ok().filter(|n| *n > 0)
}

/// QPS/MPS files directly inside `dir`, sorted by name.
pub fn list_instances(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for entry in std::fs::read_dir(dir)? {
        let path = entry?.path();
        let ext = path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase);
        if path.is_file() && matches!(ext.as_deref(), Some("qps" | "mps")) {
            files.push(path);
        }
    }
    files.sort();
    if files.is_empty() {
        return Err(Error::InvalidArgument(format!("no QPS files in {}", dir.display())));
    }
    Ok(files)
}

fn instance_name(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

/// Runs every config on every QPS file in `dir`. When `log_dir` is given,
/// each solve's check log is written to `<instance>__<config>.csv` there.
pub fn run_bench(dir: &Path, configs: &[BenchConfig], log_dir: Option<&Path>) -> Result<BenchReport> {
    let files = list_instances(dir)?;
    let problems: Vec<(String, Result<QuadraticProgram>)> =
        files.iter().map(|f| (instance_name(f), read_qps_file(f))).collect();
    bench_problems(&problems, configs, log_dir)
}

/// Runs every config on already-loaded problems. Failed loads become
/// `parse_error` rows.
pub fn bench_problems(
    problems: &[(String, Result<QuadraticProgram>)],
    configs: &[BenchConfig],
    log_dir: Option<&Path>,
) -> Result<BenchReport> {
    if configs.is_empty() {
        return Err(Error::InvalidArgument("no bench configurations".into()));
    }
    for c in configs {
        c.config.validate()?;
    }
    if let Some(d) = log_dir {
        std::fs::create_dir_all(d)?;
    }
    let jobs: Vec<(usize, usize)> =
        (0..problems.len()).flat_map(|i| (0..configs.len()).map(move |j| (i, j))).collect();
    let run = || -> Vec<BenchRecord> {
        jobs.par_iter().map(|&(i, j)| run_one(&problems[i].0, &problems[i].1, &configs[j], log_dir)).collect()
    };
    let mut records = match thread_count() {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidArgument(e.to_string()))?
            .install(run),
        None => run(),
    };
    let order = |id: &str| configs.iter().position(|c| c.id == id).unwrap_or(usize::MAX);
    records.sort_by(|a, b| a.instance.cmp(&b.instance).then(order(&a.config).cmp(&order(&b.config))));
    let summaries = configs.iter().map(|c| summarize(c, &records)).collect::<Result<Vec<_>>>()?;
    Ok(BenchReport { records, summaries })
}

fn run_one(name: &str, problem: &Result<QuadraticProgram>, cfg: &BenchConfig, log_dir: Option<&Path>) -> BenchRecord {
    let mut rec = BenchRecord {
        instance: name.to_string(),
        config: cfg.id.clone(),
        status: "parse_error".into(),
        iterations: cfg.config.max_iters,
        seconds: 0.0,
        r_primal: f64::NAN,
        r_dual: f64::NAN,
        r_gap: f64::NAN,
        relkkt: f64::NAN,
    };
    let p = match problem {
        Ok(p) => p,
        Err(e) => {
            log::warn!("{name}: {e}");
            return rec;
        }
    };
    let start = Instant::now();
    match solve(p, &cfg.config) {
        Ok(r) => {
            rec.status = r.status.as_str().into();
            rec.iterations = r.iterations;
            rec.seconds = r.seconds;
            rec.r_primal = r.relkkt.r_primal;
            rec.r_dual = r.relkkt.r_dual;
            rec.r_gap = r.relkkt.r_gap;
            rec.relkkt = r.relkkt.relkkt;
            if let Some(d) = log_dir {
                let path = d.join(format!("{name}__{}.csv", cfg.id));
                if let Err(e) = write_log_atomic(&path, &r.log) {
                    log::warn!("{}: {e}", path.display());
                }
            }
        }
        Err(e) => {
            log::warn!("{name} [{}]: {e}", cfg.id);
            rec.status = "solver_error".into();
            rec.seconds = start.elapsed().as_secs_f64();
        }
    }
    rec
}

fn summarize(cfg: &BenchConfig, records: &[BenchRecord]) -> Result<ConfigSummary> {
    let mine: Vec<&BenchRecord> = records.iter().filter(|r| r.config == cfg.id).collect();
    let limit_iters = cfg.config.max_iters as f64;
    let limit_secs = cfg.config.time_limit;
    let iters: Vec<f64> =
        mine.iter().map(|r| if r.solved() { r.iterations as f64 } else { limit_iters }).collect();
    let secs: Vec<f64> = mine.iter().map(|r| if r.solved() { r.seconds } else { limit_secs }).collect();
    Ok(ConfigSummary {
        config: cfg.id.clone(),
        solved: mine.iter().filter(|r| r.solved()).count(),
        sgm10_iterations: sgm10(&iters)?,
        sgm10_seconds: sgm10(&secs)?,
    })
}

/// Writes the per-check log as CSV.
pub fn write_log<W: Write>(w: W, log: &[LogRecord]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in log {
        out.serialize(r).map_err(csv_err)?;
    }
    if log.is_empty() {
        out.write_record(["iter", "r_primal", "r_dual", "r_gap", "eta", "omega", "restarted"]).map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

/// Writes to a sibling temp file and renames it into place.
pub fn write_log_atomic(path: &Path, log: &[LogRecord]) -> Result<()> {
    let tmp = path.with_extension("csv.tmp");
    write_log(std::fs::File::create(&tmp)?, log)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::InvalidArgument(format!("csv: {other:?}")),
    }
}

/// Record rows followed by footer rows. Footer rows use `#solved` or
/// `#sgm10_iterations` / `#sgm10_seconds` in the instance column and carry
/// their value in the `iterations` column (counts) or `seconds` column.
pub fn write_report<W: Write>(w: W, report: &BenchReport) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["instance", "config", "status", "iterations", "seconds", "r_primal", "r_dual", "r_gap", "relkkt"])
        .map_err(csv_err)?;
    for r in &report.records {
        out.write_record([
            r.instance.clone(),
            r.config.clone(),
            r.status.clone(),
            r.iterations.to_string(),
            format!("{:.6}", r.seconds),
            r.r_primal.to_string(),
            r.r_dual.to_string(),
            r.r_gap.to_string(),
            r.relkkt.to_string(),
        ])
        .map_err(csv_err)?;
    }
    for s in &report.summaries {
        let empty = String::new;
        out.write_record(["#solved".into(), s.config.clone(), empty(), s.solved.to_string(), empty(), empty(), empty(), empty(), empty()])
            .map_err(csv_err)?;
        out.write_record([
            "#sgm10_iterations".into(),
            s.config.clone(),
            empty(),
            format!("{:.4}", s.sgm10_iterations),
            empty(),
            empty(),
            empty(),
            empty(),
            empty(),
        ])
        .map_err(csv_err)?;
        out.write_record([
            "#sgm10_seconds".into(),
            s.config.clone(),
            empty(),
            empty(),
            format!("{:.6}", s.sgm10_seconds),
            empty(),
            empty(),
            empty(),
            empty(),
        ])
        .map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}
