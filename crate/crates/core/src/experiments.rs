//! Batch runs of both solvers over generated scenarios, price-of-fairness
//! statistics and their CSV renderings.
//!
//! Run `i` of a batch uses seed `base_seed + i`. Runs execute on a rayon
//! pool (size from `FAIRALLOC_WORKERS` when set) and are collected in seed
//! order, so every rendered table is independent of scheduling. Wall-clock
//! timings live in their own table for the same reason.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use thiserror::Error;

use crate::mfmca::{solve_mfmca_with, solve_min_cost_with, SolveOptions};
use crate::model::{check_feasible, sorted_counts, FairnessVector};
use crate::scenario::{generate, ScenarioConfig};

pub const WORKERS_ENV: &str = "FAIRALLOC_WORKERS";

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("seed {seed}: {message}")]
    Invariant { seed: u64, message: String },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Timings {
    pub generate_ms: f64,
    pub min_cost_ms: f64,
    pub fair_ms: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRecord {
    pub scenario: String,
    pub capacity_pct: u32,
    pub jobs: u32,
    pub seed: u64,
    pub max_jobs: u32,
    pub min_cost: u64,
    pub fair_cost: u64,
    pub pof_percent: f64,
    pub min_cost_distribution: FairnessVector,
    pub fair_distribution: FairnessVector,
    pub timings: Timings,
}

/// `100 * (fair - min) / min`; zero when both costs are zero.
pub fn price_of_fairness(min_cost: u64, fair_cost: u64) -> f64 {
    if min_cost == 0 {
        return if fair_cost == 0 { 0.0 } else { f64::INFINITY };
    }
    100.0 * (fair_cost as f64 - min_cost as f64) / min_cost as f64
}

fn ms(since: Instant) -> f64 {
    since.elapsed().as_secs_f64() * 1000.0
}

/// Generates and solves one instance, checking every cross-solver invariant.
pub fn run_one(config: &ScenarioConfig, options: &SolveOptions) -> Result<ExperimentRecord, ExperimentError> {
    let seed = config.seed;
    let fail = |message: String| ExperimentError::Invariant { seed, message };

    let t = Instant::now();
    let instance = generate(config);
    let generate_ms = ms(t);

    let t = Instant::now();
    let cheap = solve_min_cost_with(&instance, options).allocation;
    let min_cost_ms = ms(t);

    let t = Instant::now();
    let fair = solve_mfmca_with(&instance, options).map_err(|e| fail(e.to_string()))?;
    let fair_ms = ms(t);

    for (name, alloc) in [("min-cost", &cheap), ("fair", &fair.allocation)] {
        match check_feasible(&instance, alloc) {
            Ok(true) => {}
            Ok(false) => return Err(fail(format!("{name} allocation infeasible"))),
            Err(e) => return Err(fail(format!("{name} allocation: {e}"))),
        }
        if alloc.len() != fair.mlmf.max_jobs as usize {
            return Err(fail(format!(
                "{name} allocation assigns {} jobs, maximum is {}",
                alloc.len(),
                fair.mlmf.max_jobs
            )));
        }
    }
    let min_cost = cheap.total_cost();
    let fair_cost = fair.allocation.total_cost();
    if fair_cost < min_cost {
        return Err(fail(format!("fair cost {fair_cost} below minimum cost {min_cost}")));
    }
    let min_cost_distribution = sorted_counts(&cheap, &instance);
    let fair_distribution = sorted_counts(&fair.allocation, &instance);
    if fair_distribution < min_cost_distribution {
        return Err(fail(format!(
            "fair distribution {fair_distribution} is leximin-below {min_cost_distribution}"
        )));
    }

    Ok(ExperimentRecord {
        scenario: config.scenario.to_string(),
        capacity_pct: config.capacity_pct,
        jobs: config.jobs,
        seed,
        max_jobs: fair.mlmf.max_jobs,
        min_cost,
        fair_cost,
        pof_percent: price_of_fairness(min_cost, fair_cost),
        min_cost_distribution,
        fair_distribution,
        timings: Timings {
            generate_ms,
            min_cost_ms,
            fair_ms,
        },
    })
}

/// Worker count from [`WORKERS_ENV`], if set to a positive integer.
pub fn configured_workers() -> Option<usize> {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
}

fn in_pool<T: Send>(job: impl FnOnce() -> T + Send) -> T {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = configured_workers() {
        builder = builder.num_threads(n);
    }
    match builder.build() {
        Ok(pool) => pool.install(job),
        Err(_) => job(),
    }
}

/// `runs` records with seeds `base_seed .. base_seed + runs`, in seed order.
/// The first failing seed (in seed order) aborts the batch.
pub fn run_batch(
    config: &ScenarioConfig,
    runs: u32,
    base_seed: u64,
    options: &SolveOptions,
) -> Result<Vec<ExperimentRecord>, ExperimentError> {
    if runs == 0 {
        return Err(ExperimentError::InvalidInput("runs must be at least 1".into()));
    }
    config
        .validate()
        .map_err(|e| ExperimentError::InvalidInput(e.to_string()))?;
    let results: Vec<Result<ExperimentRecord, ExperimentError>> = in_pool(|| {
        (0..u64::from(runs))
            .into_par_iter()
            .map(|i| run_one(&config.clone().with_seed(base_seed + i), options))
            .collect()
    });
    results.into_iter().collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stats {
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
}

impl Stats {
    /// Sample statistics; the standard deviation uses `n - 1` and is zero
    /// for a single value.
    pub fn of(values: &[f64]) -> Option<Stats> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std = if values.len() > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Some(Stats { mean, std, min, max })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub runs: usize,
    pub min_cost: Stats,
    pub fair_cost: Stats,
    pub pof_percent: Stats,
}

pub fn aggregate(records: &[ExperimentRecord]) -> Result<Summary, ExperimentError> {
    let stats = |f: fn(&ExperimentRecord) -> f64| {
        let values: Vec<f64> = records.iter().map(f).collect();
        Stats::of(&values).ok_or_else(|| ExperimentError::InvalidInput("no records to aggregate".into()))
    };
    Ok(Summary {
        runs: records.len(),
        min_cost: stats(|r| r.min_cost as f64)?,
        fair_cost: stats(|r| r.fair_cost as f64)?,
        pof_percent: stats(|r| r.pof_percent)?,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub jobs: u32,
    pub summary: Summary,
    pub records: Vec<ExperimentRecord>,
}

/// One batch per job count, all with the same seeds.
pub fn jobs_sweep(
    config: &ScenarioConfig,
    jobs_list: &[u32],
    runs: u32,
    base_seed: u64,
    options: &SolveOptions,
) -> Result<Vec<SweepPoint>, ExperimentError> {
    if jobs_list.is_empty() {
        return Err(ExperimentError::InvalidInput("empty job-count list".into()));
    }
    jobs_list
        .iter()
        .map(|&jobs| {
            let records = run_batch(&config.clone().with_jobs(jobs), runs, base_seed, options)?;
            Ok(SweepPoint {
                jobs,
                summary: aggregate(&records)?,
                records,
            })
        })
        .collect()
}

/// Parses `start:end:step` (inclusive end) into a job-count list.
pub fn parse_range(text: &str) -> Result<Vec<u32>, ExperimentError> {
    let bad = || ExperimentError::InvalidInput(format!("expected start:end:step, got `{text}`"));
    let parts: Vec<u32> = text
        .split(':')
        .map(|p| p.trim().parse::<u32>().map_err(|_| bad()))
        .collect::<Result<_, _>>()?;
    let [start, end, step] = parts[..] else { return Err(bad()) };
    if start == 0 || step == 0 || end < start {
        return Err(bad());
    }
    Ok((start..=end).step_by(step as usize).collect())
}

fn f6(v: f64) -> String {
    format!("{v:.6}")
}

pub const RECORDS_HEADER: &str = "scenario,capacity_pct,jobs,seed,max_jobs,min_cost,fair_cost,pof_percent";

/// One row per record, then a `#summary` block of sample statistics.
pub fn records_csv(records: &[ExperimentRecord]) -> Result<String, ExperimentError> {
    let summary = aggregate(records)?;
    let mut out = String::new();
    out.push_str(RECORDS_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.scenario,
            r.capacity_pct,
            r.jobs,
            r.seed,
            r.max_jobs,
            r.min_cost,
            r.fair_cost,
            f6(r.pof_percent)
        );
    }
    out.push_str("#summary\n#metric,runs,mean,std,min,max\n");
    for (name, s) in [
        ("min_cost", summary.min_cost),
        ("fair_cost", summary.fair_cost),
        ("pof_percent", summary.pof_percent),
    ] {
        let _ = writeln!(
            out,
            "#{name},{},{},{},{},{}",
            summary.runs,
            f6(s.mean),
            f6(s.std),
            f6(s.min),
            f6(s.max)
        );
    }
    Ok(out)
}

pub const DISTRIBUTION_HEADER: &str = "company_rank,min_cost_jobs,fair_jobs";

/// Sorted per-company job counts of one record, rank 1 being the company
/// with the fewest jobs.
pub fn distribution_csv(record: &ExperimentRecord) -> String {
    let mut out = format!("{DISTRIBUTION_HEADER}\n");
    let cheap = record.min_cost_distribution.values();
    let fair = record.fair_distribution.values();
    for (rank, (c, f)) in cheap.iter().zip(fair).enumerate() {
        let _ = writeln!(out, "{},{c},{f}", rank + 1);
    }
    out
}

pub const TIMINGS_HEADER: &str = "scenario,jobs,seed,generate_ms,min_cost_ms,fair_ms";

pub fn timings_csv(records: &[ExperimentRecord]) -> String {
    let mut out = format!("{TIMINGS_HEADER}\n");
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{:.3},{:.3},{:.3}",
            r.scenario, r.jobs, r.seed, r.timings.generate_ms, r.timings.min_cost_ms, r.timings.fair_ms
        );
    }
    out
}

pub const SWEEP_HEADER: &str = "scenario,capacity_pct,jobs,runs,mean_pof,std_pof,mean_min_cost,mean_fair_cost";

pub fn sweep_csv(scenario: &str, capacity_pct: u32, points: &[SweepPoint]) -> String {
    let mut out = format!("{SWEEP_HEADER}\n");
    for p in points {
        let s = &p.summary;
        let _ = writeln!(
            out,
            "{scenario},{capacity_pct},{},{},{},{},{},{}",
            p.jobs,
            s.runs,
            f6(s.pof_percent.mean),
            f6(s.pof_percent.std),
            f6(s.min_cost.mean),
            f6(s.fair_cost.mean)
        );
    }
    out
}

/// Writes `records.csv`, `timings.csv` and `distributions/seed_<seed>.csv`
/// into `dir`.
pub fn write_batch(dir: &Path, records: &[ExperimentRecord]) -> Result<(), ExperimentError> {
    fs::create_dir_all(dir.join("distributions"))?;
    fs::write(dir.join("records.csv"), records_csv(records)?)?;
    fs::write(dir.join("timings.csv"), timings_csv(records))?;
    for r in records {
        fs::write(
            dir.join("distributions").join(format!("seed_{}.csv", r.seed)),
            distribution_csv(r),
        )?;
    }
    Ok(())
}

/// Writes `sweep.csv`, `records.csv` over all points, and `timings.csv`.
pub fn write_sweep(dir: &Path, config: &ScenarioConfig, points: &[SweepPoint]) -> Result<(), ExperimentError> {
    fs::create_dir_all(dir)?;
    let all: Vec<ExperimentRecord> = points.iter().flat_map(|p| p.records.iter().cloned()).collect();
    fs::write(
        dir.join("sweep.csv"),
        sweep_csv(&config.scenario.to_string(), config.capacity_pct, points),
    )?;
    fs::write(dir.join("records.csv"), records_csv(&all)?)?;
    fs::write(dir.join("timings.csv"), timings_csv(&all))?;
    Ok(())
}
