//! Seeded multi-run experiments and their summary table.
//!
//! Run `k` of a bench uses seed `base_seed + k`. Runs execute in parallel,
//! aggregation is single-threaded and sorts everything it sums, so the report
//! does not depend on completion order. A run fails when the solver rejects
//! its parameters or no evaluation of it succeeded; failures are listed in the
//! report and the statistics cover the successful runs only.

use std::path::{Path, PathBuf};
use std::time::Instant;

use limbsynth_core::solver::{
    run_baseline_fa_with_clock, run_random_search_with_clock, run_with_clock, Clock, NoClock, Problem, RunResult,
    RunTrace, SolverParams,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::io;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    /// Multi-subpopulation correction firefly search.
    Mscfa,
    /// Plain firefly search.
    Fa,
    /// Uniform random search with the same evaluation budget.
    Random,
}

impl Algorithm {
    pub fn id(self) -> &'static str {
        match self {
            Algorithm::Mscfa => "mscfa",
            Algorithm::Fa => "fa",
            Algorithm::Random => "random",
        }
    }
}

/// Wall time since construction.
#[derive(Debug, Clone, Copy)]
pub struct WallClock(Instant);

impl WallClock {
    pub fn start() -> Self {
        WallClock(Instant::now())
    }
}

impl Clock for WallClock {
    fn elapsed_ms(&self) -> f64 {
        self.0.elapsed().as_secs_f64() * 1e3
    }
}

/// Evaluations a firefly run spends: the initial population plus one
/// population per iteration. Random search gets the same budget.
pub fn evaluation_budget(params: &SolverParams) -> usize {
    params.pop * (params.max_iter + 1)
}

/// One run of `algorithm`. Wall times are recorded only when `timing` is set
/// and are zero otherwise, which keeps outputs byte-identical across reruns.
pub fn run_once<P: Problem + ?Sized>(
    problem: &P,
    algorithm: Algorithm,
    params: &SolverParams,
    seed: u64,
    timing: bool,
) -> limbsynth_core::Result<RunResult> {
    let wall = WallClock::start();
    let clock: &dyn Clock = if timing { &wall } else { &NoClock };
    match algorithm {
        Algorithm::Mscfa => run_with_clock(problem, params, seed, clock),
        Algorithm::Fa => run_baseline_fa_with_clock(problem, params, seed, clock),
        Algorithm::Random => run_random_search_with_clock(problem, params, evaluation_budget(params), seed, clock),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub seed: u64,
    /// Why the run failed; `None` on success.
    pub error: Option<String>,
    pub best_phi: f64,
    pub initial_best_phi: f64,
    pub best_x: Vec<f64>,
    pub conv_iter: Option<usize>,
    pub iterations: usize,
    pub evaluations: usize,
    pub failed_evaluations: usize,
    pub wall_ms: f64,
    #[serde(skip)]
    pub trace: Option<RunTrace>,
}

impl RunRecord {
    pub fn from_result(seed: u64, result: limbsynth_core::Result<RunResult>) -> Self {
        match result {
            Ok(r) => RunRecord {
                seed,
                error: r.best.failed.then(|| "no evaluation of this run succeeded".to_string()),
                best_phi: r.best.phi,
                initial_best_phi: r.trace.initial_best_phi,
                best_x: r.best.x,
                conv_iter: r.trace.conv_iter(),
                iterations: r.trace.iterations(),
                evaluations: r.trace.evaluations,
                failed_evaluations: r.trace.failed_evaluations,
                wall_ms: r.trace.total_ms(),
                trace: Some(r.trace),
            },
            Err(e) => RunRecord {
                seed,
                error: Some(e.to_string()),
                best_phi: f64::INFINITY,
                initial_best_phi: f64::INFINITY,
                best_x: Vec::new(),
                conv_iter: None,
                iterations: 0,
                evaluations: 0,
                failed_evaluations: 0,
                wall_ms: 0.0,
                trace: None,
            },
        }
    }

    pub fn ok(&self) -> bool {
        self.error.is_none()
    }

    pub fn ms_per_iter(&self) -> f64 {
        if self.iterations == 0 {
            0.0
        } else {
            self.wall_ms / self.iterations as f64
        }
    }
}

/// Mean and sample standard deviation (`n - 1` denominator; zero for a
/// single value).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stat {
    pub mean: f64,
    pub sd: f64,
    pub count: usize,
}

impl Stat {
    /// `None` for an empty sample. Values are summed in sorted order so the
    /// result does not depend on their order.
    pub fn of(values: &[f64]) -> Option<Stat> {
        if values.is_empty() {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let n = v.len() as f64;
        let mean = v.iter().sum::<f64>() / n;
        let mut sq: Vec<f64> = v.iter().map(|x| (x - mean) * (x - mean)).collect();
        sq.sort_by(f64::total_cmp);
        let sd = if v.len() > 1 {
            (sq.iter().sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Some(Stat {
            mean,
            sd,
            count: v.len(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailedRun {
    pub seed: u64,
    pub error: String,
}

/// Cost of the best solution re-evaluated with more workspace samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Reevaluation {
    pub n: usize,
    pub phi: f64,
    /// `|phi - best_cost| / best_cost` of the best run.
    pub relative_change: f64,
}

/// Summary of a bench, with the fields of a published comparison table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub algorithm: Algorithm,
    pub max_iter: usize,
    pub pop: usize,
    pub config_hash: String,
    pub seeds: Vec<u64>,
    /// Successful runs.
    pub runs: usize,
    pub failed_runs: Vec<FailedRun>,
    pub best_cost: Option<Stat>,
    pub best_seed: Option<u64>,
    pub best_cost_of_best_run: Option<f64>,
    pub best_solution: Option<Vec<f64>>,
    /// Sum of the link lengths of `best_solution`.
    pub total_length: Option<f64>,
    /// Over the runs that converged.
    pub conv_iter: Option<Stat>,
    pub converged_runs: usize,
    pub time_per_run_ms: Option<Stat>,
    pub time_per_iter_ms: Option<Stat>,
    pub reevaluation: Option<Reevaluation>,
}

impl BenchReport {
    pub fn all_succeeded(&self) -> bool {
        self.failed_runs.is_empty()
    }
}

pub fn aggregate(algorithm: Algorithm, params: &SolverParams, config_hash: &str, records: &[RunRecord]) -> BenchReport {
    let mut records: Vec<&RunRecord> = records.iter().collect();
    records.sort_by_key(|r| r.seed);
    let ok: Vec<&RunRecord> = records.iter().copied().filter(|r| r.ok()).collect();
    let values = |f: &dyn Fn(&RunRecord) -> f64| ok.iter().map(|r| f(r)).collect::<Vec<_>>();
    // Lowest cost wins; ties go to the lowest seed.
    let best = ok.iter().copied().min_by(|a, b| a.best_phi.total_cmp(&b.best_phi).then(a.seed.cmp(&b.seed)));
    let conv: Vec<f64> = ok.iter().filter_map(|r| r.conv_iter).map(|c| c as f64).collect();
    BenchReport {
        algorithm,
        max_iter: params.max_iter,
        pop: params.pop,
        config_hash: config_hash.to_string(),
        seeds: records.iter().map(|r| r.seed).collect(),
        runs: ok.len(),
        failed_runs: records
            .iter()
            .filter_map(|r| {
                r.error.as_ref().map(|e| FailedRun {
                    seed: r.seed,
                    error: e.clone(),
                })
            })
            .collect(),
        best_cost: Stat::of(&values(&|r| r.best_phi)),
        best_seed: best.map(|r| r.seed),
        best_cost_of_best_run: best.map(|r| r.best_phi),
        best_solution: best.map(|r| r.best_x.clone()),
        total_length: best.filter(|r| r.best_x.len() == 5).map(|r| r.best_x[..4].iter().sum()),
        conv_iter: Stat::of(&conv),
        converged_runs: conv.len(),
        time_per_run_ms: Stat::of(&values(&|r| r.wall_ms)),
        time_per_iter_ms: Stat::of(&values(&RunRecord::ms_per_iter)),
        reevaluation: None,
    }
}

#[derive(Debug, Clone)]
pub struct BenchOutcome {
    pub report: BenchReport,
    /// Ordered by seed.
    pub runs: Vec<RunRecord>,
}

/// Runs seeds `base_seed .. base_seed + n_runs` in parallel and aggregates.
pub fn repeat_runs<P: Problem + ?Sized>(
    problem: &P,
    algorithm: Algorithm,
    params: &SolverParams,
    n_runs: usize,
    base_seed: u64,
    timing: bool,
    config_hash: &str,
) -> Result<BenchOutcome> {
    if n_runs == 0 {
        return Err(CliError::Config("a bench needs at least one run".into()));
    }
    params.validate()?;
    let runs: Vec<RunRecord> = (0..n_runs as u64)
        .into_par_iter()
        .map(|k| {
            let seed = base_seed.wrapping_add(k);
            RunRecord::from_result(seed, run_once(problem, algorithm, params, seed, timing))
        })
        .collect();
    let report = aggregate(algorithm, params, config_hash, &runs);
    Ok(BenchOutcome { report, runs })
}

/// Re-evaluates the reported best solution on `problem` (typically the same
/// instance with more workspace samples) and records the change in cost.
pub fn reevaluate<P: Problem + ?Sized>(report: &mut BenchReport, problem: &P, n: usize) {
    let (Some(x), Some(best)) = (&report.best_solution, report.best_cost_of_best_run) else {
        return;
    };
    let phi = problem.evaluate(x).phi;
    report.reevaluation = Some(Reevaluation {
        n,
        phi,
        relative_change: (phi - best).abs() / best.abs().max(f64::MIN_POSITIVE),
    });
}

pub const TABLE_HEADER: [&str; 18] = [
    "algorithm",
    "max_iter",
    "pop",
    "best_cost_mean",
    "best_cost_sd",
    "best_solution",
    "total_length",
    "conv_iter_mean",
    "conv_iter_sd",
    "time_per_iter_ms_mean",
    "time_per_iter_ms_sd",
    "time_per_run_ms_mean",
    "time_per_run_ms_sd",
    "runs",
    "failed_runs",
    "converged_runs",
    "config_hash",
    "seeds",
];

fn opt(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn joined<T: ToString>(values: &[T]) -> String {
    values.iter().map(T::to_string).collect::<Vec<_>>().join(" ")
}

/// CSV table with the columns of the published comparison, in the same
/// order, followed by bookkeeping columns. Empty input gives the header.
pub fn emit_table(reports: &[BenchReport]) -> String {
    let mut out = Vec::new();
    {
        let mut w = csv::Writer::from_writer(&mut out);
        w.write_record(TABLE_HEADER).expect("in-memory write");
        for r in reports {
            let mean = |s: &Option<Stat>| opt(s.map(|s| s.mean));
            let sd = |s: &Option<Stat>| opt(s.map(|s| s.sd));
            w.write_record([
                r.algorithm.id().to_string(),
                r.max_iter.to_string(),
                r.pop.to_string(),
                mean(&r.best_cost),
                sd(&r.best_cost),
                r.best_solution.as_ref().map(|x| format!("[{}]", joined(x))).unwrap_or_default(),
                opt(r.total_length),
                mean(&r.conv_iter),
                sd(&r.conv_iter),
                mean(&r.time_per_iter_ms),
                sd(&r.time_per_iter_ms),
                mean(&r.time_per_run_ms),
                sd(&r.time_per_run_ms),
                r.runs.to_string(),
                r.failed_runs.len().to_string(),
                r.converged_runs.to_string(),
                r.config_hash.clone(),
                joined(&r.seeds),
            ])
            .expect("in-memory write");
        }
        w.flush().expect("in-memory flush");
    }
    String::from_utf8(out).expect("csv output is UTF-8")
}

pub fn trace_file_name(algorithm: Algorithm, seed: u64) -> String {
    format!("trace-{}-seed{seed}.csv", algorithm.id())
}

/// One trace CSV per successful run, named by algorithm and seed.
pub fn emit_traces(outcome: &BenchOutcome, dir: &Path) -> Result<Vec<PathBuf>> {
    let r = &outcome.report;
    let mut written = Vec::new();
    for run in &outcome.runs {
        let Some(trace) = &run.trace else { continue };
        let path = dir.join(trace_file_name(r.algorithm, run.seed));
        let meta = [
            ("algorithm", r.algorithm.id().to_string()),
            ("seed", run.seed.to_string()),
            ("config_hash", r.config_hash.clone()),
        ];
        io::write_bytes(&path, &io::trace_csv(trace, &meta))?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stat_conventions() {
        let s = Stat::of(&[2.0]).unwrap();
        assert_eq!((s.mean, s.sd, s.count), (2.0, 0.0, 1));
        let s = Stat::of(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(s.mean, 2.5);
        // Sample variance 5/3.
        assert!((s.sd - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!(Stat::of(&[]).is_none());
    }

    #[test]
    fn empty_table_is_header_only() {
        assert_eq!(emit_table(&[]), TABLE_HEADER.join(",") + "\n");
    }
}
