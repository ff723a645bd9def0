use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use limbsynth::bench::{self, Algorithm, BenchOutcome, BenchReport, RunRecord};
use limbsynth::config::{RunConfig, OUTPUT_DIR_ENV};
use limbsynth::error::{CliError, Result};
use limbsynth::io::{self, CloudFile, EllipsoidFile, ProfileFile};
use limbsynth::pipeline;
use limbsynth_core::ellipsoid::{fit_workspace, MveeOptions};
use limbsynth_core::kinematics::{
    build_cane_model, build_human_arm, build_srl_lower, build_srl_upper, reduced_workspace, sample_workspace,
    GroundFilter,
};
use limbsynth_core::objectives::{DecisionVector, ObjectiveProfile, ReferenceFront};
use serde::Serialize;

/// Kinematic sizing of a dual-function supernumerary limb.
///
/// Settings come from built-in defaults, then `--config`, then the
/// LIMBSYNTH_OUTPUT_DIR environment variable (output directory only), then
/// flags. Every output records the config hash and seed.
#[derive(Parser, Debug)]
#[command(name = "limbsynth", version)]
struct Cli {
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides the output directory.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Record wall times. Off by default so reruns are byte-identical.
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample a workspace point cloud.
    Workspace {
        #[arg(long, value_enum)]
        mode: WorkspaceMode,
        /// Decision vector l1,l2,l3,l4,c for the limb modes.
        #[arg(long, value_delimiter = ',', default_values_t = PROTOTYPE_X)]
        x: Vec<f64>,
        /// Sample count; defaults to the configured `n`.
        #[arg(long)]
        n: Option<usize>,
        /// Keep only leg-mode samples that can brace against the ground.
        #[arg(long)]
        reduced: bool,
        /// `.csv` or `.json`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit the minimum-volume enclosing ellipsoid of a point cloud.
    Fit {
        cloud: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the sub-objectives and cost of one design.
    Eval {
        #[arg(long, value_delimiter = ',', required = true)]
        x: Vec<f64>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the profile as a CSV row.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Run one optimization and write its trace and report.
    Optimize {
        #[arg(long, value_enum, default_value_t = Algorithm::Mscfa)]
        algo: Algorithm,
    },
    /// Repeat seeded runs and tabulate them.
    Bench {
        #[arg(long, default_value_t = 10)]
        runs: usize,
        #[arg(long, value_enum, value_delimiter = ',', default_values_t = [Algorithm::Mscfa, Algorithm::Fa, Algorithm::Random])]
        algo: Vec<Algorithm>,
    },
    /// Estimate (or load from cache) the reference front.
    Front,
}

/// Link lengths and mounting offset of the built prototype.
const PROTOTYPE_X: [f64; 5] = [0.1, 0.4, 0.3, 0.2, 0.19];

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum WorkspaceMode {
    #[value(alias = "srl_upper")]
    SrlUpper,
    #[value(alias = "srl_lower")]
    SrlLower,
    #[value(alias = "human_arm")]
    HumanArm,
    Cane,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn resolve_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(dir) = std::env::var_os(OUTPUT_DIR_ENV).filter(|d| !d.is_empty()) {
        cfg.output_dir = dir.into();
    }
    if let Some(dir) = &cli.out_dir {
        cfg.output_dir = dir.clone();
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn execute(cli: Cli) -> Result<u8> {
    // Schema problems surface before any work starts.
    let cfg = resolve_config(&cli)?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(CliError::Config("--threads must be positive".into()));
        }
        pool = pool.num_threads(t);
    }
    let pool = pool.build().map_err(|e| CliError::Config(e.to_string()))?;
    pool.install(|| dispatch(&cli, &cfg))
}

fn dispatch(cli: &Cli, cfg: &RunConfig) -> Result<u8> {
    let hash = cfg.hash();
    let out = &cfg.output_dir;
    match &cli.command {
        Command::Workspace {
            mode,
            x,
            n,
            reduced,
            out: path,
        } => {
            let n = n.unwrap_or(cfg.n);
            let x = DecisionVector::from_slice(x)?;
            if *reduced && *mode != WorkspaceMode::SrlLower {
                return Err(CliError::Config("--reduced applies to srl-lower only".into()));
            }
            let cloud = match mode {
                WorkspaceMode::SrlUpper => sample_workspace(&build_srl_upper(&x, &cfg.body)?, n, cfg.seed),
                WorkspaceMode::SrlLower => {
                    let chain = build_srl_lower(&x, &cfg.body)?;
                    let filter = if *reduced {
                        GroundFilter::Plane {
                            ground_offset: cfg.body.ground_offset,
                        }
                    } else {
                        GroundFilter::Disabled
                    };
                    reduced_workspace(&chain, filter, n, cfg.seed)?
                }
                WorkspaceMode::HumanArm => sample_workspace(&build_human_arm(&cfg.body)?, n, cfg.seed),
                WorkspaceMode::Cane => sample_workspace(&build_cane_model(&cfg.body)?, n, cfg.seed),
            };
            if cloud.is_empty() {
                return Err(limbsynth_core::Error::EmptyWorkspace.into());
            }
            let file = CloudFile::new(&cloud, Some(hash));
            let label = mode.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default();
            let name = format!("workspace-{label}-seed{}.csv", cfg.seed);
            let path = path.clone().unwrap_or_else(|| out.join(name));
            io::write_cloud(&path, &file)?;
            println!("{}", path.display());
        }
        Command::Fit { cloud, out: path } => {
            let file = io::read_cloud(cloud)?;
            let opts = MveeOptions {
                tol: cfg.mvee_tol,
                max_iter: cfg.mvee_max_iter,
            };
            let fit = fit_workspace(&file.vectors(), &opts, cfg.body.min_thickness)?;
            let doc = EllipsoidFile::new(&fit.ellipsoid, &fit.report, opts.tol, fit.planar, &file);
            let stem = cloud.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            let path = path.clone().unwrap_or_else(|| out.join(format!("{stem}-ellipsoid.json")));
            io::write_json(&path, &doc)?;
            println!("{}", path.display());
        }
        Command::Eval {
            x,
            n,
            out: path,
            csv,
        } => {
            let n = n.unwrap_or(cfg.n);
            let x = DecisionVector::from_slice(x)?;
            let front = pipeline::reference_front(cfg, Some(&cache_dir(out)))?;
            let profile = pipeline::evaluator(cfg, n)?.profile(&x, &front.pf)?;
            let path = path.clone().unwrap_or_else(|| out.join(format!("profile-seed{}.json", cfg.seed)));
            io::write_json(&path, &ProfileFile::new(&profile, &front, n, &hash, cfg.seed))?;
            println!("{}", path.display());
            if let Some(csv) = csv {
                io::write_bytes(csv, &io::profiles_csv(&[profile], &hash, cfg.seed))?;
                println!("{}", csv.display());
            }
        }
        Command::Optimize { algo } => {
            let front = pipeline::reference_front(cfg, Some(&cache_dir(out)))?;
            let outcome = run_bench(cfg, &front, *algo, 1, cli.timing)?;
            let run = &outcome.runs[0];
            let dir = out.join(format!("optimize-{}-seed{}", algo.id(), cfg.seed));
            for p in bench::emit_traces(&outcome, &dir)? {
                println!("{}", p.display());
            }
            let best = best_profile(cfg, &front, &outcome.report)?;
            let report = OptimizeReport {
                config_hash: &hash,
                seed: cfg.seed,
                run,
                table: &outcome.report,
                best_profile: best.as_ref().map(|p| ProfileFile::new(p, &front, cfg.n, &hash, cfg.seed)),
            };
            let path = dir.join("report.json");
            io::write_json(&path, &report)?;
            io::write_bytes(&dir.join("table.csv"), bench::emit_table(&[outcome.report.clone()]).as_bytes())?;
            println!("{}", path.display());
            if !outcome.report.all_succeeded() {
                return Ok(3);
            }
        }
        Command::Bench { runs, algo } => {
            let front = pipeline::reference_front(cfg, Some(&cache_dir(out)))?;
            let dir = out.join(format!("bench-seed{}", cfg.seed));
            let mut reports = Vec::new();
            for a in algo {
                let outcome = run_bench(cfg, &front, *a, *runs, cli.timing)?;
                bench::emit_traces(&outcome, &dir.join("traces"))?;
                let doc = BenchFile {
                    config_hash: &hash,
                    report: &outcome.report,
                    runs: &outcome.runs,
                };
                let path = dir.join(format!("report-{}.json", a.id()));
                io::write_json(&path, &doc)?;
                println!("{}", path.display());
                reports.push(outcome.report);
            }
            let path = dir.join("table.csv");
            io::write_bytes(&path, bench::emit_table(&reports).as_bytes())?;
            println!("{}", path.display());
            if reports.iter().any(|r| !r.all_succeeded()) {
                return Ok(3);
            }
        }
        Command::Front => {
            let front = pipeline::reference_front(cfg, Some(&cache_dir(out)))?;
            let path = out.join(format!("front-seed{}.json", cfg.seed));
            io::write_json(
                &path,
                &FrontFile {
                    config_hash: &hash,
                    seed: cfg.seed,
                    objective_names: &limbsynth_core::objectives::OBJECTIVE_NAMES,
                    front: &front,
                },
            )?;
            println!("{}", path.display());
        }
    }
    Ok(0)
}

fn cache_dir(out: &Path) -> PathBuf {
    out.join("cache")
}

/// Runs at `n_opt` samples, then re-evaluates the best solution at `n`.
fn run_bench(cfg: &RunConfig, front: &ReferenceFront, algo: Algorithm, runs: usize, timing: bool) -> Result<BenchOutcome> {
    let problem = pipeline::srl_problem(cfg, cfg.n_opt, front.clone())?;
    let mut outcome = bench::repeat_runs(&problem, algo, &cfg.solver, runs, cfg.seed, timing, &cfg.hash())?;
    if outcome.report.best_solution.is_some() {
        let fine = pipeline::srl_problem(cfg, cfg.n, front.clone())?;
        bench::reevaluate(&mut outcome.report, &fine, cfg.n);
    }
    Ok(outcome)
}

fn best_profile(cfg: &RunConfig, front: &ReferenceFront, report: &BenchReport) -> Result<Option<ObjectiveProfile>> {
    let Some(x) = &report.best_solution else { return Ok(None) };
    let x = DecisionVector::from_slice(x)?;
    Ok(Some(pipeline::evaluator(cfg, cfg.n)?.profile(&x, &front.pf)?))
}

#[derive(Serialize)]
struct OptimizeReport<'a> {
    config_hash: &'a str,
    seed: u64,
    run: &'a RunRecord,
    table: &'a BenchReport,
    /// The best design evaluated with `n` samples.
    best_profile: Option<ProfileFile>,
}

#[derive(Serialize)]
struct BenchFile<'a> {
    config_hash: &'a str,
    report: &'a BenchReport,
    runs: &'a [RunRecord],
}

#[derive(Serialize)]
struct FrontFile<'a> {
    config_hash: &'a str,
    seed: u64,
    objective_names: &'a [&'a str],
    front: &'a ReferenceFront,
}
