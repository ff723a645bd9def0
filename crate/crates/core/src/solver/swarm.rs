//! Firefly searches and the random-search baseline.

use alloc::vec::Vec;

use rand::Rng;

use super::ops::{init_population, pair_distance, pareto_dominates, partition, Subpop};
use super::params::SolverParams;
use super::problem::{Evaluation, Problem};
use crate::error::Result;
use crate::exec::par_map;
use crate::rng::{substream, Purpose};

/// Source of elapsed wall time in milliseconds. The core crate has no clock
/// of its own; [`NoClock`] reports zero.
pub trait Clock {
    fn elapsed_ms(&self) -> f64;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct NoClock;

impl Clock for NoClock {
    fn elapsed_ms(&self) -> f64 {
        0.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    pub x: Vec<f64>,
    pub objectives: Vec<f64>,
    pub phi: f64,
    pub subpop: Option<Subpop>,
    /// Replaced this iteration because another individual dominated it.
    pub dominated: bool,
    pub failed: bool,
}

impl Individual {
    fn evaluated(x: Vec<f64>, e: Evaluation) -> Self {
        Individual {
            x,
            objectives: e.objectives,
            phi: e.phi,
            subpop: None,
            dominated: false,
            failed: e.failed,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    /// Best cost of the initial population.
    pub initial_best_phi: f64,
    /// Running best cost after each iteration.
    pub best_phi: Vec<f64>,
    pub best_x: Vec<Vec<f64>>,
    /// Wall time spent in each iteration.
    pub wall_ms: Vec<f64>,
    pub evaluations: usize,
    pub failed_evaluations: usize,
    pub conv_threshold: f64,
    pub conv_window: usize,
}

impl RunTrace {
    fn new(initial_best_phi: f64, params: &SolverParams) -> Self {
        RunTrace {
            initial_best_phi,
            best_phi: Vec::with_capacity(params.max_iter),
            best_x: Vec::with_capacity(params.max_iter),
            wall_ms: Vec::with_capacity(params.max_iter),
            evaluations: 0,
            failed_evaluations: 0,
            conv_threshold: params.conv_threshold,
            conv_window: params.conv_window,
        }
    }

    pub fn iterations(&self) -> usize {
        self.best_phi.len()
    }

    pub fn conv_iter(&self) -> Option<usize> {
        convergence_iteration(&self.best_phi, self.conv_threshold, self.conv_window)
    }

    pub fn total_ms(&self) -> f64 {
        self.wall_ms.iter().sum()
    }
}

/// First iteration (1-based) from which the cost stays below `threshold` for
/// `window` consecutive iterations.
pub fn convergence_iteration(best_phi: &[f64], threshold: f64, window: usize) -> Option<usize> {
    let window = window.max(1);
    (0..best_phi.len())
        .find(|&t| t + window <= best_phi.len() && best_phi[t..t + window].iter().all(|&v| v < threshold))
        .map(|t| t + 1)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub best: Individual,
    pub trace: RunTrace,
}

/// Population state of a firefly search.
pub struct Swarm<'a, P: Problem + ?Sized> {
    problem: &'a P,
    params: SolverParams,
    seed: u64,
    pub members: Vec<Individual>,
    /// Best individual ever evaluated.
    pub best: Individual,
    /// Positions vacated by replacement in the current iteration.
    pub centers: Vec<Vec<f64>>,
    /// Completed iterations.
    pub iteration: usize,
    pub evaluations: usize,
    pub failed_evaluations: usize,
}

impl<'a, P: Problem + ?Sized> Swarm<'a, P> {
    pub fn new(problem: &'a P, params: &SolverParams, seed: u64) -> Result<Self> {
        params.validate()?;
        let positions = init_population(params.init, params.pop, problem.bounds(), seed);
        let evals = par_map(&positions, |x| problem.evaluate(x));
        let members: Vec<Individual> = positions
            .into_iter()
            .zip(evals)
            .map(|(x, e)| Individual::evaluated(x, e))
            .collect();
        let best = members[argmin(&members)].clone();
        let failed = members.iter().filter(|m| m.failed).count();
        Ok(Swarm {
            problem,
            params: params.clone(),
            seed,
            evaluations: members.len(),
            failed_evaluations: failed,
            members,
            best,
            centers: Vec::new(),
            iteration: 0,
        })
    }

    pub fn params(&self) -> &SolverParams {
        &self.params
    }

    /// Moves every dominated individual next to its best dominator. The
    /// replacement inherits the dominator's objectives until it is evaluated
    /// again; the vacated positions become repulsion centers.
    pub fn replace_dominated(&mut self) {
        let t = self.iteration as u64 + 1;
        let n = self.members.len();
        let bounds = self.problem.bounds();
        let mut replacements = Vec::new();
        for i in 0..n {
            let mut dominator: Option<usize> = None;
            for j in 0..n {
                if j == i || !pareto_dominates(&self.members[j].objectives, &self.members[i].objectives).unwrap_or(false) {
                    continue;
                }
                if dominator.map_or(true, |d| self.members[j].phi < self.members[d].phi) {
                    dominator = Some(j);
                }
            }
            if let Some(d) = dominator {
                replacements.push((i, d));
            }
        }
        self.centers.clear();
        let snapshot: Vec<Individual> = replacements.iter().map(|&(_, d)| self.members[d].clone()).collect();
        for (&(i, _), dom) in replacements.iter().zip(snapshot) {
            let mut rng = substream(self.seed, Purpose::Replace, t, i as u64);
            let mut x = dom.x.clone();
            for (k, v) in x.iter_mut().enumerate() {
                *v += self.params.k_replace * bounds.width(k) * (rng.gen::<f64>() - 0.5);
            }
            bounds.project(&mut x);
            let old = core::mem::replace(&mut self.members[i], Individual { x, dominated: true, ..dom });
            self.centers.push(old.x);
        }
    }

    /// Candidate position of member `i` under its group's update law.
    fn propose(&self, i: usize, groups: &[Subpop], brightest: &[Option<usize>; 3], alpha: f64) -> Vec<f64> {
        let p = &self.params;
        let bounds = self.problem.bounds();
        let me = &self.members[i];
        let group = groups[i];
        let gi = group_index(group);
        let attractor: Option<&[f64]> = match brightest[gi] {
            Some(j) if j != i => Some(&self.members[j].x),
            _ if self.best.phi < me.phi => Some(&self.best.x),
            _ => None,
        };
        let center = if self.centers.is_empty() || group == Subpop::High {
            None
        } else {
            self.centers
                .iter()
                .map(|c| (pair_distance(&me.x, c), c))
                .min_by(|a, b| a.0.total_cmp(&b.0))
        };
        let mut rng = substream(self.seed, Purpose::Perturb, self.iteration as u64 + 1, i as u64);
        let mut x = me.x.clone();
        let pull = attractor.map(|a| (p.attraction(pair_distance(&me.x, a)), a));
        let push = center.map(|(r, c)| (p.repulsion(r), c));
        for (d, v) in x.iter_mut().enumerate() {
            let here = me.x[d];
            let attract = pull.map_or(0.0, |(s, a)| s * (a[d] - here));
            let repel = push.map_or(0.0, |(s, c)| s * (c[d] - here));
            let step = match (group, push.is_some()) {
                (Subpop::Low, true) => -repel,
                (Subpop::Low, false) => 0.0,
                (Subpop::Medium, _) => attract - repel,
                (Subpop::High, _) => attract,
            };
            *v = here + step + alpha * (rng.gen::<f64>() - 0.5) * bounds.width(d);
        }
        bounds.project(&mut x);
        x
    }

    /// One iteration: replacement, partition, synchronous moves and
    /// re-evaluation.
    pub fn step(&mut self) {
        if self.params.replacement {
            self.replace_dominated();
        } else {
            self.centers.clear();
        }
        let groups = if self.params.subpopulations {
            let phi: Vec<f64> = self.members.iter().map(|m| m.phi).collect();
            partition(&phi, self.best.phi)
        } else {
            alloc::vec![Subpop::High; self.members.len()]
        };
        let mut brightest: [Option<usize>; 3] = [None; 3];
        for (i, m) in self.members.iter().enumerate() {
            let slot = &mut brightest[group_index(groups[i])];
            if slot.map_or(true, |j| m.phi < self.members[j].phi) {
                *slot = Some(i);
            }
        }
        let alpha = self.params.alpha_at(self.iteration + 1);
        let indices: Vec<usize> = (0..self.members.len()).collect();
        let positions = par_map(&indices, |&i| self.propose(i, &groups, &brightest, alpha));
        let problem = self.problem;
        let evals = par_map(&positions, |x| problem.evaluate(x));
        for (i, (x, e)) in positions.into_iter().zip(evals).enumerate() {
            let dominated = self.members[i].dominated;
            self.members[i] = Individual {
                subpop: Some(groups[i]),
                dominated,
                ..Individual::evaluated(x, e)
            };
        }
        self.evaluations += self.members.len();
        self.failed_evaluations += self.members.iter().filter(|m| m.failed).count();
        let j = argmin(&self.members);
        if self.members[j].phi < self.best.phi {
            self.best = self.members[j].clone();
        }
        for m in &mut self.members {
            m.dominated = false;
        }
        self.iteration += 1;
    }
}

fn group_index(g: Subpop) -> usize {
    match g {
        Subpop::High => 0,
        Subpop::Medium => 1,
        Subpop::Low => 2,
    }
}

fn argmin(members: &[Individual]) -> usize {
    let mut best = 0;
    for (i, m) in members.iter().enumerate() {
        if m.phi < members[best].phi {
            best = i;
        }
    }
    best
}

/// Runs the multi-subpopulation correction firefly search as configured by
/// `params`.
pub fn run<P: Problem + ?Sized>(problem: &P, params: &SolverParams, seed: u64) -> Result<RunResult> {
    run_with_clock(problem, params, seed, &NoClock)
}

pub fn run_with_clock<P: Problem + ?Sized>(
    problem: &P,
    params: &SolverParams,
    seed: u64,
    clock: &dyn Clock,
) -> Result<RunResult> {
    let mut last = clock.elapsed_ms();
    let mut swarm = Swarm::new(problem, params, seed)?;
    let mut trace = RunTrace::new(swarm.best.phi, params);
    for _ in 0..params.max_iter {
        swarm.step();
        let now = clock.elapsed_ms();
        trace.best_phi.push(swarm.best.phi);
        trace.best_x.push(swarm.best.x.clone());
        trace.wall_ms.push(now - last);
        last = now;
    }
    trace.evaluations = swarm.evaluations;
    trace.failed_evaluations = swarm.failed_evaluations;
    Ok(RunResult {
        best: swarm.best,
        trace,
    })
}

/// Plain firefly search: every individual is attracted by the brightest one,
/// without replacement, repulsion or subpopulations.
pub fn run_baseline_fa<P: Problem + ?Sized>(problem: &P, params: &SolverParams, seed: u64) -> Result<RunResult> {
    run(problem, &params.plain_firefly(), seed)
}

pub fn run_baseline_fa_with_clock<P: Problem + ?Sized>(
    problem: &P,
    params: &SolverParams,
    seed: u64,
    clock: &dyn Clock,
) -> Result<RunResult> {
    run_with_clock(problem, &params.plain_firefly(), seed, clock)
}

/// Uniform random search with `budget` evaluations, recorded in batches of
/// `params.pop` so the trace lines up with the firefly searches: the first
/// batch plays the initial population and every further batch one iteration.
pub fn run_random_search<P: Problem + ?Sized>(
    problem: &P,
    params: &SolverParams,
    budget: usize,
    seed: u64,
) -> Result<RunResult> {
    run_random_search_with_clock(problem, params, budget, seed, &NoClock)
}

pub fn run_random_search_with_clock<P: Problem + ?Sized>(
    problem: &P,
    params: &SolverParams,
    budget: usize,
    seed: u64,
    clock: &dyn Clock,
) -> Result<RunResult> {
    params.validate()?;
    let bounds = problem.bounds();
    let batch_size = params.pop;
    let mut best: Option<Individual> = None;
    let mut trace = RunTrace::new(f64::INFINITY, params);
    let mut last = clock.elapsed_ms();
    let mut done = 0usize;
    let mut batch = 0u64;
    while done < budget.max(1) {
        let count = batch_size.min(budget.max(1) - done);
        let positions: Vec<Vec<f64>> = (0..count)
            .map(|i| {
                let mut rng = substream(seed, Purpose::RandomSearch, batch, i as u64);
                (0..bounds.dim())
                    .map(|d| bounds.lower[d] + bounds.width(d) * rng.gen::<f64>())
                    .collect()
            })
            .collect();
        let evals = par_map(&positions, |x| problem.evaluate(x));
        for (x, e) in positions.into_iter().zip(evals) {
            trace.failed_evaluations += usize::from(e.failed);
            if best.as_ref().map_or(true, |b| e.phi < b.phi) {
                best = Some(Individual::evaluated(x, e));
            }
        }
        done += count;
        let b = best.as_ref().expect("at least one evaluation");
        if batch == 0 {
            trace.initial_best_phi = b.phi;
        } else {
            let now = clock.elapsed_ms();
            trace.best_phi.push(b.phi);
            trace.best_x.push(b.x.clone());
            trace.wall_ms.push(now - last);
            last = now;
        }
        batch += 1;
    }
    trace.evaluations = done;
    Ok(RunResult {
        best: best.expect("at least one evaluation"),
        trace,
    })
}
