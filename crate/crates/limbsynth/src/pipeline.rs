//! Builds evaluators, the reference front and the limb problem from a config.

use std::path::{Path, PathBuf};

use limbsynth_core::objectives::{estimate_reference_front, Evaluator, ReferenceFront, SrlProblem};
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::Result;
use crate::io;

pub fn evaluator(cfg: &RunConfig, n: usize) -> Result<Evaluator> {
    Ok(Evaluator::new(cfg.body.clone(), cfg.sampling(n))?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct FrontCache {
    key: String,
    front: ReferenceFront,
}

pub fn front_cache_path(cfg: &RunConfig, cache_dir: &Path) -> PathBuf {
    cache_dir.join(format!("front-{}.json", cfg.front_key()))
}

/// The configured front, or the estimate at `n_opt` samples. Estimates are
/// cached under `cache_dir`; an unreadable or stale cache file is recomputed
/// and replaced.
pub fn reference_front(cfg: &RunConfig, cache_dir: Option<&Path>) -> Result<ReferenceFront> {
    if let Some(pf) = cfg.reference_front {
        return Ok(ReferenceFront::user_supplied(pf)?);
    }
    let key = cfg.front_key();
    let path = cache_dir.map(|d| front_cache_path(cfg, d));
    if let Some(path) = &path {
        if let Ok(cache) = io::read_json::<FrontCache>(path) {
            if cache.key == key && cache.front.budget == cfg.front_budget && cache.front.seed == cfg.seed {
                return Ok(cache.front);
            }
        }
    }
    let front = estimate_reference_front(&evaluator(cfg, cfg.n_opt)?, cfg.front_budget, cfg.seed)?;
    if let Some(path) = &path {
        let cache = FrontCache {
            key,
            front: front.clone(),
        };
        io::write_atomic(path, &io::to_json_bytes(&cache))?;
    }
    Ok(front)
}

/// The limb-sizing problem evaluated with `n` workspace samples per candidate.
pub fn srl_problem(cfg: &RunConfig, n: usize, front: ReferenceFront) -> Result<SrlProblem> {
    Ok(SrlProblem::new(evaluator(cfg, n)?, front))
}
