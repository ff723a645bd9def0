//! Run configuration: a versioned JSON document with defaults for every field.
//!
//! Precedence, lowest to highest: built-in defaults, the config file, the
//! `LIMBSYNTH_OUTPUT_DIR` environment variable (output directory only), then
//! command-line flags.

use std::path::{Path, PathBuf};

use limbsynth_core::kinematics::BodyParams;
use limbsynth_core::objectives::{SamplingParams, OBJECTIVES};
use limbsynth_core::solver::SolverParams;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

pub const SCHEMA_VERSION: u32 = 1;
pub const OUTPUT_DIR_ENV: &str = "LIMBSYNTH_OUTPUT_DIR";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub seed: u64,
    /// Workspace samples for evaluation and reporting.
    pub n: usize,
    /// Workspace samples per candidate during optimization.
    pub n_opt: usize,
    /// Samples of the human-arm and cane reference workspaces.
    pub n_reference: usize,
    pub mvee_tol: f64,
    pub mvee_max_iter: usize,
    /// Candidates drawn to estimate the reference front.
    pub front_budget: usize,
    /// Skips the estimate when given.
    pub reference_front: Option<[f64; OBJECTIVES]>,
    pub body: BodyParams,
    pub solver: SolverParams,
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        let sampling = SamplingParams::default();
        RunConfig {
            schema_version: SCHEMA_VERSION,
            seed: 0,
            n: sampling.n,
            n_opt: 2000,
            n_reference: sampling.n_reference,
            mvee_tol: sampling.mvee_tol,
            mvee_max_iter: sampling.mvee_max_iter,
            front_budget: 20_000,
            reference_front: None,
            body: BodyParams::default(),
            solver: SolverParams::default(),
            output_dir: PathBuf::from("out"),
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a config file. A missing or unreadable file is an I/O error; a
    /// file that does not match the schema is a config error.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(CliError::Config(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if self.n == 0 || self.n_opt == 0 || self.n_reference == 0 || self.front_budget == 0 {
            return Err(CliError::Config("sample counts and front_budget must be positive".into()));
        }
        if !(self.mvee_tol > 0.0) || self.mvee_max_iter == 0 {
            return Err(CliError::Config("mvee_tol and mvee_max_iter must be positive".into()));
        }
        if let Some(pf) = &self.reference_front {
            if pf.iter().any(|v| !v.is_finite()) {
                return Err(CliError::Config("reference_front values must be finite".into()));
            }
        }
        self.body.validate()?;
        self.solver.validate()?;
        Ok(())
    }

    pub fn sampling(&self, n: usize) -> SamplingParams {
        SamplingParams {
            n,
            n_reference: self.n_reference,
            seed: self.seed,
            mvee_tol: self.mvee_tol,
            mvee_max_iter: self.mvee_max_iter,
        }
    }

    /// Content hash of everything that can change results, except the seed,
    /// which outputs report on its own. The output directory is left out.
    pub fn hash(&self) -> String {
        let mut value = serde_json::to_value(self).expect("config serializes");
        if let Some(map) = value.as_object_mut() {
            map.remove("output_dir");
            map.remove("seed");
        }
        digest(&value)
    }

    /// Hash of the inputs of the reference-front estimate.
    pub fn front_key(&self) -> String {
        let value = serde_json::json!({
            "schema_version": self.schema_version,
            "seed": self.seed,
            "n_opt": self.n_opt,
            "n_reference": self.n_reference,
            "mvee_tol": self.mvee_tol,
            "mvee_max_iter": self.mvee_max_iter,
            "front_budget": self.front_budget,
            "body": self.body,
        });
        digest(&value)
    }
}

/// First 16 hex digits of the SHA-256 of the canonical (key-sorted) JSON.
fn digest(value: &serde_json::Value) -> String {
    let bytes = serde_json::to_vec(value).expect("json value serializes");
    hex::encode(&Sha256::digest(&bytes)[..8])
}
