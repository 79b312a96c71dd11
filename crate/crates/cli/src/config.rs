use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Rician,
    PhaseRetrieval,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PriorKind {
    None,
    L1,
    /// Linear smoother denoiser; `stencil` selects a file, otherwise the built-in one.
    Smoother,
}

/// Settings shared by every subcommand. Unset paths fall back to names
/// derived from `output`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub task: Task,
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub ground_truth: Option<PathBuf>,
    pub masks: Option<PathBuf>,
    pub trace: Option<PathBuf>,
    pub summary: Option<PathBuf>,
    pub sigma: Option<f64>,
    pub snr_db: Option<f64>,
    pub alpha: Option<f64>,
    pub num_masks: usize,
    pub lambda: Option<f64>,
    pub delta: f64,
    pub epsilon: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub beta: String,
    /// Defaults to `l1` for the rician task and `none` for phase retrieval.
    pub prior: Option<PriorKind>,
    pub mu: f64,
    pub stencil: Option<PathBuf>,
    pub peak: Option<f64>,
    pub spectral_iters: usize,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            task: Task::Rician,
            input: None,
            output: None,
            ground_truth: None,
            masks: None,
            trace: None,
            summary: None,
            sigma: None,
            snr_db: None,
            alpha: None,
            num_masks: 4,
            lambda: None,
            delta: bregdc_core::solver::DEFAULT_DELTA,
            epsilon: bregdc_core::solver::DEFAULT_EPSILON,
            tol: bregdc_core::solver::DEFAULT_TOL,
            max_iter: 20_000,
            beta: "fista".into(),
            prior: None,
            mu: 0.02,
            stencil: None,
            peak: None,
            spectral_iters: 100,
            seed: 0,
        }
    }
}

impl RunConfig {
    /// Reads `file` if given, then applies `key=value` overrides and the seed.
    /// Override values are parsed as JSON and fall back to plain strings.
    pub fn load(file: Option<&Path>, overrides: &[String], seed: Option<u64>) -> CliResult<Self> {
        let mut map = match file {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| CliError::file(p, e))?;
                match serde_json::from_str::<Value>(&text) {
                    Ok(Value::Object(m)) => m,
                    Ok(_) => return Err(CliError::Config(format!("{}: top level must be an object", p.display()))),
                    Err(e) => {
                        return Err(CliError::Config(format!(
                            "{} line {}: {e}",
                            p.display(),
                            e.line()
                        )))
                    }
                }
            }
            None => Map::new(),
        };
        for kv in overrides {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("--set expects key=value, got `{kv}`")))?;
            let value = serde_json::from_str(v).unwrap_or_else(|_| Value::String(v.to_string()));
            map.insert(k.trim().to_string(), value);
        }
        if let Some(s) = seed {
            map.insert("seed".into(), Value::from(s));
        }
        serde_json::from_value(Value::Object(map)).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn beta_schedule(&self) -> CliResult<bregdc_core::BetaSchedule> {
        self.beta.parse().map_err(|e: bregdc_core::Error| CliError::Config(e.to_string()))
    }

    pub fn require<'a>(&self, value: &'a Option<PathBuf>, key: &str) -> CliResult<&'a Path> {
        value
            .as_deref()
            .ok_or_else(|| CliError::Config(format!("`{key}` is required for this command")))
    }

    pub fn require_sigma(&self) -> CliResult<f64> {
        self.sigma
            .ok_or_else(|| CliError::Config("`sigma` is required for the rician task".into()))
    }

    pub fn prior_kind(&self) -> PriorKind {
        self.prior.unwrap_or(match self.task {
            Task::Rician => PriorKind::L1,
            Task::PhaseRetrieval => PriorKind::None,
        })
    }

    /// Peak intensity for PSNR and SSIM.
    pub fn peak(&self) -> f64 {
        self.peak.unwrap_or(match self.task {
            Task::Rician => 255.0,
            Task::PhaseRetrieval => 1.0,
        })
    }

    /// `explicit` if set, otherwise `output` with `suffix` replacing its extension.
    pub fn derived(&self, explicit: &Option<PathBuf>, suffix: &str) -> CliResult<PathBuf> {
        if let Some(p) = explicit {
            return Ok(p.clone());
        }
        let out = self.require(&self.output, "output")?;
        Ok(out.with_extension(suffix))
    }
}
