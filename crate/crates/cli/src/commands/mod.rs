mod bench;
mod metrics;
mod simulate;
mod solve;

use std::path::Path;
use std::sync::Arc;

use bregdc_core::image_io::{load_image, save_image, ImageFormat};
use bregdc_core::phase::{build_pr_problem, pr_smad_bound, CdpOperator, PrMeasurement, PrPrior};
use bregdc_core::priors::{load_linear_smoother, Denoiser, LinearSmoother, Stencil};
use bregdc_core::rician::{build_rician_problem, rician_schedule_with, RicianModel, RicianPrior};
use bregdc_core::{DcProblem, Point, Shape, SolverConfig};

use crate::config::{PriorKind, RunConfig};
use crate::error::{CliError, CliResult};

pub use bench::cmd_bench;
pub use metrics::cmd_metrics;
pub use simulate::cmd_simulate;
pub use solve::cmd_solve;

/// Weight of the identity in the built-in smoother `N = (1 − w)I + w·binomial`.
const BUILTIN_SMOOTHER_WEIGHT: f64 = 0.8;
/// Fraction of the largest admissible step used when `lambda` is unset.
const STEP_SHRINK: f64 = 0.9;

pub enum Outcome {
    Done,
    NotConverged,
}

impl Outcome {
    pub fn exit_code(&self) -> u8 {
        match self {
            Outcome::Done => 0,
            Outcome::NotConverged => 2,
        }
    }
}

fn write_json(path: &Path, value: &serde_json::Value) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).expect("JSON values always serialize");
    text.push('\n');
    std::fs::write(path, text).map_err(|e| CliError::file(path, e))
}

fn denoiser(cfg: &RunConfig) -> CliResult<Arc<Denoiser>> {
    let d = match &cfg.stencil {
        Some(path) => load_linear_smoother(path)?,
        None => LinearSmoother::new(Stencil::damped_binomial(BUILTIN_SMOOTHER_WEIGHT)).into_denoiser(0.0)?,
    };
    Ok(Arc::new(d))
}

fn solver_config(cfg: &RunConfig, lambda: f64) -> CliResult<SolverConfig> {
    let mut s = SolverConfig::new(lambda)
        .with_beta(cfg.beta_schedule()?)
        .with_tol(cfg.tol)
        .with_max_iter(cfg.max_iter);
    s.delta = cfg.delta;
    s.epsilon = cfg.epsilon;
    Ok(s)
}

/// Rician problem for measurement `b`, with λ from the σ schedule unless overridden.
fn rician_setup(cfg: &RunConfig, b: &Point) -> CliResult<(DcProblem, SolverConfig)> {
    let sigma = cfg.require_sigma()?;
    let mut schedule = rician_schedule_with(sigma, cfg.delta, cfg.epsilon)?;
    if let Some(l) = cfg.lambda {
        schedule.lambda = l;
    }
    let prior = match cfg.prior_kind() {
        PriorKind::None => RicianPrior::None,
        PriorKind::L1 => RicianPrior::L1(cfg.mu),
        PriorKind::Smoother => RicianPrior::Denoiser(denoiser(cfg)?),
    };
    let model = RicianModel::denoising(sigma, b.clone())?;
    let problem = build_rician_problem(&model, prior, &schedule)?;
    Ok((problem, solver_config(cfg, schedule.lambda)?))
}

/// Phase retrieval problem. Without an explicit `lambda` the step is
/// `0.9 min{1/L, (1 − c)/δ}`, where `c λ` is the denoiser's η.
fn pr_setup(cfg: &RunConfig, k: &CdpOperator, d: &PrMeasurement) -> CliResult<(DcProblem, SolverConfig)> {
    let (prior, c) = match cfg.prior_kind() {
        PriorKind::None => (PrPrior::None, 0.0),
        PriorKind::Smoother => {
            let den = denoiser(cfg)?;
            let c = den.weak_convexity_modulus(1.0);
            (PrPrior::Denoiser(den), c)
        }
        PriorKind::L1 => {
            return Err(CliError::Config(
                "the l1 prior is only available for the rician task".into(),
            ))
        }
    };
    let lambda = match cfg.lambda {
        Some(l) => l,
        None => STEP_SHRINK * (1.0 / pr_smad_bound(k)?).min((1.0 - c) / cfg.delta),
    };
    let problem = build_pr_problem(k, d, prior, lambda, cfg.delta, cfg.epsilon)?;
    Ok((problem, solver_config(cfg, lambda)?))
}

/// Measurements are stored as a float32 image of `m` stacked `H×W` blocks.
fn save_measurement(path: &Path, k: &CdpOperator, d: &[f64]) -> CliResult<Vec<f64>> {
    let shape = k.shape();
    let img = Point::image(Shape::new(k.num_masks() * shape.height, shape.width), d.to_vec())?;
    save_image(path, &img, ImageFormat::Float32)?;
    Ok(d.iter().map(|&v| v as f32 as f64).collect())
}

fn load_measurement(path: &Path, k: &CdpOperator) -> CliResult<PrMeasurement> {
    let img = load_image(path)?;
    let shape = k.shape();
    let want = Shape::new(k.num_masks() * shape.height, shape.width);
    if img.shape() != Some(want) {
        return Err(CliError::Config(format!(
            "{}: measurement shape {} does not match {} masks of {}",
            path.display(),
            img.shape().map(|s| s.to_string()).unwrap_or_default(),
            k.num_masks(),
            shape
        )));
    }
    Ok(PrMeasurement::new(k, img.into_values())?)
}
