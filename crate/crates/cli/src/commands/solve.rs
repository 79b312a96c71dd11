use std::time::Instant;

use bregdc_core::image_io::{load_image, save_image, ImageFormat};
use bregdc_core::metrics::{psnr, ssim};
use bregdc_core::phase::{align_global_sign, pr_relative_residual, spectral_init, CdpOperator};
use bregdc_core::solver::write_trace_csv;
use bregdc_core::{solve, Point};
use serde::Serialize;

use super::{load_measurement, pr_setup, rician_setup, write_json, Outcome};
use crate::config::{RunConfig, Task};
use crate::error::CliResult;

/// Every key is written on every run; metrics without a ground truth are null.
#[derive(Debug, Serialize)]
pub struct RunSummary {
    pub task: Task,
    pub psnr_db: Option<f64>,
    pub ssim: Option<f64>,
    pub iterations: usize,
    pub wall_seconds: f64,
    pub converged: bool,
    /// `‖|Kx|² − d‖ / ‖d‖` for phase retrieval.
    pub relative_residual: Option<f64>,
    pub lambda: f64,
    pub config: RunConfig,
}

pub fn cmd_solve(cfg: &RunConfig) -> CliResult<Outcome> {
    let input = cfg.require(&cfg.input, "input")?;
    let output = cfg.require(&cfg.output, "output")?;
    let start = Instant::now();

    let (result, lambda, residual) = match cfg.task {
        Task::Rician => {
            let b = load_image(input)?;
            let (problem, scfg) = rician_setup(cfg, &b)?;
            (solve(&problem, &scfg, &b)?, scfg.lambda, None)
        }
        Task::PhaseRetrieval => {
            let masks = match &cfg.masks {
                Some(p) => p.clone(),
                None => input.with_extension("cdpm"),
            };
            let k = CdpOperator::load_masks(&masks)?;
            let d = load_measurement(input, &k)?;
            let (problem, scfg) = pr_setup(cfg, &k, &d)?;
            let x0 = spectral_init(&k, &d, cfg.spectral_iters, cfg.seed)?;
            let r = solve(&problem, &scfg, &x0)?;
            let res = pr_relative_residual(&k, &d, &r.x_final)?;
            (r, scfg.lambda, Some(res))
        }
    };
    let wall_seconds = start.elapsed().as_secs_f64();

    let (psnr_db, ssim_value) = match &cfg.ground_truth {
        Some(path) => {
            let truth = load_image(path)?;
            let x: Point = match cfg.task {
                Task::Rician => result.x_final.clone(),
                Task::PhaseRetrieval => align_global_sign(&result.x_final, &truth)?,
            };
            (Some(psnr(&x, &truth, cfg.peak())?), Some(ssim(&x, &truth, cfg.peak())?))
        }
        None => (None, None),
    };

    save_image(output, &result.x_final, ImageFormat::from_path(output))?;
    write_trace_csv(&cfg.derived(&cfg.trace, "trace.csv")?, &result.trace)?;
    let summary = RunSummary {
        task: cfg.task,
        psnr_db,
        ssim: ssim_value,
        iterations: result.iterations,
        wall_seconds,
        converged: result.converged,
        relative_residual: residual,
        lambda,
        config: cfg.clone(),
    };
    let value = serde_json::to_value(&summary).expect("summary always serializes");
    write_json(&cfg.derived(&cfg.summary, "summary.json")?, &value)?;
    println!("{}", serde_json::to_string(&value).expect("summary always serializes"));

    if result.converged {
        log::info!("converged after {} iterations", result.iterations);
        Ok(Outcome::Done)
    } else {
        log::warn!("stopped at max_iter = {} without meeting tol = {}", cfg.max_iter, cfg.tol);
        Ok(Outcome::NotConverged)
    }
}
