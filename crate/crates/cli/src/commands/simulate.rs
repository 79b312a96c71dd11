use bregdc_core::image_io::{load_image, save_image, ImageFormat};
use bregdc_core::linalg::Identity;
use bregdc_core::phase::{intensities, simulate_pr, snr_db, CdpOperator, PrNoise};
use bregdc_core::rician::simulate_rician;
use serde_json::json;

use super::{save_measurement, write_json, Outcome};
use crate::config::{RunConfig, Task};
use crate::error::{CliError, CliResult};

/// Writes the degraded data and a `.json` sidecar next to `output`.
pub fn cmd_simulate(cfg: &RunConfig) -> CliResult<Outcome> {
    let input = cfg.require(&cfg.input, "input")?;
    let output = cfg.require(&cfg.output, "output")?;
    let x = load_image(input)?;
    let shape = x.shape().expect("loaded images carry a shape");
    let mut sidecar = json!({
        "command": "simulate",
        "task": cfg.task,
        "seed": cfg.seed,
        "input": input,
        "output": output,
        "height": shape.height,
        "width": shape.width,
    });

    match cfg.task {
        Task::Rician => {
            let sigma = cfg.require_sigma()?;
            let b = simulate_rician(&x, &Identity, sigma, cfg.seed)?;
            save_image(output, &b, ImageFormat::from_path(output))?;
            let snr = snr_db(x.values(), b.values());
            sidecar["sigma"] = json!(sigma);
            sidecar["realized_snr"] = json!(snr.is_finite().then_some(snr));
        }
        Task::PhaseRetrieval => {
            let noise = match (cfg.snr_db, cfg.alpha) {
                (Some(_), Some(_)) => {
                    return Err(CliError::Config("set at most one of `snr_db` and `alpha`".into()))
                }
                (Some(s), None) => PrNoise::GaussianSnr(s),
                (None, Some(a)) => PrNoise::Shot(a),
                (None, None) => PrNoise::None,
            };
            if ImageFormat::from_path(output) != ImageFormat::Float32 {
                log::warn!("{}: measurements are always written as float32", output.display());
            }
            let k = CdpOperator::random(shape, cfg.num_masks, cfg.seed)?;
            let d = simulate_pr(&k, &x, noise, cfg.seed.wrapping_add(1))?;
            let masks = cfg.derived(&cfg.masks, "cdpm")?;
            k.save_masks(&masks)?;
            let stored = save_measurement(output, &k, &d.d)?;
            let snr = snr_db(&intensities(&k, &x)?, &stored);
            sidecar["masks"] = json!(masks);
            sidecar["num_masks"] = json!(cfg.num_masks);
            sidecar["snr_db"] = json!(cfg.snr_db);
            sidecar["alpha"] = json!(cfg.alpha);
            sidecar["realized_snr"] = json!(snr.is_finite().then_some(snr));
        }
    }
    write_json(&output.with_extension("json"), &sidecar)?;
    Ok(Outcome::Done)
}
