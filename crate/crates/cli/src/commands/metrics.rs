use bregdc_core::image_io::load_image;
use bregdc_core::metrics::{psnr, ssim};
use serde_json::json;

use super::{write_json, Outcome};
use crate::config::RunConfig;
use crate::error::CliResult;

/// Compares `input` with `ground_truth`. Prints the result and writes it to `output` when set.
pub fn cmd_metrics(cfg: &RunConfig) -> CliResult<Outcome> {
    let x = load_image(cfg.require(&cfg.input, "input")?)?;
    let truth = load_image(cfg.require(&cfg.ground_truth, "ground_truth")?)?;
    let peak = cfg.peak();
    let value = json!({
        "psnr_db": psnr(&x, &truth, peak)?,
        "ssim": ssim(&x, &truth, peak)?,
        "peak": peak,
    });
    if let Some(out) = &cfg.output {
        write_json(out, &value)?;
    }
    println!("{value}");
    Ok(Outcome::Done)
}
