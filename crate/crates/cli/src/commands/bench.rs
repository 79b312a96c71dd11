use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use bregdc_core::image_io::load_image;
use bregdc_core::linalg::Identity;
use bregdc_core::metrics::psnr;
use bregdc_core::rician::simulate_rician;
use bregdc_core::{solve, Point};

use super::{rician_setup, Outcome};
use crate::config::{RunConfig, Task};
use crate::error::{CliError, CliResult};

const MODES: [&str; 2] = ["zero", "fista"];
pub const THREADS_ENV: &str = "BREGDC_THREADS";

struct Case {
    name: String,
    truth: Point,
    degraded: Point,
}

struct Row {
    image: String,
    mode: &'static str,
    iterations: usize,
    psnr: f64,
    seconds: f64,
}

fn list_images(dir: &Path) -> CliResult<Vec<PathBuf>> {
    let entries = std::fs::read_dir(dir).map_err(|e| CliError::file(dir, e))?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| matches!(p.extension().and_then(|e| e.to_str()), Some("pgm" | "bdcf")))
        .collect();
    paths.sort();
    Ok(paths)
}

fn thread_count(jobs: usize) -> CliResult<usize> {
    let cap = match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => n,
            _ => return Err(CliError::Config(format!("{THREADS_ENV} must be a positive integer, got `{v}`"))),
        },
        Err(_) => std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
    };
    Ok(cap.min(jobs).max(1))
}

fn run_case(cfg: &RunConfig, case: &Case, mode: &'static str) -> CliResult<Row> {
    let mut cfg = cfg.clone();
    cfg.beta = mode.to_string();
    let start = Instant::now();
    let (problem, scfg) = rician_setup(&cfg, &case.degraded)?;
    let r = solve(&problem, &scfg, &case.degraded)?;
    let seconds = start.elapsed().as_secs_f64();
    if !r.converged {
        log::warn!("{} ({mode}): stopped at max_iter = {}", case.name, cfg.max_iter);
    }
    Ok(Row {
        image: case.name.clone(),
        mode,
        iterations: r.iterations,
        psnr: psnr(&r.x_final, &case.truth, cfg.peak())?,
        seconds,
    })
}

/// Rician benchmark over every `.pgm`/`.bdcf` image in `input`, with and
/// without inertia. Image `i` in sorted order is degraded with seed `seed + i`.
pub fn cmd_bench(cfg: &RunConfig) -> CliResult<Outcome> {
    if cfg.task != Task::Rician {
        return Err(CliError::Config("bench supports the rician task only".into()));
    }
    let dir = cfg.require(&cfg.input, "input")?;
    let output = cfg.require(&cfg.output, "output")?;
    let sigma = cfg.require_sigma()?;

    let mut cases = Vec::new();
    for (i, path) in list_images(dir)?.into_iter().enumerate() {
        let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        match load_image(&path) {
            Ok(truth) => {
                let degraded = simulate_rician(&truth, &Identity, sigma, cfg.seed.wrapping_add(i as u64))?;
                cases.push(Case { name, truth, degraded });
            }
            Err(e) => log::warn!("skipping {name}: {e}"),
        }
    }
    if cases.is_empty() {
        return Err(CliError::Failed(format!("no readable images in {}", dir.display())));
    }

    let jobs: Vec<(usize, &'static str)> = (0..cases.len()).flat_map(|i| MODES.map(|m| (i, m))).collect();
    let next = AtomicUsize::new(0);
    let rows: Mutex<Vec<Row>> = Mutex::new(Vec::new());
    let first_error: Mutex<Option<CliError>> = Mutex::new(None);
    std::thread::scope(|s| -> CliResult<()> {
        for _ in 0..thread_count(jobs.len())? {
            s.spawn(|| {
                while let Some(&(i, mode)) = jobs.get(next.fetch_add(1, Ordering::Relaxed)) {
                    match run_case(cfg, &cases[i], mode) {
                        Ok(row) => rows.lock().unwrap().push(row),
                        Err(e) => {
                            log::warn!("{} ({mode}) failed: {e}", cases[i].name);
                            first_error.lock().unwrap().get_or_insert(e);
                        }
                    }
                }
            });
        }
        Ok(())
    })?;

    let mut rows = rows.into_inner().unwrap();
    if rows.is_empty() {
        return Err(first_error.into_inner().unwrap().unwrap_or(CliError::Failed("every solve failed".into())));
    }
    rows.sort_by(|a, b| (&a.image, a.mode).cmp(&(&b.image, b.mode)));

    let mut csv = String::from("image,beta_mode,iterations,psnr,seconds\n");
    for r in &rows {
        writeln!(csv, "{},{},{},{:.4},{:.3}", r.image, r.mode, r.iterations, r.psnr, r.seconds).unwrap();
    }
    std::fs::write(output, csv).map_err(|e| CliError::file(output, e))?;

    let mut agg = String::from("beta_mode,images,mean_iterations,mean_psnr,mean_seconds\n");
    for mode in MODES {
        let sel: Vec<&Row> = rows.iter().filter(|r| r.mode == mode).collect();
        if sel.is_empty() {
            continue;
        }
        let n = sel.len() as f64;
        let mean = |f: fn(&Row) -> f64| sel.iter().map(|r| f(r)).sum::<f64>() / n;
        let line = format!(
            "{mode},{},{:.2},{:.4},{:.3}",
            sel.len(),
            mean(|r| r.iterations as f64),
            mean(|r| r.psnr),
            mean(|r| r.seconds)
        );
        println!("{line}");
        agg.push_str(&line);
        agg.push('\n');
    }
    let agg_path = output.with_extension("aggregate.csv");
    std::fs::write(&agg_path, agg).map_err(|e| CliError::file(&agg_path, e))?;
    Ok(Outcome::Done)
}
