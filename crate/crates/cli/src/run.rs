//! Mode orchestration: batch dehazing, haze synthesis and evaluation.
//!
//! Images are processed in parallel; per-image outputs are independent of
//! scheduling, and messages are printed in input order afterwards.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use tvdehaze::dehaze::{
    atmospheric_light, dehaze_image, to_log_domain, DehazeResult, SolverConfig, LOG_CLAMP_DELTA,
};
use tvdehaze::synth::{make_depth, mse, synthesize_haze};
use tvdehaze::ImagePlane;

use crate::error::CliError;
use crate::imageio::{load_channels, save_channels, save_unit_map};
use crate::manifest::{Mode, RunManifest};
use crate::patterns;
use crate::report::{
    write_energy_csv, write_field_sidecar, write_metrics_csv, write_summary, MetricsRow,
};

/// Size and count of the generated pattern suite (synthesize mode with no
/// inputs).
const GENERATED_PATTERNS: usize = 10;
const GENERATED_SIZE: usize = 48;

pub fn run(manifest: &RunManifest) -> Result<(), CliError> {
    manifest.validate()?;
    fs::create_dir_all(&manifest.out_dir)
        .map_err(|e| CliError::Io(format!("{}: {e}", manifest.out_dir.display())))?;
    match manifest.mode {
        Mode::Dehaze => run_dehaze(manifest),
        Mode::Synthesize => run_synthesize(manifest),
        Mode::Evaluate => run_evaluate(manifest),
    }
}

fn stem_of(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "image".into())
}

fn ext_of(path: &Path) -> String {
    path.extension()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "png".into())
}

struct Dehazed {
    stem: String,
    ext: String,
    hazy: Vec<ImagePlane>,
    result: DehazeResult,
}

fn dehaze_one(path: &Path, cfg: &SolverConfig) -> Result<Dehazed, CliError> {
    let hazy = load_channels(path)?;
    let result = dehaze_image(&hazy, cfg)?;
    Ok(Dehazed {
        stem: stem_of(path),
        ext: ext_of(path),
        hazy,
        result,
    })
}

fn channel_suffixes(count: usize) -> &'static [&'static str] {
    if count == 1 {
        &[""]
    } else {
        &["_r", "_g", "_b"]
    }
}

/// Writes the dehazed image and any requested diagnostics; returns the path
/// of the dehazed image.
fn write_outputs(manifest: &RunManifest, d: &Dehazed) -> Result<PathBuf, CliError> {
    let out_dir = &manifest.out_dir;
    let radiance: Vec<ImagePlane> = d
        .result
        .channels
        .iter()
        .map(|c| c.radiance.clone())
        .collect();
    let dehazed_path = out_dir.join(format!("{}_dehazed.{}", d.stem, d.ext));
    save_channels(&dehazed_path, &radiance)?;

    let suffixes = channel_suffixes(d.result.channels.len());

    if manifest.emit_transmission {
        for (ch, suffix) in d.result.channels.iter().zip(suffixes) {
            let path = out_dir.join(format!("{}_transmission{suffix}.png", d.stem));
            save_unit_map(&path, &ch.transmission)?;
        }
    }

    if manifest.emit_fields {
        let mut min_logs = Vec::with_capacity(d.result.channels.len());
        for ((ch, hazy), suffix) in d.result.channels.iter().zip(&d.hazy).zip(suffixes) {
            let a = atmospheric_light(hazy, manifest.config.c0, manifest.config.a_override)?;
            let min_log = to_log_domain(hazy, a, LOG_CLAMP_DELTA)?.min_value();
            min_logs.push(min_log);
            let encode = |field: &ImagePlane| {
                if min_log == 0.0 {
                    field.map(|_| 1.0)
                } else {
                    field.map(|v| 1.0 - v / min_log)
                }
            };
            let depth_path = out_dir.join(format!("{}_depth_field{suffix}.png", d.stem));
            save_unit_map(&depth_path, &encode(&ch.log_transmission))?;
            let refl_path = out_dir.join(format!("{}_reflection_field{suffix}.png", d.stem));
            save_unit_map(&refl_path, &encode(&ch.log_reflection))?;
        }
        let names: Vec<&str> = suffixes
            .iter()
            .map(|s| if s.is_empty() { "gray" } else { &s[1..] })
            .collect();
        let sidecar = out_dir.join(format!("{}_fields.meta", d.stem));
        write_field_sidecar(&sidecar, &names, &min_logs)?;
    }

    if manifest.emit_energy {
        for (ch, suffix) in d.result.channels.iter().zip(suffixes) {
            let path = out_dir.join(format!("{}_energy{suffix}.csv", d.stem));
            write_energy_csv(&path, &ch.energy_trace)?;
        }
    }

    Ok(dehazed_path)
}

/// Runs `work` over the inputs in parallel, then reports per-file results
/// in input order; the first failure decides the exit.
fn for_each_input<T: Send>(
    inputs: &[PathBuf],
    work: impl Fn(&PathBuf) -> Result<T, CliError> + Sync,
    mut on_ok: impl FnMut(&PathBuf, T),
) -> Result<(), CliError> {
    let results: Vec<Result<T, CliError>> = inputs.par_iter().map(&work).collect();
    let mut first_err = None;
    for (path, res) in inputs.iter().zip(results) {
        match res {
            Ok(value) => on_ok(path, value),
            Err(e) => {
                eprintln!("error: {}: {e}", path.display());
                if first_err.is_none() {
                    first_err = Some(e);
                }
            }
        }
    }
    first_err.map_or(Ok(()), Err)
}

fn run_dehaze(manifest: &RunManifest) -> Result<(), CliError> {
    for_each_input(
        &manifest.inputs,
        |path| {
            let d = dehaze_one(path, &manifest.config)?;
            write_outputs(manifest, &d)
        },
        |path, out| println!("dehazed {} -> {}", path.display(), out.display()),
    )
}

fn run_synthesize(manifest: &RunManifest) -> Result<(), CliError> {
    let spec = manifest.synth.as_ref().expect("validated");

    // named clean sources: loaded files, or a generated pattern suite
    let sources: Vec<(String, String, Vec<ImagePlane>)> = if manifest.inputs.is_empty() {
        let generated = patterns::suite(
            manifest.seed,
            GENERATED_PATTERNS,
            GENERATED_SIZE,
            GENERATED_SIZE,
        );
        for (name, channels) in &generated {
            let clean_path = manifest.out_dir.join(format!("{name}.png"));
            save_channels(&clean_path, channels)?;
        }
        generated
            .into_iter()
            .map(|(name, channels)| (name, "png".into(), channels))
            .collect()
    } else {
        let mut loaded = Vec::with_capacity(manifest.inputs.len());
        for path in &manifest.inputs {
            loaded.push((stem_of(path), ext_of(path), load_channels(path)?));
        }
        loaded
    };

    for (name, ext, channels) in &sources {
        let rows = channels[0].rows();
        let cols = channels[0].cols();
        let depth = make_depth(rows, cols, spec).map_err(CliError::from)?;
        let mut hazy_channels = Vec::with_capacity(channels.len());
        let mut t_true = None;
        for ch in channels {
            let (hazy, t) = synthesize_haze(ch, &depth, spec).map_err(CliError::from)?;
            hazy_channels.push(hazy);
            t_true.get_or_insert(t);
        }
        let hazy_path = manifest.out_dir.join(format!("{name}_hazy.{ext}"));
        save_channels(&hazy_path, &hazy_channels)?;
        let t_path = manifest
            .out_dir
            .join(format!("{name}_transmission_true.png"));
        save_unit_map(&t_path, &t_true.expect("at least one channel"))?;
        println!("synthesized {} -> {}", name, hazy_path.display());
    }
    Ok(())
}

fn run_evaluate(manifest: &RunManifest) -> Result<(), CliError> {
    let jobs: Vec<(PathBuf, PathBuf)> = manifest
        .inputs
        .iter()
        .cloned()
        .zip(manifest.truths.iter().cloned())
        .collect();

    let results: Vec<Result<MetricsRow, CliError>> = jobs
        .par_iter()
        .map(|(hazy_path, truth_path)| {
            let d = dehaze_one(hazy_path, &manifest.config)?;
            let truth = load_channels(truth_path)?;
            let radiance: Vec<ImagePlane> = d
                .result
                .channels
                .iter()
                .map(|c| c.radiance.clone())
                .collect();
            let mse_hazy = mse(&d.hazy, &truth).map_err(CliError::from)?;
            let mse_dehazed = mse(&radiance, &truth).map_err(CliError::from)?;
            write_outputs(manifest, &d)?;
            let iterations = d
                .result
                .channels
                .iter()
                .map(|c| c.outer_iterations)
                .max()
                .unwrap_or(0);
            let energy_final = d
                .result
                .channels
                .iter()
                .map(|c| *c.energy_trace.last().unwrap_or(&0.0))
                .sum();
            Ok(MetricsRow {
                image: d.stem.clone(),
                mse_hazy,
                mse_dehazed,
                iterations,
                energy_final,
            })
        })
        .collect();

    let mut rows = Vec::with_capacity(results.len());
    let mut first_err = None;
    for ((hazy_path, _), res) in jobs.iter().zip(results) {
        match res {
            Ok(row) => {
                println!(
                    "evaluated {}: mse {:.4} -> {:.4}",
                    hazy_path.display(),
                    row.mse_hazy,
                    row.mse_dehazed
                );
                rows.push(row);
            }
            Err(e) => {
                eprintln!("error: {}: {e}", hazy_path.display());
                if first_err.is_none() {
                    first_err = Some(e);
                }
            }
        }
    }

    if manifest.emit_metrics && !rows.is_empty() {
        write_metrics_csv(&manifest.out_dir.join("metrics.csv"), &rows)?;
        write_summary(&manifest.out_dir.join("summary.txt"), &rows)?;
    }
    first_err.map_or(Ok(()), Err)
}
