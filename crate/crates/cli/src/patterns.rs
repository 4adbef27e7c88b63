//! Deterministic structured test patterns used by the synthesize mode when
//! no input images are given, and by the evaluation tests. Tones stay in a
//! moderate range so the synthetic scenes resemble ordinary photographs
//! rather than extreme black/white charts.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use tvdehaze::ImagePlane;

fn checkerboard(rng: &mut StdRng, rows: usize, cols: usize) -> Vec<ImagePlane> {
    let cell = rng.random_range(3..=8usize);
    let tones: Vec<(f64, f64)> = (0..3)
        .map(|_| {
            (
                rng.random_range(50.0..110.0),
                rng.random_range(150.0..220.0),
            )
        })
        .collect();
    tones
        .into_iter()
        .map(|(dark, light)| {
            ImagePlane::from_fn(rows, cols, |i, j| {
                if (i / cell + j / cell) % 2 == 0 {
                    dark
                } else {
                    light
                }
            })
        })
        .collect()
}

fn stripes(rng: &mut StdRng, rows: usize, cols: usize) -> Vec<ImagePlane> {
    let period = rng.random_range(4..=10usize);
    let vertical = rng.random_bool(0.5);
    let base: f64 = rng.random_range(60.0..100.0);
    let amp: f64 = rng.random_range(60.0..110.0);
    (0..3)
        .map(|c| {
            let shift = c * period / 3;
            ImagePlane::from_fn(rows, cols, |i, j| {
                let k = if vertical { j } else { i } + shift;
                if (k / period) % 2 == 0 {
                    base
                } else {
                    base + amp
                }
            })
        })
        .collect()
}

fn gradient_with_blocks(rng: &mut StdRng, rows: usize, cols: usize) -> Vec<ImagePlane> {
    let lo: f64 = rng.random_range(50.0..90.0);
    let hi: f64 = rng.random_range(160.0..220.0);
    let bi = rng.random_range(0..rows.max(2) / 2);
    let bj = rng.random_range(0..cols.max(2) / 2);
    let bh = rng.random_range(rows / 4..=rows / 2).max(1);
    let bw = rng.random_range(cols / 4..=cols / 2).max(1);
    let block_tone: f64 = rng.random_range(40.0..220.0);
    (0..3)
        .map(|c| {
            let tint = 0.9 + 0.1 * c as f64;
            ImagePlane::from_fn(rows, cols, |i, j| {
                let in_block = i >= bi && i < bi + bh && j >= bj && j < bj + bw;
                let v = if in_block {
                    block_tone
                } else {
                    lo + (hi - lo) * j as f64 / (cols - 1).max(1) as f64
                };
                (v * tint).clamp(0.0, 255.0)
            })
        })
        .collect()
}

fn soft_scene(rng: &mut StdRng, rows: usize, cols: usize) -> Vec<ImagePlane> {
    // a smooth bump over a tilted base, different tint per channel
    let ci = rng.random_range(0.2..0.8) * rows as f64;
    let cj = rng.random_range(0.2..0.8) * cols as f64;
    let radius = rng.random_range(0.2..0.5) * rows.min(cols) as f64;
    let base: f64 = rng.random_range(70.0..120.0);
    let bump: f64 = rng.random_range(60.0..110.0);
    (0..3)
        .map(|c| {
            let tint = 1.0 - 0.08 * c as f64;
            ImagePlane::from_fn(rows, cols, |i, j| {
                let di = i as f64 - ci;
                let dj = j as f64 - cj;
                let d2 = (di * di + dj * dj) / (radius * radius);
                let v = base + 0.3 * base * (i as f64 / rows as f64) + bump * (-d2).exp();
                (v * tint).clamp(0.0, 255.0)
            })
        })
        .collect()
}

/// `count` deterministic RGB test patterns named `pattern_00`, ....
pub fn suite(seed: u64, count: usize, rows: usize, cols: usize) -> Vec<(String, Vec<ImagePlane>)> {
    let mut rng = StdRng::seed_from_u64(seed);
    (0..count)
        .map(|k| {
            let channels = match k % 4 {
                0 => checkerboard(&mut rng, rows, cols),
                1 => stripes(&mut rng, rows, cols),
                2 => gradient_with_blocks(&mut rng, rows, cols),
                _ => soft_scene(&mut rng, rows, cols),
            };
            (format!("pattern_{k:02}"), channels)
        })
        .collect()
}
