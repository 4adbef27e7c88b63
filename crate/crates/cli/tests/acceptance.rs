//! Acceptance suite: one test per criterion, each printing a PASS/FAIL
//! line. Run with `cargo test -p tvdehaze-cli --test acceptance -- --nocapture`
//! to see the lines.

use std::fs;
use std::panic::{catch_unwind, resume_unwind, AssertUnwindSafe};
use std::process::Command;
use std::sync::Mutex;
use std::time::Instant;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;

use tvdehaze::dehaze::{alternate_minimize, dehaze_image, SolverConfig};
use tvdehaze::fgp::{fgp_solve, FgpProblem};
use tvdehaze::ops::{divergence, grad};
use tvdehaze::plane::{BoxBound, DualField, ImagePlane};
use tvdehaze::synth::{make_depth, mse, DepthKind, SynthSpec};
use tvdehaze_cli::patterns;

/// Heavy tests take this lock so the wall-clock bounds are not measured
/// under each other's load.
static HEAVY: Mutex<()> = Mutex::new(());

fn criterion(number: usize, label: &str, body: impl FnOnce()) {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(()) => println!("criterion {number} ({label}): PASS"),
        Err(panic) => {
            println!("criterion {number} ({label}): FAIL");
            resume_unwind(panic);
        }
    }
}

fn heavy() -> std::sync::MutexGuard<'static, ()> {
    HEAVY
        .lock()
        .unwrap_or_else(|poisoned| poisoned.into_inner())
}

/// Random nonpositive log-domain inputs, sizes up to 32x32.
fn feasibility_suite(count: usize) -> Vec<ImagePlane> {
    let mut rng = StdRng::seed_from_u64(0xFEA5);
    (0..count)
        .map(|k| {
            let rows = rng.random_range(1..=32);
            let cols = rng.random_range(1..=32);
            match k % 3 {
                0 => ImagePlane::from_fn(rows, cols, |_, _| rng.random_range(-3.0..0.0)),
                1 => ImagePlane::from_fn(rows, cols, |i, j| {
                    if (i / 3 + j / 3) % 2 == 0 {
                        -2.2
                    } else {
                        -0.4
                    }
                }),
                _ => ImagePlane::from_fn(rows, cols, |_, _| {
                    if rng.random_bool(0.3) {
                        0.0
                    } else {
                        rng.random_range(-2.5..0.0)
                    }
                }),
            }
        })
        .collect()
}

/// A procedurally generated naturalistic scene: multi-octave value noise
/// over a sky gradient, lightly tinted per channel.
fn photographic_scene(seed: u64, rows: usize, cols: usize, sky_base: f64) -> Vec<ImagePlane> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut luma = vec![0.0f64; rows * cols];
    for (cells, amp) in [(4usize, 55.0), (9, 28.0), (19, 14.0), (41, 7.0)] {
        let gw = cells + 2;
        let grid: Vec<f64> = (0..gw * gw).map(|_| rng.random_range(-1.0..1.0)).collect();
        for i in 0..rows {
            for j in 0..cols {
                let gy = i as f64 / rows as f64 * cells as f64;
                let gx = j as f64 / cols as f64 * cells as f64;
                let (y0, x0) = (gy.floor() as usize, gx.floor() as usize);
                let (fy, fx) = (gy - y0 as f64, gx - x0 as f64);
                let v = grid[y0 * gw + x0] * (1.0 - fy) * (1.0 - fx)
                    + grid[y0 * gw + x0 + 1] * (1.0 - fy) * fx
                    + grid[(y0 + 1) * gw + x0] * fy * (1.0 - fx)
                    + grid[(y0 + 1) * gw + x0 + 1] * fy * fx;
                luma[i * cols + j] += amp * v;
            }
        }
    }
    let tints = [1.0, 0.94, 0.88];
    tints
        .iter()
        .map(|tint| {
            ImagePlane::from_fn(rows, cols, |i, j| {
                let sky = sky_base - 70.0 * i as f64 / rows as f64;
                ((sky + luma[i * cols + j]) * tint).clamp(12.0, 243.0)
            })
        })
        .collect()
}

/// Forward-hazes an RGB image with a vertical gradient of transmission.
fn hazify(clean: &[ImagePlane], t_min: f64, t_max: f64) -> (Vec<ImagePlane>, SynthSpec) {
    let (depth_min, depth_max) = SynthSpec::depth_range_for_transmission(1.0, t_min, t_max);
    let spec = SynthSpec {
        depth_kind: DepthKind::LinearVertical,
        beta_scatter: 1.0,
        depth_min,
        depth_max,
        a: 255.0,
    };
    let depth = make_depth(clean[0].rows(), clean[0].cols(), &spec).unwrap();
    let hazy = clean
        .iter()
        .map(|ch| {
            tvdehaze::synth::synthesize_haze(ch, &depth, &spec)
                .unwrap()
                .0
        })
        .collect();
    (hazy, spec)
}

/// The ten structured synthetic pairs used by criteria 5 and 7.
fn synthetic_suite() -> Vec<(Vec<ImagePlane>, Vec<ImagePlane>)> {
    patterns::suite(0xD0_5E, 10, 48, 48)
        .into_iter()
        .map(|(_, clean)| {
            let (hazy, _) = hazify(&clean, 0.3, 0.9);
            (clean, hazy)
        })
        .collect()
}

fn radiance_of(result: &tvdehaze::dehaze::DehazeResult) -> Vec<ImagePlane> {
    result.channels.iter().map(|c| c.radiance.clone()).collect()
}

#[test]
fn criterion_1_feasibility() {
    criterion(1, "feasibility of the recovered fields", || {
        let _guard = heavy();
        let suite = feasibility_suite(20);
        let cfg = SolverConfig::default();
        let start = Instant::now();
        for li in &suite {
            let out = alternate_minimize(li, &cfg).unwrap();
            for (k, &lo) in li.as_slice().iter().enumerate() {
                let eta = out.log_transmission.as_slice()[k];
                let gamma = out.log_reflection.as_slice()[k];
                assert!(lo <= eta && eta <= 0.0, "eta out of box");
                assert!(lo <= gamma && gamma <= 0.0, "gamma out of box");
            }
        }
        let elapsed = start.elapsed();
        assert!(elapsed.as_secs_f64() < 10.0, "took {elapsed:.2?}");
    });
}

#[test]
fn criterion_2_energy_descent() {
    criterion(2, "energy trace never increases", || {
        let _guard = heavy();
        let cfg = SolverConfig::default();
        for li in &feasibility_suite(20) {
            let out = alternate_minimize(li, &cfg).unwrap();
            let e0 = out.energy_trace[0];
            for w in out.energy_trace.windows(2) {
                assert!(
                    w[1] <= w[0] + 1e-9 * e0,
                    "suite input: {} -> {}",
                    w[0],
                    w[1]
                );
            }
        }
        // three naturalistic 256x256 scenes, hazed and dehazed end to end
        for seed in [1u64, 2, 3] {
            let clean = photographic_scene(seed, 256, 256, 150.0);
            let (hazy, _) = hazify(&clean, 0.35, 0.95);
            let result = dehaze_image(&hazy, &cfg).unwrap();
            for ch in &result.channels {
                let e0 = ch.energy_trace[0];
                for w in ch.energy_trace.windows(2) {
                    assert!(
                        w[1] <= w[0] + 1e-9 * e0,
                        "scene {seed}: {} -> {}",
                        w[0],
                        w[1]
                    );
                }
            }
        }
    });
}

#[test]
fn criterion_3_adjointness() {
    criterion(3, "divergence is the adjoint of the gradient", || {
        let mut rng = StdRng::seed_from_u64(0xAD01);
        for case in 0..100 {
            let rows = rng.random_range(1..=6);
            let cols = rng.random_range(1..=6);
            let x = ImagePlane::from_fn(rows, cols, |_, _| rng.random_range(-5.0..5.0));
            let p = (0..(rows - 1) * cols)
                .map(|_| rng.random_range(-3.0..3.0))
                .collect();
            let q = (0..rows * (cols - 1))
                .map(|_| rng.random_range(-3.0..3.0))
                .collect();
            let d = DualField::from_components(rows, cols, p, q).unwrap();
            let lhs = divergence(&d).dot(&x);
            let rhs = d.dot(&grad(&x));
            assert!(
                (lhs - rhs).abs() <= 1e-10 * (1.0 + rhs.abs()),
                "case {case} at {rows}x{cols}: {lhs} vs {rhs}"
            );
        }
    });
}

#[test]
fn criterion_4_fgp_oracle() {
    criterion(4, "inner solver matches brute-force grid search", || {
        let _guard = heavy();

        fn objective(x: [f64; 4], b: [f64; 4], mu: f64) -> f64 {
            let [x00, x01, x10, x11] = x;
            let tv = ((x00 - x10).powi(2) + (x00 - x01).powi(2)).sqrt()
                + (x01 - x11).abs()
                + (x10 - x11).abs();
            let fid: f64 = x
                .iter()
                .zip(b.iter())
                .map(|(&xv, &bv)| (xv - bv) * (xv - bv))
                .sum();
            mu * tv + fid
        }

        fn grid_minimum(b: [f64; 4], mu: f64) -> f64 {
            let levels: Vec<f64> = (0..=100).map(|k| -1.0 + 0.01 * k as f64).collect();
            levels
                .par_iter()
                .map(|&x00| {
                    let mut best = f64::INFINITY;
                    for &x01 in &levels {
                        for &x10 in &levels {
                            for &x11 in &levels {
                                best = best.min(objective([x00, x01, x10, x11], b, mu));
                            }
                        }
                    }
                    best
                })
                .reduce(|| f64::INFINITY, f64::min)
        }

        let start = Instant::now();
        let mut rng = StdRng::seed_from_u64(0x04AC);
        for round in 0..20 {
            let b = [
                rng.random_range(-1.0..0.0),
                rng.random_range(-1.0..0.0),
                rng.random_range(-1.0..0.0),
                rng.random_range(-1.0..0.0),
            ];
            let mu = [0.1, 0.3, 1.0][round % 3];
            let oracle = grid_minimum(b, mu);
            let plane = ImagePlane::new(2, 2, b.to_vec()).unwrap();
            let bound = BoxBound::new(ImagePlane::constant(2, 2, -1.0)).unwrap();
            let prob = FgpProblem::new(plane, mu, bound).unwrap();
            let sol = fgp_solve(&prob, 100, 1e-4).unwrap().solution;
            let got = objective(
                [sol.get(0, 0), sol.get(0, 1), sol.get(1, 0), sol.get(1, 1)],
                b,
                mu,
            );
            assert!(
                (got - oracle).abs() <= 1e-3,
                "round {round} (mu = {mu}): {got} vs {oracle}"
            );
        }
        let elapsed = start.elapsed();
        assert!(
            elapsed.as_secs_f64() < 60.0,
            "oracle suite took {elapsed:.2?}"
        );
    });
}

#[test]
fn criterion_5_synthetic_roundtrip() {
    criterion(5, "dehazing reduces the error on synthetic haze", || {
        let _guard = heavy();
        let cfg = SolverConfig::default();
        let mut improved = 0;
        for (clean, hazy) in synthetic_suite() {
            let result = dehaze_image(&hazy, &cfg).unwrap();
            let mse_hazy = mse(&hazy, &clean).unwrap();
            let mse_dehazed = mse(&radiance_of(&result), &clean).unwrap();
            if mse_dehazed < mse_hazy {
                improved += 1;
            }
        }
        assert!(improved >= 8, "improved on only {improved} of 10");
    });
}

#[test]
fn criterion_6_parameter_insensitivity() {
    criterion(6, "atmospheric light and alpha barely matter", || {
        let _guard = heavy();
        // the insensitivity claim concerns ordinary photographs under
        // mild-to-moderate haze, where the transmission floor rarely binds
        // (a floor-bound pixel responds to A at slope 1 - 1/t0 = -1.5)
        let suite: Vec<Vec<ImagePlane>> = (0..5u64)
            .map(|s| hazify(&photographic_scene(100 + s, 48, 48, 130.0), 0.7, 0.95).0)
            .collect();

        let run = |cfg: &SolverConfig| -> Vec<Vec<ImagePlane>> {
            suite
                .iter()
                .map(|hazy| radiance_of(&dehaze_image(hazy, cfg).unwrap()))
                .collect()
        };

        let mean_abs_diff = |a: &[Vec<ImagePlane>], b: &[Vec<ImagePlane>]| -> f64 {
            let mut sum = 0.0;
            let mut count = 0usize;
            for (img_a, img_b) in a.iter().zip(b) {
                for (ch_a, ch_b) in img_a.iter().zip(img_b) {
                    for (va, vb) in ch_a.as_slice().iter().zip(ch_b.as_slice()) {
                        sum += (va - vb).abs();
                        count += 1;
                    }
                }
            }
            sum / count as f64
        };

        let base = run(&SolverConfig::default());

        let lifted = SolverConfig {
            a_override: Some(285.0),
            ..SolverConfig::default()
        };
        let diff_a = mean_abs_diff(&base, &run(&lifted));
        assert!(diff_a <= 5.0, "atmospheric light sensitivity {diff_a:.3}");

        let low_alpha = SolverConfig {
            alpha: 10.0,
            ..SolverConfig::default()
        };
        let high_alpha = SolverConfig {
            alpha: 1000.0,
            ..SolverConfig::default()
        };
        let diff_alpha = mean_abs_diff(&run(&low_alpha), &run(&high_alpha));
        assert!(diff_alpha <= 10.0, "alpha sensitivity {diff_alpha:.3}");
    });
}

#[test]
fn criterion_7_constraints_are_necessary() {
    criterion(7, "dropping the box constraints hurts recovery", || {
        let _guard = heavy();
        let constrained = SolverConfig::default();
        let unconstrained = SolverConfig {
            box_constraint: false,
            ..SolverConfig::default()
        };

        let mut worse = 0;
        for (clean, hazy) in synthetic_suite() {
            let with_box = dehaze_image(&hazy, &constrained).unwrap();
            let without_box = dehaze_image(&hazy, &unconstrained).unwrap();
            let mse_with = mse(&radiance_of(&with_box), &clean).unwrap();
            let mse_without = mse(&radiance_of(&without_box), &clean).unwrap();
            if mse_without > mse_with {
                worse += 1;
            }
        }
        assert!(worse >= 8, "unconstrained was worse on only {worse} of 10");
    });
}

#[test]
fn criterion_8_grayscale_parity() {
    criterion(8, "grayscale equals per-channel RGB processing", || {
        let plane = ImagePlane::from_fn(24, 24, |i, j| {
            60.0 + 9.0 * ((2 * i + j) % 13) as f64 + 2.0 * (i as f64)
        });
        let cfg = SolverConfig::default();
        let gray = dehaze_image(std::slice::from_ref(&plane), &cfg).unwrap();
        let rgb = dehaze_image(&[plane.clone(), plane.clone(), plane], &cfg).unwrap();
        for ch in &rgb.channels {
            let bits_equal = ch
                .radiance
                .as_slice()
                .iter()
                .zip(gray.channels[0].radiance.as_slice())
                .all(|(a, b)| a.to_bits() == b.to_bits());
            assert!(bits_equal);
        }
    });
}

#[test]
fn criterion_9_determinism_and_performance() {
    criterion(9, "byte-identical reruns and a bounded 400x400 run", || {
        let _guard = heavy();

        // byte-identical outputs through the actual binary
        let dir = tempfile::tempdir().unwrap();
        let input = dir.path().join("scene.png");
        let clean = photographic_scene(9, 48, 48, 150.0);
        let (hazy, _) = hazify(&clean, 0.4, 0.9);
        tvdehaze_cli::imageio::save_channels(&input, &hazy).unwrap();
        for sub in ["first", "second"] {
            let status = Command::new(env!("CARGO_BIN_EXE_tvdehaze"))
                .arg(&input)
                .args(["--out-dir", dir.path().join(sub).to_str().unwrap()])
                .args(["--emit-transmission", "--emit-fields", "--emit-energy"])
                .status()
                .unwrap();
            assert!(status.success());
        }
        let mut names: Vec<String> = fs::read_dir(dir.path().join("first"))
            .unwrap()
            .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
            .collect();
        names.sort();
        assert!(names.len() >= 5);
        for name in names {
            let a = fs::read(dir.path().join("first").join(&name)).unwrap();
            let b = fs::read(dir.path().join("second").join(&name)).unwrap();
            assert_eq!(a, b, "{name} differs between reruns");
        }

        // one 400x400 RGB image under the default configuration
        let clean = photographic_scene(10, 400, 400, 150.0);
        let (hazy, _) = hazify(&clean, 0.35, 0.95);
        let start = Instant::now();
        let result = dehaze_image(&hazy, &SolverConfig::default()).unwrap();
        let elapsed = start.elapsed();
        assert_eq!(result.channels.len(), 3);
        assert!(
            elapsed.as_secs_f64() < 60.0,
            "400x400 dehaze took {elapsed:.2?}"
        );
    });
}
