//! End-to-end checks of the binary and the file formats it produces.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use tvdehaze::dehaze::{dehaze_image, SolverConfig};
use tvdehaze::ImagePlane;
use tvdehaze_cli::imageio::{load_channels, save_channels};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tvdehaze"))
}

fn write_gray_png(path: &Path, rows: u32, cols: u32, value: u8) {
    let img = image::GrayImage::from_pixel(cols, rows, image::Luma([value]));
    img.save(path).unwrap();
}

#[test]
fn dehaze_a_single_black_pixel() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("black.png");
    write_gray_png(&input, 1, 1, 0);

    let status = bin()
        .arg(&input)
        .args(["--out-dir", dir.path().to_str().unwrap()])
        .status()
        .unwrap();
    assert!(status.success());

    let out = dir.path().join("black_dehazed.png");
    let decoded = load_channels(&out).unwrap();
    assert_eq!(decoded.len(), 1);
    assert_eq!(decoded[0].rows(), 1);
    assert_eq!(decoded[0].cols(), 1);
    assert_eq!(decoded[0].get(0, 0), 0.0);
}

#[test]
fn identical_manifests_give_byte_identical_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("scene.png");
    let img = image::RgbImage::from_fn(20, 16, |x, y| {
        image::Rgb([
            (40 + 7 * (x % 9) + 3 * y) as u8,
            (90 + 5 * ((x + y) % 11)) as u8,
            (150 + 4 * (y % 13)) as u8,
        ])
    });
    img.save(&input).unwrap();

    for run_dir in ["a", "b"] {
        let status = bin()
            .arg(&input)
            .args(["--out-dir", dir.path().join(run_dir).to_str().unwrap()])
            .args(["--emit-transmission", "--emit-energy", "--emit-fields"])
            .status()
            .unwrap();
        assert!(status.success());
    }

    let mut names: Vec<String> = fs::read_dir(dir.path().join("a"))
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    assert!(!names.is_empty());
    for name in names {
        let a = fs::read(dir.path().join("a").join(&name)).unwrap();
        let b = fs::read(dir.path().join("b").join(&name)).unwrap();
        assert_eq!(a, b, "outputs differ for {name}");
    }
}

#[test]
fn missing_input_exits_with_io_code() {
    let dir = tempfile::tempdir().unwrap();
    let status = bin()
        .arg(dir.path().join("nope.png"))
        .args(["--out-dir", dir.path().to_str().unwrap()])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn invalid_config_exits_before_processing() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("img.png");
    write_gray_png(&input, 4, 4, 100);
    let status = bin()
        .arg(&input)
        .args(["--out-dir", dir.path().to_str().unwrap()])
        .args(["--t0", "1.5"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1));
    // nothing was written
    assert!(!dir.path().join("img_dehazed.png").exists());
}

#[test]
fn eight_bit_round_trip_is_lossless() {
    let dir = tempfile::tempdir().unwrap();
    let gray = ImagePlane::from_fn(9, 13, |i, j| ((i * 31 + j * 7) % 256) as f64);
    let rgb: Vec<ImagePlane> = (0..3)
        .map(|c| ImagePlane::from_fn(9, 13, |i, j| ((i * 17 + j * 11 + c * 40) % 256) as f64))
        .collect();

    for ext in ["png", "pgm"] {
        let path = dir.path().join(format!("gray.{ext}"));
        save_channels(&path, std::slice::from_ref(&gray)).unwrap();
        let back = load_channels(&path).unwrap();
        assert_eq!(back.len(), 1);
        assert_eq!(back[0].as_slice(), gray.as_slice(), "gray {ext}");
    }
    for ext in ["png", "ppm"] {
        let path = dir.path().join(format!("rgb.{ext}"));
        save_channels(&path, &rgb).unwrap();
        let back = load_channels(&path).unwrap();
        assert_eq!(back.len(), 3);
        for (a, b) in back.iter().zip(&rgb) {
            assert_eq!(a.as_slice(), b.as_slice(), "rgb {ext}");
        }
    }
}

fn parse_metrics(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|s| s.to_string()).collect())
        .collect()
}

#[test]
fn evaluate_reports_improvement_and_exact_averages() {
    let dir = tempfile::tempdir().unwrap();
    let synth_dir = dir.path().join("synth");
    let status = bin()
        .args(["--mode", "synthesize"])
        .args(["--out-dir", synth_dir.to_str().unwrap()])
        .args(["--seed", "11"])
        .status()
        .unwrap();
    assert!(status.success());

    let hazy: Vec<PathBuf> = (0..10)
        .map(|k| synth_dir.join(format!("pattern_{k:02}_hazy.png")))
        .collect();
    let clean: Vec<PathBuf> = (0..10)
        .map(|k| synth_dir.join(format!("pattern_{k:02}.png")))
        .collect();

    let eval_dir = dir.path().join("eval");
    let mut cmd = bin();
    cmd.args(["--mode", "evaluate"]);
    cmd.args(["--out-dir", eval_dir.to_str().unwrap()]);
    for h in &hazy {
        cmd.arg(h);
    }
    cmd.arg("--truth");
    for c in &clean {
        cmd.arg(c);
    }
    let status = cmd.status().unwrap();
    assert!(status.success());

    let rows = parse_metrics(&eval_dir.join("metrics.csv"));
    assert_eq!(rows.len(), 11); // 10 images + average
    let data = &rows[..10];
    let avg = &rows[10];
    assert_eq!(avg[0], "average");

    // the harness self-check: dehazing reduced the error
    let improved = data
        .iter()
        .filter(|r| r[2].parse::<f64>().unwrap() < r[1].parse::<f64>().unwrap())
        .count();
    assert!(improved >= 8, "only {improved} of 10 improved");

    // the average row is the arithmetic mean of the per-image rows
    for col in 1..5 {
        let mean = data
            .iter()
            .map(|r| r[col].parse::<f64>().unwrap())
            .sum::<f64>()
            / data.len() as f64;
        let reported = avg[col].parse::<f64>().unwrap();
        assert!(
            (mean - reported).abs() <= 1e-9 * (1.0 + mean.abs()),
            "column {col}: {mean} vs {reported}"
        );
    }

    // dehazed outputs were written alongside the report
    assert!(eval_dir.join("pattern_00_hazy_dehazed.png").exists());
    assert!(eval_dir.join("summary.txt").exists());
}

#[test]
fn diagnostics_are_invertible_to_quantization_precision() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("hazyish.png");
    let img = image::GrayImage::from_fn(18, 18, |x, y| {
        image::Luma([(120 + ((x / 3 + y / 3) % 2) * 70) as u8])
    });
    img.save(&input).unwrap();

    let status = bin()
        .arg(&input)
        .args(["--out-dir", dir.path().to_str().unwrap()])
        .args(["--emit-transmission", "--emit-fields"])
        .status()
        .unwrap();
    assert!(status.success());

    // the reference result from the library on the same input
    let channels = load_channels(&input).unwrap();
    let result = dehaze_image(&channels, &SolverConfig::default()).unwrap();
    let reference = &result.channels[0];

    // sidecar carries the field scaling
    let sidecar = fs::read_to_string(dir.path().join("hazyish_fields.meta")).unwrap();
    let min_log: f64 = sidecar
        .lines()
        .find_map(|l| l.strip_prefix("min_log_gray = "))
        .unwrap()
        .parse()
        .unwrap();

    let t_map = load_channels(&dir.path().join("hazyish_transmission.png")).unwrap();
    let depth_map = load_channels(&dir.path().join("hazyish_depth_field.png")).unwrap();
    let refl_map = load_channels(&dir.path().join("hazyish_reflection_field.png")).unwrap();

    let half_step_t = 0.5 / 255.0;
    let half_step_field = 0.5 * min_log.abs() / 255.0;
    for i in 0..18 {
        for j in 0..18 {
            let t_decoded = t_map[0].get(i, j) / 255.0;
            assert!((t_decoded - reference.transmission.get(i, j)).abs() <= half_step_t + 1e-9);

            let eta_decoded = (1.0 - depth_map[0].get(i, j) / 255.0) * min_log;
            assert!(
                (eta_decoded - reference.log_transmission.get(i, j)).abs()
                    <= half_step_field + 1e-9
            );
            let gamma_decoded = (1.0 - refl_map[0].get(i, j) / 255.0) * min_log;
            assert!(
                (gamma_decoded - reference.log_reflection.get(i, j)).abs()
                    <= half_step_field + 1e-9
            );
        }
    }
}

#[test]
fn grayscale_and_rgb_inputs_both_process() {
    let dir = tempfile::tempdir().unwrap();
    let gray_path = dir.path().join("g.png");
    write_gray_png(&gray_path, 10, 12, 140);
    let rgb_path = dir.path().join("c.png");
    image::RgbImage::from_pixel(12, 10, image::Rgb([140, 140, 140]))
        .save(&rgb_path)
        .unwrap();

    let status = bin()
        .arg(&gray_path)
        .arg(&rgb_path)
        .args(["--out-dir", dir.path().to_str().unwrap()])
        .status()
        .unwrap();
    assert!(status.success());

    let g = load_channels(&dir.path().join("g_dehazed.png")).unwrap();
    let c = load_channels(&dir.path().join("c_dehazed.png")).unwrap();
    assert_eq!(g.len(), 1);
    assert_eq!(c.len(), 3);
    // identical channels in, identical quantized outputs out
    assert_eq!(c[0].as_slice(), c[1].as_slice());
    assert_eq!(c[1].as_slice(), c[2].as_slice());
    assert_eq!(g[0].as_slice(), c[0].as_slice());
}
