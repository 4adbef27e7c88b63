//! Metrics report, energy traces and the diagnostics sidecar.
//!
//! Floats are written with Rust's shortest round-trip formatting, so a
//! parsed report reproduces the computed values exactly.

use std::fs;
use std::path::Path;

use crate::error::CliError;

/// One evaluated image.
#[derive(Debug, Clone)]
pub struct MetricsRow {
    pub image: String,
    pub mse_hazy: f64,
    pub mse_dehazed: f64,
    /// Outer iterations, the maximum over channels.
    pub iterations: usize,
    /// Final energy summed over channels.
    pub energy_final: f64,
}

/// Column means over the rows, in CSV column order.
pub fn averages(rows: &[MetricsRow]) -> (f64, f64, f64, f64) {
    let n = rows.len() as f64;
    (
        rows.iter().map(|r| r.mse_hazy).sum::<f64>() / n,
        rows.iter().map(|r| r.mse_dehazed).sum::<f64>() / n,
        rows.iter().map(|r| r.iterations as f64).sum::<f64>() / n,
        rows.iter().map(|r| r.energy_final).sum::<f64>() / n,
    )
}

/// Writes the machine-readable report: one row per image plus a trailing
/// `average` row holding the arithmetic column means.
pub fn write_metrics_csv(path: &Path, rows: &[MetricsRow]) -> Result<(), CliError> {
    let mut out = String::from("image,mse_hazy,mse_dehazed,iterations,energy_final\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.image, r.mse_hazy, r.mse_dehazed, r.iterations, r.energy_final
        ));
    }
    if !rows.is_empty() {
        let (h, d, it, e) = averages(rows);
        out.push_str(&format!("average,{h},{d},{it},{e}\n"));
    }
    fs::write(path, out).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Human-readable companion to the CSV.
pub fn write_summary(path: &Path, rows: &[MetricsRow]) -> Result<(), CliError> {
    let mut out = String::new();
    out.push_str(&format!(
        "{:<24} {:>12} {:>12} {:>6} {:>14}\n",
        "image", "mse hazy", "mse dehazed", "iters", "final energy"
    ));
    for r in rows {
        out.push_str(&format!(
            "{:<24} {:>12.4} {:>12.4} {:>6} {:>14.4}\n",
            r.image, r.mse_hazy, r.mse_dehazed, r.iterations, r.energy_final
        ));
    }
    if !rows.is_empty() {
        let (h, d, it, e) = averages(rows);
        out.push_str(&format!(
            "{:<24} {:>12.4} {:>12.4} {:>6.1} {:>14.4}\n",
            "average", h, d, it, e
        ));
        let improved = rows.iter().filter(|r| r.mse_dehazed < r.mse_hazy).count();
        out.push_str(&format!(
            "\ndehazing lowered the error on {improved} of {} images\n",
            rows.len()
        ));
    }
    fs::write(path, out).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Energy trace as `iteration,energy` CSV; entry 0 is the starting energy.
pub fn write_energy_csv(path: &Path, trace: &[f64]) -> Result<(), CliError> {
    let mut out = String::from("iteration,energy\n");
    for (k, e) in trace.iter().enumerate() {
        out.push_str(&format!("{k},{e}\n"));
    }
    fs::write(path, out).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Sidecar describing how the emitted diagnostic maps are encoded, so they
/// can be inverted to quantization precision. `min_log` holds the minimum
/// of the log-domain image per channel.
pub fn write_field_sidecar(
    path: &Path,
    channel_names: &[&str],
    min_log: &[f64],
) -> Result<(), CliError> {
    let mut out = String::new();
    out.push_str("transmission_encoding = gray = round(255 * t)\n");
    out.push_str("field_encoding = gray = round(255 * (1 - field / min_log)); field = (1 - gray / 255) * min_log\n");
    for (name, v) in channel_names.iter().zip(min_log) {
        out.push_str(&format!("min_log_{name} = {v}\n"));
    }
    fs::write(path, out).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}
