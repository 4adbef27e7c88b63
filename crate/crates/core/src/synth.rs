//! Forward haze synthesis on parametric depth maps, and the evaluation
//! metric of the harness.
//!
//! A clean radiance `J` observed through transmission `t = exp(-beta * d)`
//! becomes `I = t * J + (1 - t) * A`. Synthesizing haze this way keeps the
//! true transmission and radiance available as ground truth. Depth units
//! are arbitrary: only the product `beta * d` matters, so ranges are most
//! naturally chosen from the transmission range they induce.

use crate::error::{Error, Result};
use crate::plane::ImagePlane;

/// Shape of the synthetic depth field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DepthKind {
    /// `depth_max` at the top row down to `depth_min` at the bottom row,
    /// mimicking a graduated fog.
    LinearVertical,
    /// `depth_min` at the left column up to `depth_max` at the right.
    LinearHorizontal,
    /// `depth_min` at the center out to `depth_max` at the corners.
    Radial,
    /// `depth_min` everywhere.
    Constant,
}

/// Parameters of the forward haze model.
#[derive(Debug, Clone)]
pub struct SynthSpec {
    pub depth_kind: DepthKind,
    /// Scattering coefficient; must be positive.
    pub beta_scatter: f64,
    pub depth_min: f64,
    pub depth_max: f64,
    /// Atmospheric light blended into the observation.
    pub a: f64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        Self {
            depth_kind: DepthKind::LinearVertical,
            beta_scatter: 1.0,
            depth_min: 0.0,
            depth_max: 1.0,
            a: 255.0,
        }
    }
}

impl SynthSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.beta_scatter > 0.0 && self.beta_scatter.is_finite()) {
            return Err(Error::Config(format!(
                "scattering coefficient must be positive, got {}",
                self.beta_scatter
            )));
        }
        let range_ok = self.depth_min.is_finite()
            && self.depth_max.is_finite()
            && self.depth_min >= 0.0
            && self.depth_max >= self.depth_min;
        if !range_ok {
            return Err(Error::Config(format!(
                "depth range must satisfy 0 <= min <= max, got [{}, {}]",
                self.depth_min, self.depth_max
            )));
        }
        if !(self.a > 0.0 && self.a.is_finite()) {
            return Err(Error::Config(format!(
                "atmospheric light must be positive, got {}",
                self.a
            )));
        }
        Ok(())
    }

    /// Depth range inducing transmissions in `[t_min, t_max]` under this
    /// scattering coefficient.
    pub fn depth_range_for_transmission(beta_scatter: f64, t_min: f64, t_max: f64) -> (f64, f64) {
        (-t_max.ln() / beta_scatter, -t_min.ln() / beta_scatter)
    }
}

/// A nonnegative scene-depth field.
#[derive(Debug, Clone)]
pub struct DepthMap {
    plane: ImagePlane,
}

impl DepthMap {
    pub fn plane(&self) -> &ImagePlane {
        &self.plane
    }
}

/// Builds the parametric depth map for the requested shape.
pub fn make_depth(rows: usize, cols: usize, spec: &SynthSpec) -> Result<DepthMap> {
    spec.validate()?;
    if rows == 0 || cols == 0 {
        return Err(Error::EmptyPlane { rows, cols });
    }
    let (lo, hi) = (spec.depth_min, spec.depth_max);
    let span = hi - lo;
    let plane = match spec.depth_kind {
        DepthKind::Constant => ImagePlane::constant(rows, cols, lo),
        DepthKind::LinearVertical => ImagePlane::from_fn(rows, cols, |i, _| {
            let frac = if rows > 1 {
                i as f64 / (rows - 1) as f64
            } else {
                0.0
            };
            hi - span * frac
        }),
        DepthKind::LinearHorizontal => ImagePlane::from_fn(rows, cols, |_, j| {
            let frac = if cols > 1 {
                j as f64 / (cols - 1) as f64
            } else {
                0.0
            };
            lo + span * frac
        }),
        DepthKind::Radial => {
            let ci = (rows - 1) as f64 / 2.0;
            let cj = (cols - 1) as f64 / 2.0;
            let max_dist = (ci * ci + cj * cj).sqrt();
            ImagePlane::from_fn(rows, cols, |i, j| {
                if max_dist == 0.0 {
                    lo
                } else {
                    let di = i as f64 - ci;
                    let dj = j as f64 - cj;
                    lo + span * (di * di + dj * dj).sqrt() / max_dist
                }
            })
        }
    };
    Ok(DepthMap { plane })
}

/// Applies the forward model: returns the hazy observation and the true
/// transmission `exp(-beta * depth)`.
pub fn synthesize_haze(
    clean: &ImagePlane,
    depth: &DepthMap,
    spec: &SynthSpec,
) -> Result<(ImagePlane, ImagePlane)> {
    spec.validate()?;
    clean.check_shape(depth.plane())?;
    let t_true = depth.plane().map(|d| (-spec.beta_scatter * d).exp());
    let hazy = clean.zip_map(&t_true, |j, t| t * j + (1.0 - t) * spec.a)?;
    Ok((hazy, t_true))
}

/// Root of the channel-summed mean squared difference:
/// `sqrt(sum_c sum_x (I - G)^2 / (channels * m * n))`.
pub fn mse(result: &[ImagePlane], truth: &[ImagePlane]) -> Result<f64> {
    if result.len() != truth.len() || result.is_empty() {
        return Err(Error::ChannelCount(result.len()));
    }
    let mut sum = 0.0;
    for (r, g) in result.iter().zip(truth) {
        r.check_shape(g)?;
        if !r.same_shape(&result[0]) {
            return Err(Error::ChannelShapes);
        }
        sum += r
            .as_slice()
            .iter()
            .zip(g.as_slice())
            .map(|(&a, &b)| (a - b) * (a - b))
            .sum::<f64>();
    }
    let denom = (result.len() * result[0].len()) as f64;
    Ok((sum / denom).sqrt())
}
