//! Discrete differential operators, feasible-set projections and the energy
//! evaluators shared by the solvers.
//!
//! `grad` is the forward-difference gradient and `divergence` its exact
//! adjoint under the unweighted pixel inner product, so
//! `<divergence(d), x> = <d, grad(x)>` for every plane `x` and dual field
//! `d`. The dual ascent in the inner solver depends on this identity.

use crate::error::Result;
use crate::plane::{BoxBound, DualField, ImagePlane};

/// Forward differences: `p[i][j] = r[i][j] - r[i+1][j]`,
/// `q[i][j] = r[i][j] - r[i][j+1]`. A single-row or single-column plane
/// yields an empty component.
pub fn grad(r: &ImagePlane) -> DualField {
    let (m, n) = (r.rows(), r.cols());
    let mut d = DualField::zeros(m, n);
    for i in 0..m - 1 {
        for j in 0..n {
            d.set_p(i, j, r.get(i, j) - r.get(i + 1, j));
        }
    }
    for i in 0..m {
        for j in 0..n - 1 {
            d.set_q(i, j, r.get(i, j) - r.get(i, j + 1));
        }
    }
    d
}

/// Adjoint of [`grad`]:
/// `out[i][j] = p[i][j] + q[i][j] - p[i-1][j] - q[i][j-1]`, with
/// out-of-range terms dropped.
pub fn divergence(d: &DualField) -> ImagePlane {
    let (m, n) = (d.plane_rows(), d.plane_cols());
    ImagePlane::from_fn(m, n, |i, j| {
        let mut v = 0.0;
        if i < m - 1 {
            v += d.p(i, j);
        }
        if i > 0 {
            v -= d.p(i - 1, j);
        }
        if j < n - 1 {
            v += d.q(i, j);
        }
        if j > 0 {
            v -= d.q(i, j - 1);
        }
        v
    })
}

/// Pixelwise projection onto `[lower, 0]`: `min(max(lower, r), 0)`.
pub fn project_box(r: &ImagePlane, bound: &BoxBound) -> Result<ImagePlane> {
    r.zip_map(bound.lower(), |v, lo| v.max(lo).min(0.0))
}

/// Projection onto the dual feasible set: pairs where both components
/// exist are jointly normalized onto the unit disc, the trailing column of
/// `p` and trailing row of `q` are clamped componentwise to `[-1, 1]`.
/// Points already feasible are returned unchanged.
pub fn project_ball(d: &DualField) -> DualField {
    let (m, n) = (d.plane_rows(), d.plane_cols());
    let mut out = d.clone();
    for i in 0..m.saturating_sub(1) {
        for j in 0..n.saturating_sub(1) {
            let pv = d.p(i, j);
            let qv = d.q(i, j);
            let norm = (pv * pv + qv * qv).sqrt();
            if norm > 1.0 {
                out.set_p(i, j, pv / norm);
                out.set_q(i, j, qv / norm);
            }
        }
    }
    for i in 0..m.saturating_sub(1) {
        let v = d.p(i, n - 1);
        if v.abs() > 1.0 {
            out.set_p(i, n - 1, v.signum());
        }
    }
    for j in 0..n.saturating_sub(1) {
        let v = d.q(m - 1, j);
        if v.abs() > 1.0 {
            out.set_q(m - 1, j, v.signum());
        }
    }
    out
}

/// Isotropic total variation matched to the dual set: the joint magnitude
/// where both differences exist, absolute values on the trailing column of
/// `p` and trailing row of `q`.
pub fn tv(r: &ImagePlane) -> f64 {
    let (m, n) = (r.rows(), r.cols());
    let d = grad(r);
    let mut sum = 0.0;
    for i in 0..m.saturating_sub(1) {
        for j in 0..n.saturating_sub(1) {
            let pv = d.p(i, j);
            let qv = d.q(i, j);
            sum += (pv * pv + qv * qv).sqrt();
        }
    }
    for i in 0..m.saturating_sub(1) {
        sum += d.p(i, n - 1).abs();
    }
    for j in 0..n.saturating_sub(1) {
        sum += d.q(m - 1, j).abs();
    }
    sum
}

/// Total energy of the decomposition:
/// `alpha * tv(lt) + sum((lt + lr - li)^2) + beta * tv(lr) + lambda * sum(lr^2)`
/// where `lt` is the log-transmission field, `lr` the log-reflection field
/// and `li` the log-domain image.
pub fn energy_total(
    log_transmission: &ImagePlane,
    log_reflection: &ImagePlane,
    log_image: &ImagePlane,
    alpha: f64,
    beta: f64,
    lambda: f64,
) -> Result<f64> {
    log_transmission.check_shape(log_reflection)?;
    log_transmission.check_shape(log_image)?;
    let fidelity: f64 = log_transmission
        .as_slice()
        .iter()
        .zip(log_reflection.as_slice())
        .zip(log_image.as_slice())
        .map(|((&t, &r), &i)| {
            let e = t + r - i;
            e * e
        })
        .sum();
    let reflection_sq: f64 = log_reflection.as_slice().iter().map(|&v| v * v).sum();
    Ok(
        alpha * tv(log_transmission)
            + fidelity
            + beta * tv(log_reflection)
            + lambda * reflection_sq,
    )
}
