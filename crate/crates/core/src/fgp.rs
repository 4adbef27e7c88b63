//! Fast gradient projection solver for one box-constrained TV subproblem
//!
//! ```text
//! minimize  mu * TV(x) + ||x - b||^2   subject to  lower <= x <= 0
//! ```
//!
//! solved on the dual side by projected gradient ascent with Nesterov
//! momentum, following the scheme of Beck & Teboulle (2009) for constrained
//! TV denoising. Their recursion targets `2w * TV(x) + ||x - b||^2`: the
//! primal iterate is `P_C(b - w * div d)` and the dual step size `1/(8w)`,
//! where 8 bounds the operator norm of the discrete Laplacian. Passing
//! `w = mu/2` therefore minimizes the objective above.

use crate::error::{Error, Result};
use crate::ops::{divergence, grad, project_ball, project_box, tv};
use crate::plane::{BoxBound, DualField, ImagePlane};

/// One TV subproblem: data term `b`, regularization weight `mu` and the
/// feasible box. `bound` is `None` only in the diagnostic mode that runs
/// the iteration without any feasibility clamp.
#[derive(Debug, Clone)]
pub struct FgpProblem {
    b: ImagePlane,
    mu: f64,
    bound: Option<BoxBound>,
}

impl FgpProblem {
    pub fn new(b: ImagePlane, mu: f64, bound: BoxBound) -> Result<Self> {
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::Config(format!(
                "regularization weight must be positive, got {mu}"
            )));
        }
        b.check_shape(bound.lower())?;
        Ok(Self {
            b,
            mu,
            bound: Some(bound),
        })
    }

    /// Diagnostic variant with the box projection disabled.
    pub fn unconstrained(b: ImagePlane, mu: f64) -> Result<Self> {
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::Config(format!(
                "regularization weight must be positive, got {mu}"
            )));
        }
        Ok(Self { b, mu, bound: None })
    }

    pub fn b(&self) -> &ImagePlane {
        &self.b
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn bound(&self) -> Option<&BoxBound> {
        self.bound.as_ref()
    }

    /// The primal point induced by a dual iterate: `P_C(b - w * div d)`.
    fn primal(&self, d: &DualField, w: f64) -> Result<ImagePlane> {
        let div = divergence(d);
        let shifted = self.b.zip_map(&div, |bv, dv| bv - w * dv)?;
        match &self.bound {
            Some(bound) => project_box(&shifted, bound),
            None => Ok(shifted),
        }
    }
}

/// Iteration state of the accelerated dual ascent.
#[derive(Debug, Clone)]
pub struct FgpState {
    d_prev: DualField,
    d_momentum: DualField,
    t_k: f64,
    iteration: usize,
}

impl FgpState {
    fn new(rows: usize, cols: usize) -> Self {
        Self {
            d_prev: DualField::zeros(rows, cols),
            d_momentum: DualField::zeros(rows, cols),
            t_k: 1.0,
            iteration: 0,
        }
    }

    pub fn t_k(&self) -> f64 {
        self.t_k
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }
}

/// Outcome of a solve: the box-projected solution and how the dual
/// iteration stopped.
#[derive(Debug, Clone, PartialEq)]
pub struct FgpReport {
    pub solution: ImagePlane,
    pub iterations_used: usize,
    /// Relative Frobenius change of the dual pair at the last iteration.
    pub final_dual_change: f64,
}

/// Momentum scalar recurrence `t_{k+1} = (1 + sqrt(1 + 4 t_k^2)) / 2`.
fn next_t(t: f64) -> f64 {
    (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0
}

/// Runs the dual iteration from zero duals until the relative dual change
/// drops to `dual_tol` or `max_iter` iterations are spent, then returns
/// the projected primal solution.
pub fn fgp_solve(prob: &FgpProblem, max_iter: usize, dual_tol: f64) -> Result<FgpReport> {
    if max_iter == 0 {
        return Err(Error::Config("max_iter must be at least 1".into()));
    }
    if dual_tol <= 0.0 || dual_tol.is_nan() {
        return Err(Error::Config(format!(
            "dual tolerance must be positive, got {dual_tol}"
        )));
    }
    let (m, n) = (prob.b.rows(), prob.b.cols());
    let w = prob.mu / 2.0;
    let inv_step = 1.0 / (8.0 * w);

    let mut state = FgpState::new(m, n);
    let mut change = 0.0;

    for iter in 1..=max_iter {
        let x = prob.primal(&state.d_momentum, w)?;
        if !x.is_finite() {
            return Err(Error::NonFiniteAtIteration(iter));
        }
        let ascent = state.d_momentum.zip_map(&grad(&x), |d, g| d + inv_step * g);
        let d_new = project_ball(&ascent);
        if !d_new.is_finite() {
            return Err(Error::NonFiniteAtIteration(iter));
        }

        let t_next = next_t(state.t_k);
        let coef = (state.t_k - 1.0) / t_next;
        state.d_momentum = d_new.zip_map(&state.d_prev, |new, old| new + coef * (new - old));

        let diff = d_new.zip_map(&state.d_prev, |a, b| a - b).norm();
        let denom = d_new.norm();
        change = if denom > 0.0 { diff / denom } else { diff };

        state.d_prev = d_new;
        state.t_k = t_next;
        state.iteration = iter;

        if change <= dual_tol {
            break;
        }
    }

    let solution = prob.primal(&state.d_prev, w)?;
    if !solution.is_finite() {
        return Err(Error::NonFiniteAtIteration(state.iteration));
    }
    Ok(FgpReport {
        solution,
        iterations_used: state.iteration,
        final_dual_change: change,
    })
}

/// The subproblem objective `mu * tv(x) + sum((x - b)^2)`.
pub fn subproblem_objective(x: &ImagePlane, prob: &FgpProblem) -> Result<f64> {
    x.check_shape(&prob.b)?;
    let fidelity: f64 = x
        .as_slice()
        .iter()
        .zip(prob.b.as_slice())
        .map(|(&xv, &bv)| (xv - bv) * (xv - bv))
        .sum();
    Ok(prob.mu * tv(x) + fidelity)
}
