//! The containers the solvers work on: scalar image planes, dual variable
//! pairs and box bounds.

use crate::error::{Error, Result};

/// A rectangular grid of real intensities for one color channel, stored
/// row-major.
///
/// Observed images live in `[0, 255]`; log-domain fields are nonpositive.
/// Every value is finite: `new` rejects NaN/Inf and the numerical routines
/// preserve finiteness (the inner solver checks its iterates explicitly).
#[derive(Debug, Clone, PartialEq)]
pub struct ImagePlane {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl ImagePlane {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyPlane { rows, cols });
        }
        if data.len() != rows * cols {
            return Err(Error::BadLength {
                rows,
                cols,
                len: data.len(),
            });
        }
        if !data.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    /// All-zero plane. Panics on zero dimensions.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::constant(rows, cols, 0.0)
    }

    /// Constant plane. Panics on zero dimensions or a non-finite value.
    pub fn constant(rows: usize, cols: usize, value: f64) -> Self {
        assert!(rows > 0 && cols > 0, "plane dimensions must be positive");
        assert!(value.is_finite());
        Self {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }

    /// Builds a plane from a per-pixel closure `f(row, col)`.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        assert!(rows > 0 && cols > 0, "plane dimensions must be positive");
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false // dimensions are always positive
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.cols + j] = value;
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.rows == other.rows && self.cols == other.cols
    }

    pub(crate) fn check_shape(&self, other: &Self) -> Result<()> {
        if self.same_shape(other) {
            Ok(())
        } else {
            Err(Error::ShapeMismatch(
                self.rows, self.cols, other.rows, other.cols,
            ))
        }
    }

    /// Elementwise map. The closure must preserve finiteness.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Elementwise combination of two planes of the same shape.
    pub fn zip_map(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.check_shape(other)?;
        let data = self
            .data
            .iter()
            .zip(other.data.iter())
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    /// Unweighted inner product (grid spacing 1).
    pub fn dot(&self, other: &Self) -> f64 {
        debug_assert!(self.same_shape(other));
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(&a, &b)| a * b)
            .sum()
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.data.iter().map(|&v| v * v).sum::<f64>().sqrt()
    }

    pub fn min_value(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

/// The dual pair `(p, q)` attached to an `m x n` plane: `p` has shape
/// `(m-1) x n` and `q` has shape `m x (n-1)`. Either component is empty
/// for a single-row or single-column plane.
#[derive(Debug, Clone, PartialEq)]
pub struct DualField {
    rows: usize,
    cols: usize,
    p: Vec<f64>,
    q: Vec<f64>,
}

impl DualField {
    /// Zero dual field for an `rows x cols` plane. Panics on zero dimensions.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "plane dimensions must be positive");
        Self {
            rows,
            cols,
            p: vec![0.0; (rows - 1) * cols],
            q: vec![0.0; rows * (cols - 1)],
        }
    }

    /// Builds a dual field from raw component data (row-major), checking
    /// that both components are consistent with an `rows x cols` plane.
    pub fn from_components(rows: usize, cols: usize, p: Vec<f64>, q: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyPlane { rows, cols });
        }
        if p.len() != (rows - 1) * cols {
            return Err(Error::BadLength {
                rows: rows - 1,
                cols,
                len: p.len(),
            });
        }
        if q.len() != rows * (cols - 1) {
            return Err(Error::BadLength {
                rows,
                cols: cols - 1,
                len: q.len(),
            });
        }
        if !p.iter().chain(q.iter()).all(|v| v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { rows, cols, p, q })
    }

    /// Rows of the underlying plane (`m`, not the shape of `p`).
    #[inline]
    pub fn plane_rows(&self) -> usize {
        self.rows
    }

    /// Columns of the underlying plane.
    #[inline]
    pub fn plane_cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn p(&self, i: usize, j: usize) -> f64 {
        self.p[i * self.cols + j]
    }

    #[inline]
    pub fn q(&self, i: usize, j: usize) -> f64 {
        self.q[i * (self.cols - 1) + j]
    }

    #[inline]
    pub fn set_p(&mut self, i: usize, j: usize, value: f64) {
        self.p[i * self.cols + j] = value;
    }

    #[inline]
    pub fn set_q(&mut self, i: usize, j: usize, value: f64) {
        self.q[i * (self.cols - 1) + j] = value;
    }

    pub fn p_slice(&self) -> &[f64] {
        &self.p
    }

    pub fn q_slice(&self) -> &[f64] {
        &self.q
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.rows == other.rows && self.cols == other.cols
    }

    /// Elementwise combination of both components.
    pub fn zip_map(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        debug_assert!(self.same_shape(other));
        Self {
            rows: self.rows,
            cols: self.cols,
            p: self
                .p
                .iter()
                .zip(other.p.iter())
                .map(|(&a, &b)| f(a, b))
                .collect(),
            q: self
                .q
                .iter()
                .zip(other.q.iter())
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    /// Inner product over both components.
    pub fn dot(&self, other: &Self) -> f64 {
        debug_assert!(self.same_shape(other));
        let dp: f64 = self
            .p
            .iter()
            .zip(other.p.iter())
            .map(|(&a, &b)| a * b)
            .sum();
        let dq: f64 = self
            .q
            .iter()
            .zip(other.q.iter())
            .map(|(&a, &b)| a * b)
            .sum();
        dp + dq
    }

    /// Frobenius norm of the pair.
    pub fn norm(&self) -> f64 {
        self.p
            .iter()
            .chain(self.q.iter())
            .map(|&v| v * v)
            .sum::<f64>()
            .sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.p.iter().chain(self.q.iter()).all(|v| v.is_finite())
    }
}

/// The pixelwise feasible interval `[lower, 0]` of the primal fields.
#[derive(Debug, Clone)]
pub struct BoxBound {
    lower: ImagePlane,
}

impl BoxBound {
    /// `lower` must be nonpositive everywhere.
    pub fn new(lower: ImagePlane) -> Result<Self> {
        let max = lower.max_value();
        if max > 0.0 {
            return Err(Error::BoundAboveZero(max));
        }
        Ok(Self { lower })
    }

    pub fn lower(&self) -> &ImagePlane {
        &self.lower
    }
}
