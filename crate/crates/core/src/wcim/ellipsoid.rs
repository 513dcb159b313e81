use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

/// Smallest Cholesky pivot accepted for a Gramian.
pub const PIVOT_TOLERANCE: f64 = 1e-10;

/// How the `[0, 1]` box interacts with a confidence ellipsoid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoxMode {
    /// Optimize over the ellipsoid alone. This is an optimistic relaxation
    /// of the box-constrained problem.
    #[default]
    EllipsoidOnly,
    /// Same value, but the reported argmax is clamped into `[0, 1]`.
    BoxClipped,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearMax {
    pub value: f64,
    pub argmax: Vec<f64>,
}

/// Confidence ellipsoid `{w′ : ‖w′ − ŵ‖_M ≤ ρ}` over the in-weights of one
/// node, with `ŵ = M⁻¹ b`.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeEllipsoid {
    node: usize,
    gramian: DMatrix<f64>,
    moment: DVector<f64>,
    inverse: DMatrix<f64>,
    estimate: DVector<f64>,
    rho: f64,
}

impl NodeEllipsoid {
    pub fn new(node: usize, gramian: DMatrix<f64>, moment: DVector<f64>, rho: f64) -> Result<Self> {
        let d = moment.len();
        if gramian.nrows() != d || gramian.ncols() != d {
            return Err(Error::DimensionMismatch {
                node,
                expected: d,
                actual: gramian.nrows(),
            });
        }
        if !(rho >= 0.0 && rho.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "radius {rho} of node {node} must be finite and nonnegative"
            )));
        }
        let asym = (&gramian - gramian.transpose()).abs().max();
        if asym > 1e-9 * gramian.abs().max().max(1.0) {
            return Err(Error::InvalidConfig(format!("Gramian of node {node} is not symmetric")));
        }
        let sym = (&gramian + gramian.transpose()) * 0.5;
        let inverse = spd_inverse(node, &sym)?;
        let estimate = &inverse * &moment;
        Ok(Self {
            node,
            gramian: sym,
            moment,
            inverse,
            estimate,
            rho,
        })
    }

    /// `M = I`, `b = 0`.
    pub fn identity(node: usize, dim: usize, rho: f64) -> Self {
        Self {
            node,
            gramian: DMatrix::identity(dim, dim),
            moment: DVector::zeros(dim),
            inverse: DMatrix::identity(dim, dim),
            estimate: DVector::zeros(dim),
            rho,
        }
    }

    /// Builds from an inverse maintained elsewhere (rank-1 updates).
    pub(crate) fn from_cached(node: usize, gramian: DMatrix<f64>, moment: DVector<f64>, inverse: DMatrix<f64>, rho: f64) -> Self {
        let estimate = &inverse * &moment;
        Self {
            node,
            gramian,
            moment,
            inverse,
            estimate,
            rho,
        }
    }

    pub fn node(&self) -> usize {
        self.node
    }

    pub fn dim(&self) -> usize {
        self.moment.len()
    }

    pub fn gramian(&self) -> &DMatrix<f64> {
        &self.gramian
    }

    pub fn moment(&self) -> &DVector<f64> {
        &self.moment
    }

    pub fn inverse(&self) -> &DMatrix<f64> {
        &self.inverse
    }

    pub fn estimate(&self) -> &DVector<f64> {
        &self.estimate
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn with_rho(mut self, rho: f64) -> Self {
        self.rho = rho;
        self
    }

    /// Replaces the center while keeping the shape: `b ← M ŵ`.
    pub fn with_estimate(mut self, estimate: &[f64]) -> Self {
        self.estimate = DVector::from_column_slice(estimate);
        self.moment = &self.gramian * &self.estimate;
        self
    }

    /// `‖w − ŵ‖_M`.
    pub fn distance(&self, w: &[f64]) -> f64 {
        let d = DVector::from_column_slice(w) - &self.estimate;
        d.dot(&(&self.gramian * &d)).max(0.0).sqrt()
    }

    pub fn contains(&self, w: &[f64], mode: BoxMode) -> bool {
        let inside = self.distance(w) <= self.rho * (1.0 + 1e-12) + 1e-12;
        match mode {
            BoxMode::EllipsoidOnly => inside,
            BoxMode::BoxClipped => inside && w.iter().all(|x| (0.0..=1.0).contains(x)),
        }
    }

    /// Half-widths of the axis-aligned bounding box: `ρ √(M⁻¹)ᵢᵢ`.
    pub fn half_widths(&self) -> Vec<f64> {
        (0..self.dim())
            .map(|i| self.rho * self.inverse[(i, i)].max(0.0).sqrt())
            .collect()
    }

    /// `max_{w′} cᵀw′` over the ellipsoid, in closed form:
    /// `cᵀŵ + ρ √(cᵀM⁻¹c)`, attained at `ŵ + ρ M⁻¹c / ‖c‖_{M⁻¹}`.
    pub fn max_linear(&self, c: &[f64], mode: BoxMode) -> LinearMax {
        assert_eq!(c.len(), self.dim(), "coefficient length must match the ellipsoid");
        let c = DVector::from_column_slice(c);
        let mc = &self.inverse * &c;
        let norm = c.dot(&mc).max(0.0).sqrt();
        let mut value = c.dot(&self.estimate);
        let mut argmax = self.estimate.clone();
        if norm > 0.0 {
            value += self.rho * norm;
            argmax += mc * (self.rho / norm);
        }
        let mut argmax: Vec<f64> = argmax.iter().copied().collect();
        if mode == BoxMode::BoxClipped {
            argmax.iter_mut().for_each(|x| *x = x.clamp(0.0, 1.0));
        }
        LinearMax { value, argmax }
    }
}

/// Inverse of a symmetric positive-definite matrix via Cholesky, rejecting
/// pivots below [`PIVOT_TOLERANCE`].
pub fn spd_inverse(node: usize, m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if m.nrows() == 0 {
        return Ok(m.clone());
    }
    let chol = m.clone().cholesky().ok_or(Error::SingularGramian { node, pivot: 0.0 })?;
    let pivot = chol.l_dirty().diagonal().iter().map(|x| x * x).fold(f64::INFINITY, f64::min);
    if pivot < PIVOT_TOLERANCE {
        return Err(Error::SingularGramian { node, pivot });
    }
    Ok(chol.inverse())
}
