use super::SigmaSpec;
use crate::error::{invalid, Result};
use crate::noise::CovKernelSpec;
use crate::operators::Grid1D;

#[derive(Debug, Clone)]
pub enum NoiseKind {
    /// one scalar Brownian motion shared by all nodes
    SingleBm,
    /// white in time, spatial covariance `q(x, y)`
    QWiener(CovKernelSpec),
    /// space-time white noise, 1-D only
    SpaceTimeWhite,
}

impl NoiseKind {
    pub fn label(&self) -> &'static str {
        match self {
            NoiseKind::SingleBm => "single_bm",
            NoiseKind::QWiener(_) => "q_wiener",
            NoiseKind::SpaceTimeWhite => "space_time_white",
        }
    }
}

/// `du = kappa Delta u dt + lambda sigma(u) dW` on `(0, L)` with zero
/// Dirichlet data. `kappa` defaults to one; `kappa = 0` turns every node
/// into an independent scalar SDE.
#[derive(Debug, Clone)]
pub struct SpdeProblem {
    pub grid: Grid1D,
    pub noise: NoiseKind,
    pub lambda: f64,
    pub sigma: SigmaSpec,
    pub u0: Vec<f64>,
    pub diffusivity: f64,
}

impl SpdeProblem {
    pub fn new(grid: Grid1D, noise: NoiseKind, lambda: f64, sigma: SigmaSpec, u0: Vec<f64>) -> Result<Self> {
        if u0.len() != grid.len() {
            return Err(invalid(format!("u0 has {} nodes, grid has {}", u0.len(), grid.len())));
        }
        if u0.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(invalid("initial data must be finite and nonnegative"));
        }
        if !u0.iter().any(|v| *v > 0.0) {
            return Err(invalid("initial data vanishes identically"));
        }
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(invalid(format!("noise level must be >= 0, got {lambda}")));
        }
        if let NoiseKind::QWiener(spec) = &noise {
            spec.validate(&grid)?;
        }
        Ok(Self { grid, noise, lambda, sigma, u0, diffusivity: 1.0 })
    }

    pub fn with_diffusivity(mut self, kappa: f64) -> Result<Self> {
        if !(kappa >= 0.0 && kappa.is_finite()) {
            return Err(invalid(format!("diffusivity must be >= 0, got {kappa}")));
        }
        self.diffusivity = kappa;
        Ok(self)
    }

    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(invalid(format!("noise level must be >= 0, got {lambda}")));
        }
        let mut p = self.clone();
        p.lambda = lambda;
        Ok(p)
    }

    /// Scalar variance rate of the driver seen by a spatially constant
    /// profile: 1 for a single Brownian motion, `c` for a constant kernel.
    pub fn constant_noise_intensity(&self) -> Option<f64> {
        match &self.noise {
            NoiseKind::SingleBm => Some(1.0),
            NoiseKind::QWiener(spec) => spec.constant_value(),
            NoiseKind::SpaceTimeWhite => None,
        }
    }

    /// `1^T Q 1 / n^2`: variance rate of the driver averaged over the grid.
    /// Space-time white noise contributes `1 / (n dx)`.
    pub fn mean_noise_intensity(&self) -> f64 {
        let n = self.grid.len() as f64;
        match &self.noise {
            NoiseKind::SingleBm => 1.0,
            NoiseKind::QWiener(spec) => spec.matrix(&self.grid).iter().sum::<f64>() / (n * n),
            NoiseKind::SpaceTimeWhite => 1.0 / (n * self.grid.dx()),
        }
    }
}
