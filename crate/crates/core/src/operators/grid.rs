use crate::error::{invalid, Result};

/// Uniform interior grid on (0, L): nodes `x_i = i * dx`, `i = 1..=n`,
/// with `dx = L / (n + 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    length: f64,
    n: usize,
}

impl Grid1D {
    pub fn new(length: f64, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(invalid("grid needs at least one interior node"));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(invalid(format!("domain length must be positive, got {length}")));
        }
        Ok(Self { length, n })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dx(&self) -> f64 {
        self.length / (self.n + 1) as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        (i + 1) as f64 * self.dx()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.node(i)).collect()
    }

    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        (0..self.n).map(|i| f(self.node(i))).collect()
    }

    /// Rectangle-rule inner product `dx * sum(u * v)`.
    pub fn inner(&self, u: &[f64], v: &[f64]) -> f64 {
        self.dx() * u.iter().zip(v).map(|(a, b)| a * b).sum::<f64>()
    }

    pub fn norm(&self, u: &[f64]) -> f64 {
        self.inner(u, u).sqrt()
    }
}
