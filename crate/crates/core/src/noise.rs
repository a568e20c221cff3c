//! Stochastic drivers: Brownian paths, discretized space-time white noise
//! and Q-Wiener increments with a prescribed covariance kernel.

use std::fmt;
use std::sync::Arc;

use crate::error::{invalid, Error, Result};
use crate::operators::Grid1D;
use crate::rng::{Gaussian, RngStream};

/// Jitter levels, relative to the largest diagonal entry. Level 0 is an
/// exact semidefinite factorization that zeroes numerically null pivots.
const JITTER_LEVELS: [f64; 4] = [0.0, 1e-12, 1e-10, 1e-8];
const NULL_PIVOT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct BrownianPath {
    pub dt: f64,
    /// `B_0 = 0, B_1, ..., B_N`
    pub values: Vec<f64>,
}

impl BrownianPath {
    pub fn terminal(&self) -> f64 {
        *self.values.last().unwrap()
    }

    pub fn increments(&self) -> impl Iterator<Item = f64> + '_ {
        self.values.windows(2).map(|w| w[1] - w[0])
    }
}

pub fn brownian_path(stream: RngStream, n_steps: usize, dt: f64) -> Result<BrownianPath> {
    if !(dt > 0.0) {
        return Err(invalid(format!("time step must be positive, got {dt}")));
    }
    let mut g = stream.generator();
    let sd = dt.sqrt();
    let mut values = Vec::with_capacity(n_steps + 1);
    let mut b = 0.0;
    values.push(b);
    for _ in 0..n_steps {
        b += sd * g.draw();
        values.push(b);
    }
    Ok(BrownianPath { dt, values })
}

/// Per-step, per-cell increments of space-time white noise, each
/// `N(0, dt/dx)`. Row `k` drives step `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct WhiteNoiseField {
    pub grid: Grid1D,
    pub dt: f64,
    pub n_steps: usize,
    cells: Vec<f64>,
}

impl WhiteNoiseField {
    pub fn row(&self, step: usize) -> &[f64] {
        let n = self.grid.len();
        &self.cells[step * n..(step + 1) * n]
    }

    pub fn cells(&self) -> &[f64] {
        &self.cells
    }
}

pub fn white_noise_field(grid: &Grid1D, n_steps: usize, dt: f64, stream: RngStream) -> Result<WhiteNoiseField> {
    if !(dt > 0.0) {
        return Err(invalid(format!("time step must be positive, got {dt}")));
    }
    let mut g = stream.generator();
    let n = grid.len();
    let mut cells = vec![0.0; n * n_steps];
    for row in cells.chunks_mut(n) {
        white_noise_row(&mut g, grid, dt, row);
    }
    Ok(WhiteNoiseField { grid: *grid, dt, n_steps, cells })
}

pub(crate) fn white_noise_row(g: &mut Gaussian, grid: &Grid1D, dt: f64, out: &mut [f64]) {
    let sd = (dt / grid.dx()).sqrt();
    for v in out {
        *v = sd * g.draw();
    }
}

#[derive(Clone)]
enum KernelKind {
    Constant(f64),
    ShiftedExponential { base: f64, amplitude: f64, corr_len: f64 },
    Custom(Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>),
}

/// Covariance kernel `q(x, y)` of a Q-Wiener process with declared envelopes
/// `q0 <= q(x, y)` and `q(x, x) <= q1`.
#[derive(Clone)]
pub struct CovKernelSpec {
    kind: KernelKind,
    pub q0: f64,
    pub q1: f64,
}

impl fmt::Debug for CovKernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &self.kind {
            KernelKind::Constant(c) => format!("Constant({c})"),
            KernelKind::ShiftedExponential { base, amplitude, corr_len } => {
                format!("ShiftedExponential({base}, {amplitude}, {corr_len})")
            }
            KernelKind::Custom(_) => "Custom".to_string(),
        };
        f.debug_struct("CovKernelSpec")
            .field("kind", &kind)
            .field("q0", &self.q0)
            .field("q1", &self.q1)
            .finish()
    }
}

impl CovKernelSpec {
    /// `q(x, y) = c`. Envelopes `q0 = q1 = c`.
    pub fn constant(c: f64) -> Self {
        Self { kind: KernelKind::Constant(c), q0: c, q1: c }
    }

    /// `q(x, y) = base + amplitude * exp(-|x - y| / corr_len)`.
    pub fn shifted_exponential(base: f64, amplitude: f64, corr_len: f64) -> Result<Self> {
        if base < 0.0 || amplitude < 0.0 || !(corr_len > 0.0) {
            return Err(invalid("shifted exponential kernel needs base, amplitude >= 0 and corr_len > 0"));
        }
        Ok(Self {
            kind: KernelKind::ShiftedExponential { base, amplitude, corr_len },
            q0: base,
            q1: base + amplitude,
        })
    }

    pub fn custom(q: impl Fn(f64, f64) -> f64 + Send + Sync + 'static, q0: f64, q1: f64) -> Self {
        Self { kind: KernelKind::Custom(Arc::new(q)), q0, q1 }
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        match &self.kind {
            KernelKind::Constant(c) => *c,
            KernelKind::ShiftedExponential { base, amplitude, corr_len } => {
                base + amplitude * (-(x - y).abs() / corr_len).exp()
            }
            KernelKind::Custom(q) => q(x, y),
        }
    }

    /// The value of a spatially constant kernel.
    pub fn constant_value(&self) -> Option<f64> {
        match self.kind {
            KernelKind::Constant(c) => Some(c),
            _ => None,
        }
    }

    pub fn matrix(&self, grid: &Grid1D) -> Vec<f64> {
        let x = grid.nodes();
        let n = x.len();
        let mut q = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                q[i * n + j] = self.eval(x[i], x[j]);
            }
        }
        q
    }

    /// Checks symmetry and the declared envelopes on the grid nodes.
    pub fn validate(&self, grid: &Grid1D) -> Result<()> {
        let q = self.matrix(grid);
        let n = grid.len();
        let tol = 1e-12 * q.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
        for i in 0..n {
            if q[i * n + i] > self.q1 + tol {
                return Err(invalid(format!("q(x,x) = {} exceeds q1 = {}", q[i * n + i], self.q1)));
            }
            for j in 0..n {
                if (q[i * n + j] - q[j * n + i]).abs() > tol {
                    return Err(invalid("covariance kernel is not symmetric on the grid"));
                }
                if q[i * n + j] < self.q0 - tol {
                    return Err(invalid(format!("q(x,y) = {} below q0 = {}", q[i * n + j], self.q0)));
                }
            }
        }
        Ok(())
    }
}

/// Lower-triangular `F` with `F F^T ~ Q`, `Q_ij = q(x_i, x_j)`.
#[derive(Debug, Clone)]
pub struct CovarianceFactor {
    pub grid: Grid1D,
    factor: Vec<f64>,
    /// jitter added to the diagonal, relative to `max_i Q_ii`
    pub jitter: f64,
    // unit latent direction maximizing the spatial sum of F z
    tilt_direction: Vec<f64>,
}

impl CovarianceFactor {
    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.factor[i * self.len() + j]
    }

    /// `F z`.
    pub fn apply(&self, z: &[f64], out: &mut [f64]) {
        let n = self.len();
        for (i, o) in out.iter_mut().enumerate().take(n) {
            let row = &self.factor[i * n..i * n + i + 1];
            *o = row.iter().zip(z).map(|(a, b)| a * b).sum();
        }
    }

    pub fn reconstruct(&self) -> Vec<f64> {
        let n = self.len();
        let mut q = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let v: f64 = (0..=j).map(|k| self.entry(i, k) * self.entry(j, k)).sum();
                q[i * n + j] = v;
                q[j * n + i] = v;
            }
        }
        q
    }

    pub fn tilt_direction(&self) -> &[f64] {
        &self.tilt_direction
    }
}

pub fn qwiener_factor(spec: &CovKernelSpec, grid: &Grid1D) -> Result<CovarianceFactor> {
    let q = spec.matrix(grid);
    let n = grid.len();
    for i in 0..n {
        for j in 0..i {
            let (a, b) = (q[i * n + j], q[j * n + i]);
            if (a - b).abs() > 1e-12 * a.abs().max(b.abs()).max(1.0) {
                return Err(invalid("covariance kernel is not symmetric on the grid"));
            }
        }
    }
    let scale = (0..n).map(|i| q[i * n + i].abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let mut last_row = 0;
    for &jitter in &JITTER_LEVELS {
        match cholesky(&q, n, jitter * scale, NULL_PIVOT_TOL * scale, jitter == 0.0) {
            Ok(factor) => {
                let tilt_direction = tilt_direction(&factor, n);
                return Ok(CovarianceFactor { grid: *grid, factor, jitter, tilt_direction });
            }
            Err(row) => last_row = row,
        }
    }
    Err(Error::NotPositiveSemidefinite { jitter: *JITTER_LEVELS.last().unwrap(), row: last_row })
}

fn cholesky(q: &[f64], n: usize, jitter: f64, null_tol: f64, allow_null: bool) -> std::result::Result<Vec<f64>, usize> {
    let mut l = vec![0.0; n * n];
    for j in 0..n {
        let mut d = q[j * n + j] + jitter;
        for k in 0..j {
            d -= l[j * n + k] * l[j * n + k];
        }
        if d > null_tol {
            let ljj = d.sqrt();
            l[j * n + j] = ljj;
            for i in j + 1..n {
                let mut s = q[i * n + j];
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k];
                }
                l[i * n + j] = s / ljj;
            }
        } else if allow_null && d.abs() <= null_tol {
            // null pivot: the remaining column must vanish as well
            for i in j + 1..n {
                let mut s = q[i * n + j];
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k];
                }
                if s.abs() > null_tol.sqrt() {
                    return Err(j);
                }
            }
        } else {
            return Err(j);
        }
    }
    Ok(l)
}

fn tilt_direction(l: &[f64], n: usize) -> Vec<f64> {
    // F^T 1
    let mut d = vec![0.0; n];
    for i in 0..n {
        for k in 0..=i {
            d[k] += l[i * n + k];
        }
    }
    let norm = d.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        d.iter_mut().for_each(|v| *v /= norm);
    }
    d
}

/// Increment `W(t + dt) - W(t)`: Gaussian with covariance `dt F F^T`.
pub fn qwiener_increment(factor: &CovarianceFactor, dt: f64, stream: RngStream) -> Result<Vec<f64>> {
    if !(dt > 0.0) {
        return Err(invalid(format!("time step must be positive, got {dt}")));
    }
    let mut g = stream.generator();
    let mut z = vec![0.0; factor.len()];
    let mut out = vec![0.0; factor.len()];
    qwiener_draw(factor, dt, &mut g, 0.0, &mut z, &mut out);
    Ok(out)
}

/// Draw into `out`, shifting the latent normals by `shift * d` along the tilt
/// direction `d`. Returns the shifted latent projection `d . z`.
pub(crate) fn qwiener_draw(
    factor: &CovarianceFactor,
    dt: f64,
    g: &mut Gaussian,
    shift: f64,
    z: &mut [f64],
    out: &mut [f64],
) -> f64 {
    g.fill(z);
    let mut proj = 0.0;
    for (zi, di) in z.iter_mut().zip(factor.tilt_direction()) {
        *zi += shift * di;
        proj += *zi * di;
    }
    factor.apply(z, out);
    let sd = dt.sqrt();
    out.iter_mut().for_each(|v| *v *= sd);
    proj
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_path_is_origin() {
        let p = brownian_path(RngStream::new(1, 0), 0, 0.1).unwrap();
        assert_eq!(p.values, vec![0.0]);
    }

    #[test]
    fn path_is_deterministic_per_stream() {
        let a = brownian_path(RngStream::new(9, 4), 100, 0.01).unwrap();
        let b = brownian_path(RngStream::new(9, 4), 100, 0.01).unwrap();
        assert_eq!(a, b);
        let c = brownian_path(RngStream::new(9, 5), 100, 0.01).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn terminal_variance_is_horizon() {
        let (n, dt, m) = (8, 0.125, 100_000u64);
        let t = n as f64 * dt;
        let vals: Vec<f64> = (0..m)
            .map(|i| brownian_path(RngStream::new(3, i), n, dt).unwrap().terminal().powi(2) / t)
            .collect();
        let mean = vals.iter().sum::<f64>() / m as f64;
        let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1) as f64;
        let se = (var / m as f64).sqrt();
        assert!((mean - 1.0).abs() < 3.0 * se, "mean {mean} se {se}");
    }

    #[test]
    fn white_noise_variance_and_independence() {
        let grid = Grid1D::new(1.0, 99).unwrap();
        let dt = 1e-3;
        let f = white_noise_field(&grid, 10_102, dt, RngStream::new(5, 0)).unwrap();
        let target = dt / grid.dx();
        let cells = f.cells();
        assert!(cells.len() >= 1_000_000);
        let var = cells.iter().map(|v| v * v).sum::<f64>() / cells.len() as f64;
        assert!((var / target - 1.0).abs() < 0.01, "var {var} target {target}");

        // neighbouring cells: E[xy] = 0, stderr target / sqrt(N)
        let rows = f.n_steps;
        let cross = (0..rows).map(|k| f.row(k)[10] * f.row(k)[11]).sum::<f64>() / rows as f64;
        assert!(cross.abs() < 3.0 * target / (rows as f64).sqrt());
    }

    #[test]
    fn white_noise_unit_scaling() {
        let grid = Grid1D::new(3.0, 2).unwrap();
        let f = white_noise_field(&grid, 50_000, 1.0, RngStream::new(1, 2)).unwrap();
        let var = f.cells().iter().map(|v| v * v).sum::<f64>() / f.cells().len() as f64;
        assert!((var - 1.0).abs() < 0.02);
    }

    #[test]
    fn constant_kernel_is_rank_one() {
        let grid = Grid1D::new(1.0, 16).unwrap();
        let fac = qwiener_factor(&CovKernelSpec::constant(1.0), &grid).unwrap();
        assert_eq!(fac.jitter, 0.0);
        for i in 0..16 {
            for j in 1..=i {
                assert_eq!(fac.entry(i, j), 0.0);
            }
        }
        let w = qwiener_increment(&fac, 0.01, RngStream::new(2, 7)).unwrap();
        assert!(w.iter().all(|v| *v == w[0]));
    }

    #[test]
    fn exponential_kernel_reconstructs() {
        let grid = Grid1D::new(1.0, 16).unwrap();
        let spec = CovKernelSpec::custom(|x, y| (-(x - y).abs()).exp(), 0.0, 1.0);
        let fac = qwiener_factor(&spec, &grid).unwrap();
        let q = spec.matrix(&grid);
        let r = fac.reconstruct();
        let err = q.iter().zip(&r).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-10, "err {err}");
    }

    #[test]
    fn negative_kernel_is_rejected() {
        let grid = Grid1D::new(1.0, 8).unwrap();
        let err = qwiener_factor(&CovKernelSpec::constant(-1.0), &grid).unwrap_err();
        assert!(matches!(err, Error::NotPositiveSemidefinite { .. }));
        assert!(err.to_string().contains("not positive semidefinite"));
    }

    #[test]
    fn asymmetric_kernel_is_rejected() {
        let grid = Grid1D::new(1.0, 4).unwrap();
        let spec = CovKernelSpec::custom(|x, y| 1.0 + x - 0.5 * y, 0.0, 2.0);
        assert!(qwiener_factor(&spec, &grid).is_err());
    }

    #[test]
    fn increment_covariance_matches_kernel() {
        let grid = Grid1D::new(1.0, 4).unwrap();
        let spec = CovKernelSpec::shifted_exponential(0.2, 0.8, 0.5).unwrap();
        let fac = qwiener_factor(&spec, &grid).unwrap();
        let dt = 0.04;
        let m = 100_000u64;
        let n = 4;
        let draws: Vec<Vec<f64>> = (0..m)
            .map(|i| qwiener_increment(&fac, dt, RngStream::new(17, i)).unwrap())
            .collect();
        let q = spec.matrix(&grid);
        for i in 0..n {
            for j in 0..n {
                let prods: Vec<f64> = draws.iter().map(|w| w[i] * w[j]).collect();
                let mean = prods.iter().sum::<f64>() / m as f64;
                let var = prods.iter().map(|p| (p - mean).powi(2)).sum::<f64>() / (m - 1) as f64;
                let se = (var / m as f64).sqrt();
                assert!((mean - dt * q[i * n + j]).abs() < 3.0 * se, "({i},{j}) {mean} vs {}", dt * q[i * n + j]);
            }
        }
        // spatial average variance bounded below by q0 dt
        let avg: Vec<f64> = draws.iter().map(|w| w.iter().sum::<f64>() / n as f64).collect();
        let v = avg.iter().map(|a| a * a).sum::<f64>() / m as f64;
        assert!(v >= spec.q0 * dt * (1.0 - 3.0 * (2.0 / m as f64).sqrt()));
    }

    #[test]
    fn increment_vanishes_with_dt() {
        let grid = Grid1D::new(1.0, 6).unwrap();
        let fac = qwiener_factor(&CovKernelSpec::constant(0.5), &grid).unwrap();
        let a = qwiener_increment(&fac, 1e-12, RngStream::new(1, 1)).unwrap();
        assert!(a.iter().all(|v| v.abs() < 1e-5));
        assert!(qwiener_increment(&fac, 0.0, RngStream::new(1, 1)).is_err());
    }

    #[test]
    fn envelope_validation() {
        let grid = Grid1D::new(1.0, 10).unwrap();
        let good = CovKernelSpec::shifted_exponential(0.5, 0.5, 0.3).unwrap();
        good.validate(&grid).unwrap();
        let lying = CovKernelSpec::custom(|x, y| 0.5 + 0.5 * (-(x - y).abs()).exp(), 0.8, 1.0);
        assert!(lying.validate(&grid).is_err());
    }
}
