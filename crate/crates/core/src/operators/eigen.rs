//! Symmetric tridiagonal eigensolver (implicit QL with Wilkinson shifts)
//! and the principal Dirichlet eigenpair.

use super::{Grid1D, TridiagOperator};
use crate::error::{invalid, Error, Result};

const MAX_SWEEPS: usize = 60;

/// Spectrum of `-op`, ascending, with eigenvectors orthonormal in the
/// `dx`-weighted inner product.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    grid: Grid1D,
    values: Vec<f64>,
    // row k holds eigenvector k
    vectors: Vec<f64>,
}

impl EigenDecomposition {
    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, k: usize) -> f64 {
        self.values[k]
    }

    pub fn vector(&self, k: usize) -> &[f64] {
        let n = self.len();
        &self.vectors[k * n..(k + 1) * n]
    }

    /// Coefficients `<u, e_k>` in the grid inner product.
    pub fn coefficients(&self, u: &[f64]) -> Vec<f64> {
        (0..self.len()).map(|k| self.grid.inner(u, self.vector(k))).collect()
    }

    /// `sum_k f(mu_k) c_k e_k` for coefficients `c`.
    pub fn synthesize(&self, coeffs: &[f64], f: impl Fn(f64) -> f64) -> Vec<f64> {
        let n = self.len();
        let mut out = vec![0.0; n];
        for (k, &c) in coeffs.iter().enumerate() {
            let a = f(self.values[k]) * c;
            if a == 0.0 {
                continue;
            }
            for (o, v) in out.iter_mut().zip(self.vector(k)) {
                *o += a * v;
            }
        }
        out
    }

    /// Max deviation of the Gram matrix from the identity.
    pub fn orthonormality_residual(&self) -> f64 {
        let n = self.len();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                let g = self.grid.inner(self.vector(i), self.vector(j));
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g - target).abs());
            }
        }
        worst
    }
}

/// Full eigendecomposition of `-op` for a symmetric tridiagonal `op`
/// discretized on `grid`.
pub fn eigenpairs(op: &TridiagOperator, grid: &Grid1D) -> Result<EigenDecomposition> {
    let n = op.len();
    if n != grid.len() {
        return Err(invalid("operator and grid sizes differ"));
    }
    let mut d: Vec<f64> = op.main.iter().map(|v| -v).collect();
    // e[i] couples i and i+1; e[n-1] is workspace
    let mut e: Vec<f64> = op.off.iter().map(|v| -v).collect();
    e.push(0.0);
    let mut z = vec![0.0; n * n];
    for i in 0..n {
        z[i * n + i] = 1.0;
    }
    implicit_ql(&mut d, &mut e, &mut z)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let scale = 1.0 / grid.dx().sqrt();
    let mut values = Vec::with_capacity(n);
    let mut vectors = Vec::with_capacity(n * n);
    for &k in &order {
        values.push(d[k]);
        vectors.extend(z[k * n..(k + 1) * n].iter().map(|v| v * scale));
    }
    Ok(EigenDecomposition { grid: *grid, values, vectors })
}

fn implicit_ql(d: &mut [f64], e: &mut [f64], z: &mut [f64]) -> Result<()> {
    let n = d.len();
    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > MAX_SWEEPS {
                return Err(Error::EigenConvergence { index: l, iterations: sweeps });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                let (lo, hi) = z.split_at_mut((i + 1) * n);
                let row_i = &mut lo[i * n..];
                let row_j = &mut hi[..n];
                for (a, b) in row_i.iter_mut().zip(row_j.iter_mut()) {
                    let f = *b;
                    *b = s * *a + c * f;
                    *a = c * *a - s * f;
                }
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Smallest eigenvalue and its eigenfunction, positive and scaled to unit
/// integral.
#[derive(Debug, Clone)]
pub struct PrincipalEigenpair {
    pub eigenvalue: f64,
    pub phi: Vec<f64>,
}

impl PrincipalEigenpair {
    /// `dx * sum(u * phi)`.
    pub fn project(&self, grid: &Grid1D, u: &[f64]) -> f64 {
        grid.inner(u, &self.phi)
    }

    pub fn sup_norm(&self) -> f64 {
        self.phi.iter().cloned().fold(0.0, f64::max)
    }
}

pub fn principal_eigenpair(decomp: &EigenDecomposition) -> Result<PrincipalEigenpair> {
    let grid = decomp.grid();
    let v = decomp.vector(0);
    let sign = if v.iter().sum::<f64>() < 0.0 { -1.0 } else { 1.0 };
    if let Some(node) = v.iter().position(|x| sign * x <= 0.0) {
        return Err(Error::EigenvectorSign { node });
    }
    let mass = sign * grid.dx() * v.iter().sum::<f64>();
    Ok(PrincipalEigenpair {
        eigenvalue: decomp.value(0),
        phi: v.iter().map(|x| sign * x / mass).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::laplacian_dirichlet;
    use std::f64::consts::PI;

    fn analytic(grid: &Grid1D, k: usize) -> f64 {
        let h = grid.dx();
        2.0 / (h * h) * (1.0 - (k as f64 * PI * h / grid.length()).cos())
    }

    #[test]
    fn matches_analytic_fd_spectrum() {
        for (len, n) in [(1.0, 1), (1.0, 2), (1.0, 17), (3.0, 100), (1.0, 511)] {
            let g = Grid1D::new(len, n).unwrap();
            let dec = eigenpairs(&laplacian_dirichlet(&g), &g).unwrap();
            for k in 0..n {
                let exact = analytic(&g, k + 1);
                let rel = (dec.value(k) - exact).abs() / exact;
                assert!(rel < 1e-8, "n={n} k={k} rel={rel}");
            }
            assert!(dec.values().windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn principal_value_approaches_pi_squared() {
        let g = Grid1D::new(1.0, 511).unwrap();
        let dec = eigenpairs(&laplacian_dirichlet(&g), &g).unwrap();
        assert!((dec.value(0) - PI * PI).abs() < 1e-3);
    }

    #[test]
    fn orthonormal_in_weighted_product() {
        let g = Grid1D::new(2.0, 64).unwrap();
        let dec = eigenpairs(&laplacian_dirichlet(&g), &g).unwrap();
        assert!(dec.orthonormality_residual() < 1e-10);
    }

    #[test]
    fn principal_pair_positive_unit_integral() {
        let g = Grid1D::new(1.0, 127).unwrap();
        let dec = eigenpairs(&laplacian_dirichlet(&g), &g).unwrap();
        let pair = principal_eigenpair(&dec).unwrap();
        assert!(pair.phi.iter().all(|&v| v > 0.0));
        assert!((g.dx() * pair.phi.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        // pi/2 sin(pi x) integrates to one on (0, 1); the rectangle rule
        // of sin has relative error O(dx^2).
        let err = g
            .nodes()
            .iter()
            .zip(&pair.phi)
            .map(|(x, p)| (p - 0.5 * PI * (PI * x).sin()).abs())
            .fold(0.0, f64::max);
        assert!(err < 2.0 * g.dx() * g.dx(), "err {err}");
    }

    #[test]
    fn general_symmetric_tridiagonal() {
        // Random-ish symmetric matrix checked through A v = mu v.
        let n = 12;
        let op = TridiagOperator {
            main: (0..n).map(|i| -((i * 7 % 5) as f64) - 1.0).collect(),
            off: (0..n - 1).map(|i| 0.3 + (i % 3) as f64).collect(),
        };
        let g = Grid1D::new((n + 1) as f64, n).unwrap();
        let dec = eigenpairs(&op, &g).unwrap();
        for k in 0..n {
            let v = dec.vector(k);
            let av = op.apply(v);
            for (a, b) in av.iter().zip(v) {
                assert!((a + dec.value(k) * b).abs() < 1e-10);
            }
        }
    }
}
