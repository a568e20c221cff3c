use super::Grid1D;
use crate::error::{invalid, Result};

/// Symmetric tridiagonal matrix stored by diagonals. `off` holds the
/// `n - 1` sub/super-diagonal entries.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagOperator {
    pub main: Vec<f64>,
    pub off: Vec<f64>,
}

/// 3-point Dirichlet Laplacian: main `-2/dx^2`, off `1/dx^2`.
pub fn laplacian_dirichlet(grid: &Grid1D) -> TridiagOperator {
    let h2 = grid.dx() * grid.dx();
    let n = grid.len();
    TridiagOperator {
        main: vec![-2.0 / h2; n],
        off: vec![1.0 / h2; n - 1],
    }
}

impl TridiagOperator {
    pub fn len(&self) -> usize {
        self.main.len()
    }

    pub fn is_empty(&self) -> bool {
        self.main.is_empty()
    }

    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        let n = self.len();
        assert_eq!(u.len(), n);
        let mut out = vec![0.0; n];
        for i in 0..n {
            let mut acc = self.main[i] * u[i];
            if i > 0 {
                acc += self.off[i - 1] * u[i - 1];
            }
            if i + 1 < n {
                acc += self.off[i] * u[i + 1];
            }
            out[i] = acc;
        }
        out
    }

    /// Factor `shift * I + scale * self` for repeated solves.
    pub fn factor_shifted(&self, shift: f64, scale: f64) -> Result<ThomasFactor> {
        let main: Vec<f64> = self.main.iter().map(|d| shift + scale * d).collect();
        let off: Vec<f64> = self.off.iter().map(|e| scale * e).collect();
        ThomasFactor::new(&main, &off)
    }
}

/// LU factors of a symmetric tridiagonal matrix (Thomas algorithm).
#[derive(Debug, Clone)]
pub struct ThomasFactor {
    // inverse pivots and multipliers of the forward sweep
    inv_pivot: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl ThomasFactor {
    pub fn new(main: &[f64], off: &[f64]) -> Result<Self> {
        let n = main.len();
        if n == 0 || off.len() + 1 != n {
            return Err(invalid("tridiagonal shape mismatch"));
        }
        let mut inv_pivot = vec![0.0; n];
        let mut lower = vec![0.0; n.saturating_sub(1)];
        let mut pivot = main[0];
        for i in 0..n {
            if i > 0 {
                lower[i - 1] = off[i - 1] / pivot;
                pivot = main[i] - lower[i - 1] * off[i - 1];
            }
            if pivot.abs() < f64::MIN_POSITIVE || !pivot.is_finite() {
                return Err(invalid(format!("singular tridiagonal pivot at row {i}")));
            }
            inv_pivot[i] = 1.0 / pivot;
        }
        Ok(Self { inv_pivot, lower, upper: off.to_vec() })
    }

    /// Solve in place.
    pub fn solve(&self, rhs: &mut [f64]) {
        let n = self.inv_pivot.len();
        debug_assert_eq!(rhs.len(), n);
        for i in 1..n {
            rhs[i] -= self.lower[i - 1] * rhs[i - 1];
        }
        rhs[n - 1] *= self.inv_pivot[n - 1];
        for i in (0..n - 1).rev() {
            rhs[i] = (rhs[i] - self.upper[i] * rhs[i + 1]) * self.inv_pivot[i];
        }
    }
}
