use crate::error::{invalid, Result};
use crate::operators::Grid1D;

/// `sqrt(dx * sum u^2)`.
pub fn l2_energy(u: &[f64], grid: &Grid1D) -> f64 {
    grid.norm(u)
}

/// `(dx * sum |u|^p)^{1/p}`.
pub fn lp_energy(u: &[f64], grid: &Grid1D, p: f64) -> Result<f64> {
    Ok((log_lp_moment(u, grid, p)? / p).exp())
}

/// `log(dx * sum |u|^p)`, scaled by `max |u|` so large fields do not
/// overflow. Returns `-inf` for `u = 0`.
pub fn log_lp_moment(u: &[f64], grid: &Grid1D, p: f64) -> Result<f64> {
    if !(p > 0.0) {
        return Err(invalid(format!("moment order must be positive, got {p}")));
    }
    let m = u.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    if m == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    let s: f64 = u.iter().map(|v| (v.abs() / m).powf(p)).sum();
    Ok(grid.dx().ln() + p * m.ln() + s.ln())
}
