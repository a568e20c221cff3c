//! Closed forms for the linear equation `du = Delta u dt + lambda u dB` and
//! the scalar geometric Brownian motion `dX = lambda X dB`.

use crate::error::{Error, Result};
use crate::operators::{heat_apply, EigenDecomposition};

/// `v(t) = exp(-lambda^2 t / 2) exp(t Delta_h) u0`, the solution of
/// `dv/dt = Delta_h v - (lambda^2/2) v`, `v(0) = u0`.
pub fn deterministic_v(decomp: &EigenDecomposition, u0: &[f64], lambda: f64, t: f64) -> Result<Vec<f64>> {
    let damp = (-0.5 * lambda * lambda * t).exp();
    let mut v = heat_apply(decomp, t, u0)?;
    v.iter_mut().for_each(|x| *x *= damp);
    Ok(v)
}

/// Exact solution of the linear equation given the driver value `B_t`:
/// `u(t) = exp(lambda B_t) v(t)`.
pub fn linear_exact_sample(
    decomp: &EigenDecomposition,
    u0: &[f64],
    lambda: f64,
    t: f64,
    b_t: f64,
) -> Result<Vec<f64>> {
    let exponent = lambda * b_t - 0.5 * lambda * lambda * t;
    if exponent > f64::MAX.ln() {
        return Err(Error::ExactSamplerOverflow { exponent: lambda * b_t });
    }
    let scale = exponent.exp();
    let mut u = heat_apply(decomp, t, u0)?;
    u.iter_mut().for_each(|x| *x *= scale);
    if u.iter().any(|x| !x.is_finite()) {
        return Err(Error::ExactSamplerOverflow { exponent: lambda * b_t });
    }
    Ok(u)
}

/// `X_t = x exp(-lambda^2 t / 2 + lambda B_t)`.
pub fn gbm_exact(x: f64, lambda: f64, t: f64, b_t: f64) -> f64 {
    x * (lambda * b_t - 0.5 * lambda * lambda * t).exp()
}

/// `E[X_t^p] = x^p exp(lambda^2 p (p - 1) t / 2)`.
pub fn gbm_moment(x: f64, lambda: f64, t: f64, p: f64) -> f64 {
    x.powf(p) * (0.5 * lambda * lambda * p * (p - 1.0) * t).exp()
}
