//! `f(t) = g(t) + k int_0^t (t - s)^{beta - 1} f(s) ds` by product
//! integration: the kernel is integrated exactly on each panel and `f` is
//! held at the panel's left endpoint.

use std::fmt;
use std::sync::Arc;

use statrs::function::gamma::{gamma, gamma_ur};

use crate::error::{invalid, Error, Result};

/// Forcing term `g >= 0`.
#[derive(Clone)]
pub enum Forcing {
    Constant(f64),
    /// `scale * t^exponent`, `exponent > -1`; the value at `t = 0` is
    /// replaced by the mean over the first panel
    PowerLaw { scale: f64, exponent: f64 },
    /// values on the solver grid, `values[m] = g(m dt)`
    Tabulated { dt: f64, values: Vec<f64> },
    Function(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for Forcing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Forcing::Constant(c) => write!(f, "Constant({c})"),
            Forcing::PowerLaw { scale, exponent } => write!(f, "PowerLaw({scale} t^{exponent})"),
            Forcing::Tabulated { dt, values } => write!(f, "Tabulated(dt = {dt}, {} values)", values.len()),
            Forcing::Function(_) => write!(f, "Function"),
        }
    }
}

impl Forcing {
    pub fn function(g: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Forcing::Function(Arc::new(g))
    }

    /// `g` on `m dt`, `m = 0..=n`.
    fn sample(&self, dt: f64, n: usize) -> Result<Vec<f64>> {
        let values: Vec<f64> = match self {
            Forcing::Constant(c) => vec![*c; n + 1],
            Forcing::PowerLaw { scale, exponent } => {
                if !(*exponent > -1.0) {
                    return Err(invalid(format!("power-law forcing needs exponent > -1, got {exponent}")));
                }
                (0..=n)
                    .map(|m| {
                        if m == 0 {
                            scale * dt.powf(*exponent) / (1.0 + exponent)
                        } else {
                            scale * (m as f64 * dt).powf(*exponent)
                        }
                    })
                    .collect()
            }
            Forcing::Tabulated { dt: tdt, values } => {
                if (tdt - dt).abs() > 1e-12 * dt || values.len() < n + 1 {
                    return Err(invalid("tabulated forcing does not match the solver grid"));
                }
                values[..=n].to_vec()
            }
            Forcing::Function(g) => (0..=n)
                .map(|m| {
                    let v = g(m as f64 * dt);
                    if m == 0 && !v.is_finite() {
                        g(0.5 * dt)
                    } else {
                        v
                    }
                })
                .collect(),
        };
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(invalid("forcing must be finite and nonnegative on the grid"));
        }
        Ok(values)
    }
}

#[derive(Debug, Clone)]
pub struct RenewalProblem {
    pub forcing: Forcing,
    /// gain `k >= 0`
    pub gain: f64,
    /// singularity exponent, in `(0, 1]`
    pub beta: f64,
    pub horizon: f64,
    pub steps: usize,
}

impl RenewalProblem {
    pub fn new(forcing: Forcing, gain: f64, beta: f64, horizon: f64, steps: usize) -> Result<Self> {
        let p = Self { forcing, gain, beta, horizon, steps };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0 && self.beta <= 1.0) {
            return Err(invalid(format!("beta must lie in (0, 1], got {}", self.beta)));
        }
        if !(self.gain >= 0.0 && self.gain.is_finite()) {
            return Err(invalid(format!("gain must be >= 0, got {}", self.gain)));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(invalid(format!("horizon must be positive, got {}", self.horizon)));
        }
        if self.steps < 2 {
            return Err(invalid("renewal solver needs at least two steps"));
        }
        Ok(())
    }

    pub fn dt(&self) -> f64 {
        self.horizon / self.steps as f64
    }

    /// `t_m = m dt`, `m = 0..=steps`.
    pub fn times(&self) -> Vec<f64> {
        let dt = self.dt();
        (0..=self.steps).map(|m| m as f64 * dt).collect()
    }
}

/// `f` on `t_m = m dt`, `m = 0..=steps`.
pub fn volterra_solve(prob: &RenewalProblem) -> Result<Vec<f64>> {
    prob.validate()?;
    let (n, dt, beta) = (prob.steps, prob.dt(), prob.beta);
    let g = prob.forcing.sample(dt, n)?;
    if prob.gain == 0.0 {
        return Ok(g);
    }
    // w[i] = k int_{(i-1) dt}^{i dt} s^{beta-1} ds
    let c = prob.gain * dt.powf(beta) / beta;
    let w: Vec<f64> = (0..=n)
        .map(|i| if i == 0 { 0.0 } else { c * ((i as f64).powf(beta) - ((i - 1) as f64).powf(beta)) })
        .collect();
    let f = convolve(&g, &w, n);
    if let Some(m) = f.iter().position(|v| !v.is_finite()) {
        return Err(Error::RenewalOverflow { t: m as f64 * dt });
    }
    Ok(f)
}

/// Growth rate `gamma` with `k Gamma(beta) gamma^{-beta} = 1`; the
/// solution grows like `exp(gamma t)`.
pub fn malthusian_rate(gain: f64, beta: f64) -> f64 {
    (gain * gamma(beta)).powf(1.0 / beta)
}

/// `log f` on the same grid as [`volterra_solve`], for growth beyond the
/// floating-point range. Solves for `h = exp(-gamma t) f`, whose kernel
/// `k s^{beta-1} exp(-gamma s)` is a probability density.
pub fn volterra_solve_log(prob: &RenewalProblem) -> Result<Vec<f64>> {
    prob.validate()?;
    let (n, dt, beta) = (prob.steps, prob.dt(), prob.beta);
    let g = prob.forcing.sample(dt, n)?;
    if prob.gain == 0.0 {
        return Ok(g.iter().map(|v| v.ln()).collect());
    }
    let gam = malthusian_rate(prob.gain, beta);
    if !gam.is_finite() {
        return Err(Error::RenewalOverflow { t: 0.0 });
    }
    let mut w = vec![0.0; n + 1];
    let mut upper_prev = 1.0;
    for (i, wi) in w.iter_mut().enumerate().skip(1) {
        let upper = gamma_ur(beta, gam * i as f64 * dt);
        *wi = upper_prev - upper;
        upper_prev = upper;
        if upper == 0.0 {
            break;
        }
    }
    let tilted: Vec<f64> = g
        .iter()
        .enumerate()
        .map(|(m, v)| {
            if m == 0 {
                tilted_first_panel(&prob.forcing, v, gam, dt)
            } else {
                v * (-gam * m as f64 * dt).exp()
            }
        })
        .collect();
    let h = convolve(&tilted, &w, n);
    Ok(h.iter().enumerate().map(|(m, v)| v.ln() + gam * m as f64 * dt).collect())
}

/// Mean of `exp(-gamma s) g(s)` over `[0, dt]` for power laws, where the
/// tilt is not resolved by the grid.
fn tilted_first_panel(forcing: &Forcing, g0: &f64, gam: f64, dt: f64) -> f64 {
    match forcing {
        Forcing::PowerLaw { scale, exponent } => {
            let a = 1.0 + exponent;
            let x = gam * dt;
            if x < 1e-8 {
                return *g0;
            }
            // scale gamma^{-a} Gamma(a) P(a, x) / dt
            let lower = gamma(a) * (1.0 - gamma_ur(a, x));
            scale * gam.powf(-a) * lower / dt
        }
        _ => *g0,
    }
}

/// `f_m = g_m + sum_{j < m} w_{m-j} f_j`, skipping the tail where `w`
/// vanishes.
fn convolve(g: &[f64], w: &[f64], n: usize) -> Vec<f64> {
    let support = w.iter().rposition(|v| *v != 0.0).unwrap_or(0);
    let mut f = vec![0.0; n + 1];
    f[0] = g[0];
    for m in 1..=n {
        let lo = m.saturating_sub(support);
        let mut acc = 0.0;
        for j in lo..m {
            acc += w[m - j] * f[j];
        }
        f[m] = g[m] + acc;
    }
    f
}
