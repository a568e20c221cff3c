//! Second moment of the fractional equation `du = -(-Delta)^{alpha/2} u dt
//! + lambda u dW` on the line, through its renewal equation
//!
//! `f(t) = g(t) + k int_0^t (t - s)^{-1/alpha} f(s) ds`,
//! `k = lambda^2 2^{-1/alpha} p(1, 0)`, `g(t) = ||p(t, .) * u0||^2`.

use std::f64::consts::PI;

use statrs::function::gamma::gamma;

use super::index::{index_fit, EnergyCurve, EnergyPoint, IndexEstimate};
use super::volterra::{volterra_solve_log, Forcing, RenewalProblem};
use crate::error::{invalid, Result};
use crate::operators::stable_tail_coefficient;
use crate::quadrature::GaussLegendre;
use crate::solvers::SigmaSpec;

/// Panels allowed per forcing evaluation before switching to the
/// small-time expansion.
const PANEL_BUDGET: f64 = 2000.0;
/// Forcing table size for the indicator datum.
const TABLE_NODES: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialDatum {
    /// unit point mass at the origin
    Delta,
    /// indicator of `[-half_width, half_width]`
    Indicator { half_width: f64 },
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 1.0 && alpha <= 2.0) {
        return Err(invalid(format!("stable index must lie in (1, 2], got {alpha}")));
    }
    Ok(())
}

/// `p(1, 0) = Gamma(1 + 1/alpha) / pi`.
fn density_at_origin(alpha: f64) -> f64 {
    gamma(1.0 + 1.0 / alpha) / PI
}

/// `g(t) = ||p(t, .) * 1_[-l, l]||^2
///       = (1/pi) int_0^inf exp(-2 t xi^alpha) 4 sin^2(l xi) / xi^2 d xi`.
pub fn indicator_forcing(alpha: f64, half_width: f64, t: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if !(half_width > 0.0) {
        return Err(invalid(format!("indicator half width must be positive, got {half_width}")));
    }
    if !(t >= 0.0) {
        return Err(invalid(format!("time must be >= 0, got {t}")));
    }
    let l = half_width;
    if t == 0.0 {
        return Ok(2.0 * l);
    }
    let cutoff = (-(1e-16f64).ln() / (2.0 * t)).powf(1.0 / alpha);
    let width = PI / (2.0 * l);
    if cutoff / width > PANEL_BUDGET {
        // 2l - E|Z| + E(|Z| - 2l)_+ with Z ~ p(2t, .), tail term from
        // p(2t, z) ~ 2 c t z^{-1-alpha}
        let spread = 2.0 / PI * gamma(1.0 - 1.0 / alpha) * (2.0 * t).powf(1.0 / alpha);
        let c = stable_tail_coefficient(alpha);
        let far = 4.0 * c * t * (2.0 * l).powf(1.0 - alpha) / (alpha * (alpha - 1.0));
        return Ok(2.0 * l - spread + far);
    }
    let rule = GaussLegendre::new(16);
    let f = |xi: f64| {
        let s = (l * xi).sin();
        let ratio = if xi < 1e-8 { l * l } else { s * s / (xi * xi) };
        4.0 * ratio * (-2.0 * t * xi.powf(alpha)).exp()
    };
    let mut acc = 0.0;
    let mut a = 0.0;
    while a < cutoff {
        let b = (a + width).min(cutoff);
        acc += rule.integrate(a, b, f);
        a = b;
    }
    Ok(acc / PI)
}

/// Second moment `E ||u(t)||^2` in log form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenewalMoment {
    pub alpha: f64,
    pub lambda: f64,
    pub t: f64,
    pub log_moment: f64,
}

impl RenewalMoment {
    pub fn value(&self) -> f64 {
        self.log_moment.exp()
    }

    /// `log sqrt(E ||u(t)||^2)`.
    pub fn log_energy(&self) -> f64 {
        0.5 * self.log_moment
    }
}

/// Renewal equation for one `(alpha, u0, t, n)`, with the forcing sampled
/// once and shared across noise levels.
#[derive(Debug, Clone)]
pub struct FractionalRenewal {
    alpha: f64,
    horizon: f64,
    steps: usize,
    forcing: Forcing,
}

impl FractionalRenewal {
    pub fn new(alpha: f64, initial: InitialDatum, horizon: f64, steps: usize) -> Result<Self> {
        check_alpha(alpha)?;
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(invalid(format!("horizon must be positive, got {horizon}")));
        }
        if steps < 2 {
            return Err(invalid("renewal solver needs at least two steps"));
        }
        let forcing = match initial {
            // p(2t, 0) = 2^{-1/alpha} p(1, 0) t^{-1/alpha}
            InitialDatum::Delta => Forcing::PowerLaw {
                scale: 2f64.powf(-1.0 / alpha) * density_at_origin(alpha),
                exponent: -1.0 / alpha,
            },
            InitialDatum::Indicator { half_width } => {
                Self::indicator_table(alpha, half_width, horizon, steps)?
            }
        };
        Ok(Self { alpha, horizon, steps, forcing })
    }

    /// Indicator forcing on the solver grid, interpolated linearly in
    /// `t^{1/alpha}` between log-spaced exact values.
    fn indicator_table(alpha: f64, l: f64, horizon: f64, steps: usize) -> Result<Forcing> {
        let dt = horizon / steps as f64;
        let s = |t: f64| t.powf(1.0 / alpha);
        let mut knots = vec![(0.0, indicator_forcing(alpha, l, 0.0)?)];
        let ratio = (horizon / dt).ln() / (TABLE_NODES - 1) as f64;
        for j in 0..TABLE_NODES {
            let t = if j + 1 == TABLE_NODES { horizon } else { dt * (ratio * j as f64).exp() };
            knots.push((s(t), indicator_forcing(alpha, l, t)?));
        }
        let mut values = Vec::with_capacity(steps + 1);
        let mut k = 0;
        for m in 0..=steps {
            let x = s(m as f64 * dt);
            while k + 2 < knots.len() && knots[k + 1].0 < x {
                k += 1;
            }
            let (x0, y0) = knots[k];
            let (x1, y1) = knots[k + 1];
            let w = if x1 > x0 { ((x - x0) / (x1 - x0)).clamp(0.0, 1.0) } else { 0.0 };
            values.push(y0 + w * (y1 - y0));
        }
        Ok(Forcing::Tabulated { dt, values })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `beta = 1 - 1/alpha`.
    pub fn beta(&self) -> f64 {
        1.0 - 1.0 / self.alpha
    }

    /// `k = gain_factor lambda^2 2^{-1/alpha} p(1, 0)`; `gain_factor = 1`
    /// for `sigma(u) = u`.
    pub fn gain(&self, lambda: f64, gain_factor: f64) -> f64 {
        gain_factor * lambda * lambda * 2f64.powf(-1.0 / self.alpha) * density_at_origin(self.alpha)
    }

    pub fn problem(&self, lambda: f64, gain_factor: f64) -> Result<RenewalProblem> {
        RenewalProblem::new(self.forcing.clone(), self.gain(lambda, gain_factor), self.beta(), self.horizon, self.steps)
    }

    /// `log f` on the whole grid.
    pub fn log_path(&self, lambda: f64, gain_factor: f64) -> Result<Vec<f64>> {
        volterra_solve_log(&self.problem(lambda, gain_factor)?)
    }

    pub fn moment(&self, lambda: f64, gain_factor: f64) -> Result<RenewalMoment> {
        let path = self.log_path(lambda, gain_factor)?;
        Ok(RenewalMoment { alpha: self.alpha, lambda, t: self.horizon, log_moment: path[self.steps] })
    }
}

/// `E ||u(t)||^2` for `sigma(u) = u`, using `n` renewal steps.
pub fn fractional_moment_exact(alpha: f64, lambda: f64, t: f64, initial: InitialDatum, n: usize) -> Result<RenewalMoment> {
    FractionalRenewal::new(alpha, initial, t, n)?.moment(lambda, 1.0)
}

/// Lower and upper second moments for a general `sigma`, from the gains
/// `l_sigma^2` and `L_sigma^2`.
pub fn fractional_moment_bracket(
    alpha: f64,
    lambda: f64,
    t: f64,
    initial: InitialDatum,
    n: usize,
    sigma: &SigmaSpec,
) -> Result<(RenewalMoment, RenewalMoment)> {
    let r = FractionalRenewal::new(alpha, initial, t, n)?;
    let lo = r.moment(lambda, sigma.l_sigma.powi(2))?;
    let hi = r.moment(lambda, sigma.big_l_sigma.powi(2))?;
    Ok((lo, hi))
}

/// Energy curve `sqrt(E ||u(t)||^2)` over `lambdas` and its index fit.
pub fn renewal_index(
    alpha: f64,
    lambdas: &[f64],
    t: f64,
    initial: InitialDatum,
    n: usize,
) -> Result<(EnergyCurve, IndexEstimate)> {
    let r = FractionalRenewal::new(alpha, initial, t, n)?;
    let mut points = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        let m = r.moment(lambda, 1.0)?;
        points.push(EnergyPoint { lambda, log_energy: m.log_energy(), log_stderr: 0.0, samples: 0 });
    }
    let curve = EnergyCurve::new(t, 2.0, points)?;
    let est = index_fit(&curve, None)?;
    Ok((curve, est))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::stable_density;

    #[test]
    fn origin_density_matches_quadrature() {
        assert!((density_at_origin(2.0) - 0.5 / PI.sqrt()).abs() < 1e-15);
        for alpha in [1.25, 1.5, 1.9] {
            let q = stable_density(alpha, 1.0, 0.0).unwrap();
            assert!((density_at_origin(alpha) - q).abs() < 1e-10);
        }
    }

    #[test]
    fn zero_noise_returns_forcing() {
        let m = fractional_moment_exact(2.0, 0.0, 1.0, InitialDatum::Delta, 100).unwrap();
        assert!((m.value() - (8.0 * PI).powf(-0.5)).abs() < 1e-12);
        let m = fractional_moment_exact(1.5, 0.0, 1.0, InitialDatum::Delta, 100).unwrap();
        let expect = 2f64.powf(-1.0 / 1.5) * density_at_origin(1.5);
        assert!((m.value() - expect).abs() < 1e-12);
    }

    #[test]
    fn indicator_forcing_gaussian_closed_form() {
        // alpha = 2: g(t) = int (2l - |z|)_+ N(0, 4t)(dz)
        let l = 0.5f64;
        for t in [0.01f64, 0.1, 1.0] {
            let sd = (4.0 * t).sqrt();
            let a = 2.0 * l / sd;
            let phi = (-0.5 * a * a).exp() / (2.0 * PI).sqrt();
            let cdf = 0.5 * (1.0 + statrs::function::erf::erf(a / 2f64.sqrt()));
            // 2 [2l (Phi(a) - 1/2) - sd (phi(0) - phi(a))]
            let exact = 2.0 * (2.0 * l * (cdf - 0.5) - sd * (1.0 / (2.0 * PI).sqrt() - phi));
            let g = indicator_forcing(2.0, l, t).unwrap();
            assert!((g - exact).abs() < 1e-10, "t {t}: {g} vs {exact}");
        }
    }

    #[test]
    fn indicator_forcing_continuous_across_switch() {
        for alpha in [1.25, 1.5, 2.0] {
            let width = PI / 2.0;
            let t_switch = -(1e-16f64).ln() / (2.0 * (PANEL_BUDGET * width).powf(alpha));
            let below = indicator_forcing(alpha, 1.0, 0.999 * t_switch).unwrap();
            let above = indicator_forcing(alpha, 1.0, 1.001 * t_switch).unwrap();
            assert!((below - above).abs() < 2e-4, "alpha {alpha}: {below} vs {above}");
            assert!((indicator_forcing(alpha, 1.0, 0.0).unwrap() - 2.0).abs() < 1e-15);
        }
    }

    #[test]
    fn indicator_forcing_decreases() {
        let mut prev = f64::INFINITY;
        for t in [0.0, 1e-6, 1e-3, 0.1, 1.0, 10.0] {
            let g = indicator_forcing(1.5, 1.0, t).unwrap();
            assert!(g < prev);
            prev = g;
        }
    }

    #[test]
    fn gain_is_monotone_in_sigma() {
        let sigma = SigmaSpec::scaled_sin_plus_linear(0.5).unwrap();
        let (lo, hi) = fractional_moment_bracket(1.5, 4.0, 1.0, InitialDatum::Delta, 2000, &sigma).unwrap();
        let mid = fractional_moment_exact(1.5, 4.0, 1.0, InitialDatum::Delta, 2000).unwrap();
        assert!(lo.log_moment < mid.log_moment && mid.log_moment < hi.log_moment);
    }

    #[test]
    fn index_decreases_in_alpha() {
        let lambdas = [8.0, 16.0, 32.0, 64.0];
        let (_, a19) = renewal_index(1.9, &lambdas, 1.0, InitialDatum::Delta, 2000).unwrap();
        let (_, a20) = renewal_index(2.0, &lambdas, 1.0, InitialDatum::Delta, 2000).unwrap();
        assert!(a19.upper > a20.upper);
    }

    #[test]
    fn rejects_bad_alpha() {
        assert!(fractional_moment_exact(1.0, 1.0, 1.0, InitialDatum::Delta, 10).is_err());
        assert!(indicator_forcing(2.5, 1.0, 1.0).is_err());
    }
}
