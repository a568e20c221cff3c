//! Moment bound certificates, compared in the log domain.

use super::index::EnergyCurve;
use super::mc::{mc_projection_moment, McOptions, MomentEstimate};
use crate::error::{invalid, Result};
use crate::operators::PrincipalEigenpair;
use crate::solvers::{NoiseKind, SpdeProblem};

/// Absolute log-domain tolerance added to every check. The spectral lower
/// bound is attained with equality by the linear equation, so the measured
/// side can sit a few ulps below it.
pub const ROUNDOFF_ALLOWANCE: f64 = 1e-9;

/// Number of standard errors granted to Monte Carlo estimates.
const STDERR_MULTIPLIER: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    Upper,
    Lower,
}

impl BoundKind {
    pub fn label(&self) -> &'static str {
        match self {
            BoundKind::Upper => "gronwall_upper",
            BoundKind::Lower => "spectral_lower",
        }
    }
}

/// One checked inequality. `measured`, `bound` and `slack` are natural
/// logs of the second moments; `slack` is positive when the inequality
/// holds without any allowance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundCheck {
    pub kind: BoundKind,
    pub lambda: f64,
    pub t: f64,
    pub measured: f64,
    pub bound: f64,
    pub slack: f64,
    /// log-domain allowance from Monte Carlo error plus roundoff
    pub allowance: f64,
    pub pass: bool,
}

impl BoundCheck {
    fn new(kind: BoundKind, lambda: f64, t: f64, measured: f64, bound: f64, rel_stderr: f64) -> Self {
        let slack = match kind {
            BoundKind::Upper => bound - measured,
            BoundKind::Lower => measured - bound,
        };
        let allowance = (1.0 + STDERR_MULTIPLIER * rel_stderr).ln() + ROUNDOFF_ALLOWANCE;
        Self { kind, lambda, t, measured, bound, slack, allowance, pass: slack + allowance >= 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BoundCheckReport {
    pub checks: Vec<BoundCheck>,
}

impl BoundCheckReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &BoundCheck> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn extend(&mut self, other: BoundCheckReport) {
        self.checks.extend(other.checks);
    }
}

/// `E ||u(t)||^2 <= ||u0||^2 exp(q1 L^2 lambda^2 t)` for every point of a
/// second-moment curve, where `q1` bounds the noise intensity (1 for a
/// single Brownian motion).
pub fn gronwall_upper_check(curve: &EnergyCurve, big_l_sigma: f64, q1: f64, u0_energy: f64) -> Result<BoundCheckReport> {
    if curve.p != 2.0 {
        return Err(invalid(format!("Gronwall check needs a second-moment curve, got p = {}", curve.p)));
    }
    if !(big_l_sigma >= 0.0 && q1 >= 0.0 && u0_energy > 0.0) {
        return Err(invalid("Gronwall check needs L >= 0, q1 >= 0 and a nonzero initial energy"));
    }
    let t = curve.t;
    let checks = curve
        .points()
        .iter()
        .map(|pt| {
            let measured = 2.0 * pt.log_energy;
            let bound = 2.0 * u0_energy.ln() + q1 * big_l_sigma.powi(2) * pt.lambda.powi(2) * t;
            // relative stderr of the squared energy
            BoundCheck::new(BoundKind::Upper, pt.lambda, t, measured, bound, 2.0 * pt.log_stderr)
        })
        .collect();
    Ok(BoundCheckReport { checks })
}

/// Log of the spectral lower bound
/// `(u0, phi)^2 exp((q0 l^2 lambda^2 - 2 kappa lambda_1) t)`.
pub fn spectral_lower_bound(problem: &SpdeProblem, pair: &PrincipalEigenpair, lambda: f64, t: f64) -> Result<f64> {
    let q0 = match &problem.noise {
        NoiseKind::SingleBm => 1.0,
        NoiseKind::QWiener(spec) => spec.q0,
        NoiseKind::SpaceTimeWhite => return Err(invalid("spectral lower bound needs a single BM or Q-Wiener noise")),
    };
    let l = problem.sigma.l_sigma;
    if !(l > 0.0) {
        return Err(invalid("spectral lower bound needs l_sigma > 0"));
    }
    let proj = pair.project(&problem.grid, &problem.u0);
    let rate = q0 * l * l * lambda * lambda - 2.0 * problem.diffusivity * pair.eigenvalue;
    Ok(2.0 * proj.abs().ln() + rate * t)
}

/// Compares Monte Carlo estimates of `E (u(t), phi)^2` with
/// [`spectral_lower_bound`] at each lambda.
pub fn spectral_lower_check(
    problem: &SpdeProblem,
    pair: &PrincipalEigenpair,
    lambdas: &[f64],
    t: f64,
    opts: &McOptions,
) -> Result<BoundCheckReport> {
    let mut checks = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        let est = mc_projection_moment(problem, pair, lambda, t, &opts.with_p(2.0))?;
        checks.push(lower_from_estimate(problem, pair, &est)?);
    }
    Ok(BoundCheckReport { checks })
}

/// Lower check for an already computed projection moment.
pub fn lower_from_estimate(problem: &SpdeProblem, pair: &PrincipalEigenpair, est: &MomentEstimate) -> Result<BoundCheck> {
    let bound = spectral_lower_bound(problem, pair, est.lambda, est.t)?;
    Ok(BoundCheck::new(BoundKind::Lower, est.lambda, est.t, est.log_moment, bound, est.rel_stderr))
}
