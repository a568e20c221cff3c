//! Monte Carlo moments of the solution, reduced in the log domain.
//!
//! Trajectory `i` always uses stream `(base_seed, i)`, and per-trajectory
//! log values are reduced in index order after the parallel map, so the
//! result is independent of how rayon schedules the work.

use rayon::prelude::*;

use super::energy::log_lp_moment;
use super::index::{EnergyCurve, EnergyPoint};
use super::logsum::LogMoments;
use crate::error::{invalid, Error, Result};
use crate::operators::{eigenpairs, heat_apply, laplacian_dirichlet, EigenDecomposition, PrincipalEigenpair};
use crate::rng::RngStream;
use crate::solvers::{Simulator, SpdeProblem};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sampler {
    /// closed-form solution given the driver value; needs linear sigma and
    /// a spatially constant noise (single BM or constant kernel)
    Exact,
    /// semi-implicit Euler-Maruyama with step `dt`
    Scheme { dt: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McOptions {
    pub samples: usize,
    pub base_seed: u64,
    /// moment order
    pub p: f64,
    pub sampler: Sampler,
    /// Girsanov drift on the latent driver (importance sampling); 0 is
    /// plain Monte Carlo
    pub drift: f64,
}

impl McOptions {
    pub fn new(samples: usize, base_seed: u64, sampler: Sampler) -> Self {
        Self { samples, base_seed, p: 2.0, sampler, drift: 0.0 }
    }

    pub fn with_p(mut self, p: f64) -> Self {
        self.p = p;
        self
    }

    pub fn with_drift(mut self, drift: f64) -> Self {
        self.drift = drift;
        self
    }
}

/// Drift `p lambda sqrt(q)` on the latent driver, `q` the grid-averaged
/// noise intensity. It tilts the driver towards the paths that dominate the
/// `p`-th moment and removes all variance for the exact sampler.
pub fn girsanov_drift(problem: &SpdeProblem, lambda: f64, p: f64) -> f64 {
    p * lambda * problem.mean_noise_intensity().sqrt()
}

/// Estimate of `E F(u(t))` for a functional `F` homogeneous of degree `p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentEstimate {
    pub lambda: f64,
    pub t: f64,
    pub p: f64,
    /// `log E F(u(t))`
    pub log_moment: f64,
    /// standard error of the moment over the moment
    pub rel_stderr: f64,
    pub samples: usize,
}

impl MomentEstimate {
    /// `log [E F]^{1/p}`.
    pub fn log_energy(&self) -> f64 {
        self.log_moment / self.p
    }

    pub fn energy(&self) -> f64 {
        self.log_energy().exp()
    }

    /// Delta-method standard error of the log energy.
    pub fn log_energy_stderr(&self) -> f64 {
        self.rel_stderr / self.p
    }

    pub fn energy_stderr(&self) -> f64 {
        self.energy() * self.log_energy_stderr()
    }

    pub fn moment(&self) -> f64 {
        self.log_moment.exp()
    }

    pub fn moment_stderr(&self) -> f64 {
        self.moment() * self.rel_stderr
    }

    pub fn to_point(&self) -> EnergyPoint {
        EnergyPoint {
            lambda: self.lambda,
            log_energy: self.log_energy(),
            log_stderr: self.log_energy_stderr(),
            samples: self.samples,
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Functional<'a> {
    /// `||u||_p^p`
    Lp(f64),
    /// `|dx sum u phi|^p`
    Projection(&'a PrincipalEigenpair, f64),
}

impl Functional<'_> {
    fn degree(&self) -> f64 {
        match self {
            Functional::Lp(p) | Functional::Projection(_, p) => *p,
        }
    }

    fn log_eval(&self, problem: &SpdeProblem, u: &[f64]) -> Result<f64> {
        match self {
            Functional::Lp(p) => log_lp_moment(u, &problem.grid, *p),
            Functional::Projection(pair, p) => Ok(p * pair.project(&problem.grid, u).abs().ln()),
        }
    }
}

/// `[E ||u(t)||_p^p]^{1/p}` over `opts.samples` independent trajectories.
pub fn mc_energy(problem: &SpdeProblem, lambda: f64, t: f64, opts: &McOptions) -> Result<MomentEstimate> {
    run(problem, lambda, t, opts, Functional::Lp(opts.p))
}

/// `E |(u(t), phi)|^p`, the moment tracked by the spectral lower bound.
pub fn mc_projection_moment(
    problem: &SpdeProblem,
    pair: &PrincipalEigenpair,
    lambda: f64,
    t: f64,
    opts: &McOptions,
) -> Result<MomentEstimate> {
    run(problem, lambda, t, opts, Functional::Projection(pair, opts.p))
}

fn run(problem: &SpdeProblem, lambda: f64, t: f64, opts: &McOptions, functional: Functional<'_>) -> Result<MomentEstimate> {
    if opts.samples < 2 {
        return Err(invalid("Monte Carlo needs at least two samples"));
    }
    if !(opts.p > 0.0) {
        return Err(invalid(format!("moment order must be positive, got {}", opts.p)));
    }
    if !(t >= 0.0) {
        return Err(invalid(format!("time must be >= 0, got {t}")));
    }
    let problem = problem.with_lambda(lambda)?;
    let logs: Vec<Result<f64>> = match opts.sampler {
        Sampler::Exact => {
            let exact = ExactLinear::new(&problem, t)?;
            let base = functional.log_eval(&problem, &exact.profile)?;
            let degree = functional.degree();
            (0..opts.samples as u64)
                .into_par_iter()
                .map(|i| {
                    let (log_scale, log_w) = exact.draw(RngStream::new(opts.base_seed, i), opts.drift);
                    Ok(log_w + degree * log_scale + base)
                })
                .collect()
        }
        Sampler::Scheme { dt } => {
            let sim = Simulator::new(&problem, t, dt)?;
            (0..opts.samples as u64)
                .into_par_iter()
                .map(|i| {
                    let (state, log_w) = sim.run_tilted(RngStream::new(opts.base_seed, i), opts.drift)?;
                    Ok(log_w + functional.log_eval(&problem, &state.u)?)
                })
                .collect()
        }
    };
    let mut values = Vec::with_capacity(logs.len());
    for v in logs {
        match v {
            Ok(x) if x.is_nan() || x == f64::INFINITY => return Err(Error::Overflow { lambda, t }),
            Ok(x) => values.push(x),
            Err(e) if e.is_overflow() => return Err(Error::Overflow { lambda, t }),
            Err(e) => return Err(e),
        }
    }
    let m = LogMoments::from_logs(&values);
    Ok(MomentEstimate {
        lambda,
        t,
        p: functional.degree(),
        log_moment: m.log_mean,
        rel_stderr: m.rel_stderr,
        samples: m.samples,
    })
}

/// `u(t) = exp(lambda sqrt(q) B_t - lambda^2 q t / 2) exp(kappa t Delta_h) u0`.
struct ExactLinear {
    profile: Vec<f64>,
    lambda_eff: f64,
    t: f64,
}

impl ExactLinear {
    fn new(problem: &SpdeProblem, t: f64) -> Result<Self> {
        if !problem.sigma.is_linear() {
            return Err(invalid("exact sampler requires sigma(u) = u"));
        }
        let q = problem
            .constant_noise_intensity()
            .ok_or_else(|| invalid("exact sampler requires a spatially constant noise"))?;
        let decomp = decomposition(problem)?;
        let profile = heat_apply(&decomp, problem.diffusivity * t, &problem.u0)?;
        Ok(Self { profile, lambda_eff: problem.lambda * q.sqrt(), t })
    }

    /// Log of the scalar factor and the log likelihood ratio of the draw.
    fn draw(&self, stream: RngStream, drift: f64) -> (f64, f64) {
        let mut g = stream.generator();
        let b = self.t.sqrt() * g.draw() + drift * self.t;
        let log_w = -drift * b + 0.5 * drift * drift * self.t;
        let l = self.lambda_eff;
        (l * b - 0.5 * l * l * self.t, log_w)
    }
}

fn decomposition(problem: &SpdeProblem) -> Result<EigenDecomposition> {
    eigenpairs(&laplacian_dirichlet(&problem.grid), &problem.grid)
}

/// Closed-form energy curve of the exact linear solution:
/// `log [E ||u(t)||_p^p]^{1/p} = (p - 1) q lambda^2 t / 2 + log ||exp(kappa t Delta_h) u0||_p`.
pub fn linear_exact_curve(problem: &SpdeProblem, lambdas: &[f64], t: f64, p: f64) -> Result<EnergyCurve> {
    if !problem.sigma.is_linear() {
        return Err(invalid("closed-form curve requires sigma(u) = u"));
    }
    let q = problem
        .constant_noise_intensity()
        .ok_or_else(|| invalid("closed-form curve requires a spatially constant noise"))?;
    let decomp = decomposition(problem)?;
    let profile = heat_apply(&decomp, problem.diffusivity * t, &problem.u0)?;
    let base = log_lp_moment(&profile, &problem.grid, p)? / p;
    let points = lambdas
        .iter()
        .map(|&lambda| EnergyPoint {
            lambda,
            log_energy: 0.5 * (p - 1.0) * q * lambda * lambda * t + base,
            log_stderr: 0.0,
            samples: 0,
        })
        .collect();
    EnergyCurve::new(t, p, points)
}
