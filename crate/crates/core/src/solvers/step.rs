//! Semi-implicit Euler-Maruyama: implicit diffusion, explicit noise,
//! `u_{n+1} = (I - dt kappa Delta_h)^{-1} (u_n + lambda sigma(u_n) dW_n)`.

use super::{NoiseKind, SpdeProblem};
use crate::error::{invalid, Error, Result};
use crate::noise::{qwiener_draw, qwiener_factor, white_noise_row, CovarianceFactor};
use crate::operators::{laplacian_dirichlet, PrincipalEigenpair, ThomasFactor};
use crate::rng::RngStream;

#[derive(Debug, Clone, PartialEq)]
pub struct SolverState {
    pub t: f64,
    pub u: Vec<f64>,
    /// accumulated driver `B_t` (single Brownian motion only)
    pub brownian: f64,
    /// `dx * sum(u * phi)` when an eigenpair is attached
    pub projection: Option<f64>,
}

impl SolverState {
    pub fn initial(problem: &SpdeProblem) -> Self {
        Self { t: 0.0, u: problem.u0.clone(), brownian: 0.0, projection: None }
    }

    /// Fraction of nodes where the scheme produced a negative value.
    pub fn negativity_fraction(&self) -> f64 {
        self.u.iter().filter(|v| **v < 0.0).count() as f64 / self.u.len() as f64
    }
}

/// Cached implicit diffusion step for one `(grid, dt, kappa)`.
#[derive(Debug, Clone)]
pub struct Stepper {
    dt: f64,
    lambda: f64,
    factor: ThomasFactor,
}

impl Stepper {
    pub fn new(problem: &SpdeProblem, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(invalid(format!("time step must be positive, got {dt}")));
        }
        let lap = laplacian_dirichlet(&problem.grid);
        let factor = lap.factor_shifted(1.0, -dt * problem.diffusivity)?;
        Ok(Self { dt, lambda: problem.lambda, factor })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// One step with pointwise noise increments `dw[i]`.
    pub fn advance(&self, problem: &SpdeProblem, state: &mut SolverState, dw: impl Fn(usize) -> f64) -> Result<()> {
        for (i, u) in state.u.iter_mut().enumerate() {
            *u += self.lambda * problem.sigma.eval(*u) * dw(i);
        }
        self.factor.solve(&mut state.u);
        state.t += self.dt;
        if state.u.iter().any(|v| !v.is_finite()) {
            return Err(Error::Overflow { lambda: self.lambda, t: state.t });
        }
        Ok(())
    }
}

pub fn step_single_bm(state: &SolverState, dt: f64, problem: &SpdeProblem, db: f64) -> Result<SolverState> {
    let stepper = Stepper::new(problem, dt)?;
    let mut next = state.clone();
    stepper.advance(problem, &mut next, |_| db)?;
    next.brownian += db;
    Ok(next)
}

pub fn step_qwiener(state: &SolverState, dt: f64, problem: &SpdeProblem, dw: &[f64]) -> Result<SolverState> {
    if dw.len() != state.u.len() {
        return Err(invalid("noise increment length differs from the grid"));
    }
    let stepper = Stepper::new(problem, dt)?;
    let mut next = state.clone();
    stepper.advance(problem, &mut next, |i| dw[i])?;
    Ok(next)
}

/// `xi` entries are expected to carry variance `dt / dx`.
pub fn step_space_time_white(state: &SolverState, dt: f64, problem: &SpdeProblem, xi: &[f64]) -> Result<SolverState> {
    if xi.len() != state.u.len() {
        return Err(invalid("noise row length differs from the grid"));
    }
    let stepper = Stepper::new(problem, dt)?;
    let mut next = state.clone();
    stepper.advance(problem, &mut next, |i| xi[i])?;
    Ok(next)
}

/// Repeated stepping of one problem over `[0, horizon]`, reusable across
/// trajectories.
#[derive(Debug, Clone)]
pub struct Simulator<'a> {
    problem: &'a SpdeProblem,
    stepper: Stepper,
    n_steps: usize,
    qfactor: Option<CovarianceFactor>,
    eigenpair: Option<&'a PrincipalEigenpair>,
}

impl<'a> Simulator<'a> {
    pub fn new(problem: &'a SpdeProblem, horizon: f64, dt: f64) -> Result<Self> {
        if !(horizon >= 0.0) {
            return Err(invalid(format!("horizon must be >= 0, got {horizon}")));
        }
        let stepper = Stepper::new(problem, dt)?;
        let steps = horizon / dt;
        let n_steps = steps.round() as usize;
        if (n_steps as f64 - steps).abs() > 1e-9 * steps.max(1.0) {
            return Err(invalid(format!("horizon {horizon} is not a multiple of dt = {dt}")));
        }
        let qfactor = match &problem.noise {
            NoiseKind::QWiener(spec) => Some(qwiener_factor(spec, &problem.grid)?),
            _ => None,
        };
        Ok(Self { problem, stepper, n_steps, qfactor, eigenpair: None })
    }

    pub fn with_eigenpair(mut self, pair: &'a PrincipalEigenpair) -> Self {
        self.eigenpair = Some(pair);
        self
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn run(&self, stream: RngStream) -> Result<SolverState> {
        self.run_tilted(stream, 0.0).map(|(s, _)| s)
    }

    /// Runs under a Girsanov drift `drift` (per unit time) on the latent
    /// driver and returns the log likelihood ratio `log dP/dQ` of the path.
    /// `drift = 0` reproduces [`Simulator::run`] with a zero weight.
    pub fn run_tilted(&self, stream: RngStream, drift: f64) -> Result<(SolverState, f64)> {
        let problem = self.problem;
        let dt = self.stepper.dt();
        let sd = dt.sqrt();
        let n = problem.grid.len();
        let mut g = stream.generator();
        let mut state = SolverState::initial(problem);
        let mut log_weight = 0.0;
        let shift = drift * sd;
        let half_shift_sq = 0.5 * shift * shift;
        let mut z = vec![0.0; n];
        let mut dw = vec![0.0; n];
        self.record(&mut state);
        for _ in 0..self.n_steps {
            match &problem.noise {
                NoiseKind::SingleBm => {
                    let zs = g.draw() + shift;
                    let db = sd * zs;
                    log_weight += -shift * zs + half_shift_sq;
                    self.stepper.advance(problem, &mut state, |_| db)?;
                    state.brownian += db;
                }
                NoiseKind::QWiener(_) => {
                    let factor = self.qfactor.as_ref().expect("factor built with the simulator");
                    let proj = qwiener_draw(factor, dt, &mut g, shift, &mut z, &mut dw);
                    log_weight += -shift * proj + half_shift_sq;
                    self.stepper.advance(problem, &mut state, |i| dw[i])?;
                }
                NoiseKind::SpaceTimeWhite => {
                    white_noise_row(&mut g, &problem.grid, dt, &mut dw);
                    // uniform latent direction 1/sqrt(n)
                    let cell_shift = shift / (n as f64).sqrt();
                    let cell_sd = (dt / problem.grid.dx()).sqrt();
                    let mut proj = 0.0;
                    for v in dw.iter_mut() {
                        let zs = *v / cell_sd + cell_shift;
                        proj += zs;
                        *v = cell_sd * zs;
                    }
                    proj /= (n as f64).sqrt();
                    log_weight += -shift * proj + half_shift_sq;
                    self.stepper.advance(problem, &mut state, |i| dw[i])?;
                }
            }
            self.record(&mut state);
        }
        Ok((state, log_weight))
    }

    fn record(&self, state: &mut SolverState) {
        if let Some(pair) = self.eigenpair {
            state.projection = Some(pair.project(&self.problem.grid, &state.u));
        }
    }
}

/// Integrate `problem` to `horizon` with noise drawn from `stream`.
pub fn simulate(problem: &SpdeProblem, horizon: f64, dt: f64, stream: RngStream) -> Result<SolverState> {
    Simulator::new(problem, horizon, dt)?.run(stream)
}
