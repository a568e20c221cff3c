//! Time integration of the stochastic heat equation with multiplicative
//! noise, and closed-form solutions of the linear cases.

mod linear;
mod problem;
mod sigma;
mod step;

pub use linear::{deterministic_v, gbm_exact, gbm_moment, linear_exact_sample};
pub use problem::{NoiseKind, SpdeProblem};
pub use sigma::SigmaSpec;
pub use step::{
    simulate, step_qwiener, step_single_bm, step_space_time_white, Simulator, SolverState, Stepper,
};
