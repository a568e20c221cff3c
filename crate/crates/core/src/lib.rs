//! Numerical laboratory for stochastic parabolic equations driven by
//! multiplicative noise.
//!
//! The crate is organised bottom-up:
//!
//! - [`noise`]: seedable Brownian paths, space-time white noise and
//!   Q-Wiener increments.
//! - [`operators`]: the 1-D Dirichlet Laplacian, its spectrum and heat
//!   semigroup, and symmetric alpha-stable transition densities.
//! - [`solvers`]: semi-implicit time stepping, the exact sampler for the
//!   linear equation, and the scalar geometric Brownian motion.
//! - [`excitation`]: energy functionals, Monte Carlo moments, excitation
//!   index fits, moment bound certificates and the weakly singular renewal
//!   equation used for the fractional equation on the whole line.

#![allow(clippy::neg_cmp_op_on_partial_ord)]
pub mod error;
pub mod excitation;
pub mod noise;
pub mod operators;
mod quadrature;
pub mod rng;
pub mod solvers;

pub use error::{Error, Result};
pub use excitation::{
    BoundCheck, BoundCheckReport, EnergyCurve, EnergyPoint, Forcing, IndexEstimate, InitialDatum,
    McOptions, MomentEstimate, RenewalMoment, RenewalProblem, Sampler,
};
pub use noise::{BrownianPath, CovKernelSpec, CovarianceFactor, WhiteNoiseField};
pub use operators::{EigenDecomposition, Grid1D, PrincipalEigenpair, TridiagOperator};
pub use rng::RngStream;
pub use solvers::{NoiseKind, SigmaSpec, SolverState, SpdeProblem};
