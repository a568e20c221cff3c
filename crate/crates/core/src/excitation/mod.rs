//! Energy functionals, Monte Carlo moments, finite-lambda excitation index
//! fits, moment bound certificates, and the weakly singular renewal
//! equation governing the second moment of the fractional equation.

mod bounds;
mod energy;
mod index;
mod logsum;
mod mc;
mod renewal;
mod volterra;

pub use bounds::{
    gronwall_upper_check, lower_from_estimate, spectral_lower_bound, spectral_lower_check, BoundCheck,
    BoundCheckReport, BoundKind, ROUNDOFF_ALLOWANCE,
};
pub use energy::{l2_energy, log_lp_moment, lp_energy};
pub use index::{index_fit, EnergyCurve, EnergyPoint, IndexEstimate, DEFAULT_WINDOW};
pub use logsum::LogMoments;
pub use mc::{girsanov_drift, linear_exact_curve, mc_energy, mc_projection_moment, McOptions, MomentEstimate, Sampler};
pub use renewal::{
    fractional_moment_bracket, fractional_moment_exact, indicator_forcing, renewal_index, FractionalRenewal,
    InitialDatum, RenewalMoment,
};
pub use volterra::{malthusian_rate, volterra_solve, volterra_solve_log, Forcing, RenewalProblem};
