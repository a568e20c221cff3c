//! Spatial discretization on a 1-D interval with homogeneous Dirichlet
//! boundary conditions, plus symmetric alpha-stable transition densities on
//! the whole line.

mod eigen;
mod grid;
mod semigroup;
mod stable;
mod tridiag;

pub use eigen::{eigenpairs, principal_eigenpair, EigenDecomposition, PrincipalEigenpair};
pub use grid::Grid1D;
pub use semigroup::{fractional_semigroup_apply, heat_apply};
pub use stable::{
    stable_density, stable_identity_suite, stable_tail_coefficient, StableDensityEvaluator,
    StableIdentityReport,
};
pub use tridiag::{laplacian_dirichlet, ThomasFactor, TridiagOperator};
