//! Numerical checks of the inequalities on `S^{N−1}`: the spherical Young
//! inequality, the entropy inequality with constant 2, and the trial
//! functions showing both are sharp.

mod entropy;
mod marginal;
mod sampler;
mod young;

use thiserror::Error;

pub use entropy::{
    cap_density, cap_schedule, check_theorem2, conditional_expectation, DensityKind, DensityOnSphere, IdentityCheck,
    MarginalProfile, Theorem2Report,
};
pub use marginal::{
    gauss_legendre, normalization_constant, printed_normalization, resolved_normalization, sphere_area, Abscissa,
    MarginalMeasure,
};
pub use sampler::{uniform_point, Estimate, SphereSampler};
pub use young::{check_theorem1, divergence_trial, trial_function, DivergenceReport, SphereFunction, Theorem1Report};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SphereError {
    #[error("sphere dimension n = {0} is below 2")]
    DimensionTooSmall(usize),
    #[error("L^p norm diverges")]
    NormDiverges,
    #[error("parameters out of regime: {0}")]
    ParameterOutOfRegime(String),
    #[error("expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("bin {bin} of coordinate {coordinate} received no samples")]
    EmptyBin { coordinate: usize, bin: usize },
    #[error("entropy estimate is unstable (standard error {stderr:e})")]
    EntropyUnstable { stderr: f64 },
}
