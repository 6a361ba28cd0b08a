//! Sharp constants, optimizers and feasibility structure for the
//! Brascamp-Lieb form of Young's inequality,
//!
//! ```text
//! ∫_{R^M} Π_j f_j(a_j · x) dx  ≤  D(p) Π_j ‖f_j‖_{p_j},
//! ```
//!
//! together with numerical certificates for the heat-flow monotonicity
//! argument and for the spherical Young and entropy inequalities.
//!
//! Throughout, indices are 0-based and `z_j = 1/p_j`.

pub mod configuration;
pub mod gaussian;
pub mod heatflow;
pub mod linalg;
pub mod optimizers;
pub mod polytope;
pub mod scalar;
pub mod sphere;

pub use linalg::{ExactMirror, IndexSet, LinalgError, Matrix, TolerancePolicy};
pub use configuration::Configuration;
pub use polytope::ExponentVector;
pub use scalar::{Rational, Scalar};

/// Dense f64 matrix.
pub type RealMatrix = Matrix<f64>;
/// Dense exact rational matrix.
pub type RationalMatrix = Matrix<Rational>;
/// Single precision matrix, for the generic elimination and spectral routines.
pub type SingleMatrix = Matrix<f32>;
