//! Dense linear algebra with an explicit tolerance policy.
//!
//! [`Matrix`] and the elimination routines in [`elim`] are generic over
//! [`Scalar`](crate::scalar::Scalar); the spectral routines in [`decomp`]
//! need `num_traits::Float`. The functions in [`ops`] are the f64 entry
//! points used by the rest of the crate, with an optional exact mirror.

pub mod decomp;
pub mod elim;
mod index_set;
mod matrix;
pub mod ops;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use index_set::IndexSet;
pub use matrix::Matrix;
pub use ops::{
    cauchy_binet_logdet, inverse_sqrt_spd, logdet_spd, orthonormal_basis, orthonormal_complement,
    projection_onto_row_space, rank, ExactMirror, MirrorKind,
};

/// Largest column count for which subset enumeration is attempted.
pub const MAX_ENUMERATION: usize = 20;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected:?}, found {found:?}")]
    DimensionMismatch { expected: (usize, usize), found: (usize, usize) },
    #[error("matrix is not square ({0}x{1})")]
    NotSquare(usize, usize),
    #[error("matrix is singular")]
    Singular,
    #[error("rank is ambiguous: singular value {sigma:e} is within a factor 10 of threshold {threshold:e}")]
    RankAmbiguous { sigma: f64, threshold: f64 },
    #[error("float rank {float} disagrees with exact rank {exact}")]
    RankDisagreement { float: usize, exact: usize },
    #[error("Gram matrix A A^t is singular: the columns do not span")]
    SingularGram,
    #[error("matrix is not symmetric positive definite (eigenvalue {min_eigenvalue:e})")]
    NotSpd { min_eigenvalue: f64 },
    #[error("{n} columns exceeds the subset enumeration limit of {limit}")]
    TooManySubsets { n: usize, limit: usize },
    #[error("invalid tolerance policy: {0}")]
    InvalidTolerance(&'static str),
}

/// Tolerances used by numerical verdicts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TolerancePolicy {
    /// Singular values below `rank_rel_tol * sigma_max` count as zero.
    pub rank_rel_tol: f64,
    /// Relative eigenvalue floor for positive (semi)definiteness.
    pub psd_tol: f64,
    /// Euler-Lagrange residual accepted by the Newton solver.
    pub newton_tol: f64,
    /// Relative accuracy requested from quadratures.
    pub quadrature_rel_tol: f64,
}

impl Default for TolerancePolicy {
    fn default() -> Self {
        Self { rank_rel_tol: 1e-9, psd_tol: 1e-12, newton_tol: 1e-12, quadrature_rel_tol: 1e-6 }
    }
}

impl TolerancePolicy {
    pub fn validate(&self) -> Result<(), LinalgError> {
        let all = [self.rank_rel_tol, self.psd_tol, self.newton_tol, self.quadrature_rel_tol];
        if all.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
            return Err(LinalgError::InvalidTolerance("tolerances must be positive and finite"));
        }
        if self.rank_rel_tol >= 1.0 {
            return Err(LinalgError::InvalidTolerance("rank_rel_tol must be below 1"));
        }
        Ok(())
    }
}

/// Dense f64 matrix.
pub type RealMatrix = Matrix<f64>;
/// Dense exact rational matrix.
pub type RationalMatrix = Matrix<crate::scalar::Rational>;
