//! The Gaussian variational problem.
//!
//! With `t_j = ln s_j^2` and `φ(t) = ln det(A e^T A^t)`, the Gaussian
//! constant is obtained from the concave maximization of `z·t − φ(t)`:
//!
//! ```text
//! 2 ln D(z) = sup_t (z·t − φ(t)) − Σ_j z_j ln z_j.
//! ```
//!
//! The supremum is the Legendre transform `φ*(z)`; the entropy term comes
//! from the `L^{p_j}` norms of the Gaussians and is what makes the value
//! agree with the product formula `Π (p_j s_j^2)^{1/(2p_j)} det(A S^2 A^t)^{-1/2}`.

use thiserror::Error;

use crate::configuration::{ConfigError, Configuration};
use crate::linalg::decomp::{cholesky, cholesky_solve};
use crate::linalg::elim::determinant;
use crate::linalg::{LinalgError, Matrix, TolerancePolicy, MAX_ENUMERATION};
use crate::polytope::{classify, DecompositionNode, ExponentVector};
use crate::scalar::{format_rational, rational_from_int};
use crate::RealMatrix;

/// Iterates with `‖t‖_∞` beyond this are taken as escaping to infinity.
pub const DIVERGENCE_BOUND: f64 = 40.0;
const MAX_ITERATIONS: usize = 200;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GaussianError {
    #[error("A e^T A^t is singular: the vectors do not span")]
    SingularGram,
    #[error("Hessian is singular on the gauge slice (essential vectors {0:?})")]
    SingularHessian(Vec<usize>),
    #[error("exponents are not interior to K_A: {0}")]
    NotInterior(String),
    #[error("Newton iteration stalled with residual {residual:e} after {iterations} iterations")]
    NotConverged { residual: f64, iterations: usize },
    #[error("Euler-Lagrange residual {0:e} is too large")]
    ResidualTooLarge(f64),
    #[error("exponent vector has length {found}, expected {expected}")]
    LengthMismatch { expected: usize, found: usize },
    /// `Σ z_j ≠ M`; the residual would keep a component along `1` that no
    /// gauge-fixed step can remove.
    #[error("reciprocal exponents sum to {sum}, expected {m}")]
    ScalingViolated { sum: String, m: usize },
    #[error(transparent)]
    Config(#[from] ConfigError),
}

impl From<LinalgError> for GaussianError {
    fn from(e: LinalgError) -> Self {
        match e {
            LinalgError::SingularGram | LinalgError::NotSpd { .. } => GaussianError::SingularGram,
            other => GaussianError::Config(other.into()),
        }
    }
}

/// `φ` and its first two derivatives at `t`.
#[derive(Debug, Clone)]
pub struct ObjectiveState {
    pub t: Vec<f64>,
    pub phi: f64,
    pub grad: Vec<f64>,
    pub hess: RealMatrix,
}

/// Orthonormal basis `Q` (N×M) of the row space of `B = A S`, and
/// `ln det(B B^t)`, by modified Gram-Schmidt on the rows of `B`.
fn row_space_basis(b: &RealMatrix) -> Result<(RealMatrix, f64), GaussianError> {
    let (m, n) = b.shape();
    let mut q: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut logdet = 0.0;
    let scale = (0..m).map(|i| b.row(i).iter().map(|x| x * x).sum::<f64>().sqrt()).fold(0.0, f64::max);
    for i in 0..m {
        let mut v = b.row(i);
        for _ in 0..2 {
            for u in &q {
                let d: f64 = v.iter().zip(u).map(|(x, y)| x * y).sum();
                v.iter_mut().zip(u).for_each(|(x, y)| *x -= d * y);
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        // A spanning A gives a full-rank AS for every t; only a remainder at
        // rounding level means the factorization has broken down.
        if !(norm > 64.0 * f64::EPSILON * scale) {
            return Err(GaussianError::SingularGram);
        }
        logdet += 2.0 * norm.ln();
        v.iter_mut().for_each(|x| *x /= norm);
        q.push(v);
    }
    Ok((Matrix::from_columns(n, &q).expect("rows of B have length N"), logdet))
}

/// Evaluates `φ(t) = ln det(A e^T A^t)`, `∇φ = diag W` and
/// `∇²φ = diag(∇φ) − W∘W`, where `W = (AS)^t (AS^2A^t)^{-1} (AS)` is the
/// projection onto the row space of `AS`.
pub fn phi_eval(c: &Configuration, t: &[f64]) -> Result<ObjectiveState, GaussianError> {
    let n = c.len();
    if t.len() != n {
        return Err(GaussianError::LengthMismatch { expected: n, found: t.len() });
    }
    let shift = t.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let shift = if shift.is_finite() { shift } else { 0.0 };
    let s: Vec<f64> = t.iter().map(|tj| ((tj - shift) / 2.0).exp()).collect();
    let b = c.matrix().scale_columns(&s);
    let (q, logdet) = row_space_basis(&b)?;
    let w = q.matmul(&q.transpose())?;
    let grad = w.diag();
    let mut hess = RealMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            hess[(i, j)] = if i == j { grad[i] } else { 0.0 } - w[(i, j)] * w[(i, j)];
        }
    }
    Ok(ObjectiveState { t: t.to_vec(), phi: logdet + c.dim() as f64 * shift, grad, hess })
}

/// Converged (or trivially solved) Euler-Lagrange point.
#[derive(Debug, Clone)]
pub struct GaussianSolution {
    /// `t_j = ln s_j^2`, normalized to `Σ t_j = 0`.
    pub t: Vec<f64>,
    pub s: Vec<f64>,
    /// The Gaussian constant `D_G(p)`.
    pub d_value: f64,
    /// `φ*(z) = z·t* − φ(t*)`.
    pub legendre_value: f64,
    pub converged: bool,
    /// `max_j |z_j − s_j a_j·(AS^2A^t)^{-1} s_j a_j|`.
    pub residual: f64,
    pub iterations: usize,
    /// Residual after each Newton step.
    pub trace: Vec<f64>,
}

impl GaussianSolution {
    /// `exp(φ*(z)/2)`, the functional minimized by the canonical indices.
    pub fn legendre_constant(&self) -> f64 {
        (self.legendre_value / 2.0).exp()
    }
}

fn entropy_term(z: &[f64]) -> f64 {
    z.iter().filter(|&&v| v > 0.0).map(|&v| v * v.ln()).sum()
}

fn residual(z: &[f64], grad: &[f64]) -> f64 {
    z.iter().zip(grad).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

/// Damped Newton for `max_t z·t − φ(t)` on `Σ t_j = 0`, started at `t = 0`.
pub fn solve_euler_lagrange(
    c: &Configuration,
    z: &ExponentVector,
    tol: &TolerancePolicy,
) -> Result<GaussianSolution, GaussianError> {
    let n = c.len();
    if z.len() != n {
        return Err(GaussianError::LengthMismatch { expected: n, found: z.len() });
    }
    if !c.spans {
        return Err(GaussianError::SingularGram);
    }
    if z.sum() != rational_from_int(c.dim() as i64) {
        return Err(GaussianError::ScalingViolated { sum: format_rational(&z.sum()), m: c.dim() });
    }
    let zf = z.values();
    if n == c.dim() {
        // Every vector is essential; the only admissible z is all ones and
        // the objective is constant on the gauge slice.
        let t = vec![0.0; n];
        let st = phi_eval(c, &t)?;
        let res = residual(&zf, &st.grad);
        if res > tol.newton_tol.max(1e-12) {
            return Err(GaussianError::NotInterior("with N = M every reciprocal exponent must be 1".into()));
        }
        return Ok(solution(&zf, t, &st, 0, vec![res]));
    }
    let essential = c.essential();
    if !essential.is_empty() {
        return Err(GaussianError::SingularHessian(essential.to_vec()));
    }
    interior_gate(c, z)?;
    let objective = |st: &ObjectiveState| -> f64 {
        zf.iter().zip(&st.t).map(|(a, b)| a * b).sum::<f64>() - st.phi
    };
    let mut t = vec![0.0; n];
    let mut st = phi_eval(c, &t)?;
    let mut trace = Vec::new();
    let inv_n = 1.0 / n as f64;
    for iter in 0..MAX_ITERATIONS {
        let r: Vec<f64> = zf.iter().zip(&st.grad).map(|(a, b)| a - b).collect();
        let res = r.iter().map(|x| x.abs()).fold(0.0, f64::max);
        trace.push(res);
        if res < tol.newton_tol {
            return Ok(solution(&zf, t, &st, iter, trace));
        }
        // (H + 11^t/N) d = z − ∇φ, with Levenberg-Marquardt damping as fallback.
        let mut k = st.hess.clone();
        for i in 0..n {
            for j in 0..n {
                k[(i, j)] += inv_n;
            }
        }
        let mut mu = 0.0;
        let d = loop {
            let mut km = k.clone();
            for i in 0..n {
                km[(i, i)] += mu;
            }
            if let Ok(l) = cholesky(&km) {
                break cholesky_solve(&l, &r);
            }
            mu = if mu == 0.0 { 1e-12 } else { mu * 10.0 };
            if mu > 1e6 {
                return Err(GaussianError::SingularHessian(Vec::new()));
            }
        };
        let mean = d.iter().sum::<f64>() * inv_n;
        let d: Vec<f64> = d.iter().map(|x| x - mean).collect();
        let slope: f64 = r.iter().zip(&d).map(|(a, b)| a * b).sum();
        let f0 = objective(&st);
        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let trial: Vec<f64> = t.iter().zip(&d).map(|(a, b)| a + alpha * b).collect();
            let norm = trial.iter().map(|x| x.abs()).fold(0.0, f64::max);
            // A full step can overshoot far when the Hessian is nearly
            // singular; only a step that would be accepted counts as escaping.
            let Ok(cand) = phi_eval(c, &trial) else {
                alpha *= 0.5;
                continue;
            };
            if objective(&cand) >= f0 + 1e-4 * alpha * slope - 1e-15 * f0.abs().max(1.0) {
                if norm > DIVERGENCE_BOUND {
                    return Err(GaussianError::NotInterior(format!("Newton iterates escape to infinity (|t| = {norm:.1})")));
                }
                accepted = Some((trial, cand));
                break;
            }
            alpha *= 0.5;
        }
        let Some((nt, nst)) = accepted else {
            return Err(GaussianError::NotConverged { residual: res, iterations: iter });
        };
        t = nt;
        st = nst;
    }
    let res = residual(&zf, &st.grad);
    Err(GaussianError::NotConverged { residual: res, iterations: MAX_ITERATIONS })
}

/// Exact check that no proper subset is critical or supercritical. On the
/// boundary the residual decays only exponentially in `‖t‖`, so the Newton
/// tolerance can be met long before the iterates look divergent.
fn interior_gate(c: &Configuration, z: &ExponentVector) -> Result<(), GaussianError> {
    if c.len() > MAX_ENUMERATION {
        return Ok(());
    }
    let table = match c.rank_table() {
        Ok(t) => t,
        // Ambiguous float ranks: rely on the divergence bound.
        Err(ConfigError::Linalg(LinalgError::RankAmbiguous { .. })) => return Ok(()),
        Err(e) => return Err(e.into()),
    };
    let (critical, witness) = classify(c, z, &table);
    if let Some(w) = witness {
        return Err(GaussianError::NotInterior(format!("subset {w} is supercritical")));
    }
    if let Some(s) = critical.first() {
        return Err(GaussianError::NotInterior(format!("subset {s} is critical")));
    }
    Ok(())
}

fn solution(
    z: &[f64],
    t: Vec<f64>,
    st: &ObjectiveState,
    iterations: usize,
    trace: Vec<f64>,
) -> GaussianSolution {
    let legendre_value = z.iter().zip(&t).map(|(a, b)| a * b).sum::<f64>() - st.phi;
    let d_value = ((legendre_value - entropy_term(z)) / 2.0).exp();
    GaussianSolution {
        s: t.iter().map(|x| (x / 2.0).exp()).collect(),
        t,
        d_value,
        legendre_value,
        converged: true,
        residual: residual(z, &st.grad),
        iterations,
        trace,
    }
}

/// Product formula `Π_j (p_j s_j^2)^{1/(2p_j)} · det(A S^2 A^t)^{-1/2}`,
/// refused unless `s` satisfies the Euler-Lagrange equation.
pub fn d_value_from_solution(c: &Configuration, z: &ExponentVector, s: &[f64]) -> Result<f64, GaussianError> {
    let t: Vec<f64> = s.iter().map(|x| 2.0 * x.ln()).collect();
    let st = phi_eval(c, &t)?;
    let zf = z.values();
    let res = residual(&zf, &st.grad);
    if res > 1e-8 {
        return Err(GaussianError::ResidualTooLarge(res));
    }
    let log_prod: f64 = zf
        .iter()
        .zip(&t)
        .filter(|(zj, _)| **zj > 0.0)
        .map(|(zj, tj)| 0.5 * zj * (tj - zj.ln()))
        .sum();
    Ok((log_prod - 0.5 * st.phi).exp())
}

/// `n` unit vectors in `R^{n-1}` with pairwise dot products `−1/(n−1)`,
/// and `z_j = (n−1)/n`.
///
/// The coordinates are taken in an orthonormal (Helmert) basis of the
/// hyperplane `Σ x_i = 0` of `R^n`; the exact mirror uses the rational
/// basis `e_k − e_n`, which has the same column matroid.
pub fn planar_constraint_configuration(n: usize) -> Result<(Configuration, ExponentVector), GaussianError> {
    assert!(n >= 3, "planar constraint configuration needs n >= 3");
    let m = n - 1;
    // Helmert basis h_k (k = 1..n-1): (1,..,1,-k,0,..)/sqrt(k(k+1)).
    let helmert: Vec<Vec<f64>> = (1..n)
        .map(|k| {
            let norm = ((k * (k + 1)) as f64).sqrt();
            (0..n)
                .map(|i| match i.cmp(&k) {
                    std::cmp::Ordering::Less => 1.0 / norm,
                    std::cmp::Ordering::Equal => -(k as f64) / norm,
                    std::cmp::Ordering::Greater => 0.0,
                })
                .collect()
        })
        .collect();
    let scale = (n as f64 / (n - 1) as f64).sqrt();
    let mut a = RealMatrix::zeros(m, n);
    for j in 0..n {
        // e_j − 1/n, normalized, in Helmert coordinates (h_k ⊥ 1).
        for k in 0..m {
            a[(k, j)] = helmert[k][j] * scale;
        }
    }
    use crate::scalar::rational;
    let mut exact = crate::RationalMatrix::zeros(m, n);
    for j in 0..n {
        for k in 0..m {
            let delta = if j == k { 1 } else { 0 };
            exact[(k, j)] = rational(delta * n as i64 - 1, n as i64);
        }
    }
    let c = Configuration::build(a, Some(crate::linalg::ExactMirror::coordinates(exact)), TolerancePolicy::default())?;
    let z = ExponentVector::from_rationals(vec![rational((n - 1) as i64, n as i64); n]);
    Ok((c, z))
}

/// `D` of an interior leaf: 1 in dimension zero, `1/|det A|` when every
/// vector is essential, and the Newton solution otherwise.
pub fn leaf_constant(node: &DecompositionNode, tol: &TolerancePolicy) -> Result<f64, GaussianError> {
    let c = &node.configuration;
    if c.dim() == 0 {
        return Ok(1.0);
    }
    if c.len() == c.dim() {
        return Ok(1.0 / determinant(c.matrix())?.abs());
    }
    Ok(solve_euler_lagrange(c, &node.exponents, tol)?.d_value)
}

/// `D(p)` for a boundary point as the product of its leaf constants.
pub fn decomposition_constant(node: &DecompositionNode, tol: &TolerancePolicy) -> Result<f64, GaussianError> {
    node.fold_product(&mut |leaf| leaf_constant(leaf, tol))
}
