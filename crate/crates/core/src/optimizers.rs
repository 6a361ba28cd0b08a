//! Canonical indices, Gaussian optimizer families, the boundary existence
//! decision, vertex constants and polynomial phase relations.

use std::sync::OnceLock;

use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::configuration::{ConfigError, Configuration};
use crate::gaussian::{GaussianError, GaussianSolution};
use crate::linalg::elim::{determinant, exact_determinant, nullspace, solve};
use crate::linalg::{orthonormal_basis, projection_onto_row_space, rank, IndexSet, LinalgError, MirrorKind, TolerancePolicy};
use crate::polytope::{decompose, membership, DecompositionNode, ExponentVector, PolytopeError};
use crate::scalar::{snap_rational, to_f64, Rational};
use crate::{RationalMatrix, RealMatrix};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OptimizerError {
    #[error("configuration is defective: {0}")]
    DefectiveConfiguration(String),
    #[error("solution has not converged (residual {0:e})")]
    NotConverged(f64),
    #[error("exponents are interior to K_A; use the Gaussian description")]
    InteriorPoint,
    #[error("exponents include p_j = infinity at indices {0:?}")]
    VertexPoint(Vec<usize>),
    #[error("subset {0} is not a basis")]
    NotABasis(IndexSet),
    #[error("degree {degree} with {monomials} monomials exceeds the enumeration limit")]
    DegreeTooLarge { degree: usize, monomials: usize },
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    #[error(transparent)]
    Gaussian(#[from] GaussianError),
}

impl From<ConfigError> for OptimizerError {
    fn from(e: ConfigError) -> Self {
        match e {
            ConfigError::Defective(d) => OptimizerError::DefectiveConfiguration(d),
            other => OptimizerError::Polytope(other.into()),
        }
    }
}

impl From<LinalgError> for OptimizerError {
    fn from(e: LinalgError) -> Self {
        OptimizerError::from(ConfigError::from(e))
    }
}

/// Canonical indices `p°_j = 1/P_jj` and the best constant over `K_A`.
#[derive(Debug, Clone)]
pub struct CanonicalReport {
    pub p_circ: Vec<f64>,
    pub z_circ: ExponentVector,
    /// Whether `z°` was obtained in exact arithmetic.
    pub exact: bool,
    /// `Π_j P_jj^{-P_jj/2} · det(AA^t)^{-1/2}`.
    pub d_best_best: f64,
    pub interior: bool,
}

/// Exact `diag(A^t (AA^t)^{-1} A)` for a rational matrix.
pub fn exact_projection_diagonal(a: &RationalMatrix) -> Result<Vec<Rational>, LinalgError> {
    let gram = a.matmul(&a.transpose())?;
    let x = solve(&gram, a)?;
    Ok((0..a.cols()).map(|j| (0..a.rows()).fold(Rational::zero(), |s, i| s + &a[(i, j)] * &x[(i, j)])).collect())
}

pub fn canonical_indices(c: &Configuration, tol: &TolerancePolicy) -> Result<CanonicalReport, OptimizerError> {
    c.require_nondegenerate()?;
    let a = c.matrix();
    let p = projection_onto_row_space(a, tol)?;
    let diag = p.diag();
    let (z_circ, exact) = match c.mirror() {
        Some(m) if m.kind == MirrorKind::Entrywise => {
            (ExponentVector::from_rationals(exact_projection_diagonal(&m.matrix)?), true)
        }
        _ => {
            let z: Option<Vec<Rational>> = diag.iter().map(|&d| snap_rational(d, 1_000_000)).collect();
            let z = z.ok_or(OptimizerError::Polytope(PolytopeError::InvalidExponent { index: 0 }))?;
            (ExponentVector::from_rationals(z), false)
        }
    };
    let logdet = determinant(&a.matmul(&a.transpose())?)?.ln();
    let log_d: f64 = diag.iter().map(|&q| -q * q.ln() / 2.0).sum::<f64>() - logdet / 2.0;
    let interior = if c.properly_redundant() && exact {
        let r = membership(c, &z_circ)?;
        assert!(r.member, "canonical indices must lie in K_A");
        r.interior
    } else {
        c.properly_redundant()
    };
    Ok(CanonicalReport {
        p_circ: z_circ.p_values(),
        z_circ,
        exact,
        d_best_best: log_d.exp(),
        interior,
    })
}

/// Family of Gaussian optimizers at an interior point:
/// `f_j(y) ∝ exp(−(κ/2) s_j^2 (y − b_j)^2)` for any `κ > 0` and any
/// `b` in the row space of `A`.
#[derive(Debug, Clone, Serialize)]
pub struct GaussianFamily {
    /// Widths up to a common scale, normalized to `Π s_j = 1`.
    pub s: Vec<f64>,
    /// Columns form an orthonormal basis of `Img(A^t)` (admissible translations).
    pub translation_basis: Vec<Vec<f64>>,
    /// `A S^2 A^t`: the product of the optimizers is `∝ exp(−x^t (AS^2A^t) x / 4)`.
    pub product_form: Vec<Vec<f64>>,
}

/// Existence verdict for one split of the decomposition.
#[derive(Debug, Clone, Serialize)]
pub struct SplitVerdict {
    /// The critical set, in root indices.
    pub subset: Vec<usize>,
    pub rank_s: usize,
    pub rank_b_c: usize,
    pub rank_c: usize,
    /// `Img(B) ⊆ Img(C)`.
    pub compatible: bool,
}

#[derive(Debug, Clone)]
pub struct OptimizerReport {
    pub exists: bool,
    pub gaussian: Option<GaussianFamily>,
    pub decomposition: Option<DecompositionNode>,
    pub splits: Vec<SplitVerdict>,
    pub failure_split: Option<Vec<usize>>,
}

pub fn describe_optimizers(
    c: &Configuration,
    z: &ExponentVector,
    sol: &GaussianSolution,
) -> Result<OptimizerReport, OptimizerError> {
    if !sol.converged || sol.residual > 1e-8 {
        return Err(OptimizerError::NotConverged(sol.residual));
    }
    let _ = z;
    let mean = sol.t.iter().sum::<f64>() / sol.t.len() as f64;
    let s: Vec<f64> = sol.t.iter().map(|t| ((t - mean) / 2.0).exp()).collect();
    let q = orthonormal_basis(&c.matrix().transpose(), c.dim());
    let s2: Vec<f64> = s.iter().map(|x| x * x).collect();
    let a = c.matrix();
    let form = a.scale_columns(&s2).matmul(&a.transpose())?;
    let rows = |m: &RealMatrix| (0..m.rows()).map(|i| m.row(i)).collect::<Vec<_>>();
    Ok(OptimizerReport {
        exists: true,
        gaussian: Some(GaussianFamily { s, translation_basis: q.columns(), product_form: rows(&form) }),
        decomposition: None,
        splits: Vec::new(),
        failure_split: None,
    })
}

/// Decides existence of optimizers at a boundary point by checking
/// `Img(B) ⊆ Img(C)`, `B = A_{S^c}^t U`, `C = A_{S^c}^t V`, at every split.
///
/// Because `[B C] = A_{S^c}^t [U V]` with `[U V]` orthogonal,
/// `rank [B C] = r(S^c)` and `rank C = M − r(S)`; the exact predicate
/// `r(S^c) = M − r(S)` is evaluated alongside the float ranks and the two
/// must agree.
pub fn decide_boundary_optimizers(c: &Configuration, z: &ExponentVector) -> Result<OptimizerReport, OptimizerError> {
    let report = membership(c, z)?;
    if report.member && report.interior {
        return Err(OptimizerError::InteriorPoint);
    }
    let infinite: Vec<usize> = (0..z.len()).filter(|&j| z.exact()[j].is_zero()).collect();
    if !infinite.is_empty() {
        return Err(OptimizerError::VertexPoint(infinite));
    }
    let tree = decompose(c, z)?;
    let mut splits = Vec::new();
    collect_splits(&tree, &mut splits)?;
    let failure_split = splits.iter().find(|v| !v.compatible).map(|v| v.subset.clone());
    Ok(OptimizerReport {
        exists: failure_split.is_none(),
        gaussian: None,
        decomposition: Some(tree),
        splits,
        failure_split,
    })
}

fn collect_splits(node: &DecompositionNode, out: &mut Vec<SplitVerdict>) -> Result<(), OptimizerError> {
    let Some(split) = &node.split else { return Ok(()) };
    let cfg = &node.configuration;
    let n = cfg.len();
    let comp = split.subset.complement(n);
    let comp_idx = comp.to_vec();
    let f = &split.factorization;
    let a_c = cfg.matrix().select_columns(&comp_idx);
    let b = a_c.transpose().matmul(&f.u_basis)?;
    let cm = a_c.transpose().matmul(&f.v_basis)?;
    let tol = cfg.tolerances();
    let rank_bc = rank(&b.hstack(&cm)?, None, tol)?;
    let rank_c = rank(&cm, None, tol)?;
    let float_ok = rank_bc == rank_c;
    let r_s = cfg.subset_rank(split.subset)?;
    let r_comp = cfg.subset_rank(comp)?;
    let exact_ok = r_comp == cfg.dim() - r_s;
    assert_eq!(
        float_ok, exact_ok,
        "column-space containment disagrees between float ranks ({rank_bc} vs {rank_c}) and exact ranks"
    );
    out.push(SplitVerdict {
        subset: split.subset.iter().map(|j| node.indices[j]).collect(),
        rank_s: r_s,
        rank_b_c: r_comp,
        rank_c: cfg.dim() - r_s,
        compatible: exact_ok,
    });
    collect_splits(&split.left, out)?;
    collect_splits(&split.right, out)
}

/// `∫∫ f(2 x_1) f(x_2) dx / (∫f)^2` for `f(y) = exp(−y^2)`, by a
/// trapezoid rule on `[−10, 10]^2`; the substitution gives 1/2.
fn substitution_ratio() -> f64 {
    let steps = 800;
    let h = 20.0 / steps as f64;
    let f = |y: f64| (-y * y).exp();
    let mut one_d = 0.0;
    for i in 0..=steps {
        let x = -10.0 + i as f64 * h;
        let w = if i == 0 || i == steps { 0.5 } else { 1.0 };
        one_d += w * f(x) * h;
    }
    let mut two_d = 0.0;
    for i in 0..=steps {
        let x1 = -10.0 + i as f64 * h;
        let w1 = if i == 0 || i == steps { 0.5 } else { 1.0 };
        for k in 0..=steps {
            let x2 = -10.0 + k as f64 * h;
            let w2 = if k == 0 || k == steps { 0.5 } else { 1.0 };
            two_d += w1 * w2 * f(2.0 * x1) * f(x2) * h * h;
        }
    }
    two_d / (one_d * one_d)
}

/// Exponent `e` in `D = det(A_S A_S^t)^e` at a vertex, estimated from the
/// substitution oracle with `A_S = diag(2, 1)`.
pub fn vertex_exponent_estimate() -> f64 {
    substitution_ratio().ln() / 4f64.ln()
}

/// The resolved vertex exponent. Computed once from the oracle and
/// asserted to be `−1/2`.
pub fn vertex_exponent() -> f64 {
    static EXPONENT: OnceLock<f64> = OnceLock::new();
    *EXPONENT.get_or_init(|| {
        let e = vertex_exponent_estimate();
        let resolved = if (e + 0.5).abs() < (e - 0.5).abs() { -0.5 } else { 0.5 };
        assert!((e - resolved).abs() < 1e-9, "substitution oracle gave exponent {e}");
        assert_eq!(resolved, -0.5, "vertex exponent must be -1/2");
        resolved
    })
}

/// `D` at the vertex indicator of the basis `s`: `det(A_S A_S^t)^{-1/2}`.
pub fn vertex_constant(c: &Configuration, s: IndexSet) -> Result<f64, OptimizerError> {
    if s.len() != c.dim() || c.subset_rank(s)? != c.dim() {
        return Err(OptimizerError::NotABasis(s));
    }
    let idx = s.to_vec();
    let e = vertex_exponent();
    let gram_det = match c.mirror() {
        Some(m) if m.kind == MirrorKind::Entrywise => {
            let sub = m.matrix.select_columns(&idx);
            let d = exact_determinant(&sub)?;
            to_f64(&(&d * &d))
        }
        _ => {
            let d = determinant(&c.matrix().select_columns(&idx))?;
            d * d
        }
    };
    Ok(gram_det.powf(e))
}

/// Relations `Σ_j φ_j(a_j·x) ≡ 0` with polynomial `φ_j`, no constant term.
#[derive(Debug, Clone, Serialize)]
pub struct PhaseBasis {
    pub max_degree: usize,
    pub basis: Vec<PhaseRelation>,
}

/// A homogeneous relation: `φ_j(y) = coefficients[j] · y^degree`.
#[derive(Debug, Clone, Serialize)]
pub struct PhaseRelation {
    pub degree: usize,
    pub coefficients: Vec<f64>,
    /// Exact coefficients when the configuration is rational.
    #[serde(skip)]
    pub exact: Option<Vec<Rational>>,
}

impl PhaseRelation {
    /// The relation as `N` coefficient vectors of `y^1, .., y^max_degree`.
    pub fn polynomials(&self, max_degree: usize) -> Vec<Vec<f64>> {
        self.coefficients
            .iter()
            .map(|&c| (1..=max_degree).map(|d| if d == self.degree { c } else { 0.0 }).collect())
            .collect()
    }

    /// `Σ_j φ_j(a_j·x)`.
    pub fn evaluate(&self, a: &RealMatrix, x: &[f64]) -> f64 {
        (0..a.cols())
            .map(|j| {
                let y: f64 = (0..a.rows()).map(|i| a[(i, j)] * x[i]).sum();
                self.coefficients[j] * y.powi(self.degree as i32)
            })
            .sum()
    }
}

const MAX_PHASE_UNKNOWNS: usize = 200_000;

/// Exponent vectors `α` with `|α| = d` in `m` variables, in lexicographic order.
pub fn monomials(m: usize, d: usize) -> Vec<Vec<usize>> {
    if m == 0 {
        return if d == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for first in (0..=d).rev() {
        for mut rest in monomials(m - 1, d - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1usize, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// Multinomial expansion coefficients of `(v·x)^d` on `monos`.
fn expansion<T: crate::scalar::Scalar>(v: &[T], monos: &[Vec<usize>]) -> Vec<T> {
    monos
        .iter()
        .map(|alpha| {
            let d: usize = alpha.iter().sum();
            let mut coef = T::from_u64(multinomial(d, alpha)).expect("multinomial fits");
            for (vi, &ai) in v.iter().zip(alpha) {
                for _ in 0..ai {
                    coef = coef * vi.clone();
                }
            }
            coef
        })
        .collect()
}

fn multinomial(d: usize, alpha: &[usize]) -> u64 {
    let mut left = d;
    let mut acc: u64 = 1;
    for &a in alpha {
        acc *= binomial(left, a) as u64;
        left -= a;
    }
    acc
}

/// All homogeneous relations of degrees `1..=max_degree` for any configuration.
pub fn polynomial_relations(c: &Configuration, max_degree: usize) -> Result<PhaseBasis, OptimizerError> {
    let (m, n) = (c.dim(), c.len());
    let mut basis = Vec::new();
    for d in 1..=max_degree {
        let count = binomial(m + d - 1, d);
        if count.saturating_mul(n) > MAX_PHASE_UNKNOWNS {
            return Err(OptimizerError::DegreeTooLarge { degree: d, monomials: count });
        }
        let monos = monomials(m, d);
        match c.mirror() {
            Some(mirror) if mirror.kind != MirrorKind::Coordinates => {
                let cols: Vec<Vec<Rational>> =
                    (0..n).map(|j| expansion(&mirror.matrix.column(j), &monos)).collect();
                let sys = RationalMatrix::from_columns(monos.len(), &cols)?;
                for v in nullspace(&sys) {
                    // Undo the column scales: a_j = λ_j dir_j.
                    let (exact, coefficients) = match &mirror.kind {
                        MirrorKind::ColumnScaled(scales) => {
                            let f: Vec<f64> =
                                v.iter().zip(scales).map(|(c, l)| to_f64(c) / l.powi(d as i32)).collect();
                            (None, f)
                        }
                        _ => (Some(v.clone()), v.iter().map(to_f64).collect()),
                    };
                    let coefficients = normalize(coefficients);
                    basis.push(PhaseRelation { degree: d, coefficients, exact });
                }
            }
            _ => {
                let cols: Vec<Vec<f64>> = (0..n).map(|j| expansion(&c.column(j), &monos)).collect();
                let sys = RealMatrix::from_columns(monos.len(), &cols)?;
                for v in nullspace(&sys) {
                    basis.push(PhaseRelation { degree: d, coefficients: normalize(v), exact: None });
                }
            }
        }
    }
    Ok(PhaseBasis { max_degree, basis })
}

/// Scales so that the largest coefficient has magnitude 1.
fn normalize(v: Vec<f64>) -> Vec<f64> {
    let m = v.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    if m == 0.0 {
        v
    } else {
        v.iter().map(|x| x / m).collect()
    }
}

/// Phase relations of degree at most `N − M` for a properly redundant configuration.
pub fn phase_relations(c: &Configuration) -> Result<PhaseBasis, OptimizerError> {
    c.require_properly_redundant()?;
    polynomial_relations(c, c.len() - c.dim())
}

/// Checks `Σ_j c_j (a_j·x)^d = 0` by an independent expansion in exact arithmetic.
pub fn verify_relation_exact(a: &RationalMatrix, rel: &[Rational], degree: usize) -> bool {
    let monos = monomials(a.rows(), degree);
    let mut total = vec![Rational::zero(); monos.len()];
    for (j, cj) in rel.iter().enumerate() {
        // Repeated multiplication of the linear form, independent of the multinomial table.
        let mut poly: std::collections::BTreeMap<Vec<usize>, Rational> = std::collections::BTreeMap::new();
        poly.insert(vec![0; a.rows()], Rational::one());
        for _ in 0..degree {
            let mut next = std::collections::BTreeMap::new();
            for (alpha, coef) in &poly {
                for i in 0..a.rows() {
                    if a[(i, j)].is_zero() {
                        continue;
                    }
                    let mut beta = alpha.clone();
                    beta[i] += 1;
                    let e: &mut Rational = next.entry(beta).or_insert_with(Rational::zero);
                    *e += coef * &a[(i, j)];
                }
            }
            poly = next;
        }
        for (k, alpha) in monos.iter().enumerate() {
            if let Some(v) = poly.get(alpha) {
                total[k] += cj * v;
            }
        }
    }
    total.iter().all(Zero::is_zero)
}

/// Coefficients of `rel` are a scalar multiple of `target`.
pub fn proportional(rel: &[f64], target: &[f64], tol: f64) -> bool {
    let k = rel
        .iter()
        .zip(target)
        .find(|(_, t)| t.abs() > tol)
        .map(|(r, t)| r / t);
    match k {
        Some(k) if k != 0.0 => rel.iter().zip(target).all(|(r, t)| (r - k * t).abs() <= tol * k.abs().max(1.0)),
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::solve_euler_lagrange;
    use crate::linalg::Matrix;
    use crate::scalar::rational;

    fn cols(m: usize, c: &[&[f64]]) -> RealMatrix {
        Matrix::from_columns(m, &c.iter().map(|v| v.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn cfg(m: usize, c: &[&[f64]]) -> Configuration {
        Configuration::new(cols(m, c), TolerancePolicy::default()).unwrap()
    }

    fn example6() -> Configuration {
        cfg(3, &[&[1., -1., 0.], &[0., 1., -1.], &[-1., 0., 1.], &[1., 0., 0.], &[0., 1., 0.]])
    }

    fn zq(v: &[(i64, i64)]) -> ExponentVector {
        ExponentVector::from_rationals(v.iter().map(|&(a, b)| rational(a, b)).collect())
    }

    #[test]
    fn canonical_indices_of_example() {
        let r = canonical_indices(&example6(), &TolerancePolicy::default()).unwrap();
        assert!(r.exact && r.interior);
        assert_eq!(r.z_circ, zq(&[(1, 2), (5, 8), (5, 8), (5, 8), (5, 8)]));
        assert_eq!(r.z_circ.p_strings(), vec!["2", "8/5", "8/5", "8/5", "8/5"]);
    }

    #[test]
    fn canonical_indices_of_identity() {
        let c = Configuration::new(Matrix::identity(3), TolerancePolicy::default()).unwrap();
        let r = canonical_indices(&c, &TolerancePolicy::default()).unwrap();
        assert_eq!(r.p_circ, vec![1.0; 3]);
        assert!((r.d_best_best - 1.0).abs() < 1e-15);
    }

    #[test]
    fn canonical_indices_under_frame_condition() {
        // Four unit vectors at 45 degrees with weights 1/2 satisfy Σ c_j u_j u_j^t = I.
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let w = 0.5f64.sqrt();
        let c = cfg(2, &[&[w, 0.], &[0., w], &[w * h, w * h], &[w * h, -w * h]]);
        let r = canonical_indices(&c, &TolerancePolicy::default()).unwrap();
        for p in r.p_circ {
            assert!((p - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn young_optimizer_family() {
        let c = cfg(2, &[&[1., 0.], &[-1., -1.], &[0., 1.]]);
        let z = zq(&[(2, 3), (2, 3), (2, 3)]);
        let sol = solve_euler_lagrange(&c, &z, &TolerancePolicy::default()).unwrap();
        let rep = describe_optimizers(&c, &z, &sol).unwrap();
        let fam = rep.gaussian.unwrap();
        assert!(fam.s.iter().all(|s| (s - 1.0).abs() < 1e-12));
        assert_eq!(fam.translation_basis.len(), 2);
    }

    #[test]
    fn example_boundary_has_no_optimizers() {
        let c = example6();
        let z = zq(&[(2, 3), (2, 3), (2, 3), (1, 2), (1, 2)]);
        let rep = decide_boundary_optimizers(&c, &z).unwrap();
        assert!(!rep.exists);
        assert_eq!(rep.failure_split, Some(vec![0, 1, 2]));
        assert_eq!((rep.splits[0].rank_b_c, rep.splits[0].rank_c), (2, 1));
    }

    #[test]
    fn orthogonal_complement_boundary_has_optimizers() {
        let c = cfg(3, &[&[1., 0., 0.], &[0., 1., 0.], &[1., 1., 0.], &[0., 0., 1.]]);
        let z = zq(&[(2, 3), (2, 3), (2, 3), (1, 1)]);
        let rep = decide_boundary_optimizers(&c, &z).unwrap();
        assert!(rep.exists);
        assert!(rep.failure_split.is_none());
    }

    #[test]
    fn boundary_decision_errors() {
        let c = example6();
        let interior = zq(&[(1, 2), (5, 8), (5, 8), (5, 8), (5, 8)]);
        assert_eq!(decide_boundary_optimizers(&c, &interior).unwrap_err(), OptimizerError::InteriorPoint);
        let vertex = ExponentVector::indicator(5, IndexSet::from_indices([0, 1, 3]));
        assert!(matches!(decide_boundary_optimizers(&c, &vertex), Err(OptimizerError::VertexPoint(_))));
    }

    #[test]
    fn vertex_exponent_is_negative_half() {
        assert!((vertex_exponent_estimate() + 0.5).abs() < 1e-9);
        assert_eq!(vertex_exponent(), -0.5);
    }

    #[test]
    fn vertex_constants() {
        let id = Configuration::new(Matrix::identity(2), TolerancePolicy::default()).unwrap();
        assert_eq!(vertex_constant(&id, IndexSet::full(2)).unwrap(), 1.0);
        let d = cfg(2, &[&[2., 0.], &[0., 1.]]);
        assert!((vertex_constant(&d, IndexSet::full(2)).unwrap() - 0.5).abs() < 1e-15);
        let c = example6();
        // det[a_0 a_3 a_4] = 0, det[a_0 a_1 a_3] = 1.
        assert!(matches!(vertex_constant(&c, IndexSet::from_indices([0, 3, 4])), Err(OptimizerError::NotABasis(_))));
        assert!((vertex_constant(&c, IndexSet::from_indices([0, 1, 3])).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn phase_relations_of_four_planar_vectors() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let c = cfg(2, &[&[1., 0.], &[0., 1.], &[h, h], &[h, -h]]);
        let basis = phase_relations(&c).unwrap();
        assert_eq!(basis.max_degree, 2);
        let quadratic: Vec<&PhaseRelation> = basis.basis.iter().filter(|r| r.degree == 2).collect();
        assert_eq!(quadratic.len(), 1);
        assert!(proportional(&quadratic[0].coefficients, &[-1., -1., 1., 1.], 1e-12));
        assert_eq!(basis.basis.iter().filter(|r| r.degree == 1).count(), 2);
        for r in &basis.basis {
            assert!(r.evaluate(c.matrix(), &[0.3, -1.7]).abs() < 1e-12);
        }
    }

    #[test]
    fn phase_relations_of_triple() {
        let c = cfg(2, &[&[1., 0.], &[-1., -1.], &[0., 1.]]);
        let basis = phase_relations(&c).unwrap();
        assert_eq!(basis.basis.len(), 1);
        let r = &basis.basis[0];
        assert_eq!(r.degree, 1);
        assert!(proportional(&r.coefficients, &[1., 1., 1.], 1e-12));
        let m = c.mirror().unwrap();
        assert!(verify_relation_exact(&m.matrix, r.exact.as_ref().unwrap(), 1));
    }

    #[test]
    fn no_relations_for_independent_vectors() {
        let c = Configuration::new(Matrix::identity(3), TolerancePolicy::default()).unwrap();
        assert!(phase_relations(&c).is_err());
        assert!(polynomial_relations(&c, 2).unwrap().basis.is_empty());
    }

    #[test]
    fn degree_guard() {
        let c = Configuration::new(RealMatrix::zeros(12, 12), TolerancePolicy::default()).unwrap();
        assert!(matches!(polynomial_relations(&c, 12), Err(OptimizerError::DegreeTooLarge { .. })));
    }

    #[test]
    fn monomial_counts() {
        assert_eq!(monomials(3, 2).len(), 6);
        assert_eq!(monomials(2, 3), vec![vec![3, 0], vec![2, 1], vec![1, 2], vec![0, 3]]);
        assert_eq!(multinomial(3, &[1, 1, 1]), 6);
    }
}
