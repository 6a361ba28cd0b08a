//! f64 entry points: tolerance-aware rank, projections, inverse square
//! roots, orthonormal bases and the Cauchy-Binet expansion.

use super::decomp::{cholesky, cholesky_solve, singular_values, symmetric_eigen};
use super::elim::{determinant, exact_rank};
use super::{IndexSet, LinalgError, RationalMatrix, RealMatrix, TolerancePolicy, MAX_ENUMERATION};
use crate::scalar::{snap_rational, to_f64, Rational};

const MIRROR_MAX_DEN: u64 = 1_000_000;

/// Exact rational counterpart of a float matrix.
///
/// The rational matrix always has the same column matroid as the float
/// one, which is all that ranks and criticality depend on. `kind` records
/// how the two are related.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactMirror {
    pub matrix: RationalMatrix,
    pub kind: MirrorKind,
}

#[derive(Debug, Clone, PartialEq)]
pub enum MirrorKind {
    /// Entries agree to within conversion rounding.
    Entrywise,
    /// Float column `j` is `scales[j]` times rational column `j`.
    ColumnScaled(Vec<f64>),
    /// Rational coordinates after an unrecorded invertible linear change.
    Coordinates,
}

impl ExactMirror {
    pub fn entrywise(matrix: RationalMatrix) -> Self {
        Self { matrix, kind: MirrorKind::Entrywise }
    }

    pub fn coordinates(matrix: RationalMatrix) -> Self {
        Self { matrix, kind: MirrorKind::Coordinates }
    }

    /// Finds a mirror for `m` whose entries (or column directions) are
    /// rationals with denominator at most 10^6; `None` if there is none.
    pub fn detect(m: &RealMatrix) -> Option<Self> {
        Self::detect_entrywise(m).or_else(|| Self::detect_directions(m))
    }

    fn detect_entrywise(m: &RealMatrix) -> Option<Self> {
        let entries: Option<Vec<Rational>> = m
            .as_slice()
            .iter()
            .map(|&x| {
                let r = snap_rational(x, MIRROR_MAX_DEN)?;
                let back = to_f64(&r);
                ((back - x).abs() <= f64::EPSILON * x.abs()).then_some(r)
            })
            .collect();
        let matrix = RationalMatrix::new(m.rows(), m.cols(), entries?).ok()?;
        Some(Self::entrywise(matrix))
    }

    fn detect_directions(m: &RealMatrix) -> Option<Self> {
        let mut columns = Vec::with_capacity(m.cols());
        let mut scales = Vec::with_capacity(m.cols());
        for col in m.columns() {
            let lead = col.iter().copied().fold(0.0f64, |a, b| if b.abs() > a.abs() { b } else { a });
            if lead == 0.0 {
                return None;
            }
            let dir: Option<Vec<Rational>> = col.iter().map(|&x| snap_rational(x / lead, MIRROR_MAX_DEN)).collect();
            let dir = dir?;
            let residual = col
                .iter()
                .zip(&dir)
                .map(|(&x, d)| (x - lead * to_f64(d)).abs())
                .fold(0.0, f64::max);
            if residual > 1e-12 * lead.abs() {
                return None;
            }
            columns.push(dir);
            scales.push(lead);
        }
        let matrix = RationalMatrix::from_columns(m.rows(), &columns).ok()?;
        Some(Self { matrix, kind: MirrorKind::ColumnScaled(scales) })
    }

    /// Float matrix implied by the mirror, when the relation is recorded.
    pub fn to_real(&self) -> Option<RealMatrix> {
        let m = self.matrix.to_f64();
        match &self.kind {
            MirrorKind::Entrywise => Some(m),
            MirrorKind::ColumnScaled(s) => Some(m.scale_columns(s)),
            MirrorKind::Coordinates => None,
        }
    }

    pub fn select_columns(&self, indices: &[usize]) -> Self {
        let kind = match &self.kind {
            MirrorKind::ColumnScaled(s) => MirrorKind::ColumnScaled(indices.iter().map(|&i| s[i]).collect()),
            other => other.clone(),
        };
        Self { matrix: self.matrix.select_columns(indices), kind }
    }
}

/// Numerical rank by singular value thresholding.
///
/// With a mirror the exact rank is returned after checking that the float
/// rank agrees whenever the float verdict is unambiguous.
pub fn rank(m: &RealMatrix, mirror: Option<&ExactMirror>, tol: &TolerancePolicy) -> Result<usize, LinalgError> {
    let sv = singular_values(m);
    let smax = sv.first().copied().unwrap_or(0.0);
    let threshold = tol.rank_rel_tol * smax;
    let float_rank = sv.iter().filter(|&&s| s > threshold).count();
    let ambiguous = sv.iter().copied().find(|&s| s > threshold / 10.0 && s < threshold * 10.0);
    match mirror {
        Some(x) => {
            let exact = exact_rank(&x.matrix);
            if ambiguous.is_none() && exact != float_rank {
                return Err(LinalgError::RankDisagreement { float: float_rank, exact });
            }
            Ok(exact)
        }
        None => match ambiguous {
            Some(sigma) => Err(LinalgError::RankAmbiguous { sigma, threshold }),
            None => Ok(float_rank),
        },
    }
}

/// Orthogonal projection `A^t (A A^t)^{-1} A` onto the row space of `a`.
pub fn projection_onto_row_space(a: &RealMatrix, tol: &TolerancePolicy) -> Result<RealMatrix, LinalgError> {
    let n = a.cols();
    let gram = a.matmul(&a.transpose())?;
    if gram.rows() == 0 {
        return Ok(RealMatrix::zeros(n, n));
    }
    let (vals, _) = symmetric_eigen(&gram)?;
    let (max, min) = (vals[0], vals[vals.len() - 1]);
    if !(max > 0.0) || min <= tol.rank_rel_tol * max {
        return Err(LinalgError::SingularGram);
    }
    let l = cholesky(&gram).map_err(|_| LinalgError::SingularGram)?;
    let mut p = RealMatrix::zeros(n, n);
    let cols = a.columns();
    let solved: Vec<Vec<f64>> = cols.iter().map(|c| cholesky_solve(&l, c)).collect();
    for i in 0..n {
        for j in i..n {
            let v: f64 = cols[i].iter().zip(&solved[j]).map(|(x, y)| x * y).sum();
            p[(i, j)] = v;
            p[(j, i)] = v;
        }
    }
    Ok(p)
}

/// Symmetric `R` with `R m R = I`, via the eigendecomposition of `m`.
pub fn inverse_sqrt_spd(m: &RealMatrix, tol: &TolerancePolicy) -> Result<RealMatrix, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare(m.rows(), m.cols()));
    }
    let mut sym = m.clone();
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            sym[(i, j)] = 0.5 * (m[(i, j)] + m[(j, i)]);
        }
    }
    let (vals, v) = symmetric_eigen(&sym)?;
    if vals.is_empty() {
        return Ok(sym);
    }
    let (max, min) = (vals[0], vals[vals.len() - 1]);
    if !(max > 0.0) || min <= tol.psd_tol * max {
        return Err(LinalgError::NotSpd { min_eigenvalue: min });
    }
    let d: Vec<f64> = vals.iter().map(|l| 1.0 / l.sqrt()).collect();
    v.scale_columns(&d).matmul(&v.transpose())
}

/// `ln det m` for symmetric positive definite `m`.
pub fn logdet_spd(m: &RealMatrix) -> Result<f64, LinalgError> {
    let l = cholesky(m)?;
    Ok(2.0 * l.diag().iter().map(|x| x.ln()).sum::<f64>())
}

/// `ln sum_{|S|=M} exp(sum_{j in S} t_j) det(A_S A_S^t)` by explicit subset
/// enumeration with log-sum-exp stabilisation.
pub fn cauchy_binet_logdet(a: &RealMatrix, t: &[f64]) -> Result<f64, LinalgError> {
    let (m, n) = a.shape();
    if t.len() != n {
        return Err(LinalgError::DimensionMismatch { expected: (n, 1), found: (t.len(), 1) });
    }
    if n > MAX_ENUMERATION {
        return Err(LinalgError::TooManySubsets { n, limit: MAX_ENUMERATION });
    }
    let mut terms = Vec::new();
    for s in IndexSet::k_subsets(n, m) {
        let idx = s.to_vec();
        let det = determinant(&a.select_columns(&idx))?;
        if det != 0.0 {
            terms.push(idx.iter().map(|&j| t[j]).sum::<f64>() + (det * det).ln());
        }
    }
    let top = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return Ok(top);
    }
    Ok(top + terms.iter().map(|x| (x - top).exp()).sum::<f64>().ln())
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn orthogonalize(v: &mut [f64], basis: &[Vec<f64>]) {
    // Two passes of modified Gram-Schmidt.
    for _ in 0..2 {
        for q in basis {
            let d: f64 = v.iter().zip(q).map(|(x, y)| x * y).sum();
            for (x, y) in v.iter_mut().zip(q) {
                *x -= d * y;
            }
        }
    }
}

fn pivoted_gram_schmidt(candidates: &[Vec<f64>], start: &[Vec<f64>], count: usize) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = start.to_vec();
    let mut out = Vec::with_capacity(count);
    let mut used = vec![false; candidates.len()];
    for _ in 0..count {
        let mut best: Option<(usize, Vec<f64>, f64)> = None;
        for (k, c) in candidates.iter().enumerate() {
            if used[k] {
                continue;
            }
            let mut r = c.clone();
            orthogonalize(&mut r, &basis);
            let nr = norm(&r);
            if best.as_ref().map_or(true, |b| nr > b.2 * (1.0 + 1e-12)) {
                best = Some((k, r, nr));
            }
        }
        let Some((k, mut r, nr)) = best else { break };
        if nr == 0.0 {
            break;
        }
        used[k] = true;
        r.iter_mut().for_each(|x| *x /= nr);
        orthogonalize(&mut r, &basis);
        let nr = norm(&r);
        r.iter_mut().for_each(|x| *x /= nr);
        basis.push(r.clone());
        out.push(r);
    }
    out
}

/// Orthonormal basis (as columns) of the span of the columns of `m`, which
/// the caller asserts has dimension `dim`. Column-pivoted Gram-Schmidt, so
/// the result is deterministic.
pub fn orthonormal_basis(m: &RealMatrix, dim: usize) -> RealMatrix {
    let cols = m.columns();
    let basis = pivoted_gram_schmidt(&cols, &[], dim);
    RealMatrix::from_columns(m.rows(), &basis).expect("basis vectors have the ambient length")
}

/// Orthonormal basis of the orthogonal complement of the orthonormal columns of `u`.
pub fn orthonormal_complement(u: &RealMatrix) -> RealMatrix {
    let m = u.rows();
    let std_basis: Vec<Vec<f64>> = (0..m)
        .map(|i| {
            let mut e = vec![0.0; m];
            e[i] = 1.0;
            e
        })
        .collect();
    let comp = pivoted_gram_schmidt(&std_basis, &u.columns(), m - u.cols());
    RealMatrix::from_columns(m, &comp).expect("basis vectors have the ambient length")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;

    fn cols(m: usize, c: &[&[f64]]) -> RealMatrix {
        Matrix::from_columns(m, &c.iter().map(|v| v.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn example6() -> RealMatrix {
        cols(3, &[&[1., -1., 0.], &[0., 1., -1.], &[-1., 0., 1.], &[1., 0., 0.], &[0., 1., 0.]])
    }

    #[test]
    fn rank_examples() {
        let tol = TolerancePolicy::default();
        assert_eq!(rank(&Matrix::identity(3), None, &tol).unwrap(), 3);
        let first3 = example6().select_columns(&[0, 1, 2]);
        assert_eq!(rank(&first3, None, &tol).unwrap(), 2);
        let mirror = ExactMirror::detect(&first3).unwrap();
        assert_eq!(rank(&first3, Some(&mirror), &tol).unwrap(), 2);
    }

    #[test]
    fn rank_ambiguity_is_reported() {
        let tol = TolerancePolicy::default();
        let m = Matrix::diagonal(&[1.0, 2e-9]);
        assert!(matches!(rank(&m, None, &tol), Err(LinalgError::RankAmbiguous { .. })));
        let exact = ExactMirror::entrywise(Matrix::diagonal(&[crate::scalar::rational(1, 1), crate::scalar::rational(1, 1)]));
        assert_eq!(rank(&m, Some(&exact), &tol).unwrap(), 2);
    }

    #[test]
    fn rank_disagreement_is_an_error() {
        let tol = TolerancePolicy::default();
        let m = Matrix::diagonal(&[1.0, 1.0]);
        let wrong = ExactMirror::entrywise(Matrix::diagonal(&[crate::scalar::rational(1, 1), crate::scalar::rational(0, 1)]));
        assert!(matches!(rank(&m, Some(&wrong), &tol), Err(LinalgError::RankDisagreement { float: 2, exact: 1 })));
    }

    #[test]
    fn projection_of_example_has_expected_diagonal() {
        let p = projection_onto_row_space(&example6(), &TolerancePolicy::default()).unwrap();
        let want = [0.5, 0.625, 0.625, 0.625, 0.625];
        for (d, w) in p.diag().iter().zip(want) {
            assert!((d - w).abs() < 1e-14);
        }
        assert!(p.matmul(&p).unwrap().max_abs_diff(&p) < 1e-12);
    }

    #[test]
    fn projection_of_identity_and_non_spanning() {
        let tol = TolerancePolicy::default();
        let p = projection_onto_row_space(&Matrix::identity(3), &tol).unwrap();
        assert!(p.max_abs_diff(&Matrix::identity(3)) < 1e-15);
        let flat = cols(2, &[&[1., 0.], &[2., 0.]]);
        assert_eq!(projection_onto_row_space(&flat, &tol), Err(LinalgError::SingularGram));
    }

    #[test]
    fn inverse_sqrt_examples() {
        let tol = TolerancePolicy::default();
        let r = inverse_sqrt_spd(&Matrix::diagonal(&[4.0, 4.0, 4.0]), &tol).unwrap();
        assert!(r.max_abs_diff(&Matrix::diagonal(&[0.5, 0.5, 0.5])) < 1e-15);
        let r = inverse_sqrt_spd(&Matrix::diagonal(&[1.0, 9.0]), &tol).unwrap();
        assert!(r.max_abs_diff(&Matrix::diagonal(&[1.0, 1.0 / 3.0])) < 1e-15);
        let bad = Matrix::diagonal(&[1.0, -1.0]);
        assert!(matches!(inverse_sqrt_spd(&bad, &tol), Err(LinalgError::NotSpd { .. })));
    }

    #[test]
    fn cauchy_binet_hand_enumeration() {
        let a = cols(2, &[&[1., 0.], &[0., 1.], &[1., 1.]]);
        let v = cauchy_binet_logdet(&a, &[0.0; 3]).unwrap();
        // 2-subsets have squared determinants 1, 1, 1.
        assert!((v - 3f64.ln()).abs() < 1e-14);
        let direct = logdet_spd(&a.matmul(&a.transpose()).unwrap()).unwrap();
        assert!((v - direct).abs() < 1e-14);
        assert_eq!(cauchy_binet_logdet(&Matrix::identity(2), &[0.0, 0.0]).unwrap(), 0.0);
    }

    #[test]
    fn too_many_subsets() {
        let a = RealMatrix::zeros(1, 21);
        assert!(matches!(cauchy_binet_logdet(&a, &[0.0; 21]), Err(LinalgError::TooManySubsets { .. })));
    }

    #[test]
    fn direction_mirror_for_scaled_columns() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let a = cols(2, &[&[1., 0.], &[0., 1.], &[s, s], &[s, -s]]);
        let mirror = ExactMirror::detect(&a).unwrap();
        assert!(matches!(mirror.kind, MirrorKind::ColumnScaled(_)));
        assert!(mirror.to_real().unwrap().max_abs_diff(&a) < 1e-15);
    }

    #[test]
    fn bases_are_orthonormal_and_complementary() {
        let a = example6();
        let u = orthonormal_basis(&a.select_columns(&[0, 1, 2]), 2);
        let v = orthonormal_complement(&u);
        assert_eq!((u.cols(), v.cols()), (2, 1));
        let uv = u.hstack(&v).unwrap();
        assert!(uv.transpose().matmul(&uv).unwrap().max_abs_diff(&Matrix::identity(3)) < 1e-14);
        let full = orthonormal_basis(&Matrix::identity(3), 3);
        assert_eq!(orthonormal_complement(&full).cols(), 0);
    }
}
