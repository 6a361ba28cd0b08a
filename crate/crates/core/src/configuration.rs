//! Vector configurations `A = [a_0, .., a_{N-1}]` in `R^M`: validation,
//! essential vectors, and the two coordinate changes used to split
//! problems (essential-vector elimination and subset factorization).

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use thiserror::Error;

use crate::linalg::elim::{exact_rank, nullspace, rref};
use crate::linalg::{
    orthonormal_basis, orthonormal_complement, projection_onto_row_space, rank, ExactMirror, IndexSet,
    LinalgError, TolerancePolicy, MAX_ENUMERATION,
};
use crate::scalar::{common_denominator, Rational};
use crate::{RationalMatrix, RealMatrix};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("configuration must have M <= N, got M = {m}, N = {n}")]
    InvalidShape { m: usize, n: usize },
    #[error("vector {0} is not essential")]
    NotEssential(usize),
    #[error("the vectors do not span R^{0}")]
    NotSpanning(usize),
    #[error("subset must be proper and non-empty")]
    EmptyOrFullSubset,
    #[error("configuration is not properly redundant: {0}")]
    Defective(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// A validated configuration with its recorded defects.
#[derive(Debug, Clone)]
pub struct Configuration {
    a: RealMatrix,
    mirror: Option<ExactMirror>,
    tol: TolerancePolicy,
    int_cols: Option<Vec<Vec<BigInt>>>,
    pub rank: usize,
    pub spans: bool,
    pub essential_flags: Vec<bool>,
    pub proportional_pairs: Vec<(usize, usize)>,
}

impl Configuration {
    /// Classifies `a`, detecting an exact rational mirror when the entries
    /// (or column directions) are small-denominator rationals.
    pub fn new(a: RealMatrix, tol: TolerancePolicy) -> Result<Self, ConfigError> {
        let mirror = ExactMirror::detect(&a);
        Self::build(a, mirror, tol)
    }

    /// Exact rational input; the float matrix is derived from it.
    pub fn from_rational(a: RationalMatrix, tol: TolerancePolicy) -> Result<Self, ConfigError> {
        let real = a.to_f64();
        Self::build(real, Some(ExactMirror::entrywise(a)), tol)
    }

    /// Float input with no exact counterpart; ranks use thresholding only.
    pub fn float_only(a: RealMatrix, tol: TolerancePolicy) -> Result<Self, ConfigError> {
        Self::build(a, None, tol)
    }

    pub(crate) fn build(a: RealMatrix, mirror: Option<ExactMirror>, tol: TolerancePolicy) -> Result<Self, ConfigError> {
        tol.validate()?;
        let (m, n) = a.shape();
        if n < m {
            return Err(ConfigError::InvalidShape { m, n });
        }
        let int_cols = mirror.as_ref().map(|x| integer_columns(&x.matrix));
        let mut c = Configuration {
            a,
            mirror,
            tol,
            int_cols,
            rank: 0,
            spans: false,
            essential_flags: vec![false; n],
            proportional_pairs: Vec::new(),
        };
        c.rank = c.subset_rank(IndexSet::full(n))?;
        c.spans = c.rank == m;
        for i in 0..n {
            for j in i + 1..n {
                if c.subset_rank(IndexSet::from_indices([i, j]))? < 2 {
                    c.proportional_pairs.push((i, j));
                }
            }
        }
        if c.spans {
            let ess = detect_essential(&c)?;
            for j in ess.iter() {
                c.essential_flags[j] = true;
            }
        }
        Ok(c)
    }

    pub fn matrix(&self) -> &RealMatrix {
        &self.a
    }

    pub fn mirror(&self) -> Option<&ExactMirror> {
        self.mirror.as_ref()
    }

    pub fn tolerances(&self) -> &TolerancePolicy {
        &self.tol
    }

    pub fn is_exact(&self) -> bool {
        self.mirror.is_some()
    }

    /// Ambient dimension `M`.
    pub fn dim(&self) -> usize {
        self.a.rows()
    }

    /// Number of vectors `N`.
    pub fn len(&self) -> usize {
        self.a.cols()
    }

    pub fn is_empty(&self) -> bool {
        self.a.cols() == 0
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.a.column(j)
    }

    pub fn essential(&self) -> IndexSet {
        IndexSet::from_indices((0..self.len()).filter(|&j| self.essential_flags[j]))
    }

    /// Spanning, no essential vectors and no proportional pairs.
    pub fn properly_redundant(&self) -> bool {
        self.spans && self.essential().is_empty() && self.proportional_pairs.is_empty()
    }

    /// Human-readable list of the recorded defects.
    pub fn defects(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !self.spans {
            out.push(format!("vectors span only a {}-dimensional subspace of R^{}", self.rank, self.dim()));
        }
        for &(i, j) in &self.proportional_pairs {
            out.push(format!("vectors {i} and {j} are proportional"));
        }
        out
    }

    /// Refuses configurations that do not span or have proportional pairs.
    pub fn require_nondegenerate(&self) -> Result<(), ConfigError> {
        let defects = self.defects();
        if defects.is_empty() {
            Ok(())
        } else {
            Err(ConfigError::Defective(defects.join("; ")))
        }
    }

    pub fn require_properly_redundant(&self) -> Result<(), ConfigError> {
        let mut defects = self.defects();
        if self.spans {
            let ess = self.essential();
            if !ess.is_empty() {
                defects.push(format!("essential vectors {:?}", ess.to_vec()));
            }
        }
        if defects.is_empty() {
            Ok(())
        } else {
            Err(ConfigError::Defective(defects.join("; ")))
        }
    }

    /// `r(S) = dim span{a_j : j in S}`, exact when a mirror is present.
    pub fn subset_rank(&self, s: IndexSet) -> Result<usize, ConfigError> {
        if s.is_empty() {
            return Ok(0);
        }
        let idx = s.to_vec();
        if let Some(cols) = &self.int_cols {
            let sub: Vec<&Vec<BigInt>> = idx.iter().map(|&j| &cols[j]).collect();
            return Ok(integer_rank(&sub, self.dim()));
        }
        Ok(rank(&self.a.select_columns(&idx), None, &self.tol)?)
    }

    /// Ranks of all `2^N` subsets, indexed by bitmask.
    pub fn rank_table(&self) -> Result<RankTable, ConfigError> {
        let n = self.len();
        if n > MAX_ENUMERATION {
            return Err(LinalgError::TooManySubsets { n, limit: MAX_ENUMERATION }.into());
        }
        let mut ranks = vec![0u8; 1 << n];
        for mask in 1u64..(1u64 << n) {
            // r(S) = r(S - j) or r(S - j) + 1, with j the largest element.
            let j = 63 - mask.leading_zeros() as usize;
            let rest = mask & !(1u64 << j);
            let base = ranks[rest as usize];
            ranks[mask as usize] = if base as usize == self.dim() {
                base
            } else {
                self.subset_rank(IndexSet(mask))? as u8
            };
        }
        Ok(RankTable { n, ranks })
    }

    /// Same vectors restricted to the columns in `s`, in increasing order.
    pub fn restrict(&self, s: IndexSet) -> Result<Configuration, ConfigError> {
        let idx = s.to_vec();
        Self::build(
            self.a.select_columns(&idx),
            self.mirror.as_ref().map(|x| x.select_columns(&idx)),
            self.tol,
        )
    }
}

/// Precomputed subset ranks.
#[derive(Debug, Clone)]
pub struct RankTable {
    n: usize,
    ranks: Vec<u8>,
}

impl RankTable {
    pub fn get(&self, s: IndexSet) -> usize {
        self.ranks[s.0 as usize] as usize
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

/// Columns of `m` with each row cleared of denominators (row scaling keeps
/// the column matroid).
fn integer_columns(m: &RationalMatrix) -> Vec<Vec<BigInt>> {
    let scales: Vec<BigInt> = (0..m.rows()).map(|i| common_denominator(m.row(i).iter())).collect();
    (0..m.cols())
        .map(|j| {
            (0..m.rows())
                .map(|i| (m[(i, j)].clone() * Rational::from_integer(scales[i].clone())).to_integer())
                .collect()
        })
        .collect()
}

/// Rank of the integer matrix with the given columns: Bareiss in i128 with
/// a BigInt fallback on overflow.
fn integer_rank(cols: &[&Vec<BigInt>], rows: usize) -> usize {
    let small: Option<Vec<Vec<i128>>> = (0..rows)
        .map(|i| cols.iter().map(|c| c[i].to_i64().map(i128::from)).collect())
        .collect();
    if let Some(mut a) = small {
        if let Some(r) = bareiss_i128(&mut a) {
            return r;
        }
    }
    let m = RationalMatrix::from_columns(
        rows,
        &cols.iter().map(|c| c.iter().map(|v| Rational::from_integer(v.clone())).collect()).collect::<Vec<_>>(),
    )
    .expect("columns have the ambient length");
    exact_rank(&m)
}

fn bareiss_i128(a: &mut [Vec<i128>]) -> Option<usize> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut prev: i128 = 1;
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&i| a[i][c] != 0) else { continue };
        a.swap(p, rank);
        for i in rank + 1..rows {
            for j in c + 1..cols {
                let v = a[rank][c].checked_mul(a[i][j])?.checked_sub(a[i][c].checked_mul(a[rank][j])?)?;
                a[i][j] = v / prev;
            }
            a[i][c] = 0;
        }
        prev = a[rank][c];
        rank += 1;
    }
    Some(rank)
}

/// Essential vectors: `P_jj = 1`, cross-checked against the definition
/// (removing `a_j` destroys spanning).
pub fn detect_essential(c: &Configuration) -> Result<IndexSet, ConfigError> {
    if !c.spans {
        return Err(ConfigError::NotSpanning(c.dim()));
    }
    let n = c.len();
    let full = IndexSet::full(n);
    let p = projection_onto_row_space(&c.a, &c.tol)?;
    let mut out = IndexSet::EMPTY;
    for j in 0..n {
        let by_definition = c.subset_rank(full.intersection(IndexSet::singleton(j).complement(n)))? < c.dim();
        let by_projection = (p[(j, j)] - 1.0).abs() <= 1e3 * c.tol.rank_rel_tol.max(f64::EPSILON);
        if c.is_exact() {
            assert_eq!(
                by_definition, by_projection,
                "essential test for vector {j} disagrees between rank and projection (P_jj = {})",
                p[(j, j)]
            );
        }
        if by_definition {
            out = out.union(IndexSet::singleton(j));
        }
    }
    Ok(out)
}

/// Removes essential vector `j`.
///
/// With `u` the unit normal to `W = span{a_k : k != j}`, integrating out
/// the `u` direction gives `I(A) = ‖f_j‖_1 / |u·a_j| * I(reduced)`, so the
/// returned factor is `1/|u·a_j|` and the reduced vectors are the
/// coordinates of `a_k` in an orthonormal basis of `W`.
pub fn reduce_essential(c: &Configuration, j: usize) -> Result<(Configuration, f64), ConfigError> {
    if !c.spans {
        return Err(ConfigError::NotSpanning(c.dim()));
    }
    if j >= c.len() || !c.essential_flags[j] {
        return Err(ConfigError::NotEssential(j));
    }
    let n = c.len();
    let rest = IndexSet::singleton(j).complement(n);
    let idx = rest.to_vec();
    let w = orthonormal_basis(&c.a.select_columns(&idx), c.dim() - 1);
    let u = orthonormal_complement(&w);
    let aj = c.column(j);
    let dot: f64 = (0..c.dim()).map(|i| u[(i, 0)] * aj[i]).sum();
    let reduced = w.transpose().matmul(&c.a.select_columns(&idx))?;
    let mirror = c.mirror.as_ref().map(|x| pivot_coordinates(&x.select_columns(&idx)));
    Ok((Configuration::build(reduced, mirror, c.tol)?, 1.0 / dot.abs()))
}

/// Matroid-equivalent rational coordinates: the nonzero rows of the RREF.
pub(crate) fn pivot_coordinates(x: &ExactMirror) -> ExactMirror {
    let rr = rref(&x.matrix);
    let r = rr.pivots.len();
    ExactMirror::coordinates(rr.matrix.select_rows(&(0..r).collect::<Vec<_>>()))
}

/// Rational coordinates of the columns of `target` in the quotient by
/// `span(basis_of)`: rows of `N` spanning the annihilator of that span.
pub(crate) fn quotient_coordinates(basis_of: &ExactMirror, target: &ExactMirror) -> ExactMirror {
    let ann = nullspace(&basis_of.matrix.transpose());
    let m = target.matrix.rows();
    let nmat = if ann.is_empty() {
        RationalMatrix::zeros(0, m)
    } else {
        RationalMatrix::from_rows(&ann).expect("annihilator rows have equal length")
    };
    ExactMirror::coordinates(nmat.matmul(&target.matrix).expect("annihilator has ambient width"))
}

/// The splitting of Lemma-style subset factorization: an orthonormal basis
/// `U` of `span{a_j : j in S}`, a completion `V`, and coordinates
/// `b_j = U^t a_j`, `c_j = V^t a_j`.
#[derive(Debug, Clone)]
pub struct Factorization {
    pub subset: IndexSet,
    pub r: usize,
    pub u_basis: RealMatrix,
    pub v_basis: RealMatrix,
    pub b_vectors: RealMatrix,
    pub c_vectors: RealMatrix,
    pub(crate) b_mirror: Option<ExactMirror>,
    pub(crate) c_mirror: Option<ExactMirror>,
}

impl Factorization {
    /// Configuration of the `b_j`, `j in S`, in `R^r`.
    pub fn left(&self, tol: TolerancePolicy) -> Result<Configuration, ConfigError> {
        let idx = self.subset.to_vec();
        Configuration::build(self.b_vectors.select_columns(&idx), self.b_mirror.clone(), tol)
    }

    /// Configuration of the `c_j`, `j not in S`, in `R^{M-r}`.
    pub fn right(&self, tol: TolerancePolicy) -> Result<Configuration, ConfigError> {
        let n = self.b_vectors.cols();
        let idx = self.subset.complement(n).to_vec();
        Configuration::build(self.c_vectors.select_columns(&idx), self.c_mirror.clone(), tol)
    }

    /// `max_j |a_j - U b_j - V c_j|`.
    pub fn reconstruction_error(&self, a: &RealMatrix) -> f64 {
        let ub = self.u_basis.matmul(&self.b_vectors).expect("shapes agree");
        let vc = self.v_basis.matmul(&self.c_vectors).expect("shapes agree");
        let mut err = 0.0f64;
        for i in 0..a.rows() {
            for j in 0..a.cols() {
                err = err.max((a[(i, j)] - ub[(i, j)] - vc[(i, j)]).abs());
            }
        }
        err
    }
}

pub fn factorize(c: &Configuration, s: IndexSet) -> Result<Factorization, ConfigError> {
    let n = c.len();
    if s.is_empty() || s == IndexSet::full(n) || !s.is_subset(IndexSet::full(n)) {
        return Err(ConfigError::EmptyOrFullSubset);
    }
    let r = c.subset_rank(s)?;
    let idx = s.to_vec();
    let u = orthonormal_basis(&c.a.select_columns(&idx), r);
    let mut v = orthonormal_complement(&u);
    if v.cols() > 0 {
        let det = crate::linalg::elim::determinant(&u.hstack(&v)?)?;
        if det < 0.0 {
            let last = v.cols() - 1;
            for i in 0..v.rows() {
                v[(i, last)] = -v[(i, last)];
            }
        }
    }
    let b_vectors = u.transpose().matmul(&c.a)?;
    let mut c_vectors = v.transpose().matmul(&c.a)?;
    for &j in &idx {
        for i in 0..c_vectors.rows() {
            c_vectors[(i, j)] = 0.0;
        }
    }
    let (b_mirror, c_mirror) = match &c.mirror {
        Some(x) => {
            let inside = x.select_columns(&idx);
            let outside = x.select_columns(&s.complement(n).to_vec());
            (Some(pivot_coordinates(&inside)), Some(quotient_coordinates(&inside, &outside)))
        }
        None => (None, None),
    };
    Ok(Factorization { subset: s, r, u_basis: u, v_basis: v, b_vectors, c_vectors, b_mirror, c_mirror })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;

    fn cols(m: usize, c: &[&[f64]]) -> RealMatrix {
        Matrix::from_columns(m, &c.iter().map(|v| v.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn example6() -> Configuration {
        Configuration::new(
            cols(3, &[&[1., -1., 0.], &[0., 1., -1.], &[-1., 0., 1.], &[1., 0., 0.], &[0., 1., 0.]]),
            TolerancePolicy::default(),
        )
        .unwrap()
    }

    #[test]
    fn identity_is_all_essential() {
        let c = Configuration::new(Matrix::identity(3), TolerancePolicy::default()).unwrap();
        assert!(c.spans);
        assert_eq!(c.essential(), IndexSet::full(3));
        assert!(c.proportional_pairs.is_empty());
        assert!(!c.properly_redundant());
    }

    #[test]
    fn example6_is_properly_redundant() {
        let c = example6();
        assert!(c.is_exact());
        assert!(c.properly_redundant());
        assert_eq!(c.subset_rank(IndexSet::from_indices([0, 1, 2])).unwrap(), 2);
    }

    #[test]
    fn proportional_pair_recorded() {
        let c = Configuration::new(cols(2, &[&[1., 0.], &[2., 0.], &[0., 1.]]), TolerancePolicy::default()).unwrap();
        assert_eq!(c.proportional_pairs, vec![(0, 1)]);
        assert!(c.require_nondegenerate().is_err());
    }

    #[test]
    fn essential_detection_matches_rank_oracle() {
        let c = Configuration::new(
            cols(3, &[&[1., 0., 0.], &[0., 1., 0.], &[0., 1., 1.], &[0., 0., 1.]]),
            TolerancePolicy::default(),
        )
        .unwrap();
        assert_eq!(c.essential(), IndexSet::singleton(0));
    }

    #[test]
    fn reduce_essential_factors() {
        let tol = TolerancePolicy::default();
        let c = Configuration::new(cols(3, &[&[1., 0., 0.], &[0., 1., 0.], &[0., 1., 1.], &[0., 0., 1.]]), tol).unwrap();
        let (red, f) = reduce_essential(&c, 0).unwrap();
        assert_eq!((red.dim(), red.len()), (2, 3));
        assert!((f - 1.0).abs() < 1e-14);
        assert!(red.properly_redundant());

        let c = Configuration::new(cols(2, &[&[2., 0.], &[0., 1.]]), tol).unwrap();
        let (_, f) = reduce_essential(&c, 0).unwrap();
        assert!((f - 0.5).abs() < 1e-14);

        let c = Configuration::new(Matrix::identity(2), tol).unwrap();
        let (r1, f1) = reduce_essential(&c, 0).unwrap();
        let (r2, f2) = reduce_essential(&r1, 0).unwrap();
        assert_eq!((r2.dim(), r2.len()), (0, 0));
        assert!((f1 * f2 - 1.0).abs() < 1e-14);
        assert_eq!(reduce_essential(&example6(), 0).unwrap_err(), ConfigError::NotEssential(0));
    }

    #[test]
    fn factorize_example6() {
        let c = example6();
        let f = factorize(&c, IndexSet::from_indices([0, 1, 2])).unwrap();
        assert_eq!(f.r, 2);
        assert_eq!(f.v_basis.cols(), 1);
        for j in 0..3 {
            assert_eq!(f.c_vectors[(0, j)], 0.0);
        }
        assert!(f.c_vectors[(0, 3)].abs() > 0.1 && f.c_vectors[(0, 4)].abs() > 0.1);
        assert!(f.reconstruction_error(c.matrix()) < 1e-12);
        let left = f.left(TolerancePolicy::default()).unwrap();
        let right = f.right(TolerancePolicy::default()).unwrap();
        assert_eq!((left.dim(), left.len(), left.rank), (2, 3, 2));
        assert_eq!((right.dim(), right.len(), right.rank), (1, 2, 1));
        assert!(left.is_exact() && right.is_exact());
    }

    #[test]
    fn factorize_hand_case() {
        let c = Configuration::new(cols(2, &[&[1., 0.], &[0., 1.], &[1., 1.]]), TolerancePolicy::default()).unwrap();
        let f = factorize(&c, IndexSet::singleton(0)).unwrap();
        let sb = f.b_vectors[(0, 0)].signum();
        let sc = f.c_vectors[(0, 1)].signum();
        let b: Vec<f64> = f.b_vectors.row(0).iter().map(|x| x * sb).collect();
        let cc: Vec<f64> = f.c_vectors.row(0).iter().map(|x| x * sc).collect();
        assert_eq!(b, vec![1.0, 0.0, 1.0]);
        assert_eq!(cc, vec![0.0, 1.0, 1.0]);
    }

    #[test]
    fn factorize_spanning_subset_has_empty_complement() {
        let c = example6();
        let f = factorize(&c, IndexSet::from_indices([0, 1, 3])).unwrap();
        assert_eq!((f.r, f.v_basis.cols(), f.c_vectors.rows()), (3, 0, 0));
        assert_eq!(factorize(&c, IndexSet::EMPTY).unwrap_err(), ConfigError::EmptyOrFullSubset);
    }

    #[test]
    fn rank_table_matches_direct_ranks() {
        let c = example6();
        let t = c.rank_table().unwrap();
        for mask in 0..32u64 {
            assert_eq!(t.get(IndexSet(mask)), c.subset_rank(IndexSet(mask)).unwrap());
        }
    }
}
