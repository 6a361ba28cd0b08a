//! The polytope `K_A` of admissible reciprocal exponents: membership,
//! critical sets, vertices, and the critical-set decomposition.
//!
//! All comparisons are exact. `z` is held as rationals; float input is
//! snapped to denominators at most 10^6 and the snap is recorded.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::configuration::{factorize, ConfigError, Configuration, Factorization, RankTable};
use crate::linalg::{IndexSet, LinalgError, MAX_ENUMERATION};
use crate::scalar::{common_denominator, format_rational, rational_from_int, snap_rational, to_f64, Rational};

const SNAP_MAX_DEN: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolytopeError {
    #[error("exponent vector has length {found}, expected {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("exponent {index} is not a finite value representable as a rational")]
    InvalidExponent { index: usize },
    #[error("reciprocal exponents sum to {sum}, scaling requires {m}")]
    ScalingViolated { sum: String, m: usize },
    #[error("exponents lie outside K_A: subset {witness} has sum {sum} > rank {rank}")]
    NotMember { witness: IndexSet, sum: String, rank: usize },
    #[error("configuration is defective: {0}")]
    DefectiveConfiguration(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
}

impl From<LinalgError> for PolytopeError {
    fn from(e: LinalgError) -> Self {
        PolytopeError::Config(ConfigError::Linalg(e))
    }
}

/// Reciprocal exponents `z_j = 1/p_j`; `p_j = ∞` when `z_j = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentVector {
    z: Vec<Rational>,
    snapped: bool,
}

impl ExponentVector {
    pub fn from_rationals(z: Vec<Rational>) -> Self {
        Self { z, snapped: false }
    }

    /// Snaps each entry to a rational with denominator at most 10^6.
    pub fn from_f64(z: &[f64]) -> Result<Self, PolytopeError> {
        let exact: Result<Vec<Rational>, PolytopeError> = z
            .iter()
            .enumerate()
            .map(|(index, &v)| snap_rational(v, SNAP_MAX_DEN).ok_or(PolytopeError::InvalidExponent { index }))
            .collect();
        let exact = exact?;
        let snapped = exact.iter().zip(z).any(|(r, &v)| Rational::from_float(v).as_ref() != Some(r));
        Ok(Self { z: exact, snapped })
    }

    /// From exponents `p_j` (`f64::INFINITY` allowed).
    pub fn from_p_f64(p: &[f64]) -> Result<Self, PolytopeError> {
        let z: Vec<f64> = p.iter().map(|&v| if v.is_infinite() { 0.0 } else { 1.0 / v }).collect();
        Self::from_f64(&z)
    }

    /// Indicator vector of `s` on `n` entries.
    pub fn indicator(n: usize, s: IndexSet) -> Self {
        Self::from_rationals((0..n).map(|j| rational_from_int(s.contains(j) as i64)).collect())
    }

    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }

    pub fn exact(&self) -> &[Rational] {
        &self.z
    }

    /// Records that the entries came from rounding float input.
    pub fn mark_snapped(mut self) -> Self {
        self.snapped = true;
        self
    }

    pub fn was_snapped(&self) -> bool {
        self.snapped
    }

    pub fn values(&self) -> Vec<f64> {
        self.z.iter().map(to_f64).collect()
    }

    /// `p_j = 1/z_j`, infinite where `z_j = 0`.
    pub fn p_values(&self) -> Vec<f64> {
        self.z.iter().map(|v| if v.is_zero() { f64::INFINITY } else { to_f64(&v.recip()) }).collect()
    }

    pub fn p_strings(&self) -> Vec<String> {
        self.z.iter().map(|v| if v.is_zero() { "inf".to_string() } else { format_rational(&v.recip()) }).collect()
    }

    pub fn sum(&self) -> Rational {
        self.z.iter().fold(Rational::zero(), |a, b| a + b)
    }

    pub fn subset_sum(&self, s: IndexSet) -> Rational {
        s.iter().fold(Rational::zero(), |a, j| a + &self.z[j])
    }

    pub fn restrict(&self, s: IndexSet) -> Self {
        Self { z: s.iter().map(|j| self.z[j].clone()).collect(), snapped: self.snapped }
    }

    /// Whether some `p_j` is infinite.
    pub fn has_infinite_p(&self) -> bool {
        self.z.iter().any(Zero::is_zero)
    }

    fn check(&self, c: &Configuration) -> Result<(), PolytopeError> {
        if self.len() != c.len() {
            return Err(PolytopeError::LengthMismatch { expected: c.len(), found: self.len() });
        }
        let sum = self.sum();
        if sum != rational_from_int(c.dim() as i64) {
            return Err(PolytopeError::ScalingViolated { sum: format_rational(&sum), m: c.dim() });
        }
        Ok(())
    }
}

/// Verdict of the subset test.
#[derive(Debug, Clone, Serialize)]
pub struct PolytopeReport {
    pub member: bool,
    pub interior: bool,
    /// Proper non-empty subsets with `sum_S z = r(S)`.
    pub critical_sets: Vec<IndexSet>,
    pub supercritical_witness: Option<IndexSet>,
    pub least_critical_containing: Vec<(IndexSet, Option<IndexSet>)>,
    pub snapped: bool,
}

/// `z` scaled to integers by a common denominator.
struct IntegerExponents {
    scaled: Vec<BigInt>,
    denom: BigInt,
}

impl IntegerExponents {
    fn new(z: &ExponentVector) -> Self {
        let denom = common_denominator(z.exact().iter());
        let scaled = z
            .exact()
            .iter()
            .map(|v| (v * Rational::from_integer(denom.clone())).to_integer())
            .collect();
        Self { scaled, denom }
    }

    /// Sign of `sum_S z - r`.
    fn compare(&self, s: IndexSet, r: usize) -> std::cmp::Ordering {
        let sum: BigInt = s.iter().map(|j| &self.scaled[j]).sum();
        sum.cmp(&(&self.denom * BigInt::from(r)))
    }
}

fn enumeration_guard(n: usize) -> Result<(), PolytopeError> {
    if n > MAX_ENUMERATION {
        return Err(LinalgError::TooManySubsets { n, limit: MAX_ENUMERATION }.into());
    }
    Ok(())
}

/// Classification of every proper non-empty subset, without checking that
/// the configuration is free of defects.
pub(crate) fn classify(
    c: &Configuration,
    z: &ExponentVector,
    table: &RankTable,
) -> (Vec<IndexSet>, Option<IndexSet>) {
    let n = c.len();
    let ints = IntegerExponents::new(z);
    let full = IndexSet::full(n).0;
    let mut critical = Vec::new();
    let mut witness: Option<IndexSet> = None;
    for mask in 1..full {
        let s = IndexSet(mask);
        match ints.compare(s, table.get(s)) {
            std::cmp::Ordering::Equal => critical.push(s),
            std::cmp::Ordering::Greater => {
                let better = witness.map_or(true, |w| (s.len(), s.to_vec()) < (w.len(), w.to_vec()));
                if better {
                    witness = Some(s);
                }
            }
            std::cmp::Ordering::Less => {}
        }
    }
    critical.sort_by(|a, b| (a.len(), a.to_vec()).cmp(&(b.len(), b.to_vec())));
    (critical, witness)
}

fn require_clean(c: &Configuration) -> Result<(), PolytopeError> {
    c.require_nondegenerate().map_err(|e| match e {
        ConfigError::Defective(d) => PolytopeError::DefectiveConfiguration(d),
        other => other.into(),
    })
}

/// Subset-rank membership test for `K_A`.
pub fn membership(c: &Configuration, z: &ExponentVector) -> Result<PolytopeReport, PolytopeError> {
    require_clean(c)?;
    z.check(c)?;
    enumeration_guard(c.len())?;
    let table = c.rank_table()?;
    let (critical_sets, witness) = classify(c, z, &table);
    let member = witness.is_none();
    Ok(PolytopeReport {
        member,
        interior: member && critical_sets.is_empty(),
        critical_sets,
        supercritical_witness: witness,
        least_critical_containing: Vec::new(),
        snapped: z.was_snapped(),
    })
}

/// Membership report plus least critical supersets of the given seeds.
pub fn membership_with_seeds(
    c: &Configuration,
    z: &ExponentVector,
    seeds: &[IndexSet],
) -> Result<PolytopeReport, PolytopeError> {
    let mut report = membership(c, z)?;
    if report.member {
        for &seed in seeds {
            report.least_critical_containing.push((seed, least_in(&report.critical_sets, seed)));
        }
    }
    Ok(report)
}

fn least_in(critical: &[IndexSet], seed: IndexSet) -> Option<IndexSet> {
    let supersets: Vec<IndexSet> = critical.iter().copied().filter(|s| seed.is_subset(*s)).collect();
    let first = *supersets.first()?;
    let least = supersets.iter().fold(first, |acc, s| acc.intersection(*s));
    Some(least)
}

/// The unique smallest proper critical set containing `seed`, if any.
///
/// Asserts that critical supersets of `seed` are closed under intersection.
pub fn least_critical_superset(
    c: &Configuration,
    z: &ExponentVector,
    seed: IndexSet,
) -> Result<Option<IndexSet>, PolytopeError> {
    let report = membership(c, z)?;
    if let Some(w) = report.supercritical_witness {
        return Err(not_member(c, z, w)?);
    }
    let table = c.rank_table()?;
    let ints = IntegerExponents::new(z);
    let supersets: Vec<IndexSet> =
        report.critical_sets.iter().copied().filter(|s| seed.is_subset(*s)).collect();
    for (i, a) in supersets.iter().enumerate() {
        for b in &supersets[i + 1..] {
            let meet = a.intersection(*b);
            assert_eq!(
                ints.compare(meet, table.get(meet)),
                std::cmp::Ordering::Equal,
                "critical sets {a} and {b} have a non-critical intersection"
            );
        }
    }
    Ok(least_in(&report.critical_sets, seed))
}

fn not_member(c: &Configuration, z: &ExponentVector, w: IndexSet) -> Result<PolytopeError, PolytopeError> {
    Ok(PolytopeError::NotMember { witness: w, sum: format_rational(&z.subset_sum(w)), rank: c.subset_rank(w)? })
}

/// Indicators of the basis `M`-subsets: the vertices of `K_A`.
pub fn vertices(c: &Configuration) -> Result<Vec<ExponentVector>, PolytopeError> {
    if !c.spans {
        return Err(PolytopeError::DefectiveConfiguration(c.defects().join("; ")));
    }
    enumeration_guard(c.len())?;
    let mut out = Vec::new();
    for s in IndexSet::k_subsets(c.len(), c.dim()) {
        if c.subset_rank(s)? == c.dim() {
            out.push(ExponentVector::indicator(c.len(), s));
        }
    }
    Ok(out)
}

/// Whether `z` is a convex combination of the vertex indicators, decided
/// by an exact phase-one simplex.
pub fn membership_via_hull(c: &Configuration, z: &ExponentVector) -> Result<bool, PolytopeError> {
    if z.len() != c.len() {
        return Err(PolytopeError::LengthMismatch { expected: c.len(), found: z.len() });
    }
    let verts = vertices(c)?;
    let n = c.len();
    // Rows: coordinates j, then sum of weights = 1.
    let mut rows: Vec<Vec<Rational>> = (0..n)
        .map(|j| verts.iter().map(|v| v.exact()[j].clone()).collect())
        .collect();
    rows.push(vec![Rational::one(); verts.len()]);
    let mut rhs: Vec<Rational> = z.exact().to_vec();
    rhs.push(Rational::one());
    Ok(simplex_feasible(rows, rhs))
}

/// Whether `{x >= 0 : A x = b}` is non-empty. Phase-one simplex in exact
/// arithmetic.
pub fn simplex_feasible(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> bool {
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    for i in 0..m {
        if b[i].is_negative() {
            b[i] = -b[i].clone();
            a[i].iter_mut().for_each(|v| *v = -v.clone());
        }
    }
    // Tableau columns: n structural, m artificial, then the right-hand side.
    let width = n + m + 1;
    let mut t: Vec<Vec<Rational>> = (0..m)
        .map(|i| {
            let mut row = a[i].clone();
            row.extend((0..m).map(|k| if k == i { Rational::one() } else { Rational::zero() }));
            row.push(b[i].clone());
            row
        })
        .collect();
    let mut basis: Vec<usize> = (n..n + m).collect();
    let mut obj: Vec<Rational> = vec![Rational::zero(); width];
    for row in &t {
        for j in 0..n {
            obj[j] -= &row[j];
        }
        obj[width - 1] -= &row[width - 1];
    }
    // Dantzig's rule, falling back to Bland's after a run of degenerate
    // pivots so that the method cannot cycle.
    let mut degenerate_run = 0;
    loop {
        let enter = if degenerate_run > m {
            (0..n + m).find(|&j| obj[j].is_negative())
        } else {
            (0..n + m).filter(|&j| obj[j].is_negative()).min_by(|&x, &y| obj[x].cmp(&obj[y]))
        };
        let Some(enter) = enter else { break };
        let mut leave: Option<(usize, Rational)> = None;
        for i in 0..m {
            if t[i][enter].is_positive() {
                let ratio = &t[i][width - 1] / &t[i][enter];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((r, step)) = leave else { break };
        degenerate_run = if step.is_zero() { degenerate_run + 1 } else { 0 };
        let piv = t[r][enter].clone();
        t[r].iter_mut().for_each(|v| *v /= &piv);
        let pivot_row = t[r].clone();
        // Vertex tableaux are mostly zeros; only the pivot row's support changes.
        let support: Vec<usize> = (0..width).filter(|&k| !pivot_row[k].is_zero()).collect();
        for (i, row) in t.iter_mut().enumerate() {
            if i != r && !row[enter].is_zero() {
                let f = row[enter].clone();
                for &k in &support {
                    row[k] -= &f * &pivot_row[k];
                }
            }
        }
        if !obj[enter].is_zero() {
            let f = obj[enter].clone();
            for &k in &support {
                obj[k] -= &f * &pivot_row[k];
            }
        }
        basis[r] = enter;
    }
    obj[width - 1].is_zero()
}

/// One node of the critical-set decomposition.
#[derive(Debug, Clone)]
pub struct DecompositionNode {
    pub configuration: Configuration,
    pub exponents: ExponentVector,
    /// Indices of this node's vectors in the root configuration.
    pub indices: Vec<usize>,
    pub split: Option<Box<Split>>,
    pub leaf_interior: bool,
}

#[derive(Debug, Clone)]
pub struct Split {
    /// Critical set, in this node's local indices.
    pub subset: IndexSet,
    pub factorization: Factorization,
    pub left: DecompositionNode,
    pub right: DecompositionNode,
}

impl DecompositionNode {
    pub fn is_leaf(&self) -> bool {
        self.split.is_none()
    }

    pub fn leaves(&self) -> Vec<&DecompositionNode> {
        match &self.split {
            None => vec![self],
            Some(s) => {
                let mut out = s.left.leaves();
                out.extend(s.right.leaves());
                out
            }
        }
    }

    /// Product of leaf values, mirroring `D = D_S D_{S^c}`.
    pub fn fold_product<E>(&self, leaf: &mut impl FnMut(&DecompositionNode) -> Result<f64, E>) -> Result<f64, E> {
        match &self.split {
            None => leaf(self),
            Some(s) => Ok(s.left.fold_product(leaf)? * s.right.fold_product(leaf)?),
        }
    }

    pub fn depth(&self) -> usize {
        self.split.as_ref().map_or(0, |s| 1 + s.left.depth().max(s.right.depth()))
    }
}

/// Recursive splitting along critical sets of least cardinality
/// (lexicographic tie-break) until every leaf has no proper critical subset.
pub fn decompose(c: &Configuration, z: &ExponentVector) -> Result<DecompositionNode, PolytopeError> {
    let report = membership(c, z)?;
    if let Some(w) = report.supercritical_witness {
        return Err(not_member(c, z, w)?);
    }
    build_node(c.clone(), z.clone(), (0..c.len()).collect())
}

fn build_node(c: Configuration, z: ExponentVector, indices: Vec<usize>) -> Result<DecompositionNode, PolytopeError> {
    let n = c.len();
    let leaf = |c, z, indices, interior| DecompositionNode { configuration: c, exponents: z, indices, split: None, leaf_interior: interior };
    if c.dim() == 0 || n <= 1 {
        return Ok(leaf(c, z, indices, true));
    }
    enumeration_guard(n)?;
    let table = c.rank_table()?;
    let (critical, witness) = classify(&c, &z, &table);
    debug_assert!(witness.is_none(), "decomposition child left K_A");
    let Some(&s) = critical.first() else {
        return Ok(leaf(c, z, indices, true));
    };
    let f = factorize(&c, s)?;
    let tol = *c.tolerances();
    let comp = s.complement(n);
    let left = build_node(f.left(tol)?, z.restrict(s), s.iter().map(|j| indices[j]).collect())?;
    let right = build_node(f.right(tol)?, z.restrict(comp), comp.iter().map(|j| indices[j]).collect())?;
    Ok(DecompositionNode {
        configuration: c,
        exponents: z,
        indices,
        split: Some(Box::new(Split { subset: s, factorization: f, left, right })),
        leaf_interior: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{Matrix, TolerancePolicy};
    use crate::scalar::rational;
    use crate::RealMatrix;

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

    fn zq(v: &[(i64, i64)]) -> ExponentVector {
        ExponentVector::from_rationals(v.iter().map(|&(a, b)| rational(a, b)).collect())
    }

    fn canonical() -> ExponentVector {
        zq(&[(1, 2), (5, 8), (5, 8), (5, 8), (5, 8)])
    }

    fn boundary() -> ExponentVector {
        zq(&[(2, 3), (2, 3), (2, 3), (1, 2), (1, 2)])
    }

    #[test]
    fn canonical_point_is_interior() {
        let r = membership(&example6(), &canonical()).unwrap();
        assert!(r.member && r.interior && r.critical_sets.is_empty());
    }

    #[test]
    fn boundary_point_has_critical_triangle() {
        let r = membership(&example6(), &boundary()).unwrap();
        assert!(r.member && !r.interior);
        assert_eq!(r.critical_sets, vec![IndexSet::from_indices([0, 1, 2])]);
    }

    #[test]
    fn supercritical_witness() {
        let z = zq(&[(1, 1), (1, 1), (1, 2), (1, 4), (1, 4)]);
        let r = membership(&example6(), &z).unwrap();
        assert!(!r.member);
        let w = r.supercritical_witness.unwrap();
        assert!(z.subset_sum(w) > rational(example6().subset_rank(w).unwrap() as i64, 1));
    }

    #[test]
    fn scaling_is_enforced() {
        let z = zq(&[(1, 2), (1, 2), (1, 2), (1, 2), (1, 2)]);
        assert!(matches!(membership(&example6(), &z), Err(PolytopeError::ScalingViolated { .. })));
    }

    #[test]
    fn defective_configuration_is_refused() {
        let c = Configuration::new(cols(2, &[&[1., 0.], &[2., 0.], &[0., 1.]]), TolerancePolicy::default()).unwrap();
        let z = zq(&[(1, 2), (1, 2), (1, 1)]);
        assert!(matches!(membership(&c, &z), Err(PolytopeError::DefectiveConfiguration(_))));
    }

    #[test]
    fn least_superset_examples() {
        let c = example6();
        assert_eq!(
            least_critical_superset(&c, &boundary(), IndexSet::singleton(0)).unwrap(),
            Some(IndexSet::from_indices([0, 1, 2]))
        );
        assert_eq!(least_critical_superset(&c, &boundary(), IndexSet::singleton(3)).unwrap(), None);
        assert_eq!(least_critical_superset(&c, &canonical(), IndexSet::singleton(1)).unwrap(), None);
        let v = ExponentVector::indicator(5, IndexSet::from_indices([0, 1, 3]));
        assert_eq!(least_critical_superset(&c, &v, IndexSet::singleton(0)).unwrap(), Some(IndexSet::singleton(0)));
    }

    #[test]
    fn vertex_counts() {
        // a_0 = a_3 - a_4, so {0, 3, 4} is dependent along with {0, 1, 2}.
        assert_eq!(vertices(&example6()).unwrap().len(), 8);
        let id = Configuration::new(Matrix::identity(3), TolerancePolicy::default()).unwrap();
        let v = vertices(&id).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].values(), vec![1.0; 3]);
        let tri = Configuration::new(cols(2, &[&[1., 0.], &[0., 1.], &[1., 1.]]), TolerancePolicy::default()).unwrap();
        assert_eq!(vertices(&tri).unwrap().len(), 3);
    }

    #[test]
    fn vertices_are_members() {
        let c = example6();
        for v in vertices(&c).unwrap() {
            assert!(membership(&c, &v).unwrap().member);
        }
    }

    #[test]
    fn hull_membership_examples() {
        let c = example6();
        assert!(membership_via_hull(&c, &canonical()).unwrap());
        assert!(membership_via_hull(&c, &boundary()).unwrap());
        let outside = zq(&[(6, 5), (1, 2), (1, 2), (2, 5), (2, 5)]);
        assert!(!membership_via_hull(&c, &outside).unwrap());
        let vs = vertices(&c).unwrap();
        let mid = ExponentVector::from_rationals(
            vs[0].exact().iter().zip(vs[4].exact()).map(|(a, b)| (a + b) / rational(2, 1)).collect(),
        );
        assert!(membership_via_hull(&c, &mid).unwrap());
    }

    #[test]
    fn decompose_interior_is_leaf() {
        let d = decompose(&example6(), &canonical()).unwrap();
        assert!(d.is_leaf() && d.leaf_interior);
    }

    #[test]
    fn decompose_boundary_splits_once() {
        let d = decompose(&example6(), &boundary()).unwrap();
        let s = d.split.as_ref().unwrap();
        assert_eq!(s.subset, IndexSet::from_indices([0, 1, 2]));
        assert_eq!((s.left.configuration.dim(), s.left.configuration.len()), (2, 3));
        assert_eq!((s.right.configuration.dim(), s.right.configuration.len()), (1, 2));
        assert!(s.left.is_leaf() && s.left.leaf_interior);
        assert!(s.right.is_leaf() && s.right.leaf_interior);
        assert_eq!(s.right.indices, vec![3, 4]);
        assert_eq!(s.left.exponents.sum(), rational(2, 1));
        assert_eq!(s.right.exponents.sum(), rational(1, 1));
    }

    #[test]
    fn decompose_vertex_reaches_trivial_leaves() {
        let c = example6();
        let v = ExponentVector::indicator(5, IndexSet::from_indices([0, 1, 3]));
        let d = decompose(&c, &v).unwrap();
        for leaf in d.leaves() {
            assert!(leaf.leaf_interior);
            let cfg = &leaf.configuration;
            assert!(cfg.dim() == 0 || (cfg.dim() == 1 && cfg.len() == 1), "leaf {:?}", leaf.indices);
        }
        let mut all: Vec<usize> = d.leaves().iter().flat_map(|l| l.indices.clone()).collect();
        all.sort();
        assert_eq!(all, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn float_exponents_are_snapped() {
        let z = ExponentVector::from_f64(&[2.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0, 0.5, 0.5]).unwrap();
        assert!(z.was_snapped());
        assert_eq!(z, boundary_snapped());
        assert_eq!(ExponentVector::from_p_f64(&[f64::INFINITY, 1.0]).unwrap().exact()[0], rational(0, 1));
    }

    fn boundary_snapped() -> ExponentVector {
        ExponentVector { snapped: true, ..boundary() }
    }
}
