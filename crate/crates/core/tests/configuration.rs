mod common;

use blc_core::configuration::{factorize, reduce_essential, ConfigError};
use blc_core::{Configuration, IndexSet, Matrix, TolerancePolicy};
use common::*;
use proptest::prelude::*;

fn columns(m: usize, n: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::vec(prop::collection::vec(-2i64..=2, m), n)
        .prop_filter("nonzero columns", |c| c.iter().all(|v| v.iter().any(|&x| x != 0)))
}

fn spanning() -> impl Strategy<Value = (usize, Vec<Vec<i64>>)> {
    (1usize..=4)
        .prop_flat_map(|m| (m..=12usize.min(m + 8)).prop_flat_map(move |n| (Just(m), columns(m, n))))
        .prop_filter("spanning", |(m, c)| int_rank(c, *m) == *m)
}

/// `∫_{R^M} Π_j exp(−π w_j (a_j·x)^2) dx = det(A W A^t)^{-1/2}`.
fn gaussian_integral(cols: &[Vec<f64>], w: &[f64]) -> f64 {
    let m = cols[0].len();
    let g: Vec<Vec<f64>> = (0..m)
        .map(|i| (0..m).map(|k| cols.iter().zip(w).map(|(c, wj)| wj * c[i] * c[k]).sum()).collect())
        .collect();
    cofactor_det(&g).powf(-0.5)
}

proptest! {
    #![proptest_config(proptest_config(96))]

    #[test]
    fn essential_definitions_agree((m, cols) in spanning()) {
        let c = config(&cols, m);
        let n = cols.len();
        let expected: Vec<usize> = (0..n)
            .filter(|&j| {
                let rest: Vec<Vec<i64>> = cols.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, v)| v.clone()).collect();
                int_rank(&rest, m) == m - 1
            })
            .collect();
        prop_assert_eq!(c.essential().to_vec(), expected);
    }

    #[test]
    fn factorization_reconstructs((m, cols) in spanning(), mask in any::<u64>()) {
        let n = cols.len();
        let s = IndexSet(mask & IndexSet::full(n).0);
        prop_assume!(!s.is_empty() && s != IndexSet::full(n));
        let c = config(&cols, m);
        let f = factorize(&c, s).unwrap();
        prop_assert!(f.reconstruction_error(c.matrix()) < 1e-10);
        let sub: Vec<Vec<i64>> = s.iter().map(|j| cols[j].clone()).collect();
        prop_assert_eq!(f.r, int_rank(&sub, m));
        for j in s.iter() {
            for i in 0..f.c_vectors.rows() {
                prop_assert_eq!(f.c_vectors[(i, j)], 0.0);
            }
        }
        let tol = TolerancePolicy::default();
        prop_assert_eq!(f.left(tol).unwrap().dim() + f.right(tol).unwrap().dim(), m);
    }

    #[test]
    fn reduction_preserves_gaussian_integral(
        (m, cols) in spanning().prop_filter("has essential", |(m, c)| *m >= 2 && config(c, *m).essential().len() > 0),
        w in prop::collection::vec(0.2f64..3.0, 12),
    ) {
        let c = config(&cols, m);
        let j = c.essential().to_vec()[0];
        let (reduced, factor) = reduce_essential(&c, j).unwrap();
        let n = cols.len();
        let colsf: Vec<Vec<f64>> = cols.iter().map(|v| v.iter().map(|&x| x as f64).collect()).collect();
        let w = &w[..n];
        let full = gaussian_integral(&colsf, w);
        // ‖exp(−π w t^2)‖_1 = w^{-1/2}.
        let rest: Vec<Vec<f64>> = (0..n).filter(|&k| k != j).map(|k| reduced.column(k - usize::from(k > j))).collect();
        let rw: Vec<f64> = (0..n).filter(|&k| k != j).map(|k| w[k]).collect();
        let reduced_integral = if reduced.dim() == 0 { 1.0 } else { gaussian_integral(&rest, &rw) };
        let predicted = w[j].powf(-0.5) * factor * reduced_integral;
        prop_assert!((full - predicted).abs() < 1e-8 * full.max(1.0), "{full} vs {predicted}");
    }
}

#[test]
fn proportional_pairs_are_recorded_not_rejected() {
    let c = config(&[vec![1, 0], vec![2, 0], vec![0, 1], vec![1, 1]], 2);
    assert_eq!(c.proportional_pairs, vec![(0, 1)]);
    assert!(!c.properly_redundant());
    assert!(matches!(c.require_properly_redundant(), Err(ConfigError::Defective(_))));
}

#[test]
fn non_spanning_and_bad_shapes() {
    let c = config(&[vec![1, 0, 0], vec![0, 1, 0], vec![1, 1, 0]], 3);
    assert!(!c.spans);
    assert!(!c.defects().is_empty());
    let wide = Matrix::from_columns(3, &[vec![1.0, 0.0, 0.0]]).unwrap();
    assert!(matches!(
        Configuration::new(wide, TolerancePolicy::default()),
        Err(ConfigError::InvalidShape { m: 3, n: 1 })
    ));
}

#[test]
fn five_vector_split_on_the_triangle() {
    let c = five_vectors();
    let f = factorize(&c, IndexSet::from_indices([0, 1, 2])).unwrap();
    assert_eq!(f.r, 2);
    let off: f64 = (3..5).map(|j| (0..f.c_vectors.rows()).map(|i| f.c_vectors[(i, j)].abs()).sum::<f64>()).sum();
    assert!(off > 0.1);
    assert!(f.reconstruction_error(c.matrix()) < 1e-12);
}
