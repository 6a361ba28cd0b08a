mod common;

use blc_core::linalg::elim::{exact_rank, rank_elim};
use blc_core::linalg::{cauchy_binet_logdet, inverse_sqrt_spd, projection_onto_row_space, rank, ExactMirror};
use blc_core::{Matrix, RationalMatrix, RealMatrix, SingleMatrix, TolerancePolicy};
use common::*;
use proptest::prelude::*;

fn int_matrix(m: usize, n: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::vec(prop::collection::vec(-3i64..=3, m), n)
}

fn spd(m: usize) -> impl Strategy<Value = RealMatrix> {
    prop::collection::vec(-1.0f64..1.0, m * m).prop_map(move |v| {
        let b = Matrix::new(m, m, v).unwrap();
        let mut g = b.matmul(&b.transpose()).unwrap();
        for i in 0..m {
            g[(i, i)] += 0.5;
        }
        g
    })
}

fn inf_norm_diff_identity(a: &RealMatrix) -> f64 {
    a.max_abs_diff(&Matrix::identity(a.rows()))
}

proptest! {
    #![proptest_config(proptest_config(64))]

    #[test]
    fn inverse_sqrt_whitens(g in (1usize..=5).prop_flat_map(spd)) {
        let r = inverse_sqrt_spd(&g, &TolerancePolicy::default()).unwrap();
        let w = r.matmul(&g).unwrap().matmul(&r).unwrap();
        prop_assert!(inf_norm_diff_identity(&w) < 1e-10);
    }

    #[test]
    fn projection_is_idempotent_with_trace_m(
        (m, cols) in (1usize..=4).prop_flat_map(|m| (Just(m), int_matrix(m, m + 3)))
    ) {
        let a = real(&cols, m);
        prop_assume!(int_rank(&cols, m) == m);
        let sv = blc_core::linalg::decomp::singular_values(&a);
        prop_assume!(sv.iter().cloned().fold(f64::INFINITY, f64::min) > 1e-3);
        let p = projection_onto_row_space(&a, &TolerancePolicy::default()).unwrap();
        let p2 = p.matmul(&p).unwrap();
        prop_assert!(p2.max_abs_diff(&p) < 1e-10);
        prop_assert!((p.trace() - m as f64).abs() < 1e-10);
    }

    #[test]
    fn float_and_exact_ranks_agree(
        (m, n, cols) in (1usize..=4, 1usize..=7).prop_flat_map(|(m, n)| (Just(m), Just(n), int_matrix(m, n)))
    ) {
        let expected = int_rank(&cols, m);
        let a = real(&cols, m);
        let tol = TolerancePolicy::default();
        prop_assert_eq!(rank(&a, None, &tol).unwrap(), expected);
        let exact = RationalMatrix::from_f64_exact(&a).unwrap();
        prop_assert_eq!(exact_rank(&exact), expected);
        prop_assert_eq!(rank(&a, Some(&ExactMirror::entrywise(exact.clone())), &tol).unwrap(), expected);
        // The generic elimination runs unchanged on all three scalar types.
        prop_assert_eq!(rank_elim(&exact), expected);
        prop_assert_eq!(rank_elim(&a), expected);
        let single: SingleMatrix = a.map(|x| *x as f32);
        prop_assert_eq!(rank_elim(&single), expected);
        let _ = n;
    }

    #[test]
    fn cauchy_binet_matches_direct_determinant(
        (m, cols, t) in (1usize..=3).prop_flat_map(|m| {
            (m..=(m + 4).min(10)).prop_flat_map(move |n| (Just(m), int_matrix(m, n), prop::collection::vec(-2.0f64..2.0, n)))
        })
    ) {
        prop_assume!(int_rank(&cols, m) == m);
        let a = real(&cols, m);
        // ln det(A e^T A^t) by cofactor expansion of the Gram matrix.
        let gram: Vec<Vec<f64>> = (0..m)
            .map(|i| (0..m).map(|k| cols.iter().zip(&t).map(|(c, tj)| c[i] as f64 * c[k] as f64 * tj.exp()).sum()).collect())
            .collect();
        let direct = cofactor_det(&gram).ln();
        let cb = cauchy_binet_logdet(&a, &t).unwrap();
        prop_assert!((cb - direct).abs() < 1e-9 * direct.abs().max(1.0), "{cb} vs {direct}");
    }
}

#[test]
fn cauchy_binet_on_every_small_integer_configuration_size() {
    // Up to N = 10 as required, on a fixed seeded batch.
    let mut r = rng(17);
    for n in 3..=10 {
        let m = 3;
        let cols = random_columns(&mut r, m, n);
        if int_rank(&cols, m) < m {
            continue;
        }
        let t: Vec<f64> = (0..n).map(|j| (j as f64 * 0.37).sin()).collect();
        let sum: f64 = subsets(n, m)
            .iter()
            .map(|s| {
                let minor: Vec<Vec<f64>> = (0..m).map(|i| s.iter().map(|&j| cols[j][i] as f64).collect()).collect();
                cofactor_det(&minor).powi(2) * s.iter().map(|&j| t[j].exp()).product::<f64>()
            })
            .sum();
        let cb = cauchy_binet_logdet(&real(&cols, m), &t).unwrap();
        assert!((cb - sum.ln()).abs() < 1e-9, "n = {n}");
    }
}
