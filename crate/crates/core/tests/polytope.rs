mod common;

use blc_core::polytope::{decompose, membership, membership_via_hull, vertices, DecompositionNode, PolytopeError};
use blc_core::scalar::{rational, rational_from_int};
use blc_core::{Configuration, ExponentVector, IndexSet};
use common::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Random `z ∈ [0,1]^N` with denominator `d ≤ 12` and `Σ z = M`.
fn random_rational_z(r: &mut ChaCha8Rng, n: usize, m: usize) -> ExponentVector {
    let d = r.gen_range(1..=12i64);
    let mut k = vec![0i64; n];
    let mut left = m as i64 * d;
    while left > 0 {
        let j = r.gen_range(0..n);
        if k[j] < d {
            k[j] += 1;
            left -= 1;
        }
    }
    ExponentVector::from_rationals(k.iter().map(|&x| rational(x, d)).collect())
}

fn test_configurations() -> Vec<(Vec<Vec<i64>>, usize)> {
    let mut out = vec![
        (vec![vec![1, 0], vec![-1, -1], vec![0, 1]], 2),
        (vec![vec![1, -1, 0], vec![0, 1, -1], vec![-1, 0, 1], vec![1, 0, 0], vec![0, 1, 0]], 3),
        (vec![vec![1, 0], vec![0, 1], vec![1, 1], vec![1, -1]], 2),
        (vec![vec![1, 0, 0], vec![0, 1, 0], vec![1, 1, 0], vec![0, 0, 1]], 3),
    ];
    let mut r = rng(5);
    while out.len() < 8 {
        let (cols, m, _) = random_redundant(&mut r, 4, 10);
        out.push((cols, m));
    }
    out
}

#[test]
fn subset_rank_and_hull_membership_agree() {
    let mut r = rng(1000);
    for (cols, m) in test_configurations() {
        let c = config(&cols, m);
        let (mut inside, mut outside) = (0, 0);
        for _ in 0..1000 {
            let z = random_rational_z(&mut r, cols.len(), m);
            let rank_test = membership(&c, &z).unwrap().member;
            assert_eq!(rank_test, membership_via_hull(&c, &z).unwrap(), "{cols:?} z = {:?}", z.values());
            if rank_test { inside += 1 } else { outside += 1 }
        }
        assert!(inside > 0, "{cols:?}: no sampled point inside");
        let _ = outside;
    }
}

#[test]
fn critical_sets_form_a_lattice() {
    let mut r = rng(77);
    for (cols, m) in test_configurations() {
        let c = config(&cols, m);
        let n = cols.len();
        for _ in 0..200 {
            let z = random_rational_z(&mut r, n, m);
            let rep = membership(&c, &z).unwrap();
            if !rep.member {
                continue;
            }
            let crit: std::collections::HashSet<u64> = rep.critical_sets.iter().map(|s| s.0).collect();
            let is_critical = |s: u64| s == 0 || s == IndexSet::full(n).0 || crit.contains(&s);
            for &a in &crit {
                for &b in &crit {
                    assert!(is_critical(a & b) && is_critical(a | b), "{cols:?} {a:b} {b:b}");
                }
            }
        }
    }
}

#[test]
fn vertices_are_members_and_critical_sets_are_spanned_inside_the_basis() {
    for (cols, m) in test_configurations() {
        let c = config(&cols, m);
        let n = cols.len();
        let verts = vertices(&c).unwrap();
        let expected = subsets(n, m)
            .iter()
            .filter(|s| int_rank(&s.iter().map(|&j| cols[j].clone()).collect::<Vec<_>>(), m) == m)
            .count();
        assert_eq!(verts.len(), expected);
        for v in &verts {
            let rep = membership(&c, v).unwrap();
            assert!(rep.member);
            let support: Vec<usize> = (0..n).filter(|&j| v.values()[j] == 1.0).collect();
            for s in &rep.critical_sets {
                let inner: Vec<Vec<i64>> = s.iter().filter(|j| support.contains(j)).map(|j| cols[j].clone()).collect();
                let whole: Vec<Vec<i64>> = s.iter().map(|j| cols[j].clone()).collect();
                assert_eq!(int_rank(&inner, m), inner.len());
                assert_eq!(int_rank(&inner, m), int_rank(&whole, m));
            }
        }
    }
}

fn check_node(node: &DecompositionNode) {
    let c = &node.configuration;
    assert_eq!(node.exponents.sum(), rational_from_int(c.dim() as i64));
    if let Some(split) = &node.split {
        assert_eq!(split.left.configuration.dim() + split.right.configuration.dim(), c.dim());
        assert_eq!(split.left.exponents.sum(), rational_from_int(split.factorization.r as i64));
        let mut idx = split.left.indices.clone();
        idx.extend(&split.right.indices);
        idx.sort();
        assert_eq!(idx, node.indices);
        check_node(&split.left);
        check_node(&split.right);
    } else {
        assert!(node.leaf_interior || c.len() == c.dim() || c.dim() == 0);
    }
}

#[test]
fn decompositions_respect_scaling() {
    let mut r = rng(31);
    let mut boundary = 0;
    for (cols, m) in test_configurations() {
        let c = config(&cols, m);
        for _ in 0..300 {
            let z = random_rational_z(&mut r, cols.len(), m);
            match decompose(&c, &z) {
                Ok(node) => {
                    if node.split.is_some() {
                        boundary += 1;
                    }
                    check_node(&node);
                }
                Err(PolytopeError::NotMember { .. }) => {}
                Err(e) => panic!("{e}"),
            }
        }
    }
    assert!(boundary > 20);
}

#[test]
fn five_vector_worked_example() {
    let c = five_vectors();
    assert_eq!(vertices(&c).unwrap().len(), 8);
    let rep = membership(&c, &zq(&[(2, 3), (2, 3), (2, 3), (1, 2), (1, 2)])).unwrap();
    assert!(rep.member && !rep.interior);
    assert_eq!(rep.critical_sets[0], IndexSet::from_indices([0, 1, 2]));
    let out = zq(&[(1, 1), (1, 1), (1, 1), (0, 1), (0, 1)]);
    assert!(matches!(decompose(&c, &out), Err(PolytopeError::NotMember { .. })));
}

#[test]
fn scaling_violation_is_an_error() {
    let c: Configuration = young_triple();
    assert!(matches!(membership(&c, &zq(&[(1, 2), (1, 2), (1, 2)])), Err(PolytopeError::ScalingViolated { .. })));
}
