#![allow(dead_code)]

use blc_core::{Configuration, ExponentVector, Matrix, RealMatrix, TolerancePolicy};
use blc_core::scalar::rational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Rank of an integer matrix (columns given) by fraction-free elimination in i128.
pub fn int_rank(cols: &[Vec<i64>], m: usize) -> usize {
    let n = cols.len();
    let mut a: Vec<Vec<i128>> = (0..m).map(|i| (0..n).map(|j| cols[j][i] as i128).collect()).collect();
    let mut rank = 0;
    for c in 0..n {
        let Some(p) = (rank..m).find(|&i| a[i][c] != 0) else { continue };
        a.swap(p, rank);
        for i in rank + 1..m {
            let (f, g) = (a[rank][c], a[i][c]);
            for j in 0..n {
                a[i][j] = a[i][j] * f - a[rank][j] * g;
            }
            let gcd = a[i].iter().fold(0i128, |g, &x| gcd(g, x.abs()));
            if gcd > 1 {
                a[i].iter_mut().for_each(|x| *x /= gcd);
            }
        }
        rank += 1;
        if rank == m {
            break;
        }
    }
    rank
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 { a } else { gcd(b, a % b) }
}

/// Determinant by cofactor expansion, for small matrices.
pub fn cofactor_det(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    if n == 0 {
        return 1.0;
    }
    if n == 1 {
        return m[0][0];
    }
    (0..n)
        .map(|j| {
            let minor: Vec<Vec<f64>> = m[1..].iter().map(|r| r.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, v)| *v).collect()).collect();
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            sign * m[0][j] * cofactor_det(&minor)
        })
        .sum()
}

pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

pub fn real(cols: &[Vec<i64>], m: usize) -> RealMatrix {
    let c: Vec<Vec<f64>> = cols.iter().map(|v| v.iter().map(|&x| x as f64).collect()).collect();
    Matrix::from_columns(m, &c).unwrap()
}

pub fn config(cols: &[Vec<i64>], m: usize) -> Configuration {
    Configuration::new(real(cols, m), TolerancePolicy::default()).unwrap()
}

/// Random integer columns in `[-2, 2]^m`, nonzero.
pub fn random_columns(rng: &mut ChaCha8Rng, m: usize, n: usize) -> Vec<Vec<i64>> {
    (0..n)
        .map(|_| loop {
            let v: Vec<i64> = (0..m).map(|_| rng.gen_range(-2..=2)).collect();
            if v.iter().any(|&x| x != 0) {
                break v;
            }
        })
        .collect()
}

/// Random properly redundant configuration with `M ∈ [2, max_m]`, `N ∈ [M+1, max_n]`.
pub fn random_redundant(rng: &mut ChaCha8Rng, max_m: usize, max_n: usize) -> (Vec<Vec<i64>>, usize, Configuration) {
    loop {
        let m = rng.gen_range(2..=max_m);
        let n = rng.gen_range(m + 1..=max_n.max(m + 1));
        let cols = random_columns(rng, m, n);
        let c = config(&cols, m);
        if c.properly_redundant() {
            return (cols, m, c);
        }
    }
}

/// Interior point: a strictly positive Dirichlet mixture of basis
/// indicators, with weights quantized to a common denominator so that
/// `Σ z = M` holds exactly.
pub fn random_interior(rng: &mut ChaCha8Rng, cols: &[Vec<i64>], m: usize) -> ExponentVector {
    const DEN: i64 = 1 << 20;
    let n = cols.len();
    let bases: Vec<Vec<usize>> = subsets(n, m)
        .into_iter()
        .filter(|s| int_rank(&s.iter().map(|&j| cols[j].clone()).collect::<Vec<_>>(), m) == m)
        .collect();
    let w: Vec<f64> = bases.iter().map(|_| -rng.gen::<f64>().max(1e-12).ln()).collect();
    let total: f64 = w.iter().sum();
    let free = DEN - bases.len() as i64;
    let mut k: Vec<i64> = w.iter().map(|x| 1 + (x / total * free as f64).floor() as i64).collect();
    let short = DEN - k.iter().sum::<i64>();
    k[0] += short;
    let mut num = vec![0i64; n];
    for (b, kb) in bases.iter().zip(&k) {
        for &j in b {
            num[j] += kb;
        }
    }
    ExponentVector::from_rationals(num.iter().map(|&x| rational(x, DEN)).collect())
}

/// `λ z0 + (1 − λ) z1` in exact arithmetic.
pub fn mix(z0: &ExponentVector, z1: &ExponentVector, lam: (i64, i64)) -> ExponentVector {
    let l = rational(lam.0, lam.1);
    let one = rational(1, 1);
    ExponentVector::from_rationals(
        z0.exact().iter().zip(z1.exact()).map(|(a, b)| &l * a + (&one - &l) * b).collect(),
    )
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn zq(v: &[(i64, i64)]) -> ExponentVector {
    ExponentVector::from_rationals(v.iter().map(|&(a, b)| rational(a, b)).collect())
}

/// The planar three-vector configuration of the classical sharp Young inequality.
pub fn young_triple() -> Configuration {
    config(&[vec![1, 0], vec![-1, -1], vec![0, 1]], 2)
}

/// Five vectors in R^3: three edges of a triangle and two coordinate axes.
pub fn five_vectors() -> Configuration {
    config(&[vec![1, -1, 0], vec![0, 1, -1], vec![-1, 0, 1], vec![1, 0, 0], vec![0, 1, 0]], 3)
}

/// Fixed-seed proptest configuration, so failures reproduce across runs.
pub fn proptest_config(cases: u32) -> proptest::test_runner::Config {
    proptest::test_runner::Config {
        cases,
        rng_seed: proptest::test_runner::RngSeed::Fixed(0x5eed),
        failure_persistence: None,
        ..Default::default()
    }
}
