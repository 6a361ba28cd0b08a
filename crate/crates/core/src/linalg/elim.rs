//! Gaussian elimination over any [`Scalar`] field, plus fraction-free
//! (Bareiss) elimination for exact rank and determinant.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{LinalgError, Matrix, RationalMatrix};
use crate::scalar::{common_denominator, Rational, Scalar};

/// Reduced row echelon form and its pivot columns.
#[derive(Debug, Clone)]
pub struct Rref<T> {
    pub matrix: Matrix<T>,
    pub pivots: Vec<usize>,
}

/// Gauss-Jordan elimination with partial pivoting.
pub fn rref<T: Scalar>(m: &Matrix<T>) -> Rref<T> {
    let (rows, cols) = m.shape();
    let mut a = m.clone();
    let scale = m.max_abs();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let mut best = r;
        for i in r + 1..rows {
            if a[(i, c)].abs() > a[(best, c)].abs() {
                best = i;
            }
        }
        if a[(best, c)].negligible(&scale) {
            for i in r..rows {
                a[(i, c)] = T::zero();
            }
            continue;
        }
        if best != r {
            for j in 0..cols {
                let tmp = a[(r, j)].clone();
                a[(r, j)] = a[(best, j)].clone();
                a[(best, j)] = tmp;
            }
        }
        let piv = a[(r, c)].clone();
        for j in c..cols {
            a[(r, j)] = a[(r, j)].clone() / piv.clone();
        }
        for i in 0..rows {
            if i == r || a[(i, c)].is_zero() {
                continue;
            }
            let f = a[(i, c)].clone();
            for j in c..cols {
                let d = f.clone() * a[(r, j)].clone();
                a[(i, j)] = a[(i, j)].clone() - d;
            }
        }
        pivots.push(c);
        r += 1;
    }
    Rref { matrix: a, pivots }
}

/// Rank by elimination; exact for rationals, tolerance-based for floats.
pub fn rank_elim<T: Scalar>(m: &Matrix<T>) -> usize {
    rref(m).pivots.len()
}

/// Basis of the right nullspace `{x : m x = 0}`, one vector per free column.
pub fn nullspace<T: Scalar>(m: &Matrix<T>) -> Vec<Vec<T>> {
    let Rref { matrix, pivots } = rref(m);
    let cols = m.cols();
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![T::zero(); cols];
            v[f] = T::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -matrix[(r, f)].clone();
            }
            v
        })
        .collect()
}

/// Determinant by LU with partial pivoting.
pub fn determinant<T: Scalar>(m: &Matrix<T>) -> Result<T, LinalgError> {
    let n = m.rows();
    if !m.is_square() {
        return Err(LinalgError::NotSquare(m.rows(), m.cols()));
    }
    let mut a = m.clone();
    let mut det = T::one();
    for c in 0..n {
        let mut best = c;
        for i in c + 1..n {
            if a[(i, c)].abs() > a[(best, c)].abs() {
                best = i;
            }
        }
        if a[(best, c)].is_zero() {
            return Ok(T::zero());
        }
        if best != c {
            for j in 0..n {
                let tmp = a[(c, j)].clone();
                a[(c, j)] = a[(best, j)].clone();
                a[(best, j)] = tmp;
            }
            det = -det;
        }
        let piv = a[(c, c)].clone();
        det = det * piv.clone();
        for i in c + 1..n {
            if a[(i, c)].is_zero() {
                continue;
            }
            let f = a[(i, c)].clone() / piv.clone();
            for j in c..n {
                let d = f.clone() * a[(c, j)].clone();
                a[(i, j)] = a[(i, j)].clone() - d;
            }
        }
    }
    Ok(det)
}

/// Solves `m X = b` for square nonsingular `m`.
pub fn solve<T: Scalar>(m: &Matrix<T>, b: &Matrix<T>) -> Result<Matrix<T>, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare(m.rows(), m.cols()));
    }
    let n = m.rows();
    let aug = m.hstack(b)?;
    let Rref { matrix, pivots } = rref(&aug);
    if pivots.len() < n || pivots[n - 1] >= n {
        return Err(LinalgError::Singular);
    }
    let mut x = Matrix::zeros(n, b.cols());
    for i in 0..n {
        for j in 0..b.cols() {
            x[(i, j)] = matrix[(i, n + j)].clone();
        }
    }
    Ok(x)
}

pub fn inverse<T: Scalar>(m: &Matrix<T>) -> Result<Matrix<T>, LinalgError> {
    solve(m, &Matrix::identity(m.rows()))
}

/// Integer matrix whose rows are the rows of `m` cleared of denominators,
/// together with the product of the row multipliers.
fn integer_rows(m: &RationalMatrix) -> (Vec<Vec<BigInt>>, BigInt) {
    let mut scale = BigInt::one();
    let rows = (0..m.rows())
        .map(|i| {
            let row = m.row(i);
            let d = common_denominator(row.iter());
            scale *= &d;
            row.iter().map(|v| (v * Rational::from_integer(d.clone())).to_integer()).collect()
        })
        .collect();
    (rows, scale)
}

/// Fraction-free elimination: returns the rank and, for square input, the
/// exact determinant.
pub fn bareiss(m: &RationalMatrix) -> (usize, Option<Rational>) {
    let (mut a, scale) = integer_rows(m);
    let (rows, cols) = m.shape();
    let mut prev = BigInt::one();
    let mut rank = 0;
    let mut sign = 1i32;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        if p != rank {
            a.swap(p, rank);
            sign = -sign;
        }
        for i in rank + 1..rows {
            for j in c + 1..cols {
                let v = &a[rank][c] * &a[i][j] - &a[i][c] * &a[rank][j];
                a[i][j] = v / &prev;
            }
            a[i][c] = BigInt::zero();
        }
        prev = a[rank][c].clone();
        rank += 1;
    }
    let det = m.is_square().then(|| {
        if rank < rows {
            Rational::zero()
        } else if rows == 0 {
            Rational::one()
        } else {
            Rational::new(prev * sign, scale)
        }
    });
    (rank, det)
}

/// Exact rank of a rational matrix.
pub fn exact_rank(m: &RationalMatrix) -> usize {
    bareiss(m).0
}

/// Exact determinant of a square rational matrix.
pub fn exact_determinant(m: &RationalMatrix) -> Result<Rational, LinalgError> {
    bareiss(m).1.ok_or(LinalgError::NotSquare(m.rows(), m.cols()))
}

/// Whether every entry of `v` is zero.
pub fn is_zero_vector<T: Scalar>(v: &[T]) -> bool {
    v.iter().all(|x| x.is_zero())
}

/// Divides `v` by its first nonzero entry's absolute value, for display and comparison.
pub fn normalize_leading<T: Scalar>(v: &[T]) -> Vec<T> {
    match v.iter().find(|x| !x.is_zero()) {
        Some(lead) => {
            let s = lead.abs();
            v.iter().map(|x| x.clone() / s.clone()).collect()
        }
        None => v.to_vec(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;

    fn q(rows: &[&[i64]]) -> RationalMatrix {
        Matrix::from_rows(
            &rows.iter().map(|r| r.iter().map(|&v| rational(v, 1)).collect()).collect::<Vec<_>>(),
        )
        .unwrap()
    }

    #[test]
    fn bareiss_matches_cofactor_determinant() {
        let m = q(&[&[2, -1, 0], &[-1, 2, -1], &[0, -1, 2]]);
        assert_eq!(exact_determinant(&m).unwrap(), rational(4, 1));
        let m = q(&[&[0, 1], &[1, 0]]);
        assert_eq!(exact_determinant(&m).unwrap(), rational(-1, 1));
        let half = Matrix::from_rows(&[vec![rational(1, 2), rational(0, 1)], vec![rational(0, 1), rational(1, 3)]])
            .unwrap();
        assert_eq!(exact_determinant(&half).unwrap(), rational(1, 6));
    }

    #[test]
    fn rank_of_plane_vectors() {
        let m = q(&[&[1, 0, -1], &[-1, 1, 0], &[0, -1, 1]]);
        assert_eq!(exact_rank(&m), 2);
        assert_eq!(rank_elim(&m), 2);
        assert_eq!(rank_elim(&m.to_f64()), 2);
    }

    #[test]
    fn nullspace_vectors_are_annihilated() {
        let m = q(&[&[1, 0, 1, 2], &[0, 1, 1, 3]]);
        let ns = nullspace(&m);
        assert_eq!(ns.len(), 2);
        for v in ns {
            assert!(is_zero_vector(&m.matvec(&v)));
        }
    }

    #[test]
    fn float_solve_and_inverse() {
        let m = Matrix::from_rows(&[vec![4.0, 1.0], vec![2.0, 3.0]]).unwrap();
        let inv = inverse(&m).unwrap();
        let id = m.matmul(&inv).unwrap();
        assert!(id.max_abs_diff(&Matrix::identity(2)) < 1e-14);
        assert!((determinant(&m).unwrap() - 10.0).abs() < 1e-12);
        let sing = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert_eq!(inverse(&sing), Err(LinalgError::Singular));
    }

    #[test]
    fn f32_elimination() {
        let m: Matrix<f32> = Matrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        assert!((determinant(&m).unwrap() + 2.0).abs() < 1e-5);
        assert_eq!(rank_elim(&m), 2);
    }
}
