//! Jacobi eigen/singular value decompositions and Cholesky, for any
//! floating point [`Scalar`].

use num_traits::Float;

use super::{LinalgError, Matrix};
use crate::scalar::Scalar;

const MAX_SWEEPS: usize = 100;

/// Symmetric eigendecomposition `m = V diag(values) V^t` by cyclic Jacobi.
/// Eigenvalues are sorted in decreasing order; eigenvectors are the columns of `V`.
pub fn symmetric_eigen<T: Scalar + Float>(m: &Matrix<T>) -> Result<(Vec<T>, Matrix<T>), LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare(m.rows(), m.cols()));
    }
    let n = m.rows();
    let mut a = m.clone();
    let mut v = Matrix::identity(n);
    let two = T::one() + T::one();
    for _ in 0..MAX_SWEEPS {
        let mut off = T::zero();
        let mut total = T::zero();
        for i in 0..n {
            for j in 0..n {
                let x = a[(i, j)] * a[(i, j)];
                total = total + x;
                if i != j {
                    off = off + x;
                }
            }
        }
        if off <= T::epsilon() * T::epsilon() * total || off == T::zero() {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == T::zero() {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (two * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].partial_cmp(&a[(i, i)]).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    Ok((values, v.select_columns(&order)))
}

/// Singular values in decreasing order, by one-sided Jacobi on the columns
/// of `m` (or of `m^t` when that has fewer columns).
pub fn singular_values<T: Scalar + Float>(m: &Matrix<T>) -> Vec<T> {
    let mut a = if m.cols() > m.rows() { m.transpose() } else { m.clone() };
    let (rows, cols) = a.shape();
    let two = T::one() + T::one();
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..cols {
            for q in p + 1..cols {
                let (mut alpha, mut beta, mut gamma) = (T::zero(), T::zero(), T::zero());
                for i in 0..rows {
                    alpha = alpha + a[(i, p)] * a[(i, p)];
                    beta = beta + a[(i, q)] * a[(i, q)];
                    gamma = gamma + a[(i, p)] * a[(i, q)];
                }
                if gamma == T::zero() || gamma.abs() <= T::epsilon() * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (two * gamma);
                let t = zeta.signum() / (zeta.abs() + (zeta * zeta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = c * t;
                for i in 0..rows {
                    let x = a[(i, p)];
                    let y = a[(i, q)];
                    a[(i, p)] = c * x - s * y;
                    a[(i, q)] = s * x + c * y;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<T> = (0..cols)
        .map(|j| (0..rows).fold(T::zero(), |acc, i| acc + a[(i, j)] * a[(i, j)]).sqrt())
        .collect();
    sv.sort_by(|x, y| y.partial_cmp(x).unwrap_or(std::cmp::Ordering::Equal));
    sv
}

/// Lower-triangular `L` with `m = L L^t`.
pub fn cholesky<T: Scalar + Float>(m: &Matrix<T>) -> Result<Matrix<T>, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare(m.rows(), m.cols()));
    }
    let n = m.rows();
    let mut l = Matrix::zeros(n, n);
    for j in 0..n {
        let mut d = m[(j, j)];
        for k in 0..j {
            d = d - l[(j, k)] * l[(j, k)];
        }
        if !(d > T::zero()) {
            return Err(LinalgError::NotSpd { min_eigenvalue: d.to_f64_lossy() });
        }
        let d = d.sqrt();
        l[(j, j)] = d;
        for i in j + 1..n {
            let mut s = m[(i, j)];
            for k in 0..j {
                s = s - l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / d;
        }
    }
    Ok(l)
}

/// Solves `L L^t x = b` given the Cholesky factor.
pub fn cholesky_solve<T: Scalar + Float>(l: &Matrix<T>, b: &[T]) -> Vec<T> {
    let n = l.rows();
    let mut y = b.to_vec();
    for i in 0..n {
        for k in 0..i {
            y[i] = y[i] - l[(i, k)] * y[k];
        }
        y[i] = y[i] / l[(i, i)];
    }
    for i in (0..n).rev() {
        for k in i + 1..n {
            y[i] = y[i] - l[(k, i)] * y[k];
        }
        y[i] = y[i] / l[(i, i)];
    }
    y
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigen_reconstructs_symmetric_matrix() {
        let m = Matrix::from_rows(&[vec![2.0, 1.0, 0.0], vec![1.0, 3.0, 1.0], vec![0.0, 1.0, 4.0]])
            .unwrap();
        let (vals, v) = symmetric_eigen(&m).unwrap();
        let back = v.matmul(&Matrix::diagonal(&vals)).unwrap().matmul(&v.transpose()).unwrap();
        assert!(back.max_abs_diff(&m) < 1e-13);
        assert!(vals.windows(2).all(|w| w[0] >= w[1]));
        assert!((vals.iter().sum::<f64>() - 9.0).abs() < 1e-13);
    }

    #[test]
    fn singular_values_of_known_matrix() {
        // [[3, 0], [4, 5]] has singular values sqrt(45) and sqrt(5).
        let m = Matrix::from_rows(&[vec![3.0, 0.0], vec![4.0, 5.0]]).unwrap();
        let sv = singular_values(&m);
        assert!((sv[0] - 45f64.sqrt()).abs() < 1e-13);
        assert!((sv[1] - 5f64.sqrt()).abs() < 1e-13);
        let wide = Matrix::from_rows(&[vec![1.0, 0.0, 1.0], vec![0.0, 1.0, 1.0]]).unwrap();
        let sv = singular_values(&wide);
        assert_eq!(sv.len(), 2);
        assert!((sv[0] - 3f64.sqrt()).abs() < 1e-13 && (sv[1] - 1.0).abs() < 1e-13);
    }

    #[test]
    fn cholesky_solves() {
        let m = Matrix::from_rows(&[vec![4.0, 2.0], vec![2.0, 3.0]]).unwrap();
        let l = cholesky(&m).unwrap();
        let x = cholesky_solve(&l, &[2.0, 1.0]);
        let r = m.matvec(&x);
        assert!((r[0] - 2.0).abs() < 1e-14 && (r[1] - 1.0).abs() < 1e-14);
        let indefinite = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        assert!(cholesky(&indefinite).is_err());
    }

    #[test]
    fn f32_eigen() {
        let m: Matrix<f32> = Matrix::diagonal(&[1.0, 5.0, 3.0]);
        let (vals, _) = symmetric_eigen(&m).unwrap();
        assert_eq!(vals, vec![5.0, 3.0, 1.0]);
    }
}
