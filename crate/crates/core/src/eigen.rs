//! Dense symmetric eigensolver (cyclic Jacobi rotations).
//!
//! Jacobi is slower than tridiagonalization for large matrices but is simple,
//! unconditionally stable for symmetric input, and delivers the full spectrum
//! with orthogonal eigenvectors, which is exactly what the Nystrom matrices
//! here need at a few hundred rows.

use std::ops::{Index, IndexMut};

use crate::{Error, Result, Scalar};

const MAX_SWEEPS: usize = 64;

/// Minimal row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Scalar> SquareMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![T::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Column `j` as a fresh vector.
    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.n).map(|i| self[(i, j)]).collect()
    }

    /// `A x` for a borrowed slice.
    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.n);
        (0..self.n)
            .map(|i| {
                let row = &self.data[i * self.n..(i + 1) * self.n];
                row.iter().zip(x).map(|(&a, &b)| a * b).sum()
            })
            .collect()
    }

    pub fn max_symmetry_defect(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst
    }

    fn frobenius(&self) -> T {
        self.data.iter().map(|&v| v * v).sum::<T>().sqrt()
    }

    fn off_diagonal_frobenius(&self) -> T {
        let mut acc = T::zero();
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    let v = self[(i, j)];
                    acc = acc + v * v;
                }
            }
        }
        acc.sqrt()
    }
}

impl<T> Index<(usize, usize)> for SquareMatrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.n + j]
    }
}

impl<T> IndexMut<(usize, usize)> for SquareMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.n + j]
    }
}

/// Eigen decomposition of a symmetric matrix, sorted descending by eigenvalue.
#[derive(Debug, Clone)]
pub struct SymmetricEigen<T> {
    pub values: Vec<T>,
    /// Column `j` is the unit eigenvector for `values[j]`.
    pub vectors: SquareMatrix<T>,
    pub sweeps: usize,
}

/// Full eigensolution by cyclic Jacobi sweeps.
///
/// Sweeps stop when the off-diagonal Frobenius norm drops below
/// `tol * ||A||_F`; exceeding [`MAX_SWEEPS`] reports a convergence failure
/// with the residual attached.
pub fn symmetric_eigen<T: Scalar>(a: &SquareMatrix<T>, tol: T) -> Result<SymmetricEigen<T>> {
    if !(tol > T::zero()) {
        return Err(Error::Domain(format!("tol must be > 0 (got {tol})")));
    }
    let n = a.n();
    let mut a = a.clone();
    let mut v = SquareMatrix::identity(n);
    let norm = a.frobenius();
    let target = if norm > T::zero() { tol * norm } else { T::zero() };
    let mut sweeps = 0;
    loop {
        let off = a.off_diagonal_frobenius();
        if off <= target {
            break;
        }
        if sweeps >= MAX_SWEEPS {
            return Err(Error::NoConvergence {
                iterations: sweeps,
                residual: off.to_f64().unwrap_or(f64::NAN),
            });
        }
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
        sweeps += 1;
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].partial_cmp(&a[(i, i)]).expect("finite eigenvalues"));
    let values: Vec<T> = order.iter().map(|&i| a[(i, i)]).collect();
    let vectors = SquareMatrix::from_fn(n, |i, j| v[(i, order[j])]);
    Ok(SymmetricEigen { values, vectors, sweeps })
}

fn rotate<T: Scalar>(a: &mut SquareMatrix<T>, v: &mut SquareMatrix<T>, p: usize, q: usize) {
    let apq = a[(p, q)];
    if apq == T::zero() {
        return;
    }
    let app = a[(p, p)];
    let aqq = a[(q, q)];
    let tau = (aqq - app) / (T::of(2.0) * apq);
    let t = {
        let root = (T::one() + tau * tau).sqrt();
        if tau >= T::zero() {
            T::one() / (tau + root)
        } else {
            T::one() / (tau - root)
        }
    };
    let c = T::one() / (T::one() + t * t).sqrt();
    let s = t * c;
    a[(p, p)] = app - t * apq;
    a[(q, q)] = aqq + t * apq;
    a[(p, q)] = T::zero();
    a[(q, p)] = T::zero();
    let n = a.n();
    for r in 0..n {
        if r != p && r != q {
            let arp = a[(r, p)];
            let arq = a[(r, q)];
            a[(r, p)] = c * arp - s * arq;
            a[(r, q)] = s * arp + c * arq;
            a[(p, r)] = a[(r, p)];
            a[(q, r)] = a[(r, q)];
        }
        let vrp = v[(r, p)];
        let vrq = v[(r, q)];
        v[(r, p)] = c * vrp - s * vrq;
        v[(r, q)] = s * vrp + c * vrq;
    }
}

/// Spectral-norm estimate of a symmetric positive-semidefinite matrix by
/// deterministic power iteration.
pub fn operator_norm_estimate<T: Scalar>(a: &SquareMatrix<T>) -> T {
    let n = a.n();
    if n == 0 {
        return T::zero();
    }
    // deterministic start with a mild tilt so odd/even modes both project in
    let mut x: Vec<T> = (0..n)
        .map(|i| T::one() + T::of(0.1) * T::of((i % 7) as f64))
        .collect();
    let mut lambda = T::zero();
    for _ in 0..500 {
        let y = a.mul_vec(&x);
        let norm = y.iter().map(|&v| v * v).sum::<T>().sqrt();
        if norm == T::zero() {
            return T::zero();
        }
        let next: Vec<T> = y.iter().map(|&v| v / norm).collect();
        let ray = next
            .iter()
            .zip(a.mul_vec(&next).iter())
            .map(|(&u, &au)| u * au)
            .sum::<T>();
        if (ray - lambda).abs() <= T::epsilon() * (T::one() + ray.abs()) {
            return ray;
        }
        lambda = ray;
        x = next;
    }
    lambda
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    #[test]
    fn diagonal_matrix_is_exact() {
        let d = [3.0, -1.0, 2.5, 0.0];
        let a = SquareMatrix::from_fn(4, |i, j| if i == j { d[i] } else { 0.0 });
        let e = symmetric_eigen(&a, 1e-14).unwrap();
        assert_eq!(e.values, vec![3.0, 2.5, 0.0, -1.0]);
    }

    #[test]
    fn two_by_two_closed_form() {
        let (a, b) = (1.7f64, 0.4);
        let m = SquareMatrix::from_fn(2, |i, j| if i == j { a } else { b });
        let e = symmetric_eigen(&m, 1e-15).unwrap();
        assert!((e.values[0] - (a + b)).abs() < 1e-14);
        assert!((e.values[1] - (a - b)).abs() < 1e-14);
    }

    #[test]
    fn random_symmetric_residual_and_orthogonality() {
        let mut rng = StdRng::seed_from_u64(21);
        let n = 30;
        let mut a = SquareMatrix::<f64>::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                let v = rng.gen_range(-1.0..1.0);
                a[(i, j)] = v;
                a[(j, i)] = v;
            }
        }
        let e = symmetric_eigen(&a, 1e-14).unwrap();
        // residual ||A v - lambda v||
        for j in 0..n {
            let v = e.vectors.column(j);
            let av = a.mul_vec(&v);
            let worst = av
                .iter()
                .zip(&v)
                .map(|(&av, &v)| (av - e.values[j] * v).abs())
                .fold(0.0f64, f64::max);
            assert!(worst < 1e-12, "eigenpair {j} residual {worst}");
        }
        // orthogonality
        for i in 0..n {
            for j in i..n {
                let dot: f64 = e.vectors.column(i).iter().zip(e.vectors.column(j)).map(|(a, b)| a * b).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((dot - expect).abs() < 1e-12);
            }
        }
        // trace preserved
        let trace: f64 = (0..n).map(|i| a[(i, i)]).sum();
        let sum: f64 = e.values.iter().sum();
        assert!((trace - sum).abs() < 1e-11);
    }

    #[test]
    fn power_iteration_matches_jacobi() {
        let mut rng = StdRng::seed_from_u64(22);
        let n = 25;
        // build a PSD matrix B^T B
        let mut b = SquareMatrix::<f64>::zeros(n);
        for i in 0..n {
            for j in 0..n {
                b[(i, j)] = rng.gen_range(-1.0..1.0);
            }
        }
        let a = SquareMatrix::from_fn(n, |i, j| {
            (0..n).map(|k| b[(k, i)] * b[(k, j)]).sum::<f64>()
        });
        let e = symmetric_eigen(&a, 1e-14).unwrap();
        let est = operator_norm_estimate(&a);
        assert!((est - e.values[0]).abs() / e.values[0] < 1e-10);
    }

    #[test]
    fn zero_matrix() {
        let a = SquareMatrix::<f64>::zeros(5);
        let e = symmetric_eigen(&a, 1e-14).unwrap();
        assert!(e.values.iter().all(|&v| v == 0.0));
        assert_eq!(operator_norm_estimate(&a), 0.0);
    }
}
