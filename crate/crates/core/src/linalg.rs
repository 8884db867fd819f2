//! Small dense complex matrices and a cyclic Jacobi solver for Hermitian ones.
//!
//! Matrices here are `n x n` with `n` the ambient dimension of the frame, so
//! everything is dense and row-major.

use std::ops::{Index, IndexMut};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{check_dim, FrameError, Result};
use crate::scalar::{re, Real, C};

/// Maximum number of Jacobi sweeps before giving up.
pub const MAX_JACOBI_SWEEPS: usize = 100;

/// Dense square matrix with complex entries, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix<T> {
    n: usize,
    data: Vec<C<T>>,
}

/// Gramian of the components of a family: `U[k][l] = <u^k, u^l>`.
pub type GramianMatrix<T> = ComplexMatrix<T>;

impl<T: Real> ComplexMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![C::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { C::one() } else { C::zero() })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> C<T>) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    pub fn from_rows(rows: Vec<Vec<C<T>>>) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            check_dim(n, row.len())?;
            data.extend(row);
        }
        Ok(Self { n, data })
    }

    pub fn from_real_rows(rows: &[&[T]]) -> Result<Self> {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| re(x)).collect()).collect())
    }

    /// Diagonal matrix with the given real entries.
    pub fn diagonal(diag: &[T]) -> Self {
        Self::from_fn(diag.len(), |i, j| if i == j { re(diag[i]) } else { C::zero() })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[C<T>] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C<T>] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn column(&self, j: usize) -> Vec<C<T>> {
        (0..self.n).map(|i| self[(i, j)]).collect()
    }

    pub fn conj_transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)].conj())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        check_dim(self.n, other.n)?;
        let n = self.n;
        Ok(Self::from_fn(n, |i, j| {
            (0..n).fold(C::zero(), |acc, k| acc + self[(i, k)] * other[(k, j)])
        }))
    }

    pub fn mul_vec(&self, v: &[C<T>]) -> Result<Vec<C<T>>> {
        check_dim(self.n, v.len())?;
        Ok((0..self.n)
            .map(|i| self.row(i).iter().zip(v).fold(C::zero(), |acc, (a, x)| acc + *a * *x))
            .collect())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_dim(self.n, other.n)?;
        Ok(Self::from_fn(self.n, |i, j| self[(i, j)] + other[(i, j)]))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        check_dim(self.n, other.n)?;
        Ok(Self::from_fn(self.n, |i, j| self[(i, j)] - other[(i, j)]))
    }

    pub fn scale(&self, alpha: T) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|z| *z * alpha).collect(),
        }
    }

    pub fn trace(&self) -> C<T> {
        (0..self.n).fold(C::zero(), |acc, i| acc + self[(i, i)])
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, z| m.max(z.norm()))
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    /// `max |A[i][j] - conj(A[j][i])|`.
    pub fn hermitian_defect(&self) -> T {
        let mut defect = T::zero();
        for i in 0..self.n {
            for j in i..self.n {
                defect = defect.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        defect
    }

    /// Tolerance used to accept a matrix as Hermitian: `1e-12 * max(1, max|A|)`.
    pub fn hermitian_tolerance(&self) -> T {
        T::tol_floor(1e-12, 16.0) * T::one().max(self.max_abs())
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian_defect() <= self.hermitian_tolerance()
    }

    /// Determinant by LU factorization with partial pivoting.
    pub fn determinant(&self) -> C<T> {
        let n = self.n;
        let mut a = self.data.clone();
        let mut det = C::<T>::one();
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&x, &y| {
                    a[x * n + col]
                        .norm()
                        .partial_cmp(&a[y * n + col].norm())
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
                .unwrap_or(col);
            if a[pivot * n + col].is_zero() {
                return C::zero();
            }
            if pivot != col {
                for k in 0..n {
                    a.swap(col * n + k, pivot * n + k);
                }
                det = -det;
            }
            let p = a[col * n + col];
            det *= p;
            for r in col + 1..n {
                let factor = a[r * n + col] / p;
                for k in col..n {
                    let upper = a[col * n + k];
                    a[r * n + k] -= factor * upper;
                }
            }
        }
        det
    }
}

impl<T> Index<(usize, usize)> for ComplexMatrix<T> {
    type Output = C<T>;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C<T> {
        &self.data[i * self.n + j]
    }
}

impl<T> IndexMut<(usize, usize)> for ComplexMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C<T> {
        &mut self.data[i * self.n + j]
    }
}

/// Real eigenvalues of a Hermitian matrix, sorted ascending.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum<T>(Vec<T>);

impl<T: Real> Spectrum<T> {
    pub fn values(&self) -> &[T] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<T> {
        self.0
    }

    pub fn min(&self) -> T {
        self.0.first().copied().unwrap_or_else(T::zero)
    }

    pub fn max(&self) -> T {
        self.0.last().copied().unwrap_or_else(T::zero)
    }

    pub fn sum(&self) -> T {
        self.0.iter().copied().sum()
    }

    pub fn product(&self) -> T {
        self.0.iter().fold(T::one(), |p, &x| p * x)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Eigenvalues together with a unitary matrix whose columns are the
/// corresponding eigenvectors.
#[derive(Clone, Debug)]
pub struct HermitianEigen<T> {
    pub values: Spectrum<T>,
    pub vectors: ComplexMatrix<T>,
}

impl<T: Real> HermitianEigen<T> {
    /// Unit eigenvector for the `k`-th smallest eigenvalue.
    pub fn vector(&self, k: usize) -> Vec<C<T>> {
        self.vectors.column(k)
    }
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues<T: Real>(m: &ComplexMatrix<T>) -> Result<Spectrum<T>> {
    hermitian_eigen(m).map(|e| e.values)
}

/// Full eigendecomposition of a Hermitian matrix by cyclic complex Jacobi
/// rotations.
///
/// Stops once the off-diagonal Frobenius norm drops below
/// `1e-13 * ||M||_F` (floored at a few ulps for `f32`).
pub fn hermitian_eigen<T: Real>(m: &ComplexMatrix<T>) -> Result<HermitianEigen<T>> {
    let defect = m.hermitian_defect();
    let tol = m.hermitian_tolerance();
    if defect.is_nan() || defect > tol {
        return Err(FrameError::NotHermitian {
            defect: defect.to_f64().unwrap_or(f64::NAN),
            tol: tol.to_f64().unwrap_or(f64::NAN),
        });
    }
    let n = m.n();
    let half = T::lit(0.5);
    // Exact Hermitian part; removes the admissible defect.
    let mut a = ComplexMatrix::from_fn(n, |i, j| {
        if i == j {
            re(m[(i, i)].re)
        } else {
            (m[(i, j)] + m[(j, i)].conj()) * half
        }
    });
    let mut v = ComplexMatrix::identity(n);
    let threshold = T::tol_floor(1e-13, 8.0) * a.frobenius_norm();

    let mut converged = false;
    for _ in 0..MAX_JACOBI_SWEEPS {
        if off_diagonal_norm(&a) <= threshold {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged && off_diagonal_norm(&a) > threshold {
        return Err(FrameError::NoConvergence {
            sweeps: MAX_JACOBI_SWEEPS,
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a[(i, i)]
            .re
            .partial_cmp(&a[(j, j)].re)
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, |i, j| v[(i, order[j])]);
    Ok(HermitianEigen {
        values: Spectrum(values),
        vectors,
    })
}

fn off_diagonal_norm<T: Real>(a: &ComplexMatrix<T>) -> T {
    let mut s = T::zero();
    for i in 0..a.n() {
        for j in 0..a.n() {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

// One Jacobi step annihilating a[p][q]. The rotation is G = D R with
// D = diag(1, e^{-i arg a_pq}) making the pivot real, and R the classical
// real rotation [[c, s], [-s, c]] on (p, q). Then A <- G^H A G, V <- V G.
fn rotate<T: Real>(a: &mut ComplexMatrix<T>, v: &mut ComplexMatrix<T>, p: usize, q: usize) {
    let g = a[(p, q)];
    let mag = g.norm();
    if mag == T::zero() {
        return;
    }
    let phase = g / mag;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = (aqq - app) / (mag + mag);
    let t = if theta.is_infinite() {
        T::zero()
    } else {
        let sign = if theta < T::zero() { -T::one() } else { T::one() };
        sign / (theta.abs() + (theta * theta + T::one()).sqrt())
    };
    let cos = T::one() / (t * t + T::one()).sqrt();
    let sin = t * cos;

    let gpp = re(cos);
    let gpq = re(sin);
    let gqp = phase.conj() * (-sin);
    let gqq = phase.conj() * cos;
    let n = a.n();

    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * gpp + akq * gqp;
        a[(k, q)] = akp * gpq + akq * gqq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = gpp.conj() * apk + gqp.conj() * aqk;
        a[(q, k)] = gpq.conj() * apk + gqq.conj() * aqk;
    }
    a[(p, q)] = C::zero();
    a[(q, p)] = C::zero();
    a[(p, p)] = re(a[(p, p)].re);
    a[(q, q)] = re(a[(q, q)].re);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * gpp + vkq * gqp;
        v[(k, q)] = vkp * gpq + vkq * gqq;
    }
}

/// Euclidean norm of a complex vector.
pub fn vec_norm<T: Real>(v: &[C<T>]) -> T {
    v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
}

/// Standard inner product on `F^n`, linear in the first argument.
pub fn vec_inner<T: Real>(a: &[C<T>], b: &[C<T>]) -> C<T> {
    a.iter()
        .zip(b)
        .fold(Complex::zero(), |acc, (x, y)| acc + *x * y.conj())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn residual(m: &ComplexMatrix<f64>, e: &HermitianEigen<f64>) -> f64 {
        let mut worst: f64 = 0.0;
        for k in 0..m.n() {
            let x = e.vector(k);
            let mx = m.mul_vec(&x).unwrap();
            let lambda = e.values.values()[k];
            let r: f64 = mx
                .iter()
                .zip(&x)
                .map(|(a, b)| (*a - *b * lambda).norm_sqr())
                .sum::<f64>()
                .sqrt();
            worst = worst.max(r);
        }
        worst
    }

    #[test]
    fn identity_spectrum() {
        let s = hermitian_eigenvalues(&ComplexMatrix::<f64>::identity(2)).unwrap();
        assert_eq!(s.values(), &[1.0, 1.0]);
    }

    #[test]
    fn two_by_two_closed_forms() {
        let m = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[2.0, 5.0]]).unwrap();
        let s = hermitian_eigenvalues(&m).unwrap();
        let r2 = 2.0_f64.sqrt();
        assert!((s.min() - (3.0 - 2.0 * r2)).abs() < 1e-14);
        assert!((s.max() - (3.0 + 2.0 * r2)).abs() < 1e-14);

        let (a, b) = (1.6449341_f64, -0.8224670_f64);
        let m = ComplexMatrix::from_real_rows(&[&[a, b], &[b, a]]).unwrap();
        let s = hermitian_eigenvalues(&m).unwrap();
        assert!((s.min() - 0.8224671).abs() < 1e-12);
        assert!((s.max() - 2.4674011).abs() < 1e-12);
    }

    #[test]
    fn complex_hermitian_matches_closed_form() {
        // [[2, 1-i], [1+i, 3]]: eigenvalues (5 +- sqrt(1 + 8)) / 2 = 1, 4
        let m = ComplexMatrix::from_rows(vec![
            vec![C::new(2.0_f64, 0.0), C::new(1.0, -1.0)],
            vec![C::new(1.0, 1.0), C::new(3.0, 0.0)],
        ])
        .unwrap();
        let e = hermitian_eigen(&m).unwrap();
        assert!((e.values.min() - 1.0).abs() < 1e-14);
        assert!((e.values.max() - 4.0).abs() < 1e-14);
        assert!(residual(&m, &e) < 1e-12);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[0.0, 1.0]]).unwrap();
        assert!(matches!(
            hermitian_eigen(&m),
            Err(FrameError::NotHermitian { .. })
        ));
    }

    #[test]
    fn zero_and_one_by_one() {
        let s = hermitian_eigenvalues(&ComplexMatrix::<f64>::zeros(3)).unwrap();
        assert_eq!(s.values(), &[0.0, 0.0, 0.0]);
        let s = hermitian_eigenvalues(&ComplexMatrix::diagonal(&[-2.5])).unwrap();
        assert_eq!(s.values(), &[-2.5]);
    }

    #[test]
    fn lu_determinant() {
        let m = ComplexMatrix::from_real_rows(&[&[0.0, 2.0], &[3.0, 1.0]]).unwrap();
        assert!((m.determinant() - C::new(-6.0, 0.0)).norm() < 1e-15);
        let m = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[2.0, 4.0]]).unwrap();
        assert!(m.determinant().norm() < 1e-15);
    }

    #[test]
    fn single_precision_converges() {
        let m = ComplexMatrix::<f32>::from_real_rows(&[&[4.0, 1.0, 0.5], &[1.0, 3.0, 0.2], &[0.5, 0.2, 1.0]])
            .unwrap();
        let s = hermitian_eigenvalues(&m).unwrap();
        assert!((s.sum() - 8.0).abs() < 1e-5);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn hermitian(n: usize) -> impl Strategy<Value = ComplexMatrix<f64>> {
            proptest::collection::vec((-3.0..3.0f64, -3.0..3.0f64), n * n).prop_map(move |raw| {
                let b = ComplexMatrix::from_fn(n, |i, j| {
                    let (x, y) = raw[i * n + j];
                    C::new(x, y)
                });
                b.add(&b.conj_transpose()).unwrap()
            })
        }

        proptest! {
            #[test]
            fn trace_det_and_residuals(m in (1usize..=6).prop_flat_map(hermitian)) {
                let e = hermitian_eigen(&m).unwrap();
                let scale = m.frobenius_norm().max(1.0);
                prop_assert!((e.values.sum() - m.trace().re).abs() <= 1e-10 * scale * m.n() as f64);
                let det = m.determinant().re;
                let prod = e.values.product();
                prop_assert!((det - prod).abs() <= 1e-9 * scale.powi(m.n() as i32));
                prop_assert!(residual(&m, &e) <= 1e-9 * scale);
                for w in e.values.values().windows(2) {
                    prop_assert!(w[0] <= w[1]);
                }
                // eigenvectors are orthonormal
                let vhv = e.vectors.conj_transpose().mul(&e.vectors).unwrap();
                let dev = vhv.sub(&ComplexMatrix::identity(m.n())).unwrap().max_abs();
                prop_assert!(dev < 1e-12);
            }
        }
    }
}
