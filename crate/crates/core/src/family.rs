//! Weighted families of vectors in `F^n`.
//!
//! A family `(w_j, u_j)` is a finite weighted point set standing in for a
//! measure space: discrete frames carry unit weights, discretized continuous
//! frames carry quadrature weights. Every quantity downstream depends on the
//! family only through weighted sums over its points.
//!
//! Inner products are linear in the first argument and conjugate-linear in
//! the second, everywhere.

use num_complex::Complex;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, FrameError, Result};
use crate::linalg::ComplexMatrix;
use crate::scalar::{re, Real, C};

/// Scalar field of a family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Field {
    Real,
    Complex,
}

impl Field {
    /// `Real` only if both are real.
    pub fn join(self, other: Field) -> Field {
        if self == Field::Real && other == Field::Real {
            Field::Real
        } else {
            Field::Complex
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FamilyMeta<T> {
    pub label: Option<String>,
    /// Upper bound on the energy discarded by truncating an infinite family.
    pub tail_bound: Option<T>,
}

impl<T> Default for FamilyMeta<T> {
    fn default() -> Self {
        Self {
            label: None,
            tail_bound: None,
        }
    }
}

/// A finite weighted family `(w_j, u_j)` with `u_j` in `F^n`.
///
/// Invariants, enforced at construction: every vector has `n` finite
/// entries, weights are finite and nonnegative with at least one positive,
/// and real families have identically zero imaginary parts.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedFamily<T> {
    field: Field,
    dim: usize,
    weights: Vec<T>,
    // points x dim, row-major
    values: Vec<C<T>>,
    meta: FamilyMeta<T>,
}

impl<T: Real> WeightedFamily<T> {
    pub fn new(field: Field, dim: usize, weights: Vec<T>, vectors: Vec<Vec<C<T>>>) -> Result<Self> {
        check_dim(weights.len(), vectors.len())?;
        let mut values = Vec::with_capacity(dim * vectors.len());
        for (j, v) in vectors.into_iter().enumerate() {
            if v.len() != dim {
                return Err(FrameError::Input(format!(
                    "point {j}: vector has {} entries, expected {dim}",
                    v.len()
                )));
            }
            values.extend(v);
        }
        Self::from_raw(field, dim, weights, values)
    }

    pub fn from_points(
        field: Field,
        dim: usize,
        points: impl IntoIterator<Item = (T, Vec<C<T>>)>,
    ) -> Result<Self> {
        let (weights, vectors): (Vec<_>, Vec<_>) = points.into_iter().unzip();
        Self::new(field, dim, weights, vectors)
    }

    /// Real family from real vectors.
    pub fn from_real_points(dim: usize, points: impl IntoIterator<Item = (T, Vec<T>)>) -> Result<Self> {
        Self::from_points(
            Field::Real,
            dim,
            points
                .into_iter()
                .map(|(w, v)| (w, v.into_iter().map(re).collect())),
        )
    }

    /// Unit-weight real family; the classical discrete frame setting.
    pub fn from_real_vectors(dim: usize, vectors: impl IntoIterator<Item = Vec<T>>) -> Result<Self> {
        Self::from_real_points(dim, vectors.into_iter().map(|v| (T::one(), v)))
    }

    /// Builds a family from its `n` component functions over the given
    /// weighted points.
    pub fn from_components(field: Field, weights: Vec<T>, components: &[Vec<C<T>>]) -> Result<Self> {
        let dim = components.len();
        let m = weights.len();
        for (k, comp) in components.iter().enumerate() {
            if comp.len() != m {
                return Err(FrameError::Input(format!(
                    "component {k} has {} values, expected {m}",
                    comp.len()
                )));
            }
        }
        let mut values = Vec::with_capacity(dim * m);
        for j in 0..m {
            values.extend(components.iter().map(|comp| comp[j]));
        }
        Self::from_raw(field, dim, weights, values)
    }

    fn from_raw(field: Field, dim: usize, weights: Vec<T>, values: Vec<C<T>>) -> Result<Self> {
        if dim == 0 {
            return Err(FrameError::Input("ambient dimension n must be positive".into()));
        }
        if weights.is_empty() {
            return Err(FrameError::Input("family has no points".into()));
        }
        for (j, &w) in weights.iter().enumerate() {
            if !w.is_finite() {
                return Err(FrameError::Input(format!("point {j}: weight is not finite")));
            }
            if w < T::zero() {
                return Err(FrameError::Input(format!("point {j}: negative weight {w}")));
            }
        }
        if !weights.iter().any(|&w| w > T::zero()) {
            return Err(FrameError::Input("all weights are zero".into()));
        }
        for (idx, z) in values.iter().enumerate() {
            let j = idx / dim;
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(FrameError::Input(format!(
                    "point {j}: entry {} is not finite",
                    idx % dim
                )));
            }
            if field == Field::Real && z.im != T::zero() {
                return Err(FrameError::Input(format!(
                    "point {j}: entry {} has nonzero imaginary part in a real family",
                    idx % dim
                )));
            }
        }
        Ok(Self {
            field,
            dim,
            weights,
            values,
            meta: FamilyMeta::default(),
        })
    }

    pub fn with_meta(mut self, meta: FamilyMeta<T>) -> Self {
        self.meta = meta;
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.meta.label = Some(label.into());
        self
    }

    pub fn with_tail_bound(mut self, bound: T) -> Self {
        self.meta.tail_bound = Some(bound);
        self
    }

    #[inline]
    pub fn field(&self) -> Field {
        self.field
    }

    /// Ambient dimension `n`.
    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of points, including zero-weight ones.
    #[inline]
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn meta(&self) -> &FamilyMeta<T> {
        &self.meta
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    #[inline]
    pub fn weight(&self, j: usize) -> T {
        self.weights[j]
    }

    #[inline]
    pub fn vector(&self, j: usize) -> &[C<T>] {
        &self.values[j * self.dim..(j + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = (T, &[C<T>])> + '_ {
        self.weights.iter().copied().zip(self.values.chunks(self.dim))
    }

    /// The scalar function `x -> u_x^k`.
    pub fn component(&self, k: usize) -> Vec<C<T>> {
        self.values.chunks(self.dim).map(|v| v[k]).collect()
    }

    pub fn components(&self) -> Vec<Vec<C<T>>> {
        (0..self.dim).map(|k| self.component(k)).collect()
    }

    /// `sum_j w_j f_j conj(g_j)` over this family's points.
    pub fn weighted_inner(&self, f: &[C<T>], g: &[C<T>]) -> Result<C<T>> {
        weighted_inner(&self.weights, f, g)
    }

    /// Gramian of the components: `U[k][l] = <u^k, u^l>`.
    ///
    /// The upper triangle is summed and mirrored, so the result is exactly
    /// Hermitian with a real diagonal.
    pub fn gramian(&self) -> ComplexMatrix<T> {
        let n = self.dim;
        let mut g = ComplexMatrix::zeros(n);
        for (w, v) in self.points() {
            if w == T::zero() {
                continue;
            }
            for k in 0..n {
                for l in k..n {
                    g[(k, l)] += v[k] * v[l].conj() * w;
                }
            }
        }
        for k in 0..n {
            g[(k, k)] = re(g[(k, k)].re);
            for l in k + 1..n {
                g[(l, k)] = g[(k, l)].conj();
            }
        }
        g
    }

    /// `sum_j w_j ||u_j||^2`, the squared norm of the family in `L^2(X; F^n)`.
    pub fn total_energy(&self) -> T {
        self.points()
            .map(|(w, v)| w * v.iter().map(|z| z.norm_sqr()).sum::<T>())
            .sum()
    }

    /// Number of points with positive weight.
    pub fn effective_dimension(&self) -> usize {
        self.weights.iter().filter(|&&w| w > T::zero()).count()
    }

    /// Same points, same weights, same ambient dimension.
    pub fn same_support(&self, other: &Self) -> bool {
        self.dim == other.dim && self.weights == other.weights
    }

    pub fn scaled(&self, alpha: C<T>) -> Self {
        let field = if alpha.im == T::zero() {
            self.field
        } else {
            Field::Complex
        };
        Self {
            field,
            dim: self.dim,
            weights: self.weights.clone(),
            values: self.values.iter().map(|z| *z * alpha).collect(),
            meta: FamilyMeta::default(),
        }
    }

    pub fn scaled_real(&self, alpha: T) -> Self {
        self.scaled(re(alpha))
    }

    /// Pointwise `alpha * self + beta * other` on a shared support.
    pub fn lin_comb(&self, alpha: T, other: &Self, beta: T) -> Result<Self> {
        self.require_same_support(other)?;
        Ok(Self {
            field: self.field.join(other.field),
            dim: self.dim,
            weights: self.weights.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| *a * alpha + *b * beta)
                .collect(),
            meta: FamilyMeta::default(),
        })
    }

    /// Weighted `L^2(X; F^n)` distance on a shared support.
    pub fn distance(&self, other: &Self) -> Result<T> {
        self.require_same_support(other)?;
        Ok(self
            .points()
            .zip(other.points())
            .map(|((w, a), (_, b))| {
                w * a.iter().zip(b).map(|(x, y)| (*x - *y).norm_sqr()).sum::<T>()
            })
            .sum::<T>()
            .sqrt())
    }

    /// `sum_j w_j <a_j, b_j>`: the `L^2(Y; F^n)` inner product.
    pub fn pointwise_inner(&self, other: &Self) -> Result<C<T>> {
        self.require_same_support(other)?;
        Ok(self
            .points()
            .zip(other.points())
            .fold(C::zero(), |acc, ((w, a), (_, b))| {
                acc + a
                    .iter()
                    .zip(b)
                    .fold(C::zero(), |s, (x, y)| s + *x * y.conj())
                    * w
            }))
    }

    /// Disjoint union of the point sets of two families in the same `F^n`.
    pub fn concat(&self, other: &Self) -> Result<Self> {
        check_dim(self.dim, other.dim)?;
        let mut weights = self.weights.clone();
        weights.extend_from_slice(&other.weights);
        let mut values = self.values.clone();
        values.extend_from_slice(&other.values);
        Ok(Self {
            field: self.field.join(other.field),
            dim: self.dim,
            weights,
            values,
            meta: FamilyMeta::default(),
        })
    }

    pub(crate) fn require_same_support(&self, other: &Self) -> Result<()> {
        check_dim(self.dim, other.dim)?;
        if self.weights != other.weights {
            return Err(FrameError::Input(
                "families do not share the same weighted point set".into(),
            ));
        }
        Ok(())
    }
}

/// `sum_j w_j f_j conj(g_j)`.
pub fn weighted_inner<T: Real>(weights: &[T], f: &[C<T>], g: &[C<T>]) -> Result<C<T>> {
    check_dim(weights.len(), f.len())?;
    check_dim(weights.len(), g.len())?;
    Ok(weights
        .iter()
        .zip(f.iter().zip(g))
        .fold(Complex::zero(), |acc, (&w, (a, b))| acc + *a * b.conj() * w))
}

pub(crate) fn weighted_norm<T: Real>(weights: &[T], f: &[C<T>]) -> T {
    weights
        .iter()
        .zip(f)
        .map(|(&w, z)| w * z.norm_sqr())
        .sum::<T>()
        .sqrt()
}

/// Orthogonalizes `candidate` against an orthonormal `basis` (two passes of
/// modified Gram-Schmidt) and normalizes it.
///
/// Returns `None` when the remaining part is below `pivot` times the
/// candidate's original norm.
pub fn orthonormalize_against<T: Real>(
    weights: &[T],
    basis: &[Vec<C<T>>],
    candidate: &[C<T>],
    pivot: T,
) -> Option<Vec<C<T>>> {
    let original = weighted_norm(weights, candidate);
    if original == T::zero() {
        return None;
    }
    let mut f = candidate.to_vec();
    for _ in 0..2 {
        for q in basis {
            let proj = weights
                .iter()
                .zip(f.iter().zip(q))
                .fold(C::<T>::zero(), |acc, (&w, (a, b))| acc + *a * b.conj() * w);
            for (x, b) in f.iter_mut().zip(q) {
                *x -= *b * proj;
            }
        }
    }
    let remaining = weighted_norm(weights, &f);
    if remaining <= pivot * original {
        return None;
    }
    Some(f.into_iter().map(|z| z / remaining).collect())
}

/// Weighted-orthonormal basis for the span of `funcs`; dependent inputs
/// (relative pivot below `pivot`) are dropped.
pub fn orthonormal_basis<T: Real>(weights: &[T], funcs: &[Vec<C<T>>], pivot: T) -> Vec<Vec<C<T>>> {
    let mut basis: Vec<Vec<C<T>>> = Vec::new();
    for f in funcs {
        if let Some(q) = orthonormalize_against(weights, &basis, f, pivot) {
            basis.push(q);
        }
    }
    basis
}
