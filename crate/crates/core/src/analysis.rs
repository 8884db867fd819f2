//! Frame quotients, optimal bounds and the frame/Bessel/Parseval predicates.
//!
//! For a test vector `v != 0` the quotient
//! `N(v) = sum_j w_j |<v, u_j>|^2 / ||v||^2` can be computed three ways:
//! directly over the points, as `Tr(V U) / Tr(V)` with `V` the Gramian of
//! the scalar components of `v`, or as the squared norm of the synthesized
//! function `sum_k conj(v^k) u^k`. All three coincide; the extreme values of
//! `N` over the sphere are the extreme eigenvalues of `U`.

use num_traits::Zero;
use serde::Serialize;

use crate::error::{check_dim, FrameError, Result};
use crate::family::{weighted_norm, WeightedFamily};
use crate::linalg::{hermitian_eigen, hermitian_eigenvalues, vec_inner, ComplexMatrix, HermitianEigen};
use crate::scalar::{Real, C};

/// Relative factor in the default frame tolerance `1e-10 * max(1, lambda_max)`.
pub const DEFAULT_FRAME_RTOL: f64 = 1e-10;
/// Default entrywise tolerance on `U - I` for the Parseval test.
pub const DEFAULT_PARSEVAL_TOL: f64 = 1e-10;

/// Default tolerance for deciding `lambda_min > 0`.
pub fn default_frame_tol<T: Real>(lambda_max: T) -> T {
    T::lit(DEFAULT_FRAME_RTOL) * T::one().max(lambda_max)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum QuotientForm {
    /// `sum_j w_j |<v, u_j>|^2 / ||v||^2`
    Direct,
    /// `Tr(V U) / Tr(V)`
    Trace,
    /// `||sum_k conj(v^k) u^k||^2 / ||v||^2`
    Synthesis,
}

impl QuotientForm {
    pub const ALL: [QuotientForm; 3] = [QuotientForm::Direct, QuotientForm::Trace, QuotientForm::Synthesis];
}

/// The frame quotient `N(v; u)`.
pub fn quotient<T: Real>(v: &[C<T>], fam: &WeightedFamily<T>, form: QuotientForm) -> Result<T> {
    check_dim(fam.dim(), v.len())?;
    let norm_sqr: T = v.iter().map(|z| z.norm_sqr()).sum();
    if norm_sqr == T::zero() {
        return Err(FrameError::Domain("zero test vector: quotient undefined".into()));
    }
    let value = match form {
        QuotientForm::Direct => {
            fam.points().map(|(w, u)| w * vec_inner(v, u).norm_sqr()).sum::<T>() / norm_sqr
        }
        QuotientForm::Trace => {
            let n = fam.dim();
            // V[k][l] = v^k conj(v^l)
            let vg = ComplexMatrix::from_fn(n, |k, l| v[k] * v[l].conj());
            let tr = vg.mul(&fam.gramian())?.trace().re;
            tr / vg.trace().re
        }
        QuotientForm::Synthesis => {
            let synthesized: Vec<C<T>> = fam
                .points()
                .map(|(_, u)| v.iter().zip(u).fold(C::zero(), |acc, (a, b)| acc + a.conj() * *b))
                .collect();
            let s = weighted_norm(fam.weights(), &synthesized);
            s * s / norm_sqr
        }
    };
    Ok(value)
}

/// The extended quotient `N((v_y); u) = Tr(V^Y U) / Tr(V^Y)` for a test
/// family `(v_y)` in `L^2(Y; F^n)`.
pub fn quotient_extended<T: Real>(tv: &WeightedFamily<T>, fam: &WeightedFamily<T>) -> Result<T> {
    check_dim(fam.dim(), tv.dim())?;
    let vy = tv.gramian();
    let denom = vy.trace().re;
    if denom <= T::zero() {
        return Err(FrameError::Domain("test family has zero energy: quotient undefined".into()));
    }
    Ok(vy.mul(&fam.gramian())?.trace().re / denom)
}

/// The extended quotient by the defining double sum
/// `sum_{i,j} w_i w_j |<v_j, u_i>|^2 / sum_j w_j ||v_j||^2`.
pub fn quotient_extended_direct<T: Real>(tv: &WeightedFamily<T>, fam: &WeightedFamily<T>) -> Result<T> {
    check_dim(fam.dim(), tv.dim())?;
    let denom = tv.total_energy();
    if denom <= T::zero() {
        return Err(FrameError::Domain("test family has zero energy: quotient undefined".into()));
    }
    let num: T = tv
        .points()
        .map(|(wy, v)| wy * fam.points().map(|(wx, u)| wx * vec_inner(v, u).norm_sqr()).sum::<T>())
        .sum();
    Ok(num / denom)
}

/// Optimal frame bounds `(A, B) = (lambda_min(U), lambda_max(U))`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FrameBounds<T> {
    pub lower: T,
    pub upper: T,
}

pub fn frame_bounds<T: Real>(fam: &WeightedFamily<T>) -> Result<FrameBounds<T>> {
    let s = hermitian_eigenvalues(&fam.gramian())?;
    Ok(FrameBounds {
        lower: s.min(),
        upper: s.max(),
    })
}

/// Eigendecomposition of the Gramian; column 0 attains `A`, the last
/// column attains `B`.
pub fn gramian_eigen<T: Real>(fam: &WeightedFamily<T>) -> Result<HermitianEigen<T>> {
    hermitian_eigen(&fam.gramian())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BesselReport<T> {
    pub is_bessel: bool,
    /// `sum_j w_j ||u_j||^2` of the represented points.
    pub energy: T,
    /// Energy bound for the truncated tail, zero for genuinely finite families.
    pub tail_bound: T,
    /// Optimal Bessel bound `lambda_max(U)`.
    pub upper_bound: T,
}

/// A family is Bessel iff it has finite energy. Finite representations
/// always do; a recorded tail bound must be finite too.
pub fn is_bessel<T: Real>(fam: &WeightedFamily<T>) -> Result<BesselReport<T>> {
    let energy = fam.total_energy();
    let tail_bound = fam.meta().tail_bound.unwrap_or_else(T::zero);
    let upper_bound = frame_bounds(fam)?.upper;
    Ok(BesselReport {
        is_bessel: (energy + tail_bound).is_finite(),
        energy,
        tail_bound,
        upper_bound,
    })
}

/// Whether the components of `fam` are linearly independent, decided as
/// `lambda_min(U) > tol`. `None` selects [`default_frame_tol`].
pub fn is_frame<T: Real>(fam: &WeightedFamily<T>, tol: Option<T>) -> Result<bool> {
    let b = frame_bounds(fam)?;
    let tol = tol.unwrap_or_else(|| default_frame_tol(b.upper));
    Ok(b.lower > tol)
}

/// `max_{k,l} |U[k][l] - delta_kl|`.
pub fn parseval_deviation<T: Real>(fam: &WeightedFamily<T>) -> T {
    let u = fam.gramian();
    u.sub(&ComplexMatrix::identity(fam.dim()))
        .map(|d| d.max_abs())
        .unwrap_or_else(|_| T::infinity())
}

/// Parseval iff `U = I` entrywise within `tol` (default
/// [`DEFAULT_PARSEVAL_TOL`]).
pub fn is_parseval<T: Real>(fam: &WeightedFamily<T>, tol: Option<T>) -> bool {
    let tol = tol.unwrap_or_else(|| T::lit(DEFAULT_PARSEVAL_TOL));
    parseval_deviation(fam) <= tol
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct F2Sufficient<T> {
    /// `min(||u^1||^2, ||u^2||^2) > |<u^1, u^2>|`
    pub holds: bool,
    /// `min(||u^1||^2, ||u^2||^2) - |<u^1, u^2>|`, a lower frame bound when `holds`.
    pub guaranteed_lower: T,
}

/// Diagonal-dominance test for families in `F^2`.
pub fn f2_sufficient<T: Real>(fam: &WeightedFamily<T>) -> Result<F2Sufficient<T>> {
    if fam.dim() != 2 {
        return Err(FrameError::Input(format!(
            "sufficient condition applies to n = 2 only, family has n = {}",
            fam.dim()
        )));
    }
    let u = fam.gramian();
    let diag = u[(0, 0)].re.min(u[(1, 1)].re);
    let off = u[(0, 1)].norm();
    Ok(F2Sufficient {
        holds: diag > off,
        guaranteed_lower: diag - off,
    })
}

/// Checks `lambda_min(U) <= Tr(P U) / Tr(P) <= lambda_max(U)` up to `1e-10`
/// for a positive semidefinite `P`.
pub fn trace_mean_bounds_check<T: Real>(p: &ComplexMatrix<T>, u: &ComplexMatrix<T>) -> Result<bool> {
    check_dim(u.n(), p.n())?;
    let tr = p.trace().re;
    if tr <= T::zero() {
        return Err(FrameError::Domain("Tr(P) must be positive".into()));
    }
    let ratio = p.mul(u)?.trace().re / tr;
    let s = hermitian_eigenvalues(u)?;
    let slack = T::lit(1e-10);
    Ok(s.min() - slack <= ratio && ratio <= s.max() + slack)
}

/// Tolerances for [`analyze`]; `frame: None` means the scale-aware default.
#[derive(Clone, Copy, Debug)]
pub struct Tolerances<T> {
    pub frame: Option<T>,
    pub parseval: T,
}

impl<T: Real> Default for Tolerances<T> {
    fn default() -> Self {
        Self {
            frame: None,
            parseval: T::lit(DEFAULT_PARSEVAL_TOL),
        }
    }
}

/// Full diagnostic record of a family.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FrameVerdict<T> {
    pub dim: usize,
    pub points: usize,
    pub energy: T,
    pub tail_bound: Option<T>,
    pub lower_bound: T,
    pub upper_bound: T,
    pub det_u: T,
    pub is_bessel: bool,
    pub is_frame: bool,
    pub is_parseval: bool,
    pub parseval_deviation: T,
    pub tol_frame: T,
    pub tol_parseval: T,
    /// Present for `n = 2` so the gap to the true lower bound is visible.
    pub f2_sufficient: Option<F2Sufficient<T>>,
}

pub fn analyze<T: Real>(fam: &WeightedFamily<T>, tol: &Tolerances<T>) -> Result<FrameVerdict<T>> {
    let spectrum = hermitian_eigenvalues(&fam.gramian())?;
    let (lower, upper) = (spectrum.min(), spectrum.max());
    let tol_frame = tol.frame.unwrap_or_else(|| default_frame_tol(upper));
    let energy = fam.total_energy();
    let deviation = parseval_deviation(fam);
    let f2 = if fam.dim() == 2 { Some(f2_sufficient(fam)?) } else { None };
    Ok(FrameVerdict {
        dim: fam.dim(),
        points: fam.len(),
        energy,
        tail_bound: fam.meta().tail_bound,
        lower_bound: lower.max(T::zero()),
        upper_bound: upper.max(T::zero()),
        det_u: spectrum.product(),
        is_bessel: (energy + fam.meta().tail_bound.unwrap_or_else(T::zero)).is_finite(),
        is_frame: lower > tol_frame,
        is_parseval: deviation <= tol.parseval,
        parseval_deviation: deviation,
        tol_frame,
        tol_parseval: tol.parseval,
        f2_sufficient: f2,
    })
}
