//! Scalar abstraction shared by every numeric routine in the crate.
//!
//! All vectors and matrices carry complex entries internally; families over
//! the reals are a constrained view with identically zero imaginary parts.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Real floating point type backing the computations: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + NumAssign + Sum + Debug + Display + LowerExp + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal. Infallible for the supported types.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in Real")
    }

    /// `max(floor, factor * epsilon)`: a tolerance that stays meaningful in
    /// lower precision.
    #[inline]
    fn tol_floor(floor: f64, factor: f64) -> Self {
        Self::lit(floor).max(Self::lit(factor) * Self::epsilon())
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex scalar over `T`.
pub type C<T> = Complex<T>;

#[inline]
pub(crate) fn c<T: Real>(re: T, im: T) -> C<T> {
    Complex::new(re, im)
}

#[inline]
pub(crate) fn re<T: Real>(x: T) -> C<T> {
    Complex::new(x, T::zero())
}

/// Relative discrepancy `|a - b| / max(|a|, |b|)`, zero when both vanish.
pub fn rel_diff<T: Real>(a: T, b: T) -> T {
    let scale = a.abs().max(b.abs());
    if scale == T::zero() {
        T::zero()
    } else {
        (a - b).abs() / scale
    }
}
