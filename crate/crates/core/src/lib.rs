//! Analysis of finitely represented frames in `R^n` and `C^n`.
//!
//! A frame is handled through the Gramian of its component functions: the
//! family is a frame exactly when the components are linearly independent,
//! Parseval exactly when the Gramian is the identity, and the optimal frame
//! bounds are the extreme eigenvalues of the Gramian.
//!
//! The numeric core is generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix the common `f64` case.

pub mod analysis;
pub mod error;
pub mod extended;
pub mod family;
pub mod generators;
pub mod linalg;
pub mod scalar;
pub mod topology;

pub use analysis::{
    analyze, f2_sufficient, frame_bounds, is_bessel, is_frame, is_parseval, quotient, quotient_extended,
    trace_mean_bounds_check, FrameBounds, FrameVerdict, QuotientForm, Tolerances,
};
pub use error::{FrameError, Result};
pub use family::{Field, FamilyMeta, WeightedFamily};
pub use linalg::{ComplexMatrix, GramianMatrix, HermitianEigen, Spectrum};
pub use scalar::{Real, C};
pub use topology::{certify_path, density_perturb, path_eval, perturbation_auxiliary, AuxiliaryMode, Leg, PathMode, PathSpec};

/// Double precision weighted family.
pub type Family = WeightedFamily<f64>;
/// Single precision weighted family.
pub type Family32 = WeightedFamily<f32>;
/// Double precision complex matrix.
pub type Matrix = ComplexMatrix<f64>;
/// Double precision complex scalar.
pub type Complex64 = C<f64>;
