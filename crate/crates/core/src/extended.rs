//! Analysis, synthesis and frame operators over a test space `L^2(Y; F^n)`.
//!
//! A test family `(v_y)` is itself a [`WeightedFamily`]: its weights
//! discretize the measure on `Y`. The index-set case `l^2(J; F^n)` is the
//! special case of unit weights, so both share this implementation.
//!
//! The extended frame operator acts on each block `v_y` with the classical
//! frame operator; its spectrum is that of the Gramian, repeated once per
//! block.

use num_traits::Zero;
use rand::Rng;
use serde::Serialize;

use crate::analysis::{frame_bounds, quotient, quotient_extended, QuotientForm};
use crate::error::{check_dim, FrameError, Result};
use crate::family::{Field, WeightedFamily};
use crate::generators::{normal_vector, seeded_rng};
use crate::linalg::{vec_inner, ComplexMatrix};
use crate::scalar::{re, rel_diff, Real, C};

/// A test family in `L^2(Y; F^n)`.
pub type TestFamily<T> = WeightedFamily<T>;

/// Coefficients `c[i][j] = <v_j, u_i>` on `X x Y` together with both weight
/// vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientField<T> {
    x_weights: Vec<T>,
    y_weights: Vec<T>,
    // rows over X, columns over Y
    values: Vec<C<T>>,
}

impl<T: Real> CoefficientField<T> {
    pub fn from_fn(x_weights: Vec<T>, y_weights: Vec<T>, mut f: impl FnMut(usize, usize) -> C<T>) -> Self {
        let (m, p) = (x_weights.len(), y_weights.len());
        let mut values = Vec::with_capacity(m * p);
        for i in 0..m {
            for j in 0..p {
                values.push(f(i, j));
            }
        }
        Self {
            x_weights,
            y_weights,
            values,
        }
    }

    /// Indicator of the single cell `(i0, j0)`.
    pub fn indicator(x_weights: Vec<T>, y_weights: Vec<T>, i0: usize, j0: usize) -> Self {
        Self::from_fn(x_weights, y_weights, |i, j| {
            if (i, j) == (i0, j0) {
                re(T::one())
            } else {
                C::zero()
            }
        })
    }

    pub fn x_len(&self) -> usize {
        self.x_weights.len()
    }

    pub fn y_len(&self) -> usize {
        self.y_weights.len()
    }

    pub fn x_weights(&self) -> &[T] {
        &self.x_weights
    }

    pub fn y_weights(&self) -> &[T] {
        &self.y_weights
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C<T> {
        self.values[i * self.y_weights.len() + j]
    }

    /// `<a, b> = sum_{i,j} w_i^X w_j^Y a_ij conj(b_ij)`.
    pub fn inner(&self, other: &Self) -> Result<C<T>> {
        if self.x_weights != other.x_weights || self.y_weights != other.y_weights {
            return Err(FrameError::Input("coefficient fields live on different grids".into()));
        }
        let p = self.y_len();
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .enumerate()
            .fold(C::zero(), |acc, (idx, (a, b))| {
                acc + *a * b.conj() * (self.x_weights[idx / p] * self.y_weights[idx % p])
            }))
    }

    pub fn weighted_norm_sqr(&self) -> T {
        let p = self.y_len();
        self.values
            .iter()
            .enumerate()
            .map(|(idx, z)| self.x_weights[idx / p] * self.y_weights[idx % p] * z.norm_sqr())
            .sum()
    }
}

/// Classical frame operator `S v = sum_i w_i <v, u_i> u_i`.
pub fn frame_operator_apply<T: Real>(fam: &WeightedFamily<T>, v: &[C<T>]) -> Result<Vec<C<T>>> {
    check_dim(fam.dim(), v.len())?;
    let mut out = vec![C::zero(); fam.dim()];
    for (w, u) in fam.points() {
        let coef = vec_inner(v, u) * w;
        for (o, x) in out.iter_mut().zip(u) {
            *o += coef * *x;
        }
    }
    Ok(out)
}

/// Extended analysis operator: `(v_j) -> (<v_j, u_i>)_{i,j}`.
pub fn analysis<T: Real>(fam: &WeightedFamily<T>, tv: &TestFamily<T>) -> Result<CoefficientField<T>> {
    check_dim(fam.dim(), tv.dim())?;
    Ok(CoefficientField::from_fn(
        fam.weights().to_vec(),
        tv.weights().to_vec(),
        |i, j| vec_inner(tv.vector(j), fam.vector(i)),
    ))
}

/// Extended synthesis operator: block `j` is `sum_i w_i^X c_ij u_i`.
///
/// This is the adjoint of [`analysis`] for the weighted inner products on
/// both sides. The output lives on the `Y` weights carried by `c`.
pub fn synthesis<T: Real>(fam: &WeightedFamily<T>, c: &CoefficientField<T>) -> Result<TestFamily<T>> {
    check_dim(fam.len(), c.x_len())?;
    if c.x_weights() != fam.weights() {
        return Err(FrameError::Input("coefficient X-weights differ from the family weights".into()));
    }
    let n = fam.dim();
    let mut complex_data = fam.field() == Field::Complex;
    let blocks: Vec<Vec<C<T>>> = (0..c.y_len())
        .map(|j| {
            let mut out = vec![C::zero(); n];
            for (i, (w, u)) in fam.points().enumerate() {
                let coef = c.get(i, j) * w;
                if coef.im != T::zero() {
                    complex_data = true;
                }
                for (o, x) in out.iter_mut().zip(u) {
                    *o += coef * *x;
                }
            }
            out
        })
        .collect();
    let field = if complex_data { Field::Complex } else { Field::Real };
    WeightedFamily::new(field, n, c.y_weights().to_vec(), blocks)
}

/// Extended frame operator: the classical frame operator on every block.
pub fn extended_frame_operator<T: Real>(fam: &WeightedFamily<T>, tv: &TestFamily<T>) -> Result<TestFamily<T>> {
    check_dim(fam.dim(), tv.dim())?;
    let blocks = tv
        .points()
        .map(|(_, v)| frame_operator_apply(fam, v))
        .collect::<Result<Vec<_>>>()?;
    WeightedFamily::new(fam.field().join(tv.field()), fam.dim(), tv.weights().to_vec(), blocks)
}

/// Matrix of the extended frame operator on `blocks` unit-weight blocks, in
/// the standard basis of `F^{n * blocks}`, assembled column by column from
/// [`extended_frame_operator`].
pub fn block_operator_matrix<T: Real>(fam: &WeightedFamily<T>, blocks: usize) -> Result<ComplexMatrix<T>> {
    if blocks == 0 {
        return Err(FrameError::Input("need at least one block".into()));
    }
    let n = fam.dim();
    let size = n * blocks;
    let mut m = ComplexMatrix::zeros(size);
    for col in 0..size {
        let vectors = (0..blocks)
            .map(|j| {
                (0..n)
                    .map(|k| if j * n + k == col { re(T::one()) } else { C::zero() })
                    .collect()
            })
            .collect();
        let tv = WeightedFamily::new(Field::Complex, n, vec![T::one(); blocks], vectors)?;
        let out = extended_frame_operator(fam, &tv)?;
        for j in 0..blocks {
            for (k, z) in out.vector(j).iter().enumerate() {
                m[(j * n + k, col)] = *z;
            }
        }
    }
    Ok(m)
}

/// Test family with the single block `v` of unit weight.
pub fn delta_embedding<T: Real>(v: &[C<T>], field: Field) -> Result<TestFamily<T>> {
    WeightedFamily::new(field, v.len(), vec![T::one()], vec![v.to_vec()])
}

/// Test family `y -> f(y) v` with `f = 1_D / sqrt(nu(D))` on the points in
/// `subset`, so that `||f||_2 = 1`.
pub fn indicator_embedding<T: Real>(v: &[C<T>], y_weights: &[T], subset: &[usize], field: Field) -> Result<TestFamily<T>> {
    let mut f = vec![T::zero(); y_weights.len()];
    let mut measure = T::zero();
    for &j in subset {
        if j >= y_weights.len() {
            return Err(FrameError::Input(format!("subset index {j} out of range")));
        }
        if f[j] == T::zero() {
            f[j] = T::one();
            measure += y_weights[j];
        }
    }
    if measure <= T::zero() {
        return Err(FrameError::Domain("indicator set has zero measure".into()));
    }
    let scale = T::one() / measure.sqrt();
    let vectors = f
        .iter()
        .map(|&fy| v.iter().map(|z| *z * (fy * scale)).collect())
        .collect();
    WeightedFamily::new(field, v.len(), y_weights.to_vec(), vectors)
}

/// Outcome of the extended-frame equivalence checks.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExtensionReport<T> {
    pub trials: usize,
    pub blocks: usize,
    pub lower_bound: T,
    pub upper_bound: T,
    pub is_frame: bool,
    /// `max (A * energy - <S tv, tv>) / scale`, clipped at zero.
    pub max_lower_violation: T,
    /// `max (<S tv, tv> - B * energy) / scale`, clipped at zero.
    pub max_upper_violation: T,
    /// Relative gap between `<S tv, tv>` and `||T tv||^2`.
    pub max_quadratic_form_gap: T,
    /// Relative gap between the delta-embedded quotient and `N(v)`.
    pub max_delta_gap: T,
    /// Relative gap between the indicator-embedded quotient and `N(v)`.
    pub max_indicator_gap: T,
    pub bound_tol: T,
    pub reduction_tol: T,
    pub passed: bool,
}

/// Randomized check that the extended frame inequality holds with the
/// classical optimal bounds, and that delta and normalized-indicator test
/// families reduce the extended quotient to the classical one.
pub fn extension_equivalence_check<T: Real>(
    fam: &WeightedFamily<T>,
    trials: usize,
    blocks: usize,
    seed: u64,
) -> Result<ExtensionReport<T>> {
    if trials == 0 || blocks == 0 {
        return Err(FrameError::Input("trials and blocks must be at least 1".into()));
    }
    let bounds = frame_bounds(fam)?;
    let (a, b) = (bounds.lower.max(T::zero()), bounds.upper);
    let n = fam.dim();
    let field = fam.field();
    let bound_tol = T::tol_floor(1e-10, 64.0);
    let reduction_tol = T::tol_floor(1e-12, 64.0);
    let mut rng = seeded_rng(seed);

    let mut report = ExtensionReport {
        trials,
        blocks,
        lower_bound: a,
        upper_bound: b,
        is_frame: crate::analysis::is_frame(fam, None)?,
        max_lower_violation: T::zero(),
        max_upper_violation: T::zero(),
        max_quadratic_form_gap: T::zero(),
        max_delta_gap: T::zero(),
        max_indicator_gap: T::zero(),
        bound_tol,
        reduction_tol,
        passed: false,
    };

    for _ in 0..trials {
        let weights: Vec<T> = (0..blocks).map(|_| T::lit(rng.random_range(0.1..2.0))).collect();
        let vectors = (0..blocks).map(|_| normal_vector(n, field, &mut rng)).collect();
        let tv = WeightedFamily::new(field, n, weights.clone(), vectors)?;
        let energy = tv.total_energy();

        let s_tv = extended_frame_operator(fam, &tv)?;
        let form = s_tv.pointwise_inner(&tv)?.re;
        let coeff_norm = analysis(fam, &tv)?.weighted_norm_sqr();
        report.max_quadratic_form_gap = report.max_quadratic_form_gap.max(rel_diff(form, coeff_norm));

        let scale = T::one().max(b) * energy;
        report.max_lower_violation = report.max_lower_violation.max((a * energy - form) / scale);
        report.max_upper_violation = report.max_upper_violation.max((form - b * energy) / scale);

        let v = normal_vector::<T, _>(n, field, &mut rng);
        let classical = quotient(&v, fam, QuotientForm::Direct)?;
        let delta = quotient_extended(&delta_embedding(&v, field)?, fam)?;
        report.max_delta_gap = report.max_delta_gap.max(gap(delta, classical, b));

        let subset: Vec<usize> = (0..blocks).filter(|_| rng.random_bool(0.5)).collect();
        let subset = if subset.is_empty() { vec![rng.random_range(0..blocks)] } else { subset };
        let ind = quotient_extended(&indicator_embedding(&v, &weights, &subset, field)?, fam)?;
        report.max_indicator_gap = report.max_indicator_gap.max(gap(ind, classical, b));
    }

    report.passed = report.max_lower_violation <= bound_tol
        && report.max_upper_violation <= bound_tol
        && report.max_quadratic_form_gap <= bound_tol
        && report.max_delta_gap <= reduction_tol
        && report.max_indicator_gap <= reduction_tol;
    Ok(report)
}

// Relative gap, measured against the upper bound when the quotient itself
// is near zero (rank-deficient families).
fn gap<T: Real>(x: T, y: T, upper: T) -> T {
    let scale = x.abs().max(y.abs()).max(upper * T::lit(1e-3));
    if scale == T::zero() {
        T::zero()
    } else {
        (x - y).abs() / scale
    }
}
