//! Frame-preserving constructions in `L^2(X; F^n)`: auxiliary component
//! families, density perturbations, and paths between frames or between
//! Parseval frames through an auxiliary family.
//!
//! Paths come in two legs `t -> t e + (1 - t) a` (endpoint `e` in `{u, v}`,
//! auxiliary `a`), optionally normalized by `sqrt(2t^2 - 2t + 1)`; following
//! the `u` leg from 1 to 0 and the `v` leg from 0 to 1 joins `u` to `v`.

use rand::Rng;
use serde::Serialize;

use crate::analysis::{default_frame_tol, frame_bounds, is_frame, parseval_deviation};
use crate::error::{FrameError, Result};
use crate::family::{orthonormal_basis, orthonormalize_against, weighted_inner, Field, WeightedFamily};
use crate::generators::{normal_vector, seeded_rng};
use crate::linalg::{hermitian_eigenvalues, ComplexMatrix};
use crate::scalar::{Real, C};

/// Random draws allowed for an auxiliary family.
pub const AUXILIARY_DRAWS: usize = 20;
/// Redraws of `t` allowed in [`density_perturb`].
pub const PERTURB_REDRAWS: usize = 64;
/// Relative pivot below which a direction counts as dependent.
pub const PIVOT: f64 = 1e-8;
/// Tolerance on the structural invariants of a Parseval path.
pub const PARSEVAL_PATH_INVARIANT_TOL: f64 = 1e-8;
/// Tolerance on `||U(t) - I||_max` when certifying a Parseval path.
pub const PARSEVAL_PATH_TOL: f64 = 1e-9;

/// Number of positive-weight points: the dimension of the discretized
/// `L^2(X; F)`.
pub fn effective_dimension<T: Real>(fam: &WeightedFamily<T>) -> usize {
    fam.effective_dimension()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum AuxiliaryMode {
    /// Independent components whose span meets the avoided span only in 0.
    Independent,
    /// Orthonormal components, orthogonal to every avoided component.
    Orthonormal,
}

/// Draws `n` auxiliary component functions on the given weighted points.
///
/// In both modes the stacked system (orthonormal basis of the avoided
/// components, then the new components) has smallest singular value above
/// `1e-8` in the weighted inner product, so the new span meets the avoided
/// span only in zero.
pub fn auxiliary_family<T: Real>(
    weights: &[T],
    field: Field,
    n: usize,
    avoid: &[&WeightedFamily<T>],
    mode: AuxiliaryMode,
    seed: u64,
) -> Result<WeightedFamily<T>> {
    if n == 0 {
        return Err(FrameError::Input("n must be positive".into()));
    }
    for fam in avoid {
        if fam.weights() != weights {
            return Err(FrameError::Input(
                "avoided family does not share the template's weighted point set".into(),
            ));
        }
    }
    let pivot = T::lit(PIVOT);
    let avoided: Vec<Vec<C<T>>> = avoid.iter().flat_map(|f| f.components()).collect();
    let avoided_basis = orthonormal_basis(weights, &avoided, pivot);
    let available = weights.iter().filter(|&&w| w > T::zero()).count();
    let required = n + avoided_basis.len();
    if available < required {
        return Err(FrameError::Capacity { required, available });
    }

    let mut rng = seeded_rng(seed);
    for _ in 0..AUXILIARY_DRAWS {
        let raw: Vec<Vec<C<T>>> = (0..n)
            .map(|_| {
                let mut f = normal_vector(weights.len(), field, &mut rng);
                for (z, &w) in f.iter_mut().zip(weights) {
                    if w == T::zero() {
                        *z = C::new(T::zero(), T::zero());
                    }
                }
                f
            })
            .collect();
        let components = match mode {
            AuxiliaryMode::Independent => {
                let mut stacked = avoided_basis.clone();
                stacked.extend(raw.iter().cloned());
                if smallest_singular_value(weights, &stacked)? > pivot {
                    raw
                } else {
                    continue;
                }
            }
            AuxiliaryMode::Orthonormal => {
                let mut basis = avoided_basis.clone();
                let mut fresh = Vec::with_capacity(n);
                for f in &raw {
                    match orthonormalize_against(weights, &basis, f, pivot) {
                        Some(q) => {
                            basis.push(q.clone());
                            fresh.push(q);
                        }
                        None => break,
                    }
                }
                if fresh.len() == n {
                    fresh
                } else {
                    continue;
                }
            }
        };
        return WeightedFamily::from_components(field, weights.to_vec(), &components)
            .map(|f| f.with_label(format!("auxiliary {mode:?} seed={seed}")));
    }
    Err(FrameError::Generation(format!(
        "no admissible auxiliary family in {AUXILIARY_DRAWS} draws"
    )))
}

// sqrt(lambda_min) of the weighted Gram matrix of `funcs`.
fn smallest_singular_value<T: Real>(weights: &[T], funcs: &[Vec<C<T>>]) -> Result<T> {
    let m = funcs.len();
    let mut g = ComplexMatrix::zeros(m);
    for i in 0..m {
        for j in i..m {
            let z = weighted_inner(weights, &funcs[i], &funcs[j])?;
            g[(i, j)] = z;
            g[(j, i)] = z.conj();
        }
        g[(i, i)] = C::new(g[(i, i)].re, T::zero());
    }
    Ok(hermitian_eigenvalues(&g)?.min().max(T::zero()).sqrt())
}

/// A perturbed family and the step that produced it.
#[derive(Clone, Debug)]
pub struct Perturbation<T> {
    pub family: WeightedFamily<T>,
    pub t: T,
    /// `||v_t - u||`.
    pub distance: T,
    pub lower_bound: T,
    pub frame_tol: T,
}

/// Moves `u` towards an independent family `a` by a random small step:
/// `v_t = u + t (a - u)` with `t` uniform in `(0, eps / (||a - u|| + 1))`,
/// redrawn until `v_t` is a frame.
///
/// `det U(v_t)` is a polynomial in `t` that does not vanish at `t = 1`, so
/// only finitely many draws can fail.
pub fn density_perturb<T: Real>(
    u: &WeightedFamily<T>,
    a: &WeightedFamily<T>,
    eps: T,
    seed: u64,
) -> Result<Perturbation<T>> {
    if !(eps > T::zero() && eps.is_finite()) {
        return Err(FrameError::Input("eps must be positive and finite".into()));
    }
    u.require_same_support(a)?;
    if !is_frame(a, None)? {
        return Err(FrameError::Input("auxiliary family is not independent (not a frame)".into()));
    }
    let dist = u.distance(a)?;
    let t_max = (eps / (dist + T::one())).to_f64().unwrap_or(0.0);
    let mut rng = seeded_rng(seed);
    for _ in 0..PERTURB_REDRAWS {
        let t = T::lit(rng.random_range(0.0..t_max));
        if t == T::zero() {
            continue;
        }
        let v = u.lin_comb(T::one() - t, a, t)?;
        let b = frame_bounds(&v)?;
        let tol = default_frame_tol(b.upper);
        if b.lower > tol {
            let distance = v.distance(u)?;
            if distance <= eps {
                return Ok(Perturbation {
                    family: v.with_label(format!("perturbed t={t}")),
                    t,
                    distance,
                    lower_bound: b.lower,
                    frame_tol: tol,
                });
            }
        }
    }
    Err(FrameError::Generation(format!(
        "no frame found within eps after {PERTURB_REDRAWS} draws of t"
    )))
}

/// Auxiliary for [`density_perturb`]: `a = u + w` with `w` orthonormal and,
/// when the point set has room, orthogonal to the components of `u`.
///
/// Then `a - u = w`, so `U(v_t) = U(u) + t^2 I` and every step lifts
/// `lambda_min` by at least `t^2`. Without room for the complement, `w` is
/// only orthonormal and `a` is redrawn until it is independent.
pub fn perturbation_auxiliary<T: Real>(u: &WeightedFamily<T>, seed: u64) -> Result<WeightedFamily<T>> {
    let (w, field, n) = (u.weights(), u.field(), u.dim());
    match auxiliary_family(w, field, n, &[u], AuxiliaryMode::Orthonormal, seed) {
        Ok(dir) => return u.lin_comb(T::one(), &dir, T::one()),
        Err(FrameError::Capacity { .. }) => {}
        Err(e) => return Err(e),
    }
    for k in 0..AUXILIARY_DRAWS as u64 {
        let dir = auxiliary_family(w, field, n, &[], AuxiliaryMode::Orthonormal, seed.wrapping_add(k))?;
        let a = u.lin_comb(T::one(), &dir, T::one())?;
        if is_frame(&a, None)? {
            return Ok(a);
        }
    }
    Err(FrameError::Generation(format!(
        "u + w stayed dependent in {AUXILIARY_DRAWS} draws"
    )))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PathMode {
    /// Straight segments `t e + (1 - t) a`.
    FramePolygonal,
    /// Segments normalized by `sqrt(2t^2 - 2t + 1)`.
    ParsevalNormalized,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Leg {
    U,
    V,
}

/// Two endpoint families joined through an auxiliary family on a shared
/// weighted point set.
#[derive(Clone, Debug)]
pub struct PathSpec<T> {
    u: WeightedFamily<T>,
    v: WeightedFamily<T>,
    aux: WeightedFamily<T>,
    mode: PathMode,
}

impl<T: Real> PathSpec<T> {
    /// Validates the path: shared support always; in Parseval mode also that
    /// all three families are Parseval and the auxiliary components are
    /// orthogonal to every endpoint component (both within `1e-8`).
    pub fn new(u: WeightedFamily<T>, v: WeightedFamily<T>, aux: WeightedFamily<T>, mode: PathMode) -> Result<Self> {
        let path = Self::new_unchecked(u, v, aux, mode)?;
        if mode == PathMode::ParsevalNormalized {
            let tol = T::lit(PARSEVAL_PATH_INVARIANT_TOL);
            for (name, fam) in [("u", &path.u), ("v", &path.v), ("auxiliary", &path.aux)] {
                let dev = parseval_deviation(fam);
                if dev > tol {
                    return Err(FrameError::Input(format!(
                        "{name} is not Parseval: max |U - I| = {dev:e}"
                    )));
                }
            }
            let cross = path.max_cross_inner()?;
            if cross > tol {
                return Err(FrameError::Input(format!(
                    "auxiliary is not orthogonal to the endpoints: max cross inner product {cross:e}"
                )));
            }
        }
        Ok(path)
    }

    /// Only checks that the three families share their weighted point set.
    /// Used for deliberately invalid paths.
    pub fn new_unchecked(u: WeightedFamily<T>, v: WeightedFamily<T>, aux: WeightedFamily<T>, mode: PathMode) -> Result<Self> {
        u.require_same_support(&v)?;
        u.require_same_support(&aux)?;
        Ok(Self { u, v, aux, mode })
    }

    pub fn mode(&self) -> PathMode {
        self.mode
    }

    pub fn endpoint(&self, leg: Leg) -> &WeightedFamily<T> {
        match leg {
            Leg::U => &self.u,
            Leg::V => &self.v,
        }
    }

    pub fn auxiliary(&self) -> &WeightedFamily<T> {
        &self.aux
    }

    /// `max |<a^k, e^l>|` over auxiliary components `a^k` and endpoint
    /// components `e^l` of both endpoints.
    pub fn max_cross_inner(&self) -> Result<T> {
        let w = self.aux.weights();
        let mut worst = T::zero();
        for a in self.aux.components() {
            for e in self.u.components().iter().chain(self.v.components().iter()) {
                worst = worst.max(weighted_inner(w, &a, e)?.norm());
            }
        }
        Ok(worst)
    }
}

/// Point `t` of the selected leg. `t = 1` returns the endpoint and `t = 0`
/// the auxiliary family unchanged.
pub fn path_eval<T: Real>(path: &PathSpec<T>, leg: Leg, t: T) -> Result<WeightedFamily<T>> {
    if !(t >= T::zero() && t <= T::one()) {
        return Err(FrameError::Input(format!("path parameter t = {t} outside [0, 1]")));
    }
    let e = path.endpoint(leg);
    if t == T::one() {
        return Ok(e.clone());
    }
    if t == T::zero() {
        return Ok(path.aux.clone());
    }
    let s = T::one() - t;
    match path.mode {
        PathMode::FramePolygonal => e.lin_comb(t, &path.aux, s),
        PathMode::ParsevalNormalized => {
            let norm = (t * t + s * s).sqrt();
            e.lin_comb(t / norm, &path.aux, s / norm)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PathSample<T> {
    pub leg: Leg,
    pub t: T,
    /// `lambda_min(U(t))` in frame mode, `max |U(t) - I|` in Parseval mode.
    pub value: T,
    pub tol: T,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PathCertificate<T> {
    pub mode: PathMode,
    pub samples_per_leg: usize,
    pub passed: bool,
    /// Smallest `lambda_min` over all samples (frame mode).
    pub min_lower_bound: Option<T>,
    /// Largest `max |U - I|` over all samples (Parseval mode).
    pub max_parseval_deviation: Option<T>,
    pub first_failure: Option<PathSample<T>>,
    pub samples: Vec<PathSample<T>>,
}

/// Samples both legs at `samples` equispaced parameters in `[0, 1]` and
/// checks the frame (or Parseval) property at each.
pub fn certify_path<T: Real>(path: &PathSpec<T>, samples: usize) -> Result<PathCertificate<T>> {
    if samples < 2 {
        return Err(FrameError::Input("need at least 2 samples per leg".into()));
    }
    let mut out = Vec::with_capacity(2 * samples);
    for leg in [Leg::U, Leg::V] {
        for i in 0..samples {
            let t = T::lit(i as f64 / (samples - 1) as f64);
            let fam = path_eval(path, leg, t)?;
            let sample = match path.mode {
                PathMode::FramePolygonal => {
                    let b = frame_bounds(&fam)?;
                    let tol = default_frame_tol(b.upper);
                    PathSample {
                        leg,
                        t,
                        value: b.lower,
                        tol,
                        passed: b.lower > tol,
                    }
                }
                PathMode::ParsevalNormalized => {
                    let dev = parseval_deviation(&fam);
                    let tol = T::lit(PARSEVAL_PATH_TOL);
                    PathSample {
                        leg,
                        t,
                        value: dev,
                        tol,
                        passed: dev <= tol,
                    }
                }
            };
            out.push(sample);
        }
    }
    let passed = out.iter().all(|s| s.passed);
    let first_failure = out.iter().find(|s| !s.passed).cloned();
    let (min_lower_bound, max_parseval_deviation) = match path.mode {
        PathMode::FramePolygonal => (out.iter().map(|s| s.value).reduce(T::min), None),
        PathMode::ParsevalNormalized => (None, out.iter().map(|s| s.value).reduce(T::max)),
    };
    Ok(PathCertificate {
        mode: path.mode,
        samples_per_leg: samples,
        passed,
        min_lower_bound,
        max_parseval_deviation,
        first_failure,
        samples: out,
    })
}

/// Builds the auxiliary family for `u` and `v` (independent in frame mode,
/// orthonormal in Parseval mode) and returns the resulting path.
///
/// Requires effective dimension at least `n + rank(u, v components)`; for
/// generic frames that is `3n`.
pub fn connect<T: Real>(u: &WeightedFamily<T>, v: &WeightedFamily<T>, mode: PathMode, seed: u64) -> Result<PathSpec<T>> {
    u.require_same_support(v)?;
    let aux_mode = match mode {
        PathMode::FramePolygonal => {
            for (name, fam) in [("u", u), ("v", v)] {
                if !is_frame(fam, None)? {
                    return Err(FrameError::Input(format!("endpoint {name} is not a frame")));
                }
            }
            AuxiliaryMode::Independent
        }
        PathMode::ParsevalNormalized => AuxiliaryMode::Orthonormal,
    };
    let aux = auxiliary_family(u.weights(), u.field().join(v.field()), u.dim(), &[u, v], aux_mode, seed)?;
    PathSpec::new(u.clone(), v.clone(), aux, mode)
}
